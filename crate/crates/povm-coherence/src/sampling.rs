//! Seeded random quantum objects.
//!
//! States are drawn by normalizing `G G^dag` with `G` a matrix of
//! independent standard complex Gaussian entries; unitaries by
//! orthonormalizing such a matrix. Fixing the generator seed fixes every
//! draw, which keeps verification and optimization reproducible.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::numerics::ComplexMatrix;
use crate::quantum::{Channel, DensityMatrix, Povm, ProjectiveMeasurement};

/// Matrix of independent standard complex Gaussian entries.
pub fn random_gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Hilbert-Schmidt-distributed density matrix `G G^dag / tr(G G^dag)`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    loop {
        let g = random_gaussian_matrix(dim, rng);
        let m = &g * g.adjoint();
        let trace = m.trace().re;
        if trace > 1e-6 {
            return DensityMatrix::new(m.scale(1.0 / trace)).expect("normalized Gram matrix");
        }
    }
}

/// Normalized Gaussian vector.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let norm = v.norm();
        if norm > 1e-6 {
            return v.unscale(norm);
        }
    }
}

/// Unitary obtained by Gram-Schmidt orthonormalization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = random_gaussian_matrix(dim, rng);
        if let Some(u) = orthonormalize_columns(&g) {
            return u;
        }
    }
}

fn orthonormalize_columns(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.nrows();
    let mut u = g.clone();
    for c in 0..n {
        let mut col = u.column(c).into_owned();
        for prev in 0..c {
            let overlap = u.column(prev).dotc(&col);
            col -= u.column(prev) * overlap;
        }
        let norm = col.norm();
        if norm < 1e-8 {
            return None;
        }
        u.set_column(c, &col.unscale(norm));
    }
    Some(u)
}

/// Random POVM: `E_i = S^{-1/2} F_i S^{-1/2}` with `F_i = G_i G_i^dag` and
/// `S = sum_i F_i`, which sums to the identity by construction.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    assert!(outcomes >= 1);
    loop {
        let parts: Vec<ComplexMatrix> = (0..outcomes)
            .map(|_| {
                let g = random_gaussian_matrix(dim, rng);
                &g * g.adjoint()
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for p in &parts {
            total += p;
        }
        let Ok(inv_root) = inverse_sqrt(&total) else {
            continue;
        };
        let effects: Vec<ComplexMatrix> = parts.iter().map(|f| &inv_root * f * &inv_root).collect();
        if let Ok(povm) = Povm::new(effects) {
            return povm;
        }
    }
}

fn inverse_sqrt(m: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    let eig = crate::numerics::hermitian_eigendecomposition(m)?;
    if eig.eigenvalues.iter().any(|&v| v < 1e-8) {
        return Err(crate::Error::Internal {
            what: "matrix too close to singular for inverse square root",
            value: eig.eigenvalues[0],
        });
    }
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&v| Complex64::new(1.0 / v.sqrt(), 0.0)),
    ));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Random projective measurement whose projector ranks are `ranks`
/// (summing to `dim`): blocks of columns of a random unitary.
pub fn random_projective_measurement<R: Rng + ?Sized>(
    dim: usize,
    ranks: &[usize],
    rng: &mut R,
) -> ProjectiveMeasurement {
    assert_eq!(ranks.iter().sum::<usize>(), dim);
    let u = random_unitary(dim, rng);
    let mut projectors = Vec::with_capacity(ranks.len());
    let mut start = 0;
    for &rank in ranks {
        let mut p = ComplexMatrix::zeros(dim, dim);
        for c in start..start + rank {
            let col = u.column(c);
            for r in 0..dim {
                for s in 0..dim {
                    p[(r, s)] += col[r] * col[s].conj();
                }
            }
        }
        projectors.push(p);
        start += rank;
    }
    ProjectiveMeasurement::new(projectors).expect("blocks of a unitary frame")
}

/// Mixed-unitary channel with weights drawn by normalizing uniform draws.
pub fn random_mixed_unitary_channel<R: Rng + ?Sized>(
    dim: usize,
    terms: usize,
    rng: &mut R,
) -> Channel {
    assert!(terms >= 1);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.01..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    let pairs = weights
        .into_iter()
        .map(|w| (w, random_unitary(dim, rng)))
        .collect();
    Channel::mixed_unitary(pairs).expect("normalized weights and unitaries")
}
