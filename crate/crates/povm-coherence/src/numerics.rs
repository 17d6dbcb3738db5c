//! Dense complex matrix algebra and entropy primitives.
//!
//! Everything here is a pure function of its inputs. Eigenvector order and
//! phase are fixed deterministically so that identical input bits always
//! produce identical output bits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix carrying all operators in this crate.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and ascending; `eigenvectors` holds the matching
/// orthonormal eigenvectors as columns. Within a degeneracy window of
/// [`tol::DEGENERACY`] the columns are phase-fixed (first component of
/// modulus above threshold made real positive) and ordered by entrywise
/// lexicographic comparison, which pins a unique representative.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// Rebuilds `V diag(lambda) V^dag`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

/// Largest entry modulus.
pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise deviation from hermiticity, `max |M_ij - conj(M_ji)|`.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest entrywise deviation from the identity.
pub fn deviation_from_identity(m: &ComplexMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            dev = dev.max((m[(i, j)] - target).norm());
        }
    }
    dev
}

fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Internal {
            what: "matrix contains non-finite entries",
            value: f64::NAN,
        });
    }
    Ok(m.nrows())
}

fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let dev = hermiticity_deviation(m);
    if dev > tol::VALIDATION {
        return Err(Error::NotHermitian {
            deviation: dev,
            bound: tol::VALIDATION,
        });
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, ascending. Closed form for dimensions
/// one and two, iterative solver above.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = ensure_square(m)?;
    ensure_hermitian(m)?;
    Ok(eigenvalues_unchecked(m, n))
}

/// Eigenvalues without input validation; callers guarantee hermiticity.
pub(crate) fn eigenvalues_unchecked(m: &ComplexMatrix, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)].re],
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let mid = 0.5 * (a + d);
            let half_gap = 0.5 * (a - d);
            let disc = (half_gap * half_gap + m[(0, 1)].norm_sqr()).sqrt();
            vec![mid - disc, mid + disc]
        }
        _ => {
            let sym = hermitian_part(m);
            let mut vals: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("real eigenvalues"));
            vals
        }
    }
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Compares complex numbers as `(re, im)` pairs. Total order for the finite
/// values that reach it.
fn lex_cmp_complex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .expect("finite entries")
        .then(a.im.partial_cmp(&b.im).expect("finite entries"))
}

fn lex_cmp_column(m: &ComplexMatrix, a: usize, b: usize) -> std::cmp::Ordering {
    for r in 0..m.nrows() {
        let ord = lex_cmp_complex(m[(r, a)], m[(r, b)]);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Full eigendecomposition of a Hermitian matrix with deterministic ordering.
///
/// Errors if the input is not square or deviates from hermiticity by more
/// than [`tol::VALIDATION`] in any entry.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<EigDecomposition> {
    let n = ensure_square(m)?;
    ensure_hermitian(m)?;

    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("real eigenvalues")
    });

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }

    for c in 0..n {
        fix_column_phase(&mut vectors, c);
    }

    // Deterministic order inside each degenerate group.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eigenvalues[end] - eigenvalues[end - 1]).abs() <= tol::DEGENERACY {
            end += 1;
        }
        if end - start > 1 {
            let mut group: Vec<usize> = (start..end).collect();
            group.sort_by(|&a, &b| lex_cmp_column(&vectors, a, b));
            let cols: Vec<_> = group
                .iter()
                .map(|&c| vectors.column(c).into_owned())
                .collect();
            for (offset, col) in cols.into_iter().enumerate() {
                vectors.set_column(start + offset, &col);
            }
        }
        start = end;
    }

    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

fn fix_column_phase(m: &mut ComplexMatrix, c: usize) {
    for r in 0..m.nrows() {
        let z = m[(r, c)];
        if z.norm() > tol::PROB_FLOOR {
            let phase = z.conj() / z.norm();
            for k in 0..m.nrows() {
                let v = m[(k, c)];
                m[(k, c)] = v * phase;
            }
            return;
        }
    }
}

/// Hermitian positive-semidefinite square root.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` clamp to zero; anything lower is a
/// positivity failure.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_clamped(m, tol::PSD_CLAMP)
}

/// Square root with a caller-chosen clamp window, for operators that were
/// validated at a looser positivity tolerance.
pub(crate) fn psd_sqrt_clamped(m: &ComplexMatrix, clamp: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecomposition(m)?;
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &v in &eig.eigenvalues {
        if v < -clamp {
            return Err(Error::NotPsd {
                min_eigenvalue: v,
                clamp,
            });
        }
        roots.push(Complex64::new(v.max(0.0).sqrt(), 0.0));
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    let root = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
    Ok(hermitian_part(&root))
}

/// Entropy (bits) of a set of nonnegative weights; values at or below
/// [`tol::PROB_FLOOR`] contribute zero.
pub fn entropy_bits(weights: &[f64]) -> f64 {
    let mut h = 0.0;
    for &w in weights {
        if w > tol::PROB_FLOOR {
            h -= w * w.log2();
        }
    }
    h
}

/// Von Neumann entropy in bits of a density operator given as a raw matrix.
///
/// Validates hermiticity, unit trace and positivity before evaluating
/// `-sum(lambda log2 lambda)` over the spectrum.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let n = ensure_square(rho)?;
    ensure_hermitian(rho)?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol::VALIDATION || trace.im.abs() > tol::VALIDATION {
        return Err(Error::TraceNotOne {
            trace: trace.re,
            bound: tol::VALIDATION,
        });
    }
    let eigenvalues = eigenvalues_unchecked(rho, n);
    if let Some(&min) = eigenvalues.first() {
        if min < -tol::PSD_CLAMP {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
                clamp: tol::PSD_CLAMP,
            });
        }
    }
    Ok(entropy_bits(&eigenvalues))
}

/// Shannon entropy in bits of a probability vector.
///
/// Entries in `[-PROB_FLOOR, 0)` clamp to zero; the vector must sum to one
/// within [`tol::VALIDATION`].
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut clamped = Vec::with_capacity(p.len());
    for (index, &value) in p.iter().enumerate() {
        if value < -tol::PROB_FLOOR {
            return Err(Error::NegativeProbability { index, value });
        }
        clamped.push(value.max(0.0));
    }
    let sum: f64 = clamped.iter().sum();
    if (sum - 1.0).abs() > tol::VALIDATION {
        return Err(Error::NotNormalized {
            sum,
            bound: tol::VALIDATION,
        });
    }
    Ok(entropy_bits(&clamped))
}

/// Real part of `tr(AB)` without forming the product.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            c(StandardNormal.sample(rng), StandardNormal.sample(rng))
        })
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = random_gaussian_matrix(n, rng);
        (&g + g.adjoint()).scale(0.5)
    }

    fn random_psd(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let g = random_gaussian_matrix(n, rng);
        &g * g.adjoint()
    }

    #[test]
    fn identity_eigenvalues_are_ones() {
        let eig = hermitian_eigendecomposition(&ComplexMatrix::identity(2, 2)).unwrap();
        assert_eq!(eig.eigenvalues.len(), 2);
        for v in eig.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_only_path_agrees_with_full_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in [2, 3, 5] {
            let m = random_hermitian(n, &mut rng);
            let fast = hermitian_eigenvalues(&m).unwrap();
            let full = hermitian_eigendecomposition(&m).unwrap().eigenvalues;
            for (a, b) in fast.iter().zip(&full) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(hermitian_eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pauli_x_eigensystem() {
        let x = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        );
        let eig = hermitian_eigendecomposition(&x).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        // Eigenvectors are (|0> -+ |1>)/sqrt(2) up to phase; after phase
        // fixing the first component is real positive.
        let s = 1.0 / 2.0_f64.sqrt();
        let minus = eig.eigenvectors.column(0);
        assert!((minus[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((minus[1] - c(-s, 0.0)).norm() < 1e-12);
        let plus = eig.eigenvectors.column(1);
        assert!((plus[0] - c(s, 0.0)).norm() < 1e-12);
        assert!((plus[1] - c(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn reconstruction_of_random_hermitian_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = random_hermitian(4, &mut rng);
            let eig = hermitian_eigendecomposition(&m).unwrap();
            let err = max_abs_entry(&(eig.reconstruct() - &m));
            assert!(err < 1e-11, "reconstruction error {err:e}");
            // Columns orthonormal.
            let gram = eig.eigenvectors.adjoint() * &eig.eigenvectors;
            assert!(deviation_from_identity(&gram) < 1e-12);
            // Ascending order.
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn eigendecomposition_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(5, &mut rng);
        let a = hermitian_eigendecomposition(&m).unwrap();
        let b = hermitian_eigendecomposition(&m.clone()).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(
            a.eigenvectors.as_slice().to_vec(),
            b.eigenvectors.as_slice().to_vec()
        );
    }

    #[test]
    fn degenerate_eigenvectors_have_fixed_order() {
        // Identity has a fully degenerate spectrum; the deterministic order
        // must still produce an orthonormal frame and reconstruct exactly.
        let eig = hermitian_eigendecomposition(&ComplexMatrix::identity(3, 3)).unwrap();
        let gram = eig.eigenvectors.adjoint() * &eig.eigenvectors;
        assert!(deviation_from_identity(&gram) < 1e-12);
        assert!(max_abs_entry(&(eig.reconstruct() - ComplexMatrix::identity(3, 3))) < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigendecomposition(&m),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
        );
        let err = hermitian_eigendecomposition(&m).unwrap_err();
        match err {
            Error::NotHermitian { deviation, bound } => {
                assert!((deviation - 0.5).abs() < 1e-12);
                assert_eq!(bound, tol::VALIDATION);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(9.0, 0.0)],
        );
        let root = psd_sqrt(&m).unwrap();
        assert!((root[(0, 0)] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((root[(1, 1)] - c(3.0, 0.0)).norm() < 1e-12);
        assert!(root[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_rank_one_effect_scales_the_projector() {
        // (1/2)|phi><phi| has sqrt (1/sqrt(2))|phi><phi| for unit |phi>.
        let s = 1.0 / 2.0_f64.sqrt();
        let phi = nalgebra::DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]);
        let projector = &phi * phi.adjoint();
        let effect = projector.scale(0.5);
        let root = psd_sqrt(&effect).unwrap();
        let expected = projector.scale(1.0 / 2.0_f64.sqrt());
        assert!(max_abs_entry(&(root - expected)) < 1e-12);
    }

    #[test]
    fn sqrt_squares_back_for_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let m = random_psd(4, &mut rng);
            let root = psd_sqrt(&m).unwrap();
            let err = max_abs_entry(&(&root * &root - &m));
            assert!(err < 1e-10, "squaring error {err:e}");
            assert!(hermiticity_deviation(&root) < 1e-12);
        }
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalues() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1e-3, 0.0)],
        );
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert!(von_neumann_entropy(&m).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_of_maximally_mixed_states() {
        let qubit = ComplexMatrix::identity(2, 2).scale(0.5);
        assert!((von_neumann_entropy(&qubit).unwrap() - 1.0).abs() < 1e-12);
        let two_qubit = ComplexMatrix::identity(4, 4).scale(0.25);
        assert!((von_neumann_entropy(&two_qubit).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shannon_entropy_reference_values() {
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-12);
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn shannon_entropy_rejects_unnormalized() {
        assert!(matches!(
            shannon_entropy(&[0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            shannon_entropy(&[1.5, -0.5]),
            Err(Error::NegativeProbability { .. })
        ));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let direct = (&a * &b).trace().re;
        assert!((trace_product_re(&a, &b) - direct).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eigen_reconstruction_property(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_hermitian(4, &mut rng);
            let eig = hermitian_eigendecomposition(&m).unwrap();
            prop_assert!(max_abs_entry(&(eig.reconstruct() - &m)) < 1e-11);
        }

        #[test]
        fn entropy_bounds_property(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_psd(4, &mut rng);
            let trace = g.trace().re;
            let rho = g.scale(1.0 / trace);
            let s = von_neumann_entropy(&rho).unwrap();
            prop_assert!(s >= -1e-12);
            prop_assert!(s <= 2.0 + 1e-9);
        }
    }
}
