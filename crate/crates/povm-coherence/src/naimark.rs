//! Canonical Naimark extension: a projective measurement on a larger space
//! reproducing a POVM's statistics on embedded states.
//!
//! For a POVM `{E_i}` with `n` outcomes on dimension `d`, the isometry
//! `V = sum_i (sqrt(E_i) kron |i>)` maps `C^d` into `C^d kron C^n`; its `d`
//! columns are orthonormal because the effects sum to the identity. The
//! columns are completed to a `dn x dn` unitary `U` with
//! `U(|j> kron |0>) = V|j>`, and the extension projectors are
//! `P_i = U^dag (I_d kron |i><i|) U`, so that
//! `tr(P_i (rho kron |0><0|)) = tr(E_i rho)` for every state `rho`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::{deviation_from_identity, trace_product_re, ComplexMatrix};
use crate::quantum::{DensityMatrix, Povm, ProjectiveMeasurement};
use crate::sampling;
use crate::tol;

/// Seed for the construction-time dilation-identity check.
const CONSTRUCTION_CHECK_SEED: u64 = 0x4e61_696d;
const CONSTRUCTION_CHECK_SAMPLES: usize = 200;

/// Projective measurement on dimension `d * n` realizing a POVM, together
/// with the source POVM it was built from. The embedding ancilla index is
/// fixed at zero: states embed as `rho kron |0><0|`.
#[derive(Debug, Clone)]
pub struct NaimarkExtension {
    system_dim: usize,
    ancilla_dim: usize,
    measurement: ProjectiveMeasurement,
    source: Povm,
}

impl NaimarkExtension {
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// Number of outcomes of the source POVM.
    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    /// Dimension of the Naimark space, `system_dim * ancilla_dim`.
    pub fn extension_dim(&self) -> usize {
        self.system_dim * self.ancilla_dim
    }

    pub fn measurement(&self) -> &ProjectiveMeasurement {
        &self.measurement
    }

    pub fn source(&self) -> &Povm {
        &self.source
    }

    /// Test-only constructor from raw parts; skips the dilation check.
    #[doc(hidden)]
    pub fn from_parts(
        system_dim: usize,
        ancilla_dim: usize,
        measurement: ProjectiveMeasurement,
        source: Povm,
    ) -> Self {
        Self {
            system_dim,
            ancilla_dim,
            measurement,
            source,
        }
    }
}

/// Builds the canonical extension of a POVM.
///
/// Gram-Schmidt completion runs over standard basis vectors in index order
/// with pivot threshold [`tol::GS_PIVOT`]; degenerate pivots are skipped.
/// The dilation identity is verified on 200 seeded random states before the
/// extension is returned.
pub fn canonical_extension(povm: &Povm) -> Result<NaimarkExtension> {
    let d = povm.dim();
    let n = povm.n_outcomes();
    let dn = d * n;

    let roots = povm.sqrt_effects()?;

    // V columns: V[(s*n + i), j] = sqrt(E_i)[s, j].
    let mut isometry = ComplexMatrix::zeros(dn, d);
    for (i, root) in roots.iter().enumerate() {
        for s in 0..d {
            for j in 0..d {
                isometry[(s * n + i, j)] = root[(s, j)];
            }
        }
    }
    let gram = isometry.adjoint() * &isometry;
    let ortho_dev = deviation_from_identity(&gram);
    if ortho_dev > tol::VALIDATION {
        return Err(Error::Internal {
            what: "isometry columns not orthonormal; POVM completeness degraded",
            value: ortho_dev,
        });
    }

    // Unitary completion. Embedded columns (j*n) carry V|j>; the remaining
    // positions are filled from standard basis vectors in index order.
    let mut unitary = ComplexMatrix::zeros(dn, dn);
    let mut accepted: Vec<usize> = Vec::with_capacity(dn);
    for j in 0..d {
        let col = orthogonalize(&unitary, &accepted, &isometry.column(j).into_owned()).ok_or(
            Error::Internal {
                what: "embedded isometry column collapsed during orthonormalization",
                value: 0.0,
            },
        )?;
        unitary.set_column(j * n, &col);
        accepted.push(j * n);
    }
    let mut free_positions: Vec<usize> = (0..dn).filter(|k| k % n != 0).collect();
    free_positions.reverse(); // pop() yields ascending order
    for basis_index in 0..dn {
        if free_positions.is_empty() {
            break;
        }
        let mut candidate = nalgebra::DVector::from_element(dn, Complex64::new(0.0, 0.0));
        candidate[basis_index] = Complex64::new(1.0, 0.0);
        if let Some(col) = orthogonalize(&unitary, &accepted, &candidate) {
            let position = free_positions.pop().expect("checked non-empty");
            unitary.set_column(position, &col);
            accepted.push(position);
        }
    }
    if !free_positions.is_empty() {
        return Err(Error::Internal {
            what: "Gram-Schmidt completion ran out of basis vectors",
            value: free_positions.len() as f64,
        });
    }

    // P_i = U^dag (I_d kron |i><i|) U.
    let mut projectors = Vec::with_capacity(n);
    for i in 0..n {
        let mut selected = ComplexMatrix::zeros(dn, dn);
        for s in 0..d {
            let r = s * n + i;
            selected.row_mut(r).copy_from(&unitary.row(r));
        }
        projectors.push(selected.adjoint() * selected);
    }
    let measurement = ProjectiveMeasurement::new(projectors)?;

    let extension = NaimarkExtension {
        system_dim: d,
        ancilla_dim: n,
        measurement,
        source: povm.clone(),
    };
    let deviation = verify_extension(
        povm,
        &extension,
        CONSTRUCTION_CHECK_SAMPLES,
        CONSTRUCTION_CHECK_SEED,
    )?;
    if deviation > tol::VALIDATION {
        return Err(Error::Internal {
            what: "dilation identity violated by freshly built extension",
            value: deviation,
        });
    }
    Ok(extension)
}

/// Projects `candidate` out of the accepted columns of `unitary` and
/// normalizes; `None` when the remainder norm falls below the pivot
/// threshold.
fn orthogonalize(
    unitary: &ComplexMatrix,
    accepted: &[usize],
    candidate: &nalgebra::DVector<Complex64>,
) -> Option<nalgebra::DVector<Complex64>> {
    let mut v = candidate.clone();
    // Two rounds of modified Gram-Schmidt keep the frame orthonormal to
    // machine precision.
    for _ in 0..2 {
        for &c in accepted {
            let col = unitary.column(c);
            let overlap = col.dotc(&v);
            v -= col * overlap;
        }
    }
    let norm = v.norm();
    if norm < tol::GS_PIVOT {
        return None;
    }
    Some(v.unscale(norm))
}

/// Embeds a system state into the Naimark space: `rho kron |0><0|`.
pub fn embed_state(rho: &DensityMatrix, ext: &NaimarkExtension) -> Result<DensityMatrix> {
    if rho.dim() != ext.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: ext.system_dim(),
            got: rho.dim(),
        });
    }
    let n = ext.ancilla_dim();
    let mut ancilla = ComplexMatrix::zeros(n, n);
    ancilla[(0, 0)] = Complex64::new(1.0, 0.0);
    Ok(DensityMatrix::from_valid(rho.matrix().kronecker(&ancilla)))
}

/// Maximum deviation `|tr(P_i (rho kron |0><0|)) - tr(E_i rho)|` over
/// `samples` seeded random states and all outcomes. Reports the deviation;
/// never errors on a mismatched extension.
pub fn verify_extension(
    povm: &Povm,
    ext: &NaimarkExtension,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if povm.dim() != ext.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: ext.system_dim(),
            got: povm.dim(),
        });
    }
    if povm.n_outcomes() != ext.ancilla_dim() {
        return Err(Error::DimensionMismatch {
            expected: ext.ancilla_dim(),
            got: povm.n_outcomes(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..samples {
        let rho = sampling::random_density_matrix(povm.dim(), &mut rng);
        let embedded = embed_state(&rho, ext)?;
        for (effect, projector) in povm.effects().iter().zip(ext.measurement().projectors()) {
            let direct = trace_product_re(effect, rho.matrix());
            let dilated = trace_product_re(projector, embedded.matrix());
            max_dev = max_dev.max((direct - dilated).abs());
        }
    }
    Ok(max_dev)
}
