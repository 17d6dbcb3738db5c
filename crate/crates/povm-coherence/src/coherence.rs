//! Relative-entropy coherence measures.
//!
//! Three static measures share one entropy backbone:
//!
//! - block coherence of a state with respect to a projective measurement,
//!   `S(sum_i P_i sigma P_i) - S(sigma)`;
//! - POVM coherence `H[{p_i}] + sum_i p_i S(rho_i) - S(rho)` with
//!   `p_i = tr(E_i rho)` and post-measurement states
//!   `rho_i = A_i rho A_i^dag / p_i` built from the canonical operators
//!   `A_i = sqrt(E_i)`;
//! - the plain basis coherence, the POVM measure for the rank-one
//!   computational-basis measurement.
//!
//! The value is gauge invariant: replacing `A_i` by `W_i A_i` for unitary
//! `W_i` leaves every entropy unchanged, so fixing the Hermitian root is a
//! convention, not a restriction.

use crate::error::{Error, Result};
use crate::numerics::{
    eigenvalues_unchecked, entropy_bits, hermitian_eigendecomposition, max_abs_entry, ComplexMatrix,
};
use crate::quantum::{DensityMatrix, Povm, ProjectiveMeasurement};
use crate::tol;

/// Non-negative coherence in bits.
///
/// Raw values in `[-COHERENCE_CLAMP, 0)` clamp to zero; anything more
/// negative is reported as an internal inconsistency instead of a negative
/// measure.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CoherenceValue {
    bits: f64,
}

impl CoherenceValue {
    pub fn new(raw_bits: f64) -> Result<Self> {
        if raw_bits < -tol::COHERENCE_CLAMP {
            return Err(Error::Internal {
                what: "coherence negative beyond clamp window",
                value: raw_bits,
            });
        }
        Ok(Self {
            bits: raw_bits.max(0.0),
        })
    }

    pub fn bits(&self) -> f64 {
        self.bits
    }
}

impl From<CoherenceValue> for f64 {
    fn from(v: CoherenceValue) -> f64 {
        v.bits
    }
}

/// Reusable evaluator for the POVM relative-entropy coherence; caches the
/// measurement operators so repeated evaluation (grids, optimizers) skips
/// the per-call square roots.
#[derive(Debug, Clone)]
pub struct PovmCoherence {
    povm: Povm,
    operators: Vec<ComplexMatrix>,
}

impl PovmCoherence {
    /// Evaluator with the canonical operators `A_i = sqrt(E_i)`.
    pub fn new(povm: &Povm) -> Result<Self> {
        let operators = povm.sqrt_effects()?;
        Ok(Self {
            povm: povm.clone(),
            operators,
        })
    }

    /// Evaluator with caller-chosen measurement operators; each must satisfy
    /// `A_i^dag A_i = E_i` within [`tol::VALIDATION`].
    pub fn with_operators(povm: &Povm, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.len() != povm.n_outcomes() {
            return Err(Error::DimensionMismatch {
                expected: povm.n_outcomes(),
                got: operators.len(),
            });
        }
        for (a, e) in operators.iter().zip(povm.effects()) {
            let dev = max_abs_entry(&(a.adjoint() * a - e));
            if dev > tol::VALIDATION {
                return Err(Error::Invalid(format!(
                    "measurement operator does not reproduce its effect: deviation {dev:e}"
                )));
            }
        }
        Ok(Self {
            povm: povm.clone(),
            operators,
        })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// `H[{p_i}] + sum_i p_i S(rho_i) - S(rho)`; outcomes with
    /// `p_i <= PROB_FLOOR` contribute zero.
    pub fn coherence(&self, rho: &DensityMatrix) -> Result<CoherenceValue> {
        let probabilities = self.povm.outcome_probabilities(rho)?;
        let mut value = entropy_bits(&probabilities) - rho.entropy();
        for (a, &p) in self.operators.iter().zip(&probabilities) {
            if p <= tol::PROB_FLOOR {
                continue;
            }
            let post = a * rho.matrix() * a.adjoint();
            let eigenvalues = eigenvalues_unchecked(&post, post.nrows());
            let weights: Vec<f64> = eigenvalues.iter().map(|&v| (v / p).max(0.0)).collect();
            value += p * entropy_bits(&weights);
        }
        CoherenceValue::new(value)
    }
}

/// Block relative-entropy coherence `S(sum_i P_i sigma P_i) - S(sigma)`,
/// the closed form of the minimal relative entropy to block-incoherent
/// states.
pub fn block_relative_entropy_coherence(
    sigma: &DensityMatrix,
    measurement: &ProjectiveMeasurement,
) -> Result<CoherenceValue> {
    if sigma.dim() != measurement.dim() {
        return Err(Error::DimensionMismatch {
            expected: measurement.dim(),
            got: sigma.dim(),
        });
    }
    let dephased = measurement.block_dephase(sigma.matrix());
    let s_dephased = entropy_bits(&eigenvalues_unchecked(&dephased, dephased.nrows()));
    CoherenceValue::new(s_dephased - sigma.entropy())
}

/// POVM relative-entropy coherence with canonical operators.
pub fn povm_relative_entropy_coherence(rho: &DensityMatrix, povm: &Povm) -> Result<CoherenceValue> {
    PovmCoherence::new(povm)?.coherence(rho)
}

/// Coherence with respect to the computational basis,
/// `S(diag(rho)) - S(rho)`. Matches the POVM measure for the rank-one
/// basis measurement.
pub fn standard_relative_entropy_coherence(rho: &DensityMatrix) -> Result<CoherenceValue> {
    let diagonal: Vec<f64> = (0..rho.dim()).map(|k| rho.matrix()[(k, k)].re).collect();
    CoherenceValue::new(entropy_bits(&diagonal) - rho.entropy())
}

/// Frobenius norm of `sum_i Ebar_i sigma Ebar_i - sigma`, where `Ebar_i`
/// projects onto the eigenvectors of `E_i` with eigenvalue above
/// [`tol::RANGE_RANK`]. A value at or below [`tol::VALIDATION`] certifies
/// that `sigma` is a fixed point of the range-projector dephasing, the
/// faithfulness condition for zero coherence.
pub fn povm_dephasing_residual(sigma: &DensityMatrix, povm: &Povm) -> Result<f64> {
    if sigma.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: sigma.dim(),
        });
    }
    let mut dephased = ComplexMatrix::zeros(sigma.dim(), sigma.dim());
    for effect in povm.effects() {
        let range = range_projector(effect)?;
        dephased += &range * sigma.matrix() * &range;
    }
    Ok((dephased - sigma.matrix()).norm())
}

/// Projector onto the span of eigenvectors with eigenvalue above the rank
/// threshold.
fn range_projector(effect: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigendecomposition(effect)?;
    let dim = effect.nrows();
    let mut projector = ComplexMatrix::zeros(dim, dim);
    for (k, &value) in eig.eigenvalues.iter().enumerate() {
        if value > tol::RANGE_RANK {
            let col = eig.eigenvectors.column(k);
            for r in 0..dim {
                for c in 0..dim {
                    projector[(r, c)] += col[r] * col[c].conj();
                }
            }
        }
    }
    Ok(projector)
}
