//! Bundled reference scenario and grid procedures.
//!
//! The reference example is a four-outcome qubit POVM with effects
//! `E_k = (1/2)|phi_k><phi_k|`, `|phi_k> = (|0> + i^k |1>)/sqrt(2)`. Its
//! relative-entropy coherence has closed-form landmarks: maximum 2 on the
//! poles of the Bloch sphere, minimum 1.5 among pure states on the equator
//! at azimuth multiples of pi/2, and minimum 1 overall at the maximally
//! mixed state. For a fixed mixing weight `p` the coherence is pinched
//! between `1.5 - H(p)/2` and `2 - H(p)`.
//!
//! The example also carries an explicit minimal projective dilation (four
//! orthonormal vectors in C^4) and three unitaries: `u_max`, which raises
//! coherence by the maximal 0.5, and `u_min`/`u_min_prime`, which preserve
//! it pointwise.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::coherence::PovmCoherence;
use crate::error::{Error, Result};
use crate::numerics::{deviation_from_identity, trace_product_re, ComplexMatrix};
use crate::quantum::{bloch_state, BlochPoint, Channel, Povm};
use crate::sampling;
use crate::tol;

/// Completeness bound for the fixture POVM (exact construction, so much
/// tighter than general input validation).
const FIXTURE_COMPLETENESS: f64 = 1e-12;
/// Bound for the printed dilation vectors (orthonormality and marginals).
const FIXTURE_VECTORS: f64 = 1e-9;
const FIXTURE_CHECK_SEED: u64 = 0x5265_6631;

/// The bundled four-outcome qubit example, verified at construction.
#[derive(Debug, Clone)]
pub struct ReferenceExample {
    /// Effects `(1/2)|phi_k><phi_k|` for `k = 0..3`.
    pub povm: Povm,
    /// Orthonormal vectors of a minimal projective dilation in C^4 = C^2
    /// tensor C^2, identified as ancilla (first factor) tensor system
    /// (second factor); system states embed into components 0 and 1.
    pub naimark_vectors: Vec<DVector<Complex64>>,
    /// Unitary raising the POVM coherence by the maximal amount 0.5.
    pub u_max: Channel,
    /// Bit-flip unitary; preserves the POVM coherence pointwise.
    pub u_min: Channel,
    /// Phase-flip unitary; preserves the POVM coherence pointwise.
    pub u_min_prime: Channel,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar(r: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(r, angle)
}

/// `|phi_k> = (|0> + omega^k |1>)/sqrt(2)` with `omega = exp(i pi/2)`.
pub fn reference_vector(k: usize) -> [Complex64; 2] {
    let s = 1.0 / 2.0_f64.sqrt();
    [c(s, 0.0), polar(s, PI / 2.0 * k as f64)]
}

/// Builds and verifies the reference example.
///
/// Verification failures carry the offending inner product or marginal and
/// its value; they indicate a transcription bug in the fixture itself.
pub fn reference_example() -> Result<ReferenceExample> {
    let effects: Vec<ComplexMatrix> = (0..4)
        .map(|k| {
            let phi = reference_vector(k);
            ComplexMatrix::from_fn(2, 2, |r, s| phi[r] * phi[s].conj() * 0.5)
        })
        .collect();

    let mut sum = ComplexMatrix::zeros(2, 2);
    for e in &effects {
        sum += e;
    }
    let completeness = deviation_from_identity(&sum);
    if completeness > FIXTURE_COMPLETENESS {
        return Err(Error::Fixture {
            what: "effects do not sum to the identity".into(),
            value: completeness,
            bound: FIXTURE_COMPLETENESS,
        });
    }
    let povm = Povm::new(effects)?;

    let vectors = dilation_vectors();
    verify_dilation_vectors(&povm, &vectors)?;

    let s = 1.0 / 2.0_f64.sqrt();
    let u_max = Channel::unitary(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)],
    ))?;
    let u_min = Channel::unitary(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ))?;
    let u_min_prime = Channel::unitary(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
    ))?;

    Ok(ReferenceExample {
        povm,
        naimark_vectors: vectors,
        u_max,
        u_min,
        u_min_prime,
    })
}

/// The four dilation vectors, transcribed componentwise.
fn dilation_vectors() -> Vec<DVector<Complex64>> {
    let r2 = 2.0_f64.sqrt();
    vec![
        DVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.5, 0.0),
            c(0.5 * r2, 0.0),
            c(0.0, 0.0),
        ]),
        DVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.0, 0.5),
            -polar(0.5, PI / 4.0),
            polar(0.5, PI / 4.0),
        ]),
        DVector::from_vec(vec![
            c(0.5, 0.0),
            c(-0.5, 0.0),
            c(0.0, 0.0),
            c(0.0, -0.5 * r2),
        ]),
        DVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.0, -0.5),
            -polar(0.5, -PI / 4.0),
            polar(0.5, 3.0 * PI / 4.0),
        ]),
    ]
}

/// Checks orthonormality of the dilation vectors and their outcome
/// marginals against the POVM on seeded random states.
pub(crate) fn verify_dilation_vectors(povm: &Povm, vectors: &[DVector<Complex64>]) -> Result<()> {
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate().skip(i) {
            let inner = vi.dotc(vj);
            let expected = if i == j { 1.0 } else { 0.0 };
            let dev = (inner - c(expected, 0.0)).norm();
            if dev > FIXTURE_VECTORS {
                return Err(Error::Fixture {
                    what: format!("inner product <v{i}|v{j}> off by {dev:e}"),
                    value: dev,
                    bound: FIXTURE_VECTORS,
                });
            }
        }
    }
    // Marginals: <v_k| (|0><0| kron rho) |v_k> = tr(E_k rho); only the
    // system components 0 and 1 of each vector enter.
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_CHECK_SEED);
    for _ in 0..200 {
        let rho = sampling::random_density_matrix(2, &mut rng);
        for (k, (v, effect)) in vectors.iter().zip(povm.effects()).enumerate() {
            let mut via_vector = 0.0;
            for s in 0..2 {
                for t in 0..2 {
                    via_vector += (v[s].conj() * rho.matrix()[(s, t)] * v[t]).re;
                }
            }
            let direct = trace_product_re(effect, rho.matrix());
            let dev = (via_vector - direct).abs();
            if dev > FIXTURE_VECTORS {
                return Err(Error::Fixture {
                    what: format!("outcome {k} marginal off by {dev:e}"),
                    value: dev,
                    bound: FIXTURE_VECTORS,
                });
            }
        }
    }
    Ok(())
}

/// One evaluated grid point of a coherence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub phi: f64,
    pub p: f64,
    pub coherence: f64,
    pub coherence_after: Option<f64>,
}

/// Coherence values over a parameter grid, sorted by `(theta, phi, p)`.
#[derive(Debug, Clone)]
pub struct SweepTable {
    rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn max_coherence(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.coherence)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_coherence(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.coherence)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `coherence_after - coherence` over the grid, when a channel
    /// column is present.
    pub fn max_increment(&self) -> Option<(f64, SweepRow)> {
        let mut best: Option<(f64, SweepRow)> = None;
        for row in &self.rows {
            let after = row.coherence_after?;
            let inc = after - row.coherence;
            let better = match &best {
                None => true,
                Some((b, _)) => inc > *b,
            };
            if better {
                best = Some((inc, *row));
            }
        }
        best
    }
}

/// Inclusive uniform grid `0, max/(n-1), ..., max`; a single point sits at
/// zero. The azimuth grid deliberately contains both `0` and `2 pi` so the
/// known extremal azimuths `k pi/2` land exactly on nodes.
pub fn linspace_inclusive(max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        // The fraction is computed first so that binary fractions of `max`
        // (quarters, halves, the endpoint itself) land on exact nodes.
        _ => (0..n).map(|k| max * (k as f64 / (n - 1) as f64)).collect(),
    }
}

/// Wraps an azimuth of exactly `2 pi` back to zero for state construction.
fn wrap_phi(phi: f64) -> f64 {
    if phi >= 2.0 * PI {
        phi - 2.0 * PI
    } else {
        phi
    }
}

/// Evaluates the POVM coherence of `|psi_{theta,phi}>` over a
/// `n_theta x n_phi` grid (`theta` in `[0, pi]`, `phi` in `[0, 2 pi]`),
/// and of the channel output when one is given.
pub fn sweep_pure_states(
    povm: &Povm,
    channel: Option<&Channel>,
    n_theta: usize,
    n_phi: usize,
) -> Result<SweepTable> {
    if povm.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: povm.dim(),
        });
    }
    if let Some(ch) = channel {
        if ch.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: ch.dim(),
            });
        }
    }
    let evaluator = PovmCoherence::new(povm)?;
    let thetas = linspace_inclusive(PI, n_theta);
    let phis = linspace_inclusive(2.0 * PI, n_phi);

    let points: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&f| (t, f)))
        .collect();
    let rows: Result<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(theta, phi)| {
            let pt = BlochPoint::pure(theta, wrap_phi(phi))?;
            let rho = bloch_state(&pt);
            let coherence = evaluator.coherence(&rho)?.bits();
            let coherence_after = match channel {
                Some(ch) => Some(evaluator.coherence(&ch.apply(&rho)?)?.bits()),
                None => None,
            };
            Ok(SweepRow {
                theta,
                phi,
                p: 1.0,
                coherence,
                coherence_after,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| {
        a.theta
            .partial_cmp(&b.theta)
            .unwrap()
            .then(a.phi.partial_cmp(&b.phi).unwrap())
    });
    Ok(SweepTable { rows })
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    crate::numerics::entropy_bits(&[p, 1.0 - p])
}

/// Closed-form bounds `(1.5 - H(p)/2, 2 - H(p))` pinching the reference
/// POVM's coherence at fixed mixing weight `p`.
pub fn mixed_state_coherence_bounds(p: f64) -> (f64, f64) {
    let h = binary_entropy(p);
    (1.5 - 0.5 * h, 2.0 - h)
}

/// Grid check of the mixed-state bounds.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// Largest `lower_bound - coherence` over the grid (positive means a
    /// violation).
    pub max_lower_violation: f64,
    /// Largest `coherence - upper_bound` over the grid.
    pub max_upper_violation: f64,
    /// Grid points where the coherence sits within `1e-9` of the upper
    /// bound.
    pub upper_saturated: Vec<BlochPoint>,
    /// Grid points within `1e-9` of the lower bound.
    pub lower_saturated: Vec<BlochPoint>,
}

impl BoundsReport {
    /// True when no grid point violates either bound by more than `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.max_lower_violation <= tol && self.max_upper_violation <= tol
    }
}

/// Sweeps `rho_{p,theta,phi}` over `p_grid` and a `n_theta x n_phi` angle
/// grid, comparing against [`mixed_state_coherence_bounds`]. Violations are
/// reported, never thrown.
pub fn check_mixed_state_bounds(
    povm: &Povm,
    p_grid: &[f64],
    n_theta: usize,
    n_phi: usize,
) -> Result<BoundsReport> {
    if povm.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: povm.dim(),
        });
    }
    let evaluator = PovmCoherence::new(povm)?;
    let thetas = linspace_inclusive(PI, n_theta);
    let phis = linspace_inclusive(2.0 * PI, n_phi);

    let mut report = BoundsReport {
        max_lower_violation: f64::NEG_INFINITY,
        max_upper_violation: f64::NEG_INFINITY,
        upper_saturated: Vec::new(),
        lower_saturated: Vec::new(),
    };
    for &p in p_grid {
        let (lower, upper) = mixed_state_coherence_bounds(p);
        let evaluated: Result<Vec<(BlochPoint, f64)>> = thetas
            .par_iter()
            .flat_map(|&theta| phis.par_iter().map(move |&phi| (theta, phi)))
            .map(|(theta, phi)| {
                let pt = BlochPoint::new(p, theta, wrap_phi(phi))?;
                let value = evaluator.coherence(&bloch_state(&pt))?.bits();
                Ok((pt, value))
            })
            .collect();
        for (pt, value) in evaluated? {
            report.max_lower_violation = report.max_lower_violation.max(lower - value);
            report.max_upper_violation = report.max_upper_violation.max(value - upper);
            if (value - upper).abs() <= tol::TIE_BREAK {
                report.upper_saturated.push(pt);
            }
            if (value - lower).abs() <= tol::TIE_BREAK {
                report.lower_saturated.push(pt);
            }
        }
    }
    Ok(report)
}
