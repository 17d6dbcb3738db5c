//! The power of one channel over another, the channel coherence measure
//! derived from it, and budget-relative certification of coherence
//! non-increasing channels.
//!
//! The power of `Theta` over `Lambda` is the largest coherence surplus
//! `C(Theta[rho]) - C(Lambda[rho])` over all states; it can be negative.
//! A channel whose power over the identity is non-positive never increases
//! coherence, so clipping that power at zero quantifies how much coherence
//! the channel can create. Certification is budget-relative: the global
//! maximization is non-concave, so a verdict means "no violation above the
//! budget was found", never a proof.
//!
//! For qubits the state space is searched through the `(p, theta, phi)`
//! mixture parameterization: a full grid provides an oracle lower bound and
//! every grid point enters the candidate pool, so the returned value
//! dominates the oracle by construction. Simplex refinements started from
//! the best cells and from seeded random points polish the result. Above
//! dimension two the search runs over `rho = G G^dag / tr(G G^dag)` with
//! `G` a complex parameter matrix, with seeded random states as the oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coherence::{CoherenceValue, PovmCoherence};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::quantum::{bloch_state, BlochPoint, Channel, DensityMatrix, Povm};
use crate::scenarios::linspace_inclusive;
use crate::tol;

/// Default optimizer seed.
pub const DEFAULT_SEED: u64 = 0x706f_766d;

/// Random-state oracle size for dimensions above two.
const DENSE_ORACLE_SAMPLES: usize = 100_000;

/// Budget knobs for the global maximization over states.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Simplex refinements; half start from the best grid cells, half from
    /// seeded random points.
    pub restarts: usize,
    /// Iteration cap per refinement.
    pub local_max_iterations: usize,
    /// Termination threshold on the objective spread of a simplex.
    pub local_tolerance: f64,
    /// Qubit grid counts per parameter `(p, theta, phi)`.
    pub grid_resolution: [usize; 3],
    pub seed: u64,
    /// Slack granted to budget-relative statements (certification,
    /// dominance of the oracle).
    pub budget_tolerance: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            local_max_iterations: 500,
            local_tolerance: 1e-8,
            grid_resolution: [61, 61, 61],
            seed: DEFAULT_SEED,
            budget_tolerance: 1e-4,
        }
    }
}

impl OptimizerConfig {
    /// Reduced budget for batch screening (property suites, large channel
    /// families). Conclusions drawn from it stay budget-relative.
    pub fn quick() -> Self {
        Self {
            restarts: 16,
            local_max_iterations: 200,
            grid_resolution: [21, 21, 21],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.local_max_iterations == 0 {
            return Err(Error::BadConfig {
                reason: "restarts and local_max_iterations must be at least 1".into(),
            });
        }
        if self.grid_resolution.contains(&0) {
            return Err(Error::BadConfig {
                reason: "grid resolution counts must be at least 1".into(),
            });
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.local_tolerance) || !positive(self.budget_tolerance) {
            return Err(Error::BadConfig {
                reason: "tolerances must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Search bookkeeping attached to every result.
#[derive(Debug, Clone)]
pub struct OptimizerDiagnostics {
    pub restarts_used: usize,
    pub converged_restarts: usize,
    pub objective_evaluations: u64,
    /// Bloch parameters of the witness, present for qubit searches.
    pub witness_bloch: Option<BlochPoint>,
}

/// Outcome of a global maximization over states.
#[derive(Debug, Clone)]
pub struct MaximizeOutcome {
    pub value: f64,
    pub witness: DensityMatrix,
    pub oracle_value: f64,
    pub diagnostics: OptimizerDiagnostics,
}

/// Value of the power functional with its witness state.
#[derive(Debug, Clone)]
pub struct PowerResult {
    /// `max_rho { C(Theta[rho]) - C(Lambda[rho]) }`; may be negative.
    pub value: f64,
    pub witness: DensityMatrix,
    /// Best value seen by the grid / random-sample oracle alone.
    pub oracle_value: f64,
    pub diagnostics: OptimizerDiagnostics,
}

/// Budget-relative certification verdict for a channel.
#[derive(Debug, Clone)]
pub struct CmioVerdict {
    /// True when no coherence increase above the budget tolerance was found.
    pub certified_within_budget: bool,
    /// Largest increase found, clipped at zero.
    pub max_violation_found: f64,
    /// State achieving the violation, present when certification failed.
    pub witness: Option<DensityMatrix>,
}

impl CmioVerdict {
    /// Derives the verdict from an already computed power over the identity.
    pub fn from_power(power: &PowerResult, budget_tolerance: f64) -> Self {
        let certified = power.value <= budget_tolerance;
        Self {
            certified_within_budget: certified,
            max_violation_found: power.value.max(0.0),
            witness: if certified {
                None
            } else {
                Some(power.witness.clone())
            },
        }
    }
}

/// Globally maximizes a function of the state over all density matrices of
/// the given dimension. Returns the best value found with its witness; the
/// value dominates the oracle by construction because every oracle point
/// enters the candidate pool.
pub fn maximize_over_states<F>(
    objective: F,
    dim: usize,
    cfg: &OptimizerConfig,
) -> Result<MaximizeOutcome>
where
    F: Fn(&DensityMatrix) -> Result<f64> + Sync,
{
    cfg.validate()?;
    if dim < 2 {
        return Err(Error::BadConfig {
            reason: "state dimension must be at least 2".into(),
        });
    }
    if dim == 2 {
        maximize_qubit(&objective, cfg)
    } else {
        maximize_dense(&objective, dim, cfg)
    }
}

fn check_finite(value: f64, state: &DensityMatrix) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NonFiniteObjective {
            state: Box::new(state.matrix().clone()),
        });
    }
    Ok(value)
}

fn derive_seed(seed: u64, stream: u64) -> u64 {
    // SplitMix64 step, decorrelates per-stream generators.
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn wrap_phi(phi: f64) -> f64 {
    if phi >= 2.0 * PI {
        phi - 2.0 * PI
    } else {
        phi
    }
}

fn bloch_from_params(x: &[f64]) -> BlochPoint {
    let p = x[0].clamp(0.0, 1.0);
    let theta = x[1].clamp(0.0, PI);
    let phi = wrap_phi(x[2].clamp(0.0, 2.0 * PI));
    BlochPoint::new(p, theta, phi).expect("clamped parameters are in range")
}

fn lex_less(a: &[f64; 3], b: &[f64; 3]) -> bool {
    for k in 0..3 {
        if a[k] < b[k] {
            return true;
        }
        if a[k] > b[k] {
            return false;
        }
    }
    false
}

fn maximize_qubit<F>(objective: &F, cfg: &OptimizerConfig) -> Result<MaximizeOutcome>
where
    F: Fn(&DensityMatrix) -> Result<f64> + Sync,
{
    let ps = linspace_inclusive(1.0, cfg.grid_resolution[0]);
    let thetas = linspace_inclusive(PI, cfg.grid_resolution[1]);
    let phis = linspace_inclusive(2.0 * PI, cfg.grid_resolution[2]);

    // Grid points in lexicographic (p, theta, phi) order, so the earliest
    // index among equal values is also the lexicographically smallest point.
    let mut points = Vec::with_capacity(ps.len() * thetas.len() * phis.len());
    for &p in &ps {
        for &theta in &thetas {
            for &phi in &phis {
                points.push([p, theta, wrap_phi(phi)]);
            }
        }
    }
    let values: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let state = bloch_state(&bloch_from_params(x));
            check_finite(objective(&state)?, &state)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut oracle_value = f64::NEG_INFINITY;
    let mut oracle_index = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > oracle_value {
            oracle_value = v;
            oracle_index = i;
        }
    }

    // Refinement starts: best grid cells first, then seeded random points.
    let n_from_grid = cfg.restarts.div_ceil(2);
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finite objective values")
            .then(a.cmp(&b))
    });
    let mut starts: Vec<[f64; 3]> = order
        .iter()
        .take(n_from_grid.min(order.len()))
        .map(|&i| points[i])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
    while starts.len() < cfg.restarts {
        starts.push([
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=PI),
            rng.random_range(0.0..2.0 * PI),
        ]);
    }

    let lo = [0.0, 0.0, 0.0];
    let hi = [1.0, PI, 2.0 * PI];
    let cell = [
        1.0 / (ps.len().max(2) - 1) as f64,
        PI / (thetas.len().max(2) - 1) as f64,
        2.0 * PI / (phis.len().max(2) - 1) as f64,
    ];
    let step: Vec<f64> = cell.iter().map(|&c| c.max(0.01)).collect();

    let refinements: Vec<(Vec<f64>, f64, bool, u64)> = starts
        .par_iter()
        .map(|start| {
            let eval = |x: &[f64]| -> Result<f64> {
                let state = bloch_state(&bloch_from_params(x));
                Ok(-check_finite(objective(&state)?, &state)?)
            };
            nelder_mead_min(
                &eval,
                start,
                &lo,
                &hi,
                &step,
                cfg.local_max_iterations,
                cfg.local_tolerance,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    // Candidate selection: best value overall, then the lexicographically
    // smallest parameter point among candidates within the tie window.
    let mut best_value = oracle_value;
    for (_, neg, _, _) in &refinements {
        best_value = best_value.max(-neg);
    }
    let window = best_value - tol::TIE_BREAK;
    let mut best_params: Option<[f64; 3]> = None;
    for (i, &v) in values.iter().enumerate() {
        if v >= window {
            best_params = Some(points[i]);
            break; // grid order is lexicographic
        }
    }
    for (x, neg, _, _) in &refinements {
        if -neg >= window {
            let params = [x[0], x[1], wrap_phi(x[2])];
            match &best_params {
                Some(current) if !lex_less(&params, current) => {}
                _ => best_params = Some(params),
            }
        }
    }
    let witness_params = best_params.expect("candidate pool is non-empty");
    let witness_point = bloch_from_params(&witness_params);

    let mut evaluations = values.len() as u64;
    let mut converged = 0;
    for (_, _, conv, evals) in &refinements {
        evaluations += evals;
        if *conv {
            converged += 1;
        }
    }

    debug_assert!(best_value >= values[oracle_index] - 1e-12);
    Ok(MaximizeOutcome {
        value: best_value,
        witness: bloch_state(&witness_point),
        oracle_value,
        diagnostics: OptimizerDiagnostics {
            restarts_used: starts.len(),
            converged_restarts: converged,
            objective_evaluations: evaluations,
            witness_bloch: Some(witness_point),
        },
    })
}

/// State from an unconstrained complex parameter matrix.
fn state_from_params(x: &[f64], dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |r, c| {
        let k = 2 * (r * dim + c);
        Complex64::new(x[k], x[k + 1])
    });
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    if trace < tol::PROB_FLOOR {
        return DensityMatrix::maximally_mixed(dim);
    }
    DensityMatrix::from_valid(m.scale(1.0 / trace))
}

fn params_from_state(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let root = crate::numerics::psd_sqrt(rho.matrix())?;
    let dim = rho.dim();
    let mut x = vec![0.0; 2 * dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let z = root[(r, c)];
            x[2 * (r * dim + c)] = z.re;
            x[2 * (r * dim + c) + 1] = z.im;
        }
    }
    Ok(x)
}

fn maximize_dense<F>(objective: &F, dim: usize, cfg: &OptimizerConfig) -> Result<MaximizeOutcome>
where
    F: Fn(&DensityMatrix) -> Result<f64> + Sync,
{
    // Oracle: seeded random states, reproducible per index.
    let sampled: Vec<f64> = (0..DENSE_ORACLE_SAMPLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2 + i as u64));
            let state = crate::sampling::random_density_matrix(dim, &mut rng);
            check_finite(objective(&state)?, &state)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut oracle_value = f64::NEG_INFINITY;
    let mut oracle_index = 0;
    for (i, &v) in sampled.iter().enumerate() {
        if v > oracle_value {
            oracle_value = v;
            oracle_index = i;
        }
    }
    let state_at = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2 + i as u64));
        crate::sampling::random_density_matrix(dim, &mut rng)
    };

    let n_params = 2 * dim * dim;
    let n_from_oracle = cfg.restarts.div_ceil(2);
    let mut order: Vec<usize> = (0..sampled.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        sampled[b]
            .partial_cmp(&sampled[a])
            .expect("finite objective values")
            .then(a.cmp(&b))
    });
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(cfg.restarts);
    for &i in order.iter().take(n_from_oracle) {
        starts.push(params_from_state(&state_at(i))?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 1));
    while starts.len() < cfg.restarts {
        starts.push((0..n_params).map(|_| rng.random_range(-1.0..1.0)).collect());
    }

    let lo = vec![-4.0; n_params];
    let hi = vec![4.0; n_params];
    let step = vec![0.1; n_params];
    let refinements: Vec<(Vec<f64>, f64, bool, u64)> = starts
        .par_iter()
        .map(|start| {
            let eval = |x: &[f64]| -> Result<f64> {
                let state = state_from_params(x, dim);
                Ok(-check_finite(objective(&state)?, &state)?)
            };
            nelder_mead_min(
                &eval,
                start,
                &lo,
                &hi,
                &step,
                cfg.local_max_iterations,
                cfg.local_tolerance,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    // Tie-break by candidate order: oracle samples first, refinements after.
    let mut best_value = oracle_value;
    let mut witness = state_at(oracle_index);
    for (x, neg, _, _) in &refinements {
        if -neg > best_value + tol::TIE_BREAK {
            best_value = -neg;
            witness = state_from_params(x, dim);
        } else {
            best_value = best_value.max(-neg);
        }
    }

    let mut evaluations = sampled.len() as u64;
    let mut converged = 0;
    for (_, _, conv, evals) in &refinements {
        evaluations += evals;
        if *conv {
            converged += 1;
        }
    }
    Ok(MaximizeOutcome {
        value: best_value,
        witness,
        oracle_value,
        diagnostics: OptimizerDiagnostics {
            restarts_used: starts.len(),
            converged_restarts: converged,
            objective_evaluations: evaluations,
            witness_bloch: None,
        },
    })
}

/// Downhill simplex minimization with box clamping.
///
/// Returns the best vertex, its value, a convergence flag (objective spread
/// below `tolerance` before the iteration cap) and the evaluation count.
fn nelder_mead_min<F>(
    f: &F,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    step: &[f64],
    max_iterations: usize,
    tolerance: f64,
) -> Result<(Vec<f64>, f64, bool, u64)>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for k in 0..n {
            x[k] = x[k].clamp(lo[k], hi[k]);
        }
    };
    let mut evals: u64 = 0;
    let mut eval = |x: &mut Vec<f64>| -> Result<f64> {
        clamp(x);
        evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    let v0 = eval(&mut x0)?;
    simplex.push((x0, v0));
    for k in 0..n {
        let mut x = start.to_vec();
        // Step inward when the outward step would leave the box.
        if x[k] + step[k] <= hi[k] {
            x[k] += step[k];
        } else {
            x[k] -= step[k];
        }
        let v = eval(&mut x)?;
        simplex.push((x, v));
    }

    let mut converged = false;
    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective values"));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= tolerance {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in simplex.iter().take(n) {
            for k in 0..n {
                centroid[k] += x[k] / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let mut reflected: Vec<f64> = (0..n)
            .map(|k| centroid[k] + ALPHA * (centroid[k] - worst.0[k]))
            .collect();
        let fr = eval(&mut reflected)?;

        if fr < simplex[0].1 {
            let mut expanded: Vec<f64> = (0..n)
                .map(|k| centroid[k] + GAMMA * (centroid[k] - worst.0[k]))
                .collect();
            let fe = eval(&mut expanded)?;
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (mut contracted, toward): (Vec<f64>, f64) = if fr < worst.1 {
                (
                    (0..n)
                        .map(|k| centroid[k] + RHO * (reflected[k] - centroid[k]))
                        .collect(),
                    fr,
                )
            } else {
                (
                    (0..n)
                        .map(|k| centroid[k] + RHO * (worst.0[k] - centroid[k]))
                        .collect(),
                    worst.1,
                )
            };
            let fc = eval(&mut contracted)?;
            if fc < toward {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..n)
                        .map(|k| best[k] + SIGMA * (vertex.0[k] - best[k]))
                        .collect();
                    let v = eval(&mut x)?;
                    *vertex = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective values"));
    let (x, v) = simplex.swap_remove(0);
    Ok((x, v, converged, evals))
}

/// Power of `theta` over `lambda` for the measure attached to `povm`:
/// the maximum of `C(theta[rho]) - C(lambda[rho])` over all states.
pub fn power(
    theta: &Channel,
    lambda: &Channel,
    povm: &Povm,
    cfg: &OptimizerConfig,
) -> Result<PowerResult> {
    if theta.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: theta.dim(),
        });
    }
    if lambda.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            got: lambda.dim(),
        });
    }
    let evaluator = PovmCoherence::new(povm)?;
    let objective = |rho: &DensityMatrix| -> Result<f64> {
        let gained = evaluator.coherence(&theta.apply(rho)?)?.bits();
        let kept = evaluator.coherence(&lambda.apply(rho)?)?.bits();
        Ok(gained - kept)
    };
    let outcome = maximize_over_states(objective, povm.dim(), cfg)?;
    if outcome.value < outcome.oracle_value - cfg.budget_tolerance {
        return Err(Error::Internal {
            what: "optimizer value fell below its own oracle",
            value: outcome.value - outcome.oracle_value,
        });
    }
    Ok(PowerResult {
        value: outcome.value,
        witness: outcome.witness,
        oracle_value: outcome.oracle_value,
        diagnostics: outcome.diagnostics,
    })
}

/// Channel coherence measure: the power over the identity clipped at zero.
pub fn dynamical_coherence(
    theta: &Channel,
    povm: &Povm,
    cfg: &OptimizerConfig,
) -> Result<CoherenceValue> {
    let result = power(theta, &Channel::identity(povm.dim()), povm, cfg)?;
    dynamical_coherence_from_power(&result)
}

/// The measure derived from an already computed power over the identity.
pub fn dynamical_coherence_from_power(result: &PowerResult) -> Result<CoherenceValue> {
    CoherenceValue::new(result.value.max(0.0))
}

/// Budget-relative check that a channel never increases the coherence.
pub fn certify_cmio(lambda: &Channel, povm: &Povm, cfg: &OptimizerConfig) -> Result<CmioVerdict> {
    let result = power(lambda, &Channel::identity(povm.dim()), povm, cfg)?;
    Ok(CmioVerdict::from_power(&result, cfg.budget_tolerance))
}
