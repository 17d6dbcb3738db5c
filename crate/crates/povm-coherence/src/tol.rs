//! Centralized numerical tolerances.
//!
//! Every threshold used for input validation or floating-point cleanup lives
//! here, so the whole crate agrees on what "equal", "zero" and "positive"
//! mean.

/// Tolerance for algebraic identities on inputs: hermiticity, unit trace,
/// POVM completeness, projector algebra, unitarity, weight normalization.
pub const VALIDATION: f64 = 1e-9;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as exact zeros; anything
/// below `-PSD_CLAMP` fails positive-semidefiniteness.
pub const PSD_CLAMP: f64 = 1e-10;

/// Probabilities and eigenvalues at or below this threshold contribute
/// `0 * log 0 = 0` to entropies and are skipped as measurement outcomes.
pub const PROB_FLOOR: f64 = 1e-12;

/// Pivot rejection threshold for Gram-Schmidt completion of an isometry to a
/// unitary.
pub const GS_PIVOT: f64 = 1e-10;

/// Eigenvalue threshold deciding which eigenvectors span the range of an
/// effect (one order below `VALIDATION`, robust to accumulated error).
pub const RANGE_RANK: f64 = 1e-9;

/// Computed coherence in `[-COHERENCE_CLAMP, 0)` clamps to zero; more
/// negative values indicate an internal inconsistency.
pub const COHERENCE_CLAMP: f64 = 1e-9;

/// Eigenvalues closer than this are treated as degenerate when fixing a
/// deterministic eigenvector order.
pub const DEGENERACY: f64 = 1e-12;

/// Optimizer candidates within this window of the best value tie-break to
/// the lexicographically smallest parameter point.
pub const TIE_BREAK: f64 = 1e-9;
