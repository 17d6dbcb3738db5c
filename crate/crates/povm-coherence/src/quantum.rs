//! States, POVMs, projective measurements, channels and the qubit Bloch
//! parameterization, all with validated constructors.
//!
//! Values are immutable after construction, so every invariant checked at
//! construction time holds for the lifetime of the value.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    self, deviation_from_identity, eigenvalues_unchecked, hermiticity_deviation, max_abs_entry,
    trace_product_re, ComplexMatrix,
};
use crate::tol;

fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn ensure_square_of_dim(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    ensure_dim(dim, m.nrows())
}

fn ensure_unitary(u: &ComplexMatrix) -> Result<()> {
    let dev = deviation_from_identity(&(u.adjoint() * u));
    if dev > tol::VALIDATION {
        return Err(Error::NotUnitary {
            deviation: dev,
            bound: tol::VALIDATION,
        });
    }
    Ok(())
}

fn hermitian_half(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Trace-one positive-semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity and unit trace to [`tol::VALIDATION`] and
    /// positivity to [`tol::PSD_CLAMP`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        let herm = hermiticity_deviation(&matrix);
        if herm > tol::VALIDATION {
            return Err(Error::NotHermitian {
                deviation: herm,
                bound: tol::VALIDATION,
            });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::VALIDATION || trace.im.abs() > tol::VALIDATION {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                bound: tol::VALIDATION,
            });
        }
        let eigenvalues = eigenvalues_unchecked(&hermitian_half(&matrix), dim);
        if let Some(&min) = eigenvalues.first() {
            if min < -tol::PSD_CLAMP {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                    clamp: tol::PSD_CLAMP,
                });
            }
        }
        Ok(Self { dim, matrix })
    }

    /// Constructor for matrices that are valid by algebraic construction;
    /// symmetrizes away rounding noise and skips the spectrum check.
    pub(crate) fn from_valid(matrix: ComplexMatrix) -> Self {
        let dim = matrix.nrows();
        let matrix = hermitian_half(&matrix);
        debug_assert!((matrix.trace().re - 1.0).abs() < 1e-6);
        Self { dim, matrix }
    }

    /// `|k><k|` on a `dim`-dimensional space.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: k,
            });
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Ok(Self { dim, matrix: m })
    }

    /// `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    /// Projector onto a state vector; the vector is normalized first.
    pub fn pure(vector: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr < tol::PROB_FLOOR {
            return Err(Error::Invalid(
                "pure state vector is numerically zero".into(),
            ));
        }
        let v = nalgebra::DVector::from_iterator(
            vector.len(),
            vector.iter().map(|z| z / norm_sqr.sqrt()),
        );
        let matrix = &v * v.adjoint();
        Ok(Self {
            dim: vector.len(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_unchecked(&self.matrix, self.dim)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        numerics::entropy_bits(&self.eigenvalues())
    }

    /// Re-checks all invariants; used by property tests on derived states.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

/// Finite family of effects `{E_i}`: Hermitian, positive semidefinite,
/// summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::Invalid("POVM needs at least one effect".into()));
        }
        let dim = effects[0].nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for effect in &effects {
            ensure_square_of_dim(effect, dim)?;
            let herm = hermiticity_deviation(effect);
            if herm > tol::VALIDATION {
                return Err(Error::NotHermitian {
                    deviation: herm,
                    bound: tol::VALIDATION,
                });
            }
            let eigenvalues = eigenvalues_unchecked(&hermitian_half(effect), dim);
            if let Some(&min) = eigenvalues.first() {
                if min < -tol::VALIDATION {
                    return Err(Error::NotPsd {
                        min_eigenvalue: min,
                        clamp: tol::VALIDATION,
                    });
                }
            }
            sum += effect;
        }
        let dev = deviation_from_identity(&sum);
        if dev > tol::VALIDATION {
            return Err(Error::IncompletePovm {
                deviation: dev,
                bound: tol::VALIDATION,
            });
        }
        Ok(Self { dim, effects })
    }

    /// Rank-one projective POVM `{|i><i|}` onto the standard basis.
    pub fn computational_basis(dim: usize) -> Self {
        let effects = (0..dim)
            .map(|k| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                m[(k, k)] = Complex64::new(1.0, 0.0);
                m
            })
            .collect();
        Self { dim, effects }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Canonical measurement operators `A_i = sqrt(E_i)`, the Hermitian
    /// positive roots of the effects.
    pub fn sqrt_effects(&self) -> Result<Vec<ComplexMatrix>> {
        self.effects
            .iter()
            .map(|e| numerics::psd_sqrt_clamped(e, tol::VALIDATION))
            .collect()
    }

    /// Outcome distribution `p_i = Re tr(E_i rho)`, clamped at zero and
    /// renormalized; a total weight off by more than [`tol::VALIDATION`]
    /// signals an invalid POVM.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        ensure_dim(self.dim, rho.dim())?;
        let mut p: Vec<f64> = self
            .effects
            .iter()
            .map(|e| trace_product_re(e, rho.matrix()).max(0.0))
            .collect();
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tol::VALIDATION {
            return Err(Error::NotNormalized {
                sum,
                bound: tol::VALIDATION,
            });
        }
        for v in &mut p {
            *v /= sum;
        }
        Ok(p)
    }
}

/// Projective measurement `{P_i}`: Hermitian idempotents, mutually
/// orthogonal, summing to the identity. Projector ranks may exceed one.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    dim: usize,
    projectors: Vec<ComplexMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::Invalid(
                "projective measurement needs at least one projector".into(),
            ));
        }
        let dim = projectors[0].nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for (index, p) in projectors.iter().enumerate() {
            ensure_square_of_dim(p, dim)?;
            let herm = hermiticity_deviation(p);
            if herm > tol::VALIDATION {
                return Err(Error::NotProjective {
                    index,
                    check: "hermiticity",
                    deviation: herm,
                    bound: tol::VALIDATION,
                });
            }
            let idem = max_abs_entry(&(p * p - p));
            if idem > tol::VALIDATION {
                return Err(Error::NotProjective {
                    index,
                    check: "idempotence",
                    deviation: idem,
                    bound: tol::VALIDATION,
                });
            }
            sum += p;
        }
        for i in 0..projectors.len() {
            for j in (i + 1)..projectors.len() {
                let cross = max_abs_entry(&(&projectors[i] * &projectors[j]));
                if cross > tol::VALIDATION {
                    return Err(Error::NotProjective {
                        index: i,
                        check: "orthogonality",
                        deviation: cross,
                        bound: tol::VALIDATION,
                    });
                }
            }
        }
        let dev = deviation_from_identity(&sum);
        if dev > tol::VALIDATION {
            return Err(Error::IncompletePovm {
                deviation: dev,
                bound: tol::VALIDATION,
            });
        }
        Ok(Self { dim, projectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Block dephasing `sigma -> sum_i P_i sigma P_i`.
    pub fn block_dephase(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for p in &self.projectors {
            out += p * sigma * p;
        }
        out
    }

    /// Reinterprets the projectors as POVM effects.
    pub fn as_povm(&self) -> Povm {
        Povm {
            dim: self.dim,
            effects: self.projectors.clone(),
        }
    }
}

/// Representation of a CPTP map.
#[derive(Debug, Clone)]
pub enum ChannelForm {
    Unitary(ComplexMatrix),
    Kraus(Vec<ComplexMatrix>),
    MixedUnitary(Vec<(f64, ComplexMatrix)>),
}

/// CPTP map in unitary, Kraus, or mixed-unitary form. The declared form is
/// kept as-is so unitary channels retain exact unitary structure.
#[derive(Debug, Clone)]
pub struct Channel {
    dim: usize,
    form: ChannelForm,
}

impl Channel {
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::NotSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        ensure_unitary(&u)?;
        Ok(Self {
            dim: u.nrows(),
            form: ChannelForm::Unitary(u),
        })
    }

    pub fn kraus(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::Invalid(
                "Kraus channel needs at least one operator".into(),
            ));
        }
        let dim = operators[0].nrows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &operators {
            ensure_square_of_dim(k, dim)?;
            sum += k.adjoint() * k;
        }
        let dev = deviation_from_identity(&sum);
        if dev > tol::VALIDATION {
            return Err(Error::NotTracePreserving { deviation: dev });
        }
        Ok(Self {
            dim,
            form: ChannelForm::Kraus(operators),
        })
    }

    /// Convex combination of unitary conjugations; weights are renormalized
    /// to sum to exactly one.
    pub fn mixed_unitary(pairs: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Invalid(
                "mixed-unitary channel needs at least one term".into(),
            ));
        }
        let dim = pairs[0].1.nrows();
        let mut sum = 0.0;
        for (w, u) in &pairs {
            if *w < -tol::PROB_FLOOR {
                return Err(Error::NegativeProbability {
                    index: 0,
                    value: *w,
                });
            }
            ensure_square_of_dim(u, dim)?;
            ensure_unitary(u)?;
            sum += w.max(0.0);
        }
        if (sum - 1.0).abs() > tol::VALIDATION {
            return Err(Error::NotNormalized {
                sum,
                bound: tol::VALIDATION,
            });
        }
        let pairs = pairs
            .into_iter()
            .map(|(w, u)| (w.max(0.0) / sum, u))
            .collect();
        Ok(Self {
            dim,
            form: ChannelForm::MixedUnitary(pairs),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            form: ChannelForm::Unitary(ComplexMatrix::identity(dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &ChannelForm {
        &self.form
    }

    /// Applies the map: `U rho U^dag`, `sum_j K_j rho K_j^dag`, or
    /// `sum_j w_j U_j rho U_j^dag` depending on the stored form.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        ensure_dim(self.dim, rho.dim())?;
        let m = rho.matrix();
        let out = match &self.form {
            ChannelForm::Unitary(u) => u * m * u.adjoint(),
            ChannelForm::Kraus(ops) => {
                let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                for k in ops {
                    acc += k * m * k.adjoint();
                }
                acc
            }
            ChannelForm::MixedUnitary(pairs) => {
                let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                for (w, u) in pairs {
                    acc += (u * m * u.adjoint()).scale(*w);
                }
                acc
            }
        };
        Ok(DensityMatrix::from_valid(out))
    }

    /// The map as a list of Kraus operators, whatever the stored form.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        match &self.form {
            ChannelForm::Unitary(u) => vec![u.clone()],
            ChannelForm::Kraus(ops) => ops.clone(),
            ChannelForm::MixedUnitary(pairs) => {
                pairs.iter().map(|(w, u)| u.scale(w.sqrt())).collect()
            }
        }
    }

    /// Convex combination `weight * self + (1 - weight) * other`. Stays in
    /// mixed-unitary form when both operands are built from unitaries.
    pub fn mix(weight: f64, a: &Channel, b: &Channel) -> Result<Channel> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfRange {
                field: "weight",
                value: weight,
                lo: 0.0,
                hi: 1.0,
                inclusive_hi: true,
            });
        }
        ensure_dim(a.dim, b.dim)?;
        let unitary_pairs = |c: &Channel| -> Option<Vec<(f64, ComplexMatrix)>> {
            match &c.form {
                ChannelForm::Unitary(u) => Some(vec![(1.0, u.clone())]),
                ChannelForm::MixedUnitary(pairs) => Some(pairs.clone()),
                ChannelForm::Kraus(_) => None,
            }
        };
        match (unitary_pairs(a), unitary_pairs(b)) {
            (Some(pa), Some(pb)) => {
                let mut pairs = Vec::with_capacity(pa.len() + pb.len());
                for (w, u) in pa {
                    pairs.push((weight * w, u));
                }
                for (w, u) in pb {
                    pairs.push(((1.0 - weight) * w, u));
                }
                Ok(Channel {
                    dim: a.dim,
                    form: ChannelForm::MixedUnitary(pairs),
                })
            }
            _ => {
                let mut ops = Vec::new();
                for k in a.kraus_operators() {
                    ops.push(k.scale(weight.sqrt()));
                }
                for k in b.kraus_operators() {
                    ops.push(k.scale((1.0 - weight).sqrt()));
                }
                Ok(Channel {
                    dim: a.dim,
                    form: ChannelForm::Kraus(ops),
                })
            }
        }
    }

    /// Sequential composition: applies `self` first, then `next`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        ensure_dim(self.dim, next.dim)?;
        let form = match (&self.form, &next.form) {
            (ChannelForm::Unitary(a), ChannelForm::Unitary(b)) => ChannelForm::Unitary(b * a),
            (
                ChannelForm::Unitary(_) | ChannelForm::MixedUnitary(_),
                ChannelForm::Unitary(_) | ChannelForm::MixedUnitary(_),
            ) => {
                let pairs_of = |c: &Channel| match &c.form {
                    ChannelForm::Unitary(u) => vec![(1.0, u.clone())],
                    ChannelForm::MixedUnitary(pairs) => pairs.clone(),
                    ChannelForm::Kraus(_) => unreachable!(),
                };
                let first = pairs_of(self);
                let second = pairs_of(next);
                let mut pairs = Vec::with_capacity(first.len() * second.len());
                for (wb, ub) in &second {
                    for (wa, ua) in &first {
                        pairs.push((wa * wb, ub * ua));
                    }
                }
                ChannelForm::MixedUnitary(pairs)
            }
            _ => {
                let first = self.kraus_operators();
                let second = next.kraus_operators();
                let mut ops = Vec::with_capacity(first.len() * second.len());
                for b in &second {
                    for a in &first {
                        ops.push(b * a);
                    }
                }
                ChannelForm::Kraus(ops)
            }
        };
        Ok(Channel {
            dim: self.dim,
            form,
        })
    }
}

/// Qubit mixture parameters: `rho = p |psi><psi| + (1-p) |psi'><psi'|` with
/// `|psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>` and its fixed
/// orthogonal complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    p: f64,
    theta: f64,
    phi: f64,
}

impl BlochPoint {
    pub fn new(p: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                field: "p",
                value: p,
                lo: 0.0,
                hi: 1.0,
                inclusive_hi: true,
            });
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                field: "theta",
                value: theta,
                lo: 0.0,
                hi: PI,
                inclusive_hi: true,
            });
        }
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::OutOfRange {
                field: "phi",
                value: phi,
                lo: 0.0,
                hi: 2.0 * PI,
                inclusive_hi: false,
            });
        }
        Ok(Self { p, theta, phi })
    }

    /// Pure state on the Bloch sphere surface (`p = 1`).
    pub fn pure(theta: f64, phi: f64) -> Result<Self> {
        Self::new(1.0, theta, phi)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The state vector `|psi_{theta,phi}>`.
    pub fn psi(&self) -> [Complex64; 2] {
        let half = 0.5 * self.theta;
        [
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), self.phi),
        ]
    }

    /// The fixed orthogonal complement
    /// `|psi'> = sin(theta/2)|0> - e^{i phi} cos(theta/2)|1>`.
    pub fn psi_perp(&self) -> [Complex64; 2] {
        let half = 0.5 * self.theta;
        [
            Complex64::new(half.sin(), 0.0),
            -Complex64::from_polar(half.cos(), self.phi),
        ]
    }
}

/// Builds `rho_{p,theta,phi}` from its Bloch parameters.
pub fn bloch_state(pt: &BlochPoint) -> DensityMatrix {
    let psi = pt.psi();
    let perp = pt.psi_perp();
    let mut m = ComplexMatrix::zeros(2, 2);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = psi[r] * psi[c].conj() * pt.p() + perp[r] * perp[c].conj() * (1.0 - pt.p());
        }
    }
    DensityMatrix::from_valid(m)
}

/// Post-measurement state `A rho A^dag / p`.
///
/// The trace of `A rho A^dag` must agree with `p`; the result is
/// renormalized to exactly unit trace to absorb rounding when `p` is tiny.
pub fn post_measurement_state(
    a: &ComplexMatrix,
    rho: &DensityMatrix,
    p: f64,
) -> Result<DensityMatrix> {
    if p <= tol::PROB_FLOOR {
        return Err(Error::OutcomeUnreachable { probability: p });
    }
    ensure_dim(rho.dim(), a.ncols())?;
    let raw = a * rho.matrix() * a.adjoint();
    let out = raw.scale(1.0 / p);
    let trace = out.trace().re;
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::Internal {
            what: "post-measurement trace inconsistent with outcome probability",
            value: trace,
        });
    }
    Ok(DensityMatrix::from_valid(out.scale(1.0 / trace)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Four-outcome qubit POVM with effects (1/2)|phi_k><phi_k|,
    /// |phi_k> = (|0> + i^k |1>)/sqrt(2).
    fn four_outcome_povm() -> Povm {
        let effects = (0..4)
            .map(|k| {
                let omega = Complex64::from_polar(1.0, PI / 2.0 * k as f64);
                let phi = [
                    c(1.0, 0.0).unscale(2.0_f64.sqrt()),
                    omega.unscale(2.0_f64.sqrt()),
                ];
                ComplexMatrix::from_fn(2, 2, |r, s| phi[r] * phi[s].conj() * 0.5)
            })
            .collect();
        Povm::new(effects).unwrap()
    }

    fn hadamard() -> ComplexMatrix {
        let s = 1.0 / 2.0_f64.sqrt();
        ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    #[test]
    fn bloch_state_poles_and_equator() {
        let zero = bloch_state(&BlochPoint::new(1.0, 0.0, 0.0).unwrap());
        assert!((zero.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(zero.matrix()[(1, 1)].norm() < 1e-15);

        // Equal mixture of the orthogonal pair is I/2 for any angles.
        let mixed = bloch_state(&BlochPoint::new(0.5, 1.234, 2.345).unwrap());
        let dev = max_abs_entry(&(mixed.matrix() - DensityMatrix::maximally_mixed(2).matrix()));
        assert!(dev < 1e-15);

        let plus = bloch_state(&BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap());
        for r in 0..2 {
            for s in 0..2 {
                assert!((plus.matrix()[(r, s)] - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bloch_point_rejects_out_of_range() {
        assert!(BlochPoint::new(1.2, 0.0, 0.0).is_err());
        assert!(BlochPoint::new(0.5, -0.1, 0.0).is_err());
        assert!(BlochPoint::new(0.5, 0.0, 2.0 * PI).is_err());
    }

    #[test]
    fn identity_channel_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = sampling::random_density_matrix(3, &mut rng);
        let out = Channel::identity(3).apply(&rho).unwrap();
        assert!(max_abs_entry(&(out.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn hadamard_maps_plus_to_zero() {
        let theta = Channel::unitary(hadamard()).unwrap();
        let plus = bloch_state(&BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap());
        let out = theta.apply(&plus).unwrap();
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(max_abs_entry(&(out.matrix() - zero.matrix())) < 1e-12);
    }

    #[test]
    fn full_dephasing_maps_plus_to_mixed() {
        let ops = vec![
            DensityMatrix::basis_state(2, 0).unwrap().matrix().clone(),
            DensityMatrix::basis_state(2, 1).unwrap().matrix().clone(),
        ];
        let dephase = Channel::kraus(ops).unwrap();
        let plus = bloch_state(&BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap());
        let out = dephase.apply(&plus).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(max_abs_entry(&(out.matrix() - mixed.matrix())) < 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let channels = vec![
            Channel::unitary(sampling::random_unitary(2, &mut rng)).unwrap(),
            sampling::random_mixed_unitary_channel(2, 3, &mut rng),
            Channel::kraus(vec![
                DensityMatrix::basis_state(2, 0).unwrap().matrix().clone(),
                DensityMatrix::basis_state(2, 1).unwrap().matrix().clone(),
            ])
            .unwrap(),
        ];
        for _ in 0..1000 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            for ch in &channels {
                let out = ch.apply(&rho).unwrap();
                out.validate().unwrap();
            }
        }
    }

    #[test]
    fn mixed_unitary_equals_weighted_sum_of_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u1 = sampling::random_unitary(2, &mut rng);
        let u2 = sampling::random_unitary(2, &mut rng);
        let mixed = Channel::mixed_unitary(vec![(0.3, u1.clone()), (0.7, u2.clone())]).unwrap();
        for _ in 0..20 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let whole = mixed.apply(&rho).unwrap();
            let part1 = Channel::unitary(u1.clone()).unwrap().apply(&rho).unwrap();
            let part2 = Channel::unitary(u2.clone()).unwrap().apply(&rho).unwrap();
            let sum = part1.matrix().scale(0.3) + part2.matrix().scale(0.7);
            assert!(max_abs_entry(&(whole.matrix() - sum)) < 1e-12);
        }
    }

    #[test]
    fn bloch_parameterization_covers_random_qubit_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let eig = crate::numerics::hermitian_eigendecomposition(rho.matrix()).unwrap();
            // Largest eigenvalue and its eigenvector give (p, theta, phi).
            let p = eig.eigenvalues[1].clamp(0.0, 1.0);
            let v0 = eig.eigenvectors[(0, 1)];
            let v1 = eig.eigenvectors[(1, 1)];
            let theta = 2.0 * v0.norm().clamp(0.0, 1.0).acos();
            let phi = if v0.norm() < 1e-9 || v1.norm() < 1e-9 {
                0.0
            } else {
                let raw = (v1 * v0.conj()).arg();
                if raw < 0.0 {
                    raw + 2.0 * PI
                } else {
                    raw
                }
            };
            let phi = if phi >= 2.0 * PI { 0.0 } else { phi };
            let rebuilt = bloch_state(&BlochPoint::new(p, theta, phi).unwrap());
            let dev = max_abs_entry(&(rebuilt.matrix() - rho.matrix()));
            assert!(dev < 1e-9, "reconstruction deviation {dev:e}");
        }
    }

    #[test]
    fn outcome_probabilities_on_basis_state_are_uniform() {
        let povm = four_outcome_povm();
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        let p = povm.outcome_probabilities(&zero).unwrap();
        for v in p {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn outcome_probabilities_on_plus_state() {
        // Independent oracle: p_k = |<phi_k|+>|^2 / 2 by direct arithmetic.
        let povm = four_outcome_povm();
        let plus = bloch_state(&BlochPoint::new(1.0, PI / 2.0, 0.0).unwrap());
        let p = povm.outcome_probabilities(&plus).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        for (k, &got) in p.iter().enumerate() {
            let omega = Complex64::from_polar(1.0, PI / 2.0 * k as f64);
            let overlap = (c(s, 0.0) * s + (omega.conj() * s) * s).norm_sqr();
            let expected = overlap / 2.0;
            assert!((got - expected).abs() < 1e-12, "outcome {k}");
        }
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert!((p[1] - 0.25).abs() < 1e-12);
        assert!(p[2].abs() < 1e-12);
        assert!((p[3] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let povm = four_outcome_povm();
        for _ in 0..100 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let p = povm.outcome_probabilities(&rho).unwrap();
            let sum: f64 = p.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn post_measurement_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = sampling::random_density_matrix(2, &mut rng);
        let out = post_measurement_state(&ComplexMatrix::identity(2, 2), &rho, 1.0).unwrap();
        assert!(max_abs_entry(&(out.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn rank_one_operator_collapses_to_its_projector() {
        // A = (1/sqrt(2))|phi_0><phi_0| on |0><0| yields |phi_0><phi_0| at
        // outcome weight 1/4.
        let povm = four_outcome_povm();
        let a = crate::numerics::psd_sqrt(&povm.effects()[0]).unwrap();
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        let out = post_measurement_state(&a, &zero, 0.25).unwrap();
        let projector = povm.effects()[0].scale(2.0);
        assert!(max_abs_entry(&(out.matrix() - projector)) < 1e-12);
    }

    #[test]
    fn rank_one_outcomes_are_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let v = sampling::random_unit_vector(2, &mut rng);
            let a = ComplexMatrix::from_fn(2, 2, |r, s| v[r] * v[s].conj());
            let p = trace_product_re(&(a.adjoint() * &a), rho.matrix());
            if p > 1e-6 {
                let out = post_measurement_state(&a, &rho, p).unwrap();
                assert!(out.entropy().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unreachable_outcome_is_an_error() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        let err = post_measurement_state(&ComplexMatrix::identity(2, 2), &rho, 1e-13);
        assert!(matches!(err, Err(Error::OutcomeUnreachable { .. })));
    }

    #[test]
    fn rejects_invalid_inputs() {
        // Non-unitary.
        let m = ComplexMatrix::identity(2, 2).scale(0.5);
        assert!(matches!(Channel::unitary(m), Err(Error::NotUnitary { .. })));
        // Incomplete POVM.
        let half = ComplexMatrix::identity(2, 2).scale(0.5);
        assert!(matches!(
            Povm::new(vec![half.clone()]),
            Err(Error::IncompletePovm { .. })
        ));
        // Trace-breaking Kraus set.
        assert!(matches!(
            Channel::kraus(vec![half]),
            Err(Error::NotTracePreserving { .. })
        ));
        // Dimension mismatch on application.
        let ch = Channel::identity(3);
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(matches!(
            ch.apply(&rho),
            Err(Error::DimensionMismatch { .. })
        ));
        // Density matrix with wrong trace.
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::identity(2, 2)),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn projective_measurement_validation() {
        let p0 = DensityMatrix::basis_state(2, 0).unwrap().matrix().clone();
        let p1 = DensityMatrix::basis_state(2, 1).unwrap().matrix().clone();
        assert!(ProjectiveMeasurement::new(vec![p0.clone(), p1]).is_ok());
        // Non-idempotent block fails.
        let tilted = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        );
        let complement = ComplexMatrix::identity(2, 2) - &tilted;
        assert!(ProjectiveMeasurement::new(vec![tilted.scale(1.2), complement]).is_err());
        // Overlapping projectors fail on orthogonality.
        assert!(matches!(
            ProjectiveMeasurement::new(vec![p0.clone(), p0]),
            Err(Error::NotProjective {
                check: "orthogonality",
                ..
            })
        ));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = sampling::random_mixed_unitary_channel(2, 2, &mut rng);
        let b = Channel::unitary(hadamard()).unwrap();
        let chained = a.then(&b).unwrap();
        for _ in 0..20 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let direct = b.apply(&a.apply(&rho).unwrap()).unwrap();
            let composed = chained.apply(&rho).unwrap();
            assert!(max_abs_entry(&(direct.matrix() - composed.matrix())) < 1e-12);
        }
    }

    #[test]
    fn mixture_matches_convex_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = Channel::unitary(sampling::random_unitary(2, &mut rng)).unwrap();
        let b = Channel::kraus(vec![
            DensityMatrix::basis_state(2, 0).unwrap().matrix().clone(),
            DensityMatrix::basis_state(2, 1).unwrap().matrix().clone(),
        ])
        .unwrap();
        let mixed = Channel::mix(0.25, &a, &b).unwrap();
        for _ in 0..20 {
            let rho = sampling::random_density_matrix(2, &mut rng);
            let expect = a.apply(&rho).unwrap().matrix().scale(0.25)
                + b.apply(&rho).unwrap().matrix().scale(0.75);
            let got = mixed.apply(&rho).unwrap();
            assert!(max_abs_entry(&(got.matrix() - expect)) < 1e-12);
        }
    }
}
