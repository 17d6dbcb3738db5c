//! Problem files: a JSON description of a POVM, named channels, named
//! states and optimizer overrides.
//!
//! Complex entries are always two-element arrays `[re, im]`; matrices are
//! row-major nested arrays. `format_version` is required and currently
//! pinned to `"1"`.
//!
//! ```json
//! {
//!   "format_version": "1",
//!   "povm": [ [[[0.5,0],[0.25,-0.25]], [[0.25,0.25],[0.5,0]]], ... ],
//!   "channels": {
//!     "u_max": { "kind": "unitary", "matrix": [...] },
//!     "noise": { "kind": "kraus", "matrices": [ ... ] },
//!     "shuffle": { "kind": "mixed-unitary", "weights": [0.5, 0.5], "matrices": [ ... ] }
//!   },
//!   "states": {
//!     "zero": { "matrix": [[[1,0],[0,0]],[[0,0],[0,0]]] },
//!     "tilted": { "bloch": { "p": 1.0, "theta": 1.5707963, "phi": 0.0 } }
//!   },
//!   "optimizer": { "seed": 7, "restarts": 32 }
//! }
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Deserialize;

use crate::dynamical::OptimizerConfig;
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::quantum::{bloch_state, BlochPoint, Channel, DensityMatrix, Povm};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    format_version: String,
    #[serde(default)]
    povm: Option<Vec<RawMatrix>>,
    #[serde(default)]
    channels: BTreeMap<String, RawChannel>,
    #[serde(default)]
    states: BTreeMap<String, RawState>,
    #[serde(default)]
    optimizer: Option<RawOptimizer>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    kind: String,
    #[serde(default)]
    matrix: Option<RawMatrix>,
    #[serde(default)]
    matrices: Option<Vec<RawMatrix>>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    #[serde(default)]
    matrix: Option<RawMatrix>,
    #[serde(default)]
    bloch: Option<RawBloch>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBloch {
    p: f64,
    theta: f64,
    phi: f64,
}

/// Optimizer overrides; unset fields keep their defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptimizer {
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub local_max_iterations: Option<usize>,
    #[serde(default)]
    pub local_tolerance: Option<f64>,
    #[serde(default)]
    pub grid_resolution: Option<[usize; 3]>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub budget_tolerance: Option<f64>,
}

impl RawOptimizer {
    /// Applies the overrides on top of a base configuration.
    pub fn apply(&self, mut cfg: OptimizerConfig) -> OptimizerConfig {
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.local_max_iterations {
            cfg.local_max_iterations = v;
        }
        if let Some(v) = self.local_tolerance {
            cfg.local_tolerance = v;
        }
        if let Some(v) = self.grid_resolution {
            cfg.grid_resolution = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.budget_tolerance {
            cfg.budget_tolerance = v;
        }
        cfg
    }
}

/// A parsed and validated problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub povm: Option<Povm>,
    pub channels: BTreeMap<String, Channel>,
    pub states: BTreeMap<String, DensityMatrix>,
    pub optimizer: RawOptimizer,
}

impl Problem {
    pub fn require_povm(&self) -> Result<&Povm> {
        self.povm
            .as_ref()
            .ok_or_else(|| Error::Invalid("problem file has no \"povm\" section".into()))
    }

    pub fn require_state(&self, name: &str) -> Result<&DensityMatrix> {
        self.states.get(name).ok_or_else(|| {
            Error::Invalid(format!(
                "state \"{name}\" is not defined in the problem file"
            ))
        })
    }

    pub fn require_channel(&self, name: &str) -> Result<&Channel> {
        self.channels.get(name).ok_or_else(|| {
            Error::Invalid(format!(
                "channel \"{name}\" is not defined in the problem file"
            ))
        })
    }
}

fn convert_matrix(raw: &RawMatrix, context: &str) -> Result<ComplexMatrix> {
    let rows = raw.len();
    if rows == 0 {
        return Err(Error::Invalid(format!("{context}: matrix has no rows")));
    }
    let cols = raw[0].len();
    if cols == 0 || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid(format!(
            "{context}: matrix rows have inconsistent lengths"
        )));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (i, row) in raw.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Invalid(format!(
                    "{context}: non-finite entry at ({i}, {j})"
                )));
            }
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

fn convert_channel(name: &str, raw: &RawChannel) -> Result<Channel> {
    let context = format!("channel \"{name}\"");
    match raw.kind.as_str() {
        "unitary" => {
            let matrix = raw
                .matrix
                .as_ref()
                .ok_or_else(|| Error::Invalid(format!("{context}: \"unitary\" needs a \"matrix\"")))?;
            Channel::unitary(convert_matrix(matrix, &context)?)
        }
        "kraus" => {
            let matrices = raw.matrices.as_ref().ok_or_else(|| {
                Error::Invalid(format!("{context}: \"kraus\" needs \"matrices\""))
            })?;
            let ops = matrices
                .iter()
                .map(|m| convert_matrix(m, &context))
                .collect::<Result<Vec<_>>>()?;
            Channel::kraus(ops)
        }
        "mixed-unitary" => {
            let matrices = raw.matrices.as_ref().ok_or_else(|| {
                Error::Invalid(format!("{context}: \"mixed-unitary\" needs \"matrices\""))
            })?;
            let weights = raw.weights.as_ref().ok_or_else(|| {
                Error::Invalid(format!("{context}: \"mixed-unitary\" needs \"weights\""))
            })?;
            if weights.len() != matrices.len() {
                return Err(Error::Invalid(format!(
                    "{context}: {} weights for {} matrices",
                    weights.len(),
                    matrices.len()
                )));
            }
            let pairs = weights
                .iter()
                .zip(matrices)
                .map(|(&w, m)| Ok((w, convert_matrix(m, &context)?)))
                .collect::<Result<Vec<_>>>()?;
            Channel::mixed_unitary(pairs)
        }
        other => Err(Error::Invalid(format!(
            "{context}: unknown kind \"{other}\" (expected \"unitary\", \"kraus\" or \"mixed-unitary\")"
        ))),
    }
}

fn convert_state(name: &str, raw: &RawState) -> Result<DensityMatrix> {
    let context = format!("state \"{name}\"");
    match (&raw.matrix, &raw.bloch) {
        (Some(matrix), None) => DensityMatrix::new(convert_matrix(matrix, &context)?),
        (None, Some(b)) => Ok(bloch_state(&BlochPoint::new(b.p, b.theta, b.phi)?)),
        (Some(_), Some(_)) => Err(Error::Invalid(format!(
            "{context}: give either \"matrix\" or \"bloch\", not both"
        ))),
        (None, None) => Err(Error::Invalid(format!(
            "{context}: needs a \"matrix\" or a \"bloch\" point"
        ))),
    }
}

/// Parses a problem file. Malformed JSON or schema violations become parse
/// errors (with line/column from the JSON parser); semantically invalid
/// content (bad POVM, unknown channel kind, wrong version) becomes a
/// validation error.
pub fn parse_problem(text: &str) -> Result<Problem> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse(format!("{e}")))?;
    if raw.format_version != "1" {
        return Err(Error::Invalid(format!(
            "unsupported format_version \"{}\" (this build reads \"1\")",
            raw.format_version
        )));
    }
    let povm = match &raw.povm {
        Some(effects) => {
            let converted = effects
                .iter()
                .enumerate()
                .map(|(i, m)| convert_matrix(m, &format!("povm effect {i}")))
                .collect::<Result<Vec<_>>>()?;
            Some(Povm::new(converted)?)
        }
        None => None,
    };
    let mut channels = BTreeMap::new();
    for (name, raw_channel) in &raw.channels {
        channels.insert(name.clone(), convert_channel(name, raw_channel)?);
    }
    let mut states = BTreeMap::new();
    for (name, raw_state) in &raw.states {
        states.insert(name.clone(), convert_state(name, raw_state)?);
    }
    Ok(Problem {
        povm,
        channels,
        states,
        optimizer: raw.optimizer.unwrap_or_default(),
    })
}
