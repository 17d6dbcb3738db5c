//! # povm-coherence
//!
//! Coherence of quantum states with respect to generalized measurements
//! (POVMs), and an optimization-defined coherence measure for quantum
//! channels built on top of it.
//!
//! ## What the crate does
//!
//! - Validated value types for density matrices, POVMs, projective
//!   measurements and CPTP channels ([`quantum`]).
//! - A canonical Naimark extension turning any POVM into a projective
//!   measurement on a larger space, with a dilation-identity verifier
//!   ([`naimark`]).
//! - Relative-entropy coherence measures: block coherence for projective
//!   measurements, POVM coherence `H[{p_i}] + sum_i p_i S(rho_i) - S(rho)`,
//!   and the plain basis coherence ([`coherence`]).
//! - The power of one channel over another,
//!   `max_rho { C(Theta[rho]) - C(Lambda[rho]) }`, a channel coherence
//!   measure derived from it, and budget-relative certification of channels
//!   that never increase coherence ([`dynamical`]).
//! - A bundled four-outcome qubit POVM with known closed-form values, grid
//!   sweeps over the Bloch sphere and mixed-state coherence bounds
//!   ([`scenarios`]).
//! - A problem-file front end used by the `povm-coherence` binary
//!   ([`problem`], [`cli`]).
//!
//! ## Quick start
//!
//! ```
//! use povm_coherence::coherence::povm_relative_entropy_coherence;
//! use povm_coherence::scenarios::reference_example;
//!
//! let example = reference_example().unwrap();
//! let basis_state = povm_coherence::quantum::DensityMatrix::basis_state(2, 0).unwrap();
//! let c = povm_relative_entropy_coherence(&basis_state, &example.povm).unwrap();
//! assert!((c.bits() - 2.0).abs() < 1e-9);
//! ```
//!
//! See the `examples/` directory for one runnable example per capability.

#![forbid(unsafe_code)]

pub mod cli;
pub mod coherence;
pub mod dynamical;
pub mod error;
pub mod naimark;
pub mod numerics;
pub mod problem;
pub mod quantum;
pub mod sampling;
pub mod scenarios;
pub mod tol;

pub use coherence::CoherenceValue;
pub use dynamical::{CmioVerdict, OptimizerConfig, PowerResult};
pub use error::{Error, Result};
pub use naimark::NaimarkExtension;
pub use numerics::{ComplexMatrix, EigDecomposition};
pub use quantum::{BlochPoint, Channel, DensityMatrix, Povm, ProjectiveMeasurement};
