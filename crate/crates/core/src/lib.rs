//! Optimal amount of concatenated quantum error correction when the physical
//! error rate grows with the size of the computer.
//!
//! The crate is organised bottom-up:
//!
//! - [`scheme`]: fault-tolerance scheme constants, scale-dependent noise laws,
//!   base-10 log probabilities and noise-law fitting.
//! - [`concat`]: the logical error curve `p^(k)`, the optimal level `k_max`
//!   and the closed-form conditions and bounds for the exponential law.
//! - [`long_range`]: power-law crosstalk on chains and square lattices and
//!   its mapping onto logical crosstalk.
//! - [`gate_sim`]: master-equation simulation of a resonantly driven qubit and
//!   extraction of its Pauli error probabilities.
//! - [`shor`]: photon budgets and energy bills for Shor's algorithm.
//!
//! Probabilities are carried as [`LogProb`] throughout, since `p^(k)` drops
//! below `f64::MIN_POSITIVE` after a handful of concatenation levels.

pub mod concat;
pub mod error;
pub mod gate_sim;
pub mod long_range;
pub mod scheme;
pub mod shor;

pub use concat::{BoundsReport, KmaxBound, OptResult, OptStatus};
pub use error::{Error, Result};
pub use scheme::{FitResult, FtScheme, LogProb, NoiseModel};
