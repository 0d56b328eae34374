//! Exact atom-field dynamics for the Jaynes-Cummings (JC) and
//! anti-Jaynes-Cummings (AJC) interactions with a squeezed coherent field.
//!
//! The crate is layered bottom-up:
//!
//! * [`special`] – log-scaled Hermite polynomials and compensated sums
//! * [`squeezed`] – squeezed coherent amplitudes and photon statistics
//! * [`dynamics`] – closed-form block evolution, reduced states, Bloch vector
//! * [`observables`] – Mandel Q, inversion, entropy and time series
//! * [`oracle`] – dense truncated-Fock propagation used as an independent check
//! * [`scenario`] – scenario files, figure presets and the output writer

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Several loops walk parallel arrays by Fock index.
#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod observables;
pub mod oracle;
pub mod scenario;
pub mod special;
pub mod squeezed;

pub use dynamics::{
    AtomDensity, BlochVector, ClosedForm, CouplingConfig, EvolvedJointState, ModelKind,
};
pub use error::{Error, Result};
pub use squeezed::{PhotonDistribution, SqueezeSpec};
