//! Quantum Fisher information for phase estimation with partially entangled
//! qubit probes under phase-covariant noise.
//!
//! * [`channel`]: the noise family, presets, Bloch and Choi representations.
//! * [`closedform`]: the analytic Fisher information, log-domain safe.
//! * [`oracle`]: dense density-matrix evaluation used to cross-check it.
//! * [`optimize`]: optimal probe size and entanglement, thresholds, block strategy.
//! * [`cli`]: the `qfi` command-line front end.

pub mod channel;
pub mod cli;
pub mod closedform;
mod error;
pub mod logmath;
pub mod optimize;
pub mod oracle;

pub use channel::{make_noise, preset, NoiseParams, Preset, PresetKind};
pub use closedform::{qfi, ProbeConfig, QfiResult};
pub use error::{Error, Result};
