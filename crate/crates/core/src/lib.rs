//! Simulation and analysis of dynamical sensitivity control on a driven
//! two-level spin: phase-programmed pi-pulse sequences, propagation under
//! arbitrary longitudinal RF fields, spectral analysis and virtual
//! magnetometry and noise-spectroscopy experiments.

// `!(x > 0.0)` is used on purpose so NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod propagate;
pub mod pulse;
pub mod scenario;
pub mod selftest;
pub mod signal;
pub mod spin;
pub mod table;

pub use error::{DyscoError, Result};
pub use propagate::{propagate, propagate_sampled, propagate_traced, SpinParams};
pub use pulse::{build_dysco, build_dysco_modulated, build_hahn_echo, build_xy8, PulseProgram};
pub use signal::{draw_shot, BathSurrogate, ShotContext, Tone, Waveform};
pub use spin::SpinState;
