use std::fmt;

use thiserror::Error;

/// One violated structural invariant of a [`PulseProgram`](crate::pulse::PulseProgram).
#[derive(Debug, Clone, PartialEq)]
pub enum ProgramViolation {
    Empty,
    NonPositiveDuration { index: usize, duration: f64 },
    NegativeRabi { index: usize, rabi: f64 },
    NonFinite { index: usize },
    NotPiPulse { index: usize, angle: f64 },
    PulseCount { expected: usize, found: usize },
    TotalTime { expected: f64, found: f64 },
    MissingMiddlePiY { index: usize },
    UnitPattern { unit: usize },
    MirrorSymmetry { index: usize, mirror: usize },
}

impl fmt::Display for ProgramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "program has no pulses"),
            Self::NonPositiveDuration { index, duration } => {
                write!(f, "pulse {index} has non-positive duration {duration:e} s")
            }
            Self::NegativeRabi { index, rabi } => {
                write!(f, "pulse {index} has negative Rabi rate {rabi:e} rad/s")
            }
            Self::NonFinite { index } => write!(f, "pulse {index} has a non-finite field"),
            Self::NotPiPulse { index, angle } => {
                write!(f, "pulse {index} rotates by {angle} rad instead of pi")
            }
            Self::PulseCount { expected, found } => {
                write!(f, "expected {expected} pulses, found {found}")
            }
            Self::TotalTime { expected, found } => {
                write!(f, "total time {found:e} s differs from {expected:e} s")
            }
            Self::MissingMiddlePiY { index } => write!(f, "pulse {index} is not the middle pi_y"),
            Self::UnitPattern { unit } => {
                write!(f, "unit {unit} does not follow the 4-pi phase pattern")
            }
            Self::MirrorSymmetry { index, mirror } => {
                write!(
                    f,
                    "pulses {index} and {mirror} break the mirror phase relation"
                )
            }
        }
    }
}

/// Bandwidth limits for phase-programmed modulation frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthViolation {
    /// Above `rabi / (9 pi)`, the inverse of the shortest admissible sequence.
    AboveMaximum { f_s: f64, limit: f64 },
    /// Below the `1 / t_N` resolution of the sequence.
    BelowResolution { f_s: f64, limit: f64 },
}

impl fmt::Display for BandwidthViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AboveMaximum { f_s, limit } => {
                write!(f, "f_s = {f_s} Hz exceeds the bandwidth limit {limit} Hz")
            }
            Self::BelowResolution { f_s, limit } => {
                write!(f, "f_s = {f_s} Hz is below the resolution limit {limit} Hz")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum DyscoError {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("invalid program: {}", join(.0))]
    InvalidProgram(Vec<ProgramViolation>),

    #[error("{0}")]
    Bandwidth(BandwidthViolation),

    #[error("interpulse spacing {tau:e} s is not longer than the pi pulse ({pulse:e} s)")]
    SpacingTooShort { tau: f64, pulse: f64 },

    #[error("samples are not uniformly spaced (index {index})")]
    NonUniformSampling { index: usize },

    #[error("spectrum is empty or degenerate")]
    DegenerateSpectrum,

    #[error("response is flat; slope cannot be estimated")]
    FlatResponse,

    #[error("integration band does not cover the noise spectrum support")]
    GridCoverage,

    #[error("quadrature did not reach tolerance {tolerance:e}")]
    Quadrature { tolerance: f64 },

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(items: &[ProgramViolation]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = DyscoError> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> DyscoError {
    DyscoError::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
