//! Scenario configuration in TOML with SI units carried by key suffixes
//! (`_hz`, `_rad_s`, `_t`, `_s`, `_rad`).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constants::{GAMMA_NV, RABI_REFERENCE};
use crate::experiments::{Envelope, Setup};
use crate::propagate::SpinParams;
use crate::pulse::{dysco_total_time, max_modulation_frequency, Window};
use crate::signal::{ShotPhaseMode, Waveform};
use crate::table::ResultTable;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ConfigIssue>),

    #[error("cannot serialize configuration: {0}")]
    Serialize(String),
}

impl ConfigError {
    /// Keys named by a validation failure.
    pub fn keys(&self) -> Vec<&str> {
        match self {
            ConfigError::Invalid(issues) => issues.iter().map(|i| i.key.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Map,
    Sensitivity,
    DrRamp,
    Spectrogram,
    NoiseSpectrum,
    FilterFunction,
    Trace,
    Baseline,
    ExportProgram,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Map => "map",
            Self::Sensitivity => "sensitivity",
            Self::DrRamp => "dr-ramp",
            Self::Spectrogram => "spectrogram",
            Self::NoiseSpectrum => "noise-spectrum",
            Self::FilterFunction => "filter-function",
            Self::Trace => "trace",
            Self::Baseline => "baseline",
            Self::ExportProgram => "export-program",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceChoice {
    #[default]
    Dysco,
    DyscoModulated,
    Hahn,
    Xy8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinConfig {
    #[serde(default = "default_rabi")]
    pub rabi_rad_s: f64,
    #[serde(default)]
    pub detuning_rad_s: f64,
    #[serde(default = "default_gamma")]
    pub gamma_nv_rad_s_t: f64,
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self {
            rabi_rad_s: RABI_REFERENCE,
            detuning_rad_s: 0.0,
            gamma_nv_rad_s_t: GAMMA_NV,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default)]
    pub kind: SequenceChoice,
    #[serde(default = "default_units")]
    pub n_units: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_s_hz: Option<f64>,
    #[serde(default = "default_beta_k")]
    pub beta_k: f64,
    #[serde(default = "default_beta_steps")]
    pub beta_steps: usize,
    #[serde(default)]
    pub window: Window,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(default = "default_reps")]
    pub reps: usize,
}

impl Default for SequenceConfig {
    fn default() -> Self {
        Self {
            kind: SequenceChoice::Dysco,
            n_units: default_units(),
            phi_rad: None,
            f_s_hz: None,
            beta_k: default_beta_k(),
            beta_steps: default_beta_steps(),
            window: Window::Rectangular,
            tau_s: None,
            reps: default_reps(),
        }
    }
}

/// Sweep axes. Each experiment reads the subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_start_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_stop_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_start_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_stop_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_rf_t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_s_start_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_s_stop_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_s_step_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_start_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_stop_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_start_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_stop_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub tau_s: f64,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub spin: SpinConfig,
    #[serde(default)]
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub waveform: Waveform,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeConfig>,
}

fn default_rabi() -> f64 {
    RABI_REFERENCE
}
fn default_gamma() -> f64 {
    GAMMA_NV
}
fn default_units() -> usize {
    40
}
fn default_beta_k() -> f64 {
    1.0
}
fn default_beta_steps() -> usize {
    8
}
fn default_reps() -> usize {
    4
}
fn default_exponent() -> f64 {
    1.0
}
fn default_shots() -> usize {
    200
}
fn default_substeps() -> usize {
    crate::experiments::DEFAULT_SUBSTEPS
}

/// Points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// `start, start + step, ...` up to `stop` inclusive (within rounding).
pub fn stepped(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + i as f64 * step).collect()
}

impl ScenarioConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            seed: 0,
            shots: default_shots(),
            substeps: default_substeps(),
            output: None,
            spin: SpinConfig::default(),
            sequence: SequenceConfig::default(),
            grid: GridConfig::default(),
            waveform: Waveform::default(),
            envelope: None,
        }
    }

    pub fn setup(&self) -> Setup {
        Setup {
            rabi: self.spin.rabi_rad_s,
            spin: SpinParams {
                detuning: self.spin.detuning_rad_s,
                gamma_nv: self.spin.gamma_nv_rad_s_t,
            },
            substeps: self.substeps,
            envelope: self.envelope.map(|e| Envelope {
                tau: e.tau_s,
                exponent: e.exponent,
            }),
        }
    }

    pub fn phi_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        linspace(
            g.phi_start_rad.unwrap_or(0.0),
            g.phi_stop_rad.unwrap_or(PI),
            g.phi_points.unwrap_or(19),
        )
    }

    pub fn field_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        linspace(
            g.b_start_t.unwrap_or(0.0),
            g.b_stop_t.unwrap_or(0.0),
            g.b_points.unwrap_or(0),
        )
    }

    pub fn beta_schedule(&self) -> Vec<f64> {
        linspace(0.0, 1.0, self.grid.beta_points.unwrap_or(256))
    }

    pub fn f_s_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        match (g.f_s_start_hz, g.f_s_stop_hz, g.f_s_step_hz) {
            (Some(a), Some(b), Some(s)) if s > 0.0 && b >= a => stepped(a, b, s),
            _ => Vec::new(),
        }
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        linspace(
            g.tau_start_s.unwrap_or(0.0),
            g.tau_stop_s.unwrap_or(0.0),
            g.tau_points.unwrap_or(0),
        )
    }

    pub fn omega_grid(&self) -> Vec<f64> {
        let g = &self.grid;
        linspace(
            g.omega_start_rad_s.unwrap_or(0.0),
            g.omega_stop_rad_s.unwrap_or(0.0),
            g.omega_points.unwrap_or(0),
        )
    }

    /// Every guard violation, each naming the offending key.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut bad = |key: &str, message: String| {
            out.push(ConfigIssue {
                key: key.to_string(),
                message,
            })
        };
        let rabi = self.spin.rabi_rad_s;
        if !(rabi > 0.0) || !rabi.is_finite() {
            bad("rabi_rad_s", format!("{rabi} must be positive and finite"));
        }
        if !self.spin.detuning_rad_s.is_finite() {
            bad("detuning_rad_s", "must be finite".into());
        }
        let gamma = self.spin.gamma_nv_rad_s_t;
        if !gamma.is_finite() || gamma == 0.0 {
            bad(
                "gamma_nv_rad_s_t",
                format!("{gamma} must be finite and non-zero"),
            );
        }
        if self.shots == 0 {
            bad("shots", "must be at least 1".into());
        }
        if self.substeps == 0 {
            bad("substeps", "must be at least 1".into());
        }
        let seq = &self.sequence;
        if seq.n_units == 0 {
            bad("n_units", "must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&seq.beta_k) {
            bad("beta_k", format!("{} is outside [0, 1]", seq.beta_k));
        }
        if seq.beta_steps == 0 {
            bad("beta_steps", "must be at least 1".into());
        }
        if seq.reps == 0 {
            bad("reps", "must be at least 1".into());
        }
        if let Some(phi) = seq.phi_rad {
            if !phi.is_finite() {
                bad("phi_rad", "must be finite".into());
            }
        }
        if let Some(tau) = seq.tau_s {
            if !(tau > 0.0) || !tau.is_finite() {
                bad("tau_s", format!("{tau} must be positive"));
            }
        }
        if let Some(e) = self.envelope {
            if !(e.tau_s > 0.0) || !e.tau_s.is_finite() {
                bad("envelope.tau_s", format!("{} must be positive", e.tau_s));
            }
            if !(e.exponent > 0.0) || !e.exponent.is_finite() {
                bad(
                    "envelope.exponent",
                    format!("{} must be positive", e.exponent),
                );
            }
        }
        if let Err(e) = self.waveform.validate() {
            bad("waveform", e.to_string());
        }
        if rabi > 0.0 && rabi.is_finite() && seq.n_units > 0 {
            let limit = max_modulation_frequency(rabi);
            let resolution = 1.0 / dysco_total_time(seq.n_units, rabi);
            let mut band = |key: &str, f: f64, check_low: bool| {
                if !(f >= 0.0) || !f.is_finite() {
                    bad(key, format!("{f} must be finite and non-negative"));
                } else if f > limit {
                    bad(
                        key,
                        format!("{f} Hz exceeds the bandwidth limit {limit} Hz"),
                    );
                } else if check_low && f < resolution * (1.0 - 1e-9) {
                    bad(
                        key,
                        format!("{f} Hz is below the resolution limit {resolution} Hz"),
                    );
                }
            };
            if let Some(f) = seq.f_s_hz {
                band("f_s_hz", f, false);
            }
            if let Some(f) = self.grid.f_s_start_hz {
                band("f_s_start_hz", f, true);
            }
            if let Some(f) = self.grid.f_s_stop_hz {
                band("f_s_stop_hz", f, true);
            }
        }
        self.experiment_issues(&mut out);
        out
    }

    fn experiment_issues(&self, out: &mut Vec<ConfigIssue>) {
        let mut need = |key: &str, ok: bool, what: &str| {
            if !ok {
                out.push(ConfigIssue {
                    key: key.to_string(),
                    message: what.to_string(),
                });
            }
        };
        let g = &self.grid;
        let random = !self.waveform.is_deterministic();
        match self.experiment {
            ExperimentKind::Map => {
                need(
                    "phi_points",
                    g.phi_points.unwrap_or(19) >= 1,
                    "must be at least 1",
                );
                need(
                    "b_points",
                    g.b_points.unwrap_or(0) >= 1,
                    "a field grid is required",
                );
            }
            ExperimentKind::Sensitivity => {
                need(
                    "phi_points",
                    g.phi_points.unwrap_or(19) >= 1,
                    "must be at least 1",
                );
                need(
                    "b_points",
                    g.b_points.unwrap_or(0) >= 16,
                    "the field ramp needs at least 16 points",
                );
                need(
                    "b_stop_t",
                    g.b_stop_t.unwrap_or(0.0) != g.b_start_t.unwrap_or(0.0),
                    "ramp must have non-zero span",
                );
            }
            ExperimentKind::DrRamp => {
                need(
                    "b_rf_t",
                    !g.b_rf_t.is_empty(),
                    "at least one field is required",
                );
                need(
                    "beta_points",
                    g.beta_points.unwrap_or(256) >= 2,
                    "must be at least 2",
                );
            }
            ExperimentKind::Spectrogram | ExperimentKind::NoiseSpectrum => {
                need(
                    "f_s_step_hz",
                    !self.f_s_grid().is_empty(),
                    "f_s_start_hz, f_s_stop_hz and a positive f_s_step_hz are required",
                );
                need(
                    "shots",
                    !random || self.shots >= 100,
                    "random waveforms need at least 100 shots",
                );
                if self.experiment == ExperimentKind::NoiseSpectrum {
                    need(
                        "waveform.bath",
                        self.waveform.bath.is_some(),
                        "a bath block is required",
                    );
                }
            }
            ExperimentKind::FilterFunction => {
                need(
                    "omega_points",
                    g.omega_points.unwrap_or(0) >= 1,
                    "an omega grid is required",
                );
                self.sequence_issues(&mut need);
            }
            ExperimentKind::Trace | ExperimentKind::ExportProgram => {
                self.sequence_issues(&mut need)
            }
            ExperimentKind::Baseline => {
                need(
                    "kind",
                    matches!(
                        self.sequence.kind,
                        SequenceChoice::Hahn | SequenceChoice::Xy8
                    ),
                    "baseline needs hahn or xy8",
                );
                need(
                    "tau_points",
                    g.tau_points.unwrap_or(0) >= 1,
                    "a tau grid is required",
                );
                need(
                    "tau_start_s",
                    g.tau_start_s.unwrap_or(0.0) > 0.0,
                    "must be positive",
                );
            }
        }
    }

    fn sequence_issues(&self, need: &mut impl FnMut(&str, bool, &str)) {
        match self.sequence.kind {
            SequenceChoice::Dysco => need(
                "phi_rad",
                self.sequence.phi_rad.is_some(),
                "required for dysco",
            ),
            SequenceChoice::DyscoModulated => need(
                "f_s_hz",
                self.sequence.f_s_hz.is_some(),
                "required for dysco-modulated",
            ),
            SequenceChoice::Hahn | SequenceChoice::Xy8 => need(
                "tau_s",
                self.sequence.tau_s.is_some(),
                "required for hahn and xy8",
            ),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(issues))
        }
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String, ConfigError> {
        let text = emit_config(self)?;
        Ok(Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    /// Adds the provenance header needed to reproduce `table`.
    pub fn stamp(&self, table: &mut ResultTable) -> Result<(), ConfigError> {
        let mut head = ResultTable::default();
        head.meta("tool", concat!("dysco ", env!("CARGO_PKG_VERSION")))
            .meta("experiment", self.experiment.name())
            .meta("config_sha256", self.hash()?)
            .meta("seed", self.seed);
        head.metadata.append(&mut table.metadata);
        table.metadata = head.metadata;
        Ok(())
    }

    pub fn with_random_phase(mut self) -> Self {
        self.waveform.mode = ShotPhaseMode::Random;
        self
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a scenario without range checks, so overrides can be applied first.
pub fn parse_unvalidated(text: &str) -> Result<ScenarioConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Parses and validates a scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg = parse_unvalidated(text)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn emit_config(cfg: &ScenarioConfig) -> Result<String, ConfigError> {
    toml::to_string(cfg).map_err(|e| ConfigError::Serialize(e.to_string()))
}
