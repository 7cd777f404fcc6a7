//! Longitudinal RF field generators: tones, random-phase signals and a
//! classical 13C spin-bath surrogate.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    #[serde(rename = "amplitude_t")]
    pub amplitude: f64,
    #[serde(rename = "frequency_hz")]
    pub frequency: f64,
    #[serde(rename = "phase_rad", default)]
    pub phase: f64,
}

impl Tone {
    pub fn new(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            amplitude,
            frequency,
            phase,
        }
    }
}

/// A resolved pair of lines at `larmor_center +- offset / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledSpin {
    #[serde(rename = "offset_hz")]
    pub offset: f64,
    #[serde(rename = "amplitude_t")]
    pub amplitude: f64,
}

/// Sum of classical random-phase oscillators with Gaussian-distributed frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathSurrogate {
    #[serde(rename = "larmor_center_hz")]
    pub larmor_center: f64,
    #[serde(rename = "larmor_spread_hz", default = "default_spread")]
    pub larmor_spread: f64,
    #[serde(default = "default_oscillators")]
    pub n_oscillators: usize,
    #[serde(rename = "rms_amplitude_t")]
    pub rms_amplitude: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coupled_spins: Vec<CoupledSpin>,
}

fn default_spread() -> f64 {
    10e3
}

fn default_oscillators() -> usize {
    16
}

impl BathSurrogate {
    pub fn new(
        larmor_center: f64,
        larmor_spread: f64,
        n_oscillators: usize,
        rms_amplitude: f64,
    ) -> Self {
        Self {
            larmor_center,
            larmor_spread,
            n_oscillators,
            rms_amplitude,
            coupled_spins: Vec::new(),
        }
    }

    pub fn with_coupled_spin(mut self, offset: f64, amplitude: f64) -> Self {
        self.coupled_spins.push(CoupledSpin { offset, amplitude });
        self
    }

    /// Amplitude of each random oscillator so the ensemble rms equals `rms_amplitude`.
    pub fn oscillator_amplitude(&self) -> f64 {
        self.rms_amplitude * (2.0 / self.n_oscillators as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ShotPhaseMode {
    /// Phase-synchronized: tone phases are exactly as configured.
    #[default]
    Fixed,
    /// Each shot adds an independent uniform phase to every tone.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Waveform {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tones: Vec<Tone>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathSurrogate>,
    #[serde(default)]
    pub mode: ShotPhaseMode,
}

impl Waveform {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn tone(amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            tones: vec![Tone::new(amplitude, frequency, phase)],
            ..Self::default()
        }
    }

    /// Quasi-static field of constant amplitude.
    pub fn constant(amplitude: f64) -> Self {
        Self::tone(amplitude, 0.0, 0.0)
    }

    pub fn tones(tones: impl IntoIterator<Item = Tone>) -> Self {
        Self {
            tones: tones.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn bath(bath: BathSurrogate) -> Self {
        Self {
            bath: Some(bath),
            mode: ShotPhaseMode::Random,
            ..Self::default()
        }
    }

    pub fn with_mode(mut self, mode: ShotPhaseMode) -> Self {
        self.mode = mode;
        self
    }

    /// Superposition of two waveforms. The result is random-phase if either input is.
    pub fn multiplex(&self, other: &Waveform) -> Result<Waveform> {
        let bath = match (&self.bath, &other.bath) {
            (Some(_), Some(_)) => {
                return Err(invalid("bath", "cannot superpose two bath surrogates"))
            }
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let mode = if self.mode == ShotPhaseMode::Random || other.mode == ShotPhaseMode::Random {
            ShotPhaseMode::Random
        } else {
            ShotPhaseMode::Fixed
        };
        let mut tones = self.tones.clone();
        tones.extend_from_slice(&other.tones);
        Ok(Waveform { tones, bath, mode })
    }

    /// True when every shot sees the same field.
    pub fn is_deterministic(&self) -> bool {
        let has_random_tone = self.mode == ShotPhaseMode::Random && !self.tones.is_empty();
        self.bath.is_none() && !has_random_tone
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.tones {
            if !(t.amplitude >= 0.0) || !t.amplitude.is_finite() {
                return Err(invalid(
                    "amplitude_t",
                    format!("{} must be finite and >= 0", t.amplitude),
                ));
            }
            if !(t.frequency >= 0.0) || !t.frequency.is_finite() {
                return Err(invalid(
                    "frequency_hz",
                    format!("{} must be finite and >= 0", t.frequency),
                ));
            }
            if !t.phase.is_finite() {
                return Err(invalid("phase_rad", "must be finite"));
            }
        }
        if let Some(b) = &self.bath {
            if b.n_oscillators == 0 {
                return Err(invalid("n_oscillators", "must be at least 1"));
            }
            if !(b.rms_amplitude >= 0.0) || !b.rms_amplitude.is_finite() {
                return Err(invalid(
                    "rms_amplitude_t",
                    format!("{} must be finite and >= 0", b.rms_amplitude),
                ));
            }
            if !(b.larmor_spread >= 0.0) || !(b.larmor_center >= 0.0) {
                return Err(invalid(
                    "larmor_spread_hz",
                    "center and spread must be >= 0",
                ));
            }
            for c in &b.coupled_spins {
                if !(c.amplitude >= 0.0) || !c.offset.is_finite() {
                    return Err(invalid(
                        "coupled_spins",
                        "amplitude must be >= 0 and offset finite",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Field at time `t` for one shot, in tesla.
    pub fn sample(&self, t: f64, shot: &ShotContext) -> f64 {
        let mut b = 0.0;
        for (tone, extra) in self.tones.iter().zip(&shot.tone_phases) {
            b += tone.amplitude * (TAU * tone.frequency * t + (tone.phase + extra)).cos();
        }
        for o in &shot.oscillators {
            b += o.amplitude * (o.omega * t + o.phase).cos();
        }
        b
    }

    /// [`Waveform::sample`] over many times; bit-identical to calling it pointwise.
    pub fn sample_many(&self, times: &[f64], shot: &ShotContext) -> Vec<f64> {
        let mut out = vec![0.0; times.len()];
        for (tone, extra) in self.tones.iter().zip(&shot.tone_phases) {
            let ph = tone.phase + extra;
            for (b, &t) in out.iter_mut().zip(times) {
                *b += tone.amplitude * (TAU * tone.frequency * t + ph).cos();
            }
        }
        for o in &shot.oscillators {
            for (b, &t) in out.iter_mut().zip(times) {
                *b += o.amplitude * (o.omega * t + o.phase).cos();
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub amplitude: f64,
    /// rad/s
    pub omega: f64,
    pub phase: f64,
}

/// Per-shot random draws of a [`Waveform`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShotContext {
    pub seed: u64,
    pub shot_index: u64,
    /// Extra phase added to each tone.
    pub tone_phases: Vec<f64>,
    /// Bath oscillators, coupled-spin lines last.
    pub oscillators: Vec<Oscillator>,
}

impl ShotContext {
    /// Context of a waveform without random content.
    pub fn fixed(waveform: &Waveform) -> Self {
        draw_shot(waveform, 0, 0)
    }
}

const TONE_LANE: u128 = 0;
const BATH_LANE: u128 = 1;

/// Counter-based generator for `(seed, shot, lane)`. Shots never share a stream.
fn lane_rng(seed: u64, shot_index: u64, lane: u128) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot_index);
    rng.set_word_pos(lane << 48);
    rng
}

/// Draws the random content of one shot, deterministically from `(rng_seed, shot_index)`.
pub fn draw_shot(waveform: &Waveform, rng_seed: u64, shot_index: u64) -> ShotContext {
    let tone_phases = match waveform.mode {
        ShotPhaseMode::Fixed => vec![0.0; waveform.tones.len()],
        ShotPhaseMode::Random => {
            let mut rng = lane_rng(rng_seed, shot_index, TONE_LANE);
            waveform
                .tones
                .iter()
                .map(|_| rng.random::<f64>() * TAU)
                .collect()
        }
    };
    let mut oscillators = Vec::new();
    if let Some(bath) = &waveform.bath {
        let mut rng = lane_rng(rng_seed, shot_index, BATH_LANE);
        let amplitude = bath.oscillator_amplitude();
        let spread = bath.larmor_spread.max(0.0);
        let normal = Normal::new(bath.larmor_center, spread).expect("spread is finite and >= 0");
        for _ in 0..bath.n_oscillators {
            let f = normal.sample(&mut rng);
            let phase = rng.random::<f64>() * TAU;
            oscillators.push(Oscillator {
                amplitude,
                omega: TAU * f,
                phase,
            });
        }
        for c in &bath.coupled_spins {
            for sign in [-1.0, 1.0] {
                let f = bath.larmor_center + sign * 0.5 * c.offset;
                let phase = rng.random::<f64>() * TAU;
                oscillators.push(Oscillator {
                    amplitude: c.amplitude,
                    omega: TAU * f,
                    phase,
                });
            }
        }
    }
    ShotContext {
        seed: rng_seed,
        shot_index,
        tone_phases,
        oscillators,
    }
}

/// Free function form of [`Waveform::sample`].
pub fn sample(waveform: &Waveform, t: f64, shot: &ShotContext) -> f64 {
    waveform.sample(t, shot)
}
