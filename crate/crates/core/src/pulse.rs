//! Pulse programs: phase-programmed 4-pi sequences and free-precession baselines.
//!
//! A sensitivity-control sequence is
//!
//! ```text
//! [pi(xbar-phi), pi(x-phi), pi(x+phi), pi(xbar+phi)]^N  pi(y)  [pi(x-phi), pi(xbar-phi), pi(xbar+phi), pi(x+phi)]^N
//! ```
//!
//! The second half is the first half reflected through the axis of the middle
//! pi(y) pulse (`theta -> pi - theta`) and played in reverse order. At zero
//! field every 4-pi unit is the identity; with a longitudinal field `eps` each
//! unit rotates the spin by roughly `8 (eps / rabi) sin(phi)` about x, and the
//! reflection keeps that rotation's sign across the middle pulse.
//!
//! Phase labels resolve as `x -> 0`, `xbar -> pi`, `y -> pi/2`, `x+-phi -> +-phi`,
//! `xbar+-phi -> pi+-phi`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::analysis::SensitivityFunction;
use crate::error::{invalid, BandwidthViolation, DyscoError, ProgramViolation, Result};
use crate::table::{Cell, ResultTable};

const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    /// Seconds.
    pub duration: f64,
    /// rad/s; zero for free evolution.
    pub rabi: f64,
    /// Drive phase theta, rad.
    pub phase: f64,
    /// rad/s.
    pub detuning: f64,
    pub label: String,
}

impl Pulse {
    pub fn pi(rabi: f64, phase: f64, label: &str) -> Self {
        Self {
            duration: PI / rabi,
            rabi,
            phase,
            detuning: 0.0,
            label: label.to_string(),
        }
    }

    pub fn half_pi(rabi: f64, phase: f64, label: &str) -> Self {
        Self {
            duration: FRAC_PI_2 / rabi,
            rabi,
            phase,
            detuning: 0.0,
            label: label.to_string(),
        }
    }

    pub fn free(duration: f64) -> Self {
        Self {
            duration,
            rabi: 0.0,
            phase: 0.0,
            detuning: 0.0,
            label: "free".to_string(),
        }
    }

    pub fn is_free(&self) -> bool {
        self.rabi == 0.0
    }

    /// Nutation angle `rabi * duration` on resonance.
    pub fn angle(&self) -> f64 {
        self.rabi * self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rectangular,
    Gaussian,
}

impl Window {
    /// Envelope at time `t` of a sequence of length `total`.
    pub fn factor(self, t: f64, total: f64) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Gaussian => {
                let half = 0.5 * total;
                let d = t - half;
                (-(d * d) / (2.0 * half * half)).exp()
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Gaussian => "gaussian",
        }
    }
}

/// Per-unit target sensitivities of a phase-programmed sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityProfile {
    /// One entry per 4-pi unit, in time order, each in [-1, 1].
    pub betas: Vec<f64>,
    /// Nominal unit centers `(1 + 2n) 2 pi / rabi`.
    pub centers: Vec<f64>,
    pub window: Window,
    pub beta_k: f64,
}

/// Which basis state is bright at readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadoutFrame {
    Direct,
    /// The sequence holds an odd number of pi pulses, so the zero-field final
    /// state is |->. Readout applies an ideal pi(y) so P0 reports the return
    /// to the prepared state.
    Flipped,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceKind {
    Dysco {
        phi: f64,
    },
    DyscoModulated {
        f_s: f64,
        beta_k: f64,
        window: Window,
    },
    HahnEcho {
        tau: f64,
        final_half_pi: bool,
    },
    Xy8 {
        reps: usize,
        tau: f64,
    },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseProgram {
    pub pulses: Vec<Pulse>,
    pub n_units: usize,
    pub total_time: f64,
    /// Rabi rate the program was compiled for.
    pub rabi: f64,
    pub kind: SequenceKind,
    pub readout: ReadoutFrame,
    pub sensitivity_schedule: Option<SensitivityProfile>,
}

/// `2 pi / rabi`.
pub fn rabi_period(rabi: f64) -> f64 {
    TAU / rabi
}

/// `(4N + 1/2) 2 pi / rabi`.
pub fn dysco_total_time(n_units: usize, rabi: f64) -> f64 {
    (4.0 * n_units as f64 + 0.5) * rabi_period(rabi)
}

/// Smallest `N` whose sequence lasts at least `t_min`.
pub fn units_for_duration(t_min: f64, rabi: f64) -> usize {
    let n = ((t_min / rabi_period(rabi) - 0.5) / 4.0).ceil();
    n.max(1.0) as usize
}

/// Highest modulation frequency, `rabi / (9 pi)` in Hz.
pub fn max_modulation_frequency(rabi: f64) -> f64 {
    rabi / (9.0 * PI)
}

/// Checks `f_s` against `[1 / t_N, rabi / (9 pi)]`.
pub fn check_bandwidth(
    f_s: f64,
    rabi: f64,
    total_time: f64,
) -> std::result::Result<(), BandwidthViolation> {
    let hi = max_modulation_frequency(rabi);
    if f_s > hi {
        return Err(BandwidthViolation::AboveMaximum { f_s, limit: hi });
    }
    // Sequence lengths are quantized, so allow the last digits of 1 / t_N to slip.
    let lo = 1.0 / total_time;
    if f_s < lo * (1.0 - 1e-9) {
        return Err(BandwidthViolation::BelowResolution { f_s, limit: lo });
    }
    Ok(())
}

/// Modulation phase realizing sensitivity `beta`: `arcsin(beta)`.
pub fn phase_for_sensitivity(beta: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&beta) {
        return Err(invalid("beta", format!("{beta} is outside [-1, 1]")));
    }
    Ok(beta.asin())
}

fn neg(x: f64) -> f64 {
    0.0 - x
}

const FORWARD_LABELS: [&str; 4] = [
    "pi_xbar_minus_phi",
    "pi_x_minus_phi",
    "pi_x_plus_phi",
    "pi_xbar_plus_phi",
];
const MIRROR_LABELS: [&str; 4] = [
    "pi_x_minus_phi",
    "pi_xbar_minus_phi",
    "pi_xbar_plus_phi",
    "pi_x_plus_phi",
];

fn forward_unit(phi: f64) -> [f64; 4] {
    [PI - phi, neg(phi), phi, PI + phi]
}

fn mirrored_unit(phi: f64) -> [f64; 4] {
    [neg(phi), PI - phi, PI + phi, phi]
}

fn check_rabi(rabi: f64) -> Result<()> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(invalid(
            "rabi",
            format!("{rabi} must be positive and finite"),
        ));
    }
    Ok(())
}

fn unit_centers(count: usize, rabi: f64) -> Vec<f64> {
    let period = rabi_period(rabi);
    (0..count)
        .map(|n| (1.0 + 2.0 * n as f64) * period)
        .collect()
}

/// Assembles `2N` units with per-unit phases and the middle pi(y).
fn assemble_dysco(phis: &[f64], rabi: f64) -> Vec<Pulse> {
    let n = phis.len() / 2;
    let mut pulses = Vec::with_capacity(8 * n + 1);
    for &phi in &phis[..n] {
        for (theta, label) in forward_unit(phi).into_iter().zip(FORWARD_LABELS) {
            pulses.push(Pulse::pi(rabi, theta, label));
        }
    }
    pulses.push(Pulse::pi(rabi, FRAC_PI_2, "pi_y"));
    for &phi in &phis[n..] {
        for (theta, label) in mirrored_unit(phi).into_iter().zip(MIRROR_LABELS) {
            pulses.push(Pulse::pi(rabi, theta, label));
        }
    }
    pulses
}

/// Fixed-phase sensitivity-control sequence of `8N + 1` pi pulses.
pub fn build_dysco(n_units: usize, phi: f64, rabi: f64) -> Result<PulseProgram> {
    if n_units == 0 {
        return Err(invalid("n_units", "must be at least 1"));
    }
    check_rabi(rabi)?;
    if !phi.is_finite() {
        return Err(invalid("phi", "must be finite"));
    }
    let phis = vec![phi; 2 * n_units];
    let beta = phi.sin();
    Ok(PulseProgram {
        pulses: assemble_dysco(&phis, rabi),
        n_units,
        total_time: dysco_total_time(n_units, rabi),
        rabi,
        kind: SequenceKind::Dysco { phi },
        readout: ReadoutFrame::Flipped,
        sensitivity_schedule: Some(SensitivityProfile {
            betas: vec![beta; 2 * n_units],
            centers: unit_centers(2 * n_units, rabi),
            window: Window::Rectangular,
            beta_k: beta.abs(),
        }),
    })
}

/// Sequence whose unit `n` carries sensitivity `window(t_n) beta_k sin(2 pi f_s t_n)`.
pub fn build_dysco_modulated(
    n_units: usize,
    f_s: f64,
    beta_k: f64,
    window: Window,
    rabi: f64,
) -> Result<PulseProgram> {
    if n_units == 0 {
        return Err(invalid("n_units", "must be at least 1"));
    }
    check_rabi(rabi)?;
    if !(0.0..=1.0).contains(&beta_k) {
        return Err(invalid("beta_k", format!("{beta_k} is outside [0, 1]")));
    }
    if !(f_s >= 0.0) || !f_s.is_finite() {
        return Err(invalid(
            "f_s",
            format!("{f_s} must be finite and non-negative"),
        ));
    }
    let limit = max_modulation_frequency(rabi);
    if f_s > limit {
        return Err(DyscoError::Bandwidth(BandwidthViolation::AboveMaximum {
            f_s,
            limit,
        }));
    }
    let total = dysco_total_time(n_units, rabi);
    let centers = unit_centers(2 * n_units, rabi);
    let betas: Vec<f64> = centers
        .iter()
        .map(|&t| (window.factor(t, total) * beta_k * (TAU * f_s * t).sin()).clamp(-1.0, 1.0))
        .collect();
    let phis: Vec<f64> = betas.iter().map(|&b| b.asin()).collect();
    Ok(PulseProgram {
        pulses: assemble_dysco(&phis, rabi),
        n_units,
        total_time: total,
        rabi,
        kind: SequenceKind::DyscoModulated {
            f_s,
            beta_k,
            window,
        },
        readout: ReadoutFrame::Flipped,
        sensitivity_schedule: Some(SensitivityProfile {
            betas,
            centers,
            window,
            beta_k,
        }),
    })
}

/// Hahn echo: pi/2(x), tau/2, pi(x), tau/2, and optionally a closing pi/2(x).
pub fn build_hahn_echo(tau: f64, rabi: f64, final_half_pi: bool) -> Result<PulseProgram> {
    check_rabi(rabi)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(invalid("tau", format!("{tau} must be positive")));
    }
    let mut pulses = vec![
        Pulse::half_pi(rabi, 0.0, "half_pi_x"),
        Pulse::free(0.5 * tau),
        Pulse::pi(rabi, 0.0, "pi_x"),
        Pulse::free(0.5 * tau),
    ];
    if final_half_pi {
        pulses.push(Pulse::half_pi(rabi, 0.0, "half_pi_x"));
    }
    Ok(finish_free_precession(
        pulses,
        1,
        rabi,
        SequenceKind::HahnEcho { tau, final_half_pi },
    ))
}

const XY8_PHASES: [(f64, &str); 8] = [
    (0.0, "pi_x"),
    (FRAC_PI_2, "pi_y"),
    (0.0, "pi_x"),
    (FRAC_PI_2, "pi_y"),
    (FRAC_PI_2, "pi_y"),
    (0.0, "pi_x"),
    (FRAC_PI_2, "pi_y"),
    (0.0, "pi_x"),
];

/// XY8-M with center-to-center pulse spacing `tau`, bracketed by pi/2(x) and pi/2(xbar).
pub fn build_xy8(reps: usize, tau: f64, rabi: f64) -> Result<PulseProgram> {
    check_rabi(rabi)?;
    if reps == 0 {
        return Err(invalid("reps", "must be at least 1"));
    }
    let t_pi = PI / rabi;
    if !(tau > t_pi) {
        return Err(DyscoError::SpacingTooShort { tau, pulse: t_pi });
    }
    let edge = 0.5 * (tau - t_pi);
    let gap = tau - t_pi;
    let mut pulses = vec![Pulse::half_pi(rabi, 0.0, "half_pi_x"), Pulse::free(edge)];
    for i in 0..8 * reps {
        if i > 0 {
            pulses.push(Pulse::free(gap));
        }
        let (theta, label) = XY8_PHASES[i % 8];
        pulses.push(Pulse::pi(rabi, theta, label));
    }
    pulses.push(Pulse::free(edge));
    pulses.push(Pulse::half_pi(rabi, PI, "half_pi_xbar"));
    Ok(finish_free_precession(
        pulses,
        reps,
        rabi,
        SequenceKind::Xy8 { reps, tau },
    ))
}

fn finish_free_precession(
    pulses: Vec<Pulse>,
    n_units: usize,
    rabi: f64,
    kind: SequenceKind,
) -> PulseProgram {
    let total_time = start_times(&pulses, rabi).1;
    PulseProgram {
        pulses,
        n_units,
        total_time,
        rabi,
        kind,
        readout: ReadoutFrame::Direct,
        sensitivity_schedule: None,
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Start time of every pulse plus the end time.
///
/// Pulses lasting an exact multiple of a quarter Rabi period are counted as
/// integers; everything else goes through a compensated sum. Each start time
/// is rounded once.
fn start_times(pulses: &[Pulse], rabi: f64) -> (Vec<f64>, f64) {
    let quarter = 0.25 * rabi_period(rabi);
    let mut quarters: u64 = 0;
    let mut rest = CompensatedSum::default();
    let mut starts = Vec::with_capacity(pulses.len());
    let now = |q: u64, r: &CompensatedSum| {
        let mut s = *r;
        s.add(q as f64 * quarter);
        s.value()
    };
    for p in pulses {
        starts.push(now(quarters, &rest));
        let k = (p.duration / quarter).round();
        if k >= 1.0 && (p.duration - k * quarter).abs() <= 4.0 * f64::EPSILON * p.duration {
            quarters += k as u64;
        } else {
            rest.add(p.duration);
        }
    }
    let end = now(quarters, &rest);
    (starts, end)
}

fn angle_close(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) < 1e-9
}

fn approx(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}

impl PulseProgram {
    pub fn start_times(&self) -> Vec<f64> {
        start_times(&self.pulses, self.rabi).0
    }

    /// Time points at which a waveform is sampled: `substeps` midpoints per pulse.
    pub fn sample_times(&self, substeps: usize) -> Vec<f64> {
        let starts = self.start_times();
        let mut out = Vec::with_capacity(self.pulses.len() * substeps);
        for (p, &t0) in self.pulses.iter().zip(&starts) {
            let dt = p.duration / substeps as f64;
            out.extend((0..substeps).map(|j| t0 + (j as f64 + 0.5) * dt));
        }
        out
    }

    /// Phases `phi_n` of the 4-pi units, or `None` for free-precession programs.
    pub fn unit_phases(&self) -> Option<Vec<f64>> {
        if !matches!(
            self.kind,
            SequenceKind::Dysco { .. } | SequenceKind::DyscoModulated { .. }
        ) {
            return None;
        }
        let n = self.n_units;
        let mut phis = Vec::with_capacity(2 * n);
        for u in 0..2 * n {
            let base = if u < n { 4 * u } else { 4 * u + 1 };
            // x+phi sits at offset 2 in forward units and offset 3 in mirrored ones.
            let idx = if u < n { base + 2 } else { base + 3 };
            phis.push(self.pulses.get(idx)?.phase);
        }
        Some(phis)
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<ProgramViolation>> {
        let mut errs = Vec::new();
        if self.pulses.is_empty() {
            errs.push(ProgramViolation::Empty);
        }
        for (index, p) in self.pulses.iter().enumerate() {
            if !p.duration.is_finite()
                || !p.rabi.is_finite()
                || !p.phase.is_finite()
                || !p.detuning.is_finite()
            {
                errs.push(ProgramViolation::NonFinite { index });
            } else {
                if !(p.duration > 0.0) {
                    errs.push(ProgramViolation::NonPositiveDuration {
                        index,
                        duration: p.duration,
                    });
                }
                if p.rabi < 0.0 {
                    errs.push(ProgramViolation::NegativeRabi {
                        index,
                        rabi: p.rabi,
                    });
                }
            }
        }
        match self.kind {
            SequenceKind::Dysco { phi } => self.validate_dysco(Some(phi), &mut errs),
            SequenceKind::DyscoModulated { .. } => self.validate_dysco(None, &mut errs),
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    fn validate_dysco(&self, fixed_phi: Option<f64>, errs: &mut Vec<ProgramViolation>) {
        let n = self.n_units;
        let expected = 8 * n + 1;
        let found = self.pulses.len();
        if found != expected {
            errs.push(ProgramViolation::PulseCount { expected, found });
        }
        let t_expected = dysco_total_time(n, self.rabi);
        if !approx(self.total_time, t_expected) {
            errs.push(ProgramViolation::TotalTime {
                expected: t_expected,
                found: self.total_time,
            });
        }
        for (index, p) in self.pulses.iter().enumerate() {
            if !approx(p.angle(), PI) {
                errs.push(ProgramViolation::NotPiPulse {
                    index,
                    angle: p.angle(),
                });
            }
        }
        match self.pulses.get(4 * n) {
            Some(p) if angle_close(p.phase, FRAC_PI_2) => {}
            _ => errs.push(ProgramViolation::MissingMiddlePiY { index: 4 * n }),
        }
        if found == expected {
            for u in 0..2 * n {
                let (base, pattern): (usize, fn(f64) -> [f64; 4]) = if u < n {
                    (4 * u, forward_unit)
                } else {
                    (4 * u + 1, mirrored_unit)
                };
                let phi = if u < n {
                    self.pulses[base + 2].phase
                } else {
                    self.pulses[base + 3].phase
                };
                let ok = pattern(phi)
                    .iter()
                    .zip(&self.pulses[base..base + 4])
                    .all(|(&t, p)| angle_close(t, p.phase))
                    && fixed_phi.is_none_or(|f| angle_close(f, phi));
                if !ok {
                    errs.push(ProgramViolation::UnitPattern { unit: u });
                }
            }
        }
        if fixed_phi.is_some() {
            for index in 0..4 * n {
                let mirror = 8 * n - index;
                let ok = self
                    .pulses
                    .get(mirror)
                    .is_some_and(|m| angle_close(m.phase, PI - self.pulses[index].phase));
                if !ok {
                    errs.push(ProgramViolation::MirrorSymmetry { index, mirror });
                }
            }
        }
    }

    /// One record per pulse: index, start, duration, rabi, phase, label.
    pub fn export(&self) -> ResultTable {
        let mut t = ResultTable::new([
            "index",
            "start_s",
            "duration_s",
            "rabi_rad_s",
            "phase_rad",
            "label",
        ]);
        t.meta("rabi_rad_s", crate::table::format_float(self.rabi));
        t.meta("n_units", self.n_units);
        match &self.kind {
            SequenceKind::Dysco { phi } => {
                t.meta("sequence", "dysco");
                t.meta("phi_rad", crate::table::format_float(*phi));
            }
            SequenceKind::DyscoModulated {
                f_s,
                beta_k,
                window,
            } => {
                t.meta("sequence", "dysco_modulated");
                t.meta("f_s_hz", crate::table::format_float(*f_s));
                t.meta("beta_k", crate::table::format_float(*beta_k));
                t.meta("window", window.name());
            }
            SequenceKind::HahnEcho { tau, final_half_pi } => {
                t.meta("sequence", "hahn_echo");
                t.meta("tau_s", crate::table::format_float(*tau));
                t.meta("final_half_pi", final_half_pi);
            }
            SequenceKind::Xy8 { reps, tau } => {
                t.meta("sequence", "xy8");
                t.meta("reps", reps);
                t.meta("tau_s", crate::table::format_float(*tau));
            }
            SequenceKind::Custom => {
                t.meta("sequence", "custom");
            }
        }
        t.meta("total_time_s", crate::table::format_float(self.total_time));
        for (i, (p, start)) in self.pulses.iter().zip(self.start_times()).enumerate() {
            t.push_row(vec![
                i.into(),
                start.into(),
                p.duration.into(),
                p.rabi.into(),
                p.phase.into(),
                Cell::Text(p.label.clone()),
            ]);
        }
        t
    }

    /// Instantaneous sensitivity g(t) sampled at midpoints `(j + 1/2) dt`.
    ///
    /// Phase-programmed units contribute their target beta; the middle pi(y)
    /// contributes zero. Free-precession programs toggle +-1 at the center of
    /// each pi pulse and are zero outside the pi/2 brackets.
    pub fn sensitivity_function(&self, dt: f64) -> SensitivityFunction {
        let segments = self.sensitivity_segments();
        let count = (self.total_time / dt).ceil() as usize;
        let mut values = Vec::with_capacity(count);
        let mut seg = 0;
        for j in 0..count {
            let t = (j as f64 + 0.5) * dt;
            while seg + 1 < segments.len() && segments[seg].1 <= t {
                seg += 1;
            }
            let (s, e, v) = segments[seg];
            values.push(if t >= s && t < e { v } else { 0.0 });
        }
        SensitivityFunction { values, dt }
    }

    fn sensitivity_segments(&self) -> Vec<(f64, f64, f64)> {
        let starts = self.start_times();
        let mut segs = Vec::new();
        if let (Some(profile), Some(_)) = (&self.sensitivity_schedule, self.unit_phases()) {
            let n = self.n_units;
            for (u, &beta) in profile.betas.iter().enumerate() {
                let first = if u < n { 4 * u } else { 4 * u + 1 };
                let last = first + 3;
                if last >= self.pulses.len() {
                    break;
                }
                segs.push((
                    starts[first],
                    starts[last] + self.pulses[last].duration,
                    beta,
                ));
            }
            return segs;
        }
        let mut sign = 0.0;
        let mut opened = false;
        for (p, &t0) in self.pulses.iter().zip(&starts) {
            let t1 = t0 + p.duration;
            if p.is_free() {
                segs.push((t0, t1, sign));
            } else if approx(p.angle(), FRAC_PI_2) {
                segs.push((t0, t1, 0.0));
                sign = if opened { 0.0 } else { 1.0 };
                opened = true;
            } else if approx(p.angle(), PI) {
                let mid = 0.5 * (t0 + t1);
                segs.push((t0, mid, sign));
                sign = -sign;
                segs.push((mid, t1, sign));
            } else {
                segs.push((t0, t1, 0.0));
            }
        }
        segs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::RABI_REFERENCE;
    use std::f64::consts::FRAC_PI_6;

    #[test]
    fn single_unit_has_nine_pulses() {
        let p = build_dysco(1, FRAC_PI_6, RABI_REFERENCE).unwrap();
        assert_eq!(p.pulses.len(), 9);
        let expected = 4.5 * TAU / RABI_REFERENCE;
        assert!((p.total_time - expected).abs() <= 1e-12 * expected);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn zero_phase_collapses_to_x_axes() {
        let p = build_dysco(1, 0.0, 1.0e7).unwrap();
        let phases: Vec<f64> = p.pulses.iter().map(|q| q.phase).collect();
        assert_eq!(phases, vec![PI, 0.0, 0.0, PI, FRAC_PI_2, 0.0, PI, PI, 0.0]);
    }

    #[test]
    fn two_hundred_units_last_96_microseconds() {
        let p = build_dysco(200, 0.3, RABI_REFERENCE).unwrap();
        // 800.5 / 8.33 MHz = 96.098 us
        assert!((p.total_time - 800.5 / 8.33e6).abs() < 1e-15);
        assert!((p.total_time * 1e6 - 96.098).abs() < 1e-3);
    }

    #[test]
    fn rejects_degenerate_arguments() {
        assert!(build_dysco(0, 0.1, 1.0).is_err());
        assert!(build_dysco(3, 0.1, 0.0).is_err());
        assert!(build_dysco(3, 0.1, -1.0).is_err());
        assert!(build_hahn_echo(0.0, 1.0e7, true).is_err());
        assert!(matches!(
            build_xy8(4, 1e-8, 1.0e7),
            Err(DyscoError::SpacingTooShort { .. })
        ));
        assert!(build_dysco_modulated(5, 1e3, 1.5, Window::Rectangular, 1e7).is_err());
    }

    #[test]
    fn phase_for_sensitivity_values() {
        assert_eq!(phase_for_sensitivity(0.0).unwrap(), 0.0);
        assert!((phase_for_sensitivity(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((phase_for_sensitivity(0.5).unwrap() - FRAC_PI_6).abs() < 1e-15);
        assert!((phase_for_sensitivity(-0.5).unwrap() + FRAC_PI_6).abs() < 1e-15);
        assert!(phase_for_sensitivity(1.0001).is_err());
    }

    #[test]
    fn static_modulation_is_zero_sensitivity_driving() {
        let p = build_dysco_modulated(12, 0.0, 0.7, Window::Gaussian, RABI_REFERENCE).unwrap();
        assert!(p.unit_phases().unwrap().iter().all(|&phi| phi == 0.0));
        let base = build_dysco(12, 0.0, RABI_REFERENCE).unwrap();
        assert_eq!(p.pulses, base.pulses);
    }

    #[test]
    fn quarter_period_unit_reaches_full_amplitude() {
        let rabi = RABI_REFERENCE;
        let t25 = 51.0 * rabi_period(rabi);
        let f_s = 1.0 / (4.0 * t25);
        let p = build_dysco_modulated(100, f_s, 0.6, Window::Rectangular, rabi).unwrap();
        let phis = p.unit_phases().unwrap();
        assert!((phis[25] - 0.6f64.asin()).abs() < 1e-12);
    }

    #[test]
    fn modulation_above_bandwidth_is_rejected() {
        let rabi = RABI_REFERENCE;
        let limit = max_modulation_frequency(rabi);
        assert!((limit - 1.8511e6).abs() < 1e2);
        let err =
            build_dysco_modulated(10, 1.01 * limit, 0.5, Window::Rectangular, rabi).unwrap_err();
        assert!(matches!(
            err,
            DyscoError::Bandwidth(BandwidthViolation::AboveMaximum { .. })
        ));
        let t = dysco_total_time(10, rabi);
        assert!(matches!(
            check_bandwidth(0.5 / t, rabi, t),
            Err(BandwidthViolation::BelowResolution { .. })
        ));
        assert!(check_bandwidth(2.0 / t, rabi, t).is_ok());
    }

    #[test]
    fn missing_middle_pulse_breaks_mirror_symmetry() {
        let mut p = build_dysco(2, FRAC_PI_6, RABI_REFERENCE).unwrap();
        p.pulses.remove(8);
        let errs = p.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, ProgramViolation::MirrorSymmetry { .. })));
        assert!(errs.iter().any(|e| matches!(
            e,
            ProgramViolation::PulseCount {
                expected: 17,
                found: 16
            }
        )));
    }

    #[test]
    fn non_positive_duration_is_reported() {
        let mut p = build_dysco(1, 0.2, RABI_REFERENCE).unwrap();
        p.pulses[3].duration = 0.0;
        let errs = p.validate().unwrap_err();
        assert!(errs.contains(&ProgramViolation::NonPositiveDuration {
            index: 3,
            duration: 0.0
        }));
    }

    #[test]
    fn modulated_program_validates() {
        let p = build_dysco_modulated(40, 300e3, 0.8, Window::Gaussian, RABI_REFERENCE).unwrap();
        assert!(p.validate().is_ok());
        let prof = p.sensitivity_schedule.as_ref().unwrap();
        assert!(prof.betas.iter().all(|b| b.abs() <= 0.8));
    }

    #[test]
    fn export_has_one_monotone_record_per_pulse() {
        let p = build_dysco(1, FRAC_PI_6, RABI_REFERENCE).unwrap();
        let t = p.export();
        assert_eq!(t.rows.len(), 9);
        let starts = t.column_f64("start_s").unwrap();
        let durs = t.column_f64("duration_s").unwrap();
        assert_eq!(starts[0], 0.0);
        for i in 1..starts.len() {
            assert!(starts[i] > starts[i - 1]);
            assert!((starts[i] - (starts[i - 1] + durs[i - 1])).abs() < 1e-20);
        }
        assert_eq!(t.get_meta("sequence"), Some("dysco"));
    }

    #[test]
    fn long_programs_do_not_drift() {
        let rabi = RABI_REFERENCE;
        let p = build_dysco(5000, 0.4, rabi).unwrap();
        let starts = p.start_times();
        let last = *starts.last().unwrap();
        let exact = 40000.0 * PI / rabi;
        assert!((last - exact).abs() <= 2.0 * f64::EPSILON * exact);
    }

    #[test]
    fn xy8_pulse_counts() {
        let p = build_xy8(4, 2e-6, RABI_REFERENCE).unwrap();
        let pis = p.pulses.iter().filter(|q| approx(q.angle(), PI)).count();
        assert_eq!(pis, 32);
        let expected = 32.0 * 2e-6 + PI / RABI_REFERENCE;
        assert!((p.total_time - expected).abs() < 1e-15);
    }

    #[test]
    fn gaussian_window_peaks_at_center_and_is_symmetric() {
        let total = 3.0e-4;
        assert_eq!(Window::Gaussian.factor(0.5 * total, total), 1.0);
        for k in 0..10 {
            let d = k as f64 * 1.3e-5;
            let a = Window::Gaussian.factor(0.5 * total - d, total);
            let b = Window::Gaussian.factor(0.5 * total + d, total);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn xy8_sensitivity_toggles() {
        let rabi = RABI_REFERENCE;
        let tau = 1e-6;
        let p = build_xy8(1, tau, rabi).unwrap();
        let g = p.sensitivity_function(1e-9);
        let t_half = FRAC_PI_2 / rabi;
        let at = |t: f64| g.values[((t) / 1e-9) as usize];
        assert_eq!(at(0.5 * t_half), 0.0);
        assert_eq!(at(t_half + 0.25 * tau), 1.0);
        assert_eq!(at(t_half + tau), -1.0);
        assert_eq!(at(t_half + 2.0 * tau), 1.0);
    }
}
