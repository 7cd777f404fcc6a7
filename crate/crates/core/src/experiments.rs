//! Virtual experiments: parameter sweeps, spectrograms, Monte Carlo
//! averaging and conventional-sequence baselines.
//!
//! Every experiment is deterministic given its seed. Shot `s` of every cell
//! sees the same random draw `draw_shot(waveform, seed, s)`, so results do not
//! depend on scheduling and cells are compared under common random numbers.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;

use crate::analysis::{self, SensitivityCurve, Spectrum};
use crate::constants::RABI_REFERENCE;
use crate::error::{invalid, DyscoError, Result};
use crate::propagate::{propagate_sampled, propagate_traced, SpinParams, TracePoint};
use crate::pulse::{
    build_dysco, build_dysco_modulated, build_hahn_echo, build_xy8, check_bandwidth,
    dysco_total_time, phase_for_sensitivity, units_for_duration, PulseProgram, Window,
};
use crate::signal::{draw_shot, BathSurrogate, ShotContext, Waveform};
use crate::spin::{apply_contrast_envelope, SpinState};
use crate::table::{Cell, ResultTable};

/// Stretched-exponential contrast loss applied to simulated populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub tau: f64,
    pub exponent: f64,
}

/// Substeps per pulse at which production runs agree with 8x finer sampling to 1e-6 in P0.
pub const DEFAULT_SUBSTEPS: usize = 24;

/// Physical and numerical settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub rabi: f64,
    pub spin: SpinParams,
    pub substeps: usize,
    pub envelope: Option<Envelope>,
}

impl Default for Setup {
    fn default() -> Self {
        Self {
            rabi: RABI_REFERENCE,
            spin: SpinParams::default(),
            substeps: DEFAULT_SUBSTEPS,
            envelope: None,
        }
    }
}

impl Setup {
    fn finish(&self, p0: f64, total_time: f64) -> f64 {
        match self.envelope {
            Some(e) => apply_contrast_envelope(p0, total_time, e.tau, e.exponent),
            None => p0,
        }
    }

    /// Field of `eps` in units of the Rabi rate, in tesla.
    pub fn field_for(&self, eps_over_rabi: f64) -> f64 {
        eps_over_rabi * self.rabi / self.spin.gamma_nv.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            values,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepMeta {
    pub rabi: f64,
    pub n_units: usize,
    pub seed: u64,
    pub shots: usize,
    pub substeps: usize,
}

/// P0 over a two-dimensional grid; `p0[i][j]` belongs to `axis1[i]`, `axis2[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis1: Axis,
    pub axis2: Axis,
    pub p0: Vec<Vec<f64>>,
    pub meta: SweepMeta,
}

impl SweepResult {
    pub fn to_table(&self) -> ResultTable {
        let mut t = ResultTable::new([self.axis1.name.as_str(), self.axis2.name.as_str(), "p0"]);
        t.meta("rabi_rad_s", self.meta.rabi)
            .meta("n_units", self.meta.n_units)
            .meta("seed", self.meta.seed)
            .meta("shots", self.meta.shots)
            .meta("substeps", self.meta.substeps);
        for (a, row) in self.axis1.values.iter().zip(&self.p0) {
            for (b, p) in self.axis2.values.iter().zip(row) {
                t.push_row(vec![Cell::Float(*a), Cell::Float(*b), Cell::Float(*p)]);
            }
        }
        t
    }
}

/// P0 versus modulation frequency (columns) and sensitivity amplitude (rows).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub f_s: Vec<f64>,
    pub beta_k: Vec<f64>,
    /// `p0[k][j]` belongs to `beta_k[k]`, `f_s[j]`.
    pub p0: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub shots: usize,
    pub n_units: usize,
    pub seed: u64,
}

impl Spectrogram {
    /// Largest drop `1 - P0` in each column.
    pub fn column_response(&self) -> Vec<f64> {
        (0..self.f_s.len())
            .map(|j| {
                self.p0
                    .iter()
                    .map(|row| 1.0 - row[j])
                    .fold(f64::MIN, f64::max)
            })
            .collect()
    }

    /// Column index closest to `f`.
    pub fn column_of(&self, f: f64) -> usize {
        let mut best = 0;
        for (j, v) in self.f_s.iter().enumerate() {
            if (v - f).abs() < (self.f_s[best] - f).abs() {
                best = j;
            }
        }
        best
    }

    pub fn to_table(&self) -> ResultTable {
        let mut t = ResultTable::new(["f_s_hz", "beta_k", "p0", "stderr"]);
        t.meta("n_units", self.n_units)
            .meta("seed", self.seed)
            .meta("shots", self.shots);
        for (k, b) in self.beta_k.iter().enumerate() {
            for (j, f) in self.f_s.iter().enumerate() {
                t.push_row(vec![
                    Cell::Float(*f),
                    Cell::Float(*b),
                    Cell::Float(self.p0[k][j]),
                    Cell::Float(self.stderr[k][j]),
                ]);
            }
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: usize,
}

fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Field samples per shot on a shared time grid.
struct ShotFields {
    fields: Vec<Vec<f64>>,
}

impl ShotFields {
    fn new(waveform: &Waveform, times: &[f64], shots: usize, seed: u64) -> Self {
        let fields = (0..shots as u64)
            .into_par_iter()
            .map(|s| waveform.sample_many(times, &draw_shot(waveform, seed, s)))
            .collect();
        Self { fields }
    }

    fn estimate(&self, setup: &Setup, program: &PulseProgram) -> Result<Estimate> {
        let p: Vec<f64> = self
            .fields
            .iter()
            .map(|f| {
                propagate_sampled(SpinState::ground(), program, f, setup.substeps, &setup.spin)
                    .map(|s| s.p0())
            })
            .collect::<Result<_>>()?;
        let (mean, stderr) = mean_stderr(&p);
        Ok(Estimate {
            mean: setup.finish(mean, program.total_time),
            stderr,
            shots: p.len(),
        })
    }
}

fn check_shots(shots: usize) -> Result<()> {
    if shots == 0 {
        return Err(invalid("shots", "must be at least 1"));
    }
    Ok(())
}

fn effective_shots(waveform: &Waveform, shots: usize) -> usize {
    if waveform.is_deterministic() {
        1
    } else {
        shots
    }
}

/// Mean P0 and its standard error over independent shots.
///
/// A deterministic waveform is propagated once and reports zero error.
pub fn monte_carlo_p0(
    setup: &Setup,
    program: &PulseProgram,
    waveform: &Waveform,
    shots: usize,
    seed: u64,
) -> Result<Estimate> {
    check_shots(shots)?;
    waveform.validate()?;
    let shots = effective_shots(waveform, shots);
    let times = program.sample_times(setup.substeps.max(1));
    let p: Vec<f64> = (0..shots as u64)
        .into_par_iter()
        .map(|s| {
            let f = waveform.sample_many(&times, &draw_shot(waveform, seed, s));
            propagate_sampled(
                SpinState::ground(),
                program,
                &f,
                setup.substeps,
                &setup.spin,
            )
            .map(|st| st.p0())
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&p);
    Ok(Estimate {
        mean: setup.finish(mean, program.total_time),
        stderr,
        shots,
    })
}

fn non_empty(name: &'static str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(invalid(name, "grid is empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid(name, "grid contains non-finite values"));
    }
    Ok(())
}

fn constant_field_p0(setup: &Setup, program: &PulseProgram, b: f64) -> Result<f64> {
    let fields = vec![b; program.pulses.len() * setup.substeps];
    let s = propagate_sampled(
        SpinState::ground(),
        program,
        &fields,
        setup.substeps,
        &setup.spin,
    )?;
    Ok(setup.finish(s.p0(), program.total_time))
}

/// P0 over a phase grid and a field grid under a synchronous quasi-static tone.
pub fn run_p0_map(
    setup: &Setup,
    phis: &[f64],
    fields: &[f64],
    n_units: usize,
) -> Result<SweepResult> {
    non_empty("phi", phis)?;
    non_empty("b_rf", fields)?;
    let p0 = phis
        .par_iter()
        .map(|&phi| {
            let prog = build_dysco(n_units, phi, setup.rabi)?;
            fields
                .iter()
                .map(|&b| constant_field_p0(setup, &prog, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis1: Axis::new("phi_rad", phis.to_vec()),
        axis2: Axis::new("b_rf_t", fields.to_vec()),
        p0,
        meta: SweepMeta {
            rabi: setup.rabi,
            n_units,
            seed: 0,
            shots: 1,
            substeps: setup.substeps,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityScan {
    pub map: SweepResult,
    /// Per-phase response spectrum over the field ramp (zeta in cycles per tesla).
    pub spectra: Vec<Spectrum>,
    /// Global maximum used to normalize the S(zeta) map.
    pub spectrum_max: f64,
    pub curve: SensitivityCurve,
}

impl SensitivityScan {
    /// `S(zeta)` normalized to the global maximum of the map.
    pub fn spectrum_table(&self) -> ResultTable {
        let mut t = ResultTable::new(["phi_rad", "zeta_per_t", "s_norm"]);
        t.meta("normalization", "global maximum")
            .meta("window", "hann")
            .meta("padding", analysis::PADDING);
        for (phi, s) in self.curve.phi.iter().zip(&self.spectra) {
            for (z, m) in s.coords.iter().zip(&s.magnitudes) {
                t.push_row(vec![
                    Cell::Float(*phi),
                    Cell::Float(*z),
                    Cell::Float(m / self.spectrum_max),
                ]);
            }
        }
        t
    }

    pub fn curve_table(&self) -> ResultTable {
        let mut t = ResultTable::new(["phi_rad", "zeta_per_t", "beta", "abs_sin_phi", "residual"]);
        t.meta("r_squared", self.curve.r_squared)
            .meta("max_residual", self.curve.max_residual());
        for i in 0..self.curve.phi.len() {
            let phi = self.curve.phi[i];
            t.push_row(vec![
                Cell::Float(phi),
                Cell::Float(self.curve.zeta[i]),
                Cell::Float(self.curve.beta[i]),
                Cell::Float(phi.sin().abs()),
                Cell::Float(self.curve.residuals[i]),
            ]);
        }
        t
    }
}

/// P0 map over phases and a uniform field ramp, with per-phase spectra and beta(phi).
pub fn run_sensitivity_scan(
    setup: &Setup,
    phis: &[f64],
    fields: &[f64],
    n_units: usize,
) -> Result<SensitivityScan> {
    analysis::uniform_step(fields)?;
    let map = run_p0_map(setup, phis, fields, n_units)?;
    let spectra = map
        .p0
        .iter()
        .map(|row| analysis::response_spectrum(fields, row))
        .collect::<Result<Vec<_>>>()?;
    let spectrum_max = spectra
        .iter()
        .flat_map(|s| s.magnitudes.iter())
        .fold(0.0, |m: f64, &v| m.max(v));
    let curve = analysis::sensitivity_curve(phis, &map.p0, fields)?;
    Ok(SensitivityScan {
        map,
        spectra,
        spectrum_max: spectrum_max.max(f64::MIN_POSITIVE),
        curve,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrRamp {
    pub sweep: SweepResult,
    /// Accumulated rotation angle recovered from each row.
    pub unwrapped: Vec<Vec<f64>>,
}

impl DrRamp {
    /// Number of full P0 oscillations over the ramp, per field.
    pub fn oscillation_counts(&self) -> Vec<f64> {
        self.unwrapped
            .iter()
            .map(|u| u.last().copied().unwrap_or(0.0) / TAU)
            .collect()
    }
}

/// Linear-regime oscillation count `8 N eps beta / (pi rabi)` for a fixed field.
pub fn predicted_oscillations(setup: &Setup, n_units: usize, b_rf: f64, beta: f64) -> f64 {
    let eps = (setup.spin.gamma_nv * b_rf).abs();
    8.0 * n_units as f64 * eps * beta / (PI * setup.rabi)
}

/// Recovers a monotone accumulated angle from `P0 = (1 + cos a) / 2`.
///
/// The folded angle `arccos(2 P0 - 1)` is continued branch by branch. Among
/// the candidates not below the previous angle, the one closest to an
/// extrapolation with the mean slope so far wins. Requiring monotonicity keeps
/// the unwrap on track where contrast falls slightly short of full.
pub fn unwrap_population(p0: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(p0.len());
    for (i, &p) in p0.iter().enumerate() {
        let a = (2.0 * p - 1.0).clamp(-1.0, 1.0).acos();
        let (floor, guess) = match i {
            0 => (0.0, 0.0),
            1 => (out[0], out[0]),
            _ => (
                out[i - 1],
                out[i - 1] + ((out[i - 1] - out[0]) / (i - 1) as f64).max(0.0),
            ),
        };
        let m = (guess / TAU).floor();
        let mut best = f64::INFINITY;
        for k in [m - 1.0, m, m + 1.0, m + 2.0] {
            for c in [k * TAU + a, (k + 1.0) * TAU - a] {
                if c >= floor && (c - guess).abs() < (best - guess).abs() {
                    best = c;
                }
            }
        }
        out.push(best);
    }
    out
}

/// P0 versus a sensitivity schedule for each fixed field.
pub fn run_dr_ramp(
    setup: &Setup,
    schedule: &[f64],
    fields: &[f64],
    n_units: usize,
) -> Result<DrRamp> {
    non_empty("beta_k", schedule)?;
    non_empty("b_rf", fields)?;
    if schedule[0] != 0.0 {
        return Err(invalid("beta_k", "schedule must start at zero sensitivity"));
    }
    let programs = schedule
        .iter()
        .map(|&b| build_dysco(n_units, phase_for_sensitivity(b)?, setup.rabi))
        .collect::<Result<Vec<_>>>()?;
    let p0 = fields
        .par_iter()
        .map(|&b| {
            programs
                .iter()
                .map(|p| constant_field_p0(setup, p, b))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let unwrapped = p0.iter().map(|row| unwrap_population(row)).collect();
    Ok(DrRamp {
        sweep: SweepResult {
            axis1: Axis::new("b_rf_t", fields.to_vec()),
            axis2: Axis::new("beta_k", schedule.to_vec()),
            p0,
            meta: SweepMeta {
                rabi: setup.rabi,
                n_units,
                seed: 0,
                shots: 1,
                substeps: setup.substeps,
            },
        },
        unwrapped,
    })
}

/// Simulated dynamic range: high-sensitivity response over `fields_high`
/// against the lowest admitted sensitivity over `fields_low`.
pub fn run_dynamic_range(
    setup: &Setup,
    n_units: usize,
    phi_min: f64,
    fields_low: &[f64],
    fields_high: &[f64],
) -> Result<analysis::DynamicRange> {
    let low = run_p0_map(setup, &[phi_min], fields_low, n_units)?;
    let high = run_p0_map(setup, &[FRAC_PI_2], fields_high, n_units)?;
    analysis::dynamic_range((fields_low, &low.p0[0]), (fields_high, &high.p0[0]))
}

/// Sensitivity amplitudes `k / K` for `k = 1..=K`.
pub fn beta_steps(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrogramSpec {
    pub n_units: usize,
    pub beta_steps: usize,
    pub window: Window,
    pub shots: usize,
    pub seed: u64,
}

/// Spectrogram of `waveform` over a modulation-frequency grid.
///
/// Each cell runs a modulated sequence with sensitivity amplitude `beta_k`;
/// random waveforms are averaged over `spec.shots` draws.
pub fn run_spectrogram(
    setup: &Setup,
    f_s: &[f64],
    waveform: &Waveform,
    spec: &SpectrogramSpec,
) -> Result<Spectrogram> {
    non_empty("f_s", f_s)?;
    check_shots(spec.shots)?;
    if spec.beta_steps == 0 {
        return Err(invalid("beta_steps", "must be at least 1"));
    }
    waveform.validate()?;
    let t_n = dysco_total_time(spec.n_units, setup.rabi);
    for &f in f_s {
        check_bandwidth(f, setup.rabi, t_n).map_err(DyscoError::Bandwidth)?;
    }
    let shots = effective_shots(waveform, spec.shots);
    let reference = build_dysco(spec.n_units, 0.0, setup.rabi)?;
    let cache = ShotFields::new(
        waveform,
        &reference.sample_times(setup.substeps.max(1)),
        shots,
        spec.seed,
    );
    let betas = beta_steps(spec.beta_steps);
    let cells: Vec<(usize, usize)> = (0..betas.len())
        .flat_map(|k| (0..f_s.len()).map(move |j| (k, j)))
        .collect();
    let estimates = cells
        .par_iter()
        .map(|&(k, j)| {
            let prog =
                build_dysco_modulated(spec.n_units, f_s[j], betas[k], spec.window, setup.rabi)?;
            cache.estimate(setup, &prog)
        })
        .collect::<Result<Vec<_>>>()?;
    let cols = f_s.len();
    let p0 = estimates
        .chunks(cols)
        .map(|r| r.iter().map(|e| e.mean).collect())
        .collect();
    let stderr = estimates
        .chunks(cols)
        .map(|r| r.iter().map(|e| e.stderr).collect())
        .collect();
    Ok(Spectrogram {
        f_s: f_s.to_vec(),
        beta_k: betas,
        p0,
        stderr,
        shots,
        n_units: spec.n_units,
        seed: spec.seed,
    })
}

/// Spectrogram of a classical spin bath plus optional extra signals.
pub fn run_noise_spectrum(
    setup: &Setup,
    f_s: &[f64],
    bath: &BathSurrogate,
    extra: &Waveform,
    spec: &SpectrogramSpec,
) -> Result<Spectrogram> {
    let w = Waveform::bath(bath.clone()).multiplex(extra)?;
    run_spectrogram(setup, f_s, &w, spec)
}

/// Bloch-vector trajectory of one shot, tagged by pulse index.
pub fn run_trace(
    setup: &Setup,
    program: &PulseProgram,
    waveform: &Waveform,
    shot: &ShotContext,
) -> Result<Vec<TracePoint>> {
    program.validate().map_err(DyscoError::InvalidProgram)?;
    let (_, trace) = propagate_traced(
        SpinState::ground(),
        program,
        waveform,
        shot,
        setup.substeps,
        &setup.spin,
    )?;
    Ok(trace)
}

pub fn trace_table(trace: &[TracePoint]) -> ResultTable {
    let mut t = ResultTable::new(["t_s", "pulse_index", "x", "y", "z"]);
    for p in trace {
        t.push_row(vec![
            Cell::Float(p.t),
            Cell::Int(p.pulse_index as i64),
            Cell::Float(p.bloch[0]),
            Cell::Float(p.bloch[1]),
            Cell::Float(p.bloch[2]),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Hahn,
    Xy8 { reps: usize },
}

/// Conventional sequence versus a fixed-phase DYSCO sequence of similar length.
///
/// Row 0 of the result is the baseline, row 1 is DYSCO; columns are total
/// interrogation times of the baseline.
pub fn run_baseline_comparison(
    setup: &Setup,
    baseline: Baseline,
    taus: &[f64],
    dysco_phi: f64,
    waveform: &Waveform,
    shots: usize,
    seed: u64,
) -> Result<SweepResult> {
    non_empty("tau", taus)?;
    check_shots(shots)?;
    let programs = taus
        .iter()
        .map(|&tau| {
            let base = match baseline {
                Baseline::Hahn => build_hahn_echo(tau, setup.rabi, true)?,
                Baseline::Xy8 { reps } => build_xy8(reps, tau, setup.rabi)?,
            };
            let n = units_for_duration(base.total_time, setup.rabi);
            let dysco = build_dysco(n, dysco_phi, setup.rabi)?;
            Ok((base, dysco))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = programs
        .par_iter()
        .map(|(b, d)| {
            Ok((
                monte_carlo_p0(setup, b, waveform, shots, seed)?.mean,
                monte_carlo_p0(setup, d, waveform, shots, seed)?.mean,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let times: Vec<f64> = programs.iter().map(|(b, _)| b.total_time).collect();
    Ok(SweepResult {
        axis1: Axis::new("sequence", vec![0.0, 1.0]),
        axis2: Axis::new("total_time_s", times),
        p0: vec![
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
        ],
        meta: SweepMeta {
            rabi: setup.rabi,
            n_units: programs.last().map(|(_, d)| d.n_units).unwrap_or(0),
            seed,
            shots: effective_shots(waveform, shots),
            substeps: setup.substeps,
        },
    })
}
