//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dysco::analysis::{
    dominant_component, filter_function, response_spectrum, theoretical_dr_bound,
};
use dysco::config::{parse_config, stepped};
use dysco::constants::{c13_larmor_hz, GAMMA_NV, RABI_REFERENCE, T_DYSCO};
use dysco::experiments::{
    run_dr_ramp, run_noise_spectrum, run_p0_map, run_sensitivity_scan, run_spectrogram, Setup,
    Spectrogram, SpectrogramSpec,
};
use dysco::pulse::{
    build_dysco, build_dysco_modulated, build_xy8, dysco_total_time, units_for_duration, Window,
};
use dysco::scenario::run_scenario;
use dysco::signal::{draw_shot, BathSurrogate, ShotPhaseMode, Tone, Waveform};
use dysco::spin::{rotation, EffectiveField, SpinState};
use dysco::{propagate, SpinParams};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Field in tesla giving longitudinal rate `eps_over_rabi * rabi`.
fn field(eps_over_rabi: f64) -> f64 {
    eps_over_rabi * RABI_REFERENCE / GAMMA_NV.abs()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn r_squared_line(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Five times the median `1 - P0` over cells whose f_s lies outside every excluded band.
fn cell_threshold(s: &Spectrogram, exclude: &[(f64, f64)]) -> f64 {
    let mut cells = Vec::new();
    for (j, f) in s.f_s.iter().enumerate() {
        if exclude.iter().all(|&(c, half)| (f - c).abs() > half) {
            cells.extend(s.p0.iter().map(|row| 1.0 - row[j]));
        }
    }
    5.0 * median(cells)
}

fn local_maxima(v: &[f64], floor: f64) -> Vec<usize> {
    (0..v.len())
        .filter(|&j| {
            let left = if j == 0 { f64::MIN } else { v[j - 1] };
            let right = if j + 1 == v.len() { f64::MIN } else { v[j + 1] };
            v[j] > floor && v[j] > left && v[j] >= right
        })
        .collect()
}

fn zero_field_identity() -> Outcome {
    let w = Waveform::zero();
    let shot = draw_shot(&w, 0, 0);
    let mut worst: f64 = 0.0;
    for n in [1, 5, 20, 100] {
        for phi in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2, PI] {
            let prog = build_dysco(n, phi, RABI_REFERENCE).unwrap();
            let s = propagate(
                SpinState::ground(),
                &prog,
                &w,
                &shot,
                4,
                &SpinParams::default(),
            )
            .unwrap();
            worst = worst.max((s.p0() - 1.0).abs());
        }
    }
    outcome(worst < 1e-9, format!("max |P0 - 1| = {worst:.2e}"))
}

fn sensitivity_law() -> Outcome {
    let setup = Setup {
        substeps: 1,
        ..Setup::default()
    };
    let phis = linspace(0.0, PI, 19);
    let fields = linspace(0.0, field(0.15), 256);
    let scan = run_sensitivity_scan(&setup, &phis, &fields, 40).unwrap();
    let c = &scan.curve;
    let ends_zero = c.beta[0] == 0.0 && c.beta[18] == 0.0;
    let mid = c.beta[9];
    let pi6 = c.beta[3];
    outcome(
        c.r_squared > 0.99 && c.max_residual() < 0.05 && ends_zero,
        format!(
            "R^2 = {:.5}, max residual = {:.4}, beta(pi/6) = {pi6:.4}, beta(pi/2) = {mid:.3}, beta(0) = {}, beta(pi) = {}",
            c.r_squared,
            c.max_residual(),
            c.beta[0],
            c.beta[18]
        ),
    )
}

fn linear_regime() -> Outcome {
    let setup = Setup {
        substeps: 1,
        ..Setup::default()
    };
    let fields = linspace(0.0, field(0.25), 1024);
    let mut zetas = Vec::new();
    let mut worst_secondary: f64 = 0.0;
    for n in [50, 100, 200] {
        let map = run_p0_map(&setup, &[FRAC_PI_2], &fields, n).unwrap();
        let s = response_spectrum(&fields, &map.p0[0]).unwrap();
        let main = dominant_component(&s).unwrap();
        let guard = 3.0 * s.resolution;
        let secondary = (1..s.magnitudes.len() - 1)
            .filter(|&k| {
                let z = s.coords[k];
                z > 2.0 * s.resolution
                    && (z - main.coord).abs() > guard
                    && s.magnitudes[k] >= s.magnitudes[k - 1]
                    && s.magnitudes[k] >= s.magnitudes[k + 1]
            })
            .map(|k| s.magnitudes[k])
            .fold(0.0, f64::max);
        worst_secondary = worst_secondary.max(secondary / main.magnitude);
        zetas.push(main.coord);
    }
    let ns = [50.0, 100.0, 200.0];
    let r2 = r_squared_line(&ns, &zetas);
    // Oracle: P0 = cos^2(eps t_N beta / pi) oscillates 8 N / (pi rabi) times per unit eps.
    let expected: Vec<f64> = ns
        .iter()
        .map(|n| 8.0 * n * GAMMA_NV.abs() / (PI * RABI_REFERENCE))
        .collect();
    let ratio: Vec<f64> = zetas.iter().zip(&expected).map(|(z, e)| z / e).collect();
    outcome(
        r2 > 0.999 && worst_secondary < 0.10,
        format!("R^2 = {r2:.6}, zeta/zeta_linear = {ratio:.3?}, max secondary/primary = {worst_secondary:.4}"),
    )
}

/// Unwraps `P0 = (1 + cos a) / 2` along a monotone ramp by continuity.
fn oracle_unwrap(p0: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut prev = (2.0 * p0[0] - 1.0).clamp(-1.0, 1.0).acos();
    let mut branch_up = true;
    for &p in &p0[1..] {
        let a = (2.0 * p - 1.0).clamp(-1.0, 1.0).acos();
        // acos folds the angle into [0, pi]; the direction flips at either end.
        let step = if branch_up { a - prev } else { prev - a };
        if step < 0.0 {
            branch_up = !branch_up;
        }
        total += (a - prev).abs();
        prev = a;
    }
    total
}

fn dynamic_range() -> Outcome {
    let bound = theoretical_dr_bound(RABI_REFERENCE, T_DYSCO);
    let bound_ok = (bound - 4.7e3).abs() <= 0.1e3 && (bound - 5e3).abs() <= 0.15 * 5e3;
    let setup = Setup {
        substeps: 1,
        ..Setup::default()
    };
    let n = 200;
    let eps = [1.25e-5, 1.25e-4, 1.25e-3, 1.25e-2];
    let fields: Vec<f64> = eps.iter().map(|&e| field(e)).collect();
    let schedule = linspace(0.0, 1.0, 2048);
    let r = run_dr_ramp(&setup, &schedule, &fields, n).unwrap();
    let mut worst: f64 = 0.0;
    let mut report = Vec::new();
    for (i, e) in eps.iter().enumerate() {
        let predicted = 8.0 * n as f64 * e / PI;
        let lib = r.oscillation_counts()[i];
        let oracle = oracle_unwrap(&r.sweep.p0[i]) / TAU;
        worst = worst
            .max((lib - predicted).abs() / predicted)
            .max((oracle - predicted).abs() / predicted);
        report.push(format!("{lib:.4}/{oracle:.4}/{predicted:.4}"));
    }
    outcome(
        bound_ok && worst < 0.05,
        format!(
            "bound = {bound:.1}; oscillations lib/oracle/linear = [{}]; max rel err = {worst:.4}",
            report.join(", ")
        ),
    )
}

fn spectrogram_1khz(waveform: &Waveform, f_s: &[f64]) -> Spectrogram {
    let setup = Setup::default();
    let n = units_for_duration(1e-3, RABI_REFERENCE);
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 8,
        window: Window::Rectangular,
        shots: 1,
        seed: 0,
    };
    run_spectrogram(&setup, f_s, waveform, &spec).unwrap()
}

/// Filter function of XY8 from its own toggling function.
fn xy8_filter(reps: usize, tau: f64, f: f64) -> f64 {
    let t_pi = PI / RABI_REFERENCE;
    let total = 8.0 * reps as f64 * tau + t_pi;
    let dt = t_pi / 16.0;
    let steps = (total / dt).ceil() as usize;
    let w = TAU * f;
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..steps {
        let t = (j as f64 + 0.5) * dt;
        // pi pulse centers at t_pi/2 + tau (k + 1/2), sign flips at each center
        let s = t - 0.5 * t_pi;
        let g = if s <= 0.0 || s >= 8.0 * reps as f64 * tau {
            0.0
        } else {
            let k = (s / tau + 0.5).floor() as i64;
            if k % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        acc += C64::from_polar(g * dt, w * t);
    }
    0.5 * w * w * acc.norm_sqr()
}

fn harmonic_free() -> Outcome {
    let f0 = 8e3;
    let amp = TAU * 1.25e3 / GAMMA_NV.abs();
    let w = Waveform::tone(amp, f0, -FRAC_PI_2);
    let grid = stepped(1e3, 32e3, 1e3);
    let s = spectrogram_1khz(&w, &grid);
    let resp = s.column_response();
    let peak = resp[s.column_of(f0)];
    let argmax = (0..resp.len())
        .max_by(|&a, &b| resp[a].total_cmp(&resp[b]))
        .unwrap();
    let worst = [2e3, 4e3, 16e3, 24e3, 32e3]
        .iter()
        .map(|&f| resp[s.column_of(f)] / peak)
        .fold(0.0, f64::max);
    // XY8-2 with 1/(2 tau) = 8 kHz on the same frequency grid.
    let tau = 1.0 / (2.0 * f0);
    let prog = build_xy8(2, tau, RABI_REFERENCE).unwrap();
    let g = prog.sensitivity_function(PI / RABI_REFERENCE / 16.0);
    let ff = filter_function(&g, &[TAU * f0, TAU * 3.0 * f0]);
    let lib_ratio = ff.values[1] / ff.values[0];
    let oracle_ratio = xy8_filter(2, tau, 3.0 * f0) / xy8_filter(2, tau, f0);
    let ok = s.f_s[argmax] == f0
        && worst < 0.05
        && lib_ratio > 0.03
        && (lib_ratio - oracle_ratio).abs() < 0.01 * oracle_ratio;
    outcome(
        ok,
        format!(
            "peak at {:.0} Hz (1-P0 = {peak:.3}), max harmonic ratio = {worst:.4}; XY8 F(24k)/F(8k) = {lib_ratio:.3} (oracle {oracle_ratio:.3})",
            s.f_s[argmax]
        ),
    )
}

fn multiplexing() -> Outcome {
    let freqs = [2e3, 4e3, 5e3, 6e3, 7e3, 9e3];
    let amp = TAU * 1.0e3 / GAMMA_NV.abs();
    let w = Waveform::tones(freqs.iter().map(|&f| Tone::new(amp, f, -FRAC_PI_2)));
    let grid = stepped(1e3, 10e3, 0.5e3);
    let s = spectrogram_1khz(&w, &grid);
    let resp = s.column_response();
    let top = resp.iter().fold(0.0, |m: f64, &v| m.max(v));
    let maxima: Vec<f64> = local_maxima(&resp, 0.2 * top)
        .iter()
        .map(|&j| s.f_s[j])
        .collect();
    outcome(maxima == freqs, format!("local maxima at {maxima:?} Hz"))
}

fn incoherent_limit() -> Outcome {
    let setup = Setup::default();
    let n = units_for_duration(100e-6, RABI_REFERENCE);
    let f0 = 100e3;
    let t_n = dysco_total_time(n, RABI_REFERENCE);
    // Accumulated angle at beta = 1 about 30 rad: deep in the incoherent regime.
    let amp = 30.0 * PI / (t_n * GAMMA_NV.abs());
    let w = Waveform::tone(amp, f0, 0.0).with_mode(ShotPhaseMode::Random);
    let grid = stepped(10e3, 300e3, 10e3);
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 10,
        window: Window::Rectangular,
        shots: 200,
        seed: 2024,
    };
    let s = run_spectrogram(&setup, &grid, &w, &spec).unwrap();
    let col = s.column_of(f0);
    let rows: Vec<usize> = (0..s.beta_k.len())
        .filter(|&k| s.beta_k[k] >= 0.5)
        .collect();
    let plateau = rows.iter().map(|&k| s.p0[k][col]).sum::<f64>() / rows.len() as f64;
    let resp = s.column_response();
    let threshold = cell_threshold(&s, &[(f0, 15e3)]);
    let harmonic_values: Vec<f64> = [50e3, 200e3, 300e3]
        .iter()
        .map(|&f| resp[s.column_of(f)])
        .collect();
    let harmonics: Vec<String> = harmonic_values.iter().map(|v| format!("{v:.2e}")).collect();
    let clean = harmonic_values.iter().all(|&v| v <= threshold);
    outcome(
        (plateau - 0.5).abs() <= 0.02 && clean,
        format!("plateau P0 = {plateau:.4}; threshold = {threshold:.2e}; responses at 50/200/300 kHz = {harmonics:?}"),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fail"
    }
}

fn bands_above(resp: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, &v) in resp.iter().enumerate() {
        match (v > threshold, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                out.push((s, j - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, resp.len() - 1));
    }
    out
}

fn bath_spectroscopy() -> Outcome {
    let setup = Setup::default();
    let center = c13_larmor_hz();
    let n = units_for_duration(100e-6, RABI_REFERENCE);
    let t_n = dysco_total_time(n, RABI_REFERENCE);
    let rms = 2.0 * PI / (t_n * GAMMA_NV.abs());
    let bath = BathSurrogate::new(center, 10e3, 16, rms);
    let grid = stepped(10e3, 1000e3, 10e3);
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 2,
        window: Window::Rectangular,
        shots: 100,
        seed: 77,
    };

    let a = run_noise_spectrum(&setup, &grid, &bath, &Waveform::zero(), &spec).unwrap();
    let ra = a.column_response();
    let peak_a = (0..ra.len())
        .max_by(|&x, &y| ra[x].total_cmp(&ra[y]))
        .unwrap();
    let thr_a = cell_threshold(&a, &[(center, 40e3)]);
    let bands_a = bands_above(&ra, thr_a);
    let band_list: Vec<String> = bands_a
        .iter()
        .map(|&(s, e)| format!("{:.0}-{:.0}", a.f_s[s] / 1e3, a.f_s[e] / 1e3))
        .collect();
    let artefacts: Vec<f64> = [100e3, 215e3, 860e3]
        .iter()
        .map(|&f| ra[a.column_of(f)])
        .collect();
    let artefact_text: Vec<String> = artefacts.iter().map(|v| format!("{v:.1e}")).collect();
    let ok_a = (a.f_s[peak_a] - 430e3).abs() <= 10e3
        && bands_a.len() == 1
        && artefacts.iter().all(|&v| v <= thr_a);

    let tone = Waveform::tone(rms, 100e3, 0.0).with_mode(ShotPhaseMode::Random);
    let b = run_noise_spectrum(&setup, &grid, &bath, &tone, &spec).unwrap();
    let rb = b.column_response();
    let thr_b = cell_threshold(&b, &[(center, 40e3), (100e3, 15e3)]);
    let bands_b = bands_above(&rb, thr_b);
    let centers_b: Vec<f64> = bands_b
        .iter()
        .map(|&(s, e)| {
            (s..=e)
                .max_by(|&x, &y| rb[x].total_cmp(&rb[y]))
                .map(|j| b.f_s[j])
                .unwrap()
        })
        .collect();
    let shift = (rb[peak_a] - ra[peak_a]).abs() / ra[peak_a];
    let ok_b = centers_b.len() == 2
        && (centers_b[0] - 100e3).abs() <= 10e3
        && (centers_b[1] - 430e3).abs() <= 10e3
        && shift < 0.1;

    let n_fine = units_for_duration(200e-6, RABI_REFERENCE);
    let t_fine = dysco_total_time(n_fine, RABI_REFERENCE);
    let pair_amp = 1.5 * PI / (t_fine * GAMMA_NV.abs());
    let pair = BathSurrogate::new(center, 2e3, 8, 0.3 * pair_amp).with_coupled_spin(30e3, pair_amp);
    let fine = stepped(380e3, 500e3, 5e3);
    let spec_c = SpectrogramSpec {
        n_units: n_fine,
        ..spec
    };
    let c = run_noise_spectrum(&setup, &fine, &pair, &Waveform::zero(), &spec_c).unwrap();
    let rc = c.column_response();
    let top = rc.iter().fold(0.0, |m: f64, &v| m.max(v));
    let maxima: Vec<f64> = local_maxima(&rc, 0.5 * top)
        .iter()
        .map(|&j| c.f_s[j])
        .collect();
    let lo = center - 15e3;
    let hi = center + 15e3;
    let ok_c = maxima.iter().any(|f| (f - lo).abs() <= 5e3)
        && maxima.iter().any(|f| (f - hi).abs() <= 5e3);

    outcome(
        ok_a && ok_b && ok_c,
        format!(
            "[a {} b {} c {}] bath peak {:.0} kHz, bands above threshold {:?} kHz, artefacts {:?} vs threshold {:.1e}; with 100 kHz tone lines at {:?} kHz, 430 kHz shift {:.3}; pair maxima {:?} kHz",
            verdict(ok_a),
            verdict(ok_b),
            verdict(ok_c),
            a.f_s[peak_a] / 1e3,
            band_list,
            artefact_text,
            thr_a,
            centers_b.iter().map(|f| f / 1e3).collect::<Vec<_>>(),
            shift,
            maxima.iter().map(|f| f / 1e3).collect::<Vec<_>>()
        ),
    )
}

/// Fourth-order Runge-Kutta for `d psi/dt = (i/2)(h . sigma) psi`.
fn rk4(h: EffectiveField, t: f64, psi: SpinState) -> SpinState {
    let f = |a: C64, b: C64| {
        let i = C64::i();
        (
            i * 0.5 * (h.hz * a + C64::new(h.hx, -h.hy) * b),
            i * 0.5 * (C64::new(h.hx, h.hy) * a - h.hz * b),
        )
    };
    let mag = (h.hx * h.hx + h.hy * h.hy + h.hz * h.hz).sqrt();
    let dt_max = 1e-4 * TAU / mag.max(1e-300);
    let steps = (t / dt_max).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let (mut a, mut b) = (psi.amp0, psi.ampm);
    for _ in 0..steps {
        let (k1a, k1b) = f(a, b);
        let (k2a, k2b) = f(a + k1a * (dt / 2.0), b + k1b * (dt / 2.0));
        let (k3a, k3b) = f(a + k2a * (dt / 2.0), b + k2b * (dt / 2.0));
        let (k4a, k4b) = f(a + k3a * dt, b + k3b * dt);
        a += (k1a + k2a * 2.0 + k3a * 2.0 + k4a) * (dt / 6.0);
        b += (k1b + k2b * 2.0 + k3b * 2.0 + k4b) * (dt / 6.0);
    }
    SpinState { amp0: a, ampm: b }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let h = EffectiveField {
            hx: rng.random_range(-2.0..2.0),
            hy: rng.random_range(-2.0..2.0),
            hz: rng.random_range(-2.0..2.0),
        };
        let t = rng.random_range(0.0..4.0);
        let theta = rng.random_range(0.0..PI);
        let varphi = rng.random_range(0.0..TAU);
        let psi = SpinState {
            amp0: C64::new((theta / 2.0).cos(), 0.0),
            ampm: C64::from_polar((theta / 2.0).sin(), varphi),
        };
        let exact = rotation(h, t).apply(&psi);
        let num = rk4(h, t, psi);
        worst = worst.max(1.0 - exact.fidelity(&num));
    }
    // Substep convergence on the time-dependent waveforms of the spectroscopy criteria.
    let params = SpinParams::default();
    let mut delta: f64 = 0.0;
    let coarse = Setup::default().substeps;
    let n_fast = units_for_duration(100e-6, RABI_REFERENCE);
    let t_fast = dysco_total_time(n_fast, RABI_REFERENCE);
    let n_slow = units_for_duration(1e-3, RABI_REFERENCE);
    let cases = [
        (
            build_dysco(20, FRAC_PI_6, RABI_REFERENCE).unwrap(),
            Waveform::constant(field(0.01)),
        ),
        (
            build_dysco_modulated(n_slow, 8e3, 1.0, Window::Rectangular, RABI_REFERENCE).unwrap(),
            Waveform::tone(TAU * 1.25e3 / GAMMA_NV.abs(), 8e3, -FRAC_PI_2),
        ),
        (
            build_dysco_modulated(n_fast, 100e3, 1.0, Window::Rectangular, RABI_REFERENCE).unwrap(),
            Waveform::tone(30.0 * PI / (t_fast * GAMMA_NV.abs()), 100e3, 0.0)
                .with_mode(ShotPhaseMode::Random),
        ),
        (
            build_dysco_modulated(n_fast, 430e3, 1.0, Window::Rectangular, RABI_REFERENCE).unwrap(),
            Waveform::bath(BathSurrogate::new(
                c13_larmor_hz(),
                10e3,
                16,
                2.0 * PI / (t_fast * GAMMA_NV.abs()),
            )),
        ),
    ];
    for (prog, w) in &cases {
        let shot = draw_shot(w, 5, 0);
        let a = propagate(SpinState::ground(), prog, w, &shot, coarse, &params)
            .unwrap()
            .p0();
        let b = propagate(SpinState::ground(), prog, w, &shot, 8 * coarse, &params)
            .unwrap()
            .p0();
        delta = delta.max((a - b).abs());
    }
    outcome(
        worst < 1e-10 && delta < 1e-6,
        format!(
            "max infidelity = {worst:.2e}; max |dP0| {coarse} vs {} substeps = {delta:.2e}",
            8 * coarse
        ),
    )
}

fn determinism() -> Outcome {
    let text = r#"
experiment = "noise-spectrum"
seed = 31337
shots = 100
[sequence]
n_units = 60
beta_steps = 2
[grid]
f_s_start_hz = 100e3
f_s_stop_hz = 600e3
f_s_step_hz = 50e3
[waveform]
mode = "random"
[[waveform.tones]]
amplitude_t = 2e-7
frequency_hz = 1.5e5
[waveform.bath]
larmor_center_hz = 432.6e3
rms_amplitude_t = 3e-7
"#;
    let cfg = parse_config(text).unwrap();
    let render = |c| {
        run_scenario(c)
            .unwrap()
            .iter()
            .map(|t| t.table.render())
            .collect::<Vec<_>>()
            .concat()
    };
    let a = render(&cfg);
    let b = render(&cfg);
    let mut other = cfg.clone();
    other.seed += 1;
    let c = render(&other);
    outcome(
        a == b && a != c,
        format!(
            "{} bytes identical across reruns; different seed differs: {}",
            a.len(),
            a != c
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "1 zero-field identity",
            zero_field_identity,
            Duration::from_secs(5),
        ),
        (
            "2 sensitivity law",
            sensitivity_law,
            Duration::from_secs(120),
        ),
        (
            "3 linear small-field regime",
            linear_regime,
            Duration::from_secs(180),
        ),
        ("4 dynamic range", dynamic_range, Duration::from_secs(120)),
        (
            "5 harmonic-free sensing",
            harmonic_free,
            Duration::from_secs(300),
        ),
        ("6 multiplexing", multiplexing, Duration::from_secs(600)),
        (
            "7 incoherent limit",
            incoherent_limit,
            Duration::from_secs(600),
        ),
        (
            "8 bath spectroscopy",
            bath_spectroscopy,
            Duration::from_secs(1200),
        ),
        (
            "9 oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(120),
        ),
        ("10 determinism", determinism, Duration::from_secs(600)),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let ok = o.passed && elapsed <= budget;
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1} s of {} s]",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!(
        "acceptance summary: {} passed, {failed} failed",
        ran - failed
    );
    // Failures are reported above; a strict run also turns them into a failing exit status.
    if failed > 0 && std::env::var_os("DYSCO_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
