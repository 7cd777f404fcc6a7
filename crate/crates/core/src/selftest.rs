//! Fast headless invariant suite.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{self, SensitivityFunction};
use crate::config::{emit_config, parse_config, ExperimentKind, ScenarioConfig};
use crate::constants::{RABI_REFERENCE, T_DYSCO};
use crate::propagate::{propagate, SpinParams};
use crate::pulse::build_dysco;
use crate::signal::{ShotContext, Waveform};
use crate::spin::{rotation, EffectiveField, SpinState};
use crate::table::{Cell, ResultTable};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn zero_field_identity() -> Check {
    let w = Waveform::zero();
    let shot = ShotContext::fixed(&w);
    let mut worst: f64 = 0.0;
    for n in [1, 5, 20] {
        for phi in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2, PI] {
            let prog = build_dysco(n, phi, RABI_REFERENCE).expect("valid arguments");
            let s = propagate(
                SpinState::ground(),
                &prog,
                &w,
                &shot,
                1,
                &SpinParams::default(),
            )
            .expect("valid program");
            worst = worst.max((s.p0() - 1.0).abs());
        }
    }
    check(
        "zero-field identity",
        worst < 1e-9,
        format!("max |P0 - 1| = {worst:e}"),
    )
}

fn rk4(field: EffectiveField, duration: f64, s: SpinState) -> SpinState {
    // d psi / dt = (i/2) (h . sigma) psi
    let deriv = |a: C64, b: C64| {
        let i = C64::i();
        let da = i * 0.5 * (field.hz * a + C64::new(field.hx, -field.hy) * b);
        let db = i * 0.5 * (C64::new(field.hx, field.hy) * a - field.hz * b);
        (da, db)
    };
    let mag = (field.hx * field.hx + field.hy * field.hy + field.hz * field.hz).sqrt();
    let steps = ((duration * mag / 1e-3).ceil() as usize).max(1);
    let h = duration / steps as f64;
    let (mut a, mut b) = (s.amp0, s.ampm);
    for _ in 0..steps {
        let (k1a, k1b) = deriv(a, b);
        let (k2a, k2b) = deriv(a + k1a * (h / 2.0), b + k1b * (h / 2.0));
        let (k3a, k3b) = deriv(a + k2a * (h / 2.0), b + k2b * (h / 2.0));
        let (k4a, k4b) = deriv(a + k3a * h, b + k3b * h);
        a += (k1a + k2a * 2.0 + k3a * 2.0 + k4a) * (h / 6.0);
        b += (k1b + k2b * 2.0 + k3b * 2.0 + k4b) * (h / 6.0);
    }
    SpinState { amp0: a, ampm: b }
}

fn closed_form_vs_integrator() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let field = EffectiveField {
            hx: rng.random_range(-1.0..1.0),
            hy: rng.random_range(-1.0..1.0),
            hz: rng.random_range(-1.0..1.0),
        };
        let t = rng.random_range(0.1..6.0);
        let exact = rotation(field, t).apply(&SpinState::ground());
        let num = rk4(field, t, SpinState::ground());
        worst = worst.max(1.0 - exact.fidelity(&num));
    }
    check(
        "closed form matches RK4",
        worst < 1e-10,
        format!("max infidelity = {worst:e}"),
    )
}

fn parseval() -> Check {
    let x: Vec<f64> = (0..257)
        .map(|i| ((i as f64) * 0.37).sin() + 0.1 * i as f64)
        .collect();
    let et: f64 = x.iter().map(|v| v * v).sum();
    let ef: f64 = analysis::dft(&x).iter().map(|c| c.norm_sqr()).sum::<f64>() / x.len() as f64;
    let rel = (et - ef).abs() / et;
    check(
        "Parseval",
        rel < 1e-9,
        format!("relative mismatch = {rel:e}"),
    )
}

fn filter_closed_form() -> Check {
    let t = 1e-4;
    let g = SensitivityFunction {
        values: vec![1.0; 20_000],
        dt: t / 20_000.0,
    };
    let omegas: Vec<f64> = (1..40).map(|k| k as f64 * 7.7e3).collect();
    let ff = analysis::filter_function(&g, &omegas);
    let worst = ff
        .omegas
        .iter()
        .zip(&ff.values)
        .map(|(w, v)| (v - 2.0 * (w * t / 2.0).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    check(
        "filter function of constant g",
        worst < 1e-6,
        format!("max deviation = {worst:e}"),
    )
}

fn dr_bound() -> Check {
    let b = analysis::theoretical_dr_bound(RABI_REFERENCE, T_DYSCO);
    check(
        "dynamic range bound",
        (b - 4.7e3).abs() <= 0.1e3,
        format!("bound = {b:.1}"),
    )
}

fn config_round_trip() -> Check {
    let mut cfg = ScenarioConfig::new(ExperimentKind::Map);
    cfg.grid.b_stop_t = Some(1e-4);
    cfg.grid.b_points = Some(16);
    cfg.seed = 12345;
    let ok = emit_config(&cfg)
        .ok()
        .and_then(|t| parse_config(&t).ok())
        .is_some_and(|back| back == cfg);
    check("config round trip", ok, String::new())
}

fn table_round_trip() -> Check {
    let mut t = ResultTable::new(["x", "y"]);
    for i in 0..10 {
        t.push_row(vec![Cell::Int(i), Cell::Float((i as f64).exp() / 3.0)]);
    }
    let ok = ResultTable::parse(&t.render()).is_ok_and(|back| back == t);
    check("table round trip", ok, String::new())
}

fn program_validation() -> Check {
    let ok = [1, 7, 40]
        .iter()
        .all(|&n| build_dysco(n, 0.9, RABI_REFERENCE).is_ok_and(|p| p.validate().is_ok()));
    check("built programs validate", ok, String::new())
}

/// Runs every check; all should pass on a healthy build.
pub fn run_selftest() -> Vec<Check> {
    vec![
        zero_field_identity(),
        closed_form_vs_integrator(),
        parseval(),
        filter_closed_form(),
        dr_bound(),
        config_round_trip(),
        table_round_trip(),
        program_validation(),
    ]
}
