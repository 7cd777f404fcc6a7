//! Hahn echo and XY8 against fixed-phase DYSCO of matching length, for a
//! static field and for a 50 kHz tone.

use std::f64::consts::FRAC_PI_2;

use dysco::config::linspace;
use dysco::experiments::{run_baseline_comparison, Baseline, Setup};
use dysco::Waveform;

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let taus = linspace(2e-6, 30e-6, 8);
    let signals = [
        ("static 0.3 uT", Waveform::constant(3e-7)),
        ("50 kHz 1 uT", Waveform::tone(1e-6, 50e3, 0.0)),
    ];
    for (label, w) in &signals {
        for (name, b) in [
            ("hahn", Baseline::Hahn),
            ("xy8-2", Baseline::Xy8 { reps: 2 }),
        ] {
            let r = run_baseline_comparison(&setup, b, &taus, FRAC_PI_2, w, 1, 0)?;
            println!("{label}, {name}: total time / us, P0 baseline, P0 dysco");
            for j in 0..taus.len() {
                println!(
                    "  {:>7.2} {:>7.4} {:>7.4}",
                    r.axis2.values[j] * 1e6,
                    r.p0[0][j],
                    r.p0[1][j]
                );
            }
        }
    }
    Ok(())
}
