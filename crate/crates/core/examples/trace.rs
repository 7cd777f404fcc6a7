//! Bloch-vector trajectory through one DYSCO unit pair in a static field.

use std::f64::consts::FRAC_PI_6;

use dysco::experiments::{run_trace, Setup};
use dysco::{build_dysco, ShotContext, Waveform};

fn main() -> dysco::Result<()> {
    let setup = Setup {
        substeps: 4,
        ..Setup::default()
    };
    let prog = build_dysco(1, FRAC_PI_6, setup.rabi)?;
    let w = Waveform::constant(setup.field_for(0.05));
    let trace = run_trace(&setup, &prog, &w, &ShotContext::fixed(&w))?;
    for p in trace.iter().step_by(4) {
        let [x, y, z] = p.bloch;
        println!(
            "{:>8.4} us  pulse {:>2}  ({x:+.3}, {y:+.3}, {z:+.3})",
            p.t * 1e6,
            p.pulse_index
        );
    }
    Ok(())
}
