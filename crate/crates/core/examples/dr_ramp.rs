//! Ramps beta from 0 to 1 at fixed fields and counts P0 oscillations.

use dysco::analysis::theoretical_dr_bound;
use dysco::config::linspace;
use dysco::constants::T_DYSCO;
use dysco::experiments::{predicted_oscillations, run_dr_ramp, run_dynamic_range, Setup};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let n = 200;
    let fields: Vec<f64> = [1e-3, 3e-3, 1e-2]
        .iter()
        .map(|&e| setup.field_for(e))
        .collect();
    let ramp = run_dr_ramp(&setup, &linspace(0.0, 1.0, 512), &fields, n)?;
    for (b, count) in fields.iter().zip(ramp.oscillation_counts()) {
        let predicted = predicted_oscillations(&setup, n, *b, 1.0);
        println!(
            "B = {:.3e} T: {count:.3} oscillations (linear law {predicted:.3})",
            b
        );
    }
    let beta_min: f64 = 0.05;
    let dr = run_dynamic_range(
        &setup,
        n,
        beta_min.asin(),
        &linspace(0.0, setup.field_for(0.08), 801),
        &linspace(0.0, setup.field_for(0.004), 801),
    )?;
    println!("dynamic range at beta_min = {beta_min}: {:.1}", dr.ratio);
    println!(
        "bound at T = {T_DYSCO} s: {:.0}",
        theoretical_dr_bound(setup.rabi, T_DYSCO)
    );
    Ok(())
}
