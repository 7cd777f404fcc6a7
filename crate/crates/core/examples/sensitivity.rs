//! Recovers beta(phi) from the oscillation frequency of P0 along a field ramp.

use std::f64::consts::PI;

use dysco::config::linspace;
use dysco::experiments::{run_sensitivity_scan, Setup};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let phis = linspace(0.0, PI, 10);
    let fields = linspace(0.0, 6e-5, 256);
    let scan = run_sensitivity_scan(&setup, &phis, &fields, 20)?;
    let c = &scan.curve;
    println!("{:>8} {:>8} {:>10}", "phi", "beta", "|sin phi|");
    for i in 0..c.phi.len() {
        println!(
            "{:>8.3} {:>8.4} {:>10.4}",
            c.phi[i],
            c.beta[i],
            c.phi[i].sin().abs()
        );
    }
    println!("R^2 against |sin phi|: {:.5}", c.r_squared);
    Ok(())
}
