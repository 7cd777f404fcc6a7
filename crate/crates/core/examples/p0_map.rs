//! P0 versus control phase and static field for N = 20 units.

use std::f64::consts::FRAC_PI_2;

use dysco::config::linspace;
use dysco::experiments::{run_p0_map, Setup};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let phis = linspace(0.0, FRAC_PI_2, 5);
    let fields = linspace(0.0, setup.field_for(0.05), 11);
    let map = run_p0_map(&setup, &phis, &fields, 20)?;
    print!("phi \\ B/uT");
    for b in &fields {
        print!("{:>7.2}", b * 1e6);
    }
    println!();
    for (phi, row) in phis.iter().zip(&map.p0) {
        print!("{phi:>10.3}");
        for p in row {
            print!("{p:>7.3}");
        }
        println!();
    }
    Ok(())
}
