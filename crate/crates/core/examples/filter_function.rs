//! Filter functions of DYSCO, Hahn echo and XY8 on a common frequency grid.

use std::f64::consts::{FRAC_PI_2, TAU};

use dysco::analysis::filter_function;
use dysco::config::linspace;
use dysco::constants::RABI_REFERENCE;
use dysco::pulse::{build_dysco_modulated, rabi_period, Window};
use dysco::{build_dysco, build_hahn_echo, build_xy8};

fn main() -> dysco::Result<()> {
    let rabi = RABI_REFERENCE;
    let programs = [
        ("dysco phi=pi/2", build_dysco(50, FRAC_PI_2, rabi)?),
        (
            "dysco f_s=300k",
            build_dysco_modulated(50, 300e3, 1.0, Window::Rectangular, rabi)?,
        ),
        ("hahn", build_hahn_echo(12e-6, rabi, true)?),
        ("xy8-4", build_xy8(4, 1.0 / (2.0 * 300e3), rabi)?),
    ];
    let omegas: Vec<f64> = linspace(0.0, 600e3, 13).iter().map(|f| TAU * f).collect();
    print!("{:>16}", "f/kHz");
    for w in &omegas {
        print!("{:>9.0}", w / TAU / 1e3);
    }
    println!();
    for (name, p) in &programs {
        let ff = filter_function(&p.sensitivity_function(rabi_period(rabi) / 16.0), &omegas);
        let peak = ff.values.iter().fold(f64::MIN_POSITIVE, |m, &v| m.max(v));
        print!("{name:>16}");
        for v in &ff.values {
            print!("{:>9.3}", v / peak);
        }
        println!();
    }
    Ok(())
}
