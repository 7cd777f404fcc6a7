//! Random-phase 13C bath surrogate with a resolved coupled pair.

use std::f64::consts::TAU;

use dysco::config::stepped;
use dysco::constants::{c13_larmor_hz, GAMMA_NV};
use dysco::experiments::{run_noise_spectrum, Setup, SpectrogramSpec};
use dysco::pulse::{dysco_total_time, Window};
use dysco::{BathSurrogate, Waveform};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let n = 209;
    let scale = TAU / (dysco_total_time(n, setup.rabi) * GAMMA_NV.abs());
    let larmor = c13_larmor_hz();
    let bath =
        BathSurrogate::new(larmor, 5e3, 16, 0.5 * scale).with_coupled_spin(60e3, 0.5 * scale);
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 1,
        window: Window::Rectangular,
        shots: 200,
        seed: 1,
    };
    let s = run_noise_spectrum(
        &setup,
        &stepped(380e3, 490e3, 5e3),
        &bath,
        &Waveform::zero(),
        &spec,
    )?;
    println!("Larmor {:.1} kHz", larmor / 1e3);
    for (j, (f, r)) in s.f_s.iter().zip(s.column_response()).enumerate() {
        println!("{:>6.0} kHz {:>7.4} +- {:.4}", f / 1e3, r, s.stderr[0][j]);
    }
    Ok(())
}
