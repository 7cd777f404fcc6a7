//! Spectrogram of two phase-synchronized tones.

use std::f64::consts::{FRAC_PI_2, TAU};

use dysco::config::stepped;
use dysco::constants::GAMMA_NV;
use dysco::experiments::{run_spectrogram, Setup, SpectrogramSpec};
use dysco::pulse::{dysco_total_time, Window};
use dysco::{Tone, Waveform};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let n = 209;
    let amp = 0.5 * TAU / (dysco_total_time(n, setup.rabi) * GAMMA_NV.abs());
    let w = Waveform::tones([
        Tone::new(amp, 200e3, -FRAC_PI_2),
        Tone::new(amp, 220e3, -FRAC_PI_2),
    ]);
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 4,
        window: Window::Rectangular,
        shots: 1,
        seed: 0,
    };
    let s = run_spectrogram(&setup, &stepped(180e3, 240e3, 2e3), &w, &spec)?;
    for (f, r) in s.f_s.iter().zip(s.column_response()) {
        println!(
            "{:>7.0} kHz {:>7.4} {}",
            f / 1e3,
            r,
            "#".repeat((r * 60.0).round() as usize)
        );
    }
    Ok(())
}
