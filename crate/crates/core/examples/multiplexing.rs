//! Three tones at once: each appears as its own spectrogram column peak.

use std::f64::consts::{FRAC_PI_2, TAU};

use dysco::config::stepped;
use dysco::constants::GAMMA_NV;
use dysco::experiments::{run_spectrogram, Setup, SpectrogramSpec};
use dysco::pulse::{dysco_total_time, Window};
use dysco::{Tone, Waveform};

fn main() -> dysco::Result<()> {
    let setup = Setup::default();
    let n = 209;
    let amp = 0.4 * TAU / (dysco_total_time(n, setup.rabi) * GAMMA_NV.abs());
    let freqs = [120e3, 250e3, 400e3];
    let parts: Vec<Waveform> = freqs
        .iter()
        .map(|&f| Waveform::tones([Tone::new(amp, f, -FRAC_PI_2)]))
        .collect();
    let mut w = Waveform::zero();
    for p in &parts {
        w = w.multiplex(p)?;
    }
    let spec = SpectrogramSpec {
        n_units: n,
        beta_steps: 1,
        window: Window::Rectangular,
        shots: 1,
        seed: 0,
    };
    let s = run_spectrogram(&setup, &stepped(100e3, 420e3, 5e3), &w, &spec)?;
    let resp = s.column_response();
    for f in freqs {
        let j = s.column_of(f);
        println!("{:>4.0} kHz tone: response {:.4}", f / 1e3, resp[j]);
    }
    let quiet = resp
        .iter()
        .enumerate()
        .filter(|(j, _)| freqs.iter().all(|&f| (s.f_s[*j] - f).abs() > 20e3));
    let worst = quiet.fold(0.0, |m: f64, (_, &v)| m.max(v));
    println!("largest response more than 20 kHz from any tone: {worst:.4}");
    Ok(())
}
