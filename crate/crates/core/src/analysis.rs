//! Spectral analysis of simulated responses: response spectra, dynamical
//! sensitivity extraction, filter functions, coherence integrals and
//! dynamic range.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{invalid, DyscoError, Result};

/// Zero-padding factor applied before peak search.
pub const PADDING: usize = 8;

/// Detection threshold as a multiple of the median bin magnitude.
pub const DETECTION_FACTOR: f64 = 5.0;

/// Rows whose dominant magnitude is below this fraction of the map maximum read as beta = 0.
pub const MAGNITUDE_FLOOR: f64 = 0.05;

/// Instantaneous sensitivity g(t) sampled at midpoints `(j + 1/2) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityFunction {
    pub values: Vec<f64>,
    pub dt: f64,
}

impl SensitivityFunction {
    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dt
    }

    /// Continuous-transform approximation `sum_j g_j exp(i w t_j) dt`.
    pub fn transform(&self, omega: f64) -> C64 {
        let step = C64::from_polar(1.0, omega * self.dt);
        let mut phasor = C64::from_polar(1.0, 0.5 * omega * self.dt);
        let mut acc = C64::new(0.0, 0.0);
        // Re-anchor the recurrence periodically to bound phase drift.
        for (j, &g) in self.values.iter().enumerate() {
            if j % 4096 == 0 {
                phasor = C64::from_polar(1.0, omega * self.time(j));
            }
            acc += phasor * g;
            phasor *= step;
        }
        acc * self.dt
    }
}

/// Unnormalized forward DFT of a real series.
pub fn dft(x: &[f64]) -> Vec<C64> {
    let mut buf: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Conjugate coordinate of each bin, starting at 0 and strictly increasing.
    pub coords: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Width of one unpadded bin, `1 / (n dx)`.
    pub resolution: f64,
    /// Width of one zero-padded bin.
    pub bin_width: f64,
    /// Largest deviation of the input from its mean.
    pub scale: f64,
}

impl Spectrum {
    /// Magnitude at the bin nearest `coord`.
    pub fn magnitude_at(&self, coord: f64) -> f64 {
        let k = (coord / self.bin_width).round().max(0.0) as usize;
        self.magnitudes[k.min(self.magnitudes.len() - 1)]
    }
}

/// Checks that `x` is uniformly spaced and returns the step.
pub fn uniform_step(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(invalid("samples", "need at least two points"));
    }
    let dx = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if !(dx.abs() > 0.0) || !dx.is_finite() {
        return Err(DyscoError::NonUniformSampling { index: 1 });
    }
    for (i, w) in x.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > 1e-6 * dx.abs() {
            return Err(DyscoError::NonUniformSampling { index: i + 1 });
        }
    }
    Ok(dx)
}

/// Magnitude spectrum of `y(x)`: mean-subtracted, Hann-windowed, zero-padded.
///
/// Magnitudes are scaled so a harmonic `A cos(2 pi z x)` peaks near `A`.
pub fn response_spectrum(x: &[f64], y: &[f64]) -> Result<Spectrum> {
    if x.len() != y.len() {
        return Err(invalid("samples", "axis and values differ in length"));
    }
    if y.len() < 16 {
        return Err(invalid(
            "samples",
            format!("need at least 16 samples, got {}", y.len()),
        ));
    }
    let dx = uniform_step(x)?.abs();
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let w = hann(n);
    let wsum: f64 = w.iter().sum();
    let nfft = (n * PADDING).next_power_of_two();
    let mut buf = vec![0.0; nfft];
    for i in 0..n {
        buf[i] = (y[i] - mean) * w[i];
    }
    let spec = dft(&buf);
    // Deviations at rounding level count as a constant input.
    let spread = y.iter().fold(0.0, |m: f64, v| m.max((v - mean).abs()));
    let scale = if spread <= 1e-12 * y.iter().fold(0.0, |m: f64, v| m.max(v.abs())) {
        0.0
    } else {
        spread
    };
    let half = nfft / 2 + 1;
    let df = 1.0 / (nfft as f64 * dx);
    Ok(Spectrum {
        coords: (0..half).map(|k| k as f64 * df).collect(),
        magnitudes: spec[..half].iter().map(|c| 2.0 * c.norm() / wsum).collect(),
        resolution: 1.0 / (n as f64 * dx),
        bin_width: df,
        scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub coord: f64,
    pub magnitude: f64,
    /// Peak exceeds [`DETECTION_FACTOR`] times the median bin magnitude.
    pub detected: bool,
    pub threshold: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Strongest bin outside the DC lobe, refined by three-point parabolic interpolation.
pub fn dominant_component(spectrum: &Spectrum) -> Result<Component> {
    let bw = spectrum.bin_width;
    // The Hann main lobe around DC spans two unpadded bins.
    let first = (2.0 * spectrum.resolution / bw).ceil() as usize;
    let m = &spectrum.magnitudes;
    if m.len() < first + 3 || m.iter().any(|v| !v.is_finite()) {
        return Err(DyscoError::DegenerateSpectrum);
    }
    let band = &m[first..];
    let (rel, &peak) = band
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("band is non-empty");
    let k = first + rel;
    let threshold = DETECTION_FACTOR * median(&mut band.to_vec());
    let (mut coord, mut magnitude) = (k as f64 * bw, peak);
    if k > first && k + 1 < m.len() {
        let (a, b, c) = (m[k - 1], m[k], m[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            let delta = 0.5 * (a - c) / denom;
            coord = (k as f64 + delta) * bw;
            magnitude = b - 0.25 * (a - c) * delta;
        }
    }
    Ok(Component {
        coord,
        magnitude,
        detected: spectrum.scale > 0.0 && peak > threshold && peak > 1e-9 * spectrum.scale,
        threshold,
    })
}

/// Least-squares line `y = slope x + intercept` with its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("samples", "need at least two paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(invalid("samples", "x values are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub phi: Vec<f64>,
    /// Dominant conjugate coordinate per row; zero where no component is present.
    pub zeta: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// `zeta` normalized to its maximum.
    pub beta: Vec<f64>,
    /// `beta - |sin phi|`.
    pub residuals: Vec<f64>,
    /// Coefficient of determination of `beta = |sin phi|`.
    pub r_squared: f64,
}

impl SensitivityCurve {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Dynamical sensitivity per phase row of a P0 map sampled over a common ramp `x`.
pub fn sensitivity_curve(phi: &[f64], rows: &[Vec<f64>], x: &[f64]) -> Result<SensitivityCurve> {
    if phi.len() != rows.len() || phi.is_empty() {
        return Err(invalid("p0_map", "one row per phase is required"));
    }
    let comps = rows
        .iter()
        .map(|r| response_spectrum(x, r).and_then(|s| dominant_component(&s)))
        .collect::<Result<Vec<_>>>()?;
    let max_mag = comps.iter().fold(0.0, |m: f64, c| m.max(c.magnitude));
    let (zeta, magnitude): (Vec<f64>, Vec<f64>) = comps
        .iter()
        .map(|c| {
            if c.detected && c.magnitude >= MAGNITUDE_FLOOR * max_mag {
                (c.coord, c.magnitude)
            } else {
                (0.0, c.magnitude)
            }
        })
        .unzip();
    let zmax = zeta.iter().fold(0.0, |m: f64, &z| m.max(z));
    if zmax == 0.0 {
        return Err(DyscoError::DegenerateSpectrum);
    }
    let beta: Vec<f64> = zeta.iter().map(|z| z / zmax).collect();
    let residuals: Vec<f64> = beta
        .iter()
        .zip(phi)
        .map(|(b, p)| b - p.sin().abs())
        .collect();
    let mean = beta.iter().sum::<f64>() / beta.len() as f64;
    let ss_tot: f64 = beta.iter().map(|b| (b - mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if ss_tot == 0.0 {
        0.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(SensitivityCurve {
        phi: phi.to_vec(),
        zeta,
        magnitude,
        beta,
        residuals,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterFunction {
    /// rad/s
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub source: SensitivityFunction,
}

impl FilterFunction {
    /// `F(w) = w^2 |g^(w)|^2 / 2` at any frequency.
    pub fn evaluate(&self, omega: f64) -> f64 {
        0.5 * omega * omega * self.source.transform(omega).norm_sqr()
    }
}

pub fn filter_function(g: &SensitivityFunction, omegas: &[f64]) -> FilterFunction {
    let values = omegas
        .iter()
        .map(|&w| 0.5 * w * w * g.transform(w).norm_sqr())
        .collect();
    FilterFunction {
        omegas: omegas.to_vec(),
        values,
        source: g.clone(),
    }
}

/// Coherence decay `chi = int dw/pi S(w) F(w) / w^2` over `support`.
///
/// Adaptive trapezoidal quadrature seeded on the filter grid, refined until
/// the relative change is below `1e-6`. The filter grid must cover `support`.
pub fn coherence_integral(
    noise: impl Fn(f64) -> f64,
    filter: &FilterFunction,
    support: (f64, f64),
) -> Result<f64> {
    const REL_TOL: f64 = 1e-6;
    const MAX_DEPTH: u32 = 48;
    let (lo, hi) = support;
    let (g_lo, g_hi) = match (filter.omegas.first(), filter.omegas.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(DyscoError::GridCoverage),
    };
    if !(lo < hi) || lo < g_lo || hi > g_hi || lo < 0.0 {
        return Err(DyscoError::GridCoverage);
    }
    // F / w^2 = |g^|^2 / 2, which stays finite at w = 0.
    let f = |w: f64| noise(w) * 0.5 * filter.source.transform(w).norm_sqr() / PI;
    let mut nodes: Vec<f64> = vec![lo];
    nodes.extend(filter.omegas.iter().copied().filter(|&w| w > lo && w < hi));
    nodes.push(hi);
    let vals: Vec<f64> = nodes.iter().map(|&w| f(w)).collect();
    let coarse: f64 = nodes
        .windows(2)
        .zip(vals.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum();
    if vals.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let width = hi - lo;
    let scale = coarse.abs().max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, f64, f64, u32)> = nodes
        .windows(2)
        .zip(vals.windows(2))
        .map(|(x, y)| (x[0], x[1], y[0], y[1], 0))
        .collect();
    while let Some((a, b, fa, fb, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = 0.5 * (b - a) * (fa + fb);
        let halves = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
        let tol = REL_TOL * scale * (b - a) / width;
        if (halves - whole).abs() <= 3.0 * tol {
            total += halves + (halves - whole) / 3.0;
        } else if depth >= MAX_DEPTH {
            return Err(DyscoError::Quadrature { tolerance: REL_TOL });
        } else {
            stack.push((a, m, fa, fm, depth + 1));
            stack.push((m, b, fm, fb, depth + 1));
        }
    }
    Ok(total)
}

/// Largest |dP0/dx| after 3-point smoothing, by central differences.
pub fn max_slope(x: &[f64], p0: &[f64]) -> Result<f64> {
    if x.len() != p0.len() || x.len() < 3 {
        return Err(invalid("response", "need at least three paired samples"));
    }
    let n = p0.len();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                p0[i]
            } else {
                (p0[i - 1] + p0[i] + p0[i + 1]) / 3.0
            }
        })
        .collect();
    let slope = (1..n - 1)
        .map(|i| ((smooth[i + 1] - smooth[i - 1]) / (x[i + 1] - x[i - 1])).abs())
        .fold(0.0, f64::max);
    if !(slope > 0.0) || !slope.is_finite() {
        return Err(DyscoError::FlatResponse);
    }
    Ok(slope)
}

/// Ratio of the largest field measurable without phase wrapping to the
/// smallest resolvable one: `T_DYSCO * Omega / (9 pi)`.
///
/// Follows from the bandwidth limits `Omega/(9 pi)` and `1/T_DYSCO`.
pub fn theoretical_dr_bound(rabi: f64, t_dysco: f64) -> f64 {
    t_dysco * rabi / (9.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicRange {
    pub ratio: f64,
    pub slope_max_sensitivity: f64,
    pub slope_min_sensitivity: f64,
}

/// `max-slope(high sensitivity) / max-slope(low sensitivity)`; each response is `(field axis, P0)`.
pub fn dynamic_range(low: (&[f64], &[f64]), high: (&[f64], &[f64])) -> Result<DynamicRange> {
    let lo = max_slope(low.0, low.1)?;
    let hi = max_slope(high.0, high.1)?;
    Ok(DynamicRange {
        ratio: hi / lo,
        slope_max_sensitivity: hi,
        slope_min_sensitivity: lo,
    })
}
