//! Physical constants and the reference operating point used throughout the crate.

use std::f64::consts::PI;

/// NV electron gyromagnetic ratio, rad s^-1 T^-1 (about -2 pi x 28 GHz/T).
pub const GAMMA_NV: f64 = -2.0 * PI * 28.0e9;

/// 13C nuclear gyromagnetic ratio, rad s^-1 T^-1 (2 pi x 10.705 MHz/T).
pub const GAMMA_C13: f64 = 2.0 * PI * 10.705e6;

/// Reference Rabi rate on the |0> <-> |-> transition, rad/s (2 pi x 8.33 MHz).
pub const RABI_REFERENCE: f64 = 2.0 * PI * 8.33e6;

/// Bias field along the NV axis, tesla.
pub const BIAS_FIELD: f64 = 40.4e-3;

/// Longest usable interrogation time of the reference spin, seconds.
pub const T_DYSCO: f64 = 2.55e-3;

/// Rotating-frame relaxation time of the reference spin, seconds.
pub const T1_RHO: f64 = 3.2e-3;

/// 13C Larmor frequency at [`BIAS_FIELD`], Hz.
pub fn c13_larmor_hz() -> f64 {
    GAMMA_C13 * BIAS_FIELD / (2.0 * PI)
}
