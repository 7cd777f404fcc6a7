//! Two-level spin primitives on the {|0>, |->} subspace.
//!
//! The Hamiltonian of a constant drive segment is written as
//! `H = -(1/2) (hx sx + hy sy + hz sz)` in the ordered basis `(|0>, |->)`,
//! so `sz |0> = |0>`. The drive term `-(rabi/2) (e^{i theta} |0><-| + h.c.)`
//! maps to the transverse field `(rabi cos theta, -rabi sin theta)` and the
//! projected `|-><-|` coefficient `eps = -detuning + gamma b_rf` maps to `hz = eps`.
//! The propagator of a segment is `exp(+i t/2 h.sigma)`.

use std::ops::Mul;

use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub amp0: C64,
    pub ampm: C64,
}

impl SpinState {
    /// The bright state |0>.
    pub const fn ground() -> Self {
        Self {
            amp0: ONE,
            ampm: ZERO,
        }
    }

    pub const fn excited() -> Self {
        Self {
            amp0: ZERO,
            ampm: ONE,
        }
    }

    /// Builds a state from raw amplitudes, normalizing them. Returns `None` for a zero vector.
    pub fn new(amp0: C64, ampm: C64) -> Option<Self> {
        let norm = (amp0.norm_sqr() + ampm.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        Some(Self {
            amp0: amp0 / norm,
            ampm: ampm / norm,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.ampm.norm_sqr()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            amp0: self.amp0 / n,
            ampm: self.ampm / n,
        }
    }

    /// Occupation of |0>.
    pub fn p0(&self) -> f64 {
        self.amp0.norm_sqr().clamp(0.0, 1.0)
    }

    /// Bloch vector `(2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2)` with `a = amp0`, `b = ampm`.
    pub fn bloch(&self) -> [f64; 3] {
        let c = self.amp0.conj() * self.ampm;
        [
            2.0 * c.re,
            2.0 * c.im,
            self.amp0.norm_sqr() - self.ampm.norm_sqr(),
        ]
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        (self.amp0.conj() * other.amp0 + self.ampm.conj() * other.ampm).norm_sqr()
    }
}

/// Free function forms of the observables.
pub fn p0(state: &SpinState) -> f64 {
    state.p0()
}

pub fn bloch(state: &SpinState) -> [f64; 3] {
    state.bloch()
}

/// Angular-frequency vector of a constant two-level Hamiltonian (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectiveField {
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

impl EffectiveField {
    pub fn magnitude(&self) -> f64 {
        (self.hx * self.hx + self.hy * self.hy + self.hz * self.hz).sqrt()
    }

    pub fn transverse(&self) -> f64 {
        self.hx.hypot(self.hy)
    }
}

/// Rotating-frame field of the |0> <-> |-> drive with a longitudinal RF field `b_rf`.
///
/// The |+> level is discarded; only the `|-><-|` coefficient `-detuning + gamma b_rf` survives.
pub fn effective_field(
    rabi: f64,
    detuning: f64,
    phase: f64,
    b_rf: f64,
    gamma_nv: f64,
) -> EffectiveField {
    debug_assert!(rabi >= 0.0);
    let (s, c) = phase.sin_cos();
    EffectiveField {
        hx: rabi * c,
        hy: -rabi * s,
        hz: -detuning + gamma_nv * b_rf,
    }
}

/// 2x2 complex matrix acting on `(amp0, ampm)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    pub m: [[C64; 2]; 2],
}

impl Unitary2 {
    pub const fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn apply(&self, s: &SpinState) -> SpinState {
        SpinState {
            amp0: self.m[0][0] * s.amp0 + self.m[0][1] * s.ampm,
            ampm: self.m[1][0] * s.amp0 + self.m[1][1] * s.ampm,
        }
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.dagger() * *self;
        let id = Self::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    /// Phase-insensitive distance `1 - |tr(A^dagger B)| / 2`.
    pub fn distance(&self, other: &Unitary2) -> f64 {
        let p = self.dagger() * *other;
        1.0 - 0.5 * (p.m[0][0] + p.m[1][1]).norm()
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Unitary2 { m }
    }
}

/// Exact propagator `exp(+i (duration/2) h.sigma)` of a constant field.
pub fn rotation(field: EffectiveField, duration: f64) -> Unitary2 {
    let mag = field.magnitude();
    if mag == 0.0 || duration == 0.0 {
        return Unitary2::identity();
    }
    let (s, c) = (0.5 * mag * duration).sin_cos();
    let k = s / mag;
    let (nx, ny, nz) = (k * field.hx, k * field.hy, k * field.hz);
    // c I + i (nx sx + ny sy + nz sz)
    Unitary2 {
        m: [
            [C64::new(c, nz), C64::new(ny, nx)],
            [C64::new(-ny, nx), C64::new(c, -nz)],
        ],
    }
}

/// Applies [`rotation`] to a state in place without materializing the matrix.
#[inline]
pub(crate) fn rotate_in_place(state: &mut SpinState, hx: f64, hy: f64, hz: f64, duration: f64) {
    let mag = (hx * hx + hy * hy + hz * hz).sqrt();
    if mag == 0.0 {
        return;
    }
    let (s, c) = (0.5 * mag * duration).sin_cos();
    let k = s / mag;
    let (nx, ny, nz) = (k * hx, k * hy, k * hz);
    let u00 = C64::new(c, nz);
    let u01 = C64::new(ny, nx);
    let u10 = C64::new(-ny, nx);
    let u11 = C64::new(c, -nz);
    let (a, b) = (state.amp0, state.ampm);
    state.amp0 = u00 * a + u01 * b;
    state.ampm = u10 * a + u11 * b;
}

/// Relaxes `p0_ideal` toward 1/2 with a stretched exponential `exp(-(t/tau)^p)`.
pub fn apply_contrast_envelope(p0_ideal: f64, t: f64, tau: f64, exponent: f64) -> f64 {
    debug_assert!(tau > 0.0 && exponent > 0.0);
    0.5 + (p0_ideal - 0.5) * (-(t / tau).powf(exponent)).exp()
}
