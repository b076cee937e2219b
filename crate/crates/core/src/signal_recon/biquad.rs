use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Which second-order low-pass a sensing filter uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    /// `wn^2 / (s^2 + sqrt(2) wn s + wn^2)`.
    Butterworth,
    /// `(sqrt(2) wn s + wn^2) / (s^2 + sqrt(2) wn s + wn^2)`: same poles as
    /// the Butterworth, plus a zero that cancels the DC group delay, so a ramp
    /// passes with no steady-state lag.
    Tracking,
}

impl FilterKind {
    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Butterworth => "butterworth",
            FilterKind::Tracking => "tracking",
        }
    }
}

impl std::str::FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "butterworth" => Ok(FilterKind::Butterworth),
            "tracking" => Ok(FilterKind::Tracking),
            other => Err(Error::InvalidParameter(format!(
                "unknown filter kind '{other}'"
            ))),
        }
    }
}

/// Second-order IIR section in direct form II transposed.
#[derive(Debug, Clone, PartialEq)]
pub struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
    z1: f64,
    z2: f64,
}

impl Biquad {
    pub fn from_coefficients(b: [f64; 3], a: [f64; 2]) -> Self {
        Self {
            b0: b[0],
            b1: b[1],
            b2: b[2],
            a1: a[0],
            a2: a[1],
            z1: 0.0,
            z2: 0.0,
        }
    }

    /// Butterworth low-pass via the bilinear transform, prewarped so the
    /// -3 dB point lands exactly on `cutoff_hz`.
    pub fn lowpass2(cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        Self::design(FilterKind::Butterworth, cutoff_hz, sample_rate_hz)
    }

    /// Ramp-tracking low-pass, prewarped at `cutoff_hz`.
    pub fn tracking2(cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        Self::design(FilterKind::Tracking, cutoff_hz, sample_rate_hz)
    }

    pub fn design(kind: FilterKind, cutoff_hz: f64, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if !(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff_hz} Hz must lie in (0, {}) Hz",
                sample_rate_hz / 2.0
            )));
        }
        let k = (PI * cutoff_hz / sample_rate_hz).tan();
        let k2 = k * k;
        // 2 * zeta with zeta = 1/sqrt(2)
        let d = 2.0 * FRAC_1_SQRT_2;
        let a0 = 1.0 + d * k + k2;
        let (b0, b1, b2) = match kind {
            FilterKind::Butterworth => (k2, 2.0 * k2, k2),
            FilterKind::Tracking => (k2 + d * k, 2.0 * k2, k2 - d * k),
        };
        Ok(Self::from_coefficients(
            [b0 / a0, b1 / a0, b2 / a0],
            [(2.0 * k2 - 2.0) / a0, (1.0 - d * k + k2) / a0],
        ))
    }

    pub fn numerator(&self) -> [f64; 3] {
        [self.b0, self.b1, self.b2]
    }

    /// `[a1, a2]` of the monic denominator `1 + a1 z^-1 + a2 z^-2`.
    pub fn denominator(&self) -> [f64; 2] {
        [self.a1, self.a2]
    }

    /// Advances one sample.
    #[inline]
    pub fn step(&mut self, x: f64) -> f64 {
        let y = self.b0 * x + self.z1;
        self.z1 = self.b1 * x - self.a1 * y + self.z2;
        self.z2 = self.b2 * x - self.a2 * y;
        y
    }

    pub fn reset(&mut self) {
        self.z1 = 0.0;
        self.z2 = 0.0;
    }

    /// Loads the delay line with the steady state for a constant input `x`
    /// (output equals `x` given unity DC gain).
    pub fn settle_at(&mut self, x: f64) {
        let y = self.dc_gain() * x;
        self.z1 = y - self.b0 * x;
        self.z2 = self.b2 * x - self.a2 * y;
    }

    pub fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }

    /// Transfer function at `freq_hz` for a filter clocked at `sample_rate_hz`.
    pub fn response(&self, freq_hz: f64, sample_rate_hz: f64) -> Complex64 {
        let zi = Complex64::from_polar(1.0, -2.0 * PI * freq_hz / sample_rate_hz);
        let num = self.b0 + self.b1 * zi + self.b2 * zi * zi;
        let den = 1.0 + self.a1 * zi + self.a2 * zi * zi;
        num / den
    }

    /// Roots of `z^2 + a1 z + a2`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }
}
