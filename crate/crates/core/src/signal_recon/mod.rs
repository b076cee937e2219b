//! Hold reconstruction of uniformly sampled signals.
//!
//! A [`SampleSeq`] stores `x[n]` taken at `start_time + n * period`. The
//! reconstructors turn that sequence back into a continuous-time value:
//!
//! * [`zoh_value`]: hold each sample over `[nT, (n+1)T)`.
//! * [`foh_causal_value`]: extend each new sample with the slope of the
//!   previous interval (extrapolating first-order hold).
//! * [`foh_delayed_value`]: straight-line interpolation between consecutive
//!   samples, shifted by one period so that it only uses past samples.
//! * [`foh_noncausal_value`]: straight-line interpolation through all samples.
//!   Needs the next sample before it is taken, so it is a reference only.

mod biquad;
mod freq;

pub use biquad::{Biquad, FilterKind};
pub use freq::{freq_response_foh, freq_response_zoh, FreqResponse};

use crate::error::{Error, Result};

/// Triangular kernel `max(1 - |t|, 0)`.
pub fn tri(t: f64) -> f64 {
    (1.0 - t.abs()).max(0.0)
}

/// Rectangular kernel: 1 inside `|t| < 1/2`, 1/2 on the boundary, 0 outside.
pub fn rect(t: f64) -> f64 {
    let a = t.abs();
    if a < 0.5 {
        1.0
    } else if a == 0.5 {
        0.5
    } else {
        0.0
    }
}

/// Uniformly spaced samples of a scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeq {
    period: f64,
    start_time: f64,
    values: Vec<f64>,
}

impl SampleSeq {
    pub fn new(period: f64, start_time: f64, values: Vec<f64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample period must be positive and finite, got {period}"
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidParameter("start time must be finite".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidParameter("sample sequence is empty".into()));
        }
        Ok(Self {
            period,
            start_time,
            values,
        })
    }

    /// Samples `f` at `start_time + n * period` for `n in 0..len`.
    pub fn from_fn(
        period: f64,
        start_time: f64,
        len: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = (0..len)
            .map(|n| f(start_time + n as f64 * period))
            .collect();
        Self::new(period, start_time, values)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_of(&self, n: usize) -> f64 {
        self.start_time + n as f64 * self.period
    }

    /// Position of `t` in sample periods, snapped to the nearest integer when
    /// it is within rounding noise of one, so `t = n * T` lands on `n`.
    fn position(&self, t: f64) -> f64 {
        let u = (t - self.start_time) / self.period;
        let r = u.round();
        if (u - r).abs() <= 1e-9 * r.abs().max(1.0) {
            r
        } else {
            u
        }
    }

    fn out_of_range(&self, t: f64, start: f64, end: f64) -> Error {
        Error::OutOfRange {
            t,
            start: self.time_of(0) + start * self.period,
            end: self.time_of(0) + end * self.period,
        }
    }

    /// Splits `t` into the interval index `n` (with `nT <= t < (n+1)T`) and
    /// the fraction of the interval elapsed, over the hold span `[0, N)`.
    fn hold_interval(&self, t: f64) -> Result<(usize, f64)> {
        let u = self.position(t);
        let n_len = self.values.len() as f64;
        if !(0.0..n_len).contains(&u) {
            return Err(self.out_of_range(t, 0.0, n_len));
        }
        let n = u.floor();
        Ok((n as usize, u - n))
    }
}

/// Zero-order hold: `x[n]` for `nT <= t - start < (n+1)T`.
pub fn zoh_value(s: &SampleSeq, t: f64) -> Result<f64> {
    let (n, _) = s.hold_interval(t)?;
    Ok(s.values[n])
}

/// Extrapolating first-order hold: `x[n] + (x[n] - x[n-1]) * frac` on
/// `[nT, (n+1)T)`. The first interval has no prior slope and holds `x[0]`.
pub fn foh_causal_value(s: &SampleSeq, t: f64) -> Result<f64> {
    let (n, frac) = s.hold_interval(t)?;
    if n == 0 {
        return Ok(s.values[0]);
    }
    let x = &s.values;
    Ok(x[n] + (x[n] - x[n - 1]) * frac)
}

/// Delayed first-order hold: the non-causal interpolation shifted one period
/// later. Defined on `[start + T, start + N*T]`.
pub fn foh_delayed_value(s: &SampleSeq, t: f64) -> Result<f64> {
    let n_len = s.values.len() as f64;
    let u = s.position(t);
    if !(1.0..=n_len).contains(&u) {
        return Err(s.out_of_range(t, 1.0, n_len));
    }
    interpolate(&s.values, u - 1.0).ok_or_else(|| s.out_of_range(t, 1.0, n_len))
}

/// Piecewise-linear interpolation through every sample. Defined on
/// `[start, start + (N-1)T]`.
pub fn foh_noncausal_value(s: &SampleSeq, t: f64) -> Result<f64> {
    let last = (s.values.len() - 1) as f64;
    let u = s.position(t);
    interpolate(&s.values, u).ok_or_else(|| s.out_of_range(t, 0.0, last))
}

fn interpolate(x: &[f64], u: f64) -> Option<f64> {
    let last = (x.len() - 1) as f64;
    if !(0.0..=last).contains(&u) {
        return None;
    }
    if u.fract() == 0.0 {
        return Some(x[u as usize]);
    }
    let n = u.floor() as usize;
    let frac = u - n as f64;
    Some(x[n] + (x[n + 1] - x[n]) * frac)
}
