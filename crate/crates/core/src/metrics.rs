//! Steady-state error measures: peak-to-peak percentage and the normalized
//! error spectrum.

use std::ops::Range;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    pub p2p_error_percent: f64,
    /// (start, end) in seconds.
    pub window: (f64, f64),
}

fn span(xs: &[f64]) -> f64 {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

/// `100 (max e - min e) / (max r - min r)` over `window`.
pub fn peak_to_peak_percent(error: &[f64], reference: &[f64], window: Range<usize>) -> Result<f64> {
    if window.is_empty() || window.end > error.len() || window.end > reference.len() {
        return Err(Error::InvalidWindow(format!(
            "window {window:?} does not fit traces of length {} and {}",
            error.len(),
            reference.len()
        )));
    }
    let denom = span(&reference[window.clone()]);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::InvalidWindow(
            "reference is flat over the window".into(),
        ));
    }
    Ok(100.0 * span(&error[window]) / denom)
}

impl ErrorMetrics {
    /// Metrics over the ticks `window` of traces sampled every `period` from t = 0.
    pub fn from_traces(
        error: &[f64],
        reference: &[f64],
        window: Range<usize>,
        period: f64,
    ) -> Result<Self> {
        let p = peak_to_peak_percent(error, reference, window.clone())?;
        Ok(Self {
            p2p_error_percent: p,
            window: (window.start as f64 * period, window.end as f64 * period),
        })
    }
}

/// `|X_k|` for `k = 0..N` of the unnormalized DFT `X_k = sum x_n e^{-2 pi i k n / N}`.
pub fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Hz, bins `0..=N/2`.
    pub freqs: Vec<f64>,
    /// Raw `|E_k|`.
    pub magnitude: Vec<f64>,
    /// Percent of the reference maximum.
    pub normalized_magnitude: Vec<f64>,
}

impl SpectrumResult {
    pub fn bin_spacing(&self) -> f64 {
        self.freqs.get(1).copied().unwrap_or(0.0)
    }

    /// Index of the bin closest to `freq_hz`.
    pub fn bin_of(&self, freq_hz: f64) -> usize {
        let k = (freq_hz / self.bin_spacing()).round() as usize;
        k.min(self.freqs.len() - 1)
    }

    /// Largest raw magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

/// One-sided magnitude spectrum of `error`, sampled every `sample_period`,
/// over a window that must hold an integer number of `fundamental_period`s.
/// With `reference_max` the magnitudes are scaled to `100 |E| / reference_max`,
/// otherwise to the trace's own maximum.
pub fn error_spectrum(
    error: &[f64],
    sample_period: f64,
    fundamental_period: f64,
    reference_max: Option<f64>,
) -> Result<SpectrumResult> {
    let n = error.len();
    if n < 2 {
        return Err(Error::InvalidWindow(format!(
            "{n} samples is too short for a spectrum"
        )));
    }
    let length = n as f64 * sample_period;
    let periods = length / fundamental_period;
    if (periods - periods.round()).abs() > 1e-6 || periods.round() < 1.0 {
        return Err(Error::InvalidWindow(format!(
            "window of {length} s holds {periods} periods of {fundamental_period} s, need an integer"
        )));
    }
    let full = dft_magnitudes(error);
    let magnitude: Vec<f64> = full[..=n / 2].to_vec();
    let freqs = (0..magnitude.len()).map(|k| k as f64 / length).collect();
    let scale = match reference_max {
        Some(m) if m > 0.0 => m,
        Some(m) => {
            return Err(Error::InvalidParameter(format!(
                "reference maximum must be positive, got {m}"
            )))
        }
        None => magnitude.iter().copied().fold(0.0, f64::max),
    };
    let normalized_magnitude = magnitude
        .iter()
        .map(|&m| if scale > 0.0 { 100.0 * m / scale } else { 0.0 })
        .collect();
    Ok(SpectrumResult {
        freqs,
        magnitude,
        normalized_magnitude,
    })
}

/// `100 (1 - |F(f)| / |Z(f)|)`: how much lower `other` is than `base` at `freq_hz`.
pub fn suppression_percent(base: &SpectrumResult, other: &SpectrumResult, freq_hz: f64) -> f64 {
    let k = base.bin_of(freq_hz);
    100.0 * (1.0 - other.magnitude[k] / base.magnitude[k])
}

/// Largest absolute change in normalized magnitude over bins other than `freq_hz`,
/// returned with the change at `freq_hz` itself.
pub fn other_bin_change(base: &SpectrumResult, other: &SpectrumResult, freq_hz: f64) -> (f64, f64) {
    let k0 = base.bin_of(freq_hz);
    let diff = |k: usize| (base.normalized_magnitude[k] - other.normalized_magnitude[k]).abs();
    let worst = (0..base.magnitude.len().min(other.magnitude.len()))
        .filter(|&k| k != k0)
        .map(diff)
        .fold(0.0, f64::max);
    (worst, diff(k0))
}
