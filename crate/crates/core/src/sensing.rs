//! Encoder quantization and the sensing pipeline: quantize, hold, filter.
//!
//! A [`SensorChannel`] is fed the true angle once per sample period. From the
//! quantized samples it builds the hold signal for the coming interval
//! `[nT, (n+1)T)` (a staircase for ZOH, the extrapolated ramp for FOH), passes
//! it through the optional low-pass at `oversample` points per period, and
//! reports the value reached at the end of the interval. That value is what a
//! controller reading the sensing output at the next tick sees: `x[n]` for
//! ZOH and `x[n] + (x[n] - x[n-1])` for FOH.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::signal_recon::{Biquad, FilterKind};

/// Encoder resolution for 4000 counts per revolution (0.09 degrees).
pub const DEFAULT_RESOLUTION: f64 = 2.0 * std::f64::consts::PI / 4000.0;

/// Nearest multiple of `delta`.
pub fn quantize(theta: f64, delta: f64) -> f64 {
    delta * (theta / delta).round()
}

/// Largest multiple of `delta` not above `theta`, like a counting encoder.
pub fn quantize_truncate(theta: f64, delta: f64) -> f64 {
    delta * (theta / delta).floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantizerMode {
    Round,
    Truncate,
}

impl QuantizerMode {
    pub fn name(self) -> &'static str {
        match self {
            QuantizerMode::Round => "round",
            QuantizerMode::Truncate => "truncate",
        }
    }
}

impl FromStr for QuantizerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "round" => Ok(QuantizerMode::Round),
            "truncate" => Ok(QuantizerMode::Truncate),
            other => Err(Error::InvalidParameter(format!(
                "unknown quantizer mode '{other}'"
            ))),
        }
    }
}

/// Angle encoder sampled at a fixed period.
///
/// A resolution of zero disables quantization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderModel {
    pub resolution: f64,
    pub period: f64,
    pub mode: QuantizerMode,
}

impl Default for EncoderModel {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            period: 0.001,
            mode: QuantizerMode::Round,
        }
    }
}

impl EncoderModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution >= 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "encoder resolution must be >= 0, got {}",
                self.resolution
            )));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample period must be positive, got {}",
                self.period
            )));
        }
        Ok(())
    }

    pub fn read(&self, theta: f64) -> f64 {
        if self.resolution == 0.0 {
            return theta;
        }
        match self.mode {
            QuantizerMode::Round => quantize(theta, self.resolution),
            QuantizerMode::Truncate => quantize_truncate(theta, self.resolution),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hold {
    Zoh,
    Foh,
}

/// Hold choice plus optional low-pass on the hold output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingScheme {
    pub hold: Hold,
    pub filtered: bool,
    pub filter_cutoff_hz: f64,
    pub filter_kind: FilterKind,
}

pub const DEFAULT_FILTER_CUTOFF_HZ: f64 = 50.0;

impl SensingScheme {
    pub const ZOH: Self = Self::new(Hold::Zoh, false);
    pub const FOH: Self = Self::new(Hold::Foh, false);
    pub const ZOH_FILTER: Self = Self::new(Hold::Zoh, true);
    pub const FOH_FILTER: Self = Self::new(Hold::Foh, true);

    /// The four schemes in report order.
    pub const ALL: [Self; 4] = [Self::ZOH, Self::FOH, Self::ZOH_FILTER, Self::FOH_FILTER];

    pub const fn new(hold: Hold, filtered: bool) -> Self {
        Self {
            hold,
            filtered,
            filter_cutoff_hz: DEFAULT_FILTER_CUTOFF_HZ,
            filter_kind: FilterKind::Tracking,
        }
    }

    pub fn with_filter(self, kind: FilterKind, cutoff_hz: f64) -> Self {
        Self {
            filter_kind: kind,
            filter_cutoff_hz: cutoff_hz,
            ..self
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.hold, self.filtered) {
            (Hold::Zoh, false) => "ZOH",
            (Hold::Foh, false) => "FOH",
            (Hold::Zoh, true) => "ZOH+Filter",
            (Hold::Foh, true) => "FOH+Filter",
        }
    }

    /// File-name friendly label.
    pub fn slug(&self) -> &'static str {
        match (self.hold, self.filtered) {
            (Hold::Zoh, false) => "zoh",
            (Hold::Foh, false) => "foh",
            (Hold::Zoh, true) => "zoh_filter",
            (Hold::Foh, true) => "foh_filter",
        }
    }

    /// Accepts `zoh`, `foh`, `zoh+filter`, `foh+filter` (also `_` for `+`).
    pub fn parse(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', '-'], "+");
        match key.as_str() {
            "zoh" => Ok(Self::ZOH),
            "foh" => Ok(Self::FOH),
            "zoh+filter" | "zoh+f" => Ok(Self::ZOH_FILTER),
            "foh+filter" | "foh+f" => Ok(Self::FOH_FILTER),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sensing scheme '{s}'"
            ))),
        }
    }
}

impl fmt::Display for SensingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Stateful sensing pipeline for one scheme.
#[derive(Debug, Clone)]
pub struct SensorChannel {
    scheme: SensingScheme,
    encoder: EncoderModel,
    oversample: usize,
    prev_quantized: f64,
    curr_quantized: f64,
    angle_filter: Option<Biquad>,
    initialized: bool,
}

impl SensorChannel {
    /// `oversample` is the number of points per sample period at which the
    /// filter sees the hold output.
    pub fn new(scheme: SensingScheme, encoder: EncoderModel, oversample: usize) -> Result<Self> {
        encoder.validate()?;
        if oversample == 0 {
            return Err(Error::InvalidParameter(
                "filter oversample must be >= 1".into(),
            ));
        }
        let angle_filter = if scheme.filtered {
            let rate = oversample as f64 / encoder.period;
            Some(Biquad::design(
                scheme.filter_kind,
                scheme.filter_cutoff_hz,
                rate,
            )?)
        } else {
            None
        };
        Ok(Self {
            scheme,
            encoder,
            oversample,
            prev_quantized: 0.0,
            curr_quantized: 0.0,
            angle_filter,
            initialized: false,
        })
    }

    pub fn scheme(&self) -> &SensingScheme {
        &self.scheme
    }

    pub fn encoder(&self) -> &EncoderModel {
        &self.encoder
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn curr_quantized(&self) -> f64 {
        self.curr_quantized
    }

    pub fn prev_quantized(&self) -> f64 {
        self.prev_quantized
    }

    /// Takes one sample and returns the sensing output at the end of the
    /// coming interval.
    pub fn update(&mut self, theta_true: f64) -> f64 {
        self.advance(theta_true, |_| ())
    }

    /// Like [`update`](Self::update), and also appends the output at each of
    /// the `oversample` points `nT + jT/M`, `j = 1..=M`. The last point is the
    /// left limit at `(n+1)T`.
    pub fn update_dense(&mut self, theta_true: f64, out: &mut Vec<f64>) -> f64 {
        self.advance(theta_true, |y| out.push(y))
    }

    fn advance(&mut self, theta_true: f64, mut sink: impl FnMut(f64)) -> f64 {
        let q = self.encoder.read(theta_true);
        if self.initialized {
            self.prev_quantized = self.curr_quantized;
        } else {
            self.prev_quantized = q;
            if let Some(f) = self.angle_filter.as_mut() {
                f.settle_at(q);
            }
            self.initialized = true;
        }
        self.curr_quantized = q;

        let slope = match self.scheme.hold {
            Hold::Zoh => 0.0,
            Hold::Foh => self.curr_quantized - self.prev_quantized,
        };
        let m = self.oversample as f64;
        let mut y = self.curr_quantized + slope;
        for j in 1..=self.oversample {
            let frac = j as f64 / m;
            let hold = self.curr_quantized + slope * frac;
            y = match self.angle_filter.as_mut() {
                Some(f) => f.step(hold),
                None => hold,
            };
            sink(y);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quantizer_examples() {
        let d = 0.0015708;
        assert_eq!(quantize(0.0, d), 0.0);
        assert!((quantize(0.00157, d) - d).abs() < 1e-15);
        assert!((quantize(-0.0008, d) + d).abs() < 1e-15);
        assert_eq!(quantize_truncate(0.0015, d), 0.0);
        assert!((quantize_truncate(-0.0001, d) + d).abs() < 1e-15);
        assert!((DEFAULT_RESOLUTION.to_degrees() - 0.09).abs() < 1e-12);
    }

    #[test]
    fn zero_resolution_disables_quantization() {
        let e = EncoderModel {
            resolution: 0.0,
            ..EncoderModel::default()
        };
        assert_eq!(e.read(0.123456), 0.123456);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SensingScheme::ALL {
            assert_eq!(SensingScheme::parse(s.label()).unwrap(), s);
            assert_eq!(SensingScheme::parse(s.slug()).unwrap(), s);
        }
        assert!(SensingScheme::parse("boh").is_err());
    }

    #[test]
    fn constant_angle_is_reproduced_by_every_scheme() {
        let c = 17.0 * DEFAULT_RESOLUTION;
        for s in SensingScheme::ALL {
            let mut ch = SensorChannel::new(s, EncoderModel::default(), 10).unwrap();
            let mut y = 0.0;
            for _ in 0..500 {
                y = ch.update(c);
            }
            assert!((y - c).abs() < 1e-12, "{s}: {y}");
        }
    }

    #[test]
    fn foh_is_exact_on_representable_ramps() {
        let d = DEFAULT_RESOLUTION;
        let mut ch = SensorChannel::new(SensingScheme::FOH, EncoderModel::default(), 4).unwrap();
        let first = ch.update(0.0);
        assert_eq!(first, 0.0);
        for n in 1..200 {
            // slope 3 counts per period; output predicts the next sample
            let y = ch.update(3.0 * d * n as f64);
            assert!((y - 3.0 * d * (n + 1) as f64).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn zoh_lags_a_ramp_and_foh_does_not() {
        let period = 0.001;
        let rate = 5.0; // rad/s, rate * T is about 3.2 counts
        let mut zoh = SensorChannel::new(SensingScheme::ZOH, EncoderModel::default(), 1).unwrap();
        let mut foh = SensorChannel::new(SensingScheme::FOH, EncoderModel::default(), 1).unwrap();
        let (mut zoh_lag, mut foh_err): (f64, f64) = (0.0, 0.0);
        for n in 0..1000 {
            let t = n as f64 * period;
            let z = zoh.update(rate * t);
            let f = foh.update(rate * t);
            if n > 10 {
                // both outputs are read at the next tick
                let truth = rate * (t + period);
                zoh_lag = zoh_lag.max(truth - z);
                foh_err = foh_err.max((truth - f).abs());
            }
        }
        let d = DEFAULT_RESOLUTION;
        assert!(
            (zoh_lag - rate * period).abs() <= d / 2.0 + 1e-12,
            "{zoh_lag}"
        );
        assert!(foh_err <= 1.5 * d + 1e-12, "{foh_err}");
    }

    #[test]
    fn dense_output_matches_hold_formulas() {
        let mut ch = SensorChannel::new(SensingScheme::FOH, EncoderModel::default(), 5).unwrap();
        let mut dense = Vec::new();
        ch.update_dense(0.0, &mut dense);
        dense.clear();
        let d = DEFAULT_RESOLUTION;
        let end = ch.update_dense(2.0 * d, &mut dense);
        assert_eq!(dense.len(), 5);
        for (j, y) in dense.iter().enumerate() {
            let frac = (j + 1) as f64 / 5.0;
            assert!((y - (2.0 * d + 2.0 * d * frac)).abs() < 1e-15);
        }
        assert_eq!(end, *dense.last().unwrap());
    }

    #[test]
    fn foh_beats_zoh_on_the_reference_sine_without_quantization() {
        // with quantization off the FOH residual is the second-order term max|theta''| T^2
        let enc = EncoderModel {
            resolution: 0.0,
            ..EncoderModel::default()
        };
        let w = 4.0 * PI;
        let period = enc.period;
        let mut zoh = SensorChannel::new(SensingScheme::ZOH, enc, 1).unwrap();
        let mut foh = SensorChannel::new(SensingScheme::FOH, enc, 1).unwrap();
        let (mut ez, mut ef): (f64, f64) = (0.0, 0.0);
        for n in 0..2000 {
            let t = n as f64 * period;
            let z = zoh.update(0.1 * (w * t).sin());
            let f = foh.update(0.1 * (w * t).sin());
            let truth = 0.1 * (w * (t + period)).sin();
            if n > 0 {
                ez = ez.max((truth - z).abs());
                ef = ef.max((truth - f).abs());
            }
        }
        assert!(ef <= 0.1 * w * w * period * period, "{ef}");
        assert!(ez > 50.0 * ef, "{ez} vs {ef}");
    }

    #[test]
    fn rejects_invalid_setup() {
        let bad = EncoderModel {
            period: 0.0,
            ..EncoderModel::default()
        };
        assert!(SensorChannel::new(SensingScheme::ZOH, bad, 1).is_err());
        assert!(SensorChannel::new(SensingScheme::ZOH, EncoderModel::default(), 0).is_err());
        let too_high = SensingScheme::ZOH_FILTER.with_filter(FilterKind::Tracking, 600.0);
        assert!(SensorChannel::new(too_high, EncoderModel::default(), 1).is_err());
    }
}
