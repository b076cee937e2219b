//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; missing
//! keys keep their defaults.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::control::{place_gains, Trajectory};
use crate::error::{Error, Result};
use crate::plant::{build_model, PendulumParams};
use crate::sensing::{EncoderModel, QuantizerMode, SensingScheme, DEFAULT_FILTER_CUTOFF_HZ};
use crate::signal_recon::FilterKind;
use crate::simloop::{FeedbackMode, OpenLoopConfig, SimConfig, DEFAULT_POLES};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: PendulumParams,
    pub amplitude: f64,
    pub omega: f64,
    pub poles: [Complex64; 2],
    pub resolution: f64,
    pub quantizer: QuantizerMode,
    pub sample_period: f64,
    pub filter_kind: FilterKind,
    pub filter_cutoff_hz: f64,
    pub filter_oversample: usize,
    pub sensor_latency: usize,
    pub duration: f64,
    pub steady_start: f64,
    pub substeps: usize,
    pub open_loop_duration: f64,
    pub open_loop_window_start: f64,
    pub eval_oversample: usize,
    /// rad/s
    pub freq_min: f64,
    /// rad/s; `None` means the Nyquist frequency `pi / T`.
    pub freq_max: Option<f64>,
    pub freq_points: usize,
}

impl Default for Config {
    fn default() -> Self {
        let traj = Trajectory::default();
        let enc = EncoderModel::default();
        Self {
            params: PendulumParams::default(),
            amplitude: traj.amplitude,
            omega: traj.omega,
            poles: DEFAULT_POLES,
            resolution: enc.resolution,
            quantizer: enc.mode,
            sample_period: enc.period,
            filter_kind: FilterKind::Tracking,
            filter_cutoff_hz: DEFAULT_FILTER_CUTOFF_HZ,
            filter_oversample: 10,
            sensor_latency: 1,
            duration: 10.0,
            steady_start: 2.0,
            substeps: 10,
            open_loop_duration: 5.0,
            open_loop_window_start: 1.0,
            eval_oversample: 10,
            freq_min: 0.1,
            freq_max: None,
            freq_points: 400,
        }
    }
}

pub const KEYS: &[&str] = &[
    "mass",
    "length",
    "gravity",
    "inertia",
    "armature_resistance",
    "back_emf",
    "torque_constant",
    "damping",
    "amplitude",
    "omega",
    "pole1_re",
    "pole1_im",
    "pole2_re",
    "pole2_im",
    "resolution",
    "quantizer",
    "sample_period",
    "filter_kind",
    "filter_cutoff_hz",
    "filter_oversample",
    "sensor_latency",
    "duration",
    "steady_start",
    "substeps",
    "open_loop_duration",
    "open_loop_window_start",
    "eval_oversample",
    "freq_min",
    "freq_max",
    "freq_points",
];

fn float(key: &str, v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v
        .parse()
        .map_err(|_| format!("{key}: '{v}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{key}: value must be finite"))
    }
}

fn count(key: &str, v: &str) -> std::result::Result<usize, String> {
    v.parse()
        .map_err(|_| format!("{key}: '{v}' is not a non-negative integer"))
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: i + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            cfg.set(k.trim(), v.trim())
                .map_err(|msg| Error::Config { line: i + 1, msg })?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Override(format!("'{kv}' is not key=value")))?;
        self.set(k.trim(), v.trim()).map_err(Error::Override)
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let p = &mut self.params;
        match key {
            "mass" => p.mass = float(key, v)?,
            "length" => p.length = float(key, v)?,
            "gravity" => p.gravity = float(key, v)?,
            "inertia" => p.inertia = float(key, v)?,
            "armature_resistance" => p.armature_resistance = float(key, v)?,
            "back_emf" => p.back_emf = float(key, v)?,
            "torque_constant" => p.torque_constant = float(key, v)?,
            "damping" => p.damping = float(key, v)?,
            "amplitude" => self.amplitude = float(key, v)?,
            "omega" => self.omega = float(key, v)?,
            "pole1_re" => self.poles[0].re = float(key, v)?,
            "pole1_im" => self.poles[0].im = float(key, v)?,
            "pole2_re" => self.poles[1].re = float(key, v)?,
            "pole2_im" => self.poles[1].im = float(key, v)?,
            "resolution" => self.resolution = float(key, v)?,
            "quantizer" => self.quantizer = v.parse().map_err(|e: Error| e.to_string())?,
            "sample_period" => self.sample_period = float(key, v)?,
            "filter_kind" => self.filter_kind = v.parse().map_err(|e: Error| e.to_string())?,
            "filter_cutoff_hz" => self.filter_cutoff_hz = float(key, v)?,
            "filter_oversample" => self.filter_oversample = count(key, v)?,
            "sensor_latency" => self.sensor_latency = count(key, v)?,
            "duration" => self.duration = float(key, v)?,
            "steady_start" => self.steady_start = float(key, v)?,
            "substeps" => self.substeps = count(key, v)?,
            "open_loop_duration" => self.open_loop_duration = float(key, v)?,
            "open_loop_window_start" => self.open_loop_window_start = float(key, v)?,
            "eval_oversample" => self.eval_oversample = count(key, v)?,
            "freq_min" => self.freq_min = float(key, v)?,
            "freq_max" => {
                self.freq_max = if v.eq_ignore_ascii_case("nyquist") {
                    None
                } else {
                    Some(float(key, v)?)
                }
            }
            "freq_points" => self.freq_points = count(key, v)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Serializes every key; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("mass", p.mass.to_string());
        kv("length", p.length.to_string());
        kv("gravity", p.gravity.to_string());
        kv("inertia", p.inertia.to_string());
        kv("armature_resistance", p.armature_resistance.to_string());
        kv("back_emf", p.back_emf.to_string());
        kv("torque_constant", p.torque_constant.to_string());
        kv("damping", p.damping.to_string());
        kv("amplitude", self.amplitude.to_string());
        kv("omega", self.omega.to_string());
        kv("pole1_re", self.poles[0].re.to_string());
        kv("pole1_im", self.poles[0].im.to_string());
        kv("pole2_re", self.poles[1].re.to_string());
        kv("pole2_im", self.poles[1].im.to_string());
        kv("resolution", self.resolution.to_string());
        kv("quantizer", self.quantizer.name().to_string());
        kv("sample_period", self.sample_period.to_string());
        kv("filter_kind", self.filter_kind.name().to_string());
        kv("filter_cutoff_hz", self.filter_cutoff_hz.to_string());
        kv("filter_oversample", self.filter_oversample.to_string());
        kv("sensor_latency", self.sensor_latency.to_string());
        kv("duration", self.duration.to_string());
        kv("steady_start", self.steady_start.to_string());
        kv("substeps", self.substeps.to_string());
        kv("open_loop_duration", self.open_loop_duration.to_string());
        kv(
            "open_loop_window_start",
            self.open_loop_window_start.to_string(),
        );
        kv("eval_oversample", self.eval_oversample.to_string());
        kv("freq_min", self.freq_min.to_string());
        kv(
            "freq_max",
            self.freq_max
                .map_or_else(|| "nyquist".to_string(), |f| f.to_string()),
        );
        kv("freq_points", self.freq_points.to_string());
        out
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::new(self.amplitude, self.omega)
    }

    pub fn encoder(&self) -> Result<EncoderModel> {
        let enc = EncoderModel {
            resolution: self.resolution,
            period: self.sample_period,
            mode: self.quantizer,
        };
        enc.validate()?;
        Ok(enc)
    }

    /// `scheme` with this config's filter settings applied when it is filtered.
    pub fn scheme(&self, scheme: SensingScheme) -> SensingScheme {
        if scheme.filtered {
            scheme.with_filter(self.filter_kind, self.filter_cutoff_hz)
        } else {
            scheme
        }
    }

    pub fn sim_config(&self, scheme: SensingScheme) -> Result<SimConfig> {
        let model = build_model(&self.params)?;
        let cfg = SimConfig {
            params: self.params,
            trajectory: self.trajectory()?,
            scheme: self.scheme(scheme),
            encoder: self.encoder()?,
            gains: place_gains(&model, self.poles[0], self.poles[1])?,
            duration: self.duration,
            steady_start: self.steady_start,
            substeps: self.substeps,
            filter_oversample: self.filter_oversample,
            sensor_latency: self.sensor_latency,
            feedback: FeedbackMode::Sensed,
            initial_state: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn open_loop_config(&self) -> Result<OpenLoopConfig> {
        Ok(OpenLoopConfig {
            encoder: self.encoder()?,
            trajectory: self.trajectory()?,
            duration: self.open_loop_duration,
            eval_oversample: self.eval_oversample,
            window_start: self.open_loop_window_start,
        })
    }

    /// Angular frequency grid for the hold responses, log-spaced. One point
    /// means just `freq_min`.
    pub fn freq_grid(&self) -> Result<Vec<f64>> {
        let nyquist = PI / self.sample_period;
        let hi = self.freq_max.unwrap_or(nyquist);
        if !(self.freq_min > 0.0 && hi >= self.freq_min && hi <= nyquist * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "frequency range {} .. {hi} rad/s must lie in (0, {nyquist}]",
                self.freq_min
            )));
        }
        match self.freq_points {
            0 => Err(Error::InvalidParameter("freq_points must be >= 1".into())),
            1 => Ok(vec![self.freq_min]),
            n => {
                let (a, b) = (self.freq_min.ln(), hi.ln());
                let last = (n - 1) as f64;
                Ok((0..n)
                    .map(|i| (a + (b - a) * i as f64 / last).exp())
                    .collect())
            }
        }
    }
}
