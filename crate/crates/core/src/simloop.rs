//! Experiment harnesses: open-loop sensing comparison and the closed-loop
//! tracking simulation.

use num_complex::Complex64;

use crate::control::{
    estimate_velocity, feedback_control, feedforward_voltage, place_gains, ErrorState, GainVec,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::metrics;
use crate::plant::{build_model, PendulumParams, State};
use crate::sensing::{EncoderModel, SensingScheme, SensorChannel};

/// Angle beyond which the linear model is no longer trusted.
pub const DIVERGENCE_LIMIT: f64 = 1.0;

/// Where the controller's angle and rate come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    /// Sensor channel output, read once per tick, rate by backward difference.
    Sensed,
    /// True state fed back continuously inside the integrator. Baseline only.
    IdealContinuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: PendulumParams,
    pub trajectory: Trajectory,
    pub scheme: SensingScheme,
    pub encoder: EncoderModel,
    pub gains: GainVec,
    /// s
    pub duration: f64,
    /// s
    pub steady_start: f64,
    /// RK4 steps per sample period.
    pub substeps: usize,
    /// Points per sample period at which the sensing filter runs.
    pub filter_oversample: usize,
    /// Ticks between taking a sample and the controller using its estimate (0 or 1).
    pub sensor_latency: usize,
    pub feedback: FeedbackMode,
    /// Defaults to the desired state at t = 0.
    pub initial_state: Option<State>,
}

pub const DEFAULT_POLES: [Complex64; 2] =
    [Complex64::new(-15.0, 15.0), Complex64::new(-15.0, -15.0)];

impl SimConfig {
    /// Defaults: stock plant constants, 0.1 sin(4 pi t) reference, poles at -15 +/- 15j,
    /// 10 s runs measured from 2 s.
    pub fn new(scheme: SensingScheme) -> Result<Self> {
        let params = PendulumParams::default();
        let model = build_model(&params)?;
        Ok(Self {
            params,
            trajectory: Trajectory::default(),
            scheme,
            encoder: EncoderModel::default(),
            gains: place_gains(&model, DEFAULT_POLES[0], DEFAULT_POLES[1])?,
            duration: 10.0,
            steady_start: 2.0,
            substeps: 10,
            filter_oversample: 10,
            sensor_latency: 1,
            feedback: FeedbackMode::Sensed,
            initial_state: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.encoder.validate()?;
        if !(self.steady_start >= 0.0 && self.duration > self.steady_start) {
            return Err(Error::InvalidParameter(format!(
                "need duration > steady_start >= 0, got {} and {}",
                self.duration, self.steady_start
            )));
        }
        let periods = (self.duration - self.steady_start) / self.trajectory.period();
        if periods < 4.0 - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "steady-state window holds {periods:.3} trajectory periods, need at least 4"
            )));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidParameter("substeps must be >= 1".into()));
        }
        if self.sensor_latency > 1 {
            return Err(Error::InvalidParameter(format!(
                "sensor latency must be 0 or 1 ticks, got {}",
                self.sensor_latency
            )));
        }
        Ok(())
    }

    pub fn ticks(&self) -> usize {
        (self.duration / self.encoder.period).round() as usize
    }
}

/// One controller tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub theta_d: f64,
    pub theta_true: f64,
    pub theta_hat: f64,
    /// `theta_d - theta_true`
    pub error: f64,
    pub va: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub sample_period: f64,
    pub steady_start: f64,
    pub trajectory_period: f64,
    pub traces: Vec<TraceRow>,
}

impl SimResult {
    pub fn errors(&self) -> Vec<f64> {
        self.traces.iter().map(|r| r.error).collect()
    }

    pub fn references(&self) -> Vec<f64> {
        self.traces.iter().map(|r| r.theta_d).collect()
    }

    /// Tick indices of the steady-state window `[steady_start, last tick)`.
    pub fn steady_window(&self) -> std::ops::Range<usize> {
        let start = (self.steady_start / self.sample_period).round() as usize;
        start.min(self.traces.len())..self.traces.len().saturating_sub(1)
    }

    pub fn steady_p2p_percent(&self) -> Result<f64> {
        metrics::peak_to_peak_percent(&self.errors(), &self.references(), self.steady_window())
    }

    pub fn steady_spectrum(&self, reference_max: Option<f64>) -> Result<metrics::SpectrumResult> {
        let e = self.errors();
        metrics::error_spectrum(
            &e[self.steady_window()],
            self.sample_period,
            self.trajectory_period,
            reference_max,
        )
    }
}

/// Closed loop: sense, reconstruct, control, then hold the voltage over the
/// period while the plant integrates.
pub fn run_closed_loop(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let model = build_model(&cfg.params)?;
    let period = cfg.encoder.period;
    let ticks = cfg.ticks();
    let start = cfg.trajectory.eval(0.0);
    let mut x = cfg
        .initial_state
        .unwrap_or(State::new(start.theta, start.theta_dot));

    let mut channel = SensorChannel::new(cfg.scheme, cfg.encoder, cfg.filter_oversample)?;
    let mut pending: Option<f64> = None;
    let mut prev_hat: Option<f64> = None;
    let mut traces = Vec::with_capacity(ticks + 1);

    for n in 0..=ticks {
        let t = n as f64 * period;
        if !x.is_finite() || x.theta.abs() > DIVERGENCE_LIMIT {
            return Err(Error::Divergence {
                tick: n,
                time: t,
                theta: x.theta,
            });
        }
        let reference = cfg.trajectory.eval(t);
        let vd = feedforward_voltage(&cfg.params, &reference);

        let (theta_hat, va) = match cfg.feedback {
            FeedbackMode::Sensed => {
                let theta_hat = if cfg.sensor_latency == 0 {
                    channel.update(x.theta)
                } else {
                    let ready = pending.unwrap_or_else(|| cfg.encoder.read(x.theta));
                    pending = Some(channel.update(x.theta));
                    ready
                };
                let rate_hat = prev_hat.map_or(0.0, |p| estimate_velocity(theta_hat, p, period));
                prev_hat = Some(theta_hat);
                let e =
                    ErrorState::new(reference.theta - theta_hat, reference.theta_dot - rate_hat);
                (theta_hat, vd - feedback_control(&cfg.gains, &e))
            }
            FeedbackMode::IdealContinuous => {
                let e =
                    ErrorState::new(reference.theta - x.theta, reference.theta_dot - x.theta_dot);
                (x.theta, vd - feedback_control(&cfg.gains, &e))
            }
        };

        traces.push(TraceRow {
            t,
            theta_d: reference.theta,
            theta_true: x.theta,
            theta_hat,
            error: reference.theta - x.theta,
            va,
        });
        if n == ticks {
            break;
        }

        x = match cfg.feedback {
            FeedbackMode::Sensed => model.advance(x, va, period, cfg.substeps),
            FeedbackMode::IdealContinuous => {
                let dt = period / cfg.substeps as f64;
                let law = |s: f64, x: State| {
                    let r = cfg.trajectory.eval(s);
                    let e = ErrorState::new(r.theta - x.theta, r.theta_dot - x.theta_dot);
                    feedforward_voltage(&cfg.params, &r) - feedback_control(&cfg.gains, &e)
                };
                (0..cfg.substeps).fold(x, |x, k| {
                    model.rk4_step_closed(x, t + k as f64 * dt, dt, law)
                })
            }
        };
    }

    Ok(SimResult {
        sample_period: period,
        steady_start: cfg.steady_start,
        trajectory_period: cfg.trajectory.period(),
        traces,
    })
}

/// Settings for the open-loop sensing comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenLoopConfig {
    pub encoder: EncoderModel,
    pub trajectory: Trajectory,
    /// s
    pub duration: f64,
    /// Evaluation points per sample period (also the filter rate multiplier).
    pub eval_oversample: usize,
    /// Start of the error window, s.
    pub window_start: f64,
}

impl Default for OpenLoopConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderModel::default(),
            trajectory: Trajectory::default(),
            duration: 5.0,
            eval_oversample: 10,
            window_start: 1.0,
        }
    }
}

/// Dense comparison of the sensing output against the analytic input.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenLoopResult {
    pub times: Vec<f64>,
    pub input: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub window_start: f64,
}

impl OpenLoopResult {
    pub fn errors(&self) -> Vec<f64> {
        self.input
            .iter()
            .zip(&self.reconstructed)
            .map(|(x, y)| x - y)
            .collect()
    }

    pub fn window(&self) -> std::ops::Range<usize> {
        let start = self.times.partition_point(|&t| t < self.window_start);
        start..self.times.len()
    }

    pub fn p2p_percent(&self) -> Result<f64> {
        metrics::peak_to_peak_percent(&self.errors(), &self.input, self.window())
    }
}

/// Samples the reference every period, runs it through the sensing scheme,
/// and evaluates the output at `eval_oversample` points per period.
pub fn run_open_loop_sensing(
    scheme: SensingScheme,
    cfg: &OpenLoopConfig,
) -> Result<OpenLoopResult> {
    cfg.encoder.validate()?;
    let periods = cfg.duration / cfg.trajectory.period();
    if periods < 10.0 - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "open-loop run covers {periods:.3} trajectory periods, need at least 10"
        )));
    }
    if cfg.eval_oversample < 4 {
        return Err(Error::InvalidParameter(format!(
            "eval oversample must be >= 4, got {}",
            cfg.eval_oversample
        )));
    }
    if !(cfg.window_start >= 0.0 && cfg.window_start < cfg.duration) {
        return Err(Error::InvalidParameter(format!(
            "window start {} s must lie in [0, {}) s",
            cfg.window_start, cfg.duration
        )));
    }
    let period = cfg.encoder.period;
    let m = cfg.eval_oversample;
    let ticks = (cfg.duration / period).round() as usize;
    let mut channel = SensorChannel::new(scheme, cfg.encoder, m)?;

    let mut reconstructed = Vec::with_capacity(ticks * m);
    for n in 0..ticks {
        channel.update_dense(
            cfg.trajectory.eval(n as f64 * period).theta,
            &mut reconstructed,
        );
    }
    let times: Vec<f64> = (1..=ticks * m)
        .map(|k| k as f64 * period / m as f64)
        .collect();
    let input = times
        .iter()
        .map(|&t| cfg.trajectory.eval(t).theta)
        .collect();
    Ok(OpenLoopResult {
        times,
        input,
        reconstructed,
        window_start: cfg.window_start,
    })
}
