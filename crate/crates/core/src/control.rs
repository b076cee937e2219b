//! Feed-forward model inversion plus full-state error feedback.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::plant::{eigenvalues_2x2, LtiModel, PendulumParams};

/// Sinusoidal reference `amplitude * sin(omega * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    /// rad
    pub amplitude: f64,
    /// rad/s
    pub omega: f64,
}

impl Default for Trajectory {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            omega: 4.0 * PI,
        }
    }
}

/// Desired angle with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryPoint {
    pub theta: f64,
    pub theta_dot: f64,
    pub theta_ddot: f64,
}

impl Trajectory {
    pub fn new(amplitude: f64, omega: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trajectory needs positive amplitude and frequency, got {amplitude} rad, {omega} rad/s"
            )));
        }
        Ok(Self { amplitude, omega })
    }

    pub fn eval(&self, t: f64) -> TrajectoryPoint {
        let (s, c) = (self.omega * t).sin_cos();
        let a = self.amplitude;
        let w = self.omega;
        TrajectoryPoint {
            theta: a * s,
            theta_dot: a * w * c,
            theta_ddot: -a * w * w * s,
        }
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn peak_to_peak(&self) -> f64 {
        2.0 * self.amplitude
    }
}

pub fn traj_eval(tr: &Trajectory, t: f64) -> TrajectoryPoint {
    tr.eval(t)
}

/// Voltage that drives the linear model exactly along `point`.
pub fn feedforward_voltage(p: &PendulumParams, point: &TrajectoryPoint) -> f64 {
    p.armature_resistance * p.inertia / p.torque_constant
        * (point.theta_ddot
            + p.damping_rate() * point.theta_dot
            + p.gravity_stiffness() * point.theta)
}

/// Tracking error `desired - actual`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorState {
    pub e_theta: f64,
    pub e_theta_dot: f64,
}

impl ErrorState {
    pub fn new(e_theta: f64, e_theta_dot: f64) -> Self {
        Self {
            e_theta,
            e_theta_dot,
        }
    }
}

/// State-feedback gains for `u = -K e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainVec {
    k_theta: f64,
    k_theta_dot: f64,
}

impl GainVec {
    /// Accepts the gains only if `A - B K` is Hurwitz for `model`.
    pub fn new(model: &LtiModel, k_theta: f64, k_theta_dot: f64) -> Result<Self> {
        let k = Self {
            k_theta,
            k_theta_dot,
        };
        let eig = k.closed_loop_eigenvalues(model);
        if !eig.iter().all(|e| e.re < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gains ({k_theta}, {k_theta_dot}) leave closed-loop poles {:?} unstable",
                eig
            )));
        }
        Ok(k)
    }

    pub fn k_theta(&self) -> f64 {
        self.k_theta
    }

    pub fn k_theta_dot(&self) -> f64 {
        self.k_theta_dot
    }

    pub fn closed_loop_matrix(&self, model: &LtiModel) -> [[f64; 2]; 2] {
        let (a, b) = (&model.a, &model.b);
        let k = [self.k_theta, self.k_theta_dot];
        [
            [a[0][0] - b[0] * k[0], a[0][1] - b[0] * k[1]],
            [a[1][0] - b[1] * k[0], a[1][1] - b[1] * k[1]],
        ]
    }

    pub fn closed_loop_eigenvalues(&self, model: &LtiModel) -> [Complex64; 2] {
        eigenvalues_2x2(&self.closed_loop_matrix(model))
    }
}

/// `u = -K e`. The applied voltage is `Vd - u`.
pub fn feedback_control(k: &GainVec, e: &ErrorState) -> f64 {
    -(k.k_theta * e.e_theta + k.k_theta_dot * e.e_theta_dot)
}

/// Places the eigenvalues of `A - B K` at `pole1`, `pole2` (Ackermann).
pub fn place_gains(model: &LtiModel, pole1: Complex64, pole2: Complex64) -> Result<GainVec> {
    if !(pole1.re < 0.0 && pole2.re < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "requested poles {pole1}, {pole2} must have negative real parts"
        )));
    }
    let sum = pole1 + pole2;
    let prod = pole1 * pole2;
    let scale = pole1.norm().max(pole2.norm()).max(1.0);
    if sum.im.abs() > 1e-9 * scale || prod.im.abs() > 1e-9 * scale * scale {
        return Err(Error::InvalidParameter(format!(
            "complex poles must come as a conjugate pair, got {pole1}, {pole2}"
        )));
    }
    // characteristic polynomial s^2 + c1 s + c0
    let c1 = -sum.re;
    let c0 = prod.re;

    let (a, b) = (&model.a, &model.b);
    let ab = [
        a[0][0] * b[0] + a[0][1] * b[1],
        a[1][0] * b[0] + a[1][1] * b[1],
    ];
    // controllability matrix [B, AB]
    let det = b[0] * ab[1] - ab[0] * b[1];
    if det.abs() < 1e-12 * (b[0].hypot(b[1]) * ab[0].hypot(ab[1])).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidModel("input cannot reach both states".into()));
    }
    // last row of the inverse controllability matrix
    let q = [-b[1] / det, b[0] / det];
    // phi(A) = A^2 + c1 A + c0 I
    let a2 = [
        [
            a[0][0] * a[0][0] + a[0][1] * a[1][0],
            a[0][0] * a[0][1] + a[0][1] * a[1][1],
        ],
        [
            a[1][0] * a[0][0] + a[1][1] * a[1][0],
            a[1][0] * a[0][1] + a[1][1] * a[1][1],
        ],
    ];
    let phi = |i: usize, j: usize| a2[i][j] + c1 * a[i][j] + if i == j { c0 } else { 0.0 };
    let k_theta = q[0] * phi(0, 0) + q[1] * phi(1, 0);
    let k_theta_dot = q[0] * phi(0, 1) + q[1] * phi(1, 1);
    GainVec::new(model, k_theta, k_theta_dot)
}

/// Backward-difference rate estimate.
pub fn estimate_velocity(theta_hat_now: f64, theta_hat_prev: f64, period: f64) -> f64 {
    (theta_hat_now - theta_hat_prev) / period
}
