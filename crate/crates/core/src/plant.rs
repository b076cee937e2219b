//! Linearized motor-pendulum model and its fixed-step integrator.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Electro-mechanical constants of the motor-pendulum assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumParams {
    /// kg
    pub mass: f64,
    /// m
    pub length: f64,
    /// m/s^2
    pub gravity: f64,
    /// kg m^2
    pub inertia: f64,
    /// ohm
    pub armature_resistance: f64,
    /// V s/rad
    pub back_emf: f64,
    /// N m/A
    pub torque_constant: f64,
    /// N m s/rad
    pub damping: f64,
}

impl Default for PendulumParams {
    fn default() -> Self {
        Self {
            mass: 0.125,
            length: 0.33,
            gravity: 9.807,
            inertia: 0.0042,
            armature_resistance: 3.4,
            back_emf: 0.0592,
            torque_constant: 0.0592,
            damping: 0.0045,
        }
    }
}

impl PendulumParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mass", self.mass),
            ("length", self.length),
            ("gravity", self.gravity),
            ("inertia", self.inertia),
            ("armature_resistance", self.armature_resistance),
            ("back_emf", self.back_emf),
            ("torque_constant", self.torque_constant),
            ("damping", self.damping),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "pendulum parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// `m g l / (2 J)`, the gravity stiffness per unit inertia.
    pub fn gravity_stiffness(&self) -> f64 {
        self.mass * self.gravity * self.length / (2.0 * self.inertia)
    }

    /// `(b + Kb Ki / Ra) / J`, viscous plus back-emf damping per unit inertia.
    pub fn damping_rate(&self) -> f64 {
        (self.damping + self.back_emf * self.torque_constant / self.armature_resistance)
            / self.inertia
    }

    /// `Ki / (Ra J)`.
    pub fn input_gain(&self) -> f64 {
        self.torque_constant / (self.armature_resistance * self.inertia)
    }

    /// Undamped natural frequency `sqrt(m g l / 2J) / 2 pi`.
    pub fn natural_frequency_hz(&self) -> f64 {
        self.gravity_stiffness().sqrt() / (2.0 * PI)
    }
}

/// `x' = A x + B u` with `x = [theta, theta_dot]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtiModel {
    pub a: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl LtiModel {
    pub fn new(params: &PendulumParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            a: [
                [0.0, 1.0],
                [-params.gravity_stiffness(), -params.damping_rate()],
            ],
            b: [0.0, params.input_gain()],
        })
    }

    pub fn derivative(&self, x: State, input: f64) -> State {
        let a = &self.a;
        State {
            theta: a[0][0] * x.theta + a[0][1] * x.theta_dot + self.b[0] * input,
            theta_dot: a[1][0] * x.theta + a[1][1] * x.theta_dot + self.b[1] * input,
        }
    }

    /// Eigenvalues of `A`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        eigenvalues_2x2(&self.a)
    }

    /// Imaginary part of the eigenvalues in Hz (damped oscillation frequency).
    pub fn eigenfrequency_hz(&self) -> f64 {
        self.eigenvalues()[0].im.abs() / (2.0 * PI)
    }

    /// One classical RK4 step of length `dt` with `input` held constant.
    pub fn rk4_step(&self, x: State, input: f64, dt: f64) -> State {
        let k1 = self.derivative(x, input);
        let k2 = self.derivative(x.axpy(0.5 * dt, k1), input);
        let k3 = self.derivative(x.axpy(0.5 * dt, k2), input);
        let k4 = self.derivative(x.axpy(dt, k3), input);
        State {
            theta: x.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            theta_dot: x.theta_dot
                + dt / 6.0
                    * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
        }
    }

    /// One RK4 step where the input is a function of time and state, so a
    /// feedback law acts continuously inside the step.
    pub fn rk4_step_closed(
        &self,
        x: State,
        t: f64,
        dt: f64,
        law: impl Fn(f64, State) -> f64,
    ) -> State {
        let f = |t: f64, x: State| self.derivative(x, law(t, x));
        let k1 = f(t, x);
        let k2 = f(t + 0.5 * dt, x.axpy(0.5 * dt, k1));
        let k3 = f(t + 0.5 * dt, x.axpy(0.5 * dt, k2));
        let k4 = f(t + dt, x.axpy(dt, k3));
        State {
            theta: x.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            theta_dot: x.theta_dot
                + dt / 6.0
                    * (k1.theta_dot + 2.0 * k2.theta_dot + 2.0 * k3.theta_dot + k4.theta_dot),
        }
    }

    /// Holds `input` over `span` seconds, split into `substeps` RK4 steps.
    pub fn advance(&self, x: State, input: f64, span: f64, substeps: usize) -> State {
        let dt = span / substeps as f64;
        (0..substeps).fold(x, |x, _| self.rk4_step(x, input, dt))
    }
}

pub fn build_model(params: &PendulumParams) -> Result<LtiModel> {
    LtiModel::new(params)
}

pub fn integrate_step(model: &LtiModel, x: State, input: f64, dt: f64) -> State {
    model.rk4_step(x, input, dt)
}

/// Eigenvalues of a real 2x2 matrix from its trace and determinant.
pub fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    [half + disc, half - disc]
}

/// Angle and angular rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    /// rad
    pub theta: f64,
    /// rad/s
    pub theta_dot: f64,
}

impl State {
    pub fn new(theta: f64, theta_dot: f64) -> Self {
        Self { theta, theta_dot }
    }

    fn axpy(self, k: f64, d: State) -> State {
        State {
            theta: self.theta + k * d.theta,
            theta_dot: self.theta_dot + k * d.theta_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.theta_dot.is_finite()
    }
}
