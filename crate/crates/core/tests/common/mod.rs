//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use holdtrack::plant::{LtiModel, State};
use num_complex::Complex64;

/// Closed-form `exp(A t)` for a 2x2 matrix with complex eigenvalues
/// `alpha +/- i beta`: `e^{alpha t} (cos(beta t) I + sin(beta t)/beta (A - alpha I))`.
pub fn expm_2x2(a: &[[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
    let alpha = (a[0][0] + a[1][1]) / 2.0;
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let beta = (det - alpha * alpha).sqrt();
    assert!(beta > 0.0);
    let (c, s) = ((beta * t).cos(), (beta * t).sin() / beta);
    let e = (alpha * t).exp();
    [
        [e * (c + s * (a[0][0] - alpha)), e * s * a[0][1]],
        [e * s * a[1][0], e * (c + s * (a[1][1] - alpha))],
    ]
}

/// Exact solution with the input held constant: `e^{At} x0 + A^{-1}(e^{At} - I) B u`.
pub fn exact(m: &LtiModel, x0: State, u: f64, t: f64) -> State {
    let e = expm_2x2(&m.a, t);
    let a = &m.a;
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let inv = [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ];
    let bu = [m.b[0] * u, m.b[1] * u];
    // (e^{At} - I) B u
    let w = [
        (e[0][0] - 1.0) * bu[0] + e[0][1] * bu[1],
        e[1][0] * bu[0] + (e[1][1] - 1.0) * bu[1],
    ];
    State::new(
        e[0][0] * x0.theta + e[0][1] * x0.theta_dot + inv[0][0] * w[0] + inv[0][1] * w[1],
        e[1][0] * x0.theta + e[1][1] * x0.theta_dot + inv[1][0] * w[0] + inv[1][1] * w[1],
    )
}

pub fn dft_oracle(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in x.iter().enumerate() {
                // reduce k*j mod n before scaling to keep the angle accurate
                let phase = -2.0 * PI * ((k * j) % n) as f64 / n as f64;
                acc += Complex64::from_polar(*v, phase);
            }
            acc.norm()
        })
        .collect()
}
