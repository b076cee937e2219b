//! Closed-form frequency responses of the hold reconstructors, normalized so
//! an ideal unit-gain hold has magnitude 1 at DC.

/// Gain and phase of a hold at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqResponse {
    pub magnitude: f64,
    /// Radians.
    pub phase: f64,
}

/// `sin(x)/x`, with the series expansion near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `atan(y) - y` without cancellation for small `y`.
fn atan_minus_arg(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        let y2 = y * y;
        let y3 = y2 * y;
        -y3 / 3.0 + y3 * y2 / 5.0 - y3 * y2 * y2 / 7.0
    } else {
        y.atan() - y
    }
}

/// Zero-order hold, `(1 - e^{-jwT}) / (jwT)`.
///
/// Magnitude `|sin(wT/2) / (wT/2)|`, phase `-wT/2`.
pub fn freq_response_zoh(omega: f64, period: f64) -> FreqResponse {
    let half = omega * period / 2.0;
    FreqResponse {
        magnitude: sinc(half).abs(),
        phase: -half,
    }
}

/// Extrapolating first-order hold, `(1 + jwT) * [(1 - e^{-jwT}) / (jwT)]^2`.
///
/// Magnitude `sqrt(1 + (wT)^2) * sinc(wT/2)^2`, phase `atan(wT) - wT`.
pub fn freq_response_foh(omega: f64, period: f64) -> FreqResponse {
    let wt = omega * period;
    let s = sinc(wt / 2.0);
    FreqResponse {
        magnitude: (1.0 + wt * wt).sqrt() * s * s,
        phase: atan_minus_arg(wt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    const T: f64 = 0.001;
    const W: f64 = 4.0 * PI;

    // direct complex evaluation of the transfer functions
    fn zoh_tf(w: f64, t: f64) -> Complex64 {
        let jwt = Complex64::new(0.0, w * t);
        (Complex64::new(1.0, 0.0) - (-jwt).exp()) / jwt
    }

    fn foh_tf(w: f64, t: f64) -> Complex64 {
        let jwt = Complex64::new(0.0, w * t);
        let z = zoh_tf(w, t);
        (Complex64::new(1.0, 0.0) + jwt) * z * z
    }

    #[test]
    fn two_hertz_spot_values() {
        let z = freq_response_zoh(W, T);
        let f = freq_response_foh(W, T);
        assert!((z.magnitude - 0.999993).abs() < 1e-6, "{}", z.magnitude);
        assert!((f.magnitude - 1.000065).abs() < 2e-6, "{}", f.magnitude);
        assert!((z.phase + 6.28e-3).abs() < 1e-5, "{}", z.phase);
        assert!((f.phase + 6.6e-7).abs() < 2e-7, "{}", f.phase);
        let ratio = z.phase.abs() / f.phase.abs();
        assert!((5e3..2e4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn matches_complex_transfer_functions() {
        for k in 1..200 {
            let w = k as f64 * 10.0;
            let z = zoh_tf(w, T);
            let f = foh_tf(w, T);
            let rz = freq_response_zoh(w, T);
            let rf = freq_response_foh(w, T);
            assert!((rz.magnitude - z.norm()).abs() < 1e-12);
            assert!((rz.phase - z.arg()).abs() < 1e-12);
            assert!((rf.magnitude - f.norm()).abs() < 1e-12);
            assert!((rf.phase - f.arg()).abs() < 1e-12);
        }
    }

    #[test]
    fn dc_limit() {
        let w = 1e-6 / T;
        for r in [freq_response_zoh(w, T), freq_response_foh(w, T)] {
            assert!((r.magnitude - 1.0).abs() < 1e-11);
            assert!(r.phase.abs() < 1e-6);
        }
    }

    #[test]
    fn foh_leads_zoh_below_quarter_sample_rate() {
        for k in 1..1000 {
            let wt = k as f64 / 1000.0 * (PI / 2.0);
            let w = wt / T;
            let z = freq_response_zoh(w, T);
            let f = freq_response_foh(w, T);
            assert!(f.phase.abs() < z.phase.abs(), "wT = {wt}");
            assert!(f.magnitude >= z.magnitude, "wT = {wt}");
        }
    }
}
