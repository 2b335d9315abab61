//! Riemann–Siegel theta: `θ(t) = Im log Γ(1/4 + it/2) − (t/2) log π`.
//!
//! For `t ≥ 10` the Stirling-type asymptotic series is used (error well
//! below 1e-12 there); below 10 the Lanczos log-gamma supplies the exact
//! value. The antiderivative `∫₀^t θ` is closed-form for the series part,
//! which makes the argument function's first antiderivative exact between
//! consecutive zeros.

use super::{digamma, log_gamma, ZetaError, ABS_B2K};
use crate::quad::{self, QuadratureSpec};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// θ(t) together with its derivative.
#[derive(Debug, Clone, Copy)]
pub struct ThetaEval {
    pub t: f64,
    pub theta: f64,
    pub derivative: f64,
}

/// Coefficients of the asymptotic tail `Σ c_k t^{1-2k}`:
/// `c_k = (1 − 2^{1-2k}) |B_{2k}| / (4k (2k−1))`.
fn series_coefficients() -> [f64; 8] {
    let mut c = [0.0; 8];
    for (i, ck) in c.iter_mut().enumerate() {
        let k = (i + 1) as i32;
        *ck = (1.0 - 2f64.powi(1 - 2 * k)) * ABS_B2K[i] / ((4 * k * (2 * k - 1)) as f64);
    }
    c
}

fn theta_series(t: f64) -> (f64, f64) {
    let c = series_coefficients();
    let log_term = (t / (2.0 * PI)).ln();
    let mut theta = 0.5 * t * log_term - 0.5 * t - PI / 8.0;
    let mut deriv = 0.5 * log_term;
    let mut tp = t; // t^{2k-1}
    for (i, &ck) in c.iter().enumerate() {
        let k = (i + 1) as f64;
        theta += ck / tp;
        deriv -= (2.0 * k - 1.0) * ck / (tp * t);
        tp *= t * t;
    }
    (theta, deriv)
}

fn theta_lanczos(t: f64) -> (f64, f64) {
    let z = Complex64::new(0.25, 0.5 * t);
    let theta = log_gamma(z).im - 0.5 * t * PI.ln();
    let deriv = 0.5 * digamma(z).re - 0.5 * PI.ln();
    (theta, deriv)
}

/// Riemann–Siegel theta with derivative; `t ≥ 0`.
pub fn rs_theta(t: f64) -> Result<ThetaEval, ZetaError> {
    if !(t >= 0.0) {
        return Err(ZetaError::Domain(format!("rs_theta needs t ≥ 0, got {t}")));
    }
    let (theta, derivative) = if t >= 10.0 {
        theta_series(t)
    } else if t == 0.0 {
        (0.0, theta_lanczos(1e-12).1)
    } else {
        theta_lanczos(t)
    };
    Ok(ThetaEval {
        t,
        theta,
        derivative,
    })
}

/// Closed-form antiderivative of the asymptotic series, valid for t ≥ 10.
fn theta_antiderivative_series(t: f64) -> f64 {
    let c = series_coefficients();
    let mut f = 0.25 * t * t * (t / (2.0 * PI)).ln() - 0.375 * t * t - PI * t / 8.0
        + c[0] * t.ln();
    let mut tp = t * t; // t^{2k-2}
    for (i, &ck) in c.iter().enumerate().skip(1) {
        let k = (i + 1) as f64;
        f -= ck / ((2.0 * k - 2.0) * tp);
        tp *= t * t;
    }
    f
}

fn theta_integral_to_10() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let spec = QuadratureSpec::with_abs_tol(1e-13);
        quad::integrate(|t| theta_lanczos(t).0, 0.0, 10.0, &spec)
            .expect("theta quadrature on [0, 10]")
            .value
    })
}

/// `∫₀^t θ(τ) dτ`.
pub fn rs_theta_integral(t: f64) -> Result<f64, ZetaError> {
    if !(t >= 0.0) {
        return Err(ZetaError::Domain(format!(
            "rs_theta_integral needs t ≥ 0, got {t}"
        )));
    }
    if t >= 10.0 {
        Ok(theta_integral_to_10() + theta_antiderivative_series(t)
            - theta_antiderivative_series(10.0))
    } else {
        let spec = QuadratureSpec::with_abs_tol(1e-13);
        Ok(quad::integrate(|u| theta_lanczos(u).0, 0.0, t, &spec)
            .map_err(|_| ZetaError::Accuracy { achieved: f64::NAN })?
            .value)
    }
}
