//! The special-function family `f_n`, `g_n`, `k_n` and the constants
//! `μ_n`, `δ_n`, `A_n`.
//!
//! `g_n` has the smooth integral representation
//!
//! ```text
//! g_n(x) = (1/n!) ∫₀^∞ e^{-y} yⁿ (e^{xy} + (-1)^{n+1} e^{-xy})
//!                       / (e^{y} + (-1)^{n+1} e^{-y}) dy,     |x| < 2,
//! ```
//!
//! and `f_n(x) = 1 − x^{n+1} g_n(x)` on (0, 2). The kernel `k_n` equals
//! `g_n(2πξ)²` for `|ξ| ≤ 1/2π` and `(2πξ)^{-2n-2}` outside; its Fourier
//! transform is assembled from a cosine transform over the compact piece
//! and the analytic/contour treatment of the algebraic tail.
//!
//! Integrands are evaluated in a factored form whose exponentials all have
//! nonpositive arguments, so nothing overflows as `|x| → 2` and parity in
//! `x` is a genuine numerical statement rather than a code path.

use crate::quad::{self, Estimate, QuadError, QuadratureSpec};
use crate::zeta::{self, ZetaError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecialError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

/// Order `n ≥ 1` of the family; parity decides which hyperbolic kernel
/// appears in the integral representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialIndex {
    n: u32,
}

impl SpecialIndex {
    pub fn new(n: u32) -> Result<Self, SpecialError> {
        if n == 0 || n > 64 {
            return Err(SpecialError::Domain(format!(
                "order must satisfy 1 ≤ n ≤ 64, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn is_odd(self) -> bool {
        self.n % 2 == 1
    }
}

pub(crate) fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|k| (k as f64).ln()).sum()
}

/// Stabilized integrand of `g_n`: the numerator is split into two
/// exponentials with arguments `(x−2)y` and `−(x+2)y`, both negative on
/// (−2, 2), so nothing overflows for either sign of `x`.
fn g_integrand(n: u32, odd: bool, x: f64, ln_fact: f64, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let ln_front = n as f64 * y.ln() - ln_fact;
    let a = (ln_front + (x - 2.0) * y).exp();
    let b = (ln_front - (x + 2.0) * y).exp();
    if odd {
        (a + b) / (1.0 + (-2.0 * y).exp())
    } else {
        (a - b) / (-(-2.0 * y).exp_m1())
    }
}

/// `|integrand| ≤ 2.4 yⁿ e^{(|x|-2) y}/n!` for y ≥ 1, integrated in closed
/// form past the truncation point.
fn g_tail_bound(n: u32, x: f64, ln_fact: f64, y: f64) -> f64 {
    let c = 2.0 - x.abs();
    2.4 * (-ln_fact).exp() * quad::exp_poly_tail(n, c, y)
}

/// `g_n(x)` for `|x| < 2` with certified truncation.
pub fn eval_g(n: SpecialIndex, x: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !(x.abs() < 2.0) {
        return Err(SpecialError::Domain(format!(
            "g_n is defined on (-2, 2); the integral diverges at x = {x}"
        )));
    }
    let ln_fact = ln_factorial(n.n());
    let odd = n.is_odd();
    let nn = n.n();
    Ok(quad::integrate_with_tail(
        |y| g_integrand(nn, odd, x, ln_fact, y),
        0.0,
        |y| g_tail_bound(nn, x, ln_fact, y),
        q,
    )?)
}

/// `g_n'(x)`: same integral with an extra factor `y` and the odd/even
/// numerator swapped.
pub fn eval_g_prime(n: SpecialIndex, x: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !(x.abs() < 2.0) {
        return Err(SpecialError::Domain(format!(
            "g_n' is defined on (-2, 2), got x = {x}"
        )));
    }
    let ln_fact = ln_factorial(n.n());
    let odd = n.is_odd();
    let nn = n.n();
    let integrand = move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let ln_front = (nn + 1) as f64 * y.ln() - ln_fact;
        let a = (ln_front + (x - 2.0) * y).exp();
        let b = (ln_front - (x + 2.0) * y).exp();
        if odd {
            // numerator e^{xy} - e^{-xy}
            (a - b) / (1.0 + (-2.0 * y).exp())
        } else {
            (a + b) / (-(-2.0 * y).exp_m1())
        }
    };
    let tail = move |y: f64| {
        let c = 2.0 - x.abs();
        2.4 * (-ln_fact).exp() * quad::exp_poly_tail(nn + 1, c, y)
    };
    Ok(quad::integrate_with_tail(integrand, 0.0, tail, q)?)
}

/// `f_n(x) = 1 − x^{n+1} g_n(x)` on (0, 2).
pub fn eval_f(n: SpecialIndex, x: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !(x > 0.0 && x < 2.0) {
        return Err(SpecialError::Domain(format!(
            "f_n is defined on (0, 2), got x = {x}"
        )));
    }
    let g = eval_g(n, x, q)?;
    let scale = x.powi(n.n() as i32 + 1);
    Ok(Estimate {
        value: 1.0 - scale * g.value,
        error: scale * g.error,
    })
}

/// Verification route for `f_n`: the direct integral
/// `(x^{n+1}/n!) ∫₀^∞ yⁿ · 2 sinh(y(1−x)) / (e^y + (−1)^{n+1} e^{-y}) dy`.
pub fn eval_f_direct(n: SpecialIndex, x: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !(x > 0.0 && x < 2.0) {
        return Err(SpecialError::Domain(format!(
            "f_n is defined on (0, 2), got x = {x}"
        )));
    }
    let ln_fact = ln_factorial(n.n());
    let odd = n.is_odd();
    let nn = n.n();
    let scale = x.powi(nn as i32 + 1);
    let integrand = move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        // 2 sinh(y(1-x)) / (e^y ± e^{-y}) = (e^{-xy} − e^{(x-2)y})/(1 ± e^{-2y});
        // both exponents are negative on (0, 2)
        let ln_front = nn as f64 * y.ln() - ln_fact;
        let num = (ln_front - x * y).exp() - (ln_front + (x - 2.0) * y).exp();
        let den = if odd {
            1.0 + (-2.0 * y).exp()
        } else {
            -(-2.0 * y).exp_m1()
        };
        num / den
    };
    let tail = move |y: f64| {
        let c = x.min(2.0 - x);
        2.4 * (-ln_fact).exp() * quad::exp_poly_tail(nn, c, y)
    };
    let inner = quad::integrate_with_tail(integrand, 0.0, tail, q)?;
    Ok(Estimate {
        value: scale * inner.value,
        error: scale * inner.error,
    })
}

/// `k_n(ξ)`: `g_n(2πξ)²` inside `|ξ| ≤ 1/2π`, `(2πξ)^{-2n-2}` outside.
pub fn eval_k(n: SpecialIndex, xi: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    let a = 2.0 * std::f64::consts::PI * xi.abs();
    if a <= 1.0 {
        let g = eval_g(n, a, q)?;
        Ok(Estimate {
            value: g.value * g.value,
            error: 2.0 * g.value.abs() * g.error + g.error * g.error,
        })
    } else {
        Ok(Estimate {
            value: a.powi(-(2 * n.n() as i32 + 2)),
            error: 0.0,
        })
    }
}

/// Chebyshev interpolant of `g_n` on [0, 1]; `g_n` is analytic well past
/// the interval so 48 coefficients reach ~1e-13.
#[derive(Debug, Clone)]
pub struct GnInterpolant {
    n: u32,
    coeffs: Vec<f64>,
    fit_error: f64,
}

impl GnInterpolant {
    pub fn build(n: SpecialIndex, tol: f64) -> Result<Self, SpecialError> {
        const DEGREE: usize = 48;
        let q = QuadratureSpec::with_abs_tol(tol.max(1e-14));
        let k = DEGREE;
        let mut values = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let u = (std::f64::consts::PI * j as f64 / k as f64).cos();
            let x = 0.5 * (u + 1.0);
            values.push(eval_g(n, x, &q)?.value);
        }
        // Chebyshev coefficients by the cosine-sum formula (endpoints halved)
        let mut coeffs = vec![0.0; k + 1];
        for (m, cm) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == k { 0.5 } else { 1.0 };
                acc += w * v * (std::f64::consts::PI * (m * j) as f64 / k as f64).cos();
            }
            *cm = 2.0 * acc / k as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[k] *= 0.5;
        let fit_error =
            coeffs[k - 2].abs() + coeffs[k - 1].abs() + coeffs[k].abs() + 10.0 * q.abs_tol;
        Ok(Self {
            n: n.n(),
            coeffs,
            fit_error,
        })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// Bound on `|interpolant − g_n|` over [0, 1].
    pub fn fit_error(&self) -> f64 {
        self.fit_error
    }

    /// Evaluate at `x ∈ [0, 1]` (Clenshaw).
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&x));
        let u = 2.0 * x - 1.0;
        clenshaw(&self.coeffs, u)
    }

    /// `g_n(x)²`.
    pub fn eval_sq(&self, x: f64) -> f64 {
        let v = self.eval(x);
        v * v
    }

    /// Coefficients of the derivative series (d/dx, including the factor 2
    /// from the [0,1] → [−1,1] map).
    fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
        let k = coeffs.len() - 1;
        let mut b = vec![0.0; k + 1];
        let mut b_plus_2 = 0.0;
        let mut b_plus_1 = 0.0;
        for m in (0..k).rev() {
            let val = b_plus_2 + 2.0 * (m as f64 + 1.0) * coeffs[m + 1];
            b[m] = val;
            b_plus_2 = b_plus_1;
            b_plus_1 = val;
        }
        b[0] *= 0.5;
        for v in b.iter_mut() {
            *v *= 2.0;
        }
        b
    }
}

fn clenshaw(coeffs: &[f64], u: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * u * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    u * b1 - b2 + coeffs[0]
}

/// `k̂_n(y) = (1/π) [ ∫₀^1 g_n(α)² cos(αy) dα + ∫₁^∞ α^{-2n-2} cos(αy) dα ]`
/// (the Fourier transform of the even kernel, written with `α = 2πξ`).
pub fn eval_k_hat(n: SpecialIndex, y: f64, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !y.is_finite() {
        return Err(SpecialError::Domain("k̂ needs finite y".into()));
    }
    let y = y.abs();
    let interp = GnInterpolant::build(n, 1e-13)?;
    let cos_part = |panels: usize| -> f64 {
        let h = 1.0 / panels as f64;
        let mut acc = crate::sum::CompensatedSum::new();
        for i in 0..panels {
            acc.add(quad::gl15_panel(
                &|a| interp.eval_sq(a) * (a * y).cos(),
                i as f64 * h,
                (i + 1) as f64 * h,
            ));
        }
        acc.value()
    };
    let panels = (y / 5.0).ceil().max(6.0) as usize;
    let coarse = cos_part(panels);
    let fine = cos_part(2 * panels);
    let tail = quad::cos_tail(2 * n.n() + 2, y, q)?;
    let pi = std::f64::consts::PI;
    Ok(Estimate {
        value: (fine + tail.value) / pi,
        error: ((coarse - fine).abs() + 2.2 * interp.fit_error() + tail.error) / pi,
    })
}

/// Decay constant `C` with `|k̂_n(y)| ≤ C / y²` for `y ≳ 1`, from two
/// integrations by parts: `C = (|Δk'(1)| + ∫₀^1 |(g²)''| + (2n+2)) / π`.
pub fn khat_decay_constant(n: SpecialIndex) -> Result<f64, SpecialError> {
    let q = QuadratureSpec::with_abs_tol(1e-11);
    let g1 = eval_g(n, 1.0, &q)?.value;
    let gp1 = eval_g_prime(n, 1.0, &q)?.value;
    let jump = (2.0 * g1 * gp1 + (2 * n.n() + 2) as f64).abs();
    // |(g²)''| via the squared interpolant differentiated twice
    let interp = GnInterpolant::build(n, 1e-13)?;
    let sq_coeffs = chebyshev_square(&interp.coeffs);
    let d1 = GnInterpolant::derivative_coeffs(&sq_coeffs);
    let d2 = GnInterpolant::derivative_coeffs(&d1);
    let curvature = quad::integrate(|x| clenshaw(&d2, 2.0 * x - 1.0).abs(), 0.0, 1.0, &q)?;
    Ok(1.2 * (jump + curvature.value + (2 * n.n() + 2) as f64) / std::f64::consts::PI)
}

/// Product of two Chebyshev series via `T_i T_j = (T_{i+j} + T_{|i-j|})/2`.
fn chebyshev_square(a: &[f64]) -> Vec<f64> {
    let k = a.len();
    let mut out = vec![0.0; 2 * k - 1];
    for i in 0..k {
        for j in 0..k {
            let p = a[i] * a[j] * 0.5;
            out[i + j] += p;
            out[i.abs_diff(j)] += p;
        }
    }
    out
}

/// `μ_n = 2^{-n-1}(1 − 2^{-n}) ζ(n+1)` for odd `n`, zero otherwise.
pub fn mu(n: SpecialIndex) -> f64 {
    if !n.is_odd() {
        return 0.0;
    }
    let nn = n.n() as i32;
    2f64.powi(-nn - 1) * (1.0 - 2f64.powi(-nn)) * zeta::zeta_even(n.n() + 1)
}

fn log_abs_zeta(sigma: f64) -> f64 {
    zeta::zeta_real(sigma)
        .map(|z| z.abs().ln())
        .expect("zeta on (1/2, ∞) \\ {1}")
}

/// `∫_a^b (σ − 1/2)^{2k-2} log|σ − 1| dσ / (2k−2)!` in closed form via the
/// binomial expansion around the singularity (used on a short interval
/// containing σ = 1, so every term is small).
fn weighted_log_pole_integral(k: u32, a: f64, b: f64) -> f64 {
    let m = (2 * k - 2) as i32;
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for j in 0..=m {
        // ∫ v^j ln|v| dv = v^{j+1} (ln|v|/(j+1) − 1/(j+1)²), v = σ−1
        let anti = |v: f64| {
            if v == 0.0 {
                return 0.0;
            }
            let jp = (j + 1) as f64;
            v.powi(j + 1) * (v.abs().ln() / jp - 1.0 / (jp * jp))
        };
        let half_pow = 0.5f64.powi(m - j);
        total += binom * half_pow * (anti(b - 1.0) - anti(a - 1.0));
        binom *= (m - j) as f64 / (j + 1) as f64;
    }
    total * (-ln_factorial(2 * k - 2)).exp()
}

/// `δ_n`: the closed form `(−1)^{k−1}/((2k)!·2^{2k})` for even `n = 2k`;
/// for odd `n = 2k−1` the simplex-collapsed integral
/// `(−1)^{k−1}/π ∫_{1/2}^∞ log|ζ(σ)| (σ−1/2)^{2k−2}/(2k−2)! dσ`,
/// with the logarithmic pole at σ = 1 split off analytically.
pub fn delta(n: SpecialIndex, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    if !n.is_odd() {
        let k = n.n() / 2;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let value = sign * (-ln_factorial(2 * k) - 2.0 * k as f64 * 2f64.ln()).exp();
        return Ok(Estimate { value, error: 0.0 });
    }
    let k = (n.n() + 1) / 2;
    let ln_w_fact = ln_factorial(2 * k - 2);
    let weight = move |sigma: f64| {
        let v = sigma - 0.5;
        if v <= 0.0 {
            if 2 * k - 2 == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            ((2 * k - 2) as f64 * v.ln() - ln_w_fact).exp()
        }
    };
    // left of the pole region: log|ζ| is smooth on [1/2, 3/4]
    let left = quad::integrate(|s| weight(s) * log_abs_zeta(s), 0.5, 0.75, q)?;
    // pole region [3/4, 5/4]: smooth factor plus closed-form log term
    let mid_smooth = quad::integrate(
        |s| weight(s) * zeta::log_abs_zeta_times_pole(s).expect("smooth factor"),
        0.75,
        1.25,
        q,
    )?;
    let mid_pole = weighted_log_pole_integral(k, 0.75, 1.25);
    // right of the pole: smooth again; truncate where log ζ(σ) ≤ κ 2^{-σ}
    // integrated against the weight drops below tolerance
    let tail_bound = move |a: f64| {
        let kappa = (1.0 + 2.0 / (a - 1.0)) * (-ln_w_fact).exp();
        kappa * quad::exp_poly_tail(2 * k - 2, 2f64.ln(), a)
    };
    let mut cut = 40.0;
    while tail_bound(cut) > q.abs_tol / q.truncation_margin && cut < 400.0 {
        cut *= 1.5;
    }
    let right = quad::integrate(|s| weight(s) * log_abs_zeta(s), 1.25, cut, q)?;
    let integral = left.value + mid_smooth.value - mid_pole + right.value;
    let error = left.error + mid_smooth.error + right.error + tail_bound(cut) + 1e-14;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    Ok(Estimate {
        value: sign * integral / std::f64::consts::PI,
        error: error / std::f64::consts::PI,
    })
}

/// `A_n = ∫₀^1 α g_n(α)² dα`.
pub fn a_constant(n: SpecialIndex, q: &QuadratureSpec) -> Result<Estimate, SpecialError> {
    let interp = GnInterpolant::build(n, 1e-13)?;
    let inner = quad::integrate(|a| a * interp.eval_sq(a), 0.0, 1.0, q)?;
    Ok(Estimate {
        value: inner.value,
        error: inner.error + 1.1 * interp.fit_error(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn idx(n: u32) -> SpecialIndex {
        SpecialIndex::new(n).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::with_abs_tol(1e-12)
    }

    #[test]
    fn g_at_zero_closed_forms() {
        let q = spec();
        // odd n: g_n(0) = 2^{-n}(1-2^{-n}) ζ(n+1); n = 1 gives π²/24
        let g10 = eval_g(idx(1), 0.0, &q).unwrap();
        assert_abs_diff_eq!(g10.value, std::f64::consts::PI.powi(2) / 24.0, epsilon = 1e-11);
        assert!((g10.value - 0.411234).abs() < 1e-6);
        for n in [3u32, 5, 7] {
            let expect = 2f64.powi(-(n as i32))
                * (1.0 - 2f64.powi(-(n as i32)))
                * zeta::zeta_even(n + 1);
            assert_abs_diff_eq!(eval_g(idx(n), 0.0, &q).unwrap().value, expect, epsilon = 1e-11);
        }
        // even n: zero
        for n in [2u32, 4, 10] {
            assert!(eval_g(idx(n), 0.0, &q).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn g_at_one_is_one() {
        let q = spec();
        for n in 1..=10 {
            let g = eval_g(idx(n), 1.0, &q).unwrap();
            assert_abs_diff_eq!(g.value, 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn g_parity() {
        let q = spec();
        for n in 1..=6 {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            for &x in &[0.3, 0.9, 1.5, 1.9] {
                let plus = eval_g(idx(n), x, &q).unwrap().value;
                let minus = eval_g(idx(n), -x, &q).unwrap().value;
                // tolerance is relative once |g| outgrows 1 (g diverges at ±2)
                let tol = 1e-10 * plus.abs().max(1.0);
                assert!(
                    (minus - sign * plus).abs() <= tol,
                    "n={n} x={x}: {minus} vs {}",
                    sign * plus
                );
            }
        }
    }

    #[test]
    fn g_domain_errors() {
        let q = spec();
        assert!(matches!(
            eval_g(idx(1), 2.0, &q),
            Err(SpecialError::Domain(_))
        ));
        assert!(matches!(
            eval_g(idx(1), -2.5, &q),
            Err(SpecialError::Domain(_))
        ));
        assert!(SpecialIndex::new(0).is_err());
    }

    #[test]
    fn g_monotone_quadrature_convergence() {
        let mut q = QuadratureSpec::with_abs_tol(1e-6);
        let coarse = eval_g(idx(2), 1.3, &q).unwrap();
        for _ in 0..5 {
            q.abs_tol *= 0.5;
            q.rel_tol = q.abs_tol;
            let fine = eval_g(idx(2), 1.3, &q).unwrap();
            assert!((fine.value - coarse.value).abs() <= coarse.error + fine.error);
        }
    }

    #[test]
    fn f_vanishes_at_one_and_tends_to_one_at_zero() {
        let q = spec();
        for n in 1..=6 {
            assert_abs_diff_eq!(eval_f(idx(n), 1.0, &q).unwrap().value, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(
                eval_f_direct(idx(n), 1.0, &q).unwrap().value,
                0.0,
                epsilon = 1e-10
            );
            let near_zero = eval_f(idx(n), 1e-3, &q).unwrap().value;
            assert!((near_zero - 1.0).abs() <= 1e-2, "n = {n}: {near_zero}");
        }
    }

    #[test]
    fn f_two_routes_agree() {
        // dual-quadrature oracle: 1 − x² g₁(x) against the direct sinh integral
        let q = spec();
        let fast = eval_f(idx(1), 0.5, &q).unwrap();
        let direct = eval_f_direct(idx(1), 0.5, &q).unwrap();
        assert_abs_diff_eq!(fast.value, direct.value, epsilon = 1e-10);
        for n in [1u32, 2, 3, 7] {
            for &x in &[0.1, 0.5, 0.99, 1.37, 1.9] {
                let a = eval_f(idx(n), x, &q).unwrap();
                let b = eval_f_direct(idx(n), x, &q).unwrap();
                let scale = a.value.abs().max(b.value.abs()).max(1.0);
                assert!(
                    (a.value - b.value).abs() <= 10.0 * q.abs_tol * scale + a.error + b.error,
                    "n={n} x={x}: {} vs {}",
                    a.value,
                    b.value
                );
            }
        }
    }

    #[test]
    fn functional_identity_on_grid() {
        // x^{n+1} g_n + f_n = 1 with f from the direct integral
        let q = spec();
        for n in [1u32, 4, 9] {
            for j in 1..=40 {
                let x = 2.0 * j as f64 / 41.0;
                let scaled_g = x.powi(n as i32 + 1) * eval_g(idx(n), x, &q).unwrap().value;
                let f = eval_f_direct(idx(n), x, &q).unwrap().value;
                let residual = (scaled_g + f - 1.0).abs();
                // relative once the cancelling terms outgrow 1
                let tol = 1e-10 * scaled_g.abs().max(1.0);
                assert!(residual < tol, "n={n} x={x}: residual {residual:e}");
            }
        }
    }

    #[test]
    fn k_branch_values_and_continuity() {
        let q = spec();
        let pi = std::f64::consts::PI;
        // 2πξ = 2 lands on the algebraic branch: 2^{-4} = 1/16 for n = 1
        assert_abs_diff_eq!(
            eval_k(idx(1), 1.0 / pi, &q).unwrap().value,
            1.0 / 16.0,
            epsilon = 1e-14
        );
        for n in 1..=6 {
            let inner = eval_k(idx(n), (1.0 - 1e-13) / (2.0 * pi), &q).unwrap().value;
            let outer = eval_k(idx(n), (1.0 + 1e-13) / (2.0 * pi), &q).unwrap().value;
            assert_abs_diff_eq!(inner, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(outer, 1.0, epsilon = 1e-10);
        }
        // evenness
        let a = eval_k(idx(2), 0.11, &q).unwrap().value;
        let b = eval_k(idx(2), -0.11, &q).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn interpolant_matches_direct_evaluation() {
        let q = spec();
        for n in [1u32, 2, 5, 10] {
            let interp = GnInterpolant::build(idx(n), 1e-13).unwrap();
            for &x in &[0.0, 0.013, 0.37, 0.5, 0.777, 0.999, 1.0] {
                let direct = eval_g(idx(n), x, &q).unwrap().value;
                assert!(
                    (interp.eval(x) - direct).abs() < 1e-11,
                    "n={n} x={x}: {} vs {direct}",
                    interp.eval(x)
                );
            }
            assert!(interp.fit_error() < 1e-10);
        }
    }

    #[test]
    fn k_hat_at_zero_against_direct_oracle() {
        // independent oracle: adaptive quadrature of g² (direct g evals, no
        // interpolant) plus the exact algebraic tail 1/(2n+1)
        let q = spec();
        for n in [1u32, 2, 3] {
            let direct = quad::integrate(
                |a| eval_g(idx(n), a, &q).unwrap().value.powi(2),
                0.0,
                1.0,
                &QuadratureSpec::with_abs_tol(1e-11),
            )
            .unwrap()
            .value;
            let oracle = (direct + 1.0 / (2 * n + 1) as f64) / std::f64::consts::PI;
            let ours = eval_k_hat(idx(n), 0.0, &q).unwrap();
            assert_abs_diff_eq!(ours.value, oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn k_hat_even_and_quadratic_decay() {
        let q = spec();
        let a = eval_k_hat(idx(1), 17.3, &q).unwrap().value;
        let b = eval_k_hat(idx(1), -17.3, &q).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
        for n in [1u32, 2] {
            let c = khat_decay_constant(idx(n)).unwrap();
            let mut y = 10.0;
            while y <= 1000.0 {
                let kh = eval_k_hat(idx(n), y, &q).unwrap();
                assert!(
                    kh.value.abs() * y * y <= c,
                    "n={n} y={y}: |k̂|y² = {} > C = {c}",
                    kh.value.abs() * y * y
                );
                y *= 1.7;
            }
        }
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu(idx(2)), 0.0);
        assert_abs_diff_eq!(
            mu(idx(1)),
            std::f64::consts::PI.powi(2) / 48.0,
            epsilon = 1e-14
        );
        assert!((mu(idx(1)) - 0.2056168).abs() < 1e-7);
        // μ_n = g_n(0)/2
        let q = spec();
        for n in 1..=10 {
            let g0 = eval_g(idx(n), 0.0, &q).unwrap().value;
            assert_abs_diff_eq!(mu(idx(n)), g0 / 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn delta_even_closed_forms() {
        let q = spec();
        assert_abs_diff_eq!(delta(idx(2), &q).unwrap().value, 0.125, epsilon = 1e-16);
        assert_abs_diff_eq!(
            delta(idx(4), &q).unwrap().value,
            -1.0 / 384.0,
            epsilon = 1e-16
        );
        // alternating sign, strictly decreasing magnitude
        let mut last_mag = f64::INFINITY;
        let mut last_sign = -1.0;
        for k in 1..=8 {
            let d = delta(idx(2 * k), &q).unwrap().value;
            assert!(d.signum() * last_sign < 0.0, "sign must alternate at k={k}");
            assert!(d.abs() < last_mag);
            last_mag = d.abs();
            last_sign = d.signum();
        }
    }

    /// Brute-force oracle for δ₁: fixed composite Simpson with the pole
    /// split, at three refinement levels, Richardson-consistent.
    fn delta1_simpson_oracle() -> f64 {
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, steps: usize| -> f64 {
            let h = (b - a) / steps as f64;
            let mut acc = f(a) + f(b);
            for i in 1..steps {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        let smooth = |s: f64| zeta::log_abs_zeta_times_pole(s).unwrap();
        let plain = |s: f64| log_abs_zeta(s);
        let pole = weighted_log_pole_integral(1, 0.75, 1.25);
        let level = |m: usize| {
            simpson(&plain, 0.5, 0.75, m)
                + simpson(&smooth, 0.75, 1.25, 2 * m)
                + simpson(&plain, 1.25, 64.0, 32 * m)
                - pole
        };
        let (a, b, c) = (level(128), level(256), level(512));
        assert!(
            (b - c).abs() < 1e-8 && (b - c).abs() * 14.0 < (a - b).abs() + 1e-9,
            "oracle not Richardson-consistent: {a} {b} {c}"
        );
        // one Richardson step on the finest pair
        (c + (c - b) / 15.0) / std::f64::consts::PI
    }

    #[test]
    fn delta_1_against_brute_force_oracle() {
        let q = spec();
        let ours = delta(idx(1), &q).unwrap();
        let oracle = delta1_simpson_oracle();
        assert!(
            (ours.value - oracle).abs() < 1e-8,
            "δ₁ = {} vs oracle {oracle}",
            ours.value
        );
        // positive, order ~0.8 (sanity on the sign convention)
        assert!(ours.value > 0.5 && ours.value < 1.0);
    }

    #[test]
    fn delta_3_simplex_collapse_matches_nested_quadrature() {
        // The 3-fold iterated integral over the simplex
        // 1/2 ≤ σ₂ ≤ σ₁ ≤ σ₀ ≤ 6 against the collapsed weight (σ−1/2)²/2
        // on the same region. The inner antiderivative
        // F1(σ) = ∫_σ^cut log|ζ| is built once by per-cell adaptive
        // quadrature on a fixed grid (the cell at σ = 1 is refined by the
        // global-adaptive scheme); the outer two integrations are suffix
        // trapezoids on the same grid.
        let q = QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
            truncation_margin: 10.0,
        };
        let cut = 6.0;
        let cells = 4096usize;
        let h = (cut - 0.5) / cells as f64;
        let grid: Vec<f64> = (0..=cells).map(|i| 0.5 + i as f64 * h).collect();
        let cell_integrals: Vec<f64> = (0..cells)
            .map(|i| {
                quad::integrate(log_abs_zeta, grid[i], grid[i + 1], &q)
                    .unwrap()
                    .value
            })
            .collect();
        // F1[i] = ∫_{grid[i]}^{cut} log|ζ|
        let mut f1 = vec![0.0; cells + 1];
        for i in (0..cells).rev() {
            f1[i] = f1[i + 1] + cell_integrals[i];
        }
        // F2[i] = ∫_{grid[i]}^{cut} F1 (trapezoid), iterated = ∫ F2
        let mut f2 = vec![0.0; cells + 1];
        for i in (0..cells).rev() {
            f2[i] = f2[i + 1] + 0.5 * h * (f1[i] + f1[i + 1]);
        }
        let mut iterated = 0.0;
        for i in 0..cells {
            iterated += 0.5 * h * (f2[i] + f2[i + 1]);
        }
        let collapsed = quad::integrate(
            |s| 0.5 * (s - 0.5).powi(2) * log_abs_zeta(s),
            0.5,
            cut,
            &q,
        )
        .unwrap()
        .value;
        assert!(
            (iterated - collapsed).abs() < 2e-4,
            "iterated {iterated} vs collapsed {collapsed}"
        );
    }

    #[test]
    fn a_constant_shape_and_dual_method() {
        let q = spec();
        for n in 1..=8 {
            // pointwise bound scan first: 0 < g ≤ 1 on (0, 1]
            let interp = GnInterpolant::build(idx(n), 1e-13).unwrap();
            for j in 1..=64 {
                let x = j as f64 / 64.0;
                let g = interp.eval(x);
                assert!(g > 0.0 && g <= 1.0 + 1e-12, "n={n} x={x}: g={g}");
            }
            let a = a_constant(idx(n), &q).unwrap();
            assert!(a.value > 0.0 && a.value < 0.5, "n={n}: A = {}", a.value);
        }
        // dual-method oracle at n = 1, 2: 10⁴-point trapezoid vs adaptive
        for n in [1u32, 2] {
            let interp = GnInterpolant::build(idx(n), 1e-13).unwrap();
            let f = |x: f64| x * interp.eval_sq(x);
            let pts = 10_000usize;
            let h = 1.0 / (pts - 1) as f64;
            let mut acc = 0.5 * (f(0.0) + f(1.0));
            for i in 1..pts - 1 {
                acc += f(i as f64 * h);
            }
            let trapezoid = acc * h;
            let adaptive = a_constant(idx(n), &q).unwrap().value;
            assert!(
                (trapezoid - adaptive).abs() < 1e-8,
                "n={n}: trapezoid {trapezoid} vs adaptive {adaptive}"
            );
        }
        // degenerate harness check: replacing g by g(1) = 1 gives ∫ α = 1/2
        let dull = quad::integrate(|x| x * 1.0f64.powi(2), 0.0, 1.0, &q).unwrap();
        assert_abs_diff_eq!(dull.value, 0.5, epsilon = 1e-13);
    }

    #[test]
    fn a_constant_reference_values() {
        // anchored by direct nested quadrature (no interpolant)
        let q = spec();
        let direct = quad::integrate(
            |a| a * eval_g(idx(1), a, &q).unwrap().value.powi(2),
            0.0,
            1.0,
            &QuadratureSpec::with_abs_tol(1e-11),
        )
        .unwrap()
        .value;
        let ours = a_constant(idx(1), &q).unwrap().value;
        assert_abs_diff_eq!(ours, direct, epsilon = 1e-9);
    }
}
