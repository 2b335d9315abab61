//! Numerical verification of the representation of `S_n(t)` as a zero sum
//! plus a prime sum plus a parity term, and of the Dirichlet-polynomial
//! mean-value identities it leads to.
//!
//! The representation reads, for `t ≥ 1`, `x ≥ 4`:
//!
//! ```text
//! S_n(t) = Σ_γ Im{i^{n+2} e^{i(γ-t) log x}} q_n((γ-t) log x) / (π n! (log x)^n)
//!        + Σ_{2≤m≤x} Im{i^n m^{-it}} Λ(m) f_n(log m/log x) / (π √m (log m)^{n+1})
//!        + μ_n Im{i^n} log(t/2π) / (π (log x)^{n+1})
//!        + O(√x / (t (log x)^{n+2})),
//! ```
//!
//! with `q_n(u) = ∫₀^∞ y^{n+1}/(y²+u²) · 2/(e^y + (−1)^{n+1} e^{-y}) dy`.
//! The zero sum is truncated to a window `|γ − t| ≤ W`; everything outside
//! (known ordinates, their mirror images at `−γ`, and the region beyond
//! the list's horizon, estimated by zero density) is bounded through
//! `q_n(u) ≤ Q_n/u²` and reported as a certified allowance.

use super::{MomentsError, SnEvaluator};
use crate::arithmetic::PrimeTable;
use crate::quad::{self, QuadratureSpec};
use crate::special::{self, SpecialIndex};
use crate::sum::CompensatedSum;

/// `Im{i^n e^{-iθ}}` for `θ = t log m`.
#[inline]
fn im_in_mit(n: u32, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match n % 4 {
        0 => -s,
        1 => c,
        2 => s,
        _ => -c,
    }
}

/// `Im{i^{n+2} e^{iθ}}`.
#[inline]
fn im_in2_eit(n: u32, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match n % 4 {
        0 => -s,
        1 => -c,
        2 => s,
        _ => c,
    }
}

/// `Im{i^n}`.
#[inline]
fn im_in(n: u32) -> f64 {
    match n % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

/// `q_n(u)`, certified.
fn q_kernel(n: u32, u: f64, q: &QuadratureSpec) -> Result<(f64, f64), MomentsError> {
    let odd = n % 2 == 1;
    let u2 = u * u;
    let integrand = move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let den = if odd {
            1.0 + (-2.0 * y).exp()
        } else {
            -(-2.0 * y).exp_m1()
        };
        y.powi(n as i32 + 1) / (y * y + u2) * 2.0 * (-y).exp() / den
    };
    // for y ≥ 1: integrand ≤ 2.4 y^{n-1} e^{-y}
    let tail = move |y: f64| 2.4 * quad::exp_poly_tail(n.saturating_sub(1), 1.0, y);
    let est = quad::integrate_with_tail(integrand, 0.0, tail, q)?;
    Ok((est.value, est.error))
}

/// `Q_n = ∫₀^∞ y^{n+1} · 2/(e^y ± e^{-y}) dy`, so that `q_n(u) ≤ Q_n/u²`.
fn q_envelope(n: u32, q: &QuadratureSpec) -> Result<f64, MomentsError> {
    let odd = n % 2 == 1;
    let integrand = move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let den = if odd {
            1.0 + (-2.0 * y).exp()
        } else {
            -(-2.0 * y).exp_m1()
        };
        y.powi(n as i32 + 1) * 2.0 * (-y).exp() / den
    };
    let tail = move |y: f64| 2.4 * quad::exp_poly_tail(n + 1, 1.0, y);
    Ok(quad::integrate_with_tail(integrand, 0.0, tail, q)?.value)
}

#[derive(Debug, Clone, Copy)]
pub struct RepresentationCheck {
    pub s_n: f64,
    pub reconstruction: f64,
    pub residual: f64,
    /// Certified bound for the known ordinates left outside the window;
    /// scales like 1/W through the (γ−t)⁻² decay of the kernel.
    pub window_tail: f64,
    /// Window-independent far field: mirror ordinates at −γ and the
    /// region beyond the zero list's horizon (bounded by zero density).
    pub far_tail: f64,
    /// Quadrature error accumulated over the kernel evaluations.
    pub quadrature_error: f64,
}

impl RepresentationCheck {
    /// Everything certified: window tail, far field, quadrature.
    pub fn allowance(&self) -> f64 {
        self.window_tail + self.far_tail + self.quadrature_error
    }
}

/// Check the representation at one point. `window` is the half-width of
/// the zero window around `t`.
pub fn representation_residual(
    n: u32,
    t: f64,
    x: f64,
    window: f64,
    eval: &SnEvaluator,
    table: &PrimeTable,
) -> Result<RepresentationCheck, MomentsError> {
    if !(t >= 1.0) || !(x >= 4.0) || !(window > 0.0) {
        return Err(MomentsError::Domain(
            "need t ≥ 1, x ≥ 4, window > 0".into(),
        ));
    }
    if (table.limit() as f64) < x {
        return Err(MomentsError::Domain(format!(
            "prime table limit {} below x = {x}",
            table.limit()
        )));
    }
    let idx = SpecialIndex::new(n)?;
    let zeros = eval.zeros();
    if t + window > zeros.t_max() {
        return Err(MomentsError::Horizon {
            t: t + window,
            t_max: zeros.t_max(),
        });
    }
    let log_x = x.ln();
    let qspec = QuadratureSpec::with_abs_tol(1e-12);
    let ln_fact = (2..=n as u64).map(|k| (k as f64).ln()).sum::<f64>();
    let zero_sum_scale = (-ln_fact).exp() / (std::f64::consts::PI * log_x.powi(n as i32));

    // zero sum over the window
    let mut i2 = CompensatedSum::new();
    let mut quad_err = 0.0;
    for &g in zeros.window(t - window, t + window) {
        let u = (g - t) * log_x;
        let (qv, qe) = q_kernel(n, u, &qspec)?;
        i2.add(im_in2_eit(n, u) * qv);
        quad_err += qe;
    }
    let i2 = i2.value() * zero_sum_scale;
    quad_err *= zero_sum_scale;

    // window tail: q_n(u) ≤ Q_n/u² over everything outside
    let q_env = q_envelope(n, &qspec)?;
    let mut outside = CompensatedSum::new();
    let mut mirror = CompensatedSum::new();
    for &g in zeros.ordinates() {
        if (g - t).abs() > window {
            outside.add(1.0 / ((g - t) * (g - t)));
        }
        // mirror ordinate at -γ
        mirror.add(1.0 / ((g + t) * (g + t)));
    }
    // beyond the horizon on both sides, via the density log(u/2π)/2π
    let horizon = zeros.t_max();
    let density_tail = 1.1 / (2.0 * std::f64::consts::PI)
        * ((horizon / (2.0 * std::f64::consts::PI)).ln() + 2.0)
        * (1.0 / (horizon - t) + 1.0 / (horizon + t));
    let tail_scale = q_env / (log_x * log_x) * zero_sum_scale;
    let window_tail = outside.value() * tail_scale;
    let far_tail = (mirror.value() + density_tail) * tail_scale;

    // prime sum
    let interp = special::GnInterpolant::build(idx, 1e-13)?;
    let mut i3 = CompensatedSum::new();
    for pp in table.prime_powers() {
        let m = pp.value as f64;
        if m > x {
            break;
        }
        let lm = m.ln();
        let r = (lm / log_x).min(1.0);
        let f = 1.0 - r.powi(n as i32 + 1) * interp.eval(r);
        i3.add(im_in_mit(n, t * lm) * pp.lambda() / (m.sqrt() * lm.powi(n as i32 + 1)) * f);
    }
    let i3 = i3.value() / std::f64::consts::PI;

    // parity term
    let i4 = special::mu(idx) * im_in(n) * (t / (2.0 * std::f64::consts::PI)).ln()
        / (std::f64::consts::PI * log_x.powi(n as i32 + 1));

    let s_n = eval.s_n(n, t)?;
    let reconstruction = i2 + i3 + i4;
    Ok(RepresentationCheck {
        s_n,
        reconstruction,
        residual: (s_n - reconstruction).abs(),
        window_tail,
        far_tail,
        quadrature_error: quad_err,
    })
}

/// Both sides of the Dirichlet-polynomial mean square: the time integral
/// `(1/π²) ∫₁^T |Σ_m Im{i^n m^{-it}} c_m|² dt` against the main term
/// `(T/2π²) Σ_m Λ²(m) f_n²(log m/log x)/(m (log m)^{2n+2})`.
pub fn gn_check(
    n: u32,
    x: f64,
    t_big: f64,
    table: &PrimeTable,
) -> Result<(f64, f64), MomentsError> {
    let (coeffs, formula) = dirichlet_coefficients(n, x, table)?;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    if t_big <= 1.0 {
        return Ok((0.0, formula * t_big.max(0.0) / (2.0 * pi2)));
    }
    let poly = |t: f64| -> f64 {
        let mut acc = 0.0;
        for &(lm, c) in &coeffs {
            acc += c * im_in_mit(n, t * lm);
        }
        acc
    };
    let max_freq = x.ln();
    let panels = ((t_big - 1.0) * max_freq / 4.0).ceil().max(4.0) as usize;
    let h = (t_big - 1.0) / panels as f64;
    let mut acc = CompensatedSum::new();
    for p in 0..panels {
        acc.add(quad::gl15_panel(
            &|t| {
                let v = poly(t);
                v * v
            },
            1.0 + p as f64 * h,
            1.0 + (p + 1) as f64 * h,
        ));
    }
    Ok((acc.value() / pi2, formula * t_big / (2.0 * pi2)))
}

/// Coefficients `Λ(m) f_n(log m/log x)/(√m (log m)^{n+1})` for `m ≤ x`,
/// plus `Σ Λ²(m) f² /(m (log m)^{2n+2})`.
fn dirichlet_coefficients(
    n: u32,
    x: f64,
    table: &PrimeTable,
) -> Result<(Vec<(f64, f64)>, f64), MomentsError> {
    if !(x >= 2.0) {
        return Ok((Vec::new(), 0.0));
    }
    if (table.limit() as f64) < x {
        return Err(MomentsError::Domain(format!(
            "prime table limit {} below x = {x}",
            table.limit()
        )));
    }
    let idx = SpecialIndex::new(n)?;
    let interp = special::GnInterpolant::build(idx, 1e-13)?;
    let log_x = x.ln();
    let mut coeffs = Vec::new();
    let mut formula = CompensatedSum::new();
    for pp in table.prime_powers() {
        let m = pp.value as f64;
        if m > x {
            break;
        }
        let lm = m.ln();
        let r = (lm / log_x).min(1.0);
        let f = 1.0 - r.powi(n as i32 + 1) * interp.eval(r);
        let lambda = pp.lambda();
        coeffs.push((lm, lambda * f / (m.sqrt() * lm.powi(n as i32 + 1))));
        formula.add(lambda * lambda * f * f / (m * lm.powi(2 * n as i32 + 2)));
    }
    Ok((coeffs, formula.value()))
}

/// Both sides of the cross-term identity: the measured
/// `(2/π) Σ_m (∫₁^T S_n(t) Im{i^n m^{-it}} dt) Λ(m) f_n(...)/(√m (log m)^{n+1})`
/// against its main term `(T/π²) Σ_m Λ²(m) f_n(...)/(m (log m)^{2n+2})`.
pub fn hn_check(
    n: u32,
    x: f64,
    t_big: f64,
    eval: &SnEvaluator,
    table: &PrimeTable,
) -> Result<(f64, f64), MomentsError> {
    if t_big > eval.t_max() {
        return Err(MomentsError::Horizon {
            t: t_big,
            t_max: eval.t_max(),
        });
    }
    let idx = SpecialIndex::new(n)?;
    let interp = special::GnInterpolant::build(idx, 1e-13)?;
    let log_x = x.ln();
    let pi = std::f64::consts::PI;
    let mut numeric = CompensatedSum::new();
    let mut formula = CompensatedSum::new();
    if t_big <= 1.0 {
        return Ok((0.0, 0.0));
    }
    for pp in table.prime_powers() {
        let m = pp.value as f64;
        if m > x {
            break;
        }
        let lm = m.ln();
        let r = (lm / log_x).min(1.0);
        let f = 1.0 - r.powi(n as i32 + 1) * interp.eval(r);
        let lambda = pp.lambda();
        // ∫₁^T S_n(t) Im{i^n m^{-it}} dt by composite panels short enough
        // for both the oscillation and the kinks of S_n
        let panels = ((t_big - 1.0) * lm.max(1.0) / 3.0).ceil().max(8.0) as usize;
        let h = (t_big - 1.0) / panels as f64;
        let mut time_integral = CompensatedSum::new();
        for p in 0..panels {
            time_integral.add(quad::gl15_panel(
                &|t| eval.s_n(n, t).expect("inside horizon") * im_in_mit(n, t * lm),
                1.0 + p as f64 * h,
                1.0 + (p + 1) as f64 * h,
            ));
        }
        let weight = lambda * f / (m.sqrt() * lm.powi(n as i32 + 1));
        numeric.add(time_integral.value() * weight);
        formula.add(lambda * lambda * f / (m * lm.powi(2 * n as i32 + 2)));
    }
    Ok((
        2.0 / pi * numeric.value(),
        t_big / (pi * pi) * formula.value(),
    ))
}

/// Both sides of the completing-the-square identity:
/// `Σ_m Λ²(m)(1−f_n)²/(m (log m)^{2n+2})` against
/// `(log x)^{-(2n+2)} Σ_m Λ²(m) g_n²(log m/log x)/m` — equal term by term.
pub fn prop43_cancellation(
    n: u32,
    x: f64,
    table: &PrimeTable,
) -> Result<(f64, f64), MomentsError> {
    let idx = SpecialIndex::new(n)?;
    let interp = special::GnInterpolant::build(idx, 1e-13)?;
    let log_x = x.ln();
    let mut lhs = CompensatedSum::new();
    let mut rhs = CompensatedSum::new();
    for pp in table.prime_powers() {
        let m = pp.value as f64;
        if m > x {
            break;
        }
        let lm = m.ln();
        let r = (lm / log_x).min(1.0);
        let g = interp.eval(r);
        let f = 1.0 - r.powi(n as i32 + 1) * g;
        let lambda2 = pp.lambda() * pp.lambda();
        lhs.add(lambda2 * (1.0 - f) * (1.0 - f) / (m * lm.powi(2 * n as i32 + 2)));
        rhs.add(lambda2 * g * g / m);
    }
    Ok((lhs.value(), rhs.value() * log_x.powi(-(2 * n as i32 + 2))))
}

/// `Σ_{p ≤ x} (log² p / p) g_n²(log p/log x)`, the prime sum whose leading
/// behaviour is `A_n log² x`.
pub fn gsq_weighted_prime_sum(
    n: u32,
    x: f64,
    table: &PrimeTable,
) -> Result<f64, MomentsError> {
    if (table.limit() as f64) < x {
        return Err(MomentsError::Domain(format!(
            "prime table limit {} below x = {x}",
            table.limit()
        )));
    }
    let idx = SpecialIndex::new(n)?;
    let interp = special::GnInterpolant::build(idx, 1e-13)?;
    let log_x = x.ln();
    let mut acc = CompensatedSum::new();
    for p in table.primes() {
        let pf = p as f64;
        if pf > x {
            break;
        }
        let lp = pf.ln();
        let g = interp.eval((lp / log_x).min(1.0));
        acc.add(lp * lp / pf * g * g);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::super::test_fixtures::evaluator_1000;
    use super::*;
    use crate::arithmetic::sieve;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn table_2000() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| sieve(2000).unwrap())
    }

    #[test]
    fn imaginary_part_selectors() {
        // spot-check the i^n bookkeeping against num_complex
        use num_complex::Complex64;
        let i = Complex64::new(0.0, 1.0);
        for n in 0..8u32 {
            for &theta in &[0.3f64, 1.9, 4.4] {
                let expect = (i.powu(n) * Complex64::new(0.0, -theta).exp()).im;
                assert_abs_diff_eq!(im_in_mit(n, theta), expect, epsilon = 1e-14);
                let expect2 = (i.powu(n + 2) * Complex64::new(0.0, theta).exp()).im;
                assert_abs_diff_eq!(im_in2_eit(n, theta), expect2, epsilon = 1e-14);
            }
            assert_abs_diff_eq!(im_in(n), i.powu(n).im, epsilon = 1e-15);
        }
    }

    #[test]
    fn q_kernel_reference_value() {
        // n = 1, u = 0: ∫ y² / y² · 2/(e^y+e^{-y}) dy = ∫ sech y dy = π/2
        let q = QuadratureSpec::with_abs_tol(1e-12);
        let (v, _) = q_kernel(1, 0.0, &q).unwrap();
        assert_abs_diff_eq!(v, std::f64::consts::PI / 2.0, epsilon = 1e-10);
        // envelope dominates pointwise values
        let env = q_envelope(1, &q).unwrap();
        for &u in &[2.0, 5.0, 20.0] {
            let (qv, _) = q_kernel(1, u, &q).unwrap();
            assert!(qv <= env / (u * u) + 1e-12);
        }
    }

    #[test]
    fn representation_close_at_moderate_height() {
        let e = evaluator_1000();
        let t = table_2000();
        let check = representation_residual(1, 150.0, 1000.0, 50.0, e, t).unwrap();
        // the residual carries the O(√x/(t log^{n+2} x)) term: √1000/(150·6.9³)≈6e-3
        assert!(
            check.residual <= check.allowance() + 0.05,
            "residual {} allowance {}",
            check.residual,
            check.allowance()
        );
        // even n kills the parity term exactly
        let check2 = representation_residual(2, 150.0, 1000.0, 50.0, e, t).unwrap();
        assert!(check2.residual < 0.1);
    }

    #[test]
    fn window_tail_halves_when_window_doubles() {
        let e = evaluator_1000();
        let t = table_2000();
        let narrow = representation_residual(1, 300.0, 1000.0, 40.0, e, t).unwrap();
        let wide = representation_residual(1, 300.0, 1000.0, 80.0, e, t).unwrap();
        assert!(
            wide.window_tail <= narrow.window_tail / 2.0,
            "narrow {} wide {}",
            narrow.window_tail,
            wide.window_tail
        );
        // and the certified tails also shrink as x grows (scale (log x)^{-n-2})
        let small_x = representation_residual(1, 300.0, 500.0, 40.0, e, t).unwrap();
        let large_x = representation_residual(1, 300.0, 2000.0, 40.0, e, t).unwrap();
        assert!(large_x.window_tail < small_x.window_tail);
        assert!(large_x.far_tail < small_x.far_tail);
    }

    #[test]
    fn representation_rejects_bad_inputs() {
        let e = evaluator_1000();
        let t = table_2000();
        assert!(representation_residual(1, 0.5, 100.0, 10.0, e, t).is_err());
        assert!(representation_residual(1, 100.0, 3.0, 10.0, e, t).is_err());
        assert!(matches!(
            representation_residual(1, 990.0, 100.0, 50.0, e, t),
            Err(MomentsError::Horizon { .. })
        ));
    }

    #[test]
    fn gn_small_case_numeric_vs_formula() {
        // x = 4 has three prime powers; tolerance is the x² slack of the identity
        let t = table_2000();
        let (numeric, formula) = gn_check(1, 4.0, 10_000.0, t).unwrap();
        assert!(
            (numeric - formula).abs() <= 16.0,
            "numeric {numeric} vs formula {formula}"
        );
        // the main term is linear in T
        let (_, f1) = gn_check(1, 4.0, 5000.0, t).unwrap();
        let (_, f2) = gn_check(1, 4.0, 10_000.0, t).unwrap();
        assert_abs_diff_eq!(f2, 2.0 * f1, epsilon = 1e-9);
        // empty polynomial below m = 2
        let (n0, f0) = gn_check(1, 1.5, 100.0, t).unwrap();
        assert_eq!((n0, f0), (0.0, 0.0));
    }

    #[test]
    fn hn_zero_length_integration() {
        let e = evaluator_1000();
        let t = table_2000();
        let (numeric, _) = hn_check(1, 4.0, 1.0, e, t).unwrap();
        assert_eq!(numeric, 0.0);
    }

    #[test]
    fn completing_the_square_is_machine_exact() {
        let t = sieve(100_000).unwrap();
        for n in [1u32, 2, 3] {
            let (lhs, rhs) = prop43_cancellation(n, 1e5, &t).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1e-300),
                "n={n}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn f_bounded_on_unit_interval_sup_recorded() {
        // |f_n| ≤ 1 on (0, 1]: record the observed sup (attained as x → 0⁺)
        let idx = SpecialIndex::new(1).unwrap();
        let interp = special::GnInterpolant::build(idx, 1e-13).unwrap();
        let mut sup: f64 = 0.0;
        for j in 1..=1000 {
            let r = j as f64 / 1000.0;
            let f = 1.0 - r.powi(2) * interp.eval(r);
            assert!((-0.01..=1.0001).contains(&f), "r={r}: f={f}");
            sup = sup.max(f.abs());
        }
        assert!(sup <= 1.0001, "observed sup |f₁| on (0,1] = {sup}");
    }

    #[test]
    fn gsq_prime_sum_tracks_a_constant() {
        // at x = 1e5 the ratio to A_n log²x is already within ~5%
        let t = sieve(100_000).unwrap();
        let q = QuadratureSpec::with_abs_tol(1e-12);
        for n in [1u32, 2] {
            let sum = gsq_weighted_prime_sum(n, 1e5, &t).unwrap();
            let a = special::a_constant(SpecialIndex::new(n).unwrap(), &q)
                .unwrap()
                .value;
            let ratio = sum / (1e5f64).ln().powi(2) / a;
            assert!((ratio - 1.0).abs() < 0.15, "n={n}: ratio {ratio}");
        }
    }
}
