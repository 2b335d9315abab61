//! Montgomery's pair-correlation functional `F(α, T)` and the kernel pair
//! sum over zero ordinates.
//!
//! `F` is evaluated as the literal weighted double sum (O(N²), feasible to
//! N ≈ 5000 and beyond with the fixed-chunk parallel reduction). A second,
//! sum-of-squares route groups the pairs through the exact identity
//! `w(u) = 2∫₀^∞ e^{-2v} cos(uv) dv`, which turns the double sum into an
//! integral of `|Σ_γ e^{iφγ}|²` — used as the large-N strategy and as the
//! equivalence check for the direct estimator.

use super::MomentsError;
use crate::zeta::ZeroList;
use crate::quad::{self, QuadratureSpec};
use crate::special::{self, SpecialIndex};
use crate::sum::{par_sum_ranges, CompensatedSum};
use rayon::prelude::*;

/// Montgomery's weight `w(u) = 4/(4 + u²)`.
#[inline]
pub fn pair_weight(u: f64) -> f64 {
    4.0 / (4.0 + u * u)
}

/// One evaluation of `F(α, T)`.
#[derive(Debug, Clone, Copy)]
pub struct FAlphaEstimate {
    pub alpha: f64,
    pub t_big: f64,
    pub value: f64,
    pub zero_count: usize,
}

fn require_complete(t_big: f64, zeros: &ZeroList) -> Result<(), MomentsError> {
    if !(t_big >= 2.0) {
        return Err(MomentsError::Domain(format!("need T ≥ 2, got {t_big}")));
    }
    if t_big > zeros.t_max() + 1e-9 {
        return Err(MomentsError::Horizon {
            t: t_big,
            t_max: zeros.t_max(),
        });
    }
    Ok(())
}

/// Direct `F(α, T)`: the normalized double sum over ordinate pairs.
/// Exactly even in α (the cosine kernel is evaluated at `|α| log T`).
pub fn f_alpha(alpha: f64, t_big: f64, zeros: &ZeroList) -> Result<FAlphaEstimate, MomentsError> {
    require_complete(t_big, zeros)?;
    let ords = zeros.window(0.0, t_big);
    let n = ords.len();
    let c = alpha.abs() * t_big.ln();
    let norm = t_big / (2.0 * std::f64::consts::PI) * t_big.ln();
    // diagonal: N terms with w(0) = 1
    let mut total = n as f64;
    if n > 1 {
        let off_diag = par_sum_ranges(n as u64 - 1, 16, |lo, hi| {
            let mut acc = CompensatedSum::new();
            for i in lo..hi {
                let gi = ords[i as usize];
                for &gj in &ords[i as usize + 1..] {
                    let d = gj - gi;
                    acc.add((c * d).cos() * pair_weight(d));
                }
            }
            acc
        });
        total += 2.0 * off_diag;
    }
    Ok(FAlphaEstimate {
        alpha,
        t_big,
        value: total / norm,
        zero_count: n,
    })
}

/// Grouped `F(α, T)`: the same quantity through
/// `Σ_{γ,γ'} e^{ic(γ-γ')} w(γ-γ') = ∫₀^∞ e^{-2v} (|S(c+v)|² + |S(c-v)|²) dv`
/// with `S(φ) = Σ_γ e^{iφγ}` — each integration node costs one single sum
/// squared instead of a double sum.
pub fn f_alpha_grouped(
    alpha: f64,
    t_big: f64,
    zeros: &ZeroList,
) -> Result<FAlphaEstimate, MomentsError> {
    require_complete(t_big, zeros)?;
    let ords = zeros.window(0.0, t_big);
    let n = ords.len();
    let c = alpha.abs() * t_big.ln();
    let norm = t_big / (2.0 * std::f64::consts::PI) * t_big.ln();
    if n == 0 {
        return Ok(FAlphaEstimate {
            alpha,
            t_big,
            value: 0.0,
            zero_count: 0,
        });
    }
    let gamma_max = *ords.last().unwrap();
    // |S|² ≤ N², so e^{-2v} N²/2 below 1e-9 fixes the truncation point
    let v_cut = 0.5 * ((n * n) as f64 / 1e-9).ln();
    // panel short enough that GL15 resolves oscillation at frequency γ_max
    let panels = (v_cut * gamma_max / 6.0).ceil().max(8.0) as usize;
    let h = v_cut / panels as f64;
    let sum_sq = |phi: f64| -> f64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for &g in ords {
            let (s, c) = (phi * g).sin_cos();
            re += c;
            im += s;
        }
        re * re + im * im
    };
    let integrand = |v: f64| (-2.0 * v).exp() * (sum_sq(c + v) + sum_sq((c - v).abs()));
    let partials: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|p| quad::gl15_panel(&integrand, p as f64 * h, (p + 1) as f64 * h))
        .collect();
    let mut acc = CompensatedSum::new();
    for p in partials {
        acc.add(p);
    }
    Ok(FAlphaEstimate {
        alpha,
        t_big,
        value: acc.value() / norm,
        zero_count: n,
    })
}

/// `∫₁^{α_max} F(α)/α^{2n+2} dα` by fixed composite quadrature, plus a
/// certified bound for the truncated tail from the running maximum of `F`.
#[derive(Debug, Clone, Copy)]
pub struct FIntegral {
    pub value: f64,
    pub tail_bound: f64,
    pub f_running_max: f64,
}

pub fn f_integral(
    n: u32,
    t_big: f64,
    alpha_max: f64,
    zeros: &ZeroList,
) -> Result<FIntegral, MomentsError> {
    if !(alpha_max > 1.0) {
        return Err(MomentsError::Domain(format!(
            "need alpha_max > 1, got {alpha_max}"
        )));
    }
    require_complete(t_big, zeros)?;
    let power = -(2 * n as i32 + 2);
    let panels = ((alpha_max - 1.0) / 0.5).ceil() as usize;
    let h = (alpha_max - 1.0) / panels as f64;
    let mut acc = CompensatedSum::new();
    let mut f_max: f64 = 0.0;
    for p in 0..panels {
        let lo = 1.0 + p as f64 * h;
        let hi = lo + h;
        let half = 0.5 * h;
        let mid = 0.5 * (lo + hi);
        let mut panel = 0.0;
        for &(xn, wn) in quad::GL15.iter() {
            let a = mid + half * xn;
            let f = f_alpha(a, t_big, zeros)?.value;
            f_max = f_max.max(f);
            panel += wn * f * a.powi(power);
        }
        acc.add(panel * half);
    }
    let tail_bound =
        f_max * alpha_max.powi(power + 1) / (2.0 * n as f64 + 1.0);
    Ok(FIntegral {
        value: acc.value(),
        tail_bound,
        f_running_max: f_max,
    })
}

/// Kernel pair sum `(log x)^{-(2n+1)} Σ_{γ,γ'} k̂_n((γ-γ') log x)` with a
/// certified cutoff from the quadratic decay of `k̂_n`, evaluated through a
/// dense table of `k̂_n`.
#[derive(Debug, Clone, Copy)]
pub struct PairSum {
    pub value: f64,
    /// `N k̂_n(0) (log x)^{-(2n+1)}` — the γ = γ' part.
    pub diagonal: f64,
    pub truncation_error: f64,
    pub tabulation_error: f64,
    pub y_cut: f64,
    pub pairs_used: u64,
}

/// Dense table of `k̂_n` on `[0, y_max]`, built with one fixed set of
/// quadrature nodes for the cosine part (rotation recurrences instead of
/// per-entry trig) and the contour/recurrence tail per entry.
pub(crate) struct KhatTable {
    step: f64,
    values: Vec<f64>,
    pub interp_error: f64,
}

impl KhatTable {
    pub fn build(n: SpecialIndex, y_max: f64, step: f64) -> Result<Self, MomentsError> {
        let interp = special::GnInterpolant::build(n, 1e-13)?;
        let len = (y_max / step).ceil() as usize + 4;
        let panels = (y_max / 5.0).ceil().max(8.0) as usize;
        let ph = 1.0 / panels as f64;
        // fixed cosine-part nodes: GL15 on each α-panel
        let mut nodes = Vec::with_capacity(panels * 15);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * ph;
            let half = 0.5 * ph;
            for &(xn, wn) in quad::GL15.iter() {
                let a = mid + half * xn;
                nodes.push((a, wn * half * interp.eval_sq(a)));
            }
        }
        // cos(α y_i) over the uniform grid by rotation recurrence, chunked
        // over nodes with chunk-ordered combination
        let chunk = 64usize;
        let chunks: Vec<Vec<f64>> = nodes
            .par_chunks(chunk)
            .map(|ns| {
                let mut local = vec![0.0; len];
                for &(a, w) in ns {
                    let (sin_h, cos_h) = (a * step).sin_cos();
                    let mut c = 1.0; // cos(a·0)
                    let mut s = 0.0;
                    for slot in local.iter_mut() {
                        *slot += w * c;
                        let c2 = c * cos_h - s * sin_h;
                        s = s * cos_h + c * sin_h;
                        c = c2;
                    }
                }
                local
            })
            .collect();
        let mut cos_part = vec![0.0; len];
        for local in chunks {
            for (dst, src) in cos_part.iter_mut().zip(local) {
                *dst += src;
            }
        }
        // algebraic tail per entry
        let qspec = QuadratureSpec::with_abs_tol(1e-12);
        let m = 2 * n.n() + 2;
        let tails: Vec<f64> = (0..len)
            .into_par_iter()
            .map(|i| {
                quad::cos_tail(m, i as f64 * step, &qspec)
                    .map(|e| e.value)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let pi = std::f64::consts::PI;
        let values: Vec<f64> = cos_part
            .iter()
            .zip(&tails)
            .map(|(c, t)| (c + t) / pi)
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MomentsError::Domain("k̂ table failed to evaluate".into()));
        }
        // cubic-interpolation error: |k̂⁗| ≤ (∫α⁴ g² + tail-curvature)/π
        let fourth = quad::integrate(|a| a.powi(4) * interp.eval_sq(a), 0.0, 1.0, &qspec)?;
        let tail_fourth = if n.n() >= 3 {
            1.0 / (2.0 * n.n() as f64 - 3.0)
        } else {
            2.0 // Abel-regularized bound for the slowly converging cases
        };
        let k4 = (fourth.value + tail_fourth) / pi;
        let interp_error = k4 * step.powi(4) / 24.0 * 0.6 + 1e-11;
        Ok(Self {
            step,
            values,
            interp_error,
        })
    }

    /// Cubic 4-point Lagrange interpolation.
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let pos = y / self.step;
        let i = (pos.floor() as usize).clamp(1, self.values.len() - 3);
        let u = pos - i as f64;
        let (a, b, c, d) = (
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        );
        let um1 = u + 1.0;
        let u1 = u - 1.0;
        let u2 = u - 2.0;
        -a * u * u1 * u2 / 6.0 + b * um1 * u1 * u2 / 2.0 - c * um1 * u * u2 / 2.0
            + d * um1 * u * u1 / 6.0
    }
}

pub fn rn_pair_sum(
    n: u32,
    x: f64,
    t_big: f64,
    zeros: &ZeroList,
) -> Result<PairSum, MomentsError> {
    if !(x >= 4.0) {
        return Err(MomentsError::Domain(format!("need x ≥ 4, got {x}")));
    }
    require_complete(t_big, zeros)?;
    let idx = SpecialIndex::new(n)?;
    let log_x = x.ln();
    let ords = zeros.window(0.0, t_big);
    let count = ords.len();
    let scale = log_x.powi(-(2 * n as i32 + 1));
    let qspec = QuadratureSpec::with_abs_tol(1e-12);
    let khat0 = special::eval_k_hat(idx, 0.0, &qspec)?.value;
    let diagonal = count as f64 * khat0 * scale;
    if count < 2 {
        return Ok(PairSum {
            value: diagonal,
            diagonal,
            truncation_error: 0.0,
            tabulation_error: 0.0,
            y_cut: 0.0,
            pairs_used: count as u64,
        });
    }
    let decay = special::khat_decay_constant(idx)?;
    let span = (ords[count - 1] - ords[0]) * log_x;
    // pairs with |γ-γ'| log x beyond the cut, by two-pointer sweep
    let pairs_beyond = |y_cut: f64| -> u64 {
        let d = y_cut / log_x;
        let mut lo = 0usize;
        let mut beyond = 0u64;
        for (i, &g) in ords.iter().enumerate() {
            while ords[lo] < g - d {
                lo += 1;
            }
            beyond += lo as u64; // ordinates below g - d pair with g
            let _ = i;
        }
        2 * beyond
    };
    let mut y_cut = 50.0f64;
    let budget = 1e-3 * count as f64 * khat0; // unscaled diagonal
    while y_cut < span && pairs_beyond(y_cut) as f64 * decay / (y_cut * y_cut) > budget {
        y_cut *= 2.0;
    }
    y_cut = y_cut.min(span + 1.0);
    let beyond = pairs_beyond(y_cut);
    let truncation_error = beyond as f64 * decay / (y_cut * y_cut) * scale;

    let table = KhatTable::build(idx, y_cut, 0.04)?;
    let d_cut = y_cut / log_x;
    let mut pairs_used = count as u64;
    // count pairs within the cut for the tabulation-error report
    {
        let mut hi = 0usize;
        for (i, &g) in ords.iter().enumerate() {
            if hi <= i {
                hi = i + 1;
            }
            while hi < count && ords[hi] - g <= d_cut {
                hi += 1;
            }
            pairs_used += 2 * (hi - i - 1) as u64;
        }
    }
    let off_diag = par_sum_ranges(count as u64 - 1, 16, |lo, hi| {
        let mut acc = CompensatedSum::new();
        for i in lo..hi {
            let gi = ords[i as usize];
            for &gj in &ords[i as usize + 1..] {
                let d = gj - gi;
                if d > d_cut {
                    break;
                }
                acc.add(table.eval(d * log_x));
            }
        }
        acc
    });
    let value = (count as f64 * khat0 + 2.0 * off_diag) * scale;
    Ok(PairSum {
        value,
        diagonal,
        truncation_error,
        tabulation_error: pairs_used as f64 * table.interp_error * scale,
        y_cut,
        pairs_used,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_fixtures::zeros_1000;
    use super::*;
    use crate::zeta::{find_zeros, ZeroList};
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn zeros_500() -> &'static ZeroList {
        static Z: OnceLock<ZeroList> = OnceLock::new();
        Z.get_or_init(|| find_zeros(0.0, 500.0).unwrap())
    }

    #[test]
    fn f_alpha_zero_is_positive() {
        let z = zeros_1000();
        let f = f_alpha(0.0, 1000.0, z).unwrap();
        assert!(f.value > 0.0);
        assert_eq!(f.zero_count, 649);
        // all-positive summand at α = 0 dominates the trivial lower bound
        let n = f.zero_count as f64;
        let norm = 1000.0 / (2.0 * std::f64::consts::PI) * 1000f64.ln();
        assert!(f.value >= n * n * pair_weight(1000.0) / norm);
    }

    #[test]
    fn f_alpha_is_exactly_even() {
        let z = zeros_1000();
        let a = f_alpha(0.7, 1000.0, z).unwrap().value;
        let b = f_alpha(-0.7, 1000.0, z).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn f_alpha_nonnegative_on_grid() {
        let z = zeros_500();
        let mut alpha = 0.0;
        while alpha <= 3.0 {
            let f = f_alpha(alpha, 500.0, z).unwrap();
            assert!(f.value >= -1e-12, "alpha={alpha}: {}", f.value);
            alpha += 0.25;
        }
    }

    #[test]
    fn f_alpha_rejects_incomplete_zeros() {
        let z = zeros_500();
        assert!(matches!(
            f_alpha(1.0, 800.0, z),
            Err(MomentsError::Horizon { .. })
        ));
    }

    #[test]
    fn grouped_route_matches_direct() {
        let z = zeros_1000();
        for &alpha in &[0.0, 0.3, 1.0, 1.7] {
            let direct = f_alpha(alpha, 1000.0, z).unwrap().value;
            let grouped = f_alpha_grouped(alpha, 1000.0, z).unwrap().value;
            assert!(
                (direct - grouped).abs() < 1e-6,
                "alpha={alpha}: {direct} vs {grouped}"
            );
        }
    }

    #[test]
    fn f_alpha_deterministic_across_thread_counts() {
        let z = zeros_1000();
        let reference = f_alpha(0.5, 1000.0, z).unwrap().value;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let other = pool.install(|| f_alpha(0.5, 1000.0, z).unwrap().value);
        assert_eq!(reference.to_bits(), other.to_bits());
    }

    #[test]
    fn f_integral_positive_and_tail_certified() {
        let z = zeros_500();
        let a = f_integral(1, 500.0, 4.0, &z).unwrap();
        assert!(a.value >= 0.0);
        assert!(a.tail_bound > 0.0);
        // doubling alpha_max moves the result by less than the old tail bound
        let b = f_integral(1, 500.0, 8.0, &z).unwrap();
        assert!(
            (b.value - a.value).abs() <= a.tail_bound,
            "{} vs {} (tail {})",
            a.value,
            b.value,
            a.tail_bound
        );
    }

    #[test]
    fn khat_table_matches_pointwise_evaluator() {
        let qspec = QuadratureSpec::with_abs_tol(1e-12);
        let idx = SpecialIndex::new(1).unwrap();
        let table = KhatTable::build(idx, 60.0, 0.02).unwrap();
        for &y in &[0.0, 0.013, 1.0, 7.77, 8.3, 25.0, 42.42, 59.5] {
            let direct = special::eval_k_hat(idx, y, &qspec).unwrap().value;
            let interp = table.eval(y);
            assert!(
                (interp - direct).abs() <= table.interp_error.max(1e-10),
                "y={y}: table {interp} vs direct {direct} (bound {})",
                table.interp_error
            );
        }
    }

    #[test]
    fn pair_sum_diagonal_only_below_first_gap() {
        // a single zero: the sum collapses to N·k̂(0)/(log x)^{2n+1}
        let z = find_zeros(0.0, 15.0).unwrap();
        let ps = rn_pair_sum(1, 100.0, 15.0, &z).unwrap();
        assert_eq!(ps.pairs_used, 1);
        assert_abs_diff_eq!(ps.value, ps.diagonal, epsilon = 1e-15);
        let qspec = QuadratureSpec::with_abs_tol(1e-12);
        let khat0 = special::eval_k_hat(SpecialIndex::new(1).unwrap(), 0.0, &qspec)
            .unwrap()
            .value;
        assert_abs_diff_eq!(
            ps.diagonal,
            khat0 / 100f64.ln().powi(3),
            epsilon = 1e-12
        );
    }

    #[test]
    fn pair_sum_small_case_against_brute_force() {
        // brute-force oracle: every pair through the pointwise evaluator
        let z = find_zeros(0.0, 90.0).unwrap(); // 21 zeros
        let n = 1u32;
        let x = 50.0;
        let ps = rn_pair_sum(n, x, 90.0, &z).unwrap();
        let qspec = QuadratureSpec::with_abs_tol(1e-12);
        let idx = SpecialIndex::new(n).unwrap();
        let log_x = x.ln();
        let mut brute = 0.0;
        for &a in z.ordinates() {
            for &b in z.ordinates() {
                brute += special::eval_k_hat(idx, (a - b) * log_x, &qspec)
                    .unwrap()
                    .value;
            }
        }
        brute *= log_x.powi(-(2 * n as i32 + 1));
        let allowance = ps.truncation_error + ps.tabulation_error + 1e-8;
        assert!(
            (ps.value - brute).abs() <= allowance,
            "pair sum {} vs brute {brute} (allowance {allowance})",
            ps.value
        );
        // nonnegative within the reported truncation error
        assert!(ps.value >= -(ps.truncation_error + ps.tabulation_error));
    }

    #[test]
    fn pair_sum_matches_exact_spectral_identity() {
        // Σ_{γ,γ'} k̂(c(γ-γ')) = 2 ∫₀^∞ k(ξ) |Σ_γ e^{2πi c ξ γ}|² dξ exactly;
        // the right side is an independent route through the kernel itself
        let t_big = 500.0f64;
        let zeros = zeros_500();
        let x = t_big.powf(0.3);
        let c = x.ln();
        let ps = rn_pair_sum(1, x, t_big, zeros).unwrap();
        let interp = special::GnInterpolant::build(SpecialIndex::new(1).unwrap(), 1e-13).unwrap();
        let ords = zeros.ordinates();
        let s_sq = |phi: f64| -> f64 {
            let mut re = 0.0;
            let mut im = 0.0;
            for &g in ords {
                let (s, co) = (phi * g).sin_cos();
                re += co;
                im += s;
            }
            re * re + im * im
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let kernel = |xi: f64| {
            let a = two_pi * xi;
            if a <= 1.0 {
                interp.eval_sq(a)
            } else {
                a.powi(-4)
            }
        };
        let xi_max = 30.0;
        let dphi = std::f64::consts::PI / (3.0 * t_big);
        let panels = ((two_pi * c * xi_max) / (15.0 * dphi)).ceil() as usize;
        let h = xi_max / panels as f64;
        let mut acc = CompensatedSum::new();
        for p in 0..panels {
            acc.add(quad::gl15_panel(
                &|xi| kernel(xi) * s_sq(two_pi * c * xi),
                p as f64 * h,
                (p + 1) as f64 * h,
            ));
        }
        let n = ords.len() as f64;
        let xi_tail = 2.0 * n * n * (two_pi * xi_max).powi(-3) / 3.0 * two_pi;
        let spectral = 2.0 * acc.value() * c.powi(-3);
        let allowance =
            ps.truncation_error + ps.tabulation_error + xi_tail * c.powi(-3) + 1e-6;
        assert!(
            (ps.value - spectral).abs() <= allowance,
            "pair sum {} vs spectral {spectral} (allowance {allowance:.2e})",
            ps.value
        );
    }

    #[test]
    fn pair_sum_rejects_bad_x() {
        let z = zeros_500();
        assert!(matches!(
            rn_pair_sum(1, 3.0, 500.0, z),
            Err(MomentsError::Domain(_))
        ));
    }
}
