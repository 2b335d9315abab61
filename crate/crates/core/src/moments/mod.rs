//! The argument function `S(t)`, its antiderivatives `S_n(t)`, their
//! second moments, and the pair-correlation machinery over zeta zeros.
//!
//! `S(t)` is computed exactly from a zero list as
//! `#\{γ ≤ t\} − θ(t)/π − 1` with the exact Riemann–Siegel theta in place
//! of the asymptotic main term of the counting formula (the two differ by
//! `O(1/t)`, which would otherwise pollute small heights). Between
//! consecutive ordinates `S` is smooth, so `S₁` accumulates exactly:
//! piecewise `c_j Δt − ΔΘ/π − Δt` with `Θ` the closed-form antiderivative
//! of theta. Higher antiderivatives are cumulative trapezoids on a fixed
//! fine grid, each level shifted by its integration constant `δ_n`.

mod pair;
mod represent;

pub use pair::{
    f_alpha, f_alpha_grouped, f_integral, pair_weight, rn_pair_sum, FAlphaEstimate, FIntegral,
    PairSum,
};
pub use represent::{
    gn_check, gsq_weighted_prime_sum, hn_check, prop43_cancellation, representation_residual,
    RepresentationCheck,
};

use crate::arithmetic::ArithmeticError;
use crate::quad::{self, QuadError, QuadratureSpec};
use crate::special::{self, SpecialError, SpecialIndex};
use crate::zeta::{self, ZeroList, ZetaError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("t = {t} beyond the zero list horizon {t_max}")]
    Horizon { t: f64, t_max: f64 },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// `S(t) = #{γ ≤ t} − θ(t)/π − 1`, with the half-limit convention at an
/// exact ordinate.
pub fn s0(t: f64, zeros: &ZeroList) -> Result<f64, MomentsError> {
    if !(t >= 0.0) {
        return Err(MomentsError::Domain(format!("need t ≥ 0, got {t}")));
    }
    if t > zeros.t_max() {
        return Err(MomentsError::Horizon {
            t,
            t_max: zeros.t_max(),
        });
    }
    let (strictly, weakly) = zeros.count_below(t);
    let count = 0.5 * (strictly + weakly) as f64;
    let theta = zeta::rs_theta(t)?.theta;
    Ok(count - theta / std::f64::consts::PI - 1.0)
}

/// Evaluator for `S_n(t)`: exact between ordinates at levels 0 and 1,
/// cumulative integration on a fixed grid for `n ≥ 2`.
pub struct SnEvaluator {
    zeros: ZeroList,
    deltas: Vec<f64>,
    max_n: u32,
    /// `∫₀^{γ_j} S(τ) dτ` for each ordinate (index 0 ↔ first ordinate).
    cumulative: Vec<f64>,
    grid_step: f64,
    /// `S_n` on the uniform grid for `n = 2..=max_n` (index `n-2`).
    levels: Vec<Vec<f64>>,
}

impl SnEvaluator {
    /// Build from a zero list; integration constants `δ_1..δ_max_n` are
    /// computed on the spot.
    pub fn build(zeros: ZeroList, max_n: u32) -> Result<Self, MomentsError> {
        if max_n == 0 || max_n > 8 {
            return Err(MomentsError::Domain(format!(
                "supported antiderivative orders are 1..=8, got {max_n}"
            )));
        }
        let q = QuadratureSpec::with_abs_tol(1e-12);
        let mut deltas = Vec::with_capacity(max_n as usize);
        for n in 1..=max_n {
            deltas.push(special::delta(SpecialIndex::new(n)?, &q)?.value);
        }
        // cumulative ∫ S between consecutive ordinates, exactly
        let theta_int = |t: f64| zeta::rs_theta_integral(t).expect("theta integral");
        let mut cumulative = Vec::with_capacity(zeros.len());
        let mut acc = 0.0;
        let mut prev = 0.0f64;
        let mut prev_theta_int = 0.0f64;
        for (j, &g) in zeros.ordinates().iter().enumerate() {
            let ti = theta_int(g);
            acc += j as f64 * (g - prev) - (ti - prev_theta_int) / std::f64::consts::PI
                - (g - prev);
            cumulative.push(acc);
            prev = g;
            prev_theta_int = ti;
        }
        let mean_gap = 2.0 * std::f64::consts::PI
            / (zeros.t_max() / (2.0 * std::f64::consts::PI)).ln().max(1.0);
        let grid_step = (mean_gap / 20.0).min(0.01);
        let mut evaluator = Self {
            zeros,
            deltas,
            max_n,
            cumulative,
            grid_step,
            levels: Vec::new(),
        };
        if max_n >= 2 {
            let nodes = (evaluator.zeros.t_max() / grid_step).ceil() as usize + 1;
            let mut below: Vec<f64> = (0..nodes)
                .map(|i| evaluator.s1_exact((i as f64 * grid_step).min(evaluator.zeros.t_max())))
                .collect();
            for n in 2..=max_n {
                let delta_n = evaluator.deltas[(n - 1) as usize];
                let mut level = Vec::with_capacity(nodes);
                let mut run = delta_n;
                level.push(run);
                for i in 1..nodes {
                    run += 0.5 * grid_step * (below[i - 1] + below[i]);
                    level.push(run);
                }
                evaluator.levels.push(level.clone());
                below = level;
            }
        }
        Ok(evaluator)
    }

    pub fn zeros(&self) -> &ZeroList {
        &self.zeros
    }

    pub fn t_max(&self) -> f64 {
        self.zeros.t_max()
    }

    pub fn max_n(&self) -> u32 {
        self.max_n
    }

    /// `δ_n` for `1 ≤ n ≤ max_n`.
    pub fn delta(&self, n: u32) -> f64 {
        self.deltas[(n - 1) as usize]
    }

    fn check_horizon(&self, t: f64) -> Result<(), MomentsError> {
        if !(t >= 0.0) {
            return Err(MomentsError::Domain(format!("need t ≥ 0, got {t}")));
        }
        if t > self.zeros.t_max() + 1e-12 {
            return Err(MomentsError::Horizon {
                t,
                t_max: self.zeros.t_max(),
            });
        }
        Ok(())
    }

    pub fn s(&self, t: f64) -> Result<f64, MomentsError> {
        s0(t, &self.zeros)
    }

    fn s1_exact(&self, t: f64) -> f64 {
        let j = self.zeros.ordinates().partition_point(|&g| g <= t);
        let (base, prev, prev_ti) = if j == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let g = self.zeros.ordinates()[j - 1];
            (
                self.cumulative[j - 1],
                g,
                zeta::rs_theta_integral(g).expect("theta integral"),
            )
        };
        let ti = zeta::rs_theta_integral(t).expect("theta integral");
        self.deltas[0] + base + j as f64 * (t - prev) - (ti - prev_ti) / std::f64::consts::PI
            - (t - prev)
    }

    /// `S_n(t)` for `1 ≤ n ≤ max_n`.
    pub fn s_n(&self, n: u32, t: f64) -> Result<f64, MomentsError> {
        if n == 0 {
            return self.s(t);
        }
        if n > self.max_n {
            return Err(MomentsError::Domain(format!(
                "evaluator was built with max_n = {}, got n = {n}",
                self.max_n
            )));
        }
        self.check_horizon(t)?;
        if n == 1 {
            return Ok(self.s1_exact(t));
        }
        let level = &self.levels[(n - 2) as usize];
        let pos = t / self.grid_step;
        let i = (pos.floor() as usize).min(level.len() - 2);
        let frac = pos - i as f64;
        Ok(level[i] * (1.0 - frac) + level[i + 1] * frac)
    }
}

/// `∫₀^T S_n(t)² dt`, breakpoint-aware at levels 0 and 1.
pub fn second_moment(n: u32, t_end: f64, eval: &SnEvaluator) -> Result<f64, MomentsError> {
    if t_end == 0.0 {
        return Ok(0.0);
    }
    eval.check_horizon(t_end)?;
    if n >= 2 {
        // trapezoid of S_n² on the uniform grid
        if n > eval.max_n {
            return Err(MomentsError::Domain(format!(
                "evaluator was built with max_n = {}, got n = {n}",
                eval.max_n
            )));
        }
        let level = &eval.levels[(n - 2) as usize];
        let h = eval.grid_step;
        let cells = ((t_end / h).floor() as usize).min(level.len() - 1);
        let mut acc = crate::sum::CompensatedSum::new();
        for i in 0..cells {
            acc.add(0.5 * h * (level[i] * level[i] + level[i + 1] * level[i + 1]));
        }
        let t_cell = cells as f64 * h;
        if t_end > t_cell {
            let a = eval.s_n(n, t_cell)?;
            let b = eval.s_n(n, t_end)?;
            acc.add(0.5 * (t_end - t_cell) * (a * a + b * b));
        }
        return Ok(acc.value());
    }
    // piecewise-smooth: integrate per inter-ordinate interval
    let mut breakpoints: Vec<f64> = vec![0.0];
    breakpoints.extend(eval.zeros.window(0.0, t_end).iter().copied());
    breakpoints.push(t_end);
    let integrand: Box<dyn Fn(f64) -> f64> = if n == 0 {
        Box::new(|t: f64| {
            let v = s0(t, &eval.zeros).expect("inside horizon");
            v * v
        })
    } else {
        Box::new(|t: f64| {
            let v = eval.s1_exact(t);
            v * v
        })
    };
    let mut acc = crate::sum::CompensatedSum::new();
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let panels = ((b - a) / 1.5).ceil() as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            acc.add(quad::gl15_panel(&integrand, a + p as f64 * h, a + (p + 1) as f64 * h));
        }
    }
    Ok(acc.value())
}

/// Empirical second moment against its predictions.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub n: u32,
    pub t_big: f64,
    pub empirical: f64,
    pub prediction_main: f64,
    pub prediction_full: f64,
    pub f_int_measured: f64,
    pub relative_gap: f64,
}

/// Assemble a report: empirical `∫₀^T S_n²`, the leading prediction
/// `C_n T / 2π²`, and the refined prediction using a measured value of the
/// pair-correlation integral.
pub fn moment_report(
    n: u32,
    t_big: f64,
    eval: &SnEvaluator,
    cn_midpoint: f64,
    f_int_measured: f64,
) -> Result<MomentReport, MomentsError> {
    let empirical = second_moment(n, t_big, eval)?;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let prediction_main = cn_midpoint * t_big / (2.0 * pi2);
    let prediction_full =
        crate::constants::theorem_prediction(n, t_big, f_int_measured, cn_midpoint);
    Ok(MomentReport {
        n,
        t_big,
        empirical,
        prediction_main,
        prediction_full,
        f_int_measured,
        relative_gap: (empirical - prediction_full) / prediction_full,
    })
}
