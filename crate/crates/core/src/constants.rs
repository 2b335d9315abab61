//! Certified enclosures for the moment constants
//! `C_n = Σ_{m≥2} Λ²(m)/(m (log m)^{2n+2})`.
//!
//! The series is summed up to a cutoff `x` and the remainder `V_n(x)` is
//! boxed by the explicit tail bounds
//!
//! ```text
//! -(0.017 n + 0.167)/(√x (log x)^{2n-1})
//!     ≤ V_n(x) − 1/(2n (log x)^{2n})
//!     ≤ (0.020 n + 0.181)/(√x (log x)^{2n-1}),     x ≥ 1e5,
//! ```
//!
//! valid on the Riemann hypothesis. Directed rounding is not used; instead
//! a 1e-10 relative slack (far above the compensated-summation error) is
//! folded into both endpoints.

use crate::arithmetic::{self, ArithmeticError, PrimeTable};
use crate::sum::CompensatedSum;
use crate::zeta;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// Floating-point slack folded into enclosure endpoints (relative).
pub const FP_SLACK: f64 = 1e-10;

/// A closed interval `[lo, hi]` with a note about where each bound came
/// from.
#[derive(Debug, Clone)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub provenance: String,
}

impl Enclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn intersects(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Tail main term and error bars at cutoff `x`.
#[derive(Debug, Clone, Copy)]
pub struct TailBound {
    pub n: u32,
    pub x: f64,
    pub main: f64,
    pub lower_err: f64,
    pub upper_err: f64,
}

impl TailBound {
    /// Requires `x ≥ 1e5`, the validity threshold of the error constants.
    pub fn new(n: u32, x: f64) -> Result<Self, ConstantsError> {
        check_order(n)?;
        if !(x >= 1e5) {
            return Err(ConstantsError::Domain(format!(
                "tail bounds hold for x ≥ 1e5, got {x}"
            )));
        }
        let log_x = x.ln();
        let denom = x.sqrt() * log_x.powi(2 * n as i32 - 1);
        Ok(Self {
            n,
            x,
            main: Self::main_term(n, x),
            lower_err: (0.017 * n as f64 + 0.167) / denom,
            upper_err: (0.020 * n as f64 + 0.181) / denom,
        })
    }

    /// `1/(2n (log x)^{2n})`, defined for any `x > 1`.
    pub fn main_term(n: u32, x: f64) -> f64 {
        1.0 / (2.0 * n as f64 * x.ln().powi(2 * n as i32))
    }
}

fn check_order(n: u32) -> Result<(), ConstantsError> {
    if n == 0 || n > 64 {
        return Err(ConstantsError::Domain(format!(
            "order must satisfy 1 ≤ n ≤ 64, got {n}"
        )));
    }
    Ok(())
}

/// Cutoffs used for the reference enclosures of `C_1 .. C_10`.
pub fn default_xn(n: u32) -> f64 {
    match n {
        1 => 1e8,
        2 => 1e7,
        3 => 5e5,
        _ => 1e5,
    }
}

/// Partial sum `Σ_{2 ≤ m ≤ x} Λ(m)²/(m (log m)^{2n+2})`, increasing `m`,
/// compensated.
pub fn cn_partial(n: u32, x: f64, table: &PrimeTable) -> Result<f64, ConstantsError> {
    check_order(n)?;
    if !(x >= 2.0) {
        return Err(ConstantsError::Domain(format!("need x ≥ 2, got {x}")));
    }
    if (table.limit() as f64) < x {
        return Err(ConstantsError::Arithmetic(
            arithmetic::big_m(x, table).unwrap_err(),
        ));
    }
    let power = 2 * n as i32 + 2;
    let mut acc = CompensatedSum::new();
    for pp in table.prime_powers() {
        let m = pp.value as f64;
        if m > x {
            break;
        }
        let lambda = pp.lambda();
        acc.add(lambda * lambda / (m * m.ln().powi(power)));
    }
    Ok(acc.value())
}

/// Enclosure of the series tail `V_n(x) = Σ_{m>x} Λ²(m)/(m (log m)^{2n+2})`.
pub fn vn_enclosure(n: u32, x: f64) -> Result<Enclosure, ConstantsError> {
    let tb = TailBound::new(n, x)?;
    Ok(Enclosure {
        lo: tb.main - tb.lower_err,
        hi: tb.main + tb.upper_err,
        provenance: format!(
            "tail for x = {x:.3e}: main 1/(2n log^(2n) x), errors -(0.017n+0.167), +(0.020n+0.181) over sqrt(x) log^(2n-1) x (RH)",
        ),
    })
}

/// Enclosure of `C_n` from the partial sum to `x` plus the tail bounds,
/// with the floating-point slack folded into both endpoints.
pub fn cn_enclosure(n: u32, x: f64, table: &PrimeTable) -> Result<Enclosure, ConstantsError> {
    let partial = cn_partial(n, x, table)?;
    let tail = vn_enclosure(n, x)?;
    let lo = partial + tail.lo;
    let hi = partial + tail.hi;
    Ok(Enclosure {
        lo: lo - lo.abs() * FP_SLACK,
        hi: hi + hi.abs() * FP_SLACK,
        provenance: format!(
            "partial sum over m <= {x:.3e} plus RH tail bounds at the same cutoff; 1e-10 relative fp slack on both endpoints"
        ),
    })
}

/// `C_n/(2π²)` from the enclosure midpoint.
pub fn table1(n: u32, x: f64, table: &PrimeTable) -> Result<f64, ConstantsError> {
    let enc = cn_enclosure(n, x, table)?;
    Ok(enc.midpoint() / (2.0 * std::f64::consts::PI * std::f64::consts::PI))
}

/// The asymptotic bracket for `∫₁^∞ F(α)/α^{2n+2} dα`:
/// `[2/3^{2n+3}, (8/3) ζ(2n+2)]` (the ε of the underlying statement is
/// omitted and recorded in the provenance).
pub fn f_integral_bounds(n: u32) -> Enclosure {
    assert!(n >= 1 && n <= 64);
    let lo = 2.0 * 3f64.powi(-(2 * n as i32 + 3));
    let hi = (8.0 / 3.0) * zeta::zeta_even(2 * n + 2);
    Enclosure {
        lo,
        hi,
        provenance: "asymptotic bracket (valid up to o(1) as T grows; no rate)".into(),
    }
}

/// Second-moment prediction under the strong pair-correlation hypothesis:
/// `C_n T/(2π²) − T/(4n(2n+1)π² (log T)^{2n})`.
pub fn spc_prediction(n: u32, t_big: f64, cn_midpoint: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let nf = n as f64;
    cn_midpoint * t_big / (2.0 * pi2)
        - t_big / (4.0 * nf * (2.0 * nf + 1.0) * pi2 * t_big.ln().powi(2 * n as i32))
}

/// Second-moment prediction with a supplied value of the pair-correlation
/// integral: `C_n T/(2π²) + T/(2π²(log T)^{2n}) (f_int − 1/2n)`.
pub fn theorem_prediction(n: u32, t_big: f64, f_int: f64, cn_midpoint: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    cn_midpoint * t_big / (2.0 * pi2)
        + t_big / (2.0 * pi2 * t_big.ln().powi(2 * n as i32)) * (f_int - 1.0 / (2.0 * n as f64))
}
