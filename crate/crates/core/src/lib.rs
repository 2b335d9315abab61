//! # snm-core
//!
//! Numerical toolkit for the argument of the Riemann zeta function and its
//! antiderivatives: `S(t)`, the iterated functions `S_n(t)`, the constants
//! that govern their second moments, and Montgomery's pair-correlation
//! functional over the zeta zeros.
//!
//! ## Modules
//!
//! - [`arithmetic`] — segmented prime sieve, von Mangoldt weights, and the
//!   explicit prime sums `M(x)`, `N(x)`, `P(y)`, `θ(x)` with compensated
//!   summation.
//! - [`zeta`] — Euler–Maclaurin evaluation of `ζ(s)`, the Riemann–Siegel
//!   theta function, Hardy's `Z(t)`, zero isolation with a completeness
//!   audit, and zero-list persistence.
//! - [`special`] — the function family `f_n`, `g_n`, `k_n`, the Fourier
//!   transform of `k_n`, and the closed-form constants `μ_n`, `δ_n`, `A_n`.
//! - [`constants`] — certified enclosures for the moment constants
//!   `C_n = Σ Λ²(m)/(m (log m)^{2n+2})` from partial sums plus rigorous
//!   tail bounds.
//! - [`moments`] — `S_n(t)` evaluation from a zero list, second moments,
//!   the pair-correlation estimator `F(α, T)`, kernel pair sums, and
//!   numerical verification of the representation formula for `S_n(t)`.
//! - [`quad`] — adaptive Gauss–Legendre quadrature with certified
//!   truncation of semi-infinite integrals.
//! - [`sum`] — compensated (Kahan) accumulation and deterministic
//!   chunk-ordered parallel reduction.
//!
//! ## Determinism
//!
//! Every computation in this crate is reproducible bit-for-bit across runs
//! and across thread counts. Parallel work is partitioned into fixed-size
//! chunks that do not depend on the number of workers, and partial results
//! are always combined in chunk order.

// `!(x >= a)` is the NaN-rejecting form of a domain check; constant
// tables keep more digits than f64 resolves.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod arithmetic;
pub mod constants;
pub mod moments;
pub mod quad;
pub mod special;
pub mod sum;
pub mod zeta;

pub use quad::{Estimate, QuadratureSpec};
pub use sum::CompensatedSum;
