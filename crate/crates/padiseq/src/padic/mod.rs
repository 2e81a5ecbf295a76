//! Fixed-precision p-adic arithmetic and analytic functions.
//!
//! [`PAdicApprox`] represents an element of Q_p known to a stated precision
//! and tracks precision exactly through arithmetic, `exp`, `log`, and `pow`.
//! [`PAdicSeries`] is a truncated power series with a proven affine lower
//! bound on the valuations of its omitted coefficients, supporting rigorous
//! evaluation and substitution x -> p^t*x + a.

mod approx;
mod series;

pub use approx::PAdicApprox;
pub use series::PAdicSeries;
