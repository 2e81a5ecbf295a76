//! Exact arithmetic for base-b valuations and last-nonzero-digit functions of
//! integer sequences, p-adic analytic machinery behind them, and
//! classification of the resulting sequences as periodic, regular, or
//! automatic.
//!
//! Modules:
//! - [`arith`]: factored bases, ν_b / L_b / ℓ_{b,d}, CRT, digit tails.
//! - [`padic`]: truncated p-adic numbers, exp/log/pow, analytic series.
//! - [`roots`]: p-adic root isolation of rational polynomials with
//!   multiplicities, cofactor data, separating shifts.
//! - [`classify`]: periodic / regular / automatic verdicts for ν_b(f(n)),
//!   L_b(f(n)), ℓ_{b,d}(f(n)) over polynomial tuples.
//! - [`lucas`]: Lucas sequences, their p-adic valuations, analytic
//!   interpolation, and the sums-of-three-squares classification.
//! - [`seqkit`]: sequence windows, k-kernels, ranks, period detection,
//!   b-file ingestion.
//! - [`cli`]: the command-line surface.

pub mod arith;
pub mod classify;
pub mod cli;
pub mod error;
pub mod lucas;
pub mod padic;
pub mod roots;
pub mod seqkit;

pub use error::{Error, Result};
