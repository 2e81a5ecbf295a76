//! Exact integer and rational primitives: factored bases, the valuation ν_b,
//! the last-nonzero-part map L_b, last-digit blocks ℓ_{b,d}, CRT
//! reconstruction, Carmichael exponents, factorial valuations, the
//! three-squares criterion, and digit tails of rationals.

mod base;
mod extnat;
mod squares;
mod tail;
mod valuation;
mod zb;

pub use base::{
    carmichael, carmichael_divides, digit_sum, is_prime_u64, mod_inverse, nu_factorial,
    FactoredBase, PrimePower,
};
pub use extnat::ExtendedNat;
pub use squares::three_squares_representable;
pub use tail::{rational_digit_tail, DigitTail};
pub use valuation::{nu_p, nu_p_u64};
pub use zb::{ZbElement, ZbPart};
