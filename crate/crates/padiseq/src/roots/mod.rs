//! Roots of rational polynomials in Q and in the p-adic integers.
//!
//! `RationalPoly` is an exact dense polynomial over Q. `rational_roots` finds
//! its rational roots with multiplicity. `padic_roots` isolates every root in
//! Z_p and attaches the local data (multiplicity, cofactor valuation and
//! digits) that controls how the valuation and last nonzero digits of f(n)
//! behave near the root. `r_prime_set` filters the roots that obstruct digit
//! periodicity for a given prime-power base, and `separating_shift` certifies
//! a modulus splitting the roots into distinct residue classes with frozen
//! cofactor data.

mod find;
pub(crate) use find::{rational_val_and_digits, root_retained, with_escalation};
mod poly;

pub use find::{padic_roots, r_prime_set, separating_shift, RootDatum, SeparatedResidue};
pub use poly::{rational_roots, RationalPoly};
