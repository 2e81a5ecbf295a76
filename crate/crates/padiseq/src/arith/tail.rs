use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::base::{mod_inverse, FactoredBase};
use crate::error::{Error, Result};

/// Digit-tail decomposition of a rational θ ∈ Z_b: writing θ = θ[t] + b^t·θ{t}
/// with θ[t] the first t digits, the tail sequence (θ{t})_t is eventually
/// periodic. Detected preperiod/period are verified exactly.
#[derive(Clone, Debug)]
pub struct DigitTail {
    pub preperiod: u32,
    pub period: u32,
    /// Base-b digits c_t of θ for t < preperiod + period; later digits repeat
    /// with the stated period.
    pub digits: Vec<u64>,
    /// θ{t} for t ≤ preperiod + period.
    pub tails: Vec<BigRational>,
}

impl DigitTail {
    /// The t-th digit of θ, using the periodic continuation.
    pub fn digit(&self, t: u32) -> u64 {
        if (t as usize) < self.digits.len() {
            self.digits[t as usize]
        } else {
            let idx = self.preperiod + (t - self.preperiod) % self.period;
            self.digits[idx as usize]
        }
    }

    /// θ[t] = Σ_{i<t} c_i b^i, the canonical representative of θ mod b^t.
    pub fn initial_block(&self, t: u32, b: u64) -> BigUint {
        let mut acc = BigUint::zero();
        for i in (0..t).rev() {
            acc = acc * BigUint::from(b) + BigUint::from(self.digit(i));
        }
        acc
    }
}

/// Expand a rational θ with denominator coprime to b into its base-b digit
/// tails and find the exact (preperiod, period).
///
/// Internally tracks w_t = u·θ{t} where θ = v/u in lowest terms; each w_t is an
/// integer with |w_t| ≤ |v| + |u|, so the sequence must repeat.
pub fn rational_digit_tail(
    theta: &BigRational,
    base: &FactoredBase,
    max_t: u32,
) -> Result<DigitTail> {
    let b = base.b();
    let u = theta.denom().clone();
    let b_big = BigInt::from(b);
    if !u.gcd(&b_big).is_one() {
        return Err(Error::domain(format!(
            "denominator {u} shares a factor with base {b}; θ is not in Z_{b}"
        )));
    }
    let u_inv_mod_b = mod_inverse(&u.to_biguint().unwrap(), &BigUint::from(b))
        .expect("denominator is a unit mod b");

    let mut w = theta.numer().clone(); // w_0 = v, θ{0} = θ
    let mut seen: HashMap<BigInt, u32> = HashMap::new();
    let mut digits: Vec<u64> = Vec::new();
    let mut ws: Vec<BigInt> = vec![w.clone()];

    for t in 0..=max_t {
        if let Some(&first) = seen.get(&w) {
            let preperiod = first;
            let period = t - first;
            let tails = ws[..=(t as usize)]
                .iter()
                .map(|wt| BigRational::new(wt.clone(), u.clone()))
                .collect();
            digits.truncate(t as usize);
            return Ok(DigitTail {
                preperiod,
                period,
                digits,
                tails,
            });
        }
        seen.insert(w.clone(), t);
        // digit c_t = θ{t} mod b = w_t · u^{-1} mod b
        let c = (w.mod_floor(&b_big).to_biguint().unwrap() * &u_inv_mod_b % BigUint::from(b))
            .to_u64()
            .unwrap();
        digits.push(c);
        // w_{t+1} = (w_t − u·c_t)/b, exact by construction
        let next = (&w - &u * BigInt::from(c)) / &b_big;
        debug_assert!((&w - &u * BigInt::from(c)).mod_floor(&b_big).is_zero());
        debug_assert!(next.abs() <= theta.numer().abs() + u.abs());
        w = next;
        ws.push(w.clone());
    }
    Err(Error::domain(format!(
        "no tail repeat within {max_t} steps (bound |v|+|u| suggests raising max_t)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn integer_tail_reaches_zero() {
        let b10 = FactoredBase::new(10).unwrap();
        let tail = rational_digit_tail(&rat(5, 1), &b10, 100).unwrap();
        assert_eq!((tail.preperiod, tail.period), (1, 1));
        assert!(tail.tails[1].is_zero());
        assert_eq!(tail.digit(0), 5);
        assert_eq!(tail.digit(7), 0);
    }

    #[test]
    fn one_third_in_base_ten() {
        let b10 = FactoredBase::new(10).unwrap();
        let theta = rat(1, 3);
        let tail = rational_digit_tail(&theta, &b10, 100).unwrap();
        // 3x ≡ 1 mod 10 -> 7; mod 100 -> 67
        assert_eq!(tail.initial_block(1, 10), BigUint::from(7u32));
        assert_eq!(tail.initial_block(2, 10), BigUint::from(67u32));
        assert_eq!((tail.preperiod, tail.period), (1, 1));
        assert_eq!(tail.tails[1], rat(-2, 3));
        assert_eq!(tail.tails[2], rat(-2, 3));
    }

    #[test]
    fn minus_one_in_base_two() {
        let b2 = FactoredBase::new(2).unwrap();
        let tail = rational_digit_tail(&rat(-1, 1), &b2, 100).unwrap();
        assert_eq!((tail.preperiod, tail.period), (0, 1));
        assert_eq!(tail.tails[0], rat(-1, 1));
        assert_eq!(tail.tails[1], rat(-1, 1));
        // θ[t] = 2^t − 1: all-ones digit string
        assert_eq!(tail.initial_block(5, 2), BigUint::from(31u32));
    }

    #[test]
    fn denominator_must_be_coprime_to_base() {
        let b10 = FactoredBase::new(10).unwrap();
        assert!(rational_digit_tail(&rat(1, 2), &b10, 100).is_err());
        assert!(rational_digit_tail(&rat(3, 4), &b10, 100).is_err());
        assert!(rational_digit_tail(&rat(1, 7), &b10, 100).is_ok());
    }

    #[test]
    fn tail_recurrence_and_periodicity_verified() {
        // (θ{t}){1} = θ{t+1} and θ{preperiod+period} = θ{preperiod},
        // plus θ ≡ θ[t] mod b^t as rationals
        let cases = [
            (rat(1, 3), 10u64),
            (rat(-7, 9), 10),
            (rat(22, 7), 15),
            (rat(5, 11), 6),
            (rat(-1000, 1), 10),
            (rat(123456, 97), 12),
        ];
        for (theta, b) in cases {
            let base = FactoredBase::new(b).unwrap();
            let tail = rational_digit_tail(&theta, &base, 10_000).unwrap();
            let end = (tail.preperiod + tail.period) as usize;
            assert_eq!(tail.tails[end], tail.tails[tail.preperiod as usize]);
            for t in 0..end {
                let c = BigRational::from_integer(BigInt::from(tail.digits[t]));
                let b_rat = BigRational::from_integer(BigInt::from(b));
                // θ{t} = c_t + b·θ{t+1}
                assert_eq!(tail.tails[t], c + &b_rat * &tail.tails[t + 1]);
            }
            // θ − θ[t] must be divisible by b^t with quotient θ{t}
            for t in 1..=(end as u32) {
                let block = BigInt::from(tail.initial_block(t, b));
                let bt = BigRational::from_integer(BigInt::from(b).pow(t));
                let diff = &theta - BigRational::from_integer(block);
                assert_eq!(&diff / &bt, tail.tails[t as usize]);
            }
        }
    }

    #[test]
    fn block_is_modular_inverse_form() {
        // θ[t] for θ = v/u must satisfy u·θ[t] ≡ v mod b^t
        let b10 = FactoredBase::new(10).unwrap();
        let theta = rat(355, 113);
        let tail = rational_digit_tail(&theta, &b10, 100_000).unwrap();
        for t in 1..=6u32 {
            let block = BigInt::from(tail.initial_block(t, 10));
            let m = BigInt::from(10).pow(t);
            assert!(
                ((BigInt::from(113) * block - BigInt::from(355)) % m).is_zero(),
                "t={t}"
            );
        }
        let _ = BigInt::one();
    }
}
