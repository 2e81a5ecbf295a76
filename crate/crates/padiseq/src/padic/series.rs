use super::approx::PAdicApprox;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A power series over Z_p truncated after finitely many coefficients,
/// together with a proven affine bound: every omitted coefficient a_k
/// (k >= coeffs.len()) has valuation at least c0 + c1*k with c1 > 0.
///
/// The bound makes evaluation rigorous: the omitted tail of f(x) for
/// x in Z_p is O(p^e) with e the bound at the first omitted index.
#[derive(Clone, Debug)]
pub struct PAdicSeries {
    p: u64,
    coeffs: Vec<PAdicApprox>,
    tail_c0: BigRational,
    tail_c1: BigRational,
}

/// Clamps a rational's ceiling into a safely addable i64 range.
fn ceil_clamped(r: &BigRational) -> i64 {
    const LIM: i64 = i64::MAX / 4;
    let c = r.ceil().to_integer();
    match c.to_i64() {
        Some(v) => v.clamp(-LIM, LIM),
        None => {
            if c.is_negative() {
                -LIM
            } else {
                LIM
            }
        }
    }
}

impl PAdicSeries {
    /// Builds a series from explicit coefficients and the affine tail bound
    /// c0 + c1*k (valid for every index past the explicit ones). Rejects
    /// nonpositive slopes, which cannot certify convergence on Z_p.
    pub fn new(
        p: u64,
        coeffs: Vec<PAdicApprox>,
        tail_c0: BigRational,
        tail_c1: BigRational,
    ) -> Result<PAdicSeries> {
        if tail_c1 <= BigRational::zero() {
            return Err(Error::domain(format!(
                "tail bound slope {} is not positive; series need not converge on Z_{}",
                tail_c1, p
            )));
        }
        for c in &coeffs {
            if c.p() != p {
                return Err(Error::domain(format!(
                    "coefficient over Q_{} in a series over Q_{}",
                    c.p(),
                    p
                )));
            }
        }
        Ok(PAdicSeries {
            p,
            coeffs,
            tail_c0,
            tail_c1,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[PAdicApprox] {
        &self.coeffs
    }

    /// Lower bound on the valuation of the omitted part of any evaluation at
    /// a p-adic integer: the tail bound at the first omitted index.
    pub fn tail_floor(&self) -> i64 {
        let k = BigRational::from_integer(BigInt::from(self.coeffs.len()));
        ceil_clamped(&(&self.tail_c0 + &self.tail_c1 * k))
    }

    /// Evaluates at x in Z_p, correct mod p^n; fails if the tail bound or
    /// coefficient precision cannot support n digits.
    pub fn eval(&self, x: &PAdicApprox, n: u32) -> Result<PAdicApprox> {
        assert_eq!(self.p, x.p(), "mixed primes in series evaluation");
        if x.min_valuation().map_or(false, |m| m < 0) {
            return Err(Error::domain(
                "series argument must be a p-adic integer".to_string(),
            ));
        }
        let tail_abs = self.tail_floor();
        if tail_abs < n as i64 {
            return Err(Error::precision(format!(
                "series tail past {} listed coefficients is only O({}^{}), target {} digits",
                self.coeffs.len(),
                self.p,
                tail_abs,
                n
            )));
        }
        let mut acc = PAdicApprox::exact_zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        let acc = acc.add(&PAdicApprox::zero_to(self.p, tail_abs));
        match acc.abs_precision() {
            Some(a) if a < n as i64 => Err(Error::precision(format!(
                "coefficient precision supports only {} of {} requested digits",
                a, n
            ))),
            _ => Ok(acc.truncate_abs(n as i64)),
        }
    }

    /// Evaluates at an integer argument.
    pub fn eval_at_int(&self, m: &BigInt, n: u32) -> Result<PAdicApprox> {
        self.eval(&PAdicApprox::from_bigint(m, self.p, n + 8), n)
    }

    /// The series for x -> f(p^t*x + a), with a a natural number. Listed
    /// coefficients are re-expanded binomially; omitted source coefficients
    /// cap each output coefficient's precision and feed the new tail bound
    /// c0 + (c1 + t)*k.
    pub fn shift(&self, t: u32, a: &BigUint) -> PAdicSeries {
        let klen = self.coeffs.len();
        let gamma = self.tail_floor();
        let a_int = BigInt::from(a.clone());
        // Pascal triangle rows 0..klen.
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(klen);
        for k in 0..klen {
            let mut row = vec![BigUint::one(); k + 1];
            for j in 1..k {
                row[j] = &rows[k - 1][j - 1] + &rows[k - 1][j];
            }
            rows.push(row);
        }
        let mut out = Vec::with_capacity(klen);
        for j in 0..klen {
            let mut b = PAdicApprox::exact_zero(self.p);
            // Sum over k >= j of a_k * C(k, j) * a^{k-j}, then scale by p^{t*j}.
            let mut apow = BigInt::one();
            for k in j..klen {
                let factor = BigInt::from(rows[k][j].clone()) * &apow;
                b = b.add(&self.coeffs[k].mul_int(&factor));
                apow *= &a_int;
            }
            b = b.shift_val(t as i64 * j as i64);
            out.push(b.truncate_abs(gamma + t as i64 * j as i64));
        }
        PAdicSeries {
            p: self.p,
            coeffs: out,
            tail_c0: self.tail_c0.clone(),
            tail_c1: &self.tail_c1 + BigRational::from_integer(BigInt::from(t)),
        }
    }
}
