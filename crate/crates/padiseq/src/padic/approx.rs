use crate::arith::{mod_inverse, nu_factorial, nu_p};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// A p-adic number known to finite precision, or an exact zero.
///
/// A nonzero value is stored as p^v * u + O(p^{v+n}) with gcd(u, p) = 1 and
/// n >= 1 known unit digits. Subtraction can exhaust all known digits, which
/// yields an inexact zero O(p^m): some element of p^m * Z_p. Precision flows
/// through every operation exactly, so a result's stated digits never change
/// when inputs are refined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicApprox {
    p: u64,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Exactly zero.
    Zero,
    /// Some element of p^abs * Z_p; no unit digit is known.
    ZeroApprox { abs: i64 },
    /// p^val * unit + O(p^{val+prec}) with unit a unit mod p^prec.
    Unit { val: i64, unit: BigUint, prec: u32 },
}

impl PAdicApprox {
    /// The exact zero of Q_p.
    pub fn exact_zero(p: u64) -> PAdicApprox {
        PAdicApprox {
            p,
            repr: Repr::Zero,
        }
    }

    /// An unknown element of p^abs * Z_p.
    pub fn zero_to(p: u64, abs: i64) -> PAdicApprox {
        PAdicApprox {
            p,
            repr: Repr::ZeroApprox { abs },
        }
    }

    /// The number 1 with `prec` known digits.
    pub fn one(p: u64, prec: u32) -> PAdicApprox {
        assert!(prec >= 1, "precision must be at least one digit");
        PAdicApprox {
            p,
            repr: Repr::Unit {
                val: 0,
                unit: BigUint::one(),
                prec,
            },
        }
    }

    /// Embeds a rational with `prec` unit digits; the denominator may carry
    /// powers of p, making the valuation negative.
    pub fn from_rational(q: &BigRational, p: u64, prec: u32) -> PAdicApprox {
        assert!(prec >= 1, "precision must be at least one digit");
        if q.is_zero() {
            return PAdicApprox::exact_zero(p);
        }
        let a = nu_p(q.numer(), p).finite().expect("nonzero numerator");
        let b = nu_p(q.denom(), p).finite().expect("nonzero denominator");
        let pm = BigUint::from(p).pow(prec);
        let pa = BigInt::from(p).pow(a as u32);
        let pb = BigInt::from(p).pow(b as u32);
        let num_unit = (q.numer() / pa).mod_floor(&BigInt::from(pm.clone()));
        let den_unit = (q.denom() / pb).mod_floor(&BigInt::from(pm.clone()));
        let inv = mod_inverse(&den_unit.to_biguint().expect("canonical residue"), &pm)
            .expect("denominator unit is invertible");
        let unit = (num_unit.to_biguint().expect("canonical residue") * inv) % &pm;
        PAdicApprox {
            p,
            repr: Repr::Unit {
                val: a as i64 - b as i64,
                unit,
                prec,
            },
        }
    }

    /// Embeds an integer with `prec` unit digits.
    pub fn from_bigint(n: &BigInt, p: u64, prec: u32) -> PAdicApprox {
        PAdicApprox::from_rational(&BigRational::from_integer(n.clone()), p, prec)
    }

    /// Embeds a small integer with `prec` unit digits.
    pub fn from_int(n: i64, p: u64, prec: u32) -> PAdicApprox {
        PAdicApprox::from_bigint(&BigInt::from(n), p, prec)
    }

    /// Interprets a residue r mod p^abs as a value known to absolute
    /// precision abs (an inexact zero when r = 0).
    pub fn from_residue(p: u64, r: &BigUint, abs: u32) -> PAdicApprox {
        let pm = BigUint::from(p).pow(abs);
        let r = r % &pm;
        if r.is_zero() {
            return PAdicApprox::zero_to(p, abs as i64);
        }
        let e = nu_p(&BigInt::from(r.clone()), p)
            .finite()
            .expect("nonzero residue");
        let unit = r / BigUint::from(p).pow(e as u32);
        PAdicApprox {
            p,
            repr: Repr::Unit {
                val: e as i64,
                unit,
                prec: abs - e as u32,
            },
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// True only for the exact zero.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero)
    }

    /// True when no unit digit is known (exact or inexact zero).
    pub fn is_zeroish(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// The valuation when it is determined: `Some` for a nonzero value,
    /// `None` for both kinds of zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// A lower bound on the valuation; `None` means infinity (exact zero).
    pub fn min_valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::ZeroApprox { abs } => Some(*abs),
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// Absolute precision: the value is known mod p^a; `None` means exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero => None,
            Repr::ZeroApprox { abs } => Some(*abs),
            Repr::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    /// Known unit digits (relative precision); zeros have none.
    pub fn rel_precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Unit { prec, .. } => Some(*prec),
            _ => None,
        }
    }

    /// The value reduced mod p^digits. Needs valuation lower bound >= 0 and
    /// absolute precision >= digits.
    pub fn to_residue(&self, digits: u32) -> Result<BigUint> {
        match &self.repr {
            Repr::Zero => Ok(BigUint::zero()),
            Repr::ZeroApprox { abs } => {
                if *abs >= digits as i64 {
                    Ok(BigUint::zero())
                } else if *abs < 0 {
                    Err(Error::domain(format!(
                        "value O({}^{}) may be non-integral",
                        self.p, abs
                    )))
                } else {
                    Err(Error::precision(format!(
                        "value known only mod {}^{}, requested {} digits",
                        self.p, abs, digits
                    )))
                }
            }
            Repr::Unit { val, unit, prec } => {
                if *val < 0 {
                    return Err(Error::domain(format!(
                        "valuation {} is negative; value is not a {}-adic integer",
                        val, self.p
                    )));
                }
                if (val + *prec as i64) < digits as i64 {
                    return Err(Error::precision(format!(
                        "value known only mod {}^{}, requested {} digits",
                        self.p,
                        val + *prec as i64,
                        digits
                    )));
                }
                let pm = BigUint::from(self.p).pow(digits);
                if *val >= digits as i64 {
                    return Ok(BigUint::zero());
                }
                Ok((BigUint::from(self.p).pow(*val as u32) * unit) % pm)
            }
        }
    }

    /// Caps the absolute precision at `abs`, discarding digits beyond it.
    pub fn truncate_abs(&self, abs: i64) -> PAdicApprox {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::ZeroApprox { abs: a } => PAdicApprox::zero_to(self.p, (*a).min(abs)),
            Repr::Unit { val, unit, prec } => {
                if val + *prec as i64 <= abs {
                    return self.clone();
                }
                if abs <= *val {
                    return PAdicApprox::zero_to(self.p, abs);
                }
                let new_prec = (abs - val) as u32;
                let pm = BigUint::from(self.p).pow(new_prec);
                PAdicApprox {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: unit % pm,
                        prec: new_prec,
                    },
                }
            }
        }
    }

    /// Exact multiplication by p^e.
    pub fn shift_val(&self, e: i64) -> PAdicApprox {
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::ZeroApprox { abs } => PAdicApprox::zero_to(self.p, abs + e),
            Repr::Unit { val, unit, prec } => PAdicApprox {
                p: self.p,
                repr: Repr::Unit {
                    val: val + e,
                    unit: unit.clone(),
                    prec: *prec,
                },
            },
        }
    }

    /// Exact multiplication by an integer (no precision is lost beyond the
    /// unavoidable valuation shift).
    pub fn mul_int(&self, n: &BigInt) -> PAdicApprox {
        if n.is_zero() {
            return PAdicApprox::exact_zero(self.p);
        }
        let e = nu_p(n, self.p).finite().expect("nonzero integer") as i64;
        match &self.repr {
            Repr::Zero => self.clone(),
            Repr::ZeroApprox { abs } => PAdicApprox::zero_to(self.p, abs + e),
            Repr::Unit { val, unit, prec } => {
                let pm = BigUint::from(self.p).pow(*prec);
                let nu_part = (n / BigInt::from(self.p).pow(e as u32))
                    .mod_floor(&BigInt::from(pm.clone()))
                    .to_biguint()
                    .expect("canonical residue");
                PAdicApprox {
                    p: self.p,
                    repr: Repr::Unit {
                        val: val + e,
                        unit: (unit * nu_part) % pm,
                        prec: *prec,
                    },
                }
            }
        }
    }

    pub fn neg(&self) -> PAdicApprox {
        match &self.repr {
            Repr::Unit { val, unit, prec } => {
                let pm = BigUint::from(self.p).pow(*prec);
                PAdicApprox {
                    p: self.p,
                    repr: Repr::Unit {
                        val: *val,
                        unit: &pm - unit,
                        prec: *prec,
                    },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &PAdicApprox) -> PAdicApprox {
        assert_eq!(self.p, other.p, "mixed primes in p-adic addition");
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) => return other.clone(),
            (_, Repr::Zero) => return self.clone(),
            _ => {}
        }
        let (mx, ax) = (self.min_valuation().unwrap(), self.abs_precision().unwrap());
        let (my, ay) = (
            other.min_valuation().unwrap(),
            other.abs_precision().unwrap(),
        );
        let abs = ax.min(ay);
        let shift = mx.min(my).min(0);
        let width = abs - shift;
        if width <= 0 {
            return PAdicApprox::zero_to(self.p, abs);
        }
        let pm = BigUint::from(self.p).pow(width as u32);
        let scaled = |x: &PAdicApprox, m: i64| -> BigUint {
            match &x.repr {
                Repr::Unit { val, unit, .. } => {
                    (BigUint::from(x.p).pow((val - m) as u32) * unit) % &pm
                }
                _ => BigUint::zero(),
            }
        };
        let s = (scaled(self, shift) + scaled(other, shift)) % &pm;
        if s.is_zero() {
            return PAdicApprox::zero_to(self.p, abs);
        }
        let e = nu_p(&BigInt::from(s.clone()), self.p)
            .finite()
            .expect("nonzero sum");
        let unit = s / BigUint::from(self.p).pow(e as u32);
        PAdicApprox {
            p: self.p,
            repr: Repr::Unit {
                val: shift + e as i64,
                unit,
                prec: (width - e as i64) as u32,
            },
        }
    }

    pub fn sub(&self, other: &PAdicApprox) -> PAdicApprox {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdicApprox) -> PAdicApprox {
        assert_eq!(self.p, other.p, "mixed primes in p-adic multiplication");
        match (&self.repr, &other.repr) {
            (Repr::Zero, _) | (_, Repr::Zero) => PAdicApprox::exact_zero(self.p),
            (Repr::ZeroApprox { abs: a }, Repr::ZeroApprox { abs: b }) => {
                PAdicApprox::zero_to(self.p, a + b)
            }
            (Repr::ZeroApprox { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::ZeroApprox { abs }) => {
                PAdicApprox::zero_to(self.p, abs + val)
            }
            (
                Repr::Unit {
                    val: v1,
                    unit: u1,
                    prec: n1,
                },
                Repr::Unit {
                    val: v2,
                    unit: u2,
                    prec: n2,
                },
            ) => {
                let prec = (*n1).min(*n2);
                let pm = BigUint::from(self.p).pow(prec);
                PAdicApprox {
                    p: self.p,
                    repr: Repr::Unit {
                        val: v1 + v2,
                        unit: (u1 * u2) % pm,
                        prec,
                    },
                }
            }
        }
    }

    /// Division; the divisor must have a known unit digit.
    pub fn div(&self, other: &PAdicApprox) -> Result<PAdicApprox> {
        assert_eq!(self.p, other.p, "mixed primes in p-adic division");
        let (v2, u2, n2) = match &other.repr {
            Repr::Unit { val, unit, prec } => (*val, unit, *prec),
            _ => {
                return Err(Error::domain(
                    "division by a value indistinguishable from zero".to_string(),
                ))
            }
        };
        Ok(match &self.repr {
            Repr::Zero => PAdicApprox::exact_zero(self.p),
            Repr::ZeroApprox { abs } => PAdicApprox::zero_to(self.p, abs - v2),
            Repr::Unit { val, unit, prec } => {
                let prec = (*prec).min(n2);
                let pm = BigUint::from(self.p).pow(prec);
                let inv = mod_inverse(&(u2 % &pm), &pm).expect("unit is invertible");
                PAdicApprox {
                    p: self.p,
                    repr: Repr::Unit {
                        val: val - v2,
                        unit: (unit * inv) % pm,
                        prec,
                    },
                }
            }
        })
    }

    /// x^k for a natural k by repeated squaring; x^0 = 1 at x's relative
    /// precision (one digit for zeros).
    pub fn int_pow(&self, k: u64) -> PAdicApprox {
        if k == 0 {
            return PAdicApprox::one(self.p, self.rel_precision().unwrap_or(1));
        }
        let mut base = self.clone();
        let mut acc: Option<PAdicApprox> = None;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc.expect("k >= 1")
    }

    /// True when both values are integral and agree mod p^digits.
    pub fn eq_mod(&self, other: &PAdicApprox, digits: u32) -> bool {
        match (self.to_residue(digits), other.to_residue(digits)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// p-adic exponential, correct mod p^n. Needs valuation >= 1 (odd p) or
    /// >= 2 (p = 2), and the argument known mod p^n.
    pub fn exp(&self, n: u32) -> Result<PAdicApprox> {
        assert!(n >= 1, "precision must be at least one digit");
        let need = if self.p == 2 { 2 } else { 1 };
        match self.min_valuation() {
            None => return Ok(PAdicApprox::one(self.p, n)),
            Some(m) if m < need => {
                return Err(Error::domain(format!(
                    "exp needs valuation >= {} for p = {}, got lower bound {}",
                    need, self.p, m
                )))
            }
            _ => {}
        }
        if let Some(a) = self.abs_precision() {
            if a < n as i64 {
                return Err(Error::precision(format!(
                    "exp argument known only mod {}^{}, target {} digits",
                    self.p, a, n
                )));
            }
        }
        let (v, xu) = match &self.repr {
            Repr::Unit { val, unit, .. } => (*val as u64, unit.clone()),
            // An inexact zero O(p^m) with m >= n: exp = 1 mod p^n.
            _ => return Ok(PAdicApprox::one(self.p, n)),
        };
        // Truncation index: k*v - nu_p(k!) >= n for all k > K, using
        // nu_p(k!) <= (k-1)/(p-1).
        let p = self.p;
        let k_max = if p == 2 {
            div_ceil_u64(n as u64 - 1, v - 1).max(1)
        } else {
            div_ceil_u64((n as u64) * (p - 1) - 1, v * (p - 1) - 1).max(1)
        };
        let work = n + ceil_log(p, k_max) + 2;
        let pw = BigUint::from(p).pow(work);
        let mut acc = BigUint::one();
        let mut term_val: u64 = 0;
        let mut term_unit = BigUint::one();
        let xu = xu % &pw;
        for k in 1..=k_max {
            let ek = nu_p(&BigInt::from(k), p).finite().expect("k >= 1");
            let k_unit = BigUint::from(k / p.pow(ek as u32));
            let inv = mod_inverse(&(k_unit % &pw), &pw).expect("unit part of k");
            term_val += v;
            term_val -= ek;
            term_unit = term_unit * &xu % &pw * inv % &pw;
            debug_assert_eq!(term_val, k * v - nu_factorial(k, p));
            if term_val < work as u64 {
                acc = (acc + BigUint::from(p).pow(term_val as u32) * &term_unit) % &pw;
            }
        }
        let pn = BigUint::from(p).pow(n);
        let unit = acc % pn;
        debug_assert!((&unit % p) == BigUint::one(), "exp is 1 mod p");
        Ok(PAdicApprox {
            p,
            repr: Repr::Unit {
                val: 0,
                unit,
                prec: n,
            },
        })
    }

    /// p-adic logarithm, correct mod p^n. Needs valuation(self - 1) >= 1 and
    /// the argument known mod p^n.
    pub fn log(&self, n: u32) -> Result<PAdicApprox> {
        assert!(n >= 1, "precision must be at least one digit");
        let p = self.p;
        if let Some(a) = self.abs_precision() {
            if a < n as i64 {
                return Err(Error::precision(format!(
                    "log argument known only mod {}^{}, target {} digits",
                    p, a, n
                )));
            }
        }
        let r = self
            .to_residue(n)
            .map_err(|_| Error::domain(format!("log needs a unit congruent to 1 mod {}", p)))?;
        let pn = BigUint::from(p).pow(n);
        let z = (&pn + r - BigUint::one()) % &pn;
        if z.is_zero() {
            // self = 1 + O(p^n), so log = O(p^n).
            return Ok(PAdicApprox::zero_to(p, n as i64));
        }
        let w = nu_p(&BigInt::from(z.clone()), p).finite().expect("nonzero");
        if w == 0 {
            return Err(Error::domain(format!(
                "log needs valuation(x - 1) >= 1 for p = {}",
                p
            )));
        }
        // Term k has valuation k*w - nu_p(k); k*w - floor(log_p k) is a
        // nondecreasing lower bound, so stop once it reaches n.
        let mut k_max = 1u64;
        while (k_max + 1) * w < n as u64 + floor_log(p, k_max + 1) as u64 {
            k_max += 1;
        }
        let work = n + ceil_log(p, k_max) + 2;
        let pw = BigUint::from(p).pow(work);
        let zu = (z / BigUint::from(p).pow(w as u32)) % &pw;
        let mut acc = BigInt::zero();
        let mut pow_val: u64 = 0;
        let mut pow_unit = BigUint::one();
        for k in 1..=k_max {
            pow_val += w;
            pow_unit = pow_unit * &zu % &pw;
            let ek = nu_p(&BigInt::from(k), p).finite().expect("k >= 1");
            let k_unit = BigUint::from(k / p.pow(ek as u32));
            let inv = mod_inverse(&(k_unit % &pw), &pw).expect("unit part of k");
            let tval = pow_val - ek;
            if tval >= work as u64 {
                continue;
            }
            let term =
                BigInt::from(BigUint::from(p).pow(tval as u32) * &pow_unit % &pw * inv % &pw);
            if k % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let residue = acc
            .mod_floor(&BigInt::from(pn))
            .to_biguint()
            .expect("canonical residue");
        Ok(PAdicApprox::from_residue(p, &residue, n))
    }

    /// gamma^x = exp(x * log(gamma)), analytic for x in Z_p when
    /// valuation(gamma - 1) >= 1 (odd p) or >= 2 (p = 2).
    pub fn pow(&self, x: &PAdicApprox, n: u32) -> Result<PAdicApprox> {
        assert_eq!(self.p, x.p, "mixed primes in p-adic power");
        let need = if self.p == 2 { 2 } else { 1 };
        let base_ok = match &self.repr {
            Repr::Unit { val: 0, unit, prec } => {
                let pm = BigUint::from(self.p).pow((*prec).min(need));
                let delta = (&pm + unit % &pm - BigUint::one()) % pm;
                delta.is_zero()
            }
            _ => false,
        };
        if !base_ok {
            return Err(Error::domain(format!(
                "pow base must be congruent to 1 mod {}^{}",
                self.p, need
            )));
        }
        if x.min_valuation().map_or(false, |m| m < 0) {
            return Err(Error::domain(
                "pow exponent must be a p-adic integer".to_string(),
            ));
        }
        if let Some(a) = x.abs_precision() {
            if a < n as i64 {
                return Err(Error::precision(format!(
                    "pow exponent known only mod {}^{}, target {} digits",
                    self.p, a, n
                )));
            }
        }
        let lg = self.log(n)?;
        let arg = x.mul(&lg).truncate_abs(n as i64);
        arg.exp(n)
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero => write!(f, "0"),
            Repr::ZeroApprox { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, prec } => {
                write!(
                    f,
                    "{}^{}*{} + O({}^{})",
                    self.p,
                    val,
                    unit,
                    self.p,
                    val + *prec as i64
                )
            }
        }
    }
}

/// Smallest t with p^t >= k (k >= 1).
fn ceil_log(p: u64, k: u64) -> u32 {
    let mut t = 0u32;
    let mut pw: u128 = 1;
    while pw < k as u128 {
        pw *= p as u128;
        t += 1;
    }
    t
}

/// Largest t with p^t <= k (k >= 1).
fn floor_log(p: u64, k: u64) -> u32 {
    let mut t = 0u32;
    let mut pw: u128 = p as u128;
    while pw <= k as u128 {
        pw *= p as u128;
        t += 1;
    }
    t
}

fn div_ceil_u64(a: u64, b: u64) -> u64 {
    (a + b - 1) / b
}
