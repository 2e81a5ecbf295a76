use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// One prime-power factor b_i = p^l of a base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub l: u32,
    /// p^l
    pub pp: u64,
}

/// A base b ≥ 2 together with its factorization b = ∏ p_i^{l_i},
/// the cofactors q_i = b/b_i, and memoized CRT inverses r_i(d) with
/// q_i·r_i ≡ 1 (mod b_i^d).
pub struct FactoredBase {
    b: u64,
    factors: Vec<PrimePower>,
    crt_inverses: Mutex<HashMap<(usize, u32), BigUint>>,
}

impl FactoredBase {
    /// Factor b by trial division. Deterministic; bases must fit in 32 bits.
    pub fn new(b: u64) -> Result<FactoredBase> {
        if b < 2 {
            return Err(Error::domain(format!("base must be at least 2, got {b}")));
        }
        if b > u32::MAX as u64 {
            return Err(Error::domain(format!("base must be below 2^32, got {b}")));
        }
        let mut factors = Vec::new();
        let mut rest = b;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut l = 0u32;
                let mut pp = 1u64;
                while rest % p == 0 {
                    rest /= p;
                    l += 1;
                    pp *= p;
                }
                factors.push(PrimePower { p, l, pp });
            }
            p += 1;
        }
        if rest > 1 {
            factors.push(PrimePower {
                p: rest,
                l: 1,
                pp: rest,
            });
        }
        debug_assert_eq!(factors.iter().map(|f| f.pp).product::<u64>(), b);
        Ok(FactoredBase {
            b,
            factors,
            crt_inverses: Mutex::new(HashMap::new()),
        })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn index_of_prime(&self, p: u64) -> Option<usize> {
        self.factors.iter().position(|f| f.p == p)
    }

    /// Cofactor q_i = b / b_i.
    pub fn q(&self, i: usize) -> u64 {
        self.b / self.factors[i].pp
    }

    /// b^d
    pub fn b_pow(&self, d: u32) -> BigUint {
        BigUint::from(self.b).pow(d)
    }

    /// b_i^d
    pub fn pp_pow(&self, i: usize, d: u32) -> BigUint {
        BigUint::from(self.factors[i].pp).pow(d)
    }

    /// CRT inverse r_i(d): q_i·r_i ≡ 1 (mod b_i^d). Memoized per (i, d).
    pub fn r(&self, i: usize, d: u32) -> BigUint {
        if let Some(r) = self.crt_inverses.lock().unwrap().get(&(i, d)) {
            return r.clone();
        }
        let modulus = self.pp_pow(i, d);
        let r = mod_inverse(&BigUint::from(self.q(i)), &modulus)
            .expect("q_i is coprime to b_i^d by construction");
        self.crt_inverses.lock().unwrap().insert((i, d), r.clone());
        r
    }

    /// Reconstruct x mod b^d from residues y_i mod b_i^d via
    /// x ≡ Σ q_i^d r_i^d y_i (mod b^d).
    pub fn crt_combine(&self, residues: &[BigUint], d: u32) -> Result<BigUint> {
        if residues.len() != self.factors.len() {
            return Err(Error::domain(format!(
                "expected {} residues for base {}, got {}",
                self.factors.len(),
                self.b,
                residues.len()
            )));
        }
        if d == 0 {
            return Err(Error::domain("precision d must be positive".to_string()));
        }
        let modulus = self.b_pow(d);
        let mut acc = BigUint::zero();
        for (i, y) in residues.iter().enumerate() {
            let qd = BigUint::from(self.q(i)).modpow(&BigUint::from(d), &modulus);
            let rd = self.r(i, d).modpow(&BigUint::from(d), &modulus);
            acc = (acc + qd * rd % &modulus * (y % self.pp_pow(i, d))) % &modulus;
        }
        Ok(acc)
    }
}

impl Clone for FactoredBase {
    fn clone(&self) -> Self {
        FactoredBase {
            b: self.b,
            factors: self.factors.clone(),
            crt_inverses: Mutex::new(HashMap::new()),
        }
    }
}

impl PartialEq for FactoredBase {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b
    }
}

impl Eq for FactoredBase {}

impl fmt::Debug for FactoredBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FactoredBase({} = ", self.b)?;
        for (i, pp) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if pp.l == 1 {
                write!(f, "{}", pp.p)?;
            } else {
                write!(f, "{}^{}", pp.p, pp.l)?;
            }
        }
        write!(f, ")")
    }
}

/// Modular inverse a^{-1} mod m via the extended Euclidean algorithm.
/// Returns None when gcd(a, m) ≠ 1.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let gcd = a.extended_gcd(&m);
    if !gcd.gcd.is_one() {
        return None;
    }
    let mut x = gcd.x % &m;
    if x.is_negative() {
        x += &m;
    }
    x.to_biguint()
}

/// Deterministic primality by trial division. Adequate below 2^32.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Carmichael function at a prime power:
/// λ(p^t) = p^{t-1}(p-1) for odd p; λ(2) = 1, λ(4) = 2, λ(2^t) = 2^{t-2} for t ≥ 3.
pub fn carmichael(p: u64, t: u32) -> BigUint {
    debug_assert!(is_prime_u64(p), "carmichael expects a prime, got {p}");
    debug_assert!(t >= 1);
    if p == 2 {
        if t <= 2 {
            BigUint::one() << (t - 1)
        } else {
            BigUint::one() << (t - 2)
        }
    } else {
        BigUint::from(p).pow(t - 1) * BigUint::from(p - 1)
    }
}

/// Does λ(p^t) divide m?  Cheap shortcut used by root filtering where only
/// divisibility matters and t can be large.
pub fn carmichael_divides(p: u64, t: u32, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    let lambda = carmichael(p, t);
    match lambda.to_u64() {
        Some(l) => m % l == 0,
        None => false, // λ exceeds u64, hence exceeds m
    }
}

/// Digit sum of k in base p.
pub fn digit_sum(mut k: u64, p: u64) -> u64 {
    let mut s = 0;
    while k > 0 {
        s += k % p;
        k /= p;
    }
    s
}

/// ν_p(k!) by Legendre's formula: (k − s_p(k)) / (p − 1).
pub fn nu_factorial(k: u64, p: u64) -> u64 {
    debug_assert!(is_prime_u64(p));
    (k - digit_sum(k, p)) / (p - 1)
}
