use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::base::FactoredBase;
use super::extnat::ExtendedNat;

/// ν_p(n): exponent of p in n, with ν_p(0) = ∞.
pub fn nu_p(n: &BigInt, p: u64) -> ExtendedNat {
    if n.is_zero() {
        return ExtendedNat::Infinity;
    }
    if p == 2 {
        // trailing_zeros is exact and much faster than repeated division
        return ExtendedNat::Finite(n.trailing_zeros().unwrap());
    }
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0u64;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return ExtendedNat::Finite(v);
        }
        m = q;
        v += 1;
    }
}

/// ν_p for machine-sized n.
pub fn nu_p_u64(mut n: u64, p: u64) -> ExtendedNat {
    if n == 0 {
        return ExtendedNat::Infinity;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    ExtendedNat::Finite(v)
}

impl FactoredBase {
    /// ν_b(x) = min_i ⌊ν_{p_i}(x) / l_i⌋ for an integer x.
    pub fn nu_int(&self, x: &BigInt) -> ExtendedNat {
        if x.is_zero() {
            return ExtendedNat::Infinity;
        }
        self.factors()
            .iter()
            .map(|f| nu_p(x, f.p).div_floor(f.l as u64))
            .min()
            .expect("base has at least one prime")
    }

    /// L_b(x) = b^{-ν_b(x)}·x: x with its trailing base-b zeros deleted. L_b(0) = 0.
    pub fn strip_int(&self, x: &BigInt) -> BigInt {
        match self.nu_int(x) {
            ExtendedNat::Infinity => BigInt::zero(),
            ExtendedNat::Finite(v) => {
                let divisor = BigInt::from(self.b()).pow(
                    v.to_u32()
                        .expect("valuation fits in u32 for representable integers"),
                );
                x / divisor
            }
        }
    }

    /// ℓ_{b,d}(x) = L_b(x) mod b^d: the last block of d digits not ending in zero.
    /// The result is the canonical representative in [0, b^d).
    pub fn last_digits_int(&self, x: &BigInt, d: u32) -> BigUint {
        assert!(d >= 1, "digit count d must be positive");
        let stripped = self.strip_int(x);
        let modulus = BigInt::from(self.b_pow(d));
        stripped
            .mod_floor(&modulus)
            .to_biguint()
            .expect("mod_floor of a positive modulus is nonnegative")
    }
}
