use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::base::{mod_inverse, FactoredBase};
use super::extnat::ExtendedNat;
use super::valuation::nu_p;
use crate::error::{Error, Result};

/// One component of an element of Z_b ≅ Z_{p_1} × ... × Z_{p_s}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZbPart {
    /// An exact rational lying in Z_p (denominator coprime to p).
    Exact(BigRational),
    /// A truncated p-adic integer: value ≡ residue (mod p^prec), 0 ≤ residue < p^prec.
    Approx { residue: BigUint, prec: u32 },
}

/// An element of Z_b as a tuple of per-prime components, each exact or truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZbElement {
    parts: Vec<ZbPart>,
}

/// What is known about ν_p of one component.
enum PartNu {
    ExactZero,
    Determined(u64),
    /// Residue is 0 mod p^prec: all we know is ν_p ≥ prec.
    AtLeast(u64),
}

impl ZbElement {
    /// Diagonal embedding of an integer.
    pub fn from_int(x: &BigInt, base: &FactoredBase) -> ZbElement {
        let q = BigRational::from_integer(x.clone());
        ZbElement {
            parts: vec![ZbPart::Exact(q); base.num_primes()],
        }
    }

    /// Componentwise exact rationals; each denominator must be coprime to its prime.
    pub fn from_rationals(values: Vec<BigRational>, base: &FactoredBase) -> Result<ZbElement> {
        Self::from_parts(values.into_iter().map(ZbPart::Exact).collect(), base)
    }

    /// Componentwise exact integers.
    pub fn from_ints(values: Vec<BigInt>, base: &FactoredBase) -> Result<ZbElement> {
        Self::from_parts(
            values
                .into_iter()
                .map(|v| ZbPart::Exact(BigRational::from_integer(v)))
                .collect(),
            base,
        )
    }

    pub fn from_parts(parts: Vec<ZbPart>, base: &FactoredBase) -> Result<ZbElement> {
        if parts.len() != base.num_primes() {
            return Err(Error::domain(format!(
                "element of Z_{} needs {} components, got {}",
                base.b(),
                base.num_primes(),
                parts.len()
            )));
        }
        for (i, part) in parts.iter().enumerate() {
            let p = base.factors()[i].p;
            match part {
                ZbPart::Exact(q) => {
                    if !nu_p(q.denom(), p).finite().map(|v| v == 0).unwrap_or(false) {
                        return Err(Error::domain(format!(
                            "component {i} denominator {} is not a unit in Z_{p}",
                            q.denom()
                        )));
                    }
                }
                ZbPart::Approx { residue, prec } => {
                    if *prec < 1 {
                        return Err(Error::domain(format!(
                            "component {i} precision must be at least 1"
                        )));
                    }
                    if residue >= &BigUint::from(p).pow(*prec) {
                        return Err(Error::domain(format!(
                            "component {i} residue {} not reduced mod {p}^{prec}",
                            residue
                        )));
                    }
                }
            }
        }
        Ok(ZbElement { parts })
    }

    pub fn parts(&self) -> &[ZbPart] {
        &self.parts
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.parts.iter().all(|part| match part {
            ZbPart::Exact(q) => q.is_zero(),
            ZbPart::Approx { .. } => false,
        })
    }

    fn part_nu(&self, i: usize, p: u64) -> PartNu {
        match &self.parts[i] {
            ZbPart::Exact(q) => {
                if q.is_zero() {
                    PartNu::ExactZero
                } else {
                    // denominator is a unit, so ν = ν_p(numerator)
                    PartNu::Determined(nu_p(q.numer(), p).finite().unwrap())
                }
            }
            ZbPart::Approx { residue, prec } => {
                if residue.is_zero() {
                    PartNu::AtLeast(*prec as u64)
                } else {
                    PartNu::Determined(nu_p(&BigInt::from(residue.clone()), p).finite().unwrap())
                }
            }
        }
    }
}

impl FactoredBase {
    /// ν_b(x) = min_i ⌊ν_{p_i}(x_i)/l_i⌋ over the components of a tuple.
    ///
    /// Truncated components that vanish to their precision are tolerated only
    /// when some other component already realizes a smaller or equal minimum.
    pub fn nu_zb(&self, x: &ZbElement) -> Result<ExtendedNat> {
        self.check_arity(x)?;
        let mut determined_min = ExtendedNat::Infinity;
        let mut unknown_floor = ExtendedNat::Infinity;
        for (i, f) in self.factors().iter().enumerate() {
            let l = f.l as u64;
            match x.part_nu(i, f.p) {
                PartNu::ExactZero => {}
                PartNu::Determined(v) => {
                    determined_min = determined_min.min(ExtendedNat::Finite(v / l));
                }
                PartNu::AtLeast(v) => {
                    unknown_floor = unknown_floor.min(ExtendedNat::Finite(v / l));
                }
            }
        }
        if determined_min <= unknown_floor {
            Ok(determined_min)
        } else {
            Err(Error::precision(format!(
                "ν_{} undetermined: a component vanishing to its precision could realize the minimum",
                self.b()
            )))
        }
    }

    /// L_b(x) = b^{-ν_b(x)}·x, computed componentwise. L_b(0) = 0.
    pub fn strip_zb(&self, x: &ZbElement) -> Result<ZbElement> {
        self.check_arity(x)?;
        let nu = match self.nu_zb(x)? {
            ExtendedNat::Infinity => return Ok(x.clone()),
            ExtendedNat::Finite(v) => v,
        };
        let nu32 = nu
            .to_u32()
            .ok_or_else(|| Error::domain("valuation exceeds u32".to_string()))?;
        let b_nu = BigInt::from(self.b()).pow(nu32);
        let mut parts = Vec::with_capacity(x.parts.len());
        for (i, f) in self.factors().iter().enumerate() {
            let e = f.l * nu32;
            match &x.parts[i] {
                ZbPart::Exact(q) => {
                    let stripped = q / BigRational::from_integer(b_nu.clone());
                    debug_assert!(
                        nu_p(stripped.denom(), f.p) == ExtendedNat::Finite(0),
                        "p must divide out of an exact component"
                    );
                    parts.push(ZbPart::Exact(stripped));
                }
                ZbPart::Approx { residue, prec } => {
                    if *prec <= e {
                        return Err(Error::precision(format!(
                            "component {i} has {prec} digits, all consumed by b^{nu}"
                        )));
                    }
                    let new_prec = prec - e;
                    let modulus = BigUint::from(f.p).pow(new_prec);
                    let p_e = BigUint::from(f.p).pow(e);
                    let (shifted, rem) = residue.div_rem(&p_e);
                    debug_assert!(
                        rem.is_zero(),
                        "residue divisible by p^(l·ν) by definition of ν"
                    );
                    let q_inv = mod_inverse(&BigUint::from(self.q(i)), &modulus)
                        .expect("cofactor is a unit");
                    let q_inv_nu = q_inv.modpow(&BigUint::from(nu), &modulus);
                    parts.push(ZbPart::Approx {
                        residue: shifted % &modulus * q_inv_nu % modulus,
                        prec: new_prec,
                    });
                }
            }
        }
        Ok(ZbElement { parts })
    }

    /// ℓ_{b,d}(x) = L_b(x) mod b^d via componentwise stripping and CRT.
    pub fn last_digits_zb(&self, x: &ZbElement, d: u32) -> Result<BigUint> {
        self.check_arity(x)?;
        if d == 0 {
            return Err(Error::domain("digit count d must be positive".to_string()));
        }
        let nu = match self.nu_zb(x)? {
            ExtendedNat::Infinity => return Ok(BigUint::zero()),
            ExtendedNat::Finite(v) => v,
        };
        let nu32 = nu
            .to_u32()
            .ok_or_else(|| Error::domain("valuation exceeds u32".to_string()))?;
        let mut residues = Vec::with_capacity(self.num_primes());
        for (i, f) in self.factors().iter().enumerate() {
            let modulus = self.pp_pow(i, d);
            let e = f.l * nu32;
            let y = match &x.parts[i] {
                ZbPart::Exact(q) => {
                    let p_e = BigInt::from(f.p).pow(e);
                    let (num_shift, rem) = q.numer().div_rem(&p_e);
                    debug_assert!(rem.is_zero());
                    let den = q.denom().mod_floor(&BigInt::from(modulus.clone()));
                    let den_inv = mod_inverse(&den.to_biguint().unwrap(), &modulus)
                        .expect("denominator is a unit");
                    let qi_inv = mod_inverse(&BigUint::from(self.q(i)), &modulus)
                        .expect("cofactor is a unit")
                        .modpow(&BigUint::from(nu), &modulus);
                    let num_mod = num_shift
                        .mod_floor(&BigInt::from(modulus.clone()))
                        .to_biguint()
                        .unwrap();
                    num_mod * den_inv % &modulus * qi_inv % &modulus
                }
                ZbPart::Approx { residue, prec } => {
                    let need = e + f.l * d;
                    if *prec < need {
                        return Err(Error::precision(format!(
                            "component {i} needs {need} digits for ℓ_({},{d}), has {prec}",
                            self.b()
                        )));
                    }
                    let p_e = BigUint::from(f.p).pow(e);
                    let (shifted, rem) = residue.div_rem(&p_e);
                    debug_assert!(rem.is_zero());
                    let qi_inv = mod_inverse(&BigUint::from(self.q(i)), &modulus)
                        .expect("cofactor is a unit")
                        .modpow(&BigUint::from(nu), &modulus);
                    shifted % &modulus * qi_inv % &modulus
                }
            };
            residues.push(y);
        }
        self.crt_combine(&residues, d)
    }

    /// ℓ_{b,d}(x) through the explicit per-prime expansion
    ///
    ///   ℓ_{b,d}(x) ≡ Σ_i b_i^{ν_{b_i}(x_i) − ν_b(x)} · q_i^d · r_i^{ν_b(x)+d} · ℓ_{b_i,d}(x_i)
    ///
    /// mod b^d, with terms of zero components dropped (m^{+∞} ≡ 0). Kept as an
    /// independent second route for cross-testing against `last_digits_zb`.
    pub fn last_digits_explicit(&self, x: &ZbElement, d: u32) -> Result<BigUint> {
        self.check_arity(x)?;
        if d == 0 {
            return Err(Error::domain("digit count d must be positive".to_string()));
        }
        let nu = match self.nu_zb(x)? {
            ExtendedNat::Infinity => return Ok(BigUint::zero()),
            ExtendedNat::Finite(v) => v,
        };
        let modulus = self.b_pow(d);
        let mut acc = BigUint::zero();
        for (i, f) in self.factors().iter().enumerate() {
            let l = f.l as u64;
            let nu_i = match x.part_nu(i, f.p) {
                PartNu::ExactZero => continue,
                PartNu::Determined(v) => v,
                PartNu::AtLeast(v) => {
                    if v / l >= nu + d as u64 {
                        // b_i^{ν_{b_i}(x_i) − ν} ≡ 0 mod b_i^d, so the whole
                        // term vanishes mod b^d
                        continue;
                    }
                    return Err(Error::precision(format!(
                        "component {i} vanishes to its precision; term undetermined"
                    )));
                }
            };
            let nu_bi = nu_i / l;
            let delta = nu_bi - nu;
            // ℓ_{b_i,d}(x_i): last digits of the component in its prime-power base
            let pp_mod = self.pp_pow(i, d);
            let e = f.l * (nu_bi as u32);
            let ell_i = match &x.parts[i] {
                ZbPart::Exact(q) => {
                    let p_e = BigInt::from(f.p).pow(e);
                    let (num_shift, rem) = q.numer().div_rem(&p_e);
                    debug_assert!(rem.is_zero());
                    let den = q.denom().mod_floor(&BigInt::from(pp_mod.clone()));
                    let den_inv = mod_inverse(&den.to_biguint().unwrap(), &pp_mod)
                        .expect("denominator is a unit");
                    num_shift
                        .mod_floor(&BigInt::from(pp_mod.clone()))
                        .to_biguint()
                        .unwrap()
                        * den_inv
                        % &pp_mod
                }
                ZbPart::Approx { residue, prec } => {
                    let need = e + f.l * d;
                    if *prec < need {
                        return Err(Error::precision(format!(
                            "component {i} needs {need} digits, has {prec}"
                        )));
                    }
                    let p_e = BigUint::from(f.p).pow(e);
                    (residue / p_e) % &pp_mod
                }
            };
            let bi_delta = BigUint::from(f.pp).modpow(&BigUint::from(delta), &modulus);
            let q_d = BigUint::from(self.q(i)).modpow(&BigUint::from(d), &modulus);
            let r_pow = self.r(i, d).modpow(&BigUint::from(nu + d as u64), &modulus);
            acc = (acc + bi_delta * q_d % &modulus * r_pow % &modulus * ell_i) % &modulus;
        }
        Ok(acc)
    }

    fn check_arity(&self, x: &ZbElement) -> Result<()> {
        if x.parts.len() != self.num_primes() {
            return Err(Error::domain(format!(
                "tuple has {} components but base {} has {} primes",
                x.parts.len(),
                self.b(),
                self.num_primes()
            )));
        }
        Ok(())
    }
}
