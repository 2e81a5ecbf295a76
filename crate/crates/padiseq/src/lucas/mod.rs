//! Lucas sequences of the first kind: exact terms in logarithmically many
//! arithmetic operations, closed-form p-adic valuations via the rank of
//! apparition, p-adic analytic interpolation of the subsequences
//! (u_{pi m + j})_m, and the classification of terms that are sums of three
//! squares.

mod squares;

pub use squares::{three_squares_classify, three_squares_verify, ThreeSquaresReport};

use crate::arith::{is_prime_u64, nu_p, nu_p_u64, ExtendedNat, FactoredBase};
use crate::error::{Error, Result};
use crate::padic::PAdicApprox;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

const PARAM_BOUND: i64 = 1 << 20;

/// Parameters of the recurrence u_0 = 0, u_1 = 1, u_{n+2} = A u_{n+1} + B u_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LucasParams {
    a: i64,
    b: i64,
}

impl LucasParams {
    pub fn new(a: i64, b: i64) -> Result<LucasParams> {
        if a.abs() > PARAM_BOUND || b.abs() > PARAM_BOUND {
            return Err(Error::domain(format!(
                "the parameters must lie in [-{0}, {0}]",
                PARAM_BOUND
            )));
        }
        Ok(LucasParams { a, b })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// The discriminant A^2 + 4B of x^2 - Ax - B.
    pub fn discriminant(&self) -> i64 {
        self.a * self.a + 4 * self.b
    }

    /// Whether the ratio of the characteristic roots is not a root of unity.
    /// The ratio is a root of unity exactly when alpha/beta + beta/alpha
    /// lies in [-2, 2], which for integer parameters means
    /// A^2 in {0, -B, -2B, -3B, -4B}; B = 0 collapses one root to zero.
    pub fn nondegenerate(&self) -> bool {
        let a2 = self.a * self.a;
        let b = self.b;
        b != 0 && ![0, -b, -2 * b, -3 * b, -4 * b].contains(&a2)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.nondegenerate() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "the sequence with A = {}, B = {} is degenerate",
                self.a, self.b
            )))
        }
    }

    fn require_coprime(&self, prime: u64) -> Result<()> {
        if !is_prime_u64(prime) {
            return Err(Error::domain(format!("{} is not a prime", prime)));
        }
        if self.b.rem_euclid(prime as i64) == 0 {
            return Err(Error::domain(format!("{} divides B = {}", prime, self.b)));
        }
        Ok(())
    }
}

/// (u_n, u_{n+1}) over exact integers by binary doubling:
/// u_{2k} = u_k (2 u_{k+1} - A u_k) and u_{2k+1} = u_{k+1}^2 + B u_k^2.
fn pair_exact(p: &LucasParams, n: u64) -> (BigInt, BigInt) {
    let a = BigInt::from(p.a);
    let b = BigInt::from(p.b);
    let (mut u, mut v) = (BigInt::zero(), BigInt::one());
    for i in (0..64 - n.leading_zeros()).rev() {
        let du = &u * (BigInt::from(2) * &v - &a * &u);
        let dv = &v * &v + &b * (&u * &u);
        u = du;
        v = dv;
        if (n >> i) & 1 == 1 {
            let next = &a * &v + &b * &u;
            u = std::mem::replace(&mut v, next);
        }
    }
    (u, v)
}

/// (u_n, u_{n+1}) mod 2^64 in wrapping arithmetic.
pub(crate) fn pair_wrapping(p: &LucasParams, n: u64) -> (u64, u64) {
    let a = p.a as u64;
    let b = p.b as u64;
    let (mut u, mut v) = (0u64, 1u64);
    for i in (0..64 - n.leading_zeros()).rev() {
        let du = u.wrapping_mul(v.wrapping_mul(2).wrapping_sub(a.wrapping_mul(u)));
        let dv = v
            .wrapping_mul(v)
            .wrapping_add(b.wrapping_mul(u.wrapping_mul(u)));
        u = du;
        v = dv;
        if (n >> i) & 1 == 1 {
            let next = a.wrapping_mul(v).wrapping_add(b.wrapping_mul(u));
            u = v;
            v = next;
        }
    }
    (u, v)
}

/// (u_n, u_{n+1}) mod m, accepting a big exponent.
fn pair_mod(p: &LucasParams, n: &BigUint, m: &BigUint) -> (BigUint, BigUint) {
    let to_residue = |x: i64| {
        BigInt::from(x)
            .mod_floor(&BigInt::from(m.clone()))
            .to_biguint()
            .expect("nonnegative")
    };
    let a = to_residue(p.a);
    let b = to_residue(p.b);
    let two = BigUint::from(2u32) % m;
    let (mut u, mut v) = (BigUint::zero(), BigUint::one() % m);
    for i in (0..n.bits()).rev() {
        let au = (&a * &u) % m;
        let s = ((&two * &v) % m + m - au) % m;
        let du = (&u * s) % m;
        let dv = ((&v * &v) % m + (&b * ((&u * &u) % m)) % m) % m;
        u = du;
        v = dv;
        if n.bit(i) {
            let next = ((&a * &v) % m + (&b * &u) % m) % m;
            u = std::mem::replace(&mut v, next);
        }
    }
    (u, v)
}

/// u_n as an exact integer.
pub fn lucas_term(p: &LucasParams, n: u64) -> BigInt {
    pair_exact(p, n).0
}

/// u_n mod m in logarithmically many multiplications.
pub fn lucas_term_mod(p: &LucasParams, n: &BigUint, m: &BigUint) -> BigUint {
    pair_mod(p, n, m).0
}

/// The least n >= 1 with prime | u_n, defined whenever prime does not
/// divide B. It never exceeds 2(prime + 1).
pub fn rank_of_apparition(p: &LucasParams, prime: u64) -> Result<u64> {
    p.require_coprime(prime)?;
    if prime >= 1 << 31 {
        return Err(Error::domain(
            "the prime is too large for the rank scan".to_string(),
        ));
    }
    let a = p.a.rem_euclid(prime as i64) as u64;
    let b = p.b.rem_euclid(prime as i64) as u64;
    let (mut u, mut v) = (0u64, 1 % prime);
    for n in 1..=2 * prime + 4 {
        let next = (a * v + b * u) % prime;
        u = v;
        v = next;
        if u == 0 {
            return Ok(n);
        }
    }
    Err(Error::domain(
        "no rank of apparition within twice the prime; is the sequence degenerate?".to_string(),
    ))
}

/// nu_p(u_k) read off a modular residue, escalating precision as needed.
fn nu_of_term(p: &LucasParams, prime: u64, k: u64) -> Result<u64> {
    for prec in [8u32, 16, 32, 64] {
        let modulus = BigUint::from(prime).pow(prec);
        let r = lucas_term_mod(p, &BigUint::from(k), &modulus);
        if !r.is_zero() {
            return Ok(nu_p(&BigInt::from(r), prime).finite().expect("nonzero"));
        }
    }
    Err(Error::precision(
        "a reference term vanishes beyond the working precision".to_string(),
    ))
}

/// nu_p(u_n) in closed form: it is determined by nu_p(n), divisibility of n
/// by the rank of apparition tau, and the fixed quantities nu_p(u_p),
/// nu_p(u_tau), nu_p(u_{p tau}).
pub fn sanna_valuation(p: &LucasParams, prime: u64, n: u64) -> Result<ExtendedNat> {
    p.require_nondegenerate()?;
    p.require_coprime(prime)?;
    if n == 0 {
        return Ok(ExtendedNat::Infinity);
    }
    let nu_n = nu_p_u64(n, prime).finite().expect("n > 0");
    let value = if p.discriminant().rem_euclid(prime as i64) == 0 {
        if n % prime == 0 {
            nu_n + nu_of_term(p, prime, prime)? - 1
        } else {
            0
        }
    } else {
        let tau = rank_of_apparition(p, prime)?;
        if n % tau == 0 {
            if n % prime == 0 {
                nu_n + nu_of_term(p, prime, prime * tau)? - 1
            } else {
                nu_of_term(p, prime, tau)?
            }
        } else {
            0
        }
    };
    Ok(ExtendedNat::Finite(value))
}

/// nu_b(u_n) = min_i floor(nu_{p_i}(u_n) / l_i), requiring gcd(b, B) = 1.
pub fn nu_b_lucas(p: &LucasParams, base: &FactoredBase, n: u64) -> Result<ExtendedNat> {
    let mut best = ExtendedNat::Infinity;
    for f in base.factors() {
        let v = sanna_valuation(p, f.p, n)?.div_floor(f.l as u64);
        best = best.min(v);
    }
    Ok(best)
}

/// The multiplicative order of the companion matrix [[0,1],[B,A]] mod 4 for
/// p = 2 and mod p^2 for odd p. With pi this order, alpha^pi and beta^pi
/// land inside the convergence disc of the p-adic logarithm.
pub fn pi_exponent(p: &LucasParams, prime: u64) -> Result<u64> {
    p.require_coprime(prime)?;
    if prime >= 1 << 15 {
        return Err(Error::domain(
            "the prime is too large for the order scan".to_string(),
        ));
    }
    let m = if prime == 2 { 4 } else { prime * prime };
    let a = p.a.rem_euclid(m as i64) as u64;
    let b = p.b.rem_euclid(m as i64) as u64;
    let step = [0, 1 % m, b, a];
    let identity = [1 % m, 0, 0, 1 % m];
    let mut c = identity;
    const MAX_ORDER: u64 = 1 << 24;
    for k in 1..=MAX_ORDER {
        c = [
            (c[0] * step[0] + c[1] * step[2]) % m,
            (c[0] * step[1] + c[1] * step[3]) % m,
            (c[2] * step[0] + c[3] * step[2]) % m,
            (c[2] * step[1] + c[3] * step[3]) % m,
        ];
        if c == identity {
            return Ok(k);
        }
    }
    Err(Error::precision(
        "the companion matrix order exceeds the scan bound".to_string(),
    ))
}

/// Evaluation data for the p-adic interpolations f_j of m -> u_{pi m + j}:
/// the step pi and a continuity slack kappa certified so that
/// nu_p(f_j(x) - f_j(y)) >= nu_p(x - y) - kappa for all x, y in Z_p.
#[derive(Clone, Copy, Debug)]
pub struct InterpolationScheme {
    prime: u64,
    pi: u64,
    kappa: u32,
}

impl InterpolationScheme {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn pi(&self) -> u64 {
        self.pi
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }
}

/// Builds the scheme for one prime, certifying the continuity slack.
///
/// The certificate is exact rather than sampled: for integer x, y with
/// x - y = p^t w, the term difference u_{pi x + j} - u_{pi y + j} is an entry
/// of C^{pi y + j} ((C^{pi})^{p^t w} - I), and expanding the inner power
/// shows its valuation is at least t + s where s = min entry valuation of
/// C^pi - I. The choice of pi makes s >= 1, giving slack 0; density extends
/// the bound from integers to Z_p.
pub fn interpolation_scheme(p: &LucasParams, prime: u64) -> Result<InterpolationScheme> {
    let pi = pi_exponent(p, prime)?;
    let slack = companion_log_slack(p, prime, pi)?;
    if slack < 1 {
        return Err(Error::precision(
            "the continuity slack could not be certified".to_string(),
        ));
    }
    Ok(InterpolationScheme {
        prime,
        pi,
        kappa: 0,
    })
}

/// min entry valuation of C^pi - I, capped at the scan precision.
fn companion_log_slack(p: &LucasParams, prime: u64, pi: u64) -> Result<u32> {
    let prec = 24u32;
    let modulus = BigUint::from(prime).pow(prec);
    let (u_prev, u_cur) = pair_mod(p, &BigUint::from(pi - 1), &modulus);
    let b = BigInt::from(p.b)
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .expect("nonnegative");
    let a = BigInt::from(p.a)
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .expect("nonnegative");
    let u_next = ((&a * &u_cur) % &modulus + (&b * &u_prev) % &modulus) % &modulus;
    let one = BigUint::one();
    let entries = [
        ((&b * &u_prev) % &modulus + &modulus - &one) % &modulus,
        u_cur.clone(),
        (&b * &u_cur) % &modulus,
        (u_next + &modulus - &one) % &modulus,
    ];
    let mut slack = prec;
    for e in entries {
        if !e.is_zero() {
            let v = nu_p(&BigInt::from(e), prime).finite().expect("nonzero") as u32;
            slack = slack.min(v);
        }
    }
    Ok(slack)
}

/// f_j(x) mod prime^digits for x in Z_p: lift x to an integer m with a
/// doubled continuity margin and return u_{pi m + j} mod prime^digits.
pub fn interp_eval(
    p: &LucasParams,
    scheme: &InterpolationScheme,
    j: u64,
    x: &PAdicApprox,
    digits: u32,
) -> Result<PAdicApprox> {
    if j >= scheme.pi {
        return Err(Error::domain(format!(
            "the residue {} is not below the step {}",
            j, scheme.pi
        )));
    }
    if digits == 0 {
        return Err(Error::domain("at least one digit is required".to_string()));
    }
    let m = x.to_residue(digits + 2 * scheme.kappa)?;
    let exponent = BigUint::from(scheme.pi) * m + BigUint::from(j);
    let modulus = BigUint::from(scheme.prime).pow(digits);
    let r = lucas_term_mod(p, &exponent, &modulus);
    Ok(PAdicApprox::from_residue(scheme.prime, &r, digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn fib() -> LucasParams {
        LucasParams::new(1, 1).unwrap()
    }

    fn pell() -> LucasParams {
        LucasParams::new(2, 1).unwrap()
    }

    /// u_n by direct iteration, the reference path.
    fn term_iterative(p: &LucasParams, n: u64) -> BigInt {
        let a = BigInt::from(p.a);
        let b = BigInt::from(p.b);
        let (mut u, mut v) = (BigInt::zero(), BigInt::one());
        for _ in 0..n {
            let next = &a * &v + &b * &u;
            u = std::mem::replace(&mut v, next);
        }
        u
    }

    #[test]
    fn named_terms() {
        assert_eq!(lucas_term(&fib(), 10), BigInt::from(55));
        assert_eq!(lucas_term(&pell(), 10), BigInt::from(2378));
        assert_eq!(lucas_term(&pell(), 12), BigInt::from(13860));
        let m = BigUint::from(100u32);
        assert_eq!(
            lucas_term_mod(&fib(), &BigUint::from(30u32), &m),
            BigUint::from(40u32),
            "F_30 = 832040"
        );
    }

    #[test]
    fn doubling_matches_iteration() {
        for (a, b) in [(1i64, 1i64), (2, 1), (-1, 2), (3, -2), (1, -3)] {
            let p = LucasParams::new(a, b).unwrap();
            for n in 0..40 {
                assert_eq!(
                    lucas_term(&p, n),
                    term_iterative(&p, n),
                    "A = {}, B = {}, n = {}",
                    a,
                    b,
                    n
                );
            }
        }
    }

    #[test]
    fn modular_paths_agree() {
        let p = pell();
        for n in [0u64, 1, 17, 100, 999] {
            let exact = lucas_term(&p, n);
            for m in [2u64, 7, 100, 1 << 20] {
                let modulus = BigUint::from(m);
                let expect = exact.mod_floor(&BigInt::from(m)).to_biguint().unwrap();
                assert_eq!(lucas_term_mod(&p, &BigUint::from(n), &modulus), expect);
            }
            let (w, _) = pair_wrapping(&p, n);
            let expect = exact
                .mod_floor(&(BigInt::one() << 64))
                .to_u64()
                .expect("reduced");
            assert_eq!(w, expect, "wrapping path at n = {}", n);
        }
    }

    #[test]
    fn degeneracy_catalog() {
        assert!(fib().nondegenerate());
        assert!(pell().nondegenerate());
        assert!(!LucasParams::new(1, -1).unwrap().nondegenerate());
        assert!(!LucasParams::new(2, -1).unwrap().nondegenerate(), "u_n = n");
        assert!(!LucasParams::new(0, 5).unwrap().nondegenerate());
        assert!(!LucasParams::new(3, 0).unwrap().nondegenerate());
    }

    #[test]
    fn ranks_of_apparition() {
        assert_eq!(rank_of_apparition(&fib(), 2).unwrap(), 3);
        assert_eq!(rank_of_apparition(&fib(), 3).unwrap(), 4);
        assert_eq!(rank_of_apparition(&fib(), 5).unwrap(), 5);
        assert_eq!(rank_of_apparition(&fib(), 7).unwrap(), 8, "F_8 = 21");
        assert_eq!(rank_of_apparition(&pell(), 2).unwrap(), 2);
        let err = rank_of_apparition(&LucasParams::new(1, 3).unwrap(), 3).unwrap_err();
        assert!(err.to_string().contains("divides B"), "got: {}", err);
    }

    #[test]
    fn valuation_spot_values() {
        assert_eq!(
            sanna_valuation(&fib(), 2, 6).unwrap(),
            ExtendedNat::Finite(3),
            "F_6 = 8"
        );
        assert_eq!(
            sanna_valuation(&fib(), 5, 25).unwrap(),
            ExtendedNat::Finite(2)
        );
        assert_eq!(
            sanna_valuation(&pell(), 2, 20).unwrap(),
            ExtendedNat::Finite(2)
        );
        assert_eq!(
            sanna_valuation(&fib(), 2, 0).unwrap(),
            ExtendedNat::Infinity
        );
    }

    #[test]
    fn valuation_formula_matches_brute_force() {
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                let p = LucasParams::new(a, b).unwrap();
                if !p.nondegenerate() {
                    continue;
                }
                let mut u = BigInt::zero();
                let mut v = BigInt::one();
                for n in 0..200u64 {
                    for prime in [2u64, 3, 5, 7] {
                        if p.b.rem_euclid(prime as i64) == 0 {
                            continue;
                        }
                        let direct = nu_p(&u, prime);
                        let formula = sanna_valuation(&p, prime, n).unwrap();
                        assert_eq!(
                            formula, direct,
                            "A = {}, B = {}, p = {}, n = {}",
                            a, b, prime, n
                        );
                    }
                    let next = BigInt::from(p.a) * &v + BigInt::from(p.b) * &u;
                    u = std::mem::replace(&mut v, next);
                }
            }
        }
    }

    #[test]
    fn base_valuations() {
        let ten = FactoredBase::new(10).unwrap();
        assert_eq!(
            nu_b_lucas(&fib(), &ten, 30).unwrap(),
            ExtendedNat::Finite(1)
        );
        assert_eq!(nu_b_lucas(&fib(), &ten, 7).unwrap(), ExtendedNat::Finite(0));
        let four = FactoredBase::new(4).unwrap();
        assert_eq!(
            nu_b_lucas(&pell(), &four, 20).unwrap(),
            ExtendedNat::Finite(1)
        );
        let six = FactoredBase::new(6).unwrap();
        let err = nu_b_lucas(&LucasParams::new(1, 3).unwrap(), &six, 5).unwrap_err();
        assert!(err.to_string().contains("divides B"), "got: {}", err);
    }

    #[test]
    fn interpolation_steps() {
        assert_eq!(pi_exponent(&pell(), 2).unwrap(), 4);
        assert_eq!(pi_exponent(&fib(), 2).unwrap(), 6);
        assert_eq!(pi_exponent(&fib(), 5).unwrap(), 100);
    }

    #[test]
    fn interpolation_consistency_with_integers() {
        let scheme = interpolation_scheme(&pell(), 2).unwrap();
        assert_eq!(scheme.pi(), 4);
        let x = PAdicApprox::from_residue(2, &BigUint::from(3u32), 30);
        let got = interp_eval(&pell(), &scheme, 0, &x, 6).unwrap();
        assert_eq!(
            got.to_residue(6).unwrap(),
            BigUint::from(13860u64 % 64),
            "P_12 mod 64"
        );
        let fib_scheme = interpolation_scheme(&fib(), 2).unwrap();
        let zero = PAdicApprox::from_residue(2, &BigUint::zero(), 30);
        let got = interp_eval(&fib(), &fib_scheme, 1, &zero, 8).unwrap();
        assert_eq!(got.to_residue(8).unwrap(), BigUint::one(), "u_1 = 1");
    }

    #[test]
    fn lifts_agree_beyond_the_margin() {
        // Two integer lifts congruent mod 2^(N + 2 kappa) must produce the
        // same digits mod 2^N; this is the continuity certificate in action.
        let scheme = interpolation_scheme(&pell(), 2).unwrap();
        let n_digits = 5u32;
        let modulus = BigUint::from(2u64).pow(n_digits);
        let margin = BigUint::from(2u64).pow(n_digits + 2 * scheme.kappa());
        for base_m in [1u64, 3, 10] {
            let m1 = BigUint::from(base_m);
            let m2 = &m1 + &margin;
            let e1 = BigUint::from(4u32) * &m1;
            let e2 = BigUint::from(4u32) * &m2;
            assert_eq!(
                lucas_term_mod(&pell(), &e1, &modulus),
                lucas_term_mod(&pell(), &e2, &modulus),
                "lift at m = {}",
                base_m
            );
        }
        // A rational argument evaluates deterministically through its residue.
        let third = BigRationalThird::residue(n_digits + 2 * scheme.kappa());
        let x = PAdicApprox::from_residue(2, &third, n_digits + 2 * scheme.kappa());
        let a = interp_eval(&pell(), &scheme, 0, &x, n_digits).unwrap();
        let b = interp_eval(&pell(), &scheme, 0, &x, n_digits).unwrap();
        assert_eq!(
            a.to_residue(n_digits).unwrap(),
            b.to_residue(n_digits).unwrap()
        );
    }

    /// 1/3 in Z_2 to the requested precision.
    struct BigRationalThird;

    impl BigRationalThird {
        fn residue(prec: u32) -> BigUint {
            let modulus = BigUint::from(2u64).pow(prec);
            let three = BigUint::from(3u32);
            crate::arith::mod_inverse(&three, &modulus).expect("3 is odd")
        }
    }
}
