use crate::arith::nu_p;
use crate::error::{Error, Result};
use crate::padic::PAdicApprox;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// A polynomial with rational coefficients, lowest degree first; the leading
/// coefficient is nonzero (the zero polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    /// Builds a polynomial, trimming leading zeros.
    pub fn new(mut coeffs: Vec<BigRational>) -> RationalPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> RationalPoly {
        RationalPoly { coeffs: vec![] }
    }

    /// Convenience constructor from integer coefficients, lowest first.
    pub fn from_ints(coeffs: &[i64]) -> RationalPoly {
        RationalPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigRational {
        self.eval(&BigRational::from_integer(x.clone()))
    }

    /// Evaluates with p-adic arithmetic; coefficients are embedded with
    /// `coeff_prec` unit digits and precision flows through the Horner loop.
    pub fn eval_padic(&self, x: &PAdicApprox, coeff_prec: u32) -> PAdicApprox {
        let mut acc = PAdicApprox::exact_zero(x.p());
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .add(&PAdicApprox::from_rational(c, x.p(), coeff_prec));
        }
        acc
    }

    pub fn derivative(&self) -> RationalPoly {
        if self.coeffs.len() <= 1 {
            return RationalPoly::zero();
        }
        RationalPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i + 1)))
                .collect(),
        )
    }

    pub fn add(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RationalPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }

    pub fn pow(&self, e: u32) -> RationalPoly {
        let mut out = RationalPoly::from_ints(&[1]);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// The polynomial x -> f(s*x + t).
    pub fn compose_linear(&self, s: &BigRational, t: &BigRational) -> RationalPoly {
        let mut acc = RationalPoly::zero();
        for c in self.coeffs.iter().rev() {
            // acc = acc*(s x + t) + c
            let mut next = vec![BigRational::zero(); acc.coeffs.len() + 1];
            for (i, a) in acc.coeffs.iter().enumerate() {
                next[i + 1] += a * s;
                next[i] += a * t;
            }
            next[0] += c;
            acc = RationalPoly::new(next);
        }
        acc
    }

    /// Quotient and remainder of polynomial long division.
    pub fn divmod(&self, d: &RationalPoly) -> (RationalPoly, RationalPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return (RationalPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); rem.len() - dn + 1];
        let lead = d.leading().clone();
        for i in (0..q.len()).rev() {
            let c = &rem[i + dn - 1] / &lead;
            if !c.is_zero() {
                for j in 0..dn {
                    let t = &c * &d.coeffs[j];
                    rem[i + j] -= t;
                }
            }
            q[i] = c;
        }
        (RationalPoly::new(q), RationalPoly::new(rem))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, d: &RationalPoly) -> RationalPoly {
        let (q, r) = self.divmod(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> RationalPoly {
        let lead = self.leading().clone();
        self.scale(&(BigRational::one() / lead))
    }

    /// Monic greatest common divisor over the rationals.
    pub fn monic_gcd(&self, other: &RationalPoly) -> RationalPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divmod(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Square-free decomposition: monic pairwise-coprime factors with their
    /// multiplicities, covering all roots (the content is dropped).
    pub fn square_free_decomposition(&self) -> Vec<(RationalPoly, u32)> {
        assert!(!self.is_zero(), "decomposition of the zero polynomial");
        if self.degree() == 0 {
            return vec![];
        }
        let fp = self.derivative();
        let g = self.monic_gcd(&fp);
        if g.degree() == 0 {
            return vec![(self.monic(), 1)];
        }
        let mut out = vec![];
        let mut b = self.div_exact(&g);
        let mut c = fp.div_exact(&g);
        let mut d = c.sub(&b.derivative());
        let mut i = 1u32;
        loop {
            let a = b.monic_gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a);
            if b.degree() == 0 {
                break;
            }
            c = d.div_exact(&a);
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Scales to integer coefficients with content 1; returns the removed
    /// positive content and the integer coefficients, lowest first.
    pub fn primitive_integer_form(&self) -> (BigRational, Vec<BigInt>) {
        assert!(!self.is_zero(), "primitive form of the zero polynomial");
        let mut den_lcm = BigInt::one();
        for c in &self.coeffs {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let mut num_gcd = BigInt::zero();
        for c in &ints {
            num_gcd = num_gcd.gcd(c);
        }
        let prim: Vec<BigInt> = ints.iter().map(|c| c / &num_gcd).collect();
        (BigRational::new(num_gcd, den_lcm), prim)
    }

    /// Minimum p-adic valuation over the nonzero coefficients.
    pub fn content_valuation(&self, p: u64) -> i64 {
        assert!(!self.is_zero(), "content of the zero polynomial");
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| {
                let a = nu_p(c.numer(), p).finite().expect("nonzero") as i64;
                let b = nu_p(c.denom(), p).finite().expect("nonzero") as i64;
                a - b
            })
            .min()
            .expect("nonzero polynomial has a nonzero coefficient")
    }

    /// Resultant of two polynomials via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &RationalPoly) -> BigRational {
        if self.is_zero() || other.is_zero() {
            return BigRational::zero();
        }
        if other.degree() == 0 {
            return pow_rational(other.leading(), self.degree());
        }
        if self.degree() == 0 {
            return pow_rational(self.leading(), other.degree());
        }
        let r = self.divmod(other).1;
        if r.is_zero() {
            return BigRational::zero();
        }
        let sign = if (self.degree() * other.degree()) % 2 == 1 {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        sign * pow_rational(other.leading(), self.degree() - r.degree()) * other.resultant(&r)
    }
}

fn pow_rational(c: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= c;
    }
    out
}

/// All positive divisors, via trial division; coefficients whose unfactored
/// part exceeds 10^14 are rejected rather than guessed at.
fn positive_divisors(n: &BigUint) -> Result<Vec<BigUint>> {
    assert!(!n.is_zero(), "divisors of zero");
    let mut rem = n.to_u64().ok_or_else(|| {
        Error::domain(
            "rational root search needs constant and leading coefficients below 2^64".to_string(),
        )
    })?;
    let mut factors: Vec<(u64, u32)> = vec![];
    let mut d = 2u64;
    while d <= 10_000_000 && d * d <= rem {
        if rem % d == 0 {
            let mut e = 0u32;
            while rem % d == 0 {
                rem /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        if rem > 100_000_000_000_000 {
            return Err(Error::domain(format!(
                "cannot certify the factorization of coefficient divisor {}",
                rem
            )));
        }
        factors.push((rem, 1));
    }
    let mut out = vec![BigUint::one()];
    for (q, e) in factors {
        let mut next = vec![];
        for div in &out {
            let mut qe = BigUint::one();
            for _ in 0..=e {
                next.push(div * &qe);
                qe *= q;
            }
        }
        out = next;
    }
    Ok(out)
}

/// All rational roots with multiplicities, exactly, sorted by value.
pub fn rational_roots(f: &RationalPoly) -> Result<Vec<(BigRational, u32)>> {
    if f.is_zero() {
        return Err(Error::domain(
            "root search on the zero polynomial".to_string(),
        ));
    }
    if f.degree() == 0 {
        return Ok(vec![]);
    }
    let (_, ints) = f.primitive_integer_form();
    let mut out: Vec<(BigRational, u32)> = vec![];
    let zeros = ints.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        out.push((BigRational::zero(), zeros as u32));
    }
    let reduced = RationalPoly::new(
        ints[zeros..]
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    );
    if reduced.degree() == 0 {
        out.sort_by(|a, b| a.0.cmp(&b.0));
        return Ok(out);
    }
    let a0 = reduced.coeff(0).to_integer().magnitude().clone();
    let an = reduced.leading().to_integer().magnitude().clone();
    let mut candidates: BTreeSet<BigRational> = BTreeSet::new();
    for num in positive_divisors(&a0)? {
        for den in positive_divisors(&an)? {
            let q = BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()));
            candidates.insert(q.clone());
            candidates.insert(-q);
        }
    }
    for theta in candidates {
        let mut h = reduced.clone();
        let mut m = 0u32;
        let linear = RationalPoly::new(vec![-theta.clone(), BigRational::one()]);
        while !h.is_zero() && h.degree() >= 1 && h.eval(&theta).is_zero() {
            h = h.div_exact(&linear);
            m += 1;
        }
        if m > 0 {
            out.push((theta, m));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn division_and_gcd() {
        let f = RationalPoly::from_ints(&[-1, 0, 1]);
        let g = RationalPoly::from_ints(&[-1, 1]);
        let (q, r) = f.divmod(&g);
        assert!(r.is_zero(), "x - 1 divides x^2 - 1");
        assert_eq!(q, RationalPoly::from_ints(&[1, 1]));

        let h = g.mul(&g);
        let gcd = f.monic_gcd(&h);
        assert_eq!(
            gcd,
            RationalPoly::from_ints(&[-1, 1]),
            "common factor x - 1"
        );
    }

    #[test]
    fn square_free_decomposition_rebuilds_input() {
        let f = RationalPoly::from_ints(&[-1, 1])
            .pow(2)
            .mul(&RationalPoly::from_ints(&[2, 1]))
            .scale(&rat(3, 1));
        let parts = f.square_free_decomposition();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (RationalPoly::from_ints(&[2, 1]), 1));
        assert_eq!(parts[1], (RationalPoly::from_ints(&[-1, 1]), 2));

        let mut rebuilt = RationalPoly::from_ints(&[1]);
        for (g, m) in &parts {
            rebuilt = rebuilt.mul(&g.pow(*m));
        }
        assert_eq!(
            rebuilt.monic(),
            f.monic(),
            "factors multiply back to f up to content"
        );
    }

    #[test]
    fn quadruple_factor_detected() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        let parts = f.square_free_decomposition();
        assert_eq!(parts, vec![(RationalPoly::from_ints(&[1, 0, 1]), 4)]);
    }

    #[test]
    fn rational_root_examples() {
        let f = RationalPoly::from_ints(&[0, 1, 1]);
        let roots = rational_roots(&f).unwrap();
        assert_eq!(roots, vec![(rat(-1, 1), 1), (rat(0, 1), 1)], "x(x+1)");

        let f = RationalPoly::from_ints(&[1, -4, 4]);
        assert_eq!(
            rational_roots(&f).unwrap(),
            vec![(rat(1, 2), 2)],
            "(2x-1)^2"
        );

        let f = RationalPoly::from_ints(&[1, 0, 1]);
        assert!(
            rational_roots(&f).unwrap().is_empty(),
            "x^2 + 1 has no rational roots"
        );

        let f = RationalPoly::from_ints(&[-2, 3])
            .pow(3)
            .mul(&RationalPoly::from_ints(&[5, 1]));
        let roots = rational_roots(&f).unwrap();
        assert_eq!(roots, vec![(rat(-5, 1), 1), (rat(2, 3), 3)]);

        let scaled = f.scale(&rat(7, 13));
        assert_eq!(
            rational_roots(&scaled).unwrap(),
            roots,
            "scaling preserves roots"
        );
    }

    #[test]
    fn roots_verify_by_evaluation() {
        let f = RationalPoly::from_ints(&[6, -5, -2, 1]);
        for (theta, m) in rational_roots(&f).unwrap() {
            assert!(
                f.eval(&theta).is_zero(),
                "claimed root {} evaluates to zero",
                theta
            );
            assert!(m >= 1);
        }
    }

    #[test]
    fn resultant_matches_root_product() {
        let f = RationalPoly::from_ints(&[-1, 0, 1]);
        let g = RationalPoly::from_ints(&[-6, 2]);
        assert_eq!(
            f.resultant(&g),
            rat(32, 1),
            "lc(f)^deg(g) * g(1) * g(-1) = (-4)(-8)"
        );
        let sf = f.mul(&f);
        assert!(
            f.resultant(&f.scale(&rat(2, 1))).is_zero(),
            "shared roots kill the resultant"
        );
        assert!(!sf.is_zero());
    }

    #[test]
    fn compose_linear_matches_evaluation() {
        let f = RationalPoly::from_ints(&[1, 2, 0, 3]);
        let g = f.compose_linear(&rat(4, 1), &rat(3, 1));
        for x in -5..=5 {
            let inner = rat(4 * x + 3, 1);
            assert_eq!(
                g.eval(&rat(x, 1)),
                f.eval(&inner),
                "g(x) = f(4x + 3) at x = {}",
                x
            );
        }
    }

    #[test]
    fn content_and_primitive_form() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        assert_eq!(f.content_valuation(5), 1);
        assert_eq!(f.content_valuation(2), 0);
        let half = RationalPoly::new(vec![rat(1, 1), rat(1, 2)]);
        assert_eq!(half.content_valuation(2), -1);

        let (content, ints) =
            RationalPoly::new(vec![rat(4, 3), rat(2, 3)]).primitive_integer_form();
        assert_eq!(content, rat(2, 3));
        assert_eq!(ints, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn divisor_enumeration() {
        let divs = positive_divisors(&BigUint::from(12u32)).unwrap();
        let mut got: Vec<u64> = divs.iter().map(|d| d.to_u64().unwrap()).collect();
        got.sort();
        assert_eq!(got, vec![1, 2, 3, 4, 6, 12]);
    }
}
