use super::poly::{rational_roots, RationalPoly};
use crate::arith::{carmichael_divides, is_prime_u64, mod_inverse, nu_p, ExtendedNat};
use crate::error::{Error, Result};
use crate::padic::PAdicApprox;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// A Z_p root of a rational polynomial with its local data: multiplicity m,
/// exact value when rational, and the valuation and leading digits of the
/// cofactor g(theta), where f = (x - theta)^m * g.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub p: u64,
    /// theta to the absolute precision requested from `padic_roots`.
    pub approx: PAdicApprox,
    pub multiplicity: u32,
    pub rational: Option<BigRational>,
    /// nu_p(g(theta)); can be negative for polynomials with denominators.
    pub cofactor_val: i64,
    /// The delta requested digits of the unit part of g(theta).
    pub cofactor_digits: BigUint,
}

/// One residue class mod p^T of a separating shift report.
#[derive(Clone, Debug)]
pub struct SeparatedResidue {
    pub residue: BigUint,
    pub root: Option<RootDatum>,
}

fn eval_bigint_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative_bigint(coeffs: &[BigInt]) -> Vec<BigInt> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Newton lifting of a simple residue (h(a) = 0, h'(a) a unit mod p) to the
/// unique root of h in a + pZ_p, mod p^target.
fn hensel_lift(h: &[BigInt], p: u64, a: u64, target: u32) -> BigUint {
    let hp = derivative_bigint(h);
    let mut y = BigInt::from(a);
    let mut prec = 1u32;
    while prec < target {
        prec = (2 * prec).min(target);
        let modulus = BigInt::from(BigUint::from(p).pow(prec));
        let fy = eval_bigint_poly(h, &y).mod_floor(&modulus);
        let dy = eval_bigint_poly(&hp, &y).mod_floor(&modulus);
        let inv = mod_inverse(
            &dy.to_biguint().expect("canonical residue"),
            &modulus.to_biguint().expect("positive modulus"),
        )
        .expect("derivative is a unit");
        y = (y - fy * BigInt::from(inv)).mod_floor(&modulus);
    }
    y.to_biguint().expect("canonical residue")
}

/// The rescaled polynomial h(a + p*y) with its p-content removed; the
/// content is at least 1 whenever h(a) vanishes mod p.
fn blow_up(h: &[BigInt], p: u64, a: u64) -> Vec<BigInt> {
    let n = h.len();
    // Taylor coefficients of h at a (integers), via repeated synthetic division.
    let mut work = h.to_vec();
    let a_big = BigInt::from(a);
    let mut taylor = Vec::with_capacity(n);
    for _ in 0..n {
        // Divide work by (x - a): remainder is the next Taylor coefficient.
        let mut rem = BigInt::zero();
        for c in work.iter().rev() {
            rem = rem * &a_big + c;
        }
        let mut quo = Vec::with_capacity(work.len());
        let mut carry = BigInt::zero();
        for c in work.iter().rev() {
            let q = carry.clone();
            carry = carry * &a_big + c;
            quo.push(q);
        }
        quo.remove(0);
        quo.reverse();
        taylor.push(rem);
        if quo.is_empty() {
            break;
        }
        work = quo;
    }
    let mut out: Vec<BigInt> = taylor
        .iter()
        .enumerate()
        .map(|(j, t)| t * BigInt::from(p).pow(j as u32))
        .collect();
    let content = out
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| nu_p(c, p).finite().expect("nonzero"))
        .min()
        .expect("nonzero polynomial");
    debug_assert!(
        content >= 1,
        "blow-up at a vanishing residue strips at least one p"
    );
    let scale = BigInt::from(p).pow(content as u32);
    for c in out.iter_mut() {
        *c = &*c / &scale;
    }
    while out.last().map_or(false, |c| c.is_zero()) {
        out.pop();
    }
    out
}

/// All roots of a square-free polynomial in Z_p, as residues mod p^target.
/// Residues vanishing simply are Hensel-lifted; others are refined by the
/// substitution x = a + p*y until every surviving class resolves.
fn squarefree_zp_roots(h: &RationalPoly, p: u64, target: u32) -> Result<Vec<BigUint>> {
    if h.degree() == 0 {
        return Ok(vec![]);
    }
    if p > 1_000_000 {
        return Err(Error::domain(format!(
            "the residue search enumerates all {} classes mod p, which is too many",
            p
        )));
    }
    let (_, hz) = h.primitive_integer_form();
    let res = h.resultant(&h.derivative());
    assert!(
        !res.is_zero(),
        "square-free polynomials have nonzero discriminant"
    );
    let res_val = (nu_p(res.numer(), p).finite().expect("nonzero") as i64
        - nu_p(res.denom(), p).finite().expect("nonzero") as i64)
        .max(0) as u32;
    let cap = 4 * res_val + 24;
    let mut out = vec![];
    descend(&hz, p, &BigUint::zero(), 0, target, cap, &mut out)?;
    out.sort();
    Ok(out)
}

fn descend(
    h: &[BigInt],
    p: u64,
    center: &BigUint,
    level: u32,
    target: u32,
    cap: u32,
    out: &mut Vec<BigUint>,
) -> Result<()> {
    if level > cap {
        return Err(Error::precision(format!(
            "root isolation exceeded the certified recursion depth {}",
            cap
        )));
    }
    let hp = derivative_bigint(h);
    let pt = BigUint::from(p).pow(target);
    for a in 0..p {
        let ha = eval_bigint_poly(h, &BigInt::from(a));
        if nu_p(&ha, p) == ExtendedNat::Finite(0) {
            continue;
        }
        let da = eval_bigint_poly(&hp, &BigInt::from(a));
        if nu_p(&da, p) == ExtendedNat::Finite(0) {
            let digits = target.saturating_sub(level).max(1);
            let y = hensel_lift(h, p, a, digits);
            let root = (center + BigUint::from(p).pow(level.min(target)) * y) % &pt;
            out.push(root);
        } else {
            let g = blow_up(h, p, a);
            let sub_center = center + BigUint::from(p).pow(level.min(target)) * BigUint::from(a);
            descend(&g, p, &(sub_center % &pt), level + 1, target, cap, out)?;
        }
    }
    Ok(())
}

/// Canonical residue of a rational with p-unit denominator, mod p^k.
pub(crate) fn rational_residue(q: &BigRational, p: u64, k: u32) -> BigUint {
    let pm = BigUint::from(p).pow(k);
    let den = q.denom().mod_floor(&BigInt::from(pm.clone()));
    let inv = mod_inverse(&den.to_biguint().expect("canonical"), &pm)
        .expect("denominator must be a p-unit");
    let num = q.numer().mod_floor(&BigInt::from(pm.clone()));
    (num.to_biguint().expect("canonical") * inv) % pm
}

/// Valuation and delta unit digits of a nonzero rational.
pub(crate) fn rational_val_and_digits(q: &BigRational, p: u64, delta: u32) -> (i64, BigUint) {
    let vn = nu_p(q.numer(), p).finite().expect("nonzero") as i64;
    let vd = nu_p(q.denom(), p).finite().expect("nonzero") as i64;
    let val = vn - vd;
    let unit = q / BigRational::new(BigInt::from(p), BigInt::one()).pow(val as i32);
    (val, rational_residue(&unit, p, delta))
}

/// Cofactor value g(theta) = f^(m)(theta) / m! for an approximate root.
fn cofactor_at(f: &RationalPoly, theta: &PAdicApprox, m: u32, prec: u32) -> PAdicApprox {
    let mut q = f.clone();
    for _ in 0..m {
        q = q.derivative();
    }
    let mut mfact = BigRational::one();
    for i in 1..=m {
        mfact *= BigRational::from_integer(BigInt::from(i));
    }
    q.scale(&(BigRational::one() / mfact))
        .eval_padic(theta, prec)
}

/// All Z_p roots of f with multiplicities, rationality tags, and cofactor
/// data: nu_p(g(theta)) and the first delta digits of its unit part. Root
/// approximations carry n digits; cofactor data is recomputed at doubled
/// precision and must agree, otherwise n is reported as too small.
pub fn padic_roots(f: &RationalPoly, p: u64, n: u32, delta: u32) -> Result<Vec<RootDatum>> {
    assert!(
        n >= 1 && delta >= 1,
        "precision parameters must be positive"
    );
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{} is not prime", p)));
    }
    if f.is_zero() {
        return Err(Error::domain(
            "root search on the zero polynomial".to_string(),
        ));
    }
    let work = 2 * n.max(delta);
    let rationals = rational_roots(f)?;
    let mut out: Vec<RootDatum> = vec![];
    for (factor, mult) in f.square_free_decomposition() {
        let mut h = factor.clone();
        let mut rational_here: Vec<BigRational> = vec![];
        for (theta, _) in &rationals {
            if nu_p(theta.denom(), p) != ExtendedNat::Finite(0) {
                continue;
            }
            if factor.eval(theta).is_zero() {
                rational_here.push(theta.clone());
                let linear = RationalPoly::new(vec![-theta.clone(), BigRational::one()]);
                h = h.div_exact(&linear);
            }
        }
        for theta in rational_here {
            // Exact cofactor: deflate f by (x - theta)^m and evaluate.
            let linear = RationalPoly::new(vec![-theta.clone(), BigRational::one()]);
            let mut g = f.clone();
            for _ in 0..mult {
                g = g.div_exact(&linear);
            }
            let gval = g.eval(&theta);
            assert!(
                !gval.is_zero(),
                "cofactor of an exactly-deflated root is nonzero"
            );
            let (cofactor_val, cofactor_digits) = rational_val_and_digits(&gval, p, delta);
            let residue = rational_residue(&theta, p, n);
            out.push(RootDatum {
                p,
                approx: PAdicApprox::from_residue(p, &residue, n),
                multiplicity: mult,
                rational: Some(theta),
                cofactor_val,
                cofactor_digits,
            });
        }
        for residue in squarefree_zp_roots(&h, p, work)? {
            let theta_fine = PAdicApprox::from_residue(p, &residue, work);
            let theta_coarse =
                PAdicApprox::from_residue(p, &(&residue % BigUint::from(p).pow(n)), n);
            let fine = cofactor_at(f, &theta_fine, mult, work + 8);
            let coarse = cofactor_at(f, &theta_coarse, mult, work + 8);
            let stable = match (coarse.valuation(), fine.valuation()) {
                (Some(a), Some(b)) => {
                    a == b
                        && coarse.rel_precision().map_or(false, |r| r >= delta)
                        && coarse.shift_val(-a).to_residue(delta).ok()
                            == fine.shift_val(-b).to_residue(delta).ok()
                }
                _ => false,
            };
            if !stable {
                return Err(Error::precision(format!(
                    "cofactor data for the root near {} is not stable at {} digits; increase the precision",
                    theta_coarse, n
                )));
            }
            let val = fine.valuation().expect("stable cofactor");
            out.push(RootDatum {
                p,
                approx: theta_coarse,
                multiplicity: mult,
                rational: None,
                cofactor_val: val,
                cofactor_digits: fine.shift_val(-val).to_residue(delta)?,
            });
        }
    }
    let mut keyed: Vec<(BigUint, RootDatum)> = out
        .into_iter()
        .map(|d| {
            (
                d.approx
                    .to_residue(n)
                    .expect("approximation carries n digits"),
                d,
            )
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, d)| d).collect())
}

/// Retries a precision-limited computation with growing working precision.
pub(crate) fn with_escalation<T>(mut attempt: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut last = None;
    for n in [32u32, 64, 128, 256] {
        match attempt(n) {
            Err(Error::Precision(msg)) => last = Some(Error::Precision(msg)),
            other => return other,
        }
    }
    Err(last.expect("escalation only ends on a precision error"))
}

/// The roots whose factors keep ell_{p^l, d} from being automatic-constant
/// on their residue classes: theta is kept iff l does not divide m, or the
/// Carmichael exponent lambda(p^{ld - (nu_p(g(theta)) mod l)}) does not
/// divide m.
pub fn r_prime_set(f: &RationalPoly, p: u64, l: u32, d: u32) -> Result<Vec<RootDatum>> {
    assert!(l >= 1 && d >= 1, "l and d must be positive");
    let roots = with_escalation(|n| padic_roots(f, p, n, 1))?;
    Ok(roots
        .into_iter()
        .filter(|r| root_retained(r, l, d))
        .collect())
}

/// The filter behind r_prime_set, usable on an already computed root list.
pub(crate) fn root_retained(r: &RootDatum, l: u32, d: u32) -> bool {
    let m = r.multiplicity as u64;
    if m % l as u64 != 0 {
        return true;
    }
    let t = l * d - r.cofactor_val.rem_euclid(l as i64) as u32;
    !carmichael_divides(r.p, t, m)
}

/// A shift exponent T such that distinct roots of f occupy distinct residues
/// mod p^T and, on each root's class, nu_p(g(x)) and the delta unit digits
/// of g(x) are constant (certified by the coefficient content of f). Returns
/// the per-residue root assignment.
pub fn separating_shift(
    f: &RationalPoly,
    p: u64,
    delta: u32,
) -> Result<(u32, Vec<SeparatedResidue>)> {
    assert!(delta >= 1, "delta must be positive");
    let gamma = f.content_valuation(p);
    let roots = with_escalation(|n| padic_roots(f, p, n, delta))?;
    if roots.is_empty() {
        return Ok((
            0,
            vec![SeparatedResidue {
                residue: BigUint::zero(),
                root: None,
            }],
        ));
    }
    // Digit constancy: need T + gamma >= nu(g(theta)) + delta on each class.
    let mut t = roots
        .iter()
        .map(|r| (r.cofactor_val + delta as i64 - gamma).max(0))
        .max()
        .expect("nonempty");
    // Separation: T exceeds every pairwise agreement depth.
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let diff = roots[i].approx.sub(&roots[j].approx);
            let sep = diff.valuation().ok_or_else(|| {
                Error::precision(
                    "root approximations do not separate at the working precision".to_string(),
                )
            })?;
            t = t.max(sep + 1);
        }
    }
    let t = t as u32;
    let table = BigUint::from(p).pow(t);
    if table > BigUint::from(1u32 << 22) {
        return Err(Error::domain(format!(
            "separating shift needs {}^{} residue classes, beyond the supported table size",
            p, t
        )));
    }
    // Root approximations must be known mod p^T.
    let enough = roots
        .iter()
        .all(|r| r.approx.abs_precision().map_or(false, |a| a >= t as i64));
    let roots = if enough {
        roots
    } else {
        padic_roots(f, p, t + 8, delta)?
    };
    let size = table.to_usize().expect("bounded above");
    let mut report: Vec<SeparatedResidue> = (0..size)
        .map(|a| SeparatedResidue {
            residue: BigUint::from(a),
            root: None,
        })
        .collect();
    for r in roots {
        let a = (r.approx.to_residue(t).expect("enough digits"))
            .to_usize()
            .expect("bounded");
        assert!(
            report[a].root.is_none(),
            "separating shift left two roots in one class"
        );
        report[a].root = Some(r);
    }
    Ok((t, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn square_roots_of_minus_one_mod_five() {
        let f = RationalPoly::from_ints(&[1, 0, 1]);
        let roots = padic_roots(&f, 5, 10, 2).unwrap();
        assert_eq!(roots.len(), 2);
        let mut mod25: Vec<u32> = roots
            .iter()
            .map(|r| (r.approx.to_residue(2).unwrap()).to_u32().unwrap())
            .collect();
        mod25.sort();
        assert_eq!(mod25, vec![7, 18], "the square roots of -1 mod 25");
        for r in &roots {
            assert_eq!(r.multiplicity, 1);
            assert!(r.rational.is_none());
            let fx = f.eval_padic(&r.approx, 16);
            assert!(
                fx.min_valuation().unwrap_or(i64::MAX) >= 10,
                "f(theta) = O(5^10)"
            );
        }
    }

    #[test]
    fn no_roots_when_minus_one_is_not_a_square() {
        let f = RationalPoly::from_ints(&[1, 0, 1]);
        assert!(padic_roots(&f, 2, 10, 1).unwrap().is_empty());
        assert!(padic_roots(&f, 3, 10, 1).unwrap().is_empty());
        assert!(padic_roots(&f, 7, 10, 1).unwrap().is_empty());
    }

    #[test]
    fn quadruple_roots_with_unit_content() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        let roots = padic_roots(&f, 5, 12, 2).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(r.multiplicity, 4);
            assert_eq!(
                r.cofactor_val, 1,
                "g(theta) = 5*(2 theta)^4 has valuation 1"
            );
            assert!(r.rational.is_none());
        }
    }

    #[test]
    fn rational_roots_are_tagged_exactly() {
        let f = RationalPoly::from_ints(&[0, 1, 1]);
        let roots = padic_roots(&f, 2, 8, 1).unwrap();
        assert_eq!(roots.len(), 2);
        let zero = roots
            .iter()
            .find(|r| r.rational == Some(rat(0, 1)))
            .unwrap();
        let minus = roots
            .iter()
            .find(|r| r.rational == Some(rat(-1, 1)))
            .unwrap();
        assert_eq!(zero.multiplicity, 1);
        assert_eq!(minus.multiplicity, 1);
        assert_eq!(
            minus.approx.to_residue(8).unwrap(),
            BigUint::from(255u32),
            "-1 mod 2^8"
        );
        assert_eq!(zero.cofactor_val, 0, "g_0(0) = 1");
        assert_eq!(
            minus.cofactor_val, 0,
            "the cofactor at -1 is the unit x evaluated there"
        );

        let f = RationalPoly::from_ints(&[1, -4, 4]);
        let roots = padic_roots(&f, 3, 8, 2).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].rational, Some(rat(1, 2)));
        assert_eq!(roots[0].multiplicity, 2);
        assert_eq!(roots[0].cofactor_val, 0, "g = 4");
        assert_eq!(
            roots[0].cofactor_digits,
            BigUint::from(4u32),
            "ell_{{3,2}}(4) = 4"
        );
        assert!(
            padic_roots(&f, 2, 8, 1).unwrap().is_empty(),
            "1/2 is not a 2-adic integer"
        );
    }

    #[test]
    fn shared_residue_resolved_by_blow_up() {
        // Both square roots of 17 are 2-adic units congruent mod 2, so the
        // search must rescale before Newton iteration applies.
        let f = RationalPoly::from_ints(&[-17, 0, 1]);
        let roots = padic_roots(&f, 2, 12, 2).unwrap();
        assert_eq!(roots.len(), 2);
        let mut res: Vec<u32> = roots
            .iter()
            .map(|r| r.approx.to_residue(5).unwrap().to_u32().unwrap())
            .collect();
        res.sort();
        assert_eq!(res, vec![9, 23], "sqrt(17) = 9 mod 32 up to sign");
        for r in &roots {
            assert!(r.rational.is_none(), "17 is not a square in Q");
            let fx = f.eval_padic(&r.approx, 18);
            assert!(fx.min_valuation().unwrap_or(i64::MAX) >= 12);
        }
    }

    #[test]
    fn integer_square_roots_deflate_without_recursion() {
        let f = RationalPoly::from_ints(&[-1, 0, 1]);
        let roots = padic_roots(&f, 2, 8, 1).unwrap();
        assert_eq!(roots.len(), 2);
        let mut res: Vec<u32> = roots
            .iter()
            .map(|r| r.approx.to_residue(3).unwrap().to_u32().unwrap())
            .collect();
        res.sort();
        assert_eq!(res, vec![1, 7], "1 and -1 mod 8");
        assert!(roots.iter().all(|r| r.rational.is_some()));
    }

    #[test]
    fn deep_collision_separated() {
        let shallow = RationalPoly::from_ints(&[-1, 1]);
        let deep = RationalPoly::from_ints(&[-(1 + 81), 1]);
        let other = RationalPoly::from_ints(&[1, 1]);
        let f = shallow.mul(&deep).mul(&other);
        let roots = padic_roots(&f, 3, 10, 1).unwrap();
        assert_eq!(roots.len(), 3);
        let mut vals: Vec<u64> = roots
            .iter()
            .map(|r| r.approx.to_residue(10).unwrap().to_u64().unwrap())
            .collect();
        vals.sort();
        let p10 = 3u64.pow(10);
        let mut want = vec![1, 82, p10 - 1];
        want.sort();
        assert_eq!(vals, want);
        for r in &roots {
            assert!(r.rational.is_some(), "all three roots are integers");
        }
    }

    #[test]
    fn deep_irrational_collision_separated() {
        // sqrt(17) and sqrt(1041) agree to nine binary digits; the search
        // must descend that far before the four roots split apart.
        let f = RationalPoly::from_ints(&[-17, 0, 1]).mul(&RationalPoly::from_ints(&[-1041, 0, 1]));
        let roots = padic_roots(&f, 2, 14, 1).unwrap();
        assert_eq!(roots.len(), 4);
        let p14 = BigUint::from(2u32).pow(14);
        let mut seen = std::collections::BTreeSet::new();
        let mut squares = vec![];
        for r in &roots {
            let res = r.approx.to_residue(14).unwrap();
            assert!(seen.insert(res.clone()), "residues are pairwise distinct");
            squares.push(((&res * &res) % &p14).to_u64().unwrap());
        }
        squares.sort();
        assert_eq!(squares, vec![17, 17, 1041, 1041], "two roots per radicand");
    }

    #[test]
    fn multiplicities_sum_within_degree() {
        let polys = [
            RationalPoly::from_ints(&[0, 1, 1]).mul(&RationalPoly::from_ints(&[1, 0, 1])),
            RationalPoly::from_ints(&[2, 3, 0, 0, 1]),
            RationalPoly::from_ints(&[-1, 1])
                .pow(3)
                .mul(&RationalPoly::from_ints(&[1, 1, 1])),
        ];
        for f in &polys {
            for p in [2u64, 3, 5] {
                let total: u32 = padic_roots(f, p, 8, 1)
                    .unwrap()
                    .iter()
                    .map(|r| r.multiplicity)
                    .sum();
                assert!(
                    total as usize <= f.degree(),
                    "multiplicity total {} within degree {}",
                    total,
                    f.degree()
                );
            }
        }
    }

    #[test]
    fn deflation_reconstructs_f() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        let p = 5u64;
        let n = 14u32;
        for r in padic_roots(&f, p, n, 1).unwrap() {
            // Divide f by (x - theta)^m with p-adic synthetic division.
            let mut coeffs: Vec<PAdicApprox> = f
                .coeffs()
                .iter()
                .map(|c| PAdicApprox::from_rational(c, p, n + 6))
                .collect();
            for _ in 0..r.multiplicity {
                let mut next: Vec<PAdicApprox> = Vec::with_capacity(coeffs.len() - 1);
                let mut carry = PAdicApprox::exact_zero(p);
                for c in coeffs.iter().rev() {
                    carry = carry.mul(&r.approx).add(c);
                    next.push(carry.clone());
                }
                next.pop();
                next.reverse();
                coeffs = next;
            }
            // Check f(x) = (x - theta)^m g(x) at sample integers.
            for x in 0..20i64 {
                let xv = PAdicApprox::from_int(x, p, n + 6);
                let mut g = PAdicApprox::exact_zero(p);
                for c in coeffs.iter().rev() {
                    g = g.mul(&xv).add(c);
                }
                let lin = xv.sub(&r.approx).int_pow(r.multiplicity as u64);
                let lhs = lin.mul(&g);
                let rhs = f.eval_padic(&xv, n + 6);
                let check = lhs.sub(&rhs);
                assert!(
                    check.min_valuation().unwrap_or(i64::MAX) >= 8,
                    "reconstruction agrees mod 5^8 at x = {}",
                    x
                );
            }
        }
    }

    #[test]
    fn precision_doubling_is_stable() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        let lo = padic_roots(&f, 5, 8, 2).unwrap();
        let hi = padic_roots(&f, 5, 16, 2).unwrap();
        assert_eq!(lo.len(), hi.len());
        for (a, b) in lo.iter().zip(hi.iter()) {
            assert_eq!(
                a.approx.to_residue(8).unwrap(),
                b.approx.to_residue(8).unwrap()
            );
            assert_eq!(a.multiplicity, b.multiplicity);
            assert_eq!(a.rational, b.rational);
            assert_eq!(a.cofactor_val, b.cofactor_val);
            assert_eq!(a.cofactor_digits, b.cofactor_digits);
        }
    }

    #[test]
    fn r_prime_fixture_grid() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        for l in 1..=4u32 {
            for d in 1..=3u32 {
                let kept = r_prime_set(&f, 5, l, d).unwrap().len();
                let expect_empty = (l, d) == (1, 1) || (l, d) == (2, 1);
                assert_eq!(
                    kept == 0,
                    expect_empty,
                    "emptiness of the filtered root set at l={} d={}",
                    l,
                    d
                );
            }
        }
    }

    #[test]
    fn identity_map_passes_filter_nowhere() {
        let f = RationalPoly::from_ints(&[0, 1]);
        assert!(
            r_prime_set(&f, 2, 1, 1).unwrap().is_empty(),
            "the last nonzero bit of n is constantly 1"
        );
    }

    #[test]
    fn monotone_in_d() {
        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        for d in 2..=6u32 {
            assert_eq!(
                r_prime_set(&f, 5, 1, d).unwrap().len(),
                2,
                "both roots survive for every d >= 2"
            );
        }
    }

    #[test]
    fn separating_shift_examples() {
        let f = RationalPoly::from_ints(&[0, 1, 1]);
        let (t, report) = separating_shift(&f, 2, 1).unwrap();
        assert_eq!(t, 1);
        assert_eq!(report.len(), 2);
        assert_eq!(
            report[0].root.as_ref().unwrap().rational,
            Some(rat(0, 1)),
            "class 0 holds the root 0"
        );
        assert_eq!(
            report[1].root.as_ref().unwrap().rational,
            Some(rat(-1, 1)),
            "class 1 holds the root -1"
        );

        let none = RationalPoly::from_ints(&[1, 0, 1]);
        let (t, report) = separating_shift(&none, 2, 1).unwrap();
        assert_eq!(t, 0);
        assert_eq!(report.len(), 1);
        assert!(report[0].root.is_none());

        let f = RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1));
        let (t, report) = separating_shift(&f, 5, 1).unwrap();
        assert_eq!(t, 1);
        let occupied: Vec<usize> = report
            .iter()
            .enumerate()
            .filter(|(_, r)| r.root.is_some())
            .map(|(i, _)| i)
            .collect();
        assert_eq!(occupied, vec![2, 3], "roots sit at 2 and 3 mod 5");
    }

    #[test]
    fn cofactor_constant_on_separated_classes() {
        // On each occupied class, f(x) = (x - theta)^m g(x) with the
        // valuation and leading digits of g(x) frozen to the reported data.
        let cases = [
            (RationalPoly::from_ints(&[0, 1, 1]), 2u64, 2u32),
            (
                RationalPoly::from_ints(&[1, 0, 1]).pow(4).scale(&rat(5, 1)),
                5,
                1,
            ),
            (RationalPoly::from_ints(&[-17, 0, 1]), 2, 2),
            (
                RationalPoly::from_ints(&[-1, 0, 1]).mul(&RationalPoly::from_ints(&[-3, 1])),
                2,
                2,
            ),
        ];
        for (f, p, delta) in cases {
            let (t, report) = separating_shift(&f, p, delta).unwrap();
            let pt = BigInt::from(p).pow(t);
            let prec = 48u32;
            for entry in &report {
                let Some(root) = &entry.root else { continue };
                let base = BigInt::from(entry.residue.clone());
                for k in 0..20 {
                    let x = &base + &pt * BigInt::from(k);
                    let xv = PAdicApprox::from_bigint(&x, p, prec);
                    let diff = xv.sub(&root.approx);
                    if diff.valuation().is_none() {
                        continue;
                    }
                    let g = f
                        .eval_padic(&xv, prec)
                        .div(&diff.int_pow(root.multiplicity as u64))
                        .unwrap();
                    let v = g.valuation().unwrap();
                    assert_eq!(v, root.cofactor_val, "valuation constant on the class");
                    assert_eq!(
                        g.shift_val(-v).to_residue(delta).unwrap(),
                        root.cofactor_digits,
                        "digits constant on the class"
                    );
                }
            }
        }
    }

    #[test]
    fn composite_modulus_rejected() {
        let f = RationalPoly::from_ints(&[1, 0, 1]);
        assert!(padic_roots(&f, 6, 8, 1).is_err());
    }
}
