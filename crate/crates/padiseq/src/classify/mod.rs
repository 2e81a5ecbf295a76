//! Decides the regularity or automaticity class of the sequences
//! nu_b(f(n)), L_b(f(n)), and ell_{b,d}(f(n)) attached to a tuple of
//! rational polynomials f = (f_1, ..., f_s), one polynomial per prime
//! factor of the base b.

mod period;

use crate::arith::FactoredBase;
use crate::error::{Error, Result};
use crate::roots::{
    padic_roots, rational_roots, root_retained, with_escalation, RationalPoly, RootDatum,
};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Witness exponents above this bound are rejected rather than materialized.
const MAX_WITNESS_EXPONENT: u64 = 1 << 20;

/// A tuple of polynomials, one per prime factor of b, inducing the sequences
/// nu_b(f(n)), L_b(f(n)), and ell_{b,d}(f(n)). Zero polynomials are allowed;
/// the corresponding components are constantly zero.
#[derive(Clone, Debug)]
pub struct FunctionTuple {
    base: FactoredBase,
    polys: Vec<RationalPoly>,
}

impl FunctionTuple {
    pub fn new(base: FactoredBase, polys: Vec<RationalPoly>) -> Result<FunctionTuple> {
        if polys.len() != base.num_primes() {
            return Err(Error::domain(format!(
                "base {} has {} prime factors but {} polynomials were given",
                base.b(),
                base.num_primes(),
                polys.len()
            )));
        }
        Ok(FunctionTuple { base, polys })
    }

    /// The same polynomial in every component.
    pub fn diagonal(base: FactoredBase, f: RationalPoly) -> FunctionTuple {
        let s = base.num_primes();
        FunctionTuple {
            base,
            polys: vec![f; s],
        }
    }

    pub fn base(&self) -> &FactoredBase {
        &self.base
    }

    pub fn polys(&self) -> &[RationalPoly] {
        &self.polys
    }

    fn values_at(&self, n: &BigInt) -> Vec<BigRational> {
        self.polys.iter().map(|f| f.eval_int(n)).collect()
    }

    /// nu_b(f(n)); None encodes +infinity (the whole tuple vanishes).
    pub fn valuation_at(&self, n: &BigInt) -> Option<i64> {
        period::nu_tuple(&self.base, &self.values_at(n))
    }

    /// L_b(f(n)) componentwise; None encodes the zero tuple.
    pub fn last_nonzero_at(&self, n: &BigInt) -> Option<Vec<BigRational>> {
        let values = self.values_at(n);
        let nu = period::nu_tuple(&self.base, &values)?;
        let scale = pow_rational(self.base.b(), -nu);
        Some(values.into_iter().map(|v| v * &scale).collect())
    }

    /// ell_{b,d}(f(n)); None encodes the zero tuple.
    pub fn digits_at(&self, n: &BigInt, d: u32) -> Result<Option<BigUint>> {
        let values = self.values_at(n);
        if values.iter().all(|v| v.is_zero()) {
            return Ok(None);
        }
        period::ell_tuple(&self.base, &values, d).map(Some)
    }
}

fn pow_rational(b: u64, e: i64) -> BigRational {
    let exp = u32::try_from(e.unsigned_abs()).expect("valuation magnitude fits u32");
    let mag = BigInt::from(b).pow(exp);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// The class a sequence falls into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Every component is the zero polynomial; the value is infinite or zero
    /// at every n.
    AllInfinite,
    /// Eventually periodic with the given certified period (exact once n
    /// passes the largest natural zero).
    Periodic { period: BigUint },
    /// k-regular for every k >= 2.
    RegularAllK,
    /// k'-regular exactly for the k' multiplicatively dependent with k.
    StrictlyRegular { k: BigUint },
    /// k'-automatic exactly for the k' multiplicatively dependent with k.
    StrictlyAutomatic { k: BigUint },
    /// Not k-regular for any k >= 2.
    NotRegular,
    /// Not k-automatic for any k >= 2.
    NotAutomatic,
}

/// The shared-root data behind a strict classification.
#[derive(Clone, Debug)]
pub struct Witness {
    pub theta: BigRational,
    /// Multiplicity of theta in each nonzero component.
    pub multiplicities: Vec<u32>,
    /// The canonical exponents w_i = lcm(m) / m_i, so that k = prod b_i^{w_i}.
    pub exponents: Vec<u64>,
}

/// One analyzed root of one component.
#[derive(Clone, Debug)]
pub struct RootSketch {
    /// The root reduced mod p^digits.
    pub residue: BigUint,
    pub digits: u32,
    pub multiplicity: u32,
    pub rational: Option<BigRational>,
    /// Whether the root obstructs periodicity for the query that produced
    /// this classification (always true for valuation and last-nonzero
    /// queries, where no root is ever filtered out).
    pub obstructs: bool,
}

/// Root analysis of one nonzero component.
#[derive(Clone, Debug)]
pub struct ComponentRoots {
    pub component: usize,
    pub prime: u64,
    pub exponent: u32,
    pub roots: Vec<RootSketch>,
}

/// A classification decision together with the data used to reach it.
#[derive(Clone, Debug)]
pub struct Classification {
    pub kind: Kind,
    pub witness: Option<Witness>,
    /// Arguments where the whole tuple vanishes; sequence values are infinite
    /// or undefined there and periodicity claims hold past the largest one.
    pub natural_zeros: Vec<BigUint>,
    pub evidence: Vec<ComponentRoots>,
}

struct Analysis {
    /// Indices of the nonzero components.
    live: Vec<usize>,
    /// p-adic roots of each nonzero component, aligned with `live`.
    roots: Vec<Vec<RootDatum>>,
    natural_zeros: Vec<BigUint>,
}

fn analyze(ft: &FunctionTuple) -> Result<Analysis> {
    let live: Vec<usize> = ft
        .polys
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.is_zero())
        .map(|(i, _)| i)
        .collect();
    let mut roots = Vec::with_capacity(live.len());
    for &i in &live {
        let p = ft.base.factors()[i].p;
        roots.push(with_escalation(|n| padic_roots(&ft.polys[i], p, n, 1))?);
    }
    let natural_zeros = common_natural_zeros(ft, &live)?;
    Ok(Analysis {
        live,
        roots,
        natural_zeros,
    })
}

/// Nonnegative integers at which every nonzero component vanishes.
fn common_natural_zeros(ft: &FunctionTuple, live: &[usize]) -> Result<Vec<BigUint>> {
    let Some(&first) = live.first() else {
        return Ok(vec![]);
    };
    let mut out = vec![];
    for (theta, _) in rational_roots(&ft.polys[first])? {
        if !theta.is_integer() || theta.numer().is_negative() {
            continue;
        }
        let n = theta.numer().clone();
        if live
            .iter()
            .skip(1)
            .all(|&i| ft.polys[i].eval_int(&n).is_zero())
        {
            out.push(n.to_biguint().expect("nonnegative"));
        }
    }
    out.sort();
    Ok(out)
}

fn display_digits(r: &RootDatum) -> u32 {
    r.approx.abs_precision().map_or(1, |a| a.clamp(1, 8)) as u32
}

fn sketch_roots(
    ft: &FunctionTuple,
    analysis: &Analysis,
    flags: Option<&[Vec<bool>]>,
) -> Vec<ComponentRoots> {
    analysis
        .live
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let pp = ft.base.factors()[i];
            ComponentRoots {
                component: i,
                prime: pp.p,
                exponent: pp.l,
                roots: analysis.roots[pos]
                    .iter()
                    .enumerate()
                    .map(|(j, r)| RootSketch {
                        residue: r.approx.to_residue(display_digits(r)).unwrap_or_default(),
                        digits: display_digits(r),
                        multiplicity: r.multiplicity,
                        rational: r.rational.clone(),
                        obstructs: flags.map_or(true, |f| f[pos][j]),
                    })
                    .collect(),
            }
        })
        .collect()
}

/// When every nonzero component has exactly one root, all rational and equal,
/// returns that root with the per-component multiplicities.
fn common_simple_root(analysis: &Analysis) -> Option<(BigRational, Vec<u32>)> {
    let mut theta: Option<BigRational> = None;
    let mut mults = vec![];
    for roots in &analysis.roots {
        if roots.len() != 1 {
            return None;
        }
        let q = roots[0].rational.clone()?;
        match &theta {
            None => theta = Some(q),
            Some(t) if *t == q => {}
            _ => return None,
        }
        mults.push(roots[0].multiplicity);
    }
    theta.map(|t| (t, mults))
}

fn singleton_witness(analysis: &Analysis) -> Option<Witness> {
    common_simple_root(analysis).map(|(theta, mults)| Witness {
        theta,
        exponents: vec![1; mults.len()],
        multiplicities: mults,
    })
}

/// k = prod b_i^{w_i} with w_i = lcm(m) / m_i over the nonzero components.
fn strict_k(base: &FactoredBase, live: &[usize], mults: &[u32]) -> Result<(BigUint, Vec<u64>)> {
    let mut lcm = 1u64;
    for &m in mults {
        let m = m as u64;
        lcm = (lcm / lcm.gcd(&m))
            .checked_mul(m)
            .ok_or_else(|| Error::domain("the multiplicity lcm overflows".to_string()))?;
    }
    let mut k = BigUint::one();
    let mut exponents = Vec::with_capacity(mults.len());
    for (&i, &m) in live.iter().zip(mults) {
        let w = lcm / m as u64;
        if w > MAX_WITNESS_EXPONENT {
            return Err(Error::domain(format!(
                "the witness exponent {} exceeds the supported bound",
                w
            )));
        }
        k *= BigUint::from(base.factors()[i].pp).pow(w as u32);
        exponents.push(w);
    }
    Ok((k, exponents))
}

fn rootless_flags(ft: &FunctionTuple, analysis: &Analysis) -> Vec<bool> {
    let mut flags = vec![false; ft.polys.len()];
    for (&i, roots) in analysis.live.iter().zip(&analysis.roots) {
        flags[i] = roots.is_empty();
    }
    flags
}

/// The case of the classification theorems, before any period is computed.
enum Outcome {
    /// Case (a): no obstructing root; the sequence is (eventually) periodic,
    /// or regular for every k in the last-nonzero setting.
    Tame,
    /// Case (b): obstruction wholly described by rational roots.
    Strict {
        k: BigUint,
        witness: Option<Witness>,
    },
    /// Case (c): an irrational root obstructs.
    Wild,
}

fn valuation_outcome(ft: &FunctionTuple, analysis: &Analysis) -> Result<Outcome> {
    if analysis.roots.iter().any(Vec::is_empty) {
        return Ok(Outcome::Tame);
    }
    if analysis.live.len() == 1 {
        if analysis.roots[0].iter().all(|r| r.rational.is_some()) {
            let p = ft.base.factors()[analysis.live[0]].p;
            return Ok(Outcome::Strict {
                k: BigUint::from(p),
                witness: singleton_witness(analysis),
            });
        }
        return Ok(Outcome::Wild);
    }
    if let Some((theta, mults)) = common_simple_root(analysis) {
        let (k, exponents) = strict_k(&ft.base, &analysis.live, &mults)?;
        let witness = Witness {
            theta,
            multiplicities: mults,
            exponents,
        };
        return Ok(Outcome::Strict {
            k,
            witness: Some(witness),
        });
    }
    Ok(Outcome::Wild)
}

fn last_nonzero_outcome(ft: &FunctionTuple, analysis: &Analysis) -> Result<Outcome> {
    if analysis.roots.iter().any(Vec::is_empty) {
        return Ok(Outcome::Tame);
    }
    if analysis.live.len() == 1 {
        if analysis.roots[0].iter().all(|r| r.rational.is_some()) {
            let p = ft.base.factors()[analysis.live[0]].p;
            return Ok(Outcome::Strict {
                k: BigUint::from(p),
                witness: singleton_witness(analysis),
            });
        }
        return Ok(Outcome::Wild);
    }
    if let Some((theta, mults)) = common_simple_root(analysis) {
        if mults.windows(2).all(|w| w[0] == w[1]) {
            let k = analysis
                .live
                .iter()
                .fold(BigUint::one(), |acc, &i| acc * ft.base.factors()[i].pp);
            let witness = Witness {
                theta,
                exponents: vec![1; mults.len()],
                multiplicities: mults,
            };
            return Ok(Outcome::Strict {
                k,
                witness: Some(witness),
            });
        }
    }
    Ok(Outcome::Wild)
}

/// Whether a root blocks eventual periodicity of the width-d digit sequence
/// for a lone nonzero component sitting at p^l inside the full base. Beyond
/// the Carmichael condition on the unit part, the cofactor q = b / p^l
/// contributes q^{-nu} to every residue, so the valuation staircase on the
/// root's classes must fix q^{-nu} mod p^{ld} as well.
fn digit_obstruction(r: &RootDatum, p: u64, l: u32, d: u32, q_cofactor: u64) -> bool {
    if root_retained(r, l, d) {
        return true;
    }
    if q_cofactor == 1 {
        return false;
    }
    let modulus = BigUint::from(p).pow(l * d);
    let step = BigUint::from(r.multiplicity / l);
    !BigUint::from(q_cofactor).modpow(&step, &modulus).is_one()
}

fn digits_outcome(
    ft: &FunctionTuple,
    analysis: &Analysis,
    d: u32,
) -> Result<(Outcome, Option<Vec<Vec<bool>>>)> {
    if analysis.live.len() == 1 {
        let i = analysis.live[0];
        let pp = ft.base.factors()[i];
        let q_cofactor = ft.base.q(i);
        let flags: Vec<bool> = analysis.roots[0]
            .iter()
            .map(|r| digit_obstruction(r, pp.p, pp.l, d, q_cofactor))
            .collect();
        let obstructing: Vec<&RootDatum> = analysis.roots[0]
            .iter()
            .zip(&flags)
            .filter(|(_, &f)| f)
            .map(|(r, _)| r)
            .collect();
        let outcome = if obstructing.is_empty() {
            Outcome::Tame
        } else if obstructing.iter().all(|r| r.rational.is_some()) {
            Outcome::Strict {
                k: BigUint::from(pp.p),
                witness: singleton_witness(analysis),
            }
        } else {
            Outcome::Wild
        };
        return Ok((outcome, Some(vec![flags])));
    }
    if analysis.roots.iter().any(Vec::is_empty) {
        return Ok((Outcome::Tame, None));
    }
    if let Some((theta, mults)) = common_simple_root(analysis) {
        let (k, exponents) = strict_k(&ft.base, &analysis.live, &mults)?;
        let witness = Witness {
            theta,
            multiplicities: mults,
            exponents,
        };
        return Ok((
            Outcome::Strict {
                k,
                witness: Some(witness),
            },
            None,
        ));
    }
    Ok((Outcome::Wild, None))
}

fn all_infinite() -> Classification {
    Classification {
        kind: Kind::AllInfinite,
        witness: None,
        natural_zeros: vec![],
        evidence: vec![],
    }
}

/// Classifies (nu_b(f(n)))_{n >= 0}: eventually periodic when some nonzero
/// component has no p-adic integer root, strictly k-regular when the roots
/// collapse to a single shared rational point, and not regular otherwise.
pub fn classify_valuation(ft: &FunctionTuple) -> Result<Classification> {
    let analysis = analyze(ft)?;
    if analysis.live.is_empty() {
        return Ok(all_infinite());
    }
    let evidence = sketch_roots(ft, &analysis, None);
    let natural_zeros = analysis.natural_zeros.clone();
    let (kind, witness) = match valuation_outcome(ft, &analysis)? {
        Outcome::Tame => {
            let period = if analysis.live.len() == 1 {
                let i = analysis.live[0];
                let pp = ft.base.factors()[i];
                period::prime_power_valuation_period(&ft.polys[i], pp.p, pp.l)?
            } else {
                let rootless = rootless_flags(ft, &analysis);
                period::joint_valuation_period(&ft.base, &ft.polys, &rootless)?
            };
            (Kind::Periodic { period }, None)
        }
        Outcome::Strict { k, witness } => (Kind::StrictlyRegular { k }, witness),
        Outcome::Wild => (Kind::NotRegular, None),
    };
    Ok(Classification {
        kind,
        witness,
        natural_zeros,
        evidence,
    })
}

/// Classifies (L_b(f(n)))_{n >= 0}: k-regular for every k when some nonzero
/// component is rootless, strictly k-regular on a shared rational root with
/// equal multiplicities, and not regular otherwise.
pub fn classify_last_nonzero(ft: &FunctionTuple) -> Result<Classification> {
    let analysis = analyze(ft)?;
    if analysis.live.is_empty() {
        return Ok(all_infinite());
    }
    let evidence = sketch_roots(ft, &analysis, None);
    let natural_zeros = analysis.natural_zeros.clone();
    let (kind, witness) = match last_nonzero_outcome(ft, &analysis)? {
        Outcome::Tame => (Kind::RegularAllK, None),
        Outcome::Strict { k, witness } => (Kind::StrictlyRegular { k }, witness),
        Outcome::Wild => (Kind::NotRegular, None),
    };
    Ok(Classification {
        kind,
        witness,
        natural_zeros,
        evidence,
    })
}

/// Classifies (ell_{b,d}(f(n)))_{n >= 0}: eventually periodic when every
/// root's contribution freezes on its residue classes, strictly k-automatic
/// when the obstruction is rational, and not automatic otherwise.
pub fn classify_digits(ft: &FunctionTuple, d: u32) -> Result<Classification> {
    if d == 0 {
        return Err(Error::domain(
            "the digit count d must be positive".to_string(),
        ));
    }
    let analysis = analyze(ft)?;
    if analysis.live.is_empty() {
        return Ok(all_infinite());
    }
    let natural_zeros = analysis.natural_zeros.clone();
    let (outcome, flags) = digits_outcome(ft, &analysis, d)?;
    let evidence = sketch_roots(ft, &analysis, flags.as_deref());
    let (kind, witness) = match outcome {
        Outcome::Tame => {
            let period = if analysis.live.len() == 1 {
                let i = analysis.live[0];
                let pp = ft.base.factors()[i];
                let value_of = |y: &BigRational| {
                    let values: Vec<BigRational> = (0..ft.polys.len())
                        .map(|j| {
                            if j == i {
                                y.clone()
                            } else {
                                BigRational::zero()
                            }
                        })
                        .collect();
                    period::ell_tuple(&ft.base, &values, d).expect("nonzero live value")
                };
                period::prime_power_digits_period_with(&ft.polys[i], pp.p, pp.l, d, value_of)?
            } else {
                let rootless = rootless_flags(ft, &analysis);
                period::joint_digits_period(&ft.base, &ft.polys, &rootless, d)?
            };
            (Kind::Periodic { period }, None)
        }
        Outcome::Strict { k, witness } => (Kind::StrictlyAutomatic { k }, witness),
        Outcome::Wild => (Kind::NotAutomatic, None),
    };
    Ok(Classification {
        kind,
        witness,
        natural_zeros,
        evidence,
    })
}

/// The cross-check tying the three classifications together over one base:
/// nu_b is b-regular, iff ell_{b,d} is b-automatic for every d, iff L_b is
/// b-regular.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub valuation_regular: bool,
    /// One flag per checked width d, in increasing order of d.
    pub digits_automatic: Vec<(u32, bool)>,
    pub last_nonzero_regular: bool,
    pub violation: Option<String>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.violation.is_none()
    }
}

/// Whether the classified sequence is b-regular (resp. b-automatic) for the
/// full base b: strict kinds match b exactly when the obstruction spans every
/// prime of b with equal canonical exponents.
fn matches_base(outcome: &Outcome, live: usize, total: usize) -> bool {
    match outcome {
        Outcome::Tame => true,
        Outcome::Strict { witness, .. } => {
            if total == 1 {
                return true;
            }
            live == total
                && witness
                    .as_ref()
                    .map_or(false, |w| w.exponents.windows(2).all(|ab| ab[0] == ab[1]))
        }
        Outcome::Wild => false,
    }
}

/// The width beyond which the set of obstructing roots stops changing, so
/// checking d up to the bound covers every width.
fn digit_stabilization_bound(ft: &FunctionTuple, analysis: &Analysis) -> u32 {
    if analysis.live.len() != 1 {
        return 4;
    }
    let i = analysis.live[0];
    let pp = ft.base.factors()[i];
    let q_cofactor = ft.base.q(i);
    let mut bound = 2u32;
    for r in &analysis.roots[0] {
        let m = r.multiplicity as u64;
        if m % pp.l as u64 != 0 {
            continue;
        }
        let smod = r.cofactor_val.rem_euclid(pp.l as i64) as u32;
        let mut d = 1u32;
        while d < 64 && crate::arith::carmichael(pp.p, pp.l * d - smod) <= BigUint::from(m) {
            d += 1;
        }
        bound = bound.max(d + 1);
        if q_cofactor > 1 {
            let qm = BigInt::from(q_cofactor).pow((m / pp.l as u64) as u32) - BigInt::one();
            if !qm.is_zero() {
                let v = crate::arith::nu_p(&qm, pp.p).finite().unwrap_or(0) as u32;
                bound = bound.max(v / pp.l + 2);
            }
        }
    }
    bound.min(8)
}

pub fn corollary_consistency(ft: &FunctionTuple) -> Result<ConsistencyReport> {
    let analysis = analyze(ft)?;
    if analysis.live.is_empty() {
        return Ok(ConsistencyReport {
            valuation_regular: true,
            digits_automatic: vec![(1, true)],
            last_nonzero_regular: true,
            violation: None,
        });
    }
    let total = ft.polys.len();
    let live = analysis.live.len();
    let valuation_regular = matches_base(&valuation_outcome(ft, &analysis)?, live, total);
    let last_nonzero_regular = matches_base(&last_nonzero_outcome(ft, &analysis)?, live, total);
    let mut digits_automatic = vec![];
    for d in 1..=digit_stabilization_bound(ft, &analysis) {
        let (outcome, _) = digits_outcome(ft, &analysis, d)?;
        digits_automatic.push((d, matches_base(&outcome, live, total)));
    }
    let mut violation = None;
    for (d, flag) in &digits_automatic {
        if *flag != valuation_regular {
            violation = Some(format!(
                "the valuation sequence is {}base-regular but the width-{} digit sequence is {}base-automatic",
                if valuation_regular { "" } else { "not " },
                d,
                if *flag { "" } else { "not " },
            ));
            break;
        }
    }
    if violation.is_none() && last_nonzero_regular != valuation_regular {
        violation = Some(format!(
            "the valuation sequence is {}base-regular but the last-nonzero sequence is {}base-regular",
            if valuation_regular { "" } else { "not " },
            if last_nonzero_regular { "" } else { "not " },
        ));
    }
    Ok(ConsistencyReport {
        valuation_regular,
        digits_automatic,
        last_nonzero_regular,
        violation,
    })
}
