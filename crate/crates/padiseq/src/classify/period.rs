use crate::arith::{mod_inverse, nu_p, FactoredBase};
use crate::error::{Error, Result};
use crate::roots::{rational_val_and_digits, separating_shift, RationalPoly};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Hard ceilings on the certification search. The theorems guarantee a
/// power-of-base period exists but say nothing about its size, so the search
/// gives up with a precision error rather than run away.
const MAX_LEAVES: usize = 1 << 18;
const MAX_DEPTH: u32 = 512;
const MAX_TABLE: u64 = 1 << 22;

/// nu_p of a rational, or None for zero.
pub(crate) fn val_q(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let vn = nu_p(q.numer(), p).finite().expect("nonzero") as i64;
    let vd = nu_p(q.denom(), p).finite().expect("nonzero") as i64;
    Some(vn - vd)
}

/// Smallest valuation among the degree >= 1 coefficients, or None if the
/// polynomial is constant.
fn min_tail_valuation(f: &RationalPoly, p: u64) -> Option<i64> {
    f.coeffs().iter().skip(1).filter_map(|c| val_q(c, p)).min()
}

/// How a residue class gets certified as carrying constant sequence data.
enum Goal {
    /// nu_p(f) is literally constant on the class.
    ExactValuation,
    /// min(nu_p(f), cap) is constant on the class.
    CappedValuation { cap: i64 },
    /// f is frozen mod p^window on the class (valuation may be anything).
    FrozenWindow { window: i64 },
    /// f is frozen to margin digits above its valuation at the center;
    /// classes listed in `constant` are known constant a priori.
    DigitData { margin: i64 },
}

struct ClassNode {
    center: BigUint,
    depth: u32,
}

/// Subdivide Z_p into residue classes on which the goal certifies constancy.
/// `preset` classes (centers mod p^start_depth) are accepted without a check.
/// Returns the maximum depth needed; all of Z_p is covered by certified
/// classes mod p^depth for that depth.
fn certify_classes(
    f: &RationalPoly,
    p: u64,
    goal: &Goal,
    start_depth: u32,
    preset: &[BigUint],
    budget_note: &str,
) -> Result<u32> {
    let preset: std::collections::BTreeSet<&BigUint> = preset.iter().collect();
    let mut queue: Vec<ClassNode> = vec![];
    let start_count = BigUint::from(p).pow(start_depth);
    if start_count > BigUint::from(MAX_LEAVES) {
        return Err(Error::precision(format!(
            "{}: the initial residue split mod {}^{} is beyond the class budget",
            budget_note, p, start_depth
        )));
    }
    let mut a = BigUint::zero();
    while a < start_count {
        if !preset.contains(&a) {
            queue.push(ClassNode {
                center: a.clone(),
                depth: start_depth,
            });
        }
        a += 1u32;
    }
    let mut max_depth = start_depth;
    let mut processed = 0usize;
    while let Some(node) = queue.pop() {
        processed += 1;
        if processed > MAX_LEAVES {
            return Err(Error::precision(format!(
                "{}: more than {} residue classes were needed",
                budget_note, MAX_LEAVES
            )));
        }
        if node.depth > MAX_DEPTH {
            return Err(Error::precision(format!(
                "{}: a residue class chain exceeded depth {}",
                budget_note, MAX_DEPTH
            )));
        }
        max_depth = max_depth.max(node.depth);
        let scale = BigRational::from_integer(BigInt::from(p).pow(node.depth));
        let shift = BigRational::from_integer(BigInt::from(node.center.clone()));
        let shifted = f.compose_linear(&scale, &shift);
        let center_val = val_q(&shifted.coeff(0), p);
        let tail_val = min_tail_valuation(&shifted, p);
        let decided = match goal {
            Goal::ExactValuation => match (center_val, tail_val) {
                (Some(v), Some(t)) => t > v,
                (Some(_), None) => true,
                (None, _) => false,
            },
            Goal::CappedValuation { cap } => match (center_val, tail_val) {
                (Some(v), Some(t)) => t > v || (v >= *cap && t >= *cap),
                (Some(_), None) => true,
                (None, Some(t)) => t >= *cap,
                (None, None) => true,
            },
            Goal::FrozenWindow { window } => tail_val.map_or(true, |t| t >= *window),
            Goal::DigitData { margin } => match (center_val, tail_val) {
                (Some(v), Some(t)) => t >= v + margin,
                (Some(_), None) => true,
                (None, _) => false,
            },
        };
        if !decided {
            for t in 0..p {
                let child = &node.center + BigUint::from(p).pow(node.depth) * BigUint::from(t);
                queue.push(ClassNode {
                    center: child,
                    depth: node.depth + 1,
                });
            }
        }
    }
    Ok(max_depth)
}

/// Largest value of nu_p(f) over Z_p for an f with no p-adic integer root,
/// together with a depth kappa such that nu_p(f) factors through n mod p^kappa.
fn rootless_sup_and_depth(f: &RationalPoly, p: u64) -> Result<(i64, u32)> {
    let kappa = certify_classes(f, p, &Goal::ExactValuation, 0, &[], "valuation bound")?;
    let count = BigUint::from(p).pow(kappa);
    if count > BigUint::from(MAX_TABLE) {
        return Err(Error::precision(
            "valuation bound: the certified table does not fit the budget".to_string(),
        ));
    }
    let count = count.to_u64().expect("bounded");
    let mut sup = i64::MIN;
    for n in 0..count {
        let v =
            val_q(&f.eval_int(&BigInt::from(n)), p).expect("rootless polynomials do not vanish");
        sup = sup.max(v);
    }
    Ok((sup, kappa))
}

/// Minimal e in 0..=kappa with table[(x + p^e) mod p^kappa] = table[x].
fn minimal_power_period<T: PartialEq>(table: &[T], p: u64, kappa: u32) -> u32 {
    let m = table.len() as u64;
    for e in 0..kappa {
        let step = p.pow(e);
        let ok = (0..m).all(|x| table[((x + step) % m) as usize] == table[x as usize]);
        if ok {
            return e;
        }
    }
    kappa
}

/// A power of p that is an (eventual) period of the sequence
/// (nu_{p^l}(f(n)))_{n >= 0}, minimal among certified powers of p.
/// Requires f to have no root in Z_p.
pub(crate) fn prime_power_valuation_period(f: &RationalPoly, p: u64, l: u32) -> Result<BigUint> {
    let (_, kappa) = rootless_sup_and_depth(f, p)?;
    let count = BigUint::from(p).pow(kappa).to_u64().expect("bounded above");
    let table: Vec<i64> = (0..count)
        .map(|n| {
            let v = val_q(&f.eval_int(&BigInt::from(n)), p).expect("no roots");
            v.div_euclid(l as i64)
        })
        .collect();
    let e = minimal_power_period(&table, p, kappa);
    Ok(BigUint::from(p).pow(e))
}

/// A power of p that is an (eventual) period of (value_of(f(n)))_{n >= 0},
/// where value_of is a digit-style statistic determined by the exact
/// valuation and the first l*d unit digits of its nonzero argument. Requires
/// every root of f in Z_p to make value_of constant near it (the caller's
/// exclusion analysis); natural-number roots are skipped when sampling,
/// matching eventual periodicity.
pub(crate) fn prime_power_digits_period_with(
    f: &RationalPoly,
    p: u64,
    l: u32,
    d: u32,
    value_of: impl Fn(&BigRational) -> BigUint,
) -> Result<BigUint> {
    let delta = l * d;
    let (t, report) = separating_shift(f, p, delta)?;
    let root_centers: Vec<BigUint> = report
        .iter()
        .filter(|r| r.root.is_some())
        .map(|r| r.residue.clone())
        .collect();
    let margin = (l * d + l) as i64;
    let kappa = certify_classes(
        f,
        p,
        &Goal::DigitData { margin },
        t,
        &root_centers,
        "digit period",
    )?;
    let count = BigUint::from(p).pow(kappa);
    if count > BigUint::from(MAX_TABLE) {
        return Err(Error::precision(
            "digit period: the certified table does not fit the budget".to_string(),
        ));
    }
    let count = count.to_u64().expect("bounded");
    let table: Vec<BigUint> = (0..count)
        .map(|n| {
            let mut x = BigInt::from(n);
            let step = BigInt::from(count);
            let mut y = f.eval_int(&x);
            while y.is_zero() {
                x += &step;
                y = f.eval_int(&x);
            }
            value_of(&y)
        })
        .collect();
    let e = minimal_power_period(&table, p, kappa);
    Ok(BigUint::from(p).pow(e))
}

/// Per-component certified data for a multi-factor base table.
struct ComponentTable {
    prime: u64,
    exponent: u32,
    kappa: u32,
    modulus: u64,
    /// min(nu_p(f_i(n)), vcap) per class, where vcap = l_i * value_cap.
    vals: Vec<i64>,
    /// Unit digits mod p^(l_i d), present for the digit table only.
    units: Option<Vec<BigUint>>,
}

/// The global bound C on nu_b(f(n)): a minimum over the components with no
/// root of the per-component sup, floored by the exponent.
fn joint_valuation_bound(
    base: &FactoredBase,
    polys: &[RationalPoly],
    rootless: &[bool],
) -> Result<i64> {
    let mut c: Option<i64> = None;
    for (i, pp) in base.factors().iter().enumerate() {
        if !rootless[i] {
            continue;
        }
        let (sup, _) = rootless_sup_and_depth(&polys[i], pp.p)?;
        let bound = sup.div_euclid(pp.l as i64);
        c = Some(c.map_or(bound, |old| old.min(bound)));
    }
    c.ok_or_else(|| {
        Error::domain("a joint period needs at least one rootless component".to_string())
    })
}

fn component_tables(
    base: &FactoredBase,
    polys: &[RationalPoly],
    rootless: &[bool],
    c: i64,
    d: Option<u32>,
) -> Result<Vec<ComponentTable>> {
    let mut out = vec![];
    for (i, pp) in base.factors().iter().enumerate() {
        let (p, l) = (pp.p, pp.l);
        let extra = d.unwrap_or(1) as i64;
        let vcap = l as i64 * (c + extra);
        let kappa = if rootless[i] && d.is_none() {
            rootless_sup_and_depth(&polys[i], p)?.1
        } else if d.is_none() {
            certify_classes(
                &polys[i],
                p,
                &Goal::CappedValuation { cap: vcap },
                0,
                &[],
                "joint period",
            )?
        } else {
            let window = vcap + l as i64;
            certify_classes(
                &polys[i],
                p,
                &Goal::FrozenWindow { window },
                0,
                &[],
                "joint period",
            )?
        };
        let modulus = BigUint::from(p).pow(kappa);
        if modulus > BigUint::from(MAX_TABLE) {
            return Err(Error::precision(
                "joint period: a component table does not fit the budget".to_string(),
            ));
        }
        let modulus = modulus.to_u64().expect("bounded");
        let mut vals = Vec::with_capacity(modulus as usize);
        let mut units = d.map(|_| Vec::with_capacity(modulus as usize));
        for n in 0..modulus {
            let y = polys[i].eval_int(&BigInt::from(n));
            match val_q(&y, p) {
                Some(v) if v < vcap => {
                    vals.push(v);
                    if let Some(us) = units.as_mut() {
                        us.push(rational_val_and_digits(&y, p, l * d.unwrap()).1);
                    }
                }
                _ => {
                    vals.push(vcap);
                    if let Some(us) = units.as_mut() {
                        us.push(BigUint::zero());
                    }
                }
            }
        }
        out.push(ComponentTable {
            prime: p,
            exponent: l,
            kappa,
            modulus,
            vals,
            units,
        });
    }
    Ok(out)
}

fn joint_scan_budget(tables: &[ComponentTable]) -> Result<u64> {
    let mut m = 1u64;
    for t in tables {
        m = m
            .checked_mul(t.modulus)
            .filter(|v| *v <= MAX_TABLE)
            .ok_or_else(|| {
                Error::precision(
                    "joint period: the combined table does not fit the budget".to_string(),
                )
            })?;
    }
    Ok(m)
}

fn joint_exponent_bound(tables: &[ComponentTable]) -> u32 {
    tables
        .iter()
        .map(|t| (t.kappa + t.exponent - 1) / t.exponent)
        .max()
        .unwrap_or(0)
}

/// Minimal j in 0..=bound such that shifting by b^j leaves the joint value
/// unchanged; value(n) is computed from the per-component class indices.
fn minimal_joint_period<V: PartialEq>(
    base: &FactoredBase,
    tables: &[ComponentTable],
    m: u64,
    value: impl Fn(&[usize]) -> V,
) -> u32 {
    let bound = joint_exponent_bound(tables);
    let b = BigUint::from(base.b());
    'outer: for j in 0..bound {
        let step = b.pow(j);
        let steps: Vec<u64> = tables
            .iter()
            .map(|t| (&step % BigUint::from(t.modulus)).to_u64().expect("small"))
            .collect();
        for n in 0..m {
            let idx: Vec<usize> = tables.iter().map(|t| (n % t.modulus) as usize).collect();
            let shifted: Vec<usize> = tables
                .iter()
                .zip(&steps)
                .map(|(t, s)| ((n % t.modulus + s) % t.modulus) as usize)
                .collect();
            if value(&idx) != value(&shifted) {
                continue 'outer;
            }
        }
        return j;
    }
    bound
}

/// A power of b that is a period of (nu_b(f(n)))_{n >= 0} for a multi-factor
/// base; requires some component to have no p-adic root.
pub(crate) fn joint_valuation_period(
    base: &FactoredBase,
    polys: &[RationalPoly],
    rootless: &[bool],
) -> Result<BigUint> {
    let c = joint_valuation_bound(base, polys, rootless)?;
    let tables = component_tables(base, polys, rootless, c, None)?;
    let m = joint_scan_budget(&tables)?;
    let j = minimal_joint_period(base, &tables, m, |idx| {
        tables
            .iter()
            .zip(idx)
            .map(|(t, &i)| t.vals[i].div_euclid(t.exponent as i64))
            .min()
            .expect("nonempty base")
    });
    Ok(BigUint::from(base.b()).pow(j))
}

/// q_i^(-nu) mod p_i^(l_i d), the contribution of the coprime part of b^nu.
fn cofactor_power(base: &FactoredBase, i: usize, d: u32, nu: i64) -> BigUint {
    let modulus = base.pp_pow(i, d);
    let q = BigUint::from(base.q(i)) % &modulus;
    if nu < 0 {
        q.modpow(&BigUint::from(nu.unsigned_abs()), &modulus)
    } else {
        let inv = mod_inverse(&q, &modulus).expect("q is coprime to p");
        inv.modpow(&BigUint::from(nu as u64), &modulus)
    }
}

/// A power of b that is a period of (ell_{b,d}(f(n)))_{n >= 0} for a
/// multi-factor base; requires some component to have no p-adic root.
pub(crate) fn joint_digits_period(
    base: &FactoredBase,
    polys: &[RationalPoly],
    rootless: &[bool],
    d: u32,
) -> Result<BigUint> {
    let c = joint_valuation_bound(base, polys, rootless)?;
    let tables = component_tables(base, polys, rootless, c, Some(d))?;
    let m = joint_scan_budget(&tables)?;
    let j = minimal_joint_period(base, &tables, m, |idx| {
        let nu = tables
            .iter()
            .zip(idx)
            .map(|(t, &i)| t.vals[i].div_euclid(t.exponent as i64))
            .min()
            .expect("nonempty base");
        let residues: Vec<BigUint> = tables
            .iter()
            .zip(idx)
            .enumerate()
            .map(|(i, (t, &ix))| {
                let ld = t.exponent * d;
                let shift = t.vals[ix] - nu * t.exponent as i64;
                if shift >= ld as i64 {
                    return BigUint::zero();
                }
                let units = t.units.as_ref().expect("digit table");
                let modulus = BigUint::from(t.prime).pow(ld);
                let part = (&units[ix] * BigUint::from(t.prime).pow(shift as u32)) % &modulus;
                part * cofactor_power(base, i, d, nu) % modulus
            })
            .collect();
        base.crt_combine(&residues, d).expect("reduced residues")
    });
    Ok(BigUint::from(base.b()).pow(j))
}

/// ell_{b,d} of a tuple of rationals (not all zero) for any base.
pub(crate) fn ell_tuple(base: &FactoredBase, values: &[BigRational], d: u32) -> Result<BigUint> {
    let mut nu: Option<i64> = None;
    let mut vals = Vec::with_capacity(values.len());
    for (i, pp) in base.factors().iter().enumerate() {
        let v = val_q(&values[i], pp.p);
        let scaled = v.map(|v| v.div_euclid(pp.l as i64));
        if let Some(s) = scaled {
            nu = Some(nu.map_or(s, |old| old.min(s)));
        }
        vals.push(v);
    }
    let nu = nu.ok_or_else(|| Error::domain("last digits of the zero tuple".to_string()))?;
    let residues: Vec<BigUint> = base
        .factors()
        .iter()
        .enumerate()
        .map(|(i, pp)| {
            let ld = pp.l * d;
            match vals[i] {
                None => BigUint::zero(),
                Some(v) => {
                    let shift = v - nu * pp.l as i64;
                    if shift >= ld as i64 {
                        BigUint::zero()
                    } else {
                        let unit = rational_val_and_digits(&values[i], pp.p, ld).1;
                        let modulus = BigUint::from(pp.p).pow(ld);
                        let part = (unit * BigUint::from(pp.p).pow(shift as u32)) % &modulus;
                        part * cofactor_power(base, i, d, nu) % modulus
                    }
                }
            }
        })
        .collect();
    base.crt_combine(&residues, d)
}

/// nu_b of a tuple of rationals; None when every component vanishes.
pub(crate) fn nu_tuple(base: &FactoredBase, values: &[BigRational]) -> Option<i64> {
    let mut nu: Option<i64> = None;
    for (i, pp) in base.factors().iter().enumerate() {
        if let Some(v) = val_q(&values[i], pp.p) {
            let s = v.div_euclid(pp.l as i64);
            nu = Some(nu.map_or(s, |old| old.min(s)));
        }
    }
    nu
}
