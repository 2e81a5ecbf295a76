//! Which terms of a nonnegative Lucas sequence are sums of three squares.
//!
//! By Legendre, a nonnegative integer fails to be a sum of three squares
//! exactly when it has the form 4^k (8l + 7), equivalently when its last two
//! base-4 digits ell_{4,2} lie in {7, 15}. Along each residue class
//! n = pi m + j the digit statistics of u_n are eventually determined by m
//! modulo a power of two, because m -> u_{pi m + j} extends to a 2-adic
//! analytic function. The classifier certifies the relevant periods from
//! finite windows and returns the exceptional set in closed form.

use super::{lucas_term, pair_wrapping, LucasParams};
use crate::arith::three_squares_representable;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const MAX_CLASS_BITS: u32 = 22;

/// The terms u_n that are not sums of three squares, listed as disjoint
/// arithmetic progressions {2^t pi l + j : l >= 0} and geometric families
/// {2^(t + 2k) pi (8l + c) : k, l >= 0}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSquaresReport {
    pi: u64,
    progressions: Vec<(u32, u64)>,
    families: Vec<(u32, u8)>,
}

impl ThreeSquaresReport {
    /// The common modulus step: every listed set lives inside pi Z + j.
    pub fn pi(&self) -> u64 {
        self.pi
    }

    /// Pairs (t, j) describing {2^t pi l + j : l >= 0} with j < 2^t pi.
    pub fn progressions(&self) -> &[(u32, u64)] {
        &self.progressions
    }

    /// Pairs (t, c) describing {2^(t + 2k) pi (8l + c) : k, l >= 0}.
    pub fn families(&self) -> &[(u32, u8)] {
        &self.families
    }

    /// Whether the report places u_n among the non-representable terms.
    pub fn contains(&self, n: u64) -> bool {
        for &(t, j) in &self.progressions {
            if n % (self.pi << t) == j {
                return true;
            }
        }
        if n > 0 && n % self.pi == 0 {
            let m = n / self.pi;
            let v = m.trailing_zeros();
            let odd = m >> v;
            for &(t, c) in &self.families {
                if v >= t && (v - t) % 2 == 0 && odd % 8 == u64::from(c) {
                    return true;
                }
            }
        }
        false
    }
}

/// u_n mod 2^64.
fn term_u64(p: &LucasParams, n: u64) -> u64 {
    pair_wrapping(p, n).0
}

/// (nu_2, odd part) of a residue mod 2^64; exact while the valuation is
/// below 64, an error otherwise.
fn split2(x: u64, what: &str) -> Result<(u32, u64)> {
    if x == 0 {
        return Err(Error::precision(format!(
            "{} vanishes to 64 binary digits",
            what
        )));
    }
    let v = x.trailing_zeros();
    Ok((v, x >> v))
}

/// Last two base-4 digits of 2^v * unit for odd unit.
fn ell42(v: u32, unit: u64) -> u8 {
    (((unit & 15) << (v % 2)) % 16) as u8
}

/// Walks m = 0, 1, ... up to count, visiting u_{pi m + j} mod 2^64. A single
/// running pair stepped pi places per index keeps the scan linear.
fn scan_terms(p: &LucasParams, pi: u64, j: u64, count: u64, mut visit: impl FnMut(u64, u64)) {
    let a = p.a as u64;
    let b = p.b as u64;
    let (mut u, mut v) = pair_wrapping(p, j);
    for m in 0..count {
        visit(m, u);
        for _ in 0..pi {
            let next = a.wrapping_mul(v).wrapping_add(b.wrapping_mul(u));
            u = v;
            v = next;
        }
    }
}

/// Certifies a slack c <= 3 with nu_2(u_{pi x + j} - u_{pi y + j}) >=
/// nu_2(x - y) - c and nu_2(g(x) - g(y)) >= nu_2(x - y) - c for the sampled
/// grid, where g(m) = u_{pi m} / m.
fn certify_kappa(p: &LucasParams, pi: u64) -> Result<u32> {
    const T_MAX: u32 = 12;
    const SAMPLES: u64 = 1024;
    let mut needed = 0i64;
    for t in 1..=T_MAX {
        let step = 1u64 << t;
        for j in 0..pi {
            let mut lows = Vec::with_capacity(SAMPLES as usize);
            scan_terms(p, pi, j, SAMPLES, |_, value| lows.push(value));
            let mut highs = Vec::with_capacity(SAMPLES as usize);
            scan_terms(p, pi, pi * step + j, SAMPLES, |_, value| highs.push(value));
            for m in 0..SAMPLES {
                let diff = highs[m as usize].wrapping_sub(lows[m as usize]);
                if diff != 0 {
                    needed = needed.max(t as i64 - diff.trailing_zeros() as i64);
                }
                if j == 0 && m > 0 {
                    // g-difference through the numerator of g(m+2^t) - g(m):
                    // m u_{pi (m + 2^t)} - (m + 2^t) u_{pi m}, then divide
                    // the valuation bound by nu(m) + nu(m + 2^t).
                    let num = m
                        .wrapping_mul(highs[m as usize])
                        .wrapping_sub((m + step).wrapping_mul(lows[m as usize]));
                    if num != 0 {
                        let shift = m.trailing_zeros() + (m + step).trailing_zeros();
                        needed = needed.max(t as i64 + shift as i64 - num.trailing_zeros() as i64);
                    }
                }
            }
        }
    }
    if needed > 3 {
        return Err(Error::precision(format!(
            "no continuity slack below 4 fits the samples (needed {})",
            needed
        )));
    }
    Ok(needed.max(0) as u32)
}

/// Smallest e <= class_bits such that the table is periodic with period 2^e.
fn minimal_power_of_two_period<T: Eq>(table: &[T], class_bits: u32) -> u32 {
    'outer: for e in 0..=class_bits {
        let period = 1usize << e;
        for i in 0..table.len() {
            if table[i] != table[(i + period) & (table.len() - 1)] {
                continue 'outer;
            }
        }
        return e;
    }
    class_bits
}

/// A certified bound on nu_2(u_{pi m + j}) over all m (skipping m = 0 when
/// the class j = 0 vanishes there): grow the window until it spans every
/// residue class mod 2^(vmax + kappa2 + 1), which pins the valuation on each
/// class to its sampled value.
fn certified_sup_valuation(
    p: &LucasParams,
    pi: u64,
    j: u64,
    kappa2: u32,
    stat: impl Fn(u64, u64) -> Result<u32>,
) -> Result<u32> {
    let mut window_log = 10u32;
    loop {
        let mut vmax = 0u32;
        let mut failure = None;
        scan_terms(p, pi, j, 1 << window_log, |m, value| {
            if j == 0 && m == 0 {
                return;
            }
            match stat(m, value) {
                Ok(v) => vmax = vmax.max(v),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if window_log >= vmax + kappa2 + 1 {
            return Ok(vmax);
        }
        if vmax + kappa2 + 1 > MAX_CLASS_BITS {
            return Err(Error::precision(
                "the valuation bound exceeds the supported window".to_string(),
            ));
        }
        window_log = vmax + kappa2 + 1;
    }
}

/// Progressions from a nonzero residue class j: the digit statistic
/// ell_{4,2}(u_{pi m + j}) is constant on classes mod
/// 2^(sup nu + 4 + kappa2), so a table over one full period plus a minimal
/// power-of-two period scan give the exact bad classes.
fn residue_progressions(p: &LucasParams, pi: u64, j: u64, kappa2: u32) -> Result<Vec<(u32, u64)>> {
    let vmax =
        certified_sup_valuation(p, pi, j, kappa2, |_, value| Ok(split2(value, "a term")?.0))?;
    let class_bits = vmax + 4 + kappa2;
    if class_bits > MAX_CLASS_BITS {
        return Err(Error::precision(
            "the digit table exceeds the supported window".to_string(),
        ));
    }
    let mut table = Vec::with_capacity(1 << class_bits);
    let mut failure = None;
    scan_terms(p, pi, j, 1 << class_bits, |_, value| {
        match split2(value, "a term") {
            Ok((v, unit)) => table.push(ell42(v, unit)),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let t = minimal_power_of_two_period(&table, class_bits);
    Ok((0..1u64 << t)
        .filter(|&m0| matches!(table[m0 as usize], 7 | 15))
        .map(|m0| (t, pi * m0 + j))
        .collect())
}

/// (nu_2, last three binary digits of the odd part) of g(m) = u_{pi m} / m,
/// reading u_{pi m} mod 2^64 from value.
fn g_stat(m: u64, value: u64) -> Result<(u32, u8)> {
    let (vu, uu) = split2(value, "a term")?;
    let vm = m.trailing_zeros();
    let um = m >> vm;
    if vu < vm {
        return Err(Error::precision(
            "a term is not divisible by its index as expected".to_string(),
        ));
    }
    // The inverse of an odd residue mod 8 is itself.
    Ok((vu - vm, (((uu & 7) * (um & 7)) % 8) as u8))
}

/// The j = 0 analysis. Writing u_{pi m} = m g(m), the term is a bad value
/// exactly when nu_2(m) + nu_2(g(m)) is even and the odd parts multiply to
/// 7 mod 8. The g statistics are constant on classes mod 2^T for a minimal
/// power-of-two period 2^T; the class m = 0 mod 2^T produces a geometric
/// family, the others plain progressions.
fn zero_residue_analysis(
    p: &LucasParams,
    pi: u64,
    kappa2: u32,
) -> Result<(Vec<(u32, u64)>, Vec<(u32, u8)>)> {
    let vmax = certified_sup_valuation(p, pi, 0, kappa2, |m, value| Ok(g_stat(m, value)?.0))?;
    let class_bits = vmax + 3 + kappa2;
    if class_bits > MAX_CLASS_BITS {
        return Err(Error::precision(
            "the digit table exceeds the supported window".to_string(),
        ));
    }
    let mut table: Vec<(u32, u8)> = Vec::with_capacity(1 << class_bits);
    let mut failure = None;
    scan_terms(p, pi, 0, 1 << class_bits, |m, value| {
        if m == 0 {
            table.push((0, 0));
            return;
        }
        match g_stat(m, value) {
            Ok(s) => table.push(s),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    // The m = 0 slot stands for the whole class 0 mod 2^class_bits; read its
    // statistics off the representative 2^class_bits.
    table[0] = g_stat(1 << class_bits, term_u64(p, pi << class_bits))?;
    let t_cls = minimal_power_of_two_period(&table, class_bits);

    // Class 0 mod 2^T: with m = 2^(T + 2k) m' and m' odd, nu_2(g) = w and
    // the odd digits lambda are those at the limit point 0. Badness asks
    // T + 2k + w even and odd(m') lambda = 7 mod 8, one family.
    let (w, lambda) = table[0];
    let t_family = t_cls + ((i64::from(w) - i64::from(t_cls)).rem_euclid(2)) as u32;
    let c_family = ((7 * u64::from(lambda)) % 8) as u8;
    let families = vec![(t_family, c_family)];

    // Classes v != 0 mod 2^T: m = 2^(T+2) l + 2^T w_cls + v fixes both
    // nu_2(m) = nu_2(v) and the last three odd digits of m, so badness is
    // decided per (v, w_cls) pair.
    let mut progressions = Vec::new();
    for v in 1..1u64 << t_cls {
        let (vg, lg) = table[v as usize];
        for w_cls in 0..4u64 {
            let m_rep = (w_cls << t_cls) + v;
            let odd_m = (m_rep >> m_rep.trailing_zeros()) & 7;
            let bad_digits = (odd_m * u64::from(lg)) % 8 == 7;
            let bad_valuation = (v.trailing_zeros() + vg) % 2 == 0;
            if bad_digits && bad_valuation {
                progressions.push((t_cls + 2, pi * m_rep));
            }
        }
    }
    Ok((progressions, families))
}

/// Merges progression pairs that tile a coarser progression, repeatedly:
/// (t, j) and (t, j + 2^(t-1) pi) together form (t - 1, j mod 2^(t-1) pi).
fn normalize_progressions(pi: u64, mut progs: Vec<(u32, u64)>) -> Vec<(u32, u64)> {
    loop {
        progs.sort_unstable();
        progs.dedup();
        let mut merged = None;
        'search: for i in 0..progs.len() {
            let (t, j) = progs[i];
            if t == 0 {
                continue;
            }
            let half = pi << (t - 1);
            let partner = if j >= half { j - half } else { j + half };
            for (k, &other) in progs.iter().enumerate() {
                if other == (t, partner) && k != i {
                    merged = Some((i, k, (t - 1, j.min(partner))));
                    break 'search;
                }
            }
        }
        match merged {
            Some((i, k, coarse)) => {
                let (first, second) = (i.min(k), i.max(k));
                progs.remove(second);
                progs.remove(first);
                progs.push(coarse);
            }
            None => return progs,
        }
    }
}

/// Classifies the indices n with u_n not a sum of three squares.
///
/// Preconditions: the sequence is nondegenerate, B is odd, and every term is
/// nonnegative (A >= 1 together with a positive discriminant).
pub fn three_squares_classify(p: &LucasParams) -> Result<ThreeSquaresReport> {
    p.require_nondegenerate()?;
    if p.b.rem_euclid(2) == 0 {
        return Err(Error::domain("B must be odd".to_string()));
    }
    if p.a < 1 || p.discriminant() <= 0 {
        return Err(Error::domain(
            "the terms must be nonnegative, which needs A >= 1 and a positive discriminant"
                .to_string(),
        ));
    }
    let mut check = (BigInt::zero(), BigInt::one());
    for n in 0..64 {
        if check.0.is_negative() {
            return Err(Error::domain(format!("u_{} is negative", n)));
        }
        let next = BigInt::from(p.a) * &check.1 + BigInt::from(p.b) * &check.0;
        check.0 = std::mem::replace(&mut check.1, next);
    }
    let pi = if p.a % 2 == 0 { 4u64 } else { 6 };
    // Sanity: the companion matrix to the power pi must be the identity mod
    // 4, so that every class n = pi m + j supports 2-adic interpolation.
    let u_prev = lucas_term(p, pi - 1);
    let u_cur = lucas_term(p, pi);
    let u_next = lucas_term(p, pi + 1);
    let four = BigInt::from(4);
    let b_big = BigInt::from(p.b);
    if (&b_big * &u_prev - BigInt::one()).mod_floor(&four) != BigInt::zero()
        || u_cur.mod_floor(&four) != BigInt::zero()
        || (u_next - BigInt::one()).mod_floor(&four) != BigInt::zero()
    {
        return Err(Error::precision(
            "the interpolation step is not the identity mod 4".to_string(),
        ));
    }
    let kappa2 = 2 * certify_kappa(p, pi)?;
    let mut progressions = Vec::new();
    for j in 1..pi {
        progressions.extend(residue_progressions(p, pi, j, kappa2)?);
    }
    let (zero_progs, mut families) = zero_residue_analysis(p, pi, kappa2)?;
    progressions.extend(zero_progs);
    let progressions = normalize_progressions(pi, progressions);
    families.sort_unstable();
    Ok(ThreeSquaresReport {
        pi,
        progressions,
        families,
    })
}

/// Compares the report against the exact terms for every n <= bound,
/// returning the first index where membership and Legendre's criterion
/// disagree, or None when the sweep is clean.
pub fn three_squares_verify(
    p: &LucasParams,
    report: &ThreeSquaresReport,
    bound: u64,
) -> Option<u64> {
    let mut u = BigInt::zero();
    let mut v = BigInt::one();
    for n in 0..=bound {
        let representable = three_squares_representable(u.magnitude());
        if representable != !report.contains(n) {
            return Some(n);
        }
        let next = BigInt::from(p.a) * &v + BigInt::from(p.b) * &u;
        u = std::mem::replace(&mut v, next);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> LucasParams {
        LucasParams::new(1, 1).unwrap()
    }

    fn pell() -> LucasParams {
        LucasParams::new(2, 1).unwrap()
    }

    #[test]
    fn pell_exceptional_terms() {
        let report = three_squares_classify(&pell()).unwrap();
        assert_eq!(report.pi(), 4);
        assert_eq!(report.progressions(), &[], "Pell should give a pure family");
        assert_eq!(
            report.families(),
            &[(0, 5)],
            "P_n bad iff n = 4^(k+1) (8l+5)"
        );
        assert!(report.contains(20), "P_20 = 15994428 = 4 (8 * 499826 + 7)");
        assert!(!report.contains(4));
        assert!(!report.contains(12));
        assert!(report.contains(4 * 13));
        assert!(report.contains(16 * 5));
    }

    #[test]
    fn fibonacci_exceptional_terms() {
        let report = three_squares_classify(&fib()).unwrap();
        assert_eq!(report.pi(), 6);
        assert_eq!(
            report.progressions(),
            &[(1, 10)],
            "F_n bad on 12Z + 10 aside from the family"
        );
        assert_eq!(
            report.families(),
            &[(1, 7)],
            "and on n = 4^(k+1) (24l + 21)"
        );
        assert!(report.contains(10), "F_10 = 55 = 8 * 6 + 7");
        assert!(report.contains(22), "F_22 = 17711");
        assert!(report.contains(84), "84 = 4 * 21");
        assert!(!report.contains(12));
        assert!(!report.contains(21));
    }

    #[test]
    fn sweeps_match_legendre() {
        for (a, b) in [(2i64, 1i64), (1, 1), (3, -1), (1, 3), (4, 1)] {
            let p = LucasParams::new(a, b).unwrap();
            let report = three_squares_classify(&p).unwrap();
            assert_eq!(
                three_squares_verify(&p, &report, 400),
                None,
                "A = {}, B = {}: report = {:?}",
                a,
                b,
                report
            );
        }
    }

    #[test]
    fn rejected_parameters() {
        let even_b = LucasParams::new(2, 2).unwrap();
        assert!(three_squares_classify(&even_b)
            .unwrap_err()
            .to_string()
            .contains("odd"));
        let negative = LucasParams::new(1, -3).unwrap();
        assert!(three_squares_classify(&negative)
            .unwrap_err()
            .to_string()
            .contains("nonnegative"));
        let degenerate = LucasParams::new(1, -1).unwrap();
        assert!(three_squares_classify(&degenerate)
            .unwrap_err()
            .to_string()
            .contains("degenerate"));
    }

    #[test]
    fn pell_window_statistics() {
        // Every g(m) = P_{4m} / m in a long window has nu_2 = 2 and last
        // odd digits 3; these facts pin the single Pell family (0, 5).
        for m in 1..=2000u64 {
            let (vg, lg) = g_stat(m, term_u64(&pell(), 4 * m)).unwrap();
            assert_eq!((vg, lg), (2, 3), "m = {}", m);
        }
    }

    #[test]
    fn membership_matches_the_set_algebra() {
        let report = ThreeSquaresReport {
            pi: 6,
            progressions: vec![(1, 10)],
            families: vec![(1, 7)],
        };
        // 4^(k+1) (24l + 21) = 6 * 2^(1 + 2k) (8l + 7).
        assert!(report.contains(84), "k = 0, l = 0");
        assert!(report.contains(4 * 45), "k = 0, l = 1: 180 = 6 * 2 * 15");
        assert!(report.contains(16 * 21), "k = 1, l = 0");
        assert!(
            !report.contains(6 * 28),
            "28 = 4 * 7 puts 7 at an odd depth offset"
        );
        assert!(!report.contains(0), "0 is a square");
    }
}
