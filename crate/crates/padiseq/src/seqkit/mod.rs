//! Finite-window sequence experiments: kernel enumeration, exact integer
//! rank of kernel subsequences, minimal period detection, and b-file input.
//!
//! A k-kernel is the set of subsequences (a_{k^i n + j}) with i <= depth and
//! 0 <= j < k^i. On a finite window these can only be compared along
//! truncated prefixes, so every report here is evidence, not proof: growth
//! of distinct counts witnesses non-automaticity, while boundedness merely
//! fails to refute it.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

/// A window a_s, ..., a_{s+L-1} of a sequence; None marks an infinite value
/// (the valuation of zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqWindow {
    start: u64,
    values: Vec<Option<BigInt>>,
}

impl SeqWindow {
    pub fn new(start: u64, values: Vec<Option<BigInt>>) -> Result<SeqWindow> {
        if values.is_empty() {
            return Err(Error::domain(
                "a window needs at least one value".to_string(),
            ));
        }
        Ok(SeqWindow { start, values })
    }

    pub fn from_integers(start: u64, values: Vec<BigInt>) -> Result<SeqWindow> {
        SeqWindow::new(start, values.into_iter().map(Some).collect())
    }

    /// First index covered by the window.
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last index covered.
    pub fn end(&self) -> u64 {
        self.start + self.values.len() as u64
    }

    /// The value at the absolute sequence index n, if covered.
    pub fn get(&self, n: u64) -> Option<&Option<BigInt>> {
        if n < self.start {
            return None;
        }
        self.values.get((n - self.start) as usize)
    }

    pub fn values(&self) -> &[Option<BigInt>] {
        &self.values
    }

    /// The window of a_n mod m over the same index range; infinite entries
    /// are kept infinite.
    pub fn reduce_mod(&self, m: &BigUint) -> Result<SeqWindow> {
        if m.is_zero() {
            return Err(Error::domain("the modulus must be positive".to_string()));
        }
        let mi = BigInt::from(m.clone());
        let values = self
            .values
            .iter()
            .map(|v| v.as_ref().map(|x| x.mod_floor(&mi)))
            .collect();
        SeqWindow::new(self.start, values)
    }

    /// The window of the subsequence a_{bn+c}, as far as this window covers.
    pub fn progression(&self, b: u64, c: u64) -> Result<SeqWindow> {
        if b == 0 {
            return Err(Error::domain(
                "the progression step must be positive".to_string(),
            ));
        }
        let mut values = Vec::new();
        let mut n = 0u64;
        while let Some(v) = self.get(b * n + c) {
            values.push(v.clone());
            n += 1;
        }
        if values.is_empty() {
            return Err(Error::domain(
                "the progression leaves the window immediately".to_string(),
            ));
        }
        SeqWindow::new(0, values)
    }
}

/// Kernel statistics of one window: cumulative distinct prefix counts per
/// depth and the exact rank of the prefix matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub k: u64,
    pub depth: u32,
    pub cmp_len: usize,
    /// counts[i] = distinct truncated subsequences among depths 0..=i.
    pub counts: Vec<usize>,
    /// Rank over the rationals of the distinct finite rows.
    pub rank: usize,
}

/// The prefix of (a_{k^i n + j}) for n = 1..=cmp_len. Prefixes start at
/// n = 1 so that the index-0 infinity of a valuation sequence does not mask
/// whole rows.
fn kernel_row(w: &SeqWindow, stride: u64, offset: u64, cmp_len: usize) -> Vec<Option<BigInt>> {
    (1..=cmp_len as u64)
        .map(|n| {
            w.get(stride * n + offset)
                .expect("length precondition")
                .clone()
        })
        .collect()
}

fn check_kernel_preconditions(w: &SeqWindow, k: u64, depth: u32, cmp_len: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::domain(
            "the kernel modulus k must be at least 2".to_string(),
        ));
    }
    if cmp_len == 0 {
        return Err(Error::domain(
            "the comparison length must be positive".to_string(),
        ));
    }
    if w.start() != 0 {
        return Err(Error::domain(
            "kernel experiments need a window starting at index 0".to_string(),
        ));
    }
    let stride = k
        .checked_pow(depth)
        .ok_or_else(|| Error::domain("the kernel depth overflows".to_string()))?;
    let needed = stride
        .checked_mul(cmp_len as u64 + 1)
        .ok_or_else(|| Error::domain("the kernel depth overflows".to_string()))?;
    if w.end() < needed {
        return Err(Error::domain(format!(
            "the window ends at {} but depth {} at comparison length {} needs {}",
            w.end(),
            depth,
            cmp_len,
            needed
        )));
    }
    Ok(stride)
}

/// Enumerates distinct truncated kernel subsequences per depth and the rank
/// of their integer span.
pub fn kernel_enumerate(w: &SeqWindow, k: u64, depth: u32, cmp_len: usize) -> Result<KernelReport> {
    check_kernel_preconditions(w, k, depth, cmp_len)?;
    let mut seen: Vec<Vec<Option<BigInt>>> = Vec::new();
    let mut counts = Vec::with_capacity(depth as usize + 1);
    for i in 0..=depth {
        let stride = k.pow(i);
        for j in 0..stride {
            let row = kernel_row(w, stride, j, cmp_len);
            if !seen.contains(&row) {
                seen.push(row);
            }
        }
        counts.push(seen.len());
    }
    let finite_rows: Vec<Vec<BigInt>> = seen
        .into_iter()
        .filter_map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect();
    let rank = matrix_rank(finite_rows);
    Ok(KernelReport {
        k,
        depth,
        cmp_len,
        counts,
        rank,
    })
}

/// Rank over the rationals of the kernel prefix matrix; rows containing an
/// infinite value are excluded.
pub fn linear_rank(w: &SeqWindow, k: u64, depth: u32, cmp_len: usize) -> Result<usize> {
    Ok(kernel_enumerate(w, k, depth, cmp_len)?.rank)
}

/// Exact rank by fraction-free Gaussian elimination.
fn matrix_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let mut rank = 0usize;
    let mut col = 0usize;
    let width = rows.first().map_or(0, Vec::len);
    while rank < rows.len() && col < width {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            let factor = rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..width {
                rows[r][c] = &rows[r][c] * &pivot - &factor * &rows[rank][c];
            }
            let content = row_content(&rows[r][col..]);
            if !content.is_zero() {
                for c in col..width {
                    rows[r][c] = &rows[r][c] / &content;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

/// gcd of a row segment, to keep fraction-free entries small.
fn row_content(row: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for x in row {
        g = g.gcd(x);
        if g == BigInt::from(1) {
            break;
        }
    }
    g
}

/// The minimal (preperiod, period) valid across the whole window: the
/// smallest period first, then the smallest preperiod for it. Requires the
/// window to span max_preperiod + 3 max_period values.
pub fn detect_period(
    w: &SeqWindow,
    max_preperiod: usize,
    max_period: usize,
) -> Result<Option<(usize, usize)>> {
    if max_period == 0 {
        return Err(Error::domain(
            "the period bound must be positive".to_string(),
        ));
    }
    if w.len() < max_preperiod + 3 * max_period {
        return Err(Error::domain(format!(
            "the window holds {} values but the bounds need {}",
            w.len(),
            max_preperiod + 3 * max_period
        )));
    }
    let v = w.values();
    for period in 1..=max_period {
        let valid_from = |r: usize| (r..v.len() - period).all(|n| v[n] == v[n + period]);
        if let Some(pre) = (0..=max_preperiod).find(|&r| valid_from(r)) {
            return Ok(Some((pre, period)));
        }
    }
    Ok(None)
}

/// Parses b-file text: one "index value" pair per line, '#' comments and
/// blank lines skipped, indices contiguous and ascending.
pub fn ingest_bfile(text: &str) -> Result<SeqWindow> {
    let mut start = None;
    let mut values: Vec<Option<BigInt>> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(val), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(format!(
                "line {}: expected \"index value\", got {:?}",
                line_no, raw
            )));
        };
        let idx: u64 = idx
            .parse()
            .map_err(|_| Error::parse(format!("line {}: bad index {:?}", line_no, idx)))?;
        let val: BigInt = val
            .parse()
            .map_err(|_| Error::parse(format!("line {}: bad value {:?}", line_no, val)))?;
        match start {
            None => start = Some(idx),
            Some(s) => {
                let expected = s + values.len() as u64;
                if idx != expected {
                    return Err(Error::parse(format!(
                        "line {}: index {} does not follow {}",
                        line_no,
                        idx,
                        expected - 1
                    )));
                }
            }
        }
        values.push(Some(val));
    }
    match start {
        Some(s) => SeqWindow::new(s, values),
        None => Err(Error::parse("the b-file holds no data lines".to_string())),
    }
}
