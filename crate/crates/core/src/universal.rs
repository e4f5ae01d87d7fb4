//! `(n, r)`-universal families of binary vectors.
//!
//! A family is universal when, restricted to any `r` of the `n` positions,
//! it shows all `2^r` patterns. Vectors are stored as `u64` masks with
//! position `i` in bit `i`, so `n` is limited to 64. As text a vector is
//! written position 0 first.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest `n` for which the complete family is materialized.
pub const DEFAULT_ALL_VECTORS_CAP: usize = 20;

/// Largest `C(n, r) · 2^r` that [`check_universal`] and the greedy
/// construction will handle.
pub const DEFAULT_WORK_LIMIT: u64 = 1 << 24;

/// Candidates drawn per greedy step.
const GREEDY_CANDIDATES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniversalError {
    #[error("need 1 <= r <= n <= 64, got n = {n}, r = {r}")]
    InvalidParameters { n: usize, r: usize },
    #[error("complete family on {n} positions exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("C(n, r) * 2^r = {work} exceeds the work limit {limit}")]
    WorkLimitExceeded { work: u128, limit: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// All `2^n` vectors in ascending binary order of their text form.
    AllVectors,
    /// All `2^n` vectors by increasing number of ones, then by the
    /// lexicographic order of the positions set to one.
    AllVectorsByWeight,
    /// Greedy set cover over `(positions, pattern)` demands.
    Greedy { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringFamily {
    n: usize,
    r: usize,
    vectors: Vec<u64>,
}

impl ColoringFamily {
    /// Wraps explicit vectors; bits at positions `>= n` must be clear.
    pub fn new(n: usize, r: usize, vectors: Vec<u64>) -> Result<Self, UniversalError> {
        check_params(n, r)?;
        debug_assert!(vectors.iter().all(|&v| n == 64 || v >> n == 0));
        Ok(ColoringFamily { n, r, vectors })
    }

    /// Parses 0/1 strings of equal length `n`.
    pub fn from_strings<S: AsRef<str>>(r: usize, rows: &[S]) -> Result<Self, UniversalError> {
        let n = rows.first().map_or(0, |s| s.as_ref().len());
        let mut vectors = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row.as_ref();
            if row.len() != n || !row.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(UniversalError::InvalidParameters { n: row.len(), r });
            }
            vectors.push(row.bytes().enumerate().fold(0u64, |m, (i, b)| {
                if b == b'1' {
                    m | 1 << i
                } else {
                    m
                }
            }));
        }
        ColoringFamily::new(n, r, vectors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[u64] {
        &self.vectors
    }

    /// One 0/1 string per line, in family order.
    pub fn dump(&self) -> String {
        self.vectors.iter().map(|&v| vector_string(v, self.n) + "\n").collect()
    }
}

/// Text form of a vector, position 0 first.
pub fn vector_string(v: u64, n: usize) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn check_params(n: usize, r: usize) -> Result<(), UniversalError> {
    if r == 0 || r > n || n > 64 {
        return Err(UniversalError::InvalidParameters { n, r });
    }
    Ok(())
}

fn binomial(n: usize, r: usize) -> u128 {
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `C(n, r) · 2^r`, the number of demands a universal family must meet.
pub fn demand_count(n: usize, r: usize) -> u128 {
    binomial(n, r) << r
}

fn within_limit(n: usize, r: usize, limit: u64) -> Result<usize, UniversalError> {
    let work = demand_count(n, r);
    if work > u128::from(limit) {
        return Err(UniversalError::WorkLimitExceeded { work, limit });
    }
    Ok(work as usize)
}

/// Every vector on `n <= 64` positions, by weight; lazy, so usable well past
/// the materialization cap.
pub fn vectors_by_weight(n: usize) -> impl Iterator<Item = u64> {
    (0..=n).flat_map(move |w| (0..n).combinations(w).map(|ps| ps.iter().fold(0, |m, &p| m | 1 << p)))
}

/// Builds a universal family with the default caps.
pub fn enumerate_universal(
    n: usize,
    r: usize,
    method: Method,
) -> Result<ColoringFamily, UniversalError> {
    enumerate_universal_with(n, r, method, DEFAULT_ALL_VECTORS_CAP, DEFAULT_WORK_LIMIT)
}

pub fn enumerate_universal_with(
    n: usize,
    r: usize,
    method: Method,
    all_vectors_cap: usize,
    work_limit: u64,
) -> Result<ColoringFamily, UniversalError> {
    check_params(n, r)?;
    let vectors = match method {
        Method::AllVectors | Method::AllVectorsByWeight if n > all_vectors_cap => {
            return Err(UniversalError::CapExceeded { n, cap: all_vectors_cap });
        }
        Method::AllVectors => (0u64..1 << n)
            .map(|x| (0..n).fold(0, |m, i| m | (x >> (n - 1 - i) & 1) << i))
            .collect(),
        Method::AllVectorsByWeight => vectors_by_weight(n).collect(),
        Method::Greedy { seed } => greedy(n, r, seed, work_limit)?,
    };
    Ok(ColoringFamily { n, r, vectors })
}

fn pattern(v: u64, positions: &[usize]) -> usize {
    positions.iter().enumerate().fold(0, |p, (j, &i)| p | ((v >> i & 1) as usize) << j)
}

fn greedy(n: usize, r: usize, seed: u64, work_limit: u64) -> Result<Vec<u64>, UniversalError> {
    let demands = within_limit(n, r, work_limit)?;
    let subsets: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    let width = 1usize << r;
    let mut covered = vec![false; demands];
    let mut left = demands;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::new();
    let mut cursor = 0;
    let gain = |v: u64, covered: &[bool]| {
        subsets.iter().enumerate().filter(|(s, ps)| !covered[s * width + pattern(v, ps)]).count()
    };

    while left > 0 {
        while covered[cursor] {
            cursor += 1;
        }
        let (s, p) = (cursor / width, cursor % width);
        let mut best: Option<(usize, u64)> = None;
        for _ in 0..GREEDY_CANDIDATES {
            let mut v: u64 = rng.gen::<u64>() & mask(n);
            for (j, &i) in subsets[s].iter().enumerate() {
                v = (v & !(1 << i)) | ((p as u64 >> j) & 1) << i;
            }
            let g = gain(v, &covered);
            if best.is_none_or(|(bg, _)| g > bg) {
                best = Some((g, v));
            }
        }
        let (_, v) = best.expect("at least one candidate");
        for (si, ps) in subsets.iter().enumerate() {
            let slot = &mut covered[si * width + pattern(v, ps)];
            if !*slot {
                *slot = true;
                left -= 1;
            }
        }
        vectors.push(v);
    }
    Ok(vectors)
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// Exhaustive universality check with the default work limit.
pub fn check_universal(family: &ColoringFamily, n: usize, r: usize) -> Result<bool, UniversalError> {
    check_universal_with(family, n, r, DEFAULT_WORK_LIMIT)
}

pub fn check_universal_with(
    family: &ColoringFamily,
    n: usize,
    r: usize,
    work_limit: u64,
) -> Result<bool, UniversalError> {
    check_params(n, r)?;
    within_limit(n, r, work_limit)?;
    if family.n != n {
        return Ok(false);
    }
    let width = 1usize << r;
    let mut seen = vec![false; width];
    for ps in (0..n).combinations(r) {
        seen.fill(false);
        let mut count = 0;
        for &v in &family.vectors {
            let p = pattern(v, &ps);
            if !seen[p] {
                seen[p] = true;
                count += 1;
                if count == width {
                    break;
                }
            }
        }
        if count < width {
            return Ok(false);
        }
    }
    Ok(true)
}
