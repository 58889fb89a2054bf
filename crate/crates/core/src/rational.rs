//! Rational ranks for `K_*(Z⟨x_1..x_n⟩/(m^a), m) ⊗ Q`.
//!
//! The map `V_a^1 : Q{S_n(a, [a(q−1)+1, aq])} → Q{S_n(1, [a(q−1)+1, aq])}`
//! sends a class `s` to `(|t|/|s|) · t` with `t = v_a^1(s)`; even and odd
//! K-groups are its kernel and cokernel.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::words::{canonical_form, fiber, fiber_shape, for_each_block_necklace, BlockClass, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("invalid parameters: {0}")]
    ParameterError(String),
    #[error("period {source_period} does not divide period {target_period}")]
    NonIntegralEntry { source_period: usize, target_period: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// All `a`-classes of words whose length lies in `[lo, hi]` (and is a
/// multiple of `a`), ordered by length and then lexicographically.
#[derive(Debug, Clone)]
pub struct WordBasis {
    pub n: u8,
    pub a: usize,
    pub lo: usize,
    pub hi: usize,
    pub classes: Vec<BlockClass>,
    index: HashMap<Word, usize>,
}

impl WordBasis {
    pub fn new(n: u8, a: usize, lo: usize, hi: usize) -> Self {
        let mut classes = Vec::new();
        for len in lo.max(1)..=hi {
            if len % a != 0 {
                continue;
            }
            for_each_block_necklace(n, a, len / a, |letters, period| {
                classes.push(BlockClass {
                    canonical: Word::new(n, letters.to_vec()).expect("letters in range"),
                    block: a,
                    period,
                });
            });
        }
        let index = classes.iter().enumerate().map(|(i, c)| (c.canonical.clone(), i)).collect();
        WordBasis { n, a, lo, hi, classes, index }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn position(&self, canonical: &Word) -> Option<usize> {
        self.index.get(canonical).copied()
    }
}

/// Sparse matrix with exact rational entries, as `(row, col, value)`.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, BigRational)>,
}

fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            for k in c..cols {
                let v = &f * &m[rank][k];
                m[r][k] -= v;
            }
        }
        rank += 1;
    }
    rank
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl SparseMatrix {
    /// Exact rank, eliminating each connected block of the row/column
    /// incidence graph separately.
    pub fn rank(&self) -> usize {
        let n = self.rows + self.cols;
        let mut parent: Vec<usize> = (0..n).collect();
        for (r, c, v) in &self.entries {
            if v.is_zero() {
                continue;
            }
            let (x, y) = (find(&mut parent, *r), find(&mut parent, self.rows + c));
            if x != y {
                parent[x] = y;
            }
        }
        let mut blocks: HashMap<usize, Vec<&(usize, usize, BigRational)>> = HashMap::new();
        for e in &self.entries {
            if !e.2.is_zero() {
                let root = find(&mut parent, e.0);
                blocks.entry(root).or_default().push(e);
            }
        }
        blocks.values().map(|entries| block_rank(entries)).sum()
    }

    /// Rank of the submatrix on the given rows.
    pub fn rank_on_rows(&self, keep: impl Fn(usize) -> bool) -> usize {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().filter(|e| keep(e.0)).cloned().collect(),
        }
        .rank()
    }
}

fn block_rank(entries: &[&(usize, usize, BigRational)]) -> usize {
    let mut rows: Vec<usize> = entries.iter().map(|e| e.0).collect();
    let mut cols: Vec<usize> = entries.iter().map(|e| e.1).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let mut m = vec![vec![BigRational::zero(); cols.len()]; rows.len()];
    for (r, c, v) in entries {
        let i = rows.binary_search(r).expect("row");
        let j = cols.binary_search(c).expect("col");
        m[i][j] += v;
    }
    dense_rank(m)
}

fn entry(source_period: usize, target_period: usize) -> Result<BigRational, RationalError> {
    if target_period % source_period != 0 {
        return Err(RationalError::NonIntegralEntry { source_period, target_period });
    }
    Ok(BigRational::from_integer(BigInt::from(target_period / source_period)))
}

fn check(a: usize, q: usize) -> Result<(), RationalError> {
    if a < 2 {
        return Err(RationalError::ParameterError(format!("a must be at least 2, got {a}")));
    }
    if q < 1 {
        return Err(RationalError::ParameterError("q must be positive".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RationalVMatrix {
    pub source: WordBasis,
    pub target: WordBasis,
    pub matrix: SparseMatrix,
}

/// `V_a^1` on the word range `[a(q−1)+1, aq]`, rows indexed by cyclic
/// classes and columns by `a`-classes.
pub fn rational_v_matrix(n: u8, a: usize, q: usize) -> Result<RationalVMatrix, RationalError> {
    check(a, q)?;
    let (lo, hi) = (a * (q - 1) + 1, a * q);
    let source = WordBasis::new(n, a, lo, hi);
    let target = WordBasis::new(n, 1, lo, hi);
    let mut entries = Vec::with_capacity(source.len());
    for (j, s) in source.classes.iter().enumerate() {
        let t = canonical_form(&s.canonical, 1)?;
        let i = target.position(&t.canonical).expect("image lies in the target range");
        entries.push((i, j, entry(s.period, t.period)?));
    }
    let matrix = SparseMatrix { rows: target.len(), cols: source.len(), entries };
    Ok(RationalVMatrix { source, target, matrix })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RationalChecks {
    pub top_block_surjective: bool,
    pub odd_closed_form: bool,
    pub even_fiber_sum: bool,
}

impl RationalChecks {
    pub fn all(&self) -> bool {
        self.top_block_surjective && self.odd_closed_form && self.even_fiber_sum
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalParams {
    pub n: u8,
    pub a: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalReport {
    pub params: RationalParams,
    #[serde(rename = "dim_K_even")]
    pub dim_even: usize,
    #[serde(rename = "dim_K_odd")]
    pub dim_odd: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub checks: RationalChecks,
}

/// Number of cyclic words of length `len` in `n` letters,
/// `(1/len) Σ_{d | len} φ(d) n^{len/d}`.
fn necklace_count(n: u8, len: usize) -> u128 {
    let phi = |mut m: usize| {
        let mut r = m;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                while m % p == 0 {
                    m /= p;
                }
                r -= r / p;
            }
            p += 1;
        }
        if m > 1 {
            r -= r / m;
        }
        r
    };
    let total: u128 = (1..=len)
        .filter(|d| len % d == 0)
        .map(|d| phi(d) as u128 * (n as u128).pow((len / d) as u32))
        .sum();
    total / len as u128
}

/// Sources above this count are not materialized; the matrix is then
/// reduced fiber by fiber.
const MATERIALIZE_LIMIT: u128 = 400_000;

struct Tally {
    source_dim: usize,
    target_dim: usize,
    rank: usize,
    top_rows: usize,
    top_rank: usize,
}

fn tally_dense(n: u8, a: usize, q: usize) -> Result<Tally, RationalError> {
    let v = rational_v_matrix(n, a, q)?;
    let top = a * q;
    let is_top = |i: usize| v.target.classes[i].len() == top;
    Ok(Tally {
        source_dim: v.source.len(),
        target_dim: v.target.len(),
        rank: v.matrix.rank(),
        top_rows: (0..v.target.len()).filter(|&i| is_top(i)).count(),
        top_rank: v.matrix.rank_on_rows(is_top),
    })
}

/// Every source has length `aq`, so the matrix is block diagonal with one
/// block per cyclic class of length `aq` (its fiber); shorter target
/// classes are zero rows.
fn tally_streaming(n: u8, a: usize, q: usize) -> Result<Tally, RationalError> {
    let top = a * q;
    let mut lower_rows = 0usize;
    for len in a * (q - 1) + 1..top {
        for_each_block_necklace(n, 1, len, |_, _| lower_rows += 1);
    }
    let mut tally = Tally { source_dim: 0, target_dim: lower_rows, rank: 0, top_rows: 0, top_rank: 0 };
    let mut failure = None;
    for_each_block_necklace(n, 1, top, |letters, period| {
        if failure.is_some() {
            return;
        }
        let t = BlockClass { canonical: Word::new(n, letters.to_vec()).expect("letters in range"), block: 1, period };
        let over = match fiber(&t, a) {
            Ok(f) => f,
            Err(e) => return failure = Some(e.into()),
        };
        let row: Result<Vec<BigRational>, _> = over.iter().map(|s| entry(s.period, period)).collect();
        let row = match row {
            Ok(r) => r,
            Err(e) => return failure = Some(e),
        };
        let r = dense_rank(vec![row]);
        tally.source_dim += over.len();
        tally.target_dim += 1;
        tally.top_rows += 1;
        tally.rank += r;
        tally.top_rank += r;
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(tally),
    }
}

pub fn kgroups_rational(n: u8, a: usize, q: usize) -> Result<RationalReport, RationalError> {
    check(a, q)?;
    if n == 0 {
        return Err(RationalError::ParameterError("n must be positive".into()));
    }
    let top = a * q;
    let estimated_sources = necklace_count(n, top) * (a as u128);
    let tally = if estimated_sources <= MATERIALIZE_LIMIT {
        tally_dense(n, a, q)?
    } else {
        tally_streaming(n, a, q)?
    };
    let dim_even = tally.source_dim - tally.rank;
    let dim_odd = tally.target_dim - tally.rank;
    let closed_odd: u128 = (a * (q - 1) + 1..top).map(|len| necklace_count(n, len)).sum();
    let mut fiber_sum = 0usize;
    for_each_block_necklace(n, 1, top, |letters, period| {
        let t = BlockClass { canonical: Word::new(n, letters.to_vec()).expect("letters in range"), block: 1, period };
        fiber_sum += fiber_shape(&t, a).0 - 1;
    });
    let checks = RationalChecks {
        top_block_surjective: tally.top_rank == tally.top_rows,
        odd_closed_form: dim_odd as u128 == closed_odd,
        even_fiber_sum: dim_even == fiber_sum,
    };
    Ok(RationalReport {
        params: RationalParams { n, a, q },
        dim_even,
        dim_odd,
        source_dim: tally.source_dim,
        target_dim: tally.target_dim,
        rank: tally.rank,
        checks,
    })
}
