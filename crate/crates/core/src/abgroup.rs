//! Finitely generated abelian groups given by integer presentations.
//!
//! Groups are kept in invariant-factor form `Z/d1 ⊕ Z/d2 ⊕ …` with
//! `d1 | d2 | …`; a free summand is recorded as the divisor `0`, which sorts
//! last since every integer divides 0.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbGroupError {
    #[error("homomorphism is ill-formed: {0}")]
    IllFormed(String),
    #[error("invariant factor {0} does not fit in 64 bits")]
    Overflow(BigInt),
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds a `rows × cols` matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = IntMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = IntMatrix::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        m[(i, j)] += a * b;
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let v = s * k;
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let v = s * k;
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[r * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + c];
            *x = -std::mem::take(x);
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal with
/// `d[0] | d[1] | …`, nonnegative. `u_inv` is the inverse of `u`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct Reducer {
    a: IntMatrix,
    track: Option<(IntMatrix, IntMatrix, IntMatrix)>,
}

impl Reducer {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        if let Some((u, u_inv, _)) = &mut self.track {
            u.swap_rows(x, y);
            u_inv.swap_cols(x, y);
        }
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        if let Some((_, _, v)) = &mut self.track {
            v.swap_cols(x, y);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row(dst, src, k);
        if let Some((u, u_inv, _)) = &mut self.track {
            u.add_row(dst, src, k);
            u_inv.add_col(src, dst, &-k);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col(dst, src, k);
        if let Some((_, _, v)) = &mut self.track {
            v.add_col(dst, src, k);
        }
    }

    fn negate_row(&mut self, r: usize) {
        self.a.negate_row(r);
        if let Some((u, u_inv, _)) = &mut self.track {
            u.negate_row(r);
            u_inv.negate_col(r);
        }
    }

    /// Position of the nonzero entry of least absolute value in the
    /// lower-right block starting at `t`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((usize, usize), BigInt)> = None;
        for i in t..self.a.rows {
            for j in t..self.a.cols {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if ax.is_one() {
                    return Some((i, j));
                }
                if best.as_ref().map_or(true, |(_, b)| ax < *b) {
                    best = Some(((i, j), ax));
                }
            }
        }
        best.map(|(p, _)| p)
    }

    fn run(&mut self) {
        let (rows, cols) = (self.a.rows, self.a.cols);
        for t in 0..rows.min(cols) {
            loop {
                let Some((pi, pj)) = self.min_pivot(t) else { return };
                self.swap_rows(t, pi);
                self.swap_cols(t, pj);
                let pivot = self.a[(t, t)].clone();
                let mut clean = true;
                for i in t + 1..rows {
                    if self.a[(i, t)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(i, t)] / &pivot;
                    self.add_row(i, t, &-q);
                    clean &= self.a[(i, t)].is_zero();
                }
                for j in t + 1..cols {
                    if self.a[(t, j)].is_zero() {
                        continue;
                    }
                    let q = &self.a[(t, j)] / &pivot;
                    self.add_col(j, t, &-q);
                    clean &= self.a[(t, j)].is_zero();
                }
                if !clean {
                    continue;
                }
                let offender = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&pivot))
                });
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[(t, t)].is_negative() {
                self.negate_row(t);
            }
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let track = (
        IntMatrix::identity(m.rows),
        IntMatrix::identity(m.rows),
        IntMatrix::identity(m.cols),
    );
    let mut r = Reducer { a: m.clone(), track: Some(track) };
    r.run();
    let (u, u_inv, v) = r.track.expect("tracked");
    Snf { u, u_inv, d: r.a, v }
}

/// Diagonal of the Smith form (length `min(rows, cols)`), without
/// transformation matrices.
pub fn smith_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let mut r = Reducer { a: m.clone(), track: None };
    r.run();
    (0..m.rows.min(m.cols)).map(|i| r.a[(i, i)].clone()).collect()
}

fn prime_power_factors(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// A finitely generated abelian group in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct FinAbGroup {
    divisors: Vec<u64>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup::default()
    }

    pub fn cyclic(order: u64) -> Self {
        FinAbGroup::from_cyclic_orders([order])
    }

    pub fn free(rank: usize) -> Self {
        FinAbGroup { divisors: vec![0; rank] }
    }

    /// `⊕ Z/o_i` in canonical form; an order of `0` is a copy of `Z`, an
    /// order of `1` is trivial.
    pub fn from_cyclic_orders(orders: impl IntoIterator<Item = u64>) -> Self {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        let mut free = 0;
        for o in orders {
            if o == 0 {
                free += 1;
                continue;
            }
            for (p, e) in prime_power_factors(o) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let width = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut divisors = vec![1u64; width];
        for (p, mut exps) in by_prime {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (k, e) in exps.into_iter().enumerate() {
                // k-th largest exponent goes into the k-th largest factor
                divisors[width - 1 - k] *= p.pow(e);
            }
        }
        divisors.extend(std::iter::repeat(0).take(free));
        FinAbGroup { divisors }
    }

    pub fn from_divisors(divisors: Vec<u64>) -> Self {
        FinAbGroup::from_cyclic_orders(divisors)
    }

    pub fn direct_sum<'a>(groups: impl IntoIterator<Item = &'a FinAbGroup>) -> Self {
        FinAbGroup::from_cyclic_orders(groups.into_iter().flat_map(|g| g.divisors.iter().copied()))
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.divisors.iter().filter(|&&d| d == 0).count()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigUint> {
        if !self.is_finite() {
            return None;
        }
        Some(self.divisors.iter().map(|&d| BigUint::from(d)).product())
    }

    /// `#{x : k x = 0}` for a finite group.
    pub fn count_killed_by(&self, k: u64) -> BigUint {
        self.divisors.iter().map(|&d| BigUint::from(d.gcd(&k))).product()
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .divisors
            .iter()
            .map(|&d| if d == 0 { "Z".to_string() } else { format!("Z/{d}") })
            .collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// A homomorphism `⊕_j Z/s_j → ⊕_i Z/t_i` between groups presented by
/// generators of the given orders (`0` for infinite order); `matrix` is
/// `targets × sources`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbHom {
    source: Vec<u64>,
    target: Vec<u64>,
    matrix: IntMatrix,
}

impl AbHom {
    pub fn new(source: Vec<u64>, target: Vec<u64>, matrix: IntMatrix) -> Result<Self, AbGroupError> {
        if matrix.rows != target.len() || matrix.cols != source.len() {
            return Err(AbGroupError::IllFormed(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows,
                matrix.cols,
                target.len(),
                source.len()
            )));
        }
        // M · diag(source orders) must land in the target relation lattice
        for (j, &s) in source.iter().enumerate() {
            for (i, &t) in target.iter().enumerate() {
                let image = &matrix[(i, j)] * BigInt::from(s);
                let ok = if t == 0 { image.is_zero() } else { image.is_multiple_of(&BigInt::from(t)) };
                if !ok {
                    return Err(AbGroupError::IllFormed(format!(
                        "generator {j} of order {s} maps outside relations at row {i}"
                    )));
                }
            }
        }
        Ok(AbHom { source, target, matrix })
    }

    pub fn source_orders(&self) -> &[u64] {
        &self.source
    }

    pub fn target_orders(&self) -> &[u64] {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn source_group(&self) -> FinAbGroup {
        FinAbGroup::from_cyclic_orders(self.source.iter().copied())
    }

    pub fn target_group(&self) -> FinAbGroup {
        FinAbGroup::from_cyclic_orders(self.target.iter().copied())
    }

    fn relation_matrix(orders: &[u64]) -> IntMatrix {
        IntMatrix::diagonal(&orders.iter().map(|&o| BigInt::from(o)).collect::<Vec<_>>())
    }
}

fn group_from_diagonal(diag: &[BigInt], generators: usize) -> Result<FinAbGroup, AbGroupError> {
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let mut orders = Vec::with_capacity(generators);
    for d in diag.iter().filter(|d| !d.is_zero()) {
        orders.push(d.to_u64().ok_or_else(|| AbGroupError::Overflow(d.clone()))?);
    }
    orders.extend(std::iter::repeat(0).take(generators - rank));
    Ok(FinAbGroup::from_cyclic_orders(orders))
}

/// `target / image(h)`.
pub fn cokernel(h: &AbHom) -> Result<FinAbGroup, AbGroupError> {
    let pres = h.matrix.hcat(&AbHom::relation_matrix(&h.target));
    group_from_diagonal(&smith_diagonal(&pres), h.target.len())
}

/// `ker(h)`, through the lattice `L = { x : M x ∈ relations(target) }`
/// taken modulo the source relations.
pub fn kernel(h: &AbHom) -> Result<FinAbGroup, AbGroupError> {
    let s = h.source.len();
    if s == 0 {
        return Ok(FinAbGroup::trivial());
    }
    let a = h.matrix.hcat(&AbHom::relation_matrix(&h.target));
    let snf = smith_normal_form(&a);
    let r = snf.rank();
    // generators of L: source part of the integer kernel of [M | T]
    let gens: Vec<Vec<BigInt>> = (r..a.cols)
        .map(|j| snf.v.column(j)[..s].to_vec())
        .collect();
    if gens.is_empty() {
        return Ok(FinAbGroup::trivial());
    }
    let g = IntMatrix::from_columns(s, &gens);
    // basis of L: columns d_k · u_inv[:, k], k < rank(G)
    let gsnf = smith_normal_form(&g);
    let diag = gsnf.diagonal();
    let lrank = gsnf.rank();
    // express each source relation s_j e_j in that basis
    let mut rel_cols = Vec::with_capacity(s);
    for (j, &order) in h.source.iter().enumerate() {
        let mut v = vec![BigInt::zero(); s];
        v[j] = BigInt::from(order);
        let uv = gsnf.u.mul_vec(&v);
        let mut coords = Vec::with_capacity(lrank);
        for k in 0..lrank {
            let (q, rem) = uv[k].div_rem(&diag[k]);
            if !rem.is_zero() {
                return Err(AbGroupError::IllFormed("source relation outside kernel lattice".into()));
            }
            coords.push(q);
        }
        if uv[lrank..].iter().any(|x| !x.is_zero()) {
            return Err(AbGroupError::IllFormed("source relation outside kernel lattice".into()));
        }
        rel_cols.push(coords);
    }
    let rel = IntMatrix::from_columns(lrank, &rel_cols);
    let d = if lrank == 0 { Vec::new() } else { smith_diagonal(&rel) };
    group_from_diagonal(&d, lrank)
}

/// Elementary divisors of an integer matrix as a group `Z^cols / rows`
/// style summary: nonzero Smith diagonal entries and the rank.
pub fn rank_and_divisors(m: &IntMatrix) -> (usize, Vec<BigInt>) {
    let d = smith_diagonal(m);
    let nz: Vec<BigInt> = d.into_iter().filter(|x| !x.is_zero()).collect();
    (nz.len(), nz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn check_snf(m: &IntMatrix) {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.d);
        assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(m.rows()));
        let d = snf.diagonal();
        for i in 0..snf.d.rows() {
            for j in 0..snf.d.cols() {
                if i != j {
                    assert!(snf.d[(i, j)].is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero() && w[1].is_multiple_of(&w[0]), "{d:?}");
        }
        assert_eq!(smith_diagonal(m), d);
    }

    #[test]
    fn snf_examples() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![4, 8]]);
        assert_eq!(smith_diagonal(&m), vec![big(2), big(0)]);
        check_snf(&m);
        let id = IntMatrix::identity(3);
        assert_eq!(smith_normal_form(&id).d, id);
        let z = IntMatrix::from_rows(&[vec![0]]);
        assert_eq!(smith_normal_form(&z).d, z);
        check_snf(&IntMatrix::from_rows(&[vec![6, 4, 0], vec![-9, 15, 3]]));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(FinAbGroup::from_cyclic_orders([2, 3]).divisors(), &[6]);
        assert_eq!(FinAbGroup::from_cyclic_orders([4, 2, 1, 0]).divisors(), &[2, 4, 0]);
        assert_eq!(FinAbGroup::from_cyclic_orders([12, 18]).divisors(), &[6, 36]);
        assert!(FinAbGroup::from_cyclic_orders([1, 1]).is_trivial());
        assert_eq!(FinAbGroup::from_cyclic_orders([8, 2, 4]).to_string(), "Z/2 ⊕ Z/4 ⊕ Z/8");
        assert_eq!(FinAbGroup::cyclic(9).order(), Some(BigUint::from(9u32)));
        assert_eq!(FinAbGroup::free(2).order(), None);
        let json = serde_json::to_string(&FinAbGroup::from_cyclic_orders([2, 4])).unwrap();
        assert_eq!(json, r#"{"divisors":[2,4]}"#);
    }

    #[test]
    fn cokernel_examples() {
        let h = AbHom::new(vec![2], vec![4], IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert_eq!(cokernel(&h).unwrap(), FinAbGroup::cyclic(2));
        let h = AbHom::new(vec![6], vec![6], IntMatrix::identity(1)).unwrap();
        assert!(cokernel(&h).unwrap().is_trivial());
        let h = AbHom::new(vec![4], vec![8, 2], IntMatrix::from_rows(&[vec![2], vec![0]])).unwrap();
        assert_eq!(cokernel(&h).unwrap().divisors(), &[2, 2]);
    }

    #[test]
    fn kernel_examples() {
        let h = AbHom::new(vec![2, 2], vec![2], IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        assert_eq!(kernel(&h).unwrap(), FinAbGroup::cyclic(2));
        let h = AbHom::new(vec![2], vec![4], IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert!(kernel(&h).unwrap().is_trivial());
        let h = AbHom::new(vec![4], vec![4], IntMatrix::from_rows(&[vec![0]])).unwrap();
        assert_eq!(kernel(&h).unwrap(), FinAbGroup::cyclic(4));
        // free source
        let h = AbHom::new(vec![0, 0], vec![0], IntMatrix::from_rows(&[vec![2, 4]])).unwrap();
        assert_eq!(kernel(&h).unwrap(), FinAbGroup::free(1));
        assert_eq!(cokernel(&h).unwrap(), FinAbGroup::cyclic(2));
    }

    #[test]
    fn ill_formed_maps_are_rejected() {
        // Z/2 → Z/3 sending the generator to 1 is not a homomorphism
        assert!(AbHom::new(vec![2], vec![3], IntMatrix::from_rows(&[vec![1]])).is_err());
        assert!(AbHom::new(vec![2], vec![3], IntMatrix::from_rows(&[vec![1, 1]])).is_err());
    }

    /// Brute-force oracle: element enumeration in finite groups.
    struct Finite {
        orders: Vec<u64>,
    }

    impl Finite {
        fn size(&self) -> u64 {
            self.orders.iter().product()
        }

        fn element(&self, mut idx: u64) -> Vec<u64> {
            self.orders
                .iter()
                .map(|&o| {
                    let x = idx % o;
                    idx /= o;
                    x
                })
                .collect()
        }

        fn index(&self, x: &[u64]) -> u64 {
            let mut idx = 0;
            for (v, &o) in x.iter().zip(&self.orders).rev() {
                idx = idx * o + v;
            }
            idx
        }
    }

    fn apply(h: &AbHom, x: &[u64]) -> Vec<u64> {
        (0..h.target.len())
            .map(|i| {
                let t = BigInt::from(h.target[i]);
                let mut acc = BigInt::zero();
                for (j, &xj) in x.iter().enumerate() {
                    acc += &h.matrix[(i, j)] * BigInt::from(xj);
                }
                acc.mod_floor(&t).to_u64().unwrap()
            })
            .collect()
    }

    fn scale(g: &Finite, x: &[u64], k: u64) -> Vec<u64> {
        x.iter().zip(&g.orders).map(|(&v, &o)| (v * k) % o).collect()
    }

    fn brute_kernel_counts(h: &AbHom, ks: &[u64]) -> Vec<u64> {
        let src = Finite { orders: h.source.clone() };
        let kernel: Vec<Vec<u64>> = (0..src.size())
            .map(|i| src.element(i))
            .filter(|x| apply(h, x).iter().all(|&v| v == 0))
            .collect();
        ks.iter()
            .map(|&k| kernel.iter().filter(|x| scale(&src, x, k).iter().all(|&v| v == 0)).count() as u64)
            .collect()
    }

    fn brute_cokernel_counts(h: &AbHom, ks: &[u64]) -> Vec<u64> {
        let tgt = Finite { orders: h.target.clone() };
        let src = Finite { orders: h.source.clone() };
        let mut in_image = vec![false; tgt.size() as usize];
        for i in 0..src.size() {
            in_image[tgt.index(&apply(h, &src.element(i))) as usize] = true;
        }
        let image_size = in_image.iter().filter(|&&b| b).count() as u64;
        ks.iter()
            .map(|&k| {
                let hits = (0..tgt.size())
                    .filter(|&i| in_image[tgt.index(&scale(&tgt, &tgt.element(i), k)) as usize])
                    .count() as u64;
                hits / image_size
            })
            .collect()
    }

    fn arb_hom() -> impl Strategy<Value = AbHom> {
        let orders = prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 9]);
        (
            proptest::collection::vec(orders.clone(), 1..4),
            proptest::collection::vec(orders, 1..4),
        )
            .prop_filter("small groups", |(s, t)| {
                s.iter().product::<u64>() <= 1024 && t.iter().product::<u64>() <= 1024
            })
            .prop_flat_map(|(s, t)| {
                let n = s.len() * t.len();
                (Just(s), Just(t), proptest::collection::vec(0u64..72, n))
            })
            .prop_map(|(s, t, raw)| {
                let mut m = IntMatrix::zeros(t.len(), s.len());
                for i in 0..t.len() {
                    for j in 0..s.len() {
                        let step = t[i] / t[i].gcd(&s[j]);
                        m[(i, j)] = BigInt::from((raw[i * s.len() + j] * step) % t[i]);
                    }
                }
                AbHom::new(s, t, m).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn kernel_and_cokernel_match_enumeration(h in arb_hom()) {
            let ks: Vec<u64> = (1..=72).collect();
            let coker = cokernel(&h).unwrap();
            let ker = kernel(&h).unwrap();
            let coker_counts: Vec<u64> = ks.iter().map(|&k| coker.count_killed_by(k).to_u64().unwrap()).collect();
            let ker_counts: Vec<u64> = ks.iter().map(|&k| ker.count_killed_by(k).to_u64().unwrap()).collect();
            prop_assert_eq!(coker_counts, brute_cokernel_counts(&h, &ks));
            prop_assert_eq!(ker_counts, brute_kernel_counts(&h, &ks));
            // |source| = |ker| |im|, |target| = |im| |coker|
            let src = h.source_group().order().unwrap();
            let tgt = h.target_group().order().unwrap();
            prop_assert_eq!(src * coker.order().unwrap(), tgt * ker.order().unwrap());
        }

        #[test]
        fn snf_is_valid_and_permutation_invariant(
            rows in proptest::collection::vec(proptest::collection::vec(-20i64..20, 3), 1..5),
            perm_seed in 0usize..6,
        ) {
            let m = IntMatrix::from_rows(&rows);
            check_snf(&m);
            let mut permuted = rows.clone();
            permuted.rotate_left(perm_seed % rows.len());
            for r in permuted.iter_mut() {
                r.swap(0, perm_seed % 3);
            }
            prop_assert_eq!(smith_diagonal(&m), smith_diagonal(&IntMatrix::from_rows(&permuted)));
        }
    }
}
