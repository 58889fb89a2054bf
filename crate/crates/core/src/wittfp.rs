//! `W_n(F_p)` as a finite abelian group, matrices of Verschiebung maps in
//! that presentation, and the relative K-groups of `F_p⟨x_1..x_n⟩/(m^a)`.
//!
//! `W_n(F_p) ≅ ⊕_{p ∤ d ≤ n} Z/p^{c(n,d)}` with `c(n,d) = #{i : d p^i ≤ n}`.
//! The d-component of `x` is read off the p-typical part of `F_d x`: there
//! the bottom coordinate of `y` equals that of the integer `y_1 · 1`, and
//! `y − y_1 · 1 = V(z) = p · z` over `F_p`, so the residue is decoded one
//! p-adic digit at a time.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::abgroup::{cokernel, kernel, AbGroupError, AbHom, FinAbGroup, IntMatrix};
use crate::trunc::{vmap_components, TruncError, TruncationSet};
use crate::witt::{is_prime, verschiebung, CoefficientRing, WittError, WittVector};
use crate::words::for_each_block_necklace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WittFpError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameters: {0}")]
    ParameterError(String),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
    #[error(transparent)]
    Group(#[from] AbGroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub d: u64,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WittFpStructure {
    pub n: u64,
    pub p: u64,
    pub summands: Vec<Summand>,
    pub group: FinAbGroup,
}

impl WittFpStructure {
    /// Cyclic orders `p^c` of the generators, in summand order.
    pub fn orders(&self) -> Vec<u64> {
        self.summands.iter().map(|s| self.p.pow(s.exponent)).collect()
    }
}

fn check_prime(p: u64) -> Result<(), WittFpError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(WittFpError::NotPrime(p))
    }
}

fn exponent(n: u64, d: u64, p: u64) -> u32 {
    let mut c = 0;
    let mut m = d;
    while m <= n {
        c += 1;
        m *= p;
    }
    c
}

pub fn structure(n: u64, p: u64) -> Result<WittFpStructure, WittFpError> {
    check_prime(p)?;
    let summands: Vec<Summand> = (1..=n)
        .filter(|d| d % p != 0)
        .map(|d| Summand { d, exponent: exponent(n, d, p) })
        .collect();
    let group = FinAbGroup::from_cyclic_orders(summands.iter().map(|s| p.pow(s.exponent)));
    Ok(WittFpStructure { n, p, summands, group })
}

fn p_typical(c: u32, p: u64) -> TruncationSet {
    TruncationSet::new((0..c).map(|i| p.pow(i))).expect("powers of p are divisor-closed")
}

/// Residue in `Z/p^c` of a p-typical vector on `{1, p, …, p^{c−1}}`.
fn decode_p_typical(mut y: WittVector, p: u64) -> Result<u64, WittFpError> {
    let ring = y.ring();
    let mut value = 0u64;
    let mut weight = 1u64;
    while !y.trunc().is_empty() {
        let digit = y.coords()[0].to_integer();
        value += digit.to_u64().expect("residue below p") * weight;
        weight *= p;
        let rest = y.sub(&WittVector::integer(ring, &digit, y.trunc().clone())?)?;
        debug_assert!(rest.coords()[0].is_zero());
        let shorter = p_typical(rest.trunc().len() as u32 - 1, p);
        y = WittVector::new(ring, shorter, rest.coords()[1..].to_vec())?;
    }
    Ok(value)
}

fn check_fp_vector(x: &WittVector, p: u64) -> Result<u64, WittFpError> {
    if x.ring() != CoefficientRing::PrimeField(p) {
        return Err(WittError::IncompatibleOperands.into());
    }
    let n = x.trunc().max();
    if *x.trunc() != TruncationSet::initial(n) {
        return Err(WittError::TruncationMismatch("expected an initial segment {1..n}".into()).into());
    }
    Ok(n)
}

/// Coordinates of `x ∈ W_n(F_p)` in `⊕_d Z/p^{c(n,d)}`, in summand order.
pub fn decompose(x: &WittVector) -> Result<Vec<u64>, WittFpError> {
    let p = match x.ring() {
        CoefficientRing::PrimeField(p) => p,
        _ => return Err(WittError::IncompatibleOperands.into()),
    };
    let n = check_fp_vector(x, p)?;
    let st = structure(n, p)?;
    st.summands
        .iter()
        .map(|s| {
            let y = x.frobenius(s.d)?.restrict(&p_typical(s.exponent, p))?;
            decode_p_typical(y, p)
        })
        .collect()
}

/// Inverse of [`decompose`]: `Σ_d c_d V_d[1]`, with the `c_d` solved along
/// the divisibility order (`decompose(V_d[1])` is `d` at every multiple of
/// `d` and `0` elsewhere).
pub fn encode(n: u64, p: u64, residues: &[u64]) -> Result<WittVector, WittFpError> {
    let st = structure(n, p)?;
    if residues.len() != st.summands.len() {
        return Err(WittFpError::ParameterError(format!(
            "{} residues for {} summands",
            residues.len(),
            st.summands.len()
        )));
    }
    let ring = CoefficientRing::PrimeField(p);
    let set = TruncationSet::initial(n);
    let mut coeffs: Vec<BigInt> = Vec::with_capacity(residues.len());
    let mut x = WittVector::zero(ring, set.clone());
    for (k, s) in st.summands.iter().enumerate() {
        let modulus = BigInt::from(p.pow(s.exponent));
        let mut rhs = BigInt::from(residues[k]);
        for (j, t) in st.summands[..k].iter().enumerate() {
            if s.d % t.d == 0 {
                rhs -= &coeffs[j] * BigInt::from(t.d);
            }
        }
        let inv = BigInt::from(s.d).extended_gcd(&modulus).x;
        let c = (rhs * inv).mod_floor(&modulus);
        let mut basis = vec![BigRational::zero(); n as usize];
        basis[s.d as usize - 1] = BigRational::from_integer(1.into());
        let vd = WittVector::new(ring, set.clone(), basis)?;
        x = x.add(&vd.scale(&c)?)?;
        coeffs.push(c);
    }
    Ok(x)
}

type VKey = (u64, u64, u64, u64);

fn v_cache() -> &'static Mutex<HashMap<VKey, AbHom>> {
    static CACHE: OnceLock<Mutex<HashMap<VKey, AbHom>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Matrix of `V_r : W_m(F_p) → W_M(F_p)` between the generator bases of
/// [`structure`]. Source coordinates above `⌊M/r⌋` are discarded first.
pub fn verschiebung_matrix(r: u64, m: u64, big_m: u64, p: u64) -> Result<AbHom, WittFpError> {
    check_prime(p)?;
    if r == 0 {
        return Err(WittFpError::ParameterError("r must be positive".into()));
    }
    if m < big_m / r {
        return Err(WittFpError::ParameterError(format!(
            "V_{r} from W_{m} does not reach W_{big_m}"
        )));
    }
    let key = (r, m, big_m, p);
    if let Some(h) = v_cache().lock().expect("cache").get(&key) {
        return Ok(h.clone());
    }
    let src = structure(m, p)?;
    let tgt = structure(big_m, p)?;
    let target_set = TruncationSet::initial(big_m);
    let landing = target_set.quotient(r);
    let mut columns = Vec::with_capacity(src.summands.len());
    for k in 0..src.summands.len() {
        let mut unit = vec![0u64; src.summands.len()];
        unit[k] = 1;
        let g = encode(m, p, &unit)?.restrict(&landing)?;
        let image = decompose(&verschiebung(r, &g, &target_set)?)?;
        columns.push(image.into_iter().map(BigInt::from).collect::<Vec<_>>());
    }
    let h = AbHom::new(src.orders(), tgt.orders(), IntMatrix::from_columns(tgt.summands.len(), &columns))?;
    v_cache().lock().expect("cache").insert(key, h.clone());
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: u8,
    pub a: usize,
    pub q: usize,
    pub p: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathReport {
    #[serde(rename = "K_odd")]
    pub odd: FinAbGroup,
    #[serde(rename = "K_even")]
    pub even: FinAbGroup,
}

/// Contribution of one aperiodic necklace to the closed-form answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NecklaceTerm {
    pub word: String,
    pub length: usize,
    pub g: usize,
    #[serde(rename = "K_odd")]
    pub odd: FinAbGroup,
    #[serde(rename = "K_even")]
    pub even: FinAbGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KGroupReport {
    pub params: Params,
    #[serde(rename = "K_odd")]
    pub odd: FinAbGroup,
    #[serde(rename = "K_even")]
    pub even: FinAbGroup,
    pub theorem_path: PathReport,
    pub corollary_path: PathReport,
    pub crosscheck: bool,
    pub per_necklace: Vec<NecklaceTerm>,
}

fn check_params(a: usize, q: usize, p: u64) -> Result<(), WittFpError> {
    check_prime(p)?;
    if a < 2 {
        return Err(WittFpError::ParameterError(format!("a must be at least 2, got {a}")));
    }
    if q < 1 {
        return Err(WittFpError::ParameterError("q must be positive".into()));
    }
    Ok(())
}

/// Kernel and cokernel of a map into one target component: the sources are
/// `(ratio, size)` pairs, the target is `W_M`.
fn fiber_groups(sources: &[(u64, u64)], big_m: u64, p: u64) -> Result<(FinAbGroup, FinAbGroup), WittFpError> {
    let tgt = structure(big_m, p)?;
    let mut src_orders = Vec::new();
    let mut columns: Vec<Vec<BigInt>> = Vec::new();
    for &(ratio, size) in sources {
        let h = verschiebung_matrix(ratio, size, big_m, p)?;
        src_orders.extend_from_slice(h.source_orders());
        for j in 0..h.matrix().cols() {
            columns.push(h.matrix().column(j));
        }
    }
    let h = AbHom::new(src_orders, tgt.orders(), IntMatrix::from_columns(tgt.summands.len(), &columns))?;
    Ok((kernel(&h)?, cokernel(&h)?))
}

/// Kernel and cokernel of `V_a^1 : W_{S_n(a,aq)}(F_p) → W_{S_n(1,aq)}(F_p)`.
///
/// The map is block diagonal over target components; blocks are grouped by
/// their shape (target size and multiset of incoming `(ratio, size)`), each
/// distinct shape is reduced once.
pub fn theorem_path(n: u8, a: usize, q: usize, p: u64) -> Result<PathReport, WittFpError> {
    check_params(a, q, p)?;
    let big_n = a * q;
    let map = vmap_components(n, a, 1, big_n)?;
    let mut shapes: HashMap<(u64, Vec<(u64, u64)>), usize> = HashMap::new();
    for (t, routes) in map.by_target().into_iter().enumerate() {
        let mut sources: Vec<(u64, u64)> = routes
            .iter()
            .map(|r| (r.ratio as u64, map.source.components[r.source].size as u64))
            .collect();
        sources.sort_unstable();
        *shapes.entry((map.target.components[t].size as u64, sources)).or_default() += 1;
    }
    let mut shapes: Vec<_> = shapes.into_iter().collect();
    shapes.sort();
    let parts = shapes
        .par_iter()
        .map(|((big_m, sources), count)| {
            fiber_groups(sources, *big_m, p).map(|(k, c)| (k, c, *count))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for (k, c, count) in parts {
        for _ in 0..count {
            even.extend_from_slice(k.divisors());
            odd.extend_from_slice(c.divisors());
        }
    }
    Ok(PathReport {
        odd: FinAbGroup::from_cyclic_orders(odd),
        even: FinAbGroup::from_cyclic_orders(even),
    })
}

/// Same groups, from the full block matrix of `V_a^1` in one piece. Only
/// sensible for small parameters; used to validate the blockwise reduction.
pub fn theorem_path_dense(n: u8, a: usize, q: usize, p: u64) -> Result<PathReport, WittFpError> {
    check_params(a, q, p)?;
    let big_n = a * q;
    let map = vmap_components(n, a, 1, big_n)?;
    let tgt_struct: Vec<WittFpStructure> = map
        .target
        .components
        .iter()
        .map(|c| structure(c.size as u64, p))
        .collect::<Result<_, _>>()?;
    let mut offsets = Vec::with_capacity(tgt_struct.len());
    let mut rows = 0;
    let mut tgt_orders = Vec::new();
    for st in &tgt_struct {
        offsets.push(rows);
        rows += st.summands.len();
        tgt_orders.extend(st.orders());
    }
    let mut src_orders = Vec::new();
    let mut columns = Vec::new();
    for route in &map.routes {
        let size = map.source.components[route.source].size as u64;
        let big_m = map.target.components[route.target].size as u64;
        let h = verschiebung_matrix(route.ratio as u64, size, big_m, p)?;
        src_orders.extend_from_slice(h.source_orders());
        for j in 0..h.matrix().cols() {
            let mut col = vec![BigInt::zero(); rows];
            for (i, x) in h.matrix().column(j).into_iter().enumerate() {
                col[offsets[route.target] + i] = x;
            }
            columns.push(col);
        }
    }
    let h = AbHom::new(src_orders, tgt_orders, IntMatrix::from_columns(rows, &columns))?;
    Ok(PathReport { odd: cokernel(&h)?, even: kernel(&h)? })
}

/// Per-length contribution of an aperiodic necklace of length `len`.
fn necklace_groups(len: usize, a: usize, q: usize, p: u64) -> Result<(usize, FinAbGroup, FinAbGroup), WittFpError> {
    let g = len.gcd(&a);
    let small = (g * q / len) as u64;
    let big = (a * q / len) as u64;
    let odd = if small == 0 {
        structure(big, p)?.group
    } else {
        cokernel(&verschiebung_matrix((a / g) as u64, small, big, p)?)?
    };
    let copy = structure(small, p)?.group;
    let even = FinAbGroup::direct_sum(std::iter::repeat(&copy).take(g - 1));
    Ok((g, odd, even))
}

/// Closed form: a sum over aperiodic necklaces `w` of length `ℓ ≤ aq`, with
/// `g = gcd(a, ℓ)`, of `coker(V_{a/g} : W_{⌊gq/ℓ⌋} → W_{⌊aq/ℓ⌋})` in odd
/// degree and `g − 1` copies of `W_{⌊gq/ℓ⌋}` in even degree.
pub fn corollary_path(n: u8, a: usize, q: usize, p: u64) -> Result<(PathReport, Vec<NecklaceTerm>), WittFpError> {
    check_params(a, q, p)?;
    let big_n = a * q;
    let by_len = (1..=big_n)
        .map(|len| necklace_groups(len, a, q, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut terms = Vec::new();
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for len in 1..=big_n {
        let (g, o, e) = &by_len[len - 1];
        for_each_block_necklace(n, 1, len, |letters, period| {
            if period != 1 {
                return;
            }
            let word = letters.iter().map(|&l| format!("x{l}")).collect::<String>();
            odd.extend_from_slice(o.divisors());
            even.extend_from_slice(e.divisors());
            terms.push(NecklaceTerm { word, length: len, g: *g, odd: o.clone(), even: e.clone() });
        });
    }
    let report = PathReport {
        odd: FinAbGroup::from_cyclic_orders(odd),
        even: FinAbGroup::from_cyclic_orders(even),
    };
    Ok((report, terms))
}

pub fn kgroups_fp(n: u8, a: usize, q: usize, p: u64) -> Result<KGroupReport, WittFpError> {
    check_params(a, q, p)?;
    if n == 0 {
        return Err(WittFpError::ParameterError("n must be positive".into()));
    }
    let (theorem, corollary) = rayon::join(|| theorem_path(n, a, q, p), || corollary_path(n, a, q, p));
    let theorem = theorem?;
    let (corollary, per_necklace) = corollary?;
    let crosscheck = theorem == corollary;
    Ok(KGroupReport {
        params: Params { n, a, q, p },
        odd: theorem.odd.clone(),
        even: theorem.even.clone(),
        theorem_path: theorem,
        corollary_path: corollary,
        crosscheck,
        per_necklace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn fp(p: u64, n: u64, coords: &[i64]) -> WittVector {
        WittVector::from_ints(CoefficientRing::PrimeField(p), TruncationSet::initial(n), coords).unwrap()
    }

    fn all_vectors(p: u64, n: u64) -> Vec<WittVector> {
        let total = p.pow(n as u32);
        (0..total)
            .map(|mut k| {
                let coords: Vec<i64> = (0..n)
                    .map(|_| {
                        let c = (k % p) as i64;
                        k /= p;
                        c
                    })
                    .collect();
                fp(p, n, &coords)
            })
            .collect()
    }

    #[test]
    fn structure_examples() {
        let s = structure(2, 2).unwrap();
        assert_eq!(s.summands, vec![Summand { d: 1, exponent: 2 }]);
        assert_eq!(s.group, FinAbGroup::cyclic(4));
        let s = structure(3, 3).unwrap();
        assert_eq!(s.summands, vec![Summand { d: 1, exponent: 2 }, Summand { d: 2, exponent: 1 }]);
        assert_eq!(s.group, FinAbGroup::from_cyclic_orders([9, 3]));
        assert!(structure(0, 5).unwrap().group.is_trivial());
        assert_eq!(structure(3, 4), Err(WittFpError::NotPrime(4)));
        for n in 0..=20 {
            for p in [2, 3, 5, 7] {
                let s = structure(n, p).unwrap();
                assert_eq!(s.summands.iter().map(|x| x.exponent as u64).sum::<u64>(), n);
            }
        }
    }

    #[test]
    fn decompose_examples() {
        for (p, n) in [(2, 5), (3, 4), (5, 3)] {
            let one = WittVector::one(CoefficientRing::PrimeField(p), TruncationSet::initial(n));
            assert!(decompose(&one).unwrap().iter().all(|&m| m == 1));
            let zero = WittVector::zero(CoefficientRing::PrimeField(p), TruncationSet::initial(n));
            assert!(decompose(&zero).unwrap().iter().all(|&m| m == 0));
        }
        assert_eq!(decompose(&fp(2, 2, &[0, 1])).unwrap(), vec![2]);
    }

    /// Group exponent and order by brute force over the Witt addition table.
    #[test]
    fn structure_matches_brute_force_orders() {
        for (p, n) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2)] {
            let st = structure(n, p).unwrap();
            let mut counts: HashMap<u64, BigUint> = HashMap::new();
            for x in all_vectors(p, n) {
                // smallest k with k x = 0
                let mut k = 1u64;
                let mut acc = x.clone();
                while !acc.is_zero() {
                    acc = acc.add(&x).unwrap();
                    k += 1;
                }
                for j in 1..=p.pow(n as u32) {
                    if j % k == 0 {
                        *counts.entry(j).or_default() += 1u32;
                    }
                }
            }
            for (j, c) in counts {
                assert_eq!(c, st.group.count_killed_by(j), "p={p} n={n} k={j}");
            }
        }
    }

    #[test]
    fn decompose_is_additive_bijection() {
        for p in [2u64, 3, 5, 7] {
            let mut n = 1;
            while p.pow(n as u32) <= 256 {
                let st = structure(n, p).unwrap();
                let orders = st.orders();
                let all = all_vectors(p, n);
                let codes: Vec<Vec<u64>> = all.iter().map(|x| decompose(x).unwrap()).collect();
                let mut seen = std::collections::HashSet::new();
                for c in &codes {
                    assert!(c.iter().zip(&orders).all(|(v, o)| v < o));
                    assert!(seen.insert(c.clone()), "p={p} n={n} not injective");
                }
                let step = if all.len() > 64 { 7 } else { 1 };
                for i in (0..all.len()).step_by(step) {
                    for j in (0..all.len()).step_by(step) {
                        let s = decompose(&all[i].add(&all[j]).unwrap()).unwrap();
                        let expected: Vec<u64> = codes[i]
                            .iter()
                            .zip(&codes[j])
                            .zip(&orders)
                            .map(|((x, y), o)| (x + y) % o)
                            .collect();
                        assert_eq!(s, expected);
                    }
                }
                for (x, c) in all.iter().zip(&codes) {
                    assert_eq!(&encode(n, p, c).unwrap(), x);
                }
                n += 1;
            }
        }
    }

    #[test]
    fn verschiebung_matrix_examples() {
        let h = verschiebung_matrix(2, 1, 2, 2).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::from_rows(&[vec![2]]));
        assert_eq!(cokernel(&h).unwrap(), FinAbGroup::cyclic(2));
        let h = verschiebung_matrix(1, 2, 2, 2).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::identity(1));
        let h = verschiebung_matrix(2, 2, 4, 2).unwrap();
        assert_eq!(h.source_orders(), &[4]);
        assert_eq!(h.target_orders(), &[8, 2]);
        assert_eq!(h.matrix(), &IntMatrix::from_rows(&[vec![2], vec![0]]));
        assert_eq!(cokernel(&h).unwrap(), FinAbGroup::from_cyclic_orders([2, 2]));
        assert!(verschiebung_matrix(2, 1, 6, 2).is_err());
    }

    #[test]
    fn kgroup_examples() {
        let r = kgroups_fp(1, 2, 1, 2).unwrap();
        assert!(r.crosscheck);
        assert_eq!(r.odd, FinAbGroup::cyclic(2));
        assert!(r.even.is_trivial());
        let r = kgroups_fp(2, 2, 1, 2).unwrap();
        assert!(r.crosscheck);
        assert_eq!(r.odd, FinAbGroup::from_cyclic_orders([2, 2]));
        assert_eq!(r.even, FinAbGroup::cyclic(2));
        let r = kgroups_fp(1, 2, 2, 2).unwrap();
        assert_eq!(r.odd, FinAbGroup::from_cyclic_orders([2, 2]));
        assert!(r.even.is_trivial());
        assert!(matches!(kgroups_fp(1, 1, 1, 2), Err(WittFpError::ParameterError(_))));
        assert!(matches!(kgroups_fp(1, 2, 1, 6), Err(WittFpError::NotPrime(6))));
    }

    #[test]
    fn blockwise_matches_dense_assembly() {
        for (n, a, q, p) in [(1, 2, 2, 2), (2, 2, 1, 2), (2, 2, 2, 2), (2, 3, 1, 3), (2, 4, 1, 2), (3, 2, 1, 3)] {
            assert_eq!(theorem_path(n, a, q, p).unwrap(), theorem_path_dense(n, a, q, p).unwrap());
        }
    }

    #[test]
    fn necklace_terms_cover_every_aperiodic_word() {
        let (_, terms) = corollary_path(2, 2, 2, 2).unwrap();
        // Lyndon words over 2 letters of lengths 1..4: 2 + 1 + 2 + 3
        assert_eq!(terms.len(), 8);
        assert_eq!(terms[0].word, "x1");
        let square = terms.iter().find(|t| t.word == "x1x2").unwrap();
        assert_eq!(square.g, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matrix_agrees_with_direct_shift(
            p in prop::sample::select(vec![2u64, 3, 5]),
            r in 1u64..=4,
            m in 1u64..=4,
            raw in proptest::collection::vec(0i64..5, 4),
        ) {
            let big_m = r * m;
            let x = fp(p, m, &raw[..m as usize]);
            let h = verschiebung_matrix(r, m, big_m, p).unwrap();
            let coords: Vec<BigInt> = decompose(&x).unwrap().into_iter().map(BigInt::from).collect();
            let via_matrix: Vec<u64> = h
                .matrix()
                .mul_vec(&coords)
                .into_iter()
                .zip(h.target_orders())
                .map(|(v, &o)| v.mod_floor(&BigInt::from(o)).to_u64().unwrap())
                .collect();
            let direct = decompose(&verschiebung(r, &x, &TruncationSet::initial(big_m)).unwrap()).unwrap();
            prop_assert_eq!(via_matrix, direct);
        }
    }
}
