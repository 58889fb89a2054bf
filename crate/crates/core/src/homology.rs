//! Reduced integral homology of `X_{s,a}`, the quotient of the
//! (s−1)-simplex by the `C_s`-orbit of its (s−a)-face.
//!
//! Non-degenerate simplices are tensor monomials
//! `x^{k0'} x_0 x^{k0''} ⊗ x^{k1} ⊗ … ⊗ x^{ke}` with exponents summing to
//! `s − 1`, `k0' + 1 + k0'' < a` and `1 ≤ ki < a`. Faces multiply adjacent
//! factors (the last one wraps around to the left of `x_0`); a face that
//! leaves this range hits the basepoint and is dropped. Degree-0 chains are
//! the vertices other than the basepoint, so the complex computes reduced
//! homology directly.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::abgroup::{smith_diagonal, FinAbGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub k0_left: usize,
    pub k0_right: usize,
    pub ks: Vec<usize>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.ks.len()
    }

    pub fn is_admissible(&self, s: usize, a: usize) -> bool {
        self.k0_left + self.k0_right + self.ks.iter().sum::<usize>() + 1 == s
            && self.k0_left + 1 + self.k0_right < a
            && self.ks.iter().all(|&k| (1..a).contains(&k))
    }

    /// Face `d_i`, or `None` when it collapses to the basepoint.
    fn face(&self, i: usize, a: usize) -> Option<Monomial> {
        let e = self.ks.len();
        let mut m = self.clone();
        if i == 0 {
            let k = m.ks.remove(0);
            m.k0_right += k;
        } else if i == e {
            let k = m.ks.pop().expect("e ≥ 1");
            m.k0_left += k;
        } else {
            let k = m.ks.remove(i);
            m.ks[i - 1] += k;
        }
        let ok = m.k0_left + 1 + m.k0_right < a && m.ks.iter().all(|&k| k < a);
        ok.then_some(m)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn power(f: &mut std::fmt::Formatter<'_>, k: usize) -> std::fmt::Result {
            match k {
                0 => Ok(()),
                1 => write!(f, "x"),
                _ => write!(f, "x^{k}"),
            }
        }
        power(f, self.k0_left)?;
        write!(f, "x0")?;
        power(f, self.k0_right)?;
        for &k in &self.ks {
            write!(f, "⊗")?;
            power(f, k)?;
        }
        Ok(())
    }
}

fn compositions(total: usize, parts: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if total < parts || total > parts.saturating_mul(max) {
        return;
    }
    for k in 1..=max.min(total) {
        prefix.push(k);
        compositions(total - k, parts - 1, max, prefix, out);
        prefix.pop();
    }
}

/// Admissible monomials with `e` factors after the `x_0` block, in
/// lexicographic order of `(k0_left, k0_right, ks)`.
pub fn basis(s: usize, a: usize, e: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    if s == 0 || a < 2 {
        return out;
    }
    for k0_left in 0..a - 1 {
        for k0_right in 0..a - 1 - k0_left {
            let Some(rest) = (s - 1).checked_sub(k0_left + k0_right) else { continue };
            let mut tails = Vec::new();
            compositions(rest, e, a - 1, &mut Vec::new(), &mut tails);
            out.extend(tails.into_iter().map(|ks| Monomial { k0_left, k0_right, ks }));
        }
    }
    out
}

/// Matrix of `∂ = Σ (−1)^i d_i` from degree `e` to degree `e − 1`.
pub fn boundary_matrix(s: usize, a: usize, e: usize) -> IntMatrix {
    let src = basis(s, a, e);
    let tgt = if e == 0 { Vec::new() } else { basis(s, a, e - 1) };
    let mut m = IntMatrix::zeros(tgt.len(), src.len());
    if e == 0 {
        return m;
    }
    let index: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, x)| (x, i)).collect();
    for (j, mono) in src.iter().enumerate() {
        for i in 0..=e {
            if let Some(face) = mono.face(i, a) {
                let row = index[&face];
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                m[(row, j)] += sign;
            }
        }
    }
    m
}

/// Highest degree carrying chains.
fn top_degree(s: usize) -> usize {
    s.saturating_sub(1)
}

fn rank_and_torsion(m: &IntMatrix) -> (usize, Vec<u64>) {
    let d = smith_diagonal(m);
    let nz: Vec<&BigInt> = d.iter().filter(|x| !x.is_zero()).collect();
    let torsion = nz
        .iter()
        .filter(|x| !x.is_one())
        .map(|x| u64::try_from(*x).expect("torsion fits in u64"))
        .collect();
    (nz.len(), torsion)
}

/// Reduced integral homology, indexed by degree `0..=s−1`.
pub fn homology(s: usize, a: usize) -> Vec<FinAbGroup> {
    let top = top_degree(s);
    let dims: Vec<usize> = (0..=top + 1).map(|e| basis(s, a, e).len()).collect();
    let ranks: Vec<(usize, Vec<u64>)> = (0..=top + 1).map(|e| rank_and_torsion(&boundary_matrix(s, a, e))).collect();
    (0..=top)
        .map(|e| {
            let free = dims[e] - ranks[e].0 - ranks[e + 1].0;
            let torsion = ranks[e + 1].1.iter().copied();
            FinAbGroup::from_cyclic_orders(torsion.chain(std::iter::repeat(0).take(free)))
        })
        .collect()
}

pub fn reduced_euler_characteristic(s: usize, a: usize) -> i64 {
    (0..=top_degree(s))
        .map(|e| {
            let n = basis(s, a, e).len() as i64;
            if e % 2 == 0 { n } else { -n }
        })
        .sum()
}

/// The explicit cycles: one cycle in degree `2d` when `a ∤ s`, and
/// `a − 1` cycles in degree `2d + 1` when `a | s`, with `d = ⌊(s−1)/a⌋`.
pub fn iota_cycles(s: usize, a: usize) -> (usize, Vec<Vec<Monomial>>) {
    let d = (s - 1) / a;
    if s % a != 0 {
        // x0 x^{k0''} ⊗ x ⊗ x^{k2} ⊗ … ⊗ x ⊗ x^{k2d}, k0'' + Σ k2i = s − d − 1
        let mut terms = Vec::new();
        let total = s - d - 1;
        for k0_right in 0..=total {
            let mut tails = Vec::new();
            compositions(total - k0_right, d, usize::MAX, &mut Vec::new(), &mut tails);
            for evens in tails {
                let ks = evens.iter().flat_map(|&k| [1, k]).collect();
                let m = Monomial { k0_left: 0, k0_right, ks };
                if m.is_admissible(s, a) {
                    terms.push(m);
                }
            }
        }
        (2 * d, vec![terms])
    } else {
        let cycles = (0..=a - 2)
            .map(|i| {
                let mut ks: Vec<usize> = (0..d).flat_map(|_| [1, a - 1]).collect();
                ks.push(1);
                vec![Monomial { k0_left: i, k0_right: a - i - 2, ks }]
            })
            .collect();
        (2 * d + 1, cycles)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IotaReport {
    pub s: usize,
    pub a: usize,
    pub degree: usize,
    pub cycles: Vec<Vec<String>>,
    pub are_cycles: bool,
    pub generate: bool,
    pub passed: bool,
}

/// Checks that the explicit chains are cycles and that, together with the
/// boundaries, they span all cycles in their degree. Since the cycle lattice
/// is saturated, this holds iff the spanning matrix has full rank with all
/// elementary divisors equal to 1.
pub fn iota_check(s: usize, a: usize) -> IotaReport {
    let (degree, chains) = iota_cycles(s, a);
    let cells = basis(s, a, degree);
    let index: HashMap<&Monomial, usize> = cells.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let vectors: Vec<Vec<BigInt>> = chains
        .iter()
        .map(|terms| {
            let mut v = vec![BigInt::zero(); cells.len()];
            for t in terms {
                v[index[t]] += 1;
            }
            v
        })
        .collect();
    let d = boundary_matrix(s, a, degree);
    let are_cycles = vectors
        .iter()
        .all(|v| !v.iter().all(Zero::is_zero) && d.mul_vec(v).iter().all(Zero::is_zero));
    let (rank_d, _) = rank_and_torsion(&d);
    let cycle_rank = cells.len() - rank_d;
    let up = boundary_matrix(s, a, degree + 1);
    let span = up.hcat(&IntMatrix::from_columns(cells.len(), &vectors));
    let diag = smith_diagonal(&span);
    let nz: Vec<&BigInt> = diag.iter().filter(|x| !x.is_zero()).collect();
    let generate = nz.len() == cycle_rank && nz.iter().all(|x| x.is_one());
    let cycles = chains
        .iter()
        .map(|terms| terms.iter().map(ToString::to_string).collect())
        .collect();
    IotaReport { s, a, degree, cycles, are_cycles, generate, passed: are_cycles && generate }
}

/// The predicted reduced homology: `Z` in degree `2d` when `a ∤ s`,
/// `Z^{a−1}` in degree `2d+1` when `a | s`, zero elsewhere.
pub fn expected_homology(s: usize, a: usize) -> Vec<FinAbGroup> {
    let d = (s - 1) / a;
    let (deg, rank) = if s % a != 0 { (2 * d, 1) } else { (2 * d + 1, a - 1) };
    (0..=top_degree(s))
        .map(|e| if e == deg { FinAbGroup::free(rank) } else { FinAbGroup::trivial() })
        .collect()
}
