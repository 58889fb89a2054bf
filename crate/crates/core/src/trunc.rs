//! Truncation sets and the word truncation posets `S_n(a, N)`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::words::{canonical_form, for_each_block_necklace, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruncError {
    #[error("{b} does not divide {a}")]
    DivisibilityError { a: usize, b: usize },
    #[error("set is not closed under divisors: {missing} divides {member} but is absent")]
    NotDivisorClosed { member: u64, missing: u64 },
    #[error("truncation sets contain positive integers only")]
    NonPositive,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A finite set of positive integers closed under taking divisors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncationSet {
    elements: Vec<u64>,
}

impl TruncationSet {
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<Self, TruncError> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if elements.first() == Some(&0) {
            return Err(TruncError::NonPositive);
        }
        for &m in &elements {
            for d in divisors(m) {
                if elements.binary_search(&d).is_err() {
                    return Err(TruncError::NotDivisorClosed { member: m, missing: d });
                }
            }
        }
        Ok(TruncationSet { elements })
    }

    /// `{1, ..., n}`.
    pub fn initial(n: u64) -> Self {
        TruncationSet { elements: (1..=n).collect() }
    }

    pub fn empty() -> Self {
        TruncationSet { elements: Vec::new() }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, m: u64) -> bool {
        self.elements.binary_search(&m).is_ok()
    }

    pub fn index_of(&self, m: u64) -> Option<usize> {
        self.elements.binary_search(&m).ok()
    }

    pub fn max(&self) -> u64 {
        self.elements.last().copied().unwrap_or(0)
    }

    /// `S / r = { s : r s ∈ S }`.
    pub fn quotient(&self, r: u64) -> TruncationSet {
        TruncationSet {
            elements: self
                .elements
                .iter()
                .filter(|&&m| m % r == 0)
                .map(|&m| m / r)
                .collect(),
        }
    }

    /// True when every element of `self` is in `other`.
    pub fn is_subset(&self, other: &TruncationSet) -> bool {
        self.elements.iter().all(|&m| other.contains(m))
    }
}

/// Positive divisors of `m` in increasing order.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// One component `S_n(a,N)[w] ≅ {1, ..., size}` labeled by an irreducible
/// `a`-class `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    #[serde(serialize_with = "serialize_word")]
    pub label: Word,
    pub size: usize,
}

fn serialize_word<S: serde::Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

impl Component {
    pub fn set(&self) -> TruncationSet {
        TruncationSet::initial(self.size as u64)
    }
}

/// The truncation poset `S_n(a, N)` of `a`-classes of words of length at
/// most `N`, split into components by irreducible root. Components are
/// ordered by label length, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationPoset {
    pub n: u8,
    pub block: usize,
    pub max_len: usize,
    pub components: Vec<Component>,
    #[serde(skip)]
    index: HashMap<Word, usize>,
}

impl TruncationPoset {
    /// Total number of elements `Σ size`.
    pub fn total(&self) -> usize {
        self.components.iter().map(|c| c.size).sum()
    }

    pub fn component_of(&self, label: &Word) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub fn build_poset(n: u8, a: usize, max_len: usize) -> Result<TruncationPoset, TruncError> {
    if n == 0 {
        return Err(WordError::EmptyAlphabet.into());
    }
    if a == 0 {
        return Err(WordError::ZeroBlock.into());
    }
    let mut components = Vec::new();
    for blocks in 1..=max_len / a {
        let len = blocks * a;
        let size = max_len / len;
        for_each_block_necklace(n, a, blocks, |letters, period| {
            if period == 1 {
                components.push(Component { label: Word::from_valid(n, letters.to_vec()), size });
            }
        });
    }
    let index = components.iter().enumerate().map(|(i, c)| (c.label.clone(), i)).collect();
    Ok(TruncationPoset { n, block: a, max_len, components, index })
}

/// Image of source component `source` under `v_a^b`: the component `target`
/// of `S_n(b, N)`, with `u^e ↦ root^(ratio * e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Route {
    pub source: usize,
    pub target: usize,
    pub ratio: usize,
}

#[derive(Debug, Clone)]
pub struct ComponentMap {
    pub source: TruncationPoset,
    pub target: TruncationPoset,
    pub routes: Vec<Route>,
}

impl ComponentMap {
    /// Routes grouped by target component, in target order.
    pub fn by_target(&self) -> Vec<Vec<Route>> {
        let mut grouped = vec![Vec::new(); self.target.len()];
        for r in &self.routes {
            grouped[r.target].push(*r);
        }
        grouped
    }
}

/// Component routing of the poset map `v_a^b : S_n(a,N) → S_n(b,N)`.
pub fn vmap_components(n: u8, a: usize, b: usize, max_len: usize) -> Result<ComponentMap, TruncError> {
    if b == 0 || a % b != 0 {
        return Err(TruncError::DivisibilityError { a, b });
    }
    let source = build_poset(n, a, max_len)?;
    let target = build_poset(n, b, max_len)?;
    let routes = source
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let image = canonical_form(&c.label, b)?;
            let target_idx = target
                .component_of(&image.root())
                .expect("root of an admissible class is a component label");
            Ok(Route { source: i, target: target_idx, ratio: image.period })
        })
        .collect::<Result<Vec<_>, TruncError>>()?;
    Ok(ComponentMap { source, target, routes })
}
