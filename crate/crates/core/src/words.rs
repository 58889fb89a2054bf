//! Words over a finite alphabet `x1..xn`, block-cyclic equivalence and
//! necklace enumeration.
//!
//! Two words of length divisible by `a` are `a`-equivalent when one is a
//! cyclic permutation of the other by whole blocks of `a` letters. For
//! `a = 1` the classes are ordinary cyclic words (necklaces).

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("word is empty")]
    EmptyWord,
    #[error("block size {block} does not divide word length {len}")]
    BlockMismatch { len: usize, block: usize },
    #[error("letter x{letter} is outside the alphabet x1..x{n}")]
    LetterOutOfRange { letter: u8, n: u8 },
    #[error("alphabet size must be positive")]
    EmptyAlphabet,
    #[error("block size must be positive")]
    ZeroBlock,
    #[error("expected a cyclic class (block size 1), got block size {0}")]
    NotCyclic(usize),
}

/// A word in the letters `x1..xn`, stored as 1-based letter indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
    n: u8,
}

impl Word {
    pub fn new(n: u8, letters: Vec<u8>) -> Result<Self, WordError> {
        if n == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > n) {
            return Err(WordError::LetterOutOfRange { letter: bad, n });
        }
        Ok(Word { letters, n })
    }

    /// Internal constructor for letter sequences already known to be valid.
    pub(crate) fn from_valid(n: u8, letters: Vec<u8>) -> Self {
        debug_assert!(letters.iter().all(|&l| l >= 1 && l <= n));
        Word { letters, n }
    }

    /// Parses `"x1x2x1"` style notation.
    pub fn parse(n: u8, text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for part in text.split('x').skip(1) {
            let letter: u8 = part
                .parse()
                .map_err(|_| WordError::LetterOutOfRange { letter: 0, n })?;
            letters.push(letter);
        }
        Word::new(n, letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn alphabet(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn pow(&self, e: usize) -> Word {
        Word::from_valid(self.n, self.letters.repeat(e))
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        Word::from_valid(self.n, letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

/// An `a`-equivalence class, represented by its lexicographically least
/// block rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockClass {
    pub canonical: Word,
    pub block: usize,
    /// Largest `e` with `canonical = root^e` and `block | len(root)`.
    pub period: usize,
}

impl BlockClass {
    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn is_irreducible(&self) -> bool {
        self.period == 1
    }

    /// The root `w'` with `canonical = w'^period`.
    pub fn root(&self) -> Word {
        let root_len = self.canonical.len() / self.period;
        Word::from_valid(self.canonical.n, self.canonical.letters[..root_len].to_vec())
    }
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.canonical, self.block)
    }
}

fn check_blocks(len: usize, block: usize) -> Result<(), WordError> {
    if block == 0 {
        return Err(WordError::ZeroBlock);
    }
    if len == 0 {
        return Err(WordError::EmptyWord);
    }
    if len % block != 0 {
        return Err(WordError::BlockMismatch { len, block });
    }
    Ok(())
}

/// Index of the least rotation of a cyclic sequence of `m` symbols, where
/// symbols are compared by `cmp(i, j)`. Linear time two-pointer scan.
fn least_rotation_by(m: usize, mut cmp: impl FnMut(usize, usize) -> Ordering) -> usize {
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < m && j < m && k < m {
        match cmp((i + k) % m, (j + k) % m) {
            Ordering::Equal => k += 1,
            Ordering::Greater => {
                i += k + 1;
                if i <= j {
                    i = j + 1;
                }
                k = 0;
            }
            Ordering::Less => {
                j += k + 1;
                if j <= i {
                    j = i + 1;
                }
                k = 0;
            }
        }
    }
    i.min(j)
}

/// Letter offset of the least block rotation of `letters` viewed as a
/// cyclic sequence of blocks of size `block`, starting at letter `shift`.
fn least_block_offset(doubled: &[u8], len: usize, shift: usize, block: usize) -> usize {
    let m = len / block;
    let start = |k: usize| (shift + k * block) % len;
    let k = least_rotation_by(m, |x, y| {
        let (sx, sy) = (start(x), start(y));
        doubled[sx..sx + block].cmp(&doubled[sy..sy + block])
    });
    start(k)
}

/// Smallest number of blocks `p` dividing `m` with the block sequence
/// `p`-periodic.
fn block_period_len(letters: &[u8], block: usize) -> usize {
    let m = letters.len() / block;
    for p in 1..=m {
        if m % p != 0 {
            continue;
        }
        let shift = p * block;
        if letters[shift..] == letters[..letters.len() - shift] {
            return p;
        }
    }
    m
}

fn doubled(letters: &[u8]) -> Vec<u8> {
    let mut d = Vec::with_capacity(2 * letters.len());
    d.extend_from_slice(letters);
    d.extend_from_slice(letters);
    d
}

pub fn canonical_form(w: &Word, block: usize) -> Result<BlockClass, WordError> {
    check_blocks(w.len(), block)?;
    let len = w.len();
    let d = doubled(&w.letters);
    let off = least_block_offset(&d, len, 0, block);
    let canonical = d[off..off + len].to_vec();
    let p = block_period_len(&canonical, block);
    Ok(BlockClass {
        canonical: Word::from_valid(w.n, canonical),
        block,
        period: len / (p * block),
    })
}

/// Returns `(root, e)` with `w` equivalent to `root^e`, `e` maximal among
/// roots whose length is a multiple of `block`.
pub fn block_period(w: &Word, block: usize) -> Result<(Word, usize), WordError> {
    let class = canonical_form(w, block)?;
    Ok((class.root(), class.period))
}

/// Calls `visit(letters, period)` for every `block`-equivalence class of
/// words with `blocks` blocks, in increasing lexicographic order of
/// canonical representatives. `period` is the class's `e` as in
/// [`BlockClass::period`].
///
/// This is the Fredricksen–Kessler–Maiorana prenecklace walk run on the
/// alphabet of blocks (base-`n` digit strings of length `block`).
pub fn for_each_block_necklace(
    n: u8,
    block: usize,
    blocks: usize,
    mut visit: impl FnMut(&[u8], usize),
) {
    if n == 0 || block == 0 || blocks == 0 {
        return;
    }
    let len = block * blocks;
    // 0-based digits, one leading dummy block.
    let mut a = vec![0u8; len + block];
    let top = n - 1;
    let mut out = vec![0u8; len];
    let emit = |a: &[u8], out: &mut Vec<u8>, p: usize, visit: &mut dyn FnMut(&[u8], usize)| {
        for (o, &x) in out.iter_mut().zip(&a[block..]) {
            *o = x + 1;
        }
        visit(out, blocks / p);
    };
    emit(&a, &mut out, 1, &mut visit);
    loop {
        // last block (1-based index) that is not all-max
        let mut i = blocks;
        while i > 0 && a[i * block..(i + 1) * block].iter().all(|&x| x == top) {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        // increment block i as a base-n number
        let blk = &mut a[i * block..(i + 1) * block];
        for digit in blk.iter_mut().rev() {
            if *digit == top {
                *digit = 0;
            } else {
                *digit += 1;
                break;
            }
        }
        for j in i + 1..=blocks {
            let src = (j - i) * block;
            let dst = j * block;
            a.copy_within(src..src + block, dst);
        }
        if blocks % i == 0 {
            emit(&a, &mut out, i, &mut visit);
        }
    }
}

/// All irreducible cyclic classes (aperiodic necklaces) of length `len`.
pub fn aperiodic_necklaces(n: u8, len: usize) -> (Vec<BlockClass>, usize) {
    let mut out = Vec::new();
    for_each_block_necklace(n, 1, len, |letters, period| {
        if period == 1 {
            out.push(BlockClass {
                canonical: Word::from_valid(n, letters.to_vec()),
                block: 1,
                period: 1,
            });
        }
    });
    let count = out.len();
    (out, count)
}

/// Number of `block`-classes of words of length `len` (periodic ones
/// included), by enumeration.
pub fn count_classes(n: u8, block: usize, len: usize) -> usize {
    if block == 0 || len == 0 || len % block != 0 {
        return 0;
    }
    let mut count = 0;
    for_each_block_necklace(n, block, len / block, |_, _| count += 1);
    count
}

/// Block rotation offsets of the distinct `block`-classes inside the cyclic
/// class of `letters`; each offset `o` names the class of the rotation
/// `letters[o..] ++ letters[..o]`, already in canonical position.
pub(crate) fn fiber_offsets(letters: &[u8], block: usize) -> Vec<usize> {
    let len = letters.len();
    let d = doubled(letters);
    let mut found: Vec<usize> = Vec::new();
    for shift in 0..len {
        let off = least_block_offset(&d, len, shift, block);
        if !found.iter().any(|&o| d[o..o + len] == d[off..off + len]) {
            found.push(off);
        }
    }
    found.sort_by(|&x, &y| d[x..x + len].cmp(&d[y..y + len]));
    found
}

/// All `a`-classes lying over the cyclic class `w`.
pub fn fiber(w: &BlockClass, a: usize) -> Result<Vec<BlockClass>, WordError> {
    if w.block != 1 {
        return Err(WordError::NotCyclic(w.block));
    }
    check_blocks(w.len(), a)?;
    let letters = w.canonical.letters();
    let len = letters.len();
    let d = doubled(letters);
    Ok(fiber_offsets(letters, a)
        .into_iter()
        .map(|off| {
            let canonical = d[off..off + len].to_vec();
            let p = block_period_len(&canonical, a);
            BlockClass {
                canonical: Word::from_valid(w.canonical.n, canonical),
                block: a,
                period: len / (p * a),
            }
        })
        .collect())
}

/// Expected fiber size `gcd(len(root), a)` and period `e * g / a` of the
/// classes over `w`.
pub fn fiber_shape(w: &BlockClass, a: usize) -> (usize, usize) {
    let root_len = w.len() / w.period;
    let g = root_len.gcd(&a);
    (g, w.period * g / a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn w(n: u8, s: &[u8]) -> Word {
        Word::new(n, s.to_vec()).unwrap()
    }

    fn brute_canonical(letters: &[u8], block: usize) -> Vec<u8> {
        let len = letters.len();
        (0..len / block)
            .map(|k| {
                let mut r = letters.to_vec();
                r.rotate_left(k * block);
                r
            })
            .min()
            .unwrap()
    }

    fn all_words(n: u8, len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (1..=n).map(move |l| {
                        let mut q = p.clone();
                        q.push(l);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn canonical_examples() {
        let c = canonical_form(&w(2, &[1, 2, 1, 2]), 2).unwrap();
        assert_eq!(c.canonical.letters(), &[1, 2, 1, 2]);
        let c = canonical_form(&w(2, &[2, 1, 2, 1]), 1).unwrap();
        assert_eq!(c.canonical.letters(), &[1, 2, 1, 2]);
        let c2 = canonical_form(&w(2, &[2, 1, 2, 1]), 2).unwrap();
        assert_eq!(c2.canonical.letters(), &[2, 1, 2, 1]);
        assert_ne!(c2, canonical_form(&w(2, &[1, 2, 1, 2]), 2).unwrap());
    }

    #[test]
    fn canonical_errors() {
        assert_eq!(
            canonical_form(&w(2, &[1, 2, 1]), 2),
            Err(WordError::BlockMismatch { len: 3, block: 2 })
        );
        assert_eq!(canonical_form(&w(2, &[]), 1), Err(WordError::EmptyWord));
        assert!(Word::new(2, vec![3]).is_err());
        assert!(Word::new(2, vec![0]).is_err());
    }

    #[test]
    fn block_period_examples() {
        let (root, e) = block_period(&w(2, &[1, 2, 1, 2]), 2).unwrap();
        assert_eq!((root.letters(), e), (&[1u8, 2][..], 2));
        let (root, e) = block_period(&w(2, &[1, 2, 1, 2]), 4).unwrap();
        assert_eq!((root.letters(), e), (&[1u8, 2, 1, 2][..], 1));
        let (root, e) = block_period(&w(1, &[1, 1, 1]), 1).unwrap();
        assert_eq!((root.letters(), e), (&[1u8][..], 3));
    }

    #[test]
    fn necklace_examples() {
        let (list, count) = aperiodic_necklaces(2, 2);
        assert_eq!(count, 1);
        assert_eq!(list[0].canonical.letters(), &[1, 2]);
        assert_eq!(aperiodic_necklaces(2, 4).1, 3);
        assert_eq!(aperiodic_necklaces(1, 2).1, 0);
        assert_eq!(aperiodic_necklaces(1, 1).1, 1);
    }

    #[test]
    fn fiber_examples() {
        let cyc = canonical_form(&w(2, &[1, 2, 1, 2]), 1).unwrap();
        let f = fiber(&cyc, 2).unwrap();
        let words: Vec<_> = f.iter().map(|c| c.canonical.letters().to_vec()).collect();
        assert_eq!(words, vec![vec![1, 2, 1, 2], vec![2, 1, 2, 1]]);
        assert!(f.iter().all(|c| c.period == 2));

        let f = fiber(&cyc, 4).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|c| c.period == 1));

        let sq = canonical_form(&w(1, &[1, 1]), 1).unwrap();
        let f = fiber(&sq, 2).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].canonical.letters(), &[1, 1]);

        let two = canonical_form(&w(2, &[1, 2, 1, 2]), 2).unwrap();
        assert_eq!(fiber(&two, 2), Err(WordError::NotCyclic(2)));
        assert!(matches!(fiber(&cyc, 3), Err(WordError::BlockMismatch { .. })));
    }

    #[test]
    fn equivalence_matches_brute_force() {
        for n in 1..=3u8 {
            for len in 1..=8usize {
                if (n as u32).pow(len as u32) > 3000 {
                    continue;
                }
                let words = all_words(n, len);
                for block in (1..=len).filter(|b| len % b == 0) {
                    for x in &words {
                        let cx = canonical_form(&w(n, x), block).unwrap();
                        assert_eq!(cx.canonical.letters(), &brute_canonical(x, block)[..]);
                        // idempotent
                        assert_eq!(canonical_form(&cx.canonical, block).unwrap(), cx);
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_of_equivalence() {
        // w1 ~_a w2 implies w1 ~_b w2 for b | a
        for len in [4usize, 6, 8] {
            let words = all_words(2, len);
            for a in (1..=len).filter(|a| len % a == 0) {
                for b in (1..=a).filter(|b| a % b == 0) {
                    for x in &words {
                        let cx = canonical_form(&w(2, x), a).unwrap();
                        let bx = canonical_form(&w(2, x), b).unwrap();
                        let bc = canonical_form(&cx.canonical, b).unwrap();
                        assert_eq!(bx, bc);
                    }
                }
            }
        }
    }

    #[test]
    fn fiber_size_is_gcd() {
        for n in 1..=3u8 {
            for len in 1..=8usize {
                if (n as u32).pow(len as u32) > 7000 {
                    continue;
                }
                let words = all_words(n, len);
                let cyclic: BTreeSet<BlockClass> = words
                    .iter()
                    .map(|x| canonical_form(&w(n, x), 1).unwrap())
                    .collect();
                for a in (1..=4).filter(|a| len % a == 0) {
                    for c in &cyclic {
                        // brute force: distinct a-classes among all words in the cyclic class
                        let brute: BTreeSet<Vec<u8>> = (0..len)
                            .map(|k| brute_canonical(c.canonical.rotate(k).letters(), a))
                            .collect();
                        let f = fiber(c, a).unwrap();
                        let (g, e_prime) = fiber_shape(c, a);
                        assert_eq!(f.len(), brute.len());
                        assert_eq!(f.len(), g);
                        assert!(f.iter().all(|u| u.period == e_prime));
                    }
                }
            }
        }
    }

    #[test]
    fn class_counts_match_brute_force() {
        for n in 1..=3u8 {
            for len in 1..=8usize {
                if (n as u32).pow(len as u32) > 7000 {
                    continue;
                }
                let words = all_words(n, len);
                for block in (1..=len).filter(|b| len % b == 0) {
                    let brute: BTreeSet<Vec<u8>> =
                        words.iter().map(|x| brute_canonical(x, block)).collect();
                    assert_eq!(count_classes(n, block, len), brute.len());
                    let mut listed = Vec::new();
                    for_each_block_necklace(n, block, len / block, |l, p| {
                        let c = canonical_form(&w(n, l), block).unwrap();
                        assert_eq!(c.canonical.letters(), l);
                        assert_eq!(c.period, p);
                        listed.push(l.to_vec());
                    });
                    let sorted: Vec<_> = brute.into_iter().collect();
                    assert_eq!(listed, sorted);
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let x = Word::parse(3, "x1x3x2").unwrap();
        assert_eq!(x.letters(), &[1, 3, 2]);
        assert_eq!(x.to_string(), "x1x3x2");
        assert!(Word::parse(2, "x1x3").is_err());
    }

    proptest! {
        #[test]
        fn canonical_is_rotation_invariant(
            letters in proptest::collection::vec(1u8..=3, 1..12),
            k in 0usize..12,
        ) {
            let x = w(3, &letters);
            let c = canonical_form(&x, 1).unwrap();
            let r = canonical_form(&x.rotate(k), 1).unwrap();
            prop_assert_eq!(c, r);
        }
    }
}
