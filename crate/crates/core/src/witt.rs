//! Big Witt vectors `W_S(R)` on a truncation set `S`.
//!
//! Every ring operation is evaluated through ghost coordinates
//! `w_m = Σ_{d | m} d · x_d^{m/d}`: operands are lifted to the integers (or
//! taken as they are over the rationals), combined ghost-wise, and the ghost
//! recursion `z_m = (w_m − Σ_{d | m, d < m} d · z_d^{m/d}) / m` is solved with
//! exact division before reducing back into the coefficient ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::trunc::{divisors, vmap_components, TruncError, TruncationPoset, TruncationSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WittError {
    #[error("operands live on different truncation sets or coefficient rings")]
    IncompatibleOperands,
    #[error("truncation set mismatch: {0}")]
    TruncationMismatch(String),
    #[error("internal error: ghost recursion not integral at index {index}")]
    InternalIntegralityError { index: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("coordinate {0} is not an integer")]
    NonIntegral(BigRational),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Integers,
    Rationals,
    IntegersMod(u64),
    PrimeField(u64),
}

impl CoefficientRing {
    pub fn prime_field(p: u64) -> Result<Self, WittError> {
        if is_prime(p) {
            Ok(CoefficientRing::PrimeField(p))
        } else {
            Err(WittError::NotPrime(p))
        }
    }

    pub fn integers_mod(m: u64) -> Result<Self, WittError> {
        if m >= 2 {
            Ok(CoefficientRing::IntegersMod(m))
        } else {
            Err(WittError::InvalidModulus(m))
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            CoefficientRing::IntegersMod(m) | CoefficientRing::PrimeField(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_integral(&self) -> bool {
        !matches!(self, CoefficientRing::Rationals)
    }

    fn reduce(&self, x: BigInt) -> BigInt {
        match self.modulus() {
            Some(m) => x.mod_floor(&BigInt::from(m)),
            None => x,
        }
    }

    /// Brings a value into canonical form for this ring.
    pub fn normalize(&self, x: BigRational) -> Result<BigRational, WittError> {
        if !self.is_integral() {
            return Ok(x);
        }
        if !x.is_integer() {
            return Err(WittError::NonIntegral(x));
        }
        Ok(BigRational::from_integer(self.reduce(x.to_integer())))
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::IntegersMod(m) => write!(f, "Z/{m}"),
            CoefficientRing::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

/// Exact scalars the ghost recursion runs over.
trait GhostScalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_u64(v: u64) -> Self;
    fn exact_div(&self, m: u64) -> Option<Self>;
}

impl GhostScalar for BigInt {
    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }

    fn exact_div(&self, m: u64) -> Option<Self> {
        let (q, r) = self.div_rem(&BigInt::from(m));
        r.is_zero().then_some(q)
    }
}

impl GhostScalar for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn exact_div(&self, m: u64) -> Option<Self> {
        Some(self / BigRational::from_integer(BigInt::from(m)))
    }
}

fn pow<T: GhostScalar>(x: &T, mut e: u64) -> T {
    let mut base = x.clone();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

/// For each element `m` of `set`, the pairs `(index of d, m / d)` over the
/// divisors `d | m`, smallest `d` first.
fn divisor_table(set: &TruncationSet) -> Vec<Vec<(usize, u64)>> {
    set.elements()
        .iter()
        .map(|&m| {
            divisors(m)
                .into_iter()
                .map(|d| (set.index_of(d).expect("divisor-closed"), m / d))
                .collect()
        })
        .collect()
}

fn ghost_of<T: GhostScalar>(set: &TruncationSet, coords: &[T]) -> Vec<T> {
    let table = divisor_table(set);
    set.elements()
        .iter()
        .zip(&table)
        .map(|(_, divs)| {
            divs.iter().fold(T::zero(), |acc, &(i, k)| {
                let d = set.elements()[i];
                acc + T::from_u64(d) * pow(&coords[i], k)
            })
        })
        .collect()
}

fn solve_ghost<T: GhostScalar>(set: &TruncationSet, ghost: &[T]) -> Result<Vec<T>, WittError> {
    let table = divisor_table(set);
    let mut out: Vec<T> = Vec::with_capacity(ghost.len());
    for (pos, &m) in set.elements().iter().enumerate() {
        let mut acc = ghost[pos].clone();
        for &(i, k) in &table[pos] {
            if i == pos {
                continue;
            }
            let d = set.elements()[i];
            acc = acc - T::from_u64(d) * pow(&out[i], k);
        }
        let z = acc
            .exact_div(m)
            .ok_or(WittError::InternalIntegralityError { index: m })?;
        out.push(z);
    }
    Ok(out)
}

/// Ghost vector of a lifted Witt vector.
#[derive(Debug, Clone)]
enum Lift {
    Int(Vec<BigInt>),
    Rat(Vec<BigRational>),
}

impl Lift {
    fn zip(self, other: Lift, fi: impl Fn(BigInt, BigInt) -> BigInt, fr: impl Fn(BigRational, BigRational) -> BigRational) -> Lift {
        match (self, other) {
            (Lift::Int(a), Lift::Int(b)) => Lift::Int(a.into_iter().zip(b).map(|(x, y)| fi(x, y)).collect()),
            (Lift::Rat(a), Lift::Rat(b)) => Lift::Rat(a.into_iter().zip(b).map(|(x, y)| fr(x, y)).collect()),
            _ => unreachable!("operands checked compatible"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Neg,
    Mul,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittVector {
    trunc: TruncationSet,
    ring: CoefficientRing,
    coords: Vec<BigRational>,
}

impl WittVector {
    pub fn new(
        ring: CoefficientRing,
        trunc: TruncationSet,
        coords: Vec<BigRational>,
    ) -> Result<Self, WittError> {
        if coords.len() != trunc.len() {
            return Err(WittError::TruncationMismatch(format!(
                "{} coordinates for a set of {} elements",
                coords.len(),
                trunc.len()
            )));
        }
        let coords = coords
            .into_iter()
            .map(|c| ring.normalize(c))
            .collect::<Result<_, _>>()?;
        Ok(WittVector { trunc, ring, coords })
    }

    pub fn from_ints(ring: CoefficientRing, trunc: TruncationSet, coords: &[i64]) -> Result<Self, WittError> {
        let coords = coords.iter().map(|&c| BigRational::from_integer(c.into())).collect();
        WittVector::new(ring, trunc, coords)
    }

    pub fn zero(ring: CoefficientRing, trunc: TruncationSet) -> Self {
        let coords = vec![BigRational::zero(); trunc.len()];
        WittVector { trunc, ring, coords }
    }

    pub fn one(ring: CoefficientRing, trunc: TruncationSet) -> Self {
        WittVector::teichmuller(ring, BigRational::one(), trunc).expect("1 lies in every ring")
    }

    /// The multiplicative lift `[c]`: `c` at index 1, zero elsewhere. On the
    /// empty truncation set this is the unique (empty) vector.
    pub fn teichmuller(ring: CoefficientRing, c: BigRational, trunc: TruncationSet) -> Result<Self, WittError> {
        let c = ring.normalize(c)?;
        let mut v = WittVector::zero(ring, trunc);
        if let Some(i) = v.trunc.index_of(1) {
            v.coords[i] = c;
        }
        Ok(v)
    }

    /// Image of the integer `k` under `Z → W_S(R)`.
    pub fn integer(ring: CoefficientRing, k: &BigInt, trunc: TruncationSet) -> Result<Self, WittError> {
        WittVector::one(ring, trunc).scale(k)
    }

    pub fn trunc(&self) -> &TruncationSet {
        &self.trunc
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    /// Coordinate at index `m` of the truncation set.
    pub fn coord(&self, m: u64) -> Option<&BigRational> {
        self.trunc.index_of(m).map(|i| &self.coords[i])
    }

    /// Integer lifts of the coordinates (canonical representatives).
    pub fn int_coords(&self) -> Vec<BigInt> {
        self.coords.iter().map(|c| c.to_integer()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn lift(&self) -> Lift {
        if self.ring.is_integral() {
            Lift::Int(ghost_of(&self.trunc, &self.int_coords()))
        } else {
            Lift::Rat(ghost_of(&self.trunc, &self.coords))
        }
    }

    fn from_lift(ring: CoefficientRing, trunc: TruncationSet, ghost: Lift) -> Result<Self, WittError> {
        let coords = match ghost {
            Lift::Int(g) => solve_ghost(&trunc, &g)?
                .into_iter()
                .map(|z| BigRational::from_integer(ring.reduce(z)))
                .collect(),
            Lift::Rat(g) => solve_ghost(&trunc, &g)?,
        };
        Ok(WittVector { trunc, ring, coords })
    }

    /// Ghost coordinates, reduced into the coefficient ring.
    pub fn ghost(&self) -> Vec<BigRational> {
        match self.lift() {
            Lift::Int(g) => g
                .into_iter()
                .map(|x| BigRational::from_integer(self.ring.reduce(x)))
                .collect(),
            Lift::Rat(g) => g,
        }
    }

    /// Inverse of the ghost map over the rationals.
    pub fn from_ghost(trunc: TruncationSet, ghost: Vec<BigRational>) -> Result<Self, WittError> {
        if ghost.len() != trunc.len() {
            return Err(WittError::TruncationMismatch("ghost vector length".into()));
        }
        WittVector::from_lift(CoefficientRing::Rationals, trunc, Lift::Rat(ghost))
    }

    fn check_compatible(&self, other: &WittVector) -> Result<(), WittError> {
        if self.ring != other.ring || self.trunc != other.trunc {
            return Err(WittError::IncompatibleOperands);
        }
        Ok(())
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.check_compatible(other)?;
        let g = self.lift().zip(other.lift(), |x, y| x + y, |x, y| x + y);
        WittVector::from_lift(self.ring, self.trunc.clone(), g)
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.check_compatible(other)?;
        let g = self.lift().zip(other.lift(), |x, y| x - y, |x, y| x - y);
        WittVector::from_lift(self.ring, self.trunc.clone(), g)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector, WittError> {
        self.check_compatible(other)?;
        let g = self.lift().zip(other.lift(), |x, y| x * y, |x, y| x * y);
        WittVector::from_lift(self.ring, self.trunc.clone(), g)
    }

    pub fn neg(&self) -> Result<WittVector, WittError> {
        let g = match self.lift() {
            Lift::Int(g) => Lift::Int(g.into_iter().map(Neg::neg).collect()),
            Lift::Rat(g) => Lift::Rat(g.into_iter().map(Neg::neg).collect()),
        };
        WittVector::from_lift(self.ring, self.trunc.clone(), g)
    }

    /// `k · x` for an integer `k`.
    pub fn scale(&self, k: &BigInt) -> Result<WittVector, WittError> {
        let g = match self.lift() {
            Lift::Int(g) => Lift::Int(g.into_iter().map(|x| x * k).collect()),
            Lift::Rat(g) => {
                let k = BigRational::from_integer(k.clone());
                Lift::Rat(g.into_iter().map(|x| x * &k).collect())
            }
        };
        WittVector::from_lift(self.ring, self.trunc.clone(), g)
    }

    /// Restriction to a smaller truncation set (drops coordinates).
    pub fn restrict(&self, sub: &TruncationSet) -> Result<WittVector, WittError> {
        if !sub.is_subset(&self.trunc) {
            return Err(WittError::TruncationMismatch("restriction target is not a subset".into()));
        }
        let coords = sub
            .elements()
            .iter()
            .map(|&m| self.coord(m).expect("subset").clone())
            .collect();
        Ok(WittVector { trunc: sub.clone(), ring: self.ring, coords })
    }

    /// Frobenius `F_r : W_S → W_{S/r}`, with `ghost(F_r x)_m = ghost(x)_{rm}`.
    pub fn frobenius(&self, r: u64) -> Result<WittVector, WittError> {
        let target = self.trunc.quotient(r);
        let pick = |m: u64| self.trunc.index_of(r * m).expect("r m in S");
        let g = match self.lift() {
            Lift::Int(g) => Lift::Int(target.elements().iter().map(|&m| g[pick(m)].clone()).collect()),
            Lift::Rat(g) => Lift::Rat(target.elements().iter().map(|&m| g[pick(m)].clone()).collect()),
        };
        WittVector::from_lift(self.ring, target, g)
    }
}

pub fn arith(op: ArithOp, x: &WittVector, y: Option<&WittVector>) -> Result<WittVector, WittError> {
    match op {
        ArithOp::Neg => x.neg(),
        ArithOp::Add => x.add(y.ok_or(WittError::IncompatibleOperands)?),
        ArithOp::Mul => x.mul(y.ok_or(WittError::IncompatibleOperands)?),
    }
}

/// Verschiebung `V_r : W_{S/r} → W_S`, `(V_r x)_m = x_{m/r}` when `r | m`
/// and zero otherwise.
pub fn verschiebung(r: u64, x: &WittVector, target: &TruncationSet) -> Result<WittVector, WittError> {
    if r == 0 {
        return Err(WittError::TruncationMismatch("shift by zero".into()));
    }
    let expected = target.quotient(r);
    if x.trunc != expected {
        return Err(WittError::TruncationMismatch(format!(
            "source must be S/{r} with {} elements, got {}",
            expected.len(),
            x.trunc.len()
        )));
    }
    let coords = target
        .elements()
        .iter()
        .map(|&m| {
            if m % r == 0 {
                x.coord(m / r).expect("m/r in S/r").clone()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    Ok(WittVector { trunc: target.clone(), ring: x.ring, coords })
}

/// Witt vectors on a truncation poset: one ordinary Witt vector per
/// component, aligned with `poset.components`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetWittVector {
    pub poset: TruncationPoset,
    pub ring: CoefficientRing,
    pub components: Vec<WittVector>,
}

impl PosetWittVector {
    pub fn zero(ring: CoefficientRing, poset: TruncationPoset) -> Self {
        let components = poset
            .components
            .iter()
            .map(|c| WittVector::zero(ring, c.set()))
            .collect();
        PosetWittVector { poset, ring, components }
    }

    pub fn new(ring: CoefficientRing, poset: TruncationPoset, components: Vec<WittVector>) -> Result<Self, WittError> {
        if components.len() != poset.len() {
            return Err(WittError::TruncationMismatch("one vector per component".into()));
        }
        for (c, v) in poset.components.iter().zip(&components) {
            if v.trunc != c.set() || v.ring != ring {
                return Err(WittError::TruncationMismatch(format!("component {}", c.label)));
            }
        }
        Ok(PosetWittVector { poset, ring, components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(WittVector::is_zero)
    }
}

/// The generalized Verschiebung `V_a^b : W_{S_n(a,N)} → W_{S_n(b,N)}`
/// induced by `v_a^b`, where `a`, `n`, `N` are read off the source poset.
///
/// A source component routed with ratio `ρ` contributes `V_ρ` of its Witt
/// vector (restricted so that it lands inside the target component), and
/// contributions to a common target are added as Witt vectors.
pub fn generalized_verschiebung(b: usize, x: &PosetWittVector) -> Result<PosetWittVector, WittError> {
    let poset = &x.poset;
    let map = vmap_components(poset.n, poset.block, b, poset.max_len)?;
    if map.source != *poset {
        return Err(WittError::TruncationMismatch("source poset".into()));
    }
    let mut out = PosetWittVector::zero(x.ring, map.target);
    for route in &map.routes {
        let target_set = out.poset.components[route.target].set();
        let ratio = route.ratio as u64;
        let src = x.components[route.source].restrict(&target_set.quotient(ratio))?;
        let shifted = verschiebung(ratio, &src, &target_set)?;
        let acc = &mut out.components[route.target];
        *acc = acc.add(&shifted)?;
    }
    Ok(out)
}

/// Convenience for printing coordinate lists.
pub fn format_coords(v: &WittVector) -> Vec<String> {
    v.coords
        .iter()
        .map(|c| if c.is_integer() { c.to_integer().to_string() } else { c.to_string() })
        .collect()
}
