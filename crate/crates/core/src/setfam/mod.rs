//! Families of subsets of a ground set `[n] = {1, ..., n}` under the
//! p-biased product measure, with shifting and cross-intersection tools.
//!
//! Subsets are bitmasks: element `e` lives at bit `e - 1`, so `n <= 64`.

mod chernoff;
mod cross;
mod popular;
mod shift;

pub use chernoff::{chernoff_bound, chernoff_t};
pub use cross::{
    balls_and_bins_witness, cross_intersection_violation, find_density_violator,
    is_cross_intersecting, meets_prefix_density, prefix_density_witness, small_measure_index,
    BallsAndBins, CrossCheck, DensityWitness, PrefixRule, SmallMeasure, DEFAULT_PRODUCT_LIMIT,
};
pub use popular::{max_disjoint_subcollection, popular_element, Popular, EXHAUSTIVE_DISJOINT_LIMIT};
pub use shift::{is_left_shifted, left_shift, shift_once, shift_set};

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{is_in_open_unit, pow, Rational};

pub const MAX_GROUND: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetFamError {
    #[error("bias {0} must lie strictly between 0 and 1")]
    BiasOutOfRange(String),
    #[error("ground set size {0} exceeds {MAX_GROUND}")]
    GroundTooLarge(usize),
    #[error("element {element} outside [1, {n}]")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("families disagree on ground set size ({0} vs {1})")]
    GroundMismatch(usize, usize),
    #[error("shift requires 1 <= i < j <= n, got i = {i}, j = {j}, n = {n}")]
    BadShift { i: usize, j: usize, n: usize },
    #[error("empty list of families")]
    NoFamilies,
    #[error("t must be at least 1")]
    BadT,
    #[error("product of family sizes {0} exceeds the enumeration limit {1}")]
    ProductTooLarge(u128, u128),
    #[error("family {0} is not left-shifted")]
    NotLeftShifted(usize),
    #[error("bias parameters sum to {0}, need at least 1")]
    BiasSumTooSmall(String),
    #[error("expected {expected} parameters, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("family {0} has no set violating prefix density")]
    NoViolator(usize),
    #[error("supplied set for family {0} is not a member or does not violate prefix density")]
    BadDesignated(usize),
    #[error("families are not {k}-wise {t}-cross-intersecting")]
    NotCrossIntersecting { k: usize, t: usize },
    #[error("parameters must be positive")]
    NonPositive,
    #[error("empty collection of sets")]
    EmptyCollection,
    #[error("set {index} has size {size} exceeding T = {bound}")]
    SetTooLarge { index: usize, size: usize, bound: usize },
    #[error("set {0} is empty")]
    EmptySet(usize),
    #[error("collection has {found} pairwise disjoint sets, more than D = {bound}")]
    DisjointBoundViolated { found: usize, bound: usize },
}

/// A subset of `[n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSubset {
    n: usize,
    bits: u64,
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Mask of the prefix `[m]`.
pub(crate) fn prefix_mask(m: usize) -> u64 {
    full_mask(m.min(64))
}

impl GroundSubset {
    pub fn from_bits(n: usize, bits: u64) -> Result<Self, SetFamError> {
        if n > MAX_GROUND {
            return Err(SetFamError::GroundTooLarge(n));
        }
        if bits & !full_mask(n) != 0 {
            let element = 64 - bits.leading_zeros() as usize;
            return Err(SetFamError::ElementOutOfRange { element, n });
        }
        Ok(Self { n, bits })
    }

    pub fn from_elements(n: usize, elements: &[usize]) -> Result<Self, SetFamError> {
        if n > MAX_GROUND {
            return Err(SetFamError::GroundTooLarge(n));
        }
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > n {
                return Err(SetFamError::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Self { n, bits })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        Self { n, bits: full_mask(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.n && self.bits >> (e - 1) & 1 == 1
    }

    pub fn elements(&self) -> Vec<usize> {
        (1..=self.n).filter(|&e| self.contains(e)).collect()
    }

    /// `|F ∩ [m]|`
    pub fn prefix_count(&self, m: usize) -> usize {
        (self.bits & prefix_mask(m)).count_ones() as usize
    }
}

/// A set of distinct subsets of a common ground set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SetFamily {
    n: usize,
    sets: BTreeSet<u64>,
}

impl SetFamily {
    pub fn new(n: usize) -> Result<Self, SetFamError> {
        if n > MAX_GROUND {
            return Err(SetFamError::GroundTooLarge(n));
        }
        Ok(Self { n, sets: BTreeSet::new() })
    }

    pub fn from_bits(n: usize, bits: impl IntoIterator<Item = u64>) -> Result<Self, SetFamError> {
        let mut fam = Self::new(n)?;
        for b in bits {
            fam.insert(GroundSubset::from_bits(n, b)?);
        }
        Ok(fam)
    }

    pub fn from_element_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self, SetFamError> {
        let mut fam = Self::new(n)?;
        for l in lists {
            fam.insert(GroundSubset::from_elements(n, l)?);
        }
        Ok(fam)
    }

    /// The whole power set `2^[n]`.
    pub fn power_set(n: usize) -> Result<Self, SetFamError> {
        if n > 24 {
            return Err(SetFamError::GroundTooLarge(n));
        }
        Self::from_bits(n, 0..(1u64 << n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Inserts a subset; returns false if it was already present.
    pub fn insert(&mut self, s: GroundSubset) -> bool {
        debug_assert_eq!(s.n, self.n);
        self.sets.insert(s.bits)
    }

    pub fn contains_bits(&self, bits: u64) -> bool {
        self.sets.contains(&bits)
    }

    pub fn contains(&self, s: &GroundSubset) -> bool {
        s.n == self.n && self.sets.contains(&s.bits)
    }

    pub fn iter(&self) -> impl Iterator<Item = GroundSubset> + '_ {
        self.sets.iter().map(move |&bits| GroundSubset { n: self.n, bits })
    }

    pub fn bits(&self) -> impl Iterator<Item = u64> + '_ {
        self.sets.iter().copied()
    }

    /// Sorted sizes of the member sets.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.sets.iter().map(|b| b.count_ones() as usize).collect();
        sizes.sort_unstable();
        sizes
    }

    /// Sets sorted lexicographically by their ascending element lists.
    pub fn element_lists(&self) -> Vec<Vec<usize>> {
        let mut lists: Vec<Vec<usize>> = self.iter().map(|s| s.elements()).collect();
        lists.sort();
        lists
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FamilyDoc { n: self.n, sets: self.element_lists() })
            .expect("family serialization")
    }

    pub fn from_json(doc: &str) -> Result<Self, FamilyParseError> {
        let raw: FamilyDoc = serde_json::from_str(doc)?;
        Ok(Self::from_element_lists(raw.n, &raw.sets)?)
    }
}

#[derive(Debug, Error)]
pub enum FamilyParseError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] SetFamError),
}

#[derive(Debug, Serialize, Deserialize)]
struct FamilyDoc {
    n: usize,
    sets: Vec<Vec<usize>>,
}

fn check_bias(p: &Rational) -> Result<(), SetFamError> {
    if is_in_open_unit(p) {
        Ok(())
    } else {
        Err(SetFamError::BiasOutOfRange(p.to_string()))
    }
}

/// Powers `p^i (1-p)^(n-i)` for `i = 0..=n`, indexed by set size.
pub(crate) fn measure_table(n: usize, p: &Rational) -> Vec<Rational> {
    let q = Rational::one() - p;
    (0..=n).map(|i| pow(p, i) * pow(&q, n - i)).collect()
}

/// `μ_p(F) = p^|F| (1-p)^(n-|F|)`
pub fn measure_set(f: &GroundSubset, p: &Rational) -> Result<Rational, SetFamError> {
    check_bias(p)?;
    Ok(pow(p, f.len()) * pow(&(Rational::one() - p), f.n - f.len()))
}

/// `μ_p` of a family: the sum over its members.
pub fn measure_family(fam: &SetFamily, p: &Rational) -> Result<Rational, SetFamError> {
    check_bias(p)?;
    if fam.is_empty() {
        return Ok(Rational::zero());
    }
    let table = measure_table(fam.n, p);
    let mut by_size = vec![0u64; fam.n + 1];
    for b in fam.bits() {
        by_size[b.count_ones() as usize] += 1;
    }
    Ok(by_size
        .iter()
        .zip(&table)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, m)| m * Rational::from_integer(c.into()))
        .sum())
}
