//! Cross-intersection checks and the prefix-density structure of
//! left-shifted cross-intersecting families.

use num_traits::One;

use super::{
    check_bias, is_left_shifted, measure_family, prefix_mask, GroundSubset, SetFamError, SetFamily,
};
use crate::rational::{int, Rational};

/// Upper bound on the number of tuples an exhaustive product may visit.
pub const DEFAULT_PRODUCT_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossCheck {
    Holds,
    /// First tuple (in product order) whose intersection is smaller than `t`.
    Violated(Vec<GroundSubset>),
}

impl CrossCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CrossCheck::Holds)
    }
}

fn common_n(fams: &[SetFamily]) -> Result<usize, SetFamError> {
    let first = fams.first().ok_or(SetFamError::NoFamilies)?;
    for f in fams {
        if f.n != first.n {
            return Err(SetFamError::GroundMismatch(first.n, f.n));
        }
    }
    Ok(first.n)
}

fn product_size(fams: &[SetFamily]) -> u128 {
    fams.iter()
        .try_fold(1u128, |acc, f| acc.checked_mul(f.len() as u128))
        .unwrap_or(u128::MAX)
}

/// Exhaustively tests whether every one-per-family choice meets in at least `t` elements.
pub fn is_cross_intersecting(
    fams: &[SetFamily],
    t: usize,
    limit: u128,
) -> Result<CrossCheck, SetFamError> {
    let n = common_n(fams)?;
    if t == 0 {
        return Err(SetFamError::BadT);
    }
    if fams.iter().any(|f| f.is_empty()) {
        return Ok(CrossCheck::Holds);
    }
    let size = product_size(fams);
    if size > limit {
        return Err(SetFamError::ProductTooLarge(size, limit));
    }
    let members: Vec<Vec<u64>> = fams.iter().map(|f| f.bits().collect()).collect();
    let mut chosen = Vec::with_capacity(fams.len());
    let found = search(&members, t, u64::MAX, &mut chosen);
    Ok(match found {
        true => CrossCheck::Violated(
            chosen
                .into_iter()
                .map(|bits| GroundSubset { n, bits })
                .collect(),
        ),
        false => CrossCheck::Holds,
    })
}

fn search(members: &[Vec<u64>], t: usize, acc: u64, chosen: &mut Vec<u64>) -> bool {
    let depth = chosen.len();
    if depth == members.len() {
        return (acc.count_ones() as usize) < t;
    }
    for &bits in &members[depth] {
        let next = acc & bits;
        chosen.push(bits);
        if (next.count_ones() as usize) < t {
            // every completion already fails; take the first sets of the rest
            for rest in &members[depth + 1..] {
                chosen.push(rest[0]);
            }
            return true;
        }
        if search(members, t, next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Convenience wrapper returning the violating tuple, if any.
pub fn cross_intersection_violation(
    fams: &[SetFamily],
    t: usize,
) -> Result<Option<Vec<GroundSubset>>, SetFamError> {
    Ok(match is_cross_intersecting(fams, t, DEFAULT_PRODUCT_LIMIT)? {
        CrossCheck::Holds => None,
        CrossCheck::Violated(w) => Some(w),
    })
}

/// Which prefix lengths `t + r` qualify, and whether density is strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixRule {
    /// Allow `r = 0` (prefix `[t]` itself) in addition to `r >= 1`.
    pub allow_zero: bool,
    /// `|F ∩ [t+r]| > (1-q)(t+r)` when set, `>=` otherwise.
    pub strict: bool,
}

impl PrefixRule {
    /// The structural conclusion on left-shifted families.
    pub const STRUCTURE: PrefixRule = PrefixRule { allow_zero: true, strict: true };
    /// The hypothesis of the Chernoff measure bound.
    pub const CHERNOFF: PrefixRule = PrefixRule { allow_zero: true, strict: false };
}

/// Whether some `r` in the rule's range, `t + r <= n`, has a dense prefix.
pub fn meets_prefix_density(f: &GroundSubset, q: &Rational, t: usize, rule: PrefixRule) -> bool {
    let keep = Rational::one() - q;
    let start = if rule.allow_zero { 0 } else { 1 };
    let n = f.n();
    if t + start > n {
        return false;
    }
    (start..=(n - t)).any(|r| {
        let m = t + r;
        let count = int((f.bits & prefix_mask(m)).count_ones() as i64);
        let bound = &keep * int(m as i64);
        if rule.strict {
            count > bound
        } else {
            count >= bound
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityWitness {
    AllDense,
    Counterexample(GroundSubset),
}

/// Checks that every member of a left-shifted family has a strictly dense prefix.
pub fn prefix_density_witness(
    fam: &SetFamily,
    q: &Rational,
    t: usize,
    allow_zero: bool,
) -> Result<DensityWitness, SetFamError> {
    check_bias(q)?;
    if t == 0 {
        return Err(SetFamError::BadT);
    }
    if !is_left_shifted(fam) {
        return Err(SetFamError::NotLeftShifted(0));
    }
    let rule = PrefixRule { allow_zero, strict: true };
    Ok(fam
        .iter()
        .find(|f| !meets_prefix_density(f, q, t, rule))
        .map_or(DensityWitness::AllDense, DensityWitness::Counterexample))
}

/// First member with `|F ∩ [t+r]| <= (1-q)(t+r)` for every `r >= 0`.
pub fn find_density_violator(fam: &SetFamily, q: &Rational, t: usize) -> Option<GroundSubset> {
    fam.iter()
        .find(|f| !meets_prefix_density(f, q, t, PrefixRule::STRUCTURE))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BallsAndBins {
    /// Members `G_i ∈ F_i` whose common intersection lies inside `[t-1]`.
    Tuple(Vec<GroundSubset>),
    /// The procedure had no legal move at step `r`.
    ProcedureBlocked { step: usize },
    /// The final sets failed membership or the intersection bound.
    InvalidOutput { family: usize },
}

fn check_biases(qs: &[Rational], k: usize) -> Result<(), SetFamError> {
    if qs.len() != k {
        return Err(SetFamError::ArityMismatch { expected: k, got: qs.len() });
    }
    for q in qs {
        check_bias(q)?;
    }
    let sum: Rational = qs.iter().sum();
    if sum < Rational::one() {
        return Err(SetFamError::BiasSumTooSmall(sum.to_string()));
    }
    Ok(())
}

/// Runs the ball-moving procedure on density-violating members `F_i`,
/// producing members whose intersection has fewer than `t` elements.
///
/// When `designated` is `None` the first violating member of each family is used.
pub fn balls_and_bins_witness(
    fams: &[SetFamily],
    qs: &[Rational],
    t: usize,
    designated: Option<&[GroundSubset]>,
) -> Result<BallsAndBins, SetFamError> {
    let n = common_n(fams)?;
    let k = fams.len();
    if t == 0 {
        return Err(SetFamError::BadT);
    }
    if k > 64 {
        return Err(SetFamError::ArityMismatch { expected: 64, got: k });
    }
    check_biases(qs, k)?;
    for (i, f) in fams.iter().enumerate() {
        if !is_left_shifted(f) {
            return Err(SetFamError::NotLeftShifted(i));
        }
    }
    let starts: Vec<GroundSubset> = match designated {
        Some(d) => {
            if d.len() != k {
                return Err(SetFamError::ArityMismatch { expected: k, got: d.len() });
            }
            for (i, f) in d.iter().enumerate() {
                if !fams[i].contains(f) || meets_prefix_density(f, &qs[i], t, PrefixRule::STRUCTURE) {
                    return Err(SetFamError::BadDesignated(i));
                }
            }
            d.to_vec()
        }
        None => fams
            .iter()
            .zip(qs)
            .enumerate()
            .map(|(i, (f, q))| find_density_violator(f, q, t).ok_or(SetFamError::NoViolator(i)))
            .collect::<Result<_, _>>()?,
    };

    // bins[x] holds the color bitmask of the balls in bin x (1-based; index 0 unused)
    let mut bins = vec![0u64; n + 1];
    for (color, f) in starts.iter().enumerate() {
        for (x, bin) in bins.iter_mut().enumerate().skip(1) {
            if !f.contains(x) {
                *bin |= 1 << color;
            }
        }
    }
    if t <= n {
        for r in 0..=(n - t) {
            let target = t + r;
            if bins[target] != 0 {
                continue;
            }
            let source = (1..t)
                .find(|&b| bins[b] != 0)
                .or_else(|| (t..target).find(|&b| bins[b].count_ones() >= 2));
            let Some(source) = source else {
                return Ok(BallsAndBins::ProcedureBlocked { step: r });
            };
            let ball = bins[source] & bins[source].wrapping_neg();
            bins[source] &= !ball;
            bins[target] |= ball;
        }
    }

    let full = super::full_mask(n);
    let out: Vec<GroundSubset> = (0..k)
        .map(|color| {
            let has: u64 = (1..=n)
                .filter(|&x| bins[x] >> color & 1 == 1)
                .fold(0, |acc, x| acc | 1 << (x - 1));
            GroundSubset { n, bits: full & !has }
        })
        .collect();
    for (i, g) in out.iter().enumerate() {
        if !fams[i].contains(g) {
            return Ok(BallsAndBins::InvalidOutput { family: i });
        }
    }
    let meet = out.iter().fold(full, |acc, g| acc & g.bits);
    if meet.count_ones() as usize >= t {
        return Ok(BallsAndBins::InvalidOutput { family: k });
    }
    Ok(BallsAndBins::Tuple(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallMeasure {
    pub index: usize,
    pub measure: Rational,
    /// `μ_{1-q_j-δ}(F_j)` for every `j`.
    pub measures: Vec<Rational>,
}

/// For cross-intersecting families, the index minimising `μ_{1-q_j-δ}(F_j)`.
pub fn small_measure_index(
    fams: &[SetFamily],
    qs: &[Rational],
    delta: &Rational,
    t: usize,
) -> Result<SmallMeasure, SetFamError> {
    common_n(fams)?;
    check_biases(qs, fams.len())?;
    if !is_cross_intersecting(fams, t, DEFAULT_PRODUCT_LIMIT)?.holds() {
        return Err(SetFamError::NotCrossIntersecting { k: fams.len(), t });
    }
    let measures = fams
        .iter()
        .zip(qs)
        .map(|(f, q)| measure_family(f, &(Rational::one() - q - delta)))
        .collect::<Result<Vec<_>, _>>()?;
    let index = (0..measures.len())
        .min_by(|&a, &b| measures[a].cmp(&measures[b]).then(a.cmp(&b)))
        .expect("at least one family");
    Ok(SmallMeasure {
        index,
        measure: measures[index].clone(),
        measures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::setfam::left_shift;

    fn fam(n: usize, lists: &[&[usize]]) -> SetFamily {
        let lists: Vec<Vec<usize>> = lists.iter().map(|l| l.to_vec()).collect();
        SetFamily::from_element_lists(n, &lists).unwrap()
    }

    /// Definition-level oracle: enumerate the full product with elements as vectors.
    fn naive_violation(fams: &[SetFamily], t: usize) -> Option<Vec<Vec<usize>>> {
        let lists: Vec<Vec<GroundSubset>> = fams.iter().map(|f| f.iter().collect()).collect();
        let mut idx = vec![0usize; lists.len()];
        if lists.iter().any(|l| l.is_empty()) {
            return None;
        }
        loop {
            let tuple: Vec<Vec<usize>> = idx.iter().zip(&lists).map(|(&i, l)| l[i].elements()).collect();
            let common = tuple[0]
                .iter()
                .filter(|e| tuple.iter().all(|s| s.contains(e)))
                .count();
            if common < t {
                return Some(tuple);
            }
            let mut d = lists.len();
            loop {
                if d == 0 {
                    return None;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < lists[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }

    #[test]
    fn cross_examples() {
        let t = 2;
        let block = fam(4, &[&[1, 2]]);
        let fams = vec![block.clone(), block.clone(), block];
        assert!(is_cross_intersecting(&fams, t, DEFAULT_PRODUCT_LIMIT).unwrap().holds());

        let fams = vec![fam(2, &[&[1]]), fam(2, &[&[2]])];
        let w = cross_intersection_violation(&fams, 1).unwrap().unwrap();
        assert_eq!(w[0].elements(), vec![1]);
        assert_eq!(w[1].elements(), vec![2]);

        assert_eq!(is_cross_intersecting(&[], 1, 10), Err(SetFamError::NoFamilies));
    }

    #[test]
    fn product_limit_is_enforced() {
        let all = SetFamily::power_set(6).unwrap();
        let fams = vec![all.clone(), all.clone(), all];
        assert!(matches!(
            is_cross_intersecting(&fams, 1, 1000),
            Err(SetFamError::ProductTooLarge(262_144, 1000))
        ));
    }

    #[test]
    fn agrees_with_naive_product_on_random_families() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = 6;
            let t = rng.gen_range(1..=3);
            let fams: Vec<SetFamily> = (0..3)
                .map(|_| {
                    let size = rng.gen_range(1..6);
                    // bias towards sets containing {1,2} so both outcomes occur
                    let sets: Vec<u64> = (0..size)
                        .map(|_| {
                            let core = if rng.gen_bool(0.8) { 0b11 } else { 0 };
                            (rng.gen::<u64>() | core) & 0b11_1111
                        })
                        .collect();
                    SetFamily::from_bits(n, sets).unwrap()
                })
                .collect();
            let got = cross_intersection_violation(&fams, t).unwrap();
            let want = naive_violation(&fams, t);
            assert_eq!(
                got.map(|w| w.iter().map(|s| s.elements()).collect::<Vec<_>>()),
                want
            );
        }
    }

    #[test]
    fn density_examples() {
        let full = SetFamily::from_bits(5, [0b11111]).unwrap();
        assert_eq!(
            prefix_density_witness(&full, &ratio(1, 3), 2, true).unwrap(),
            DensityWitness::AllDense
        );
        let empty_set = SetFamily::from_bits(5, [0]).unwrap();
        assert_eq!(
            prefix_density_witness(&empty_set, &ratio(1, 3), 2, true).unwrap(),
            DensityWitness::Counterexample(GroundSubset::empty(5))
        );
        let not_shifted = fam(3, &[&[3]]);
        assert_eq!(
            prefix_density_witness(&not_shifted, &ratio(1, 2), 1, true),
            Err(SetFamError::NotLeftShifted(0))
        );
    }

    #[test]
    fn r_zero_flag_matters() {
        // F = {1} over n = 3, t = 1, q = 1/2: [1] is dense, later prefixes are not
        let f = fam(3, &[&[1]]);
        assert_eq!(
            prefix_density_witness(&f, &ratio(1, 2), 1, true).unwrap(),
            DensityWitness::AllDense
        );
        assert!(matches!(
            prefix_density_witness(&f, &ratio(1, 2), 1, false).unwrap(),
            DensityWitness::Counterexample(_)
        ));
    }

    #[test]
    fn balls_and_bins_on_power_sets() {
        let all = SetFamily::power_set(4).unwrap();
        let fams = vec![all.clone(), all];
        let qs = vec![ratio(1, 2), ratio(1, 2)];
        match balls_and_bins_witness(&fams, &qs, 1, None).unwrap() {
            BallsAndBins::Tuple(g) => {
                let meet = g.iter().fold(u64::MAX, |a, s| a & s.bits());
                assert_eq!(meet, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn balls_and_bins_on_sparse_designated_sets() {
        // n = 6, k = 2, t = 2; the closures of sparse sets violate density
        let a = left_shift(&fam(6, &[&[2, 6], &[3], &[1, 5]]));
        let b = left_shift(&fam(6, &[&[4, 6], &[2], &[3, 4]]));
        let qs = vec![ratio(1, 2), ratio(1, 2)];
        let fa = find_density_violator(&a, &qs[0], 2).unwrap();
        let fb = find_density_violator(&b, &qs[1], 2).unwrap();
        let fams = vec![a.clone(), b.clone()];
        match balls_and_bins_witness(&fams, &qs, 2, Some(&[fa, fb])).unwrap() {
            BallsAndBins::Tuple(g) => {
                assert!(a.contains(&g[0]) && b.contains(&g[1]));
                assert!((g[0].bits() & g[1].bits()).count_ones() <= 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn balls_and_bins_preconditions() {
        let f = fam(4, &[&[1, 2, 3, 4]]);
        let fams = vec![f.clone(), f];
        let qs = vec![ratio(1, 2), ratio(1, 2)];
        // full sets are dense everywhere; no violator exists
        assert_eq!(
            balls_and_bins_witness(&fams, &qs, 1, None),
            Err(SetFamError::NoViolator(0))
        );
        let low = vec![ratio(1, 4), ratio(1, 4)];
        assert!(matches!(
            balls_and_bins_witness(&fams, &low, 1, None),
            Err(SetFamError::BiasSumTooSmall(_))
        ));
    }

    #[test]
    fn small_measure_on_full_sets() {
        let n = 4;
        let full = SetFamily::from_bits(n, [0b1111]).unwrap();
        let fams = vec![full.clone(), full.clone(), full];
        let qs = vec![ratio(1, 3), ratio(1, 2), ratio(1, 4)];
        let delta = ratio(1, 10);
        let res = small_measure_index(&fams, &qs, &delta, n).unwrap();
        assert_eq!(res.index, 1);
        let p = Rational::one() - ratio(1, 2) - &delta;
        assert_eq!(res.measure, crate::rational::pow(&p, n));
    }

    #[test]
    fn small_measure_rejects_non_intersecting() {
        let fams = vec![fam(2, &[&[1]]), fam(2, &[&[2]])];
        let qs = vec![ratio(1, 2), ratio(1, 2)];
        assert!(matches!(
            small_measure_index(&fams, &qs, &ratio(1, 10), 1),
            Err(SetFamError::NotCrossIntersecting { .. })
        ));
    }

    #[test]
    fn small_measure_on_intersecting_pair() {
        // stars around element 1 and 2 over n = 8: every pair meets in {1,2}
        let n = 8;
        let mut a = SetFamily::new(n).unwrap();
        let mut b = SetFamily::new(n).unwrap();
        for bits in 0u64..256 {
            if bits & 0b11 == 0b11 {
                let s = GroundSubset::from_bits(n, bits).unwrap();
                if bits.count_ones() >= 6 {
                    a.insert(s);
                }
                if bits & 0b1100 == 0b1100 {
                    b.insert(s);
                }
            }
        }
        let qs = vec![ratio(1, 2), ratio(1, 2)];
        let res = small_measure_index(&[a, b], &qs, &ratio(1, 8), 2).unwrap();
        assert!(res.measure < ratio(1, 4));
    }
}
