use std::collections::{BTreeMap, BTreeSet};

use super::SetFamError;

/// Collections up to this size get their disjointness bound verified exhaustively.
pub const EXHAUSTIVE_DISJOINT_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Popular {
    pub element: usize,
    pub count: usize,
    /// `count * T * D >= N`
    pub meets_bound: bool,
}

/// Largest number of pairwise disjoint sets in the collection (at most 64 sets).
pub fn max_disjoint_subcollection(sets: &[BTreeSet<usize>]) -> usize {
    assert!(sets.len() <= 64, "exhaustive disjointness is limited to 64 sets");
    let n = sets.len();
    // conflict[i]: sets that intersect set i
    let conflict: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && !sets[i].is_disjoint(&sets[j]))
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect();
    fn go(avail: u64, size: usize, best: &mut usize, conflict: &[u64]) {
        if avail == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + avail.count_ones() as usize <= *best {
            return;
        }
        let i = avail.trailing_zeros() as usize;
        let rest = avail & !(1 << i);
        go(rest & !conflict[i], size + 1, best, conflict);
        go(rest, size, best, conflict);
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0;
    go(all, 0, &mut best, &conflict);
    best
}

/// An element lying in at least `N / (T·D)` of the `N` sets, ties to the smallest.
pub fn popular_element(
    sets: &[BTreeSet<usize>],
    max_size: usize,
    max_disjoint: usize,
) -> Result<Popular, SetFamError> {
    if sets.is_empty() {
        return Err(SetFamError::EmptyCollection);
    }
    if max_size == 0 || max_disjoint == 0 {
        return Err(SetFamError::NonPositive);
    }
    for (index, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(SetFamError::EmptySet(index));
        }
        if s.len() > max_size {
            return Err(SetFamError::SetTooLarge { index, size: s.len(), bound: max_size });
        }
    }
    if sets.len() <= EXHAUSTIVE_DISJOINT_LIMIT {
        let found = max_disjoint_subcollection(sets);
        if found > max_disjoint {
            return Err(SetFamError::DisjointBoundViolated { found, bound: max_disjoint });
        }
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in sets {
        for &e in s {
            *counts.entry(e).or_default() += 1;
        }
    }
    let (element, count) = counts
        .iter()
        .fold((usize::MAX, 0usize), |(be, bc), (&e, &c)| if c > bc { (e, c) } else { (be, bc) });
    Ok(Popular {
        element,
        count,
        meets_bound: count * max_size * max_disjoint >= sets.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(lists: &[&[usize]]) -> Vec<BTreeSet<usize>> {
        lists.iter().map(|l| l.iter().copied().collect()).collect()
    }

    #[test]
    fn small_examples() {
        let p = popular_element(&sets(&[&[1], &[1], &[2]]), 1, 2).unwrap();
        assert_eq!((p.element, p.count), (1, 2));
        assert!(p.meets_bound);

        let same = vec![BTreeSet::from([5]); 7];
        let p = popular_element(&same, 1, 1).unwrap();
        assert_eq!((p.element, p.count), (5, 7));
    }

    #[test]
    fn ties_go_to_smallest() {
        let p = popular_element(&sets(&[&[3, 4], &[4, 3]]), 2, 1).unwrap();
        assert_eq!(p.element, 3);
    }

    #[test]
    fn error_paths() {
        assert_eq!(popular_element(&[], 1, 1), Err(SetFamError::EmptyCollection));
        assert!(matches!(
            popular_element(&sets(&[&[1, 2]]), 1, 1),
            Err(SetFamError::SetTooLarge { .. })
        ));
        assert!(matches!(
            popular_element(&sets(&[&[1], &[2]]), 1, 1),
            Err(SetFamError::DisjointBoundViolated { found: 2, bound: 1 })
        ));
        assert_eq!(popular_element(&sets(&[&[]]), 1, 1), Err(SetFamError::EmptySet(0)));
    }

    #[test]
    fn disjoint_count_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let coll: Vec<BTreeSet<usize>> = (0..12)
                .map(|_| (0..3).map(|_| rng.gen_range(1..=10)).collect())
                .collect();
            let brute = (0u32..1 << coll.len())
                .filter(|mask| {
                    let chosen: Vec<&BTreeSet<usize>> =
                        (0..coll.len()).filter(|i| mask >> i & 1 == 1).map(|i| &coll[i]).collect();
                    chosen
                        .iter()
                        .enumerate()
                        .all(|(a, x)| chosen[a + 1..].iter().all(|y| x.is_disjoint(y)))
                })
                .map(|m| m.count_ones() as usize)
                .max()
                .unwrap();
            assert_eq!(max_disjoint_subcollection(&coll), brute);
        }
    }

    #[test]
    fn random_collections_meet_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let coll: Vec<BTreeSet<usize>> = (0..20)
                .map(|_| (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=10)).collect())
                .collect();
            let t = coll.iter().map(|s| s.len()).max().unwrap();
            let d = max_disjoint_subcollection(&coll);
            let p = popular_element(&coll, t, d).unwrap();
            assert!(p.count * t * d >= coll.len());
        }
    }
}
