//! Cover constructions from LP solutions, plus the maximal-matching cover.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::hypergraph::{CoverCertificate, FractionalSolution, PartiteHypergraph, VertexIdx};
use crate::rational::Rational;

/// Default cap on `grid tuples × (edges + 1)` for [`best_threshold_round`].
pub const DEFAULT_GRID_WORK: u128 = 50_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoundError {
    #[error("expected {k} thresholds, got {got}")]
    Arity { k: usize, got: usize },
    #[error("threshold {0} is not positive")]
    NonPositive(usize),
    #[error("thresholds sum to {0}, not 1")]
    Sum(String),
    #[error("fractional solution is not feasible")]
    Infeasible,
}

fn check_feasible(h: &PartiteHypergraph, x: &FractionalSolution) -> Result<(), RoundError> {
    if x.values.len() != h.num_vertices() || !x.is_feasible(h) {
        Err(RoundError::Infeasible)
    } else {
        Ok(())
    }
}

/// `{v in part i : x_v >= θ_i}`. With `Σθ = 1` every edge is hit, since an
/// edge missing the set would have `Σ x_v < Σ θ_i = 1`.
pub fn threshold_round(
    h: &PartiteHypergraph,
    x: &FractionalSolution,
    theta: &[Rational],
) -> Result<CoverCertificate, RoundError> {
    let k = h.k();
    if theta.len() != k {
        return Err(RoundError::Arity { k, got: theta.len() });
    }
    if let Some(i) = theta.iter().position(|t| !t.is_positive()) {
        return Err(RoundError::NonPositive(i));
    }
    let sum: Rational = theta.iter().sum();
    if !sum.is_one() {
        return Err(RoundError::Sum(crate::rational::format_rational(&sum)));
    }
    check_feasible(h, x)?;
    let mask: Vec<bool> = h
        .vertices()
        .iter()
        .zip(&x.values)
        .map(|(v, xv)| xv >= &theta[v.part])
        .collect();
    Ok(h.cover_certificate(&mask))
}

pub fn threshold_round_uniform(
    h: &PartiteHypergraph,
    x: &FractionalSolution,
) -> Result<CoverCertificate, RoundError> {
    let theta = vec![Rational::new(1.into(), h.k().into()); h.k()];
    threshold_round(h, x, &theta)
}

#[derive(Debug, Clone)]
pub struct BestRound {
    pub certificate: CoverCertificate,
    /// Per-part cut: vertices with `x_v >= cut` are taken; `None` takes none.
    pub cuts: Vec<Option<Rational>>,
    /// True when the grid was too large and uniform thresholds were used.
    pub fallback: bool,
    pub tuples: u128,
}

pub fn best_threshold_round(h: &PartiteHypergraph, x: &FractionalSolution) -> Result<BestRound, RoundError> {
    best_threshold_round_with_limit(h, x, DEFAULT_GRID_WORK)
}

/// Searches every tuple of per-part cuts drawn from the attained values
/// (plus 1 and "nothing") and keeps the lightest tuple that covers all edges.
pub fn best_threshold_round_with_limit(
    h: &PartiteHypergraph,
    x: &FractionalSolution,
    work_limit: u128,
) -> Result<BestRound, RoundError> {
    check_feasible(h, x)?;
    let k = h.k();
    // candidates[p][0] is "nothing"; candidates[p][c] for c >= 1 descends
    let mut candidates: Vec<Vec<Rational>> = Vec::with_capacity(k);
    for part in h.parts() {
        let mut vals: Vec<Rational> = part.iter().map(|&v| x.values[v].clone()).collect();
        vals.push(Rational::one());
        vals.sort_unstable_by(|a, b| b.cmp(a));
        vals.dedup();
        candidates.push(vals);
    }
    let tuples = candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128 + 1));
    let work = tuples.and_then(|t| t.checked_mul(h.num_edges() as u128 + 1));
    if work.is_none_or(|w| w > work_limit) {
        let c = threshold_round_uniform(h, x)?;
        let cut = Rational::new(1.into(), k.into());
        return Ok(BestRound {
            certificate: c,
            cuts: vec![Some(cut); k],
            fallback: true,
            tuples: 0,
        });
    }
    let tuples = tuples.unwrap_or(0);

    // rank[v] = smallest cut index that includes v
    let rank: Vec<usize> = (0..h.num_vertices())
        .map(|v| {
            let part = h.vertex(v).part;
            1 + candidates[part].iter().position(|c| c == &x.values[v]).expect("value is a candidate")
        })
        .collect();
    // part_weight[p][c]: weight of part p taken at cut index c
    let part_weight: Vec<Vec<Rational>> = (0..k)
        .map(|p| {
            (0..=candidates[p].len())
                .map(|c| {
                    h.parts()[p]
                        .iter()
                        .filter(|&&v| rank[v] <= c)
                        .map(|&v| h.weight(v).clone())
                        .sum()
                })
                .collect()
        })
        .collect();

    let covers = |cut: &[usize]| {
        h.edges()
            .iter()
            .all(|e| e.iter().any(|&v: &VertexIdx| cut[h.vertex(v).part] >= rank[v]))
    };
    let mut cut = vec![0usize; k];
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for _ in 0..tuples {
        if covers(&cut) {
            let w: Rational = (0..k).map(|p| &part_weight[p][cut[p]]).sum();
            if best.as_ref().is_none_or(|(bw, _)| &w < bw) {
                best = Some((w, cut.clone()));
            }
        }
        // mixed-radix increment, last part fastest
        for p in (0..k).rev() {
            cut[p] += 1;
            if cut[p] <= candidates[p].len() {
                break;
            }
            cut[p] = 0;
        }
    }
    let (_, cut) = best.expect("taking every vertex covers all edges");
    let mask: Vec<bool> = (0..h.num_vertices()).map(|v| cut[h.vertex(v).part] >= rank[v]).collect();
    Ok(BestRound {
        certificate: h.cover_certificate(&mask),
        cuts: (0..k)
            .map(|p| (cut[p] > 0).then(|| candidates[p][cut[p] - 1].clone()))
            .collect(),
        fallback: false,
        tuples,
    })
}

#[derive(Debug, Clone)]
pub struct GreedyCover {
    pub certificate: CoverCertificate,
    /// The maximal disjoint edge collection, in scan order.
    pub matching: Vec<usize>,
    /// The k-approximation guarantee only applies to unit weights.
    pub unit_weight: bool,
}

/// Scans edges in order, keeping each edge disjoint from those kept so far,
/// and covers with every vertex of the kept edges.
pub fn greedy_matching_cover(h: &PartiteHypergraph) -> GreedyCover {
    let mut used = vec![false; h.num_vertices()];
    let mut matching = Vec::new();
    for (e, edge) in h.edges().iter().enumerate() {
        if edge.iter().all(|&v| !used[v]) {
            for &v in edge {
                used[v] = true;
            }
            matching.push(e);
        }
    }
    GreedyCover {
        certificate: h.cover_certificate(&used),
        matching,
        unit_weight: h.is_unit_weight(),
    }
}

/// `num / den`, or `None` when `den` is zero.
pub fn ratio_or_none(num: &Rational, den: &Rational) -> Option<Rational> {
    (!den.is_zero()).then(|| num / den)
}
