//! Exact minimum-weight vertex cover by branch and bound.
//!
//! Weights are scaled by the common denominator to integers. The root is
//! bounded by the exact LP optimum; inner nodes use a greedy fractional
//! packing over the still-free vertices. Branching takes the uncovered edge
//! with the fewest free vertices and tries each of them in id order, the
//! `i`-th branch excluding the earlier ones.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::lp::{solve_lp, LpError};
use super::rounding::threshold_round_uniform;
use crate::hypergraph::{CoverCertificate, PartiteHypergraph};
use crate::rational::{common_denominator, Rational};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("scaled weights exceed the exact search range")]
    WeightRange,
}

#[derive(Debug, Clone)]
pub struct ExactCover {
    pub certificate: CoverCertificate,
    /// False when the node budget ran out before the tree was exhausted.
    pub optimal: bool,
    pub nodes: u64,
    pub lp_value: Rational,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Free,
    In,
    Out,
}

struct Search<'a> {
    edges: &'a [Vec<usize>],
    weights: Vec<i128>,
    state: Vec<State>,
    best: i128,
    best_mask: Vec<bool>,
    nodes: u64,
    budget: u64,
    exhausted_budget: bool,
    root_bound: i128,
}

impl Search<'_> {
    fn run(&mut self, current: i128) {
        if self.exhausted_budget || self.best <= self.root_bound {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted_budget = true;
            return;
        }
        // greedy packing bound on the uncovered part, and a branching edge
        let mut residual: Vec<i128> = self.weights.clone();
        let mut bound = current;
        let mut branch: Option<(usize, usize)> = None;
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.iter().any(|&v| self.state[v] == State::In) {
                continue;
            }
            let mut free = 0;
            let mut slack = i128::MAX;
            for &v in edge {
                if self.state[v] == State::Free {
                    free += 1;
                    slack = slack.min(residual[v]);
                }
            }
            if free == 0 {
                return;
            }
            if branch.is_none_or(|(_, f)| free < f) {
                branch = Some((e, free));
            }
            if slack > 0 {
                for &v in edge {
                    if self.state[v] == State::Free {
                        residual[v] -= slack;
                    }
                }
                bound += slack;
            }
        }
        let Some((e, _)) = branch else {
            if current < self.best {
                self.best = current;
                self.best_mask = self.state.iter().map(|&s| s == State::In).collect();
            }
            return;
        };
        if bound >= self.best {
            return;
        }
        let free: Vec<usize> = self.edges[e]
            .iter()
            .copied()
            .filter(|&v| self.state[v] == State::Free)
            .collect();
        for &v in &free {
            self.state[v] = State::In;
            self.run(current + self.weights[v]);
            self.state[v] = State::Out;
            if self.exhausted_budget {
                break;
            }
        }
        for &v in &free {
            self.state[v] = State::Free;
        }
    }
}

pub fn exact_min_vc(h: &PartiteHypergraph) -> Result<ExactCover, ExactError> {
    exact_min_vc_with_budget(h, DEFAULT_NODE_BUDGET)
}

pub fn exact_min_vc_with_budget(h: &PartiteHypergraph, budget: u64) -> Result<ExactCover, ExactError> {
    let lp = solve_lp(h)?;
    let scale = common_denominator(h.vertices().iter().map(|v| &v.weight));
    let to_int = |r: &Rational| -> Result<i128, ExactError> {
        let scaled: BigInt = (r * Rational::from_integer(scale.clone())).to_integer();
        scaled.to_i128().ok_or(ExactError::WeightRange)
    };
    let weights: Vec<i128> = h
        .vertices()
        .iter()
        .map(|v| to_int(&v.weight))
        .collect::<Result<_, _>>()?;
    let total = weights
        .iter()
        .try_fold(0i128, |acc, &w| acc.checked_add(w))
        .ok_or(ExactError::WeightRange)?;
    if total > i128::MAX / 4 {
        return Err(ExactError::WeightRange);
    }
    let lp_scaled = &lp.solution.objective * Rational::from_integer(scale.clone());
    let root_bound = lp_scaled.ceil().to_integer().to_i128().ok_or(ExactError::WeightRange)?;

    let incumbent = threshold_round_uniform(h, &lp.solution).expect("LP solution is feasible");
    let mut best_mask = h.mask_of(incumbent.vertex_set.iter()).expect("ids come from h");
    let mut best: i128 = (0..h.num_vertices()).filter(|&v| best_mask[v]).map(|v| weights[v]).sum();
    if h.num_edges() == 0 {
        best_mask = vec![false; h.num_vertices()];
        best = 0;
    }

    let mut search = Search {
        edges: h.edges(),
        weights,
        state: vec![State::Free; h.num_vertices()],
        best,
        best_mask,
        nodes: 0,
        budget,
        exhausted_budget: false,
        root_bound,
    };
    search.run(0);
    let optimal = !search.exhausted_budget;
    let certificate = h.cover_certificate(&search.best_mask);
    debug_assert!(h.first_uncovered(&search.best_mask).is_none());
    debug_assert!(certificate.weight.is_zero() || search.best > 0);
    Ok(ExactCover {
        certificate,
        optimal,
        nodes: search.nodes,
        lp_value: lp.solution.objective,
    })
}
