//! The standard covering LP, solved exactly through its packing dual.
//!
//! `min Σ w_v x_v` s.t. `Σ_{v∈e} x_v >= 1`, `0 <= x <= 1` has the same optimum
//! as the version without upper bounds (weights are nonnegative), whose dual
//! `max Σ y_e` s.t. `Σ_{e∋v} y_e <= w_v`, `y >= 0` starts feasible at `y = 0`.
//! The primal solution is read off the dual's shadow prices and then
//! re-verified independently, together with strong duality.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::simplex::{maximize, SimplexOutcome};
use crate::hypergraph::{FractionalSolution, PartiteHypergraph};
use crate::rational::Rational;

/// Default bound on `vertices × edges` for the dense tableau.
pub const DEFAULT_LP_CELLS: usize = 4_000_000;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("LP has {cells} tableau cells, limit is {limit}")]
    TooLarge { cells: usize, limit: usize },
    #[error("instance has a negative vertex weight")]
    NegativeWeight,
    #[error("LP certificate check failed: {0}")]
    Certificate(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub solution: FractionalSolution,
    /// Optimal fractional edge packing (the dual certificate), one value per edge.
    pub packing: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn value(&self) -> &Rational {
        &self.solution.objective
    }
}

pub fn solve_lp(h: &PartiteHypergraph) -> Result<LpSolution, LpError> {
    solve_lp_with_limit(h, DEFAULT_LP_CELLS)
}

pub fn solve_lp_with_limit(h: &PartiteHypergraph, limit: usize) -> Result<LpSolution, LpError> {
    let nv = h.num_vertices();
    let ne = h.num_edges();
    if h.vertices().iter().any(|v| v.weight.is_negative()) {
        return Err(LpError::NegativeWeight);
    }
    let cells = nv.saturating_mul(ne + nv);
    if cells > limit {
        return Err(LpError::TooLarge { cells, limit });
    }
    let one = Rational::one();
    let rows: Vec<Vec<(usize, Rational)>> = h
        .incidence()
        .into_iter()
        .map(|es| es.into_iter().map(|e| (e, one.clone())).collect())
        .collect();
    let rhs: Vec<Rational> = h.vertices().iter().map(|v| v.weight.clone()).collect();
    let objective = vec![one.clone(); ne];
    let SimplexOutcome::Optimal(s) = maximize(ne, &objective, &rows, &rhs) else {
        return Err(LpError::Certificate("packing LP reported unbounded".into()));
    };
    let values: Vec<Rational> = s
        .dual
        .into_iter()
        .map(|x| if x > one { one.clone() } else { x })
        .collect();
    let solution = FractionalSolution::new(h, values).expect("one value per vertex");
    let out = LpSolution {
        solution,
        packing: s.primal,
        pivots: s.pivots,
    };
    verify(h, &out, &s.objective)?;
    Ok(out)
}

/// Primal feasibility, dual feasibility and equal objectives.
fn verify(h: &PartiteHypergraph, lp: &LpSolution, packing_value: &Rational) -> Result<(), LpError> {
    let issues = lp.solution.issues(h);
    if !issues.is_empty() {
        return Err(LpError::Certificate(format!("primal issues {issues:?}")));
    }
    if lp.packing.iter().any(|y| y.is_negative()) {
        return Err(LpError::Certificate("negative packing value".into()));
    }
    let mut load = vec![Rational::zero(); h.num_vertices()];
    for (edge, y) in h.edges().iter().zip(&lp.packing) {
        for &v in edge {
            load[v] += y;
        }
    }
    if let Some(v) = (0..h.num_vertices()).find(|&v| &load[v] > h.weight(v)) {
        return Err(LpError::Certificate(format!("packing overloads vertex {v}")));
    }
    let total: Rational = lp.packing.iter().sum();
    if &total != packing_value || total != lp.solution.objective {
        return Err(LpError::Certificate(format!(
            "duality gap: packing {total}, cover {}",
            lp.solution.objective
        )));
    }
    Ok(())
}
