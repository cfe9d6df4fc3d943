//! Integrality-gap instances for the covering LP on k-partite hypergraphs.
//!
//! Part `i` holds `x_{i,1..r}` with LP value `2j/(rk)` and `rk+1`
//! interchangeable `y`-vertices with value 0; a tuple is an edge iff its
//! values sum to at least 1. The quotient instance keeps one `y` per part
//! with weight `rk+1`, so covers still cannot profit from `y`-vertices.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::hypergraph::{FractionalSolution, PartiteHypergraph, VertexIdx};
use crate::optimize::{exact_min_vc_with_budget, solve_lp, ExactError, LpError};
use crate::rational::{self, Rational};

pub const DEFAULT_EDGE_BUDGET: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum GapError {
    #[error("need r >= 1 and k >= 3, got r = {r}, k = {k}")]
    Params { r: u64, k: usize },
    #[error("instance would have {edges} edges, budget is {budget}")]
    Budget { edges: u128, budget: u64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone)]
pub struct AhkInstance {
    pub r: u64,
    pub k: usize,
    pub full: bool,
    pub hypergraph: PartiteHypergraph,
    /// The LP solution `h` the construction is built around.
    pub cert: FractionalSolution,
}

/// LP value of `x_{ij}`.
pub fn x_value(r: u64, k: usize, j: u64) -> Rational {
    Rational::new((2 * j).into(), (r * k as u64).into())
}

pub fn build_ahk(r: u64, k: usize, full: bool) -> Result<AhkInstance, GapError> {
    build_ahk_with_budget(r, k, full, DEFAULT_EDGE_BUDGET)
}

pub fn build_ahk_with_budget(r: u64, k: usize, full: bool, budget: u64) -> Result<AhkInstance, GapError> {
    if r == 0 || k < 3 {
        return Err(GapError::Params { r, k });
    }
    let ys = r * k as u64 + 1;
    // choice c in 0..r is x_{c+1}, choice r is "some y"
    let choices = r + 1;
    let mut patterns: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; k];
    'patterns: loop {
        // sum of 2j/(rk) >= 1  <=>  sum of 2j >= rk
        let s: u64 = cur.iter().filter(|&&c| c < r).map(|&c| 2 * (c + 1)).sum();
        if s >= r * k as u64 {
            patterns.push(cur.clone());
        }
        for p in (0..k).rev() {
            cur[p] += 1;
            if cur[p] < choices {
                continue 'patterns;
            }
            cur[p] = 0;
        }
        break;
    }
    let expansion = |pat: &Vec<u64>| -> u128 {
        let y_count = pat.iter().filter(|&&c| c == r).count() as u32;
        if full {
            (ys as u128).pow(y_count)
        } else {
            1
        }
    };
    let edges: u128 = patterns.iter().map(expansion).sum();
    if edges > budget as u128 {
        return Err(GapError::Budget { edges, budget });
    }

    let mut h = PartiteHypergraph::new(k);
    let mut value: HashMap<String, Rational> = HashMap::new();
    let mut xs: Vec<Vec<VertexIdx>> = vec![Vec::new(); k];
    let mut yv: Vec<Vec<VertexIdx>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in 1..=r {
            let id = format!("{}/x:{j}", i + 1);
            xs[i].push(h.add_vertex(i, id.clone(), Rational::from_integer(1.into())).expect("fresh id"));
            value.insert(id, x_value(r, k, j));
        }
        if full {
            for l in 1..=ys {
                let id = format!("{}/y:{l}", i + 1);
                yv[i].push(h.add_vertex(i, id.clone(), Rational::from_integer(1.into())).expect("fresh id"));
                value.insert(id, Rational::zero());
            }
        } else {
            let id = format!("{}/y", i + 1);
            yv[i].push(h.add_vertex(i, id.clone(), Rational::from_integer(ys.into())).expect("fresh id"));
            value.insert(id, Rational::zero());
        }
    }
    for pat in &patterns {
        let slots: Vec<&[VertexIdx]> = pat
            .iter()
            .enumerate()
            .map(|(i, &c)| if c < r { &xs[i][c as usize..c as usize + 1] } else { &yv[i][..] })
            .collect();
        let mut idx = vec![0usize; k];
        'expand: loop {
            h.add_edge((0..k).map(|i| slots[i][idx[i]]).collect()).expect("indices in range");
            for p in (0..k).rev() {
                idx[p] += 1;
                if idx[p] < slots[p].len() {
                    continue 'expand;
                }
                idx[p] = 0;
            }
            break;
        }
    }
    let hypergraph = h.canonicalize();
    let values = hypergraph.vertices().iter().map(|v| value[&v.id].clone()).collect();
    let cert = FractionalSolution::new(&hypergraph, values).expect("one value per vertex");
    Ok(AhkInstance {
        r,
        k,
        full,
        hypergraph,
        cert,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GapReport {
    pub r: u64,
    pub k: usize,
    pub full: bool,
    pub vertices: usize,
    pub edges: usize,
    #[serde(with = "rational::serde_str")]
    pub lp: Rational,
    #[serde(with = "rational::serde_str")]
    pub cert_objective: Rational,
    pub cert_feasible: bool,
    /// `lp == r + 1`.
    pub lp_equals_r_plus_one: bool,
    pub vc_lower: u64,
    #[serde(with = "rational::serde_opt_str")]
    pub vc_exact: Option<Rational>,
    pub vc_optimal: bool,
    pub nodes: u64,
    /// `vc / lp`, using `vcLower` when the exact search did not finish.
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
    /// `rk / (2(r+1))`.
    #[serde(with = "rational::serde_str")]
    pub ratio_bound: Rational,
    pub x_vertices_cover: bool,
}

impl GapReport {
    /// Checks that hold for every instance regardless of the LP optimum.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let r1 = Rational::from_integer((self.r + 1).into());
        if self.cert_objective != r1 {
            out.push(format!("certificate objective {} is not r+1", self.cert_objective));
        }
        if !self.cert_feasible {
            out.push("certificate infeasible".into());
        }
        if self.lp > r1 {
            out.push(format!("lp {} exceeds r+1", self.lp));
        }
        if let Some(vc) = &self.vc_exact {
            if self.vc_optimal {
                let lower = Rational::from_integer(self.vc_lower.into());
                if vc < &lower {
                    out.push(format!("vc {vc} below {}", self.vc_lower));
                }
                if vc > &Rational::from_integer((self.r * self.k as u64).into()) {
                    out.push(format!("vc {vc} above rk"));
                }
            }
        }
        if self.ratio < self.ratio_bound {
            out.push(format!("ratio {} below {}", self.ratio, self.ratio_bound));
        }
        if !self.x_vertices_cover {
            out.push("x-vertices do not cover".into());
        }
        out
    }

    pub fn table(&self) -> String {
        let f = rational::format_rational;
        format!(
            "{:>3} {:>3} {:>6} {:>8} {:>8} {:>8} {:>8} {:>10} {:>10} {:>8}\n{:>3} {:>3} {:>6} {:>8} {:>8} {:>8} {:>8} {:>10} {:>10} {:>8.4}\n",
            "r", "k", "edges", "lp", "cert", "vcLower", "vc", "ratio", "bound", "~ratio",
            self.r,
            self.k,
            self.edges,
            f(&self.lp),
            f(&self.cert_objective),
            self.vc_lower,
            self.vc_exact.as_ref().map(f).unwrap_or_else(|| "-".into()),
            f(&self.ratio),
            f(&self.ratio_bound),
            rational::to_f64(&self.ratio),
        )
    }
}

pub fn verify_gap(inst: &AhkInstance, node_budget: u64) -> Result<GapReport, GapError> {
    let h = &inst.hypergraph;
    let (r, k) = (inst.r, inst.k);
    let lp = solve_lp(h)?.solution.objective;
    let exact = exact_min_vc_with_budget(h, node_budget)?;
    let rk = r * k as u64;
    let vc_lower = rk.div_ceil(2);
    let x_mask: Vec<bool> = h.vertices().iter().map(|v| v.id.contains("/x:")).collect();
    let x_vertices_cover = h.first_uncovered(&x_mask).is_none();
    let vc_exact = Some(exact.certificate.weight.clone());
    let numerator = if exact.optimal {
        exact.certificate.weight.clone()
    } else {
        Rational::from_integer(vc_lower.into())
    };
    let ratio = if lp.is_zero() { Rational::zero() } else { &numerator / &lp };
    let r1 = Rational::from_integer((r + 1).into());
    Ok(GapReport {
        r,
        k,
        full: inst.full,
        vertices: h.num_vertices(),
        edges: h.num_edges(),
        lp_equals_r_plus_one: lp == r1,
        lp,
        cert_objective: inst.cert.objective.clone(),
        cert_feasible: inst.cert.is_feasible(h),
        vc_lower,
        vc_exact,
        vc_optimal: exact.optimal,
        nodes: exact.nodes,
        ratio,
        ratio_bound: Rational::new(rk.into(), (2 * (r + 1)).into()),
        x_vertices_cover,
    })
}

/// Edge count of the quotient instance, by direct enumeration of value tuples.
pub fn quotient_edge_count(r: u64, k: usize) -> u64 {
    build_ahk(r, k, false).map(|i| i.hypergraph.num_edges() as u64).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn naive_edges(r: u64, k: usize, full: bool) -> BTreeSet<Vec<String>> {
        // every one-per-part tuple, filtered by the value-sum rule
        let ys = r * k as u64 + 1;
        let mut part: Vec<(String, Rational)> = Vec::new();
        let mut parts = Vec::new();
        for i in 1..=k {
            part.clear();
            for j in 1..=r {
                part.push((format!("{i}/x:{j}"), Rational::new((2 * j).into(), (r * k as u64).into())));
            }
            if full {
                for l in 1..=ys {
                    part.push((format!("{i}/y:{l}"), Rational::zero()));
                }
            } else {
                part.push((format!("{i}/y"), Rational::zero()));
            }
            parts.push(part.clone());
        }
        let mut out = BTreeSet::new();
        let mut idx = vec![0usize; k];
        'outer: loop {
            let s: Rational = (0..k).map(|i| &parts[i][idx[i]].1).sum();
            if s >= Rational::from_integer(1.into()) {
                out.insert((0..k).map(|i| parts[i][idx[i]].0.clone()).collect());
            }
            for p in (0..k).rev() {
                idx[p] += 1;
                if idx[p] < parts[p].len() {
                    continue 'outer;
                }
                idx[p] = 0;
            }
            break;
        }
        out
    }

    fn edge_ids(h: &PartiteHypergraph) -> BTreeSet<Vec<String>> {
        (0..h.num_edges()).map(|e| h.edge_ids(e)).collect()
    }

    #[test]
    fn edge_sets_match_naive_filter() {
        for (r, k) in [(1, 3), (2, 3), (3, 3), (2, 4), (1, 4)] {
            for full in [false, true] {
                let inst = build_ahk(r, k, full).unwrap();
                assert!(inst.hypergraph.validate().is_empty());
                assert_eq!(edge_ids(&inst.hypergraph), naive_edges(r, k, full), "r={r} k={k} full={full}");
            }
        }
    }

    #[test]
    fn r1_k3_structure() {
        let inst = build_ahk(1, 3, false).unwrap();
        // the triple of x's plus the three tuples with a single y
        assert_eq!(inst.hypergraph.num_edges(), 4);
        assert_eq!(build_ahk(1, 3, true).unwrap().hypergraph.num_edges(), 1 + 3 * 4);
        assert_eq!(edge_ids(&inst.hypergraph).iter().filter(|e| e.iter().all(|v| v.contains("/y"))).count(), 0);
    }

    #[test]
    fn pinned_edge_counts() {
        assert_eq!(build_ahk(2, 3, true).unwrap().hypergraph.num_edges(), 71);
        assert_eq!(quotient_edge_count(2, 3), 17);
    }

    #[test]
    fn cert_objective_is_r_plus_one() {
        for (r, k) in [(1, 3), (2, 3), (3, 3), (2, 4), (4, 5)] {
            for full in [false, true] {
                let Ok(inst) = build_ahk(r, k, full) else { continue };
                assert_eq!(inst.cert.objective, Rational::from_integer((r + 1).into()));
                assert!(inst.cert.is_feasible(&inst.hypergraph));
            }
        }
    }

    #[test]
    fn same_part_y_vertices_share_neighborhoods() {
        let inst = build_ahk(2, 3, true).unwrap();
        let h = &inst.hypergraph;
        for i in 0..3 {
            let ys: Vec<usize> = h.parts()[i].iter().copied().filter(|&v| h.vertex(v).id.contains("/y:")).collect();
            let nbhd = |y: usize| -> BTreeSet<Vec<usize>> {
                h.edges()
                    .iter()
                    .filter(|e| e.contains(&y))
                    .map(|e| e.iter().copied().filter(|&v| v != y).collect())
                    .collect()
            };
            let first = nbhd(ys[0]);
            assert!(!first.is_empty());
            for &y in &ys[1..] {
                assert_eq!(nbhd(y), first);
            }
        }
    }

    #[test]
    fn all_y_selection_is_independent() {
        let inst = build_ahk(2, 3, true).unwrap();
        let h = &inst.hypergraph;
        let ys: Vec<&str> = h.vertices().iter().map(|v| v.id.as_str()).filter(|id| id.contains("/y")).collect();
        assert!(h.is_independent(ys).unwrap());
    }

    #[test]
    fn gap_report_r2_k3() {
        let inst = build_ahk(2, 3, false).unwrap();
        let rep = verify_gap(&inst, 1_000_000).unwrap();
        assert_eq!(rep.lp, Rational::from_integer(3.into()));
        assert!(rep.vc_optimal);
        assert!(rep.violations().is_empty(), "{:?}", rep.violations());
    }

    #[test]
    fn quotient_and_full_agree() {
        for (r, k) in [(1, 3), (2, 3)] {
            let q = verify_gap(&build_ahk(r, k, false).unwrap(), 1_000_000).unwrap();
            let f = verify_gap(&build_ahk(r, k, true).unwrap(), 1_000_000).unwrap();
            assert_eq!(q.lp, f.lp);
            assert_eq!(q.vc_exact, f.vc_exact);
        }
    }

    #[test]
    fn bad_params_and_budget() {
        assert!(matches!(build_ahk(0, 3, false), Err(GapError::Params { .. })));
        assert!(matches!(build_ahk(1, 2, false), Err(GapError::Params { .. })));
        assert!(matches!(build_ahk_with_budget(3, 3, true, 10), Err(GapError::Budget { .. })));
    }
}
