use serde::Serialize;

use super::bnb::{exact_min_vc_with_budget, ExactError};
use super::lp::{solve_lp, LpError};
use super::rounding::{best_threshold_round, greedy_matching_cover, ratio_or_none, RoundError};
use crate::hypergraph::PartiteHypergraph;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Lp,
    Exact,
    Round,
    Greedy,
    All,
}

impl SolveMode {
    fn exact(self) -> bool {
        matches!(self, SolveMode::Exact | SolveMode::All)
    }
    fn round(self) -> bool {
        matches!(self, SolveMode::Round | SolveMode::All)
    }
    fn greedy(self) -> bool {
        matches!(self, SolveMode::Greedy | SolveMode::All)
    }
}

impl std::str::FromStr for SolveMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lp" => Ok(SolveMode::Lp),
            "exact" => Ok(SolveMode::Exact),
            "round" => Ok(SolveMode::Round),
            "greedy" => Ok(SolveMode::Greedy),
            "all" => Ok(SolveMode::All),
            other => Err(format!("unknown mode {other:?} (lp|exact|round|greedy|all)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Round(#[from] RoundError),
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverStats {
    pub pivots: usize,
    pub nodes: Option<u64>,
    pub grid_tuples: Option<u128>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub instance: String,
    pub k: usize,
    #[serde(with = "rational::serde_str")]
    pub lp_value: Rational,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub vc_exact: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc_optimal: Option<bool>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub rounded_cover_weight: Option<Rational>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub greedy_cover_weight: Option<Rational>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub vc_over_lp: Option<Rational>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub rounded_over_lp: Option<Rational>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub greedy_over_lp: Option<Rational>,
    pub stats: SolverStats,
}

impl SolveReport {
    /// `k/2`, the bound `vc/lp` must respect.
    pub fn half_k(&self) -> Rational {
        Rational::new(self.k.into(), 2.into())
    }

    /// Everything that must hold among the present values: the chain
    /// `lp <= vc <= rounded`, `lp <= greedy`, and `vc/lp <= k/2` when the
    /// exact value is proven optimal.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let lp = &self.lp_value;
        if let Some(vc) = &self.vc_exact {
            if vc < lp {
                out.push(format!("vc {vc} below lp {lp}"));
            }
            if let Some(r) = &self.rounded_cover_weight {
                if self.vc_optimal == Some(true) && r < vc {
                    out.push(format!("rounded {r} below optimal vc {vc}"));
                }
            }
            if self.vc_optimal == Some(true) {
                if let Some(ratio) = &self.vc_over_lp {
                    if ratio > &self.half_k() {
                        out.push(format!("vc/lp {ratio} exceeds k/2"));
                    }
                }
            }
        }
        for (name, w) in [("rounded", &self.rounded_cover_weight), ("greedy", &self.greedy_cover_weight)] {
            if let Some(w) = w {
                if w < lp {
                    out.push(format!("{name} {w} below lp {lp}"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn table_header() -> String {
        format!(
            "{:<24} {:>14} {:>14} {:>14} {:>10} {:>6}",
            "instance", "lp", "vc", "vc/lp", "~vc/lp", "k/2"
        )
    }

    pub fn table_row(&self) -> String {
        let show = |r: &Option<Rational>| r.as_ref().map(rational::format_rational).unwrap_or_else(|| "-".into());
        let approx = self
            .vc_over_lp
            .as_ref()
            .map(|r| format!("{:.4}", rational::to_f64(r)))
            .unwrap_or_else(|| "-".into());
        let vc = match (&self.vc_exact, self.vc_optimal) {
            (Some(v), Some(false)) => format!("<={}", rational::format_rational(v)),
            _ => show(&self.vc_exact),
        };
        format!(
            "{:<24} {:>14} {:>14} {:>14} {:>10} {:>6}",
            self.instance,
            rational::format_rational(&self.lp_value),
            vc,
            show(&self.vc_over_lp),
            approx,
            rational::format_rational(&self.half_k()),
        )
    }
}

pub fn solve(h: &PartiteHypergraph, instance: &str, mode: SolveMode, node_budget: u64) -> Result<SolveReport, SolveError> {
    let lp = solve_lp(h)?;
    let lp_value = lp.value().clone();
    let mut stats = SolverStats {
        pivots: lp.pivots,
        ..Default::default()
    };
    let (mut vc_exact, mut vc_optimal) = (None, None);
    if mode.exact() {
        let c = exact_min_vc_with_budget(h, node_budget)?;
        stats.nodes = Some(c.nodes);
        vc_exact = Some(c.certificate.weight);
        vc_optimal = Some(c.optimal);
    }
    let rounded_cover_weight = if mode.round() {
        let b = best_threshold_round(h, &lp.solution)?;
        stats.grid_tuples = Some(b.tuples);
        Some(b.certificate.weight)
    } else {
        None
    };
    let greedy_cover_weight = mode.greedy().then(|| greedy_matching_cover(h).certificate.weight);
    let over_lp = |w: &Option<Rational>| w.as_ref().and_then(|w| ratio_or_none(w, &lp_value));
    Ok(SolveReport {
        instance: instance.to_string(),
        k: h.k(),
        vc_over_lp: over_lp(&vc_exact),
        rounded_over_lp: over_lp(&rounded_cover_weight),
        greedy_over_lp: over_lp(&greedy_cover_weight),
        lp_value,
        vc_exact,
        vc_optimal,
        rounded_cover_weight,
        greedy_cover_weight,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn single_edge_report() {
        let mut h = PartiteHypergraph::new(2);
        let a = h.add_vertex(0, "1/a", int(1)).unwrap();
        let b = h.add_vertex(1, "2/b", int(1)).unwrap();
        h.add_edge(vec![a, b]).unwrap();
        let r = solve(&h, "edge", SolveMode::All, 1000).unwrap();
        assert_eq!(r.lp_value, int(1));
        assert_eq!(r.vc_exact, Some(int(1)));
        assert_eq!(r.greedy_cover_weight, Some(int(2)));
        assert!(r.violations().is_empty());
        let json = r.to_json();
        assert!(json.contains("\"lpValue\": \"1/1\""));
        assert!(r.table_row().contains("1/1"));
    }

    #[test]
    fn edgeless_has_no_ratios() {
        let mut h = PartiteHypergraph::new(2);
        h.add_vertex(0, "1/a", int(1)).unwrap();
        let r = solve(&h, "empty", SolveMode::All, 1000).unwrap();
        assert_eq!(r.vc_exact, Some(int(0)));
        assert_eq!(r.vc_over_lp, None);
    }
}
