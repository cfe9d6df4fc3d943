//! Exact LP relaxation, exact minimum cover, and cover heuristics.

pub mod bnb;
pub mod lp;
pub mod report;
pub mod rounding;
pub mod simplex;

pub use bnb::{exact_min_vc, exact_min_vc_with_budget, ExactCover, ExactError, DEFAULT_NODE_BUDGET};
pub use lp::{solve_lp, solve_lp_with_limit, LpError, LpSolution};
pub use report::{solve, SolveError, SolveMode, SolveReport};
pub use rounding::{
    best_threshold_round, greedy_matching_cover, threshold_round, threshold_round_uniform, BestRound, GreedyCover,
    RoundError,
};
