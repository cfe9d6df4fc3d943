//! The biased Long Code reduction from a layered label-cover instance to
//! weighted vertex cover on (k+1)-partite (k+1)-uniform hypergraphs.
//!
//! Every variable `x` gets `r(k+1)` Long Code blocks `H^x_{ij}`, one per part
//! `i` and bias index `j`, each holding all subsets of `x`'s label range with
//! weight proportional to `μ_{p_j}`. Part `i` also holds a dummy `d_i` of
//! weight 2. Ids are `"{i}/H:{x},{i},{j},{mask}"` and `"{i}/d"`, parts and
//! bias indices 1-based, the mask having bit `a` set iff label `a` is in the
//! subset.

mod build;
mod complete;
mod decode;
#[cfg(test)]
mod tests;

pub use build::{build_reduction, build_reduction_with_budget, candidate_count, ReductionInstance};
pub use complete::{completeness_certificate, completeness_weight, Completeness};
pub use decode::{
    block_measures, decode_all, decode_labeling, good_sequence, mask_from_ids, significant_blocks,
    witness_threshold, x_prime_bound, DecodeReport, GoodSequence, PairDecode, Significance, TargetDecode,
    VarDecode, VarStatus,
};

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pcp::PcpError;
use crate::rational::{self, Rational};
use crate::setfam::SetFamError;

/// Default cap on enumerated candidate tuples.
pub const DEFAULT_CANDIDATE_BUDGET: u128 = 20_000_000;
/// Largest label range a Long Code block is built over.
pub const MAX_BLOCK_RANGE: usize = 12;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("bad parameters: {0}")]
    Params(String),
    #[error("instance needs {candidates} candidate tuples, budget is {budget}")]
    Budget { candidates: u128, budget: u128 },
    #[error("label range {0} is too large for a Long Code block")]
    RangeTooLarge(usize),
    #[error("layer {0} has no variables")]
    EmptyLayer(usize),
    #[error("labeling does not satisfy constraint {x} -> {y}")]
    Unsatisfied { x: String, y: String },
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    SetFam(#[from] SetFamError),
    #[error("vertex set is not independent: contains edge {0:?}")]
    NotIndependent(Vec<String>),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub k: usize,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    pub r: u64,
}

impl ReductionParams {
    pub fn new(k: usize, eps: Rational, r: u64) -> Result<Self, ReductionError> {
        let p = Self { k, eps, r };
        p.check()?;
        Ok(p)
    }

    /// `r = ⌈10 ε^{-2}⌉`, the asymptotic default.
    pub fn default_r(eps: &Rational) -> u64 {
        let v = Rational::from_integer(10.into()) / (eps * eps);
        use num_traits::ToPrimitive;
        rational::ceil_to_int(&v).to_u64().unwrap_or(u64::MAX)
    }

    pub fn check(&self) -> Result<(), ReductionError> {
        if self.k < 3 {
            return Err(ReductionError::Params(format!("k must be at least 3, got {}", self.k)));
        }
        if self.r == 0 {
            return Err(ReductionError::Params("r must be positive".into()));
        }
        if !rational::is_in_open_unit(&self.eps) {
            return Err(ReductionError::Params(format!("eps {} must lie in (0, 1)", self.eps)));
        }
        let pr = self.p(self.r);
        if !pr.is_positive() {
            return Err(ReductionError::Params(format!(
                "bias p_r = 1 - 2/k - eps = {} is not in (0, 1)",
                rational::format_rational(&pr)
            )));
        }
        Ok(())
    }

    /// `q_j = 2j/(rk)`
    pub fn q(&self, j: u64) -> Rational {
        Rational::new((2 * j).into(), (self.r * self.k as u64).into())
    }

    /// `p_j = 1 - q_j - ε`
    pub fn p(&self, j: u64) -> Rational {
        Rational::one() - self.q(j) - &self.eps
    }

    pub fn parts(&self) -> usize {
        self.k + 1
    }

    /// Whether a bias sequence over the `k` non-`u` positions passes the
    /// gate `Σ_{j_i ≠ 0} q_{j_i} >= 1`, i.e. `2 Σ j_i >= rk`.
    pub fn gate(&self, js: impl IntoIterator<Item = u64>) -> bool {
        2 * js.into_iter().sum::<u64>() >= self.r * self.k as u64
    }
}

pub fn vertex_id(part: usize, var: &str, j: u64, mask: u64) -> String {
    format!("{}/H:{var},{},{j},{mask}", part + 1, part + 1)
}

pub fn dummy_id(part: usize) -> String {
    format!("{}/d", part + 1)
}
