use num_traits::One;

use super::{ReductionError, ReductionInstance, ReductionParams};
use crate::hypergraph::IndependentSetCertificate;
use crate::pcp::Labeling;
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct Completeness {
    pub certificate: IndependentSetCertificate,
    /// Weight of the certificate without the dummies.
    pub non_dummy_weight: Rational,
    pub mask: Vec<bool>,
}

/// `1 - (1/k)(1 + 1/r) - ε`, the average of the biases `p_j`.
pub fn completeness_weight(params: &ReductionParams) -> Rational {
    let k = Rational::from_integer((params.k as u64).into());
    let r = Rational::from_integer(params.r.into());
    Rational::one() - (Rational::one() / k) * (Rational::one() + Rational::one() / r) - &params.eps
}

/// The dummies plus, in every block of every variable `x`, the subsets
/// containing `A(x)`. Rejects labelings that are partial or violate a
/// constraint.
pub fn completeness_certificate(inst: &ReductionInstance, a: &Labeling) -> Result<Completeness, ReductionError> {
    let csp = &inst.csp;
    for v in &inst.vars {
        let label = *a
            .get(&v.name)
            .ok_or_else(|| crate::pcp::PcpError::MissingLabel(v.name.clone()))?;
        if label >= v.range {
            return Err(crate::pcp::PcpError::LabelOutOfRange {
                var: v.name.clone(),
                label,
                range: v.range,
            }
            .into());
        }
    }
    csp.check_labeling(a)?;
    for c in csp.constraints() {
        if c.pi[a[&c.x]] != a[&c.y] {
            return Err(ReductionError::Unsatisfied {
                x: c.x.clone(),
                y: c.y.clone(),
            });
        }
    }
    let h = &inst.hypergraph;
    let mut mask = vec![false; h.num_vertices()];
    for d in inst.dummies() {
        mask[d] = true;
    }
    let parts = inst.params.parts();
    for (g, v) in inst.vars.iter().enumerate() {
        let bit = 1u64 << a[&v.name];
        for i in 0..parts {
            for j in 1..=inst.params.r {
                for m in 0..1u64 << v.range {
                    if m & bit != 0 {
                        mask[inst.block_vertex(g, i, j, m)] = true;
                    }
                }
            }
        }
    }
    let certificate = h.independent_certificate(&mask);
    let dummy_weight: Rational = inst.dummies().iter().map(|&d| h.weight(d).clone()).sum();
    let non_dummy_weight = &certificate.weight - dummy_weight;
    Ok(Completeness {
        certificate,
        non_dummy_weight,
        mask,
    })
}
