//! Decoding a labeling from an independent set of the reduction instance.
//!
//! For each variable of the source layer with enough significant blocks:
//! take the max-significant-`j` sequence, draw `i0` uniformly from the parts,
//! find I-vertices in the remaining designated blocks meeting in fewer than
//! `t` labels, and draw the label uniformly from that intersection `B(x)`.
//! Target-layer variables take the label lying in the most projections
//! `π(B(x))` of their labeled neighbours.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ReductionError, ReductionInstance, ReductionParams};
use crate::pcp::{partial_satisfied_fraction, Labeling, PairFraction};
use crate::rational::{self, pow, Rational};
use crate::setfam::{chernoff_t, is_cross_intersecting, CrossCheck, SetFamError, SetFamily, DEFAULT_PRODUCT_LIMIT};

/// `rk/2 + r`, the significant-block count that admits a variable to `X'`.
pub fn x_prime_bound(params: &ReductionParams) -> Rational {
    Rational::new((params.r * params.k as u64).into(), 2.into()) + Rational::from_integer(params.r.into())
}

/// Intersection size bound for witness tuples, from the Chernoff-type
/// measure bound at threshold `ε/2` and bias gap `ε`.
pub fn witness_threshold(params: &ReductionParams) -> Result<u64, SetFamError> {
    let half = &params.eps / Rational::from_integer(2.into());
    chernoff_t(&half, &params.eps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Significance {
    /// `(i, j)` pairs, both 1-based, with `μ_{p_j}(I ∩ H^x_{ij}) >= ε/2`.
    pub blocks: Vec<(usize, u64)>,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub in_x_prime: bool,
}

impl Significance {
    pub fn count(&self) -> usize {
        self.blocks.len()
    }
}

/// `μ_{p_j}(I ∩ H^x_{ij})` for every block of `var`, indexed `[i][j-1]`.
pub fn block_measures(
    inst: &ReductionInstance,
    mask: &[bool],
    var: &str,
) -> Result<Vec<Vec<Rational>>, ReductionError> {
    let g = inst.var(var)?;
    let range = inst.vars[g].range;
    let params = &inst.params;
    Ok((0..params.parts())
        .map(|i| {
            (1..=params.r)
                .map(|j| {
                    let p = params.p(j);
                    let q = Rational::from_integer(1.into()) - &p;
                    let mut by_size = vec![0u64; range + 1];
                    for m in 0..1u64 << range {
                        if mask[inst.block_vertex(g, i, j, m)] {
                            by_size[m.count_ones() as usize] += 1;
                        }
                    }
                    by_size
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(s, &c)| pow(&p, s) * pow(&q, range - s) * Rational::from_integer(c.into()))
                        .sum()
                })
                .collect()
        })
        .collect())
}

pub fn significant_blocks(inst: &ReductionInstance, mask: &[bool], var: &str) -> Result<Significance, ReductionError> {
    let measures = block_measures(inst, mask, var)?;
    let threshold = &inst.params.eps / Rational::from_integer(2.into());
    let blocks: Vec<(usize, u64)> = measures
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            let threshold = &threshold;
            row.iter()
                .enumerate()
                .filter(move |(_, m)| *m >= threshold)
                .map(move |(j, _)| (i + 1, j as u64 + 1))
        })
        .collect();
    let bound = x_prime_bound(&inst.params);
    let in_x_prime = Rational::from_integer((blocks.len() as u64).into()) >= bound;
    Ok(Significance {
        blocks,
        bound,
        in_x_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoodSequence {
    /// `(j_1, ..., j_{k+1})`, `j_i` the largest significant bias index of part `i` or 0.
    Sequence(Vec<u64>),
    NotInXPrime { count: usize, bound: Rational },
}

pub fn good_sequence(inst: &ReductionInstance, mask: &[bool], var: &str) -> Result<GoodSequence, ReductionError> {
    let sig = significant_blocks(inst, mask, var)?;
    if !sig.in_x_prime {
        return Ok(GoodSequence::NotInXPrime {
            count: sig.count(),
            bound: sig.bound,
        });
    }
    Ok(GoodSequence::Sequence(sequence_of(&sig, inst.params.parts())))
}

fn sequence_of(sig: &Significance, parts: usize) -> Vec<u64> {
    let mut js = vec![0u64; parts];
    for &(i, j) in &sig.blocks {
        js[i - 1] = js[i - 1].max(j);
    }
    js
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum VarStatus {
    Labeled,
    NotInXPrime,
    /// The designated blocks are t-cross-intersecting within I.
    NoWitness,
    WitnessSearchTooLarge,
    EmptyB,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VarDecode {
    pub var: String,
    pub status: VarStatus,
    pub significant: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<u64>>,
    /// 1-based part drawn in step two.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetDecode {
    pub var: String,
    pub in_x_prime: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    /// Labeled neighbours whose projected `B(x)` contains the chosen label.
    pub support: usize,
    pub neighbours: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairDecode {
    pub source_layer: usize,
    pub target_layer: usize,
    pub sources: Vec<VarDecode>,
    pub targets: Vec<TargetDecode>,
    pub labeling: Labeling,
    /// Over all constraints of the pair, unlabeled endpoints counting as
    /// unsatisfied; `None` when the pair has no constraints.
    #[serde(with = "rational::serde_opt_str")]
    pub satisfied: Option<Rational>,
    /// Over constraints whose endpoints are both labeled.
    #[serde(with = "rational::serde_opt_str")]
    pub satisfied_among_labeled: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecodeReport {
    pub seed: u64,
    pub t: u64,
    pub pairs: Vec<PairDecode>,
}

impl DecodeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decode report serializes") + "\n"
    }
}

fn check_independent(inst: &ReductionInstance, mask: &[bool]) -> Result<(), ReductionError> {
    let h = &inst.hypergraph;
    if mask.len() != h.num_vertices() {
        return Err(ReductionError::Params("vertex mask has the wrong length".into()));
    }
    if let Some(e) = h.first_contained(mask) {
        return Err(ReductionError::NotIndependent(h.edge_ids(e)));
    }
    Ok(())
}

/// Vertex mask of a set of ids.
pub fn mask_from_ids<S: AsRef<str>>(
    inst: &ReductionInstance,
    ids: impl IntoIterator<Item = S>,
) -> Result<Vec<bool>, ReductionError> {
    let h = &inst.hypergraph;
    let mut mask = vec![false; h.num_vertices()];
    for id in ids {
        let id = id.as_ref();
        let v = h.lookup(id).ok_or_else(|| ReductionError::UnknownVertex(id.to_string()))?;
        mask[v] = true;
    }
    Ok(mask)
}

fn label_source(
    inst: &ReductionInstance,
    mask: &[bool],
    var: &str,
    t: u64,
    rng: &mut ChaCha8Rng,
) -> Result<(VarDecode, u64), ReductionError> {
    let g = inst.var(var)?;
    let range = inst.vars[g].range;
    let sig = significant_blocks(inst, mask, var)?;
    let mut out = VarDecode {
        var: var.to_string(),
        status: VarStatus::NotInXPrime,
        significant: sig.count(),
        sequence: None,
        i0: None,
        witnesses: None,
        b: None,
        label: None,
    };
    if !sig.in_x_prime {
        return Ok((out, 0));
    }
    let parts = inst.params.parts();
    let seq = sequence_of(&sig, parts);
    let i0 = rng.gen_range(0..parts);
    out.sequence = Some(seq.clone());
    out.i0 = Some(i0 + 1);
    let designated: Vec<(usize, u64)> = (0..parts)
        .filter(|&i| i != i0 && seq[i] != 0)
        .map(|i| (i, seq[i]))
        .collect();
    let fams: Vec<SetFamily> = designated
        .iter()
        .map(|&(i, j)| {
            let members = (0..1u64 << range).filter(|&m| mask[inst.block_vertex(g, i, j, m)]);
            SetFamily::from_bits(range, members)
        })
        .collect::<Result<_, _>>()?;
    let found = match is_cross_intersecting(&fams, t as usize, DEFAULT_PRODUCT_LIMIT) {
        Ok(CrossCheck::Violated(tuple)) => tuple,
        Ok(CrossCheck::Holds) => {
            out.status = VarStatus::NoWitness;
            return Ok((out, 0));
        }
        Err(SetFamError::ProductTooLarge(..)) => {
            out.status = VarStatus::WitnessSearchTooLarge;
            return Ok((out, 0));
        }
        Err(e) => return Err(e.into()),
    };
    let b_bits = found.iter().fold((1u64 << range) - 1, |acc, s| acc & s.bits());
    out.witnesses = Some(
        designated
            .iter()
            .zip(&found)
            .map(|(&(i, j), s)| inst.hypergraph.vertex(inst.block_vertex(g, i, j, s.bits())).id.clone())
            .collect(),
    );
    let b: Vec<usize> = (0..range).filter(|&a| b_bits >> a & 1 == 1).collect();
    out.b = Some(b.clone());
    if b.is_empty() {
        out.status = VarStatus::EmptyB;
        return Ok((out, 0));
    }
    let label = b[rng.gen_range(0..b.len())];
    out.label = Some(label);
    out.status = VarStatus::Labeled;
    Ok((out, b_bits))
}

/// Decodes the source layer `l` and target layer `l2` (`l < l2`).
pub fn decode_labeling(
    inst: &ReductionInstance,
    mask: &[bool],
    seed: u64,
    l: usize,
    l2: usize,
) -> Result<PairDecode, ReductionError> {
    check_independent(inst, mask)?;
    decode_pair(inst, mask, seed, l, l2)
}

fn decode_pair(
    inst: &ReductionInstance,
    mask: &[bool],
    seed: u64,
    l: usize,
    l2: usize,
) -> Result<PairDecode, ReductionError> {
    let csp = &inst.csp;
    if l >= l2 || l2 >= csp.num_layers() {
        return Err(crate::pcp::PcpError::BadLayerPair {
            l,
            l2,
            layers: csp.num_layers(),
        }
        .into());
    }
    let t = witness_threshold(&inst.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labeling = Labeling::new();
    let mut b_of = std::collections::HashMap::new();
    let mut sources = Vec::new();
    for x in &csp.layers()[l] {
        let (d, b_bits) = label_source(inst, mask, x, t, &mut rng)?;
        if let Some(a) = d.label {
            labeling.insert(x.clone(), a);
            b_of.insert(x.as_str(), b_bits);
        }
        sources.push(d);
    }
    let mut targets = Vec::new();
    let ry = csp.ranges()[l2];
    for y in &csp.layers()[l2] {
        let sig = significant_blocks(inst, mask, y)?;
        let incoming: Vec<_> = csp.constraints().iter().filter(|c| &c.y == y && csp.layer_of(&c.x) == Some(l)).collect();
        let mut d = TargetDecode {
            var: y.clone(),
            in_x_prime: sig.in_x_prime,
            label: None,
            support: 0,
            neighbours: incoming.len(),
        };
        if sig.in_x_prime {
            let mut counts = vec![0usize; ry];
            for c in &incoming {
                if let Some(&bits) = b_of.get(c.x.as_str()) {
                    let mut proj = 0u64;
                    for (a, &target) in c.pi.iter().enumerate() {
                        if bits >> a & 1 == 1 {
                            proj |= 1 << target;
                        }
                    }
                    for (a, n) in counts.iter_mut().enumerate() {
                        if proj >> a & 1 == 1 {
                            *n += 1;
                        }
                    }
                }
            }
            let (label, support) = counts
                .iter()
                .enumerate()
                .fold((0, 0), |(bl, bc), (a, &c)| if c > bc { (a, c) } else { (bl, bc) });
            d.label = Some(label);
            d.support = support;
            labeling.insert(y.clone(), label);
        }
        targets.push(d);
    }
    let satisfied = match partial_satisfied_fraction(csp, &labeling, l, l2)? {
        PairFraction::Fraction(f) => Some(f),
        PairFraction::NoConstraints => None,
    };
    let (mut both, mut sat) = (0u64, 0u64);
    for c in csp.between(l, l2) {
        if let (Some(&ax), Some(&ay)) = (labeling.get(&c.x), labeling.get(&c.y)) {
            both += 1;
            if c.pi[ax] == ay {
                sat += 1;
            }
        }
    }
    let satisfied_among_labeled = (both > 0).then(|| Rational::new(sat.into(), both.into()));
    Ok(PairDecode {
        source_layer: l,
        target_layer: l2,
        sources,
        targets,
        labeling,
        satisfied,
        satisfied_among_labeled,
    })
}

/// Decodes every layer pair, each from a generator seeded with `seed`.
pub fn decode_all(inst: &ReductionInstance, mask: &[bool], seed: u64) -> Result<DecodeReport, ReductionError> {
    check_independent(inst, mask)?;
    let t = witness_threshold(&inst.params)?;
    let layers = inst.csp.num_layers();
    let mut pairs = Vec::new();
    for l in 0..layers {
        for l2 in l + 1..layers {
            pairs.push(decode_pair(inst, mask, seed, l, l2)?);
        }
    }
    Ok(DecodeReport { seed, t, pairs })
}
