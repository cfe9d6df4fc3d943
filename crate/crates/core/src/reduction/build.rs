use std::collections::HashMap;

use num_traits::One;

use super::{dummy_id, vertex_id, ReductionError, ReductionParams, DEFAULT_CANDIDATE_BUDGET, MAX_BLOCK_RANGE};
use crate::hypergraph::{PartiteHypergraph, VertexIdx};
use crate::pcp::LayeredCsp;
use crate::rational::{pow, Rational};

#[derive(Debug, Clone)]
pub(crate) struct VarInfo {
    pub name: String,
    pub range: usize,
    offset: usize,
}

#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub params: ReductionParams,
    pub csp: LayeredCsp,
    pub hypergraph: PartiteHypergraph,
    /// Candidate tuples enumerated while building (one per `(u-part, j_{k+1},
    /// bias pattern, v-choice, u-choice)`).
    pub candidates: u128,
    pub(crate) vars: Vec<VarInfo>,
    pub(crate) var_index: HashMap<String, usize>,
}

impl ReductionInstance {
    pub fn dummy(&self, part: usize) -> VertexIdx {
        part
    }

    pub fn dummies(&self) -> Vec<VertexIdx> {
        (0..self.params.parts()).collect()
    }

    pub(crate) fn var(&self, name: &str) -> Result<usize, ReductionError> {
        self.var_index
            .get(name)
            .copied()
            .ok_or_else(|| ReductionError::UnknownVariable(name.to_string()))
    }

    /// Vertex index of `mask` in block `H^x_{part+1, j}`.
    pub(crate) fn block_vertex(&self, g: usize, part: usize, j: u64, mask: u64) -> VertexIdx {
        let v = &self.vars[g];
        v.offset + ((part as u64 * self.params.r + (j - 1)) << v.range) as usize + mask as usize
    }

    /// All vertices of block `(part, j)` of a variable, by mask.
    pub fn block(&self, var: &str, part: usize, j: u64) -> Result<std::ops::Range<VertexIdx>, ReductionError> {
        let g = self.var(var)?;
        let start = self.block_vertex(g, part, j, 0);
        Ok(start..start + (1usize << self.vars[g].range))
    }

    /// Non-dummy weight of `V[x]`: `1/(L |X_l|)`.
    pub fn variable_weight(&self, var: &str) -> Result<Rational, ReductionError> {
        let g = self.var(var)?;
        let v = &self.vars[g];
        let start = v.offset;
        let end = start + ((self.params.parts() * self.params.r as usize) << v.range);
        Ok((start..end).map(|u| self.hypergraph.weight(u).clone()).sum())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }
}

/// Number of candidate tuples the canonical enumeration visits.
pub fn candidate_count(csp: &LayeredCsp, params: &ReductionParams) -> u128 {
    let k = params.k;
    let mut total: u128 = 0;
    for c in csp.constraints() {
        let rx = csp.range_of(&c.x).unwrap_or(0) as u32;
        let ry = csp.range_of(&c.y).unwrap_or(0) as u32;
        let mut per: u128 = 0;
        for_each_pattern(params, |pattern| {
            let nz = pattern.iter().filter(|&&j| j != 0).count() as u32;
            let v = 1u128.checked_shl(rx * nz).unwrap_or(u128::MAX);
            per = per.saturating_add(v);
        });
        let factor = ((k + 1) as u128)
            .saturating_mul(params.r as u128)
            .saturating_mul(1u128.checked_shl(ry).unwrap_or(u128::MAX));
        total = total.saturating_add(per.saturating_mul(factor));
    }
    total
}

/// Every `(j_1..j_k) ∈ ([r] ∪ {0})^k` that passes the bias gate, lexicographically.
fn for_each_pattern(params: &ReductionParams, mut f: impl FnMut(&[u64])) {
    let k = params.k;
    let mut js = vec![0u64; k];
    'all: loop {
        if params.gate(js.iter().copied()) {
            f(&js);
        }
        for p in (0..k).rev() {
            js[p] += 1;
            if js[p] <= params.r {
                continue 'all;
            }
            js[p] = 0;
        }
        break;
    }
}

pub fn build_reduction(csp: &LayeredCsp, params: &ReductionParams) -> Result<ReductionInstance, ReductionError> {
    build_reduction_with_budget(csp, params, DEFAULT_CANDIDATE_BUDGET)
}

pub fn build_reduction_with_budget(
    csp: &LayeredCsp,
    params: &ReductionParams,
    budget: u128,
) -> Result<ReductionInstance, ReductionError> {
    params.check()?;
    let parts = params.parts();
    let num_layers = csp.num_layers();
    if num_layers == 0 {
        return Err(ReductionError::Params("instance has no layers".into()));
    }
    for (l, vars) in csp.layers().iter().enumerate() {
        if vars.is_empty() {
            return Err(ReductionError::EmptyLayer(l));
        }
        if csp.ranges()[l] > MAX_BLOCK_RANGE {
            return Err(ReductionError::RangeTooLarge(csp.ranges()[l]));
        }
    }
    let candidates = candidate_count(csp, params);
    if candidates > budget {
        return Err(ReductionError::Budget { candidates, budget });
    }

    let mut h = PartiteHypergraph::new(parts);
    for i in 0..parts {
        h.add_vertex(i, dummy_id(i), Rational::from_integer(2.into()))
            .expect("fresh dummy id");
    }
    let mut vars = Vec::new();
    let mut var_index = HashMap::new();
    let scale_base = Rational::from_integer((num_layers as u64 * params.r * parts as u64).into());
    for (l, names) in csp.layers().iter().enumerate() {
        let range = csp.ranges()[l];
        let scale = &scale_base * Rational::from_integer((names.len() as u64).into());
        // weight[j-1][|v|]
        let table: Vec<Vec<Rational>> = (1..=params.r)
            .map(|j| {
                let p = params.p(j);
                let q = Rational::one() - &p;
                (0..=range).map(|s| pow(&p, s) * pow(&q, range - s) / &scale).collect()
            })
            .collect();
        for name in names {
            let offset = h.num_vertices();
            var_index.insert(name.clone(), vars.len());
            vars.push(VarInfo {
                name: name.clone(),
                range,
                offset,
            });
            for i in 0..parts {
                for j in 1..=params.r {
                    for mask in 0..1u64 << range {
                        let w = table[(j - 1) as usize][mask.count_ones() as usize].clone();
                        h.add_vertex(i, vertex_id(i, name, j, mask), w).expect("fresh block id");
                    }
                }
            }
        }
    }
    let mut inst = ReductionInstance {
        params: params.clone(),
        csp: csp.clone(),
        hypergraph: h,
        candidates,
        vars,
        var_index,
    };
    let mut edges: Vec<Vec<VertexIdx>> = Vec::new();
    for c in csp.constraints() {
        let gx = inst.var_index[&c.x];
        let gy = inst.var_index[&c.y];
        let rx = inst.vars[gx].range;
        let ry = inst.vars[gy].range;
        let full_y: u64 = (1u64 << ry) - 1;
        let proj: Vec<u64> = (0..1u64 << rx)
            .map(|m| (0..rx).filter(|&a| m >> a & 1 == 1).fold(0u64, |acc, a| acc | 1 << c.pi[a]))
            .collect();
        for p in 0..parts {
            let others: Vec<usize> = (0..parts).filter(|&q| q != p).collect();
            for jy in 1..=params.r {
                for_each_pattern(params, |pattern| {
                    let nz: Vec<(usize, u64)> = others
                        .iter()
                        .zip(pattern)
                        .filter(|(_, &j)| j != 0)
                        .map(|(&q, &j)| (q, j))
                        .collect();
                    let mut edge = vec![0usize; parts];
                    for (&q, &j) in others.iter().zip(pattern) {
                        if j == 0 {
                            edge[q] = inst.dummy(q);
                        }
                    }
                    let mut masks = vec![0u64; nz.len()];
                    'tuples: loop {
                        let inter = masks.iter().fold(u64::MAX, |acc, &m| acc & m);
                        for (&(q, j), &m) in nz.iter().zip(&masks) {
                            edge[q] = inst.block_vertex(gx, q, j, m);
                        }
                        let free = full_y & !proj[(inter & ((1u64 << rx) - 1)) as usize];
                        // ascending submasks of `free`
                        let mut u = 0u64;
                        loop {
                            edge[p] = inst.block_vertex(gy, p, jy, u);
                            edges.push(edge.clone());
                            if u == free {
                                break;
                            }
                            u = ((u | !free).wrapping_add(1)) & free;
                        }
                        for s in (0..nz.len()).rev() {
                            masks[s] += 1;
                            if masks[s] < 1u64 << rx {
                                continue 'tuples;
                            }
                            masks[s] = 0;
                        }
                        break;
                    }
                });
            }
        }
    }
    for e in edges {
        inst.hypergraph.add_edge(e).expect("indices in range");
    }
    Ok(inst)
}
