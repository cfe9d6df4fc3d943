//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use hypervc::pcp::LayeredCsp;
use hypervc::rational::Rational;
use hypervc::reduction::ReductionParams;
use hypervc::PartiteHypergraph;
use rand::Rng;

pub struct InstanceShape {
    pub k: usize,
    pub max_part: usize,
    pub max_edges: usize,
    pub unit: bool,
}

/// Random k-partite k-uniform instance; vertex ids are `"{part}/v{i}"`.
pub fn random_instance(rng: &mut impl Rng, shape: &InstanceShape) -> PartiteHypergraph {
    let k = shape.k;
    let mut h = PartiteHypergraph::new(k);
    let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=shape.max_part)).collect();
    let mut parts = Vec::new();
    for (p, &s) in sizes.iter().enumerate() {
        let mut ids = Vec::new();
        for i in 0..s {
            let w = if shape.unit {
                Rational::from_integer(1.into())
            } else {
                Rational::new(rng.gen_range(1..=12).into(), rng.gen_range(1..=6).into())
            };
            ids.push(h.add_vertex(p, format!("{}/v{i}", p + 1), w).unwrap());
        }
        parts.push(ids);
    }
    let space: usize = sizes.iter().product();
    let m = rng.gen_range(1..=shape.max_edges.min(space));
    let mut seen = HashSet::new();
    while seen.len() < m {
        let e: Vec<usize> = parts.iter().map(|p| p[rng.gen_range(0..p.len())]).collect();
        if seen.insert(e.clone()) {
            h.add_edge(e).unwrap();
        }
    }
    h
}

/// Minimum cover weight by trying every vertex subset.
pub fn brute_force_vc(h: &PartiteHypergraph) -> Rational {
    let n = h.num_vertices();
    assert!(n <= 20);
    let masks: Vec<u32> = h.edges().iter().map(|e| e.iter().fold(0u32, |a, &v| a | 1 << v)).collect();
    let mut best: Option<Rational> = None;
    for s in 0u32..1 << n {
        if masks.iter().all(|&e| e & s != 0) {
            let w: Rational = (0..n).filter(|v| s >> v & 1 == 1).map(|v| h.weight(v).clone()).sum();
            if best.as_ref().map_or(true, |b| &w < b) {
                best = Some(w);
            }
        }
    }
    best.unwrap()
}

/// Every permutation of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn block_id(part: usize, var: &str, j: u64, mask: u64) -> String {
    format!("{part}/H:{var},{part},{j},{mask}")
}

/// Hyperedges of the reduction by their literal definition: every
/// permutation `σ` of the parts, every bias sequence `(j_1..j_k)` over
/// `{0..r}` with `j_{k+1} ∈ [r]`, the `u` vertex in part `σ(k+1)`, and every
/// choice of subsets, kept when `Σ_{j_i≠0} q_{j_i} >= 1` and
/// `π(∩ v_i) ∩ u = ∅`. Ids are produced here, independent of the builder.
pub fn literal_edges(csp: &LayeredCsp, params: &ReductionParams) -> BTreeSet<Vec<String>> {
    let k = params.k;
    let r = params.r;
    let parts = k + 1;
    let mut out: HashSet<Vec<String>> = HashSet::new();
    let q = |j: u64| Rational::new((2 * j).into(), (r * k as u64).into());
    let one = Rational::from_integer(1.into());
    for c in csp.constraints() {
        let rx = csp.range_of(&c.x).unwrap();
        let ry = csp.range_of(&c.y).unwrap();
        for sigma in permutations(parts) {
            let total = (r + 1).pow(k as u32) * r;
            for idx in 0..total {
                // js[0..k] over 0..=r for the v positions, js[k] over 1..=r for u
                let mut rest = idx;
                let mut js = vec![0u64; parts];
                js[k] = rest % r + 1;
                rest /= r;
                for j in js[..k].iter_mut() {
                    *j = rest % (r + 1);
                    rest /= r + 1;
                }
                let qsum: Rational = js[..k].iter().filter(|&&j| j != 0).map(|&j| q(j)).sum();
                if qsum < one {
                    continue;
                }
                let live: Vec<usize> = (0..k).filter(|&i| js[i] != 0).collect();
                let full_x = (1u64 << rx) - 1;
                for combo in 0..1u64 << (rx * live.len()) {
                    let vmasks: Vec<u64> = (0..live.len()).map(|s| combo >> (rx * s) & full_x).collect();
                    let inter = vmasks.iter().fold(full_x, |a, &m| a & m);
                    let proj = (0..rx).filter(|&a| inter >> a & 1 == 1).fold(0u64, |a, b| a | 1 << c.pi[b]);
                    for u in 0..1u64 << ry {
                        if proj & u != 0 {
                            continue;
                        }
                        let mut ids: Vec<String> = Vec::with_capacity(parts);
                        for i in 0..k {
                            let part = sigma[i] + 1;
                            match live.iter().position(|&l| l == i) {
                                None => ids.push(format!("{part}/d")),
                                Some(s) => ids.push(block_id(part, &c.x, js[i], vmasks[s])),
                            }
                        }
                        ids.push(block_id(sigma[k] + 1, &c.y, js[k], u));
                        ids.sort();
                        out.insert(ids);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Built edges as sorted id lists.
pub fn edge_set(h: &PartiteHypergraph) -> BTreeSet<Vec<String>> {
    (0..h.num_edges())
        .map(|e| {
            let mut ids = h.edge_ids(e);
            ids.sort();
            ids
        })
        .collect()
}
