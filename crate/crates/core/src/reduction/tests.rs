use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::*;
use crate::pcp::{make_toy_layered_csp, Constraint, Labeling, LayeredCsp, ToySpec};
use crate::rational::{int, ratio, Rational};

fn params(k: usize, eps: Rational, r: u64) -> ReductionParams {
    ReductionParams::new(k, eps, r).unwrap()
}

/// Two variables, ranges 2, one identity constraint.
fn one_constraint() -> LayeredCsp {
    LayeredCsp::new(
        vec![vec!["a".into()], vec!["b".into()]],
        vec![2, 2],
        vec![Constraint {
            x: "a".into(),
            y: "b".into(),
            pi: vec![0, 1],
        }],
        None,
    )
    .unwrap()
}

fn labels(pairs: &[(&str, usize)]) -> Labeling {
    pairs.iter().map(|&(v, l)| (v.to_string(), l)).collect()
}

#[test]
fn params_and_biases() {
    let p = params(3, ratio(1, 10), 1);
    assert_eq!(p.q(1), ratio(2, 3));
    assert_eq!(p.p(1), ratio(7, 30));
    let p = params(4, ratio(1, 100), 10);
    assert_eq!(p.q(10), ratio(1, 2));
    assert!(ReductionParams::new(2, ratio(1, 10), 1).is_err());
    assert!(ReductionParams::new(3, ratio(1, 3), 1).is_err());
    assert!(ReductionParams::new(3, int(1), 1).is_err());
    assert!(ReductionParams::new(3, ratio(1, 10), 0).is_err());
    assert_eq!(ReductionParams::default_r(&ratio(1, 10)), 1000);
}

#[test]
fn completeness_weight_values() {
    assert_eq!(completeness_weight(&params(3, ratio(1, 10), 1)), ratio(7, 30));
    assert_eq!(completeness_weight(&params(4, ratio(1, 100), 10)), ratio(143, 200));
    // it is the mean of the biases
    let p = params(5, ratio(1, 20), 4);
    let mean: Rational = (1..=4).map(|j| p.p(j)).sum::<Rational>() / int(4);
    assert_eq!(completeness_weight(&p), mean);
}

#[test]
fn micro_instance_structure() {
    let csp = one_constraint();
    let p = params(3, ratio(1, 10), 1);
    let inst = build_reduction(&csp, &p).unwrap();
    let h = &inst.hypergraph;
    assert!(h.validate().is_empty());
    assert_eq!(h.k(), 4);
    assert!(h.edges().iter().all(|e| e.len() == 4));
    assert_eq!(h.num_vertices(), 4 + 2 * 4 * 4);
    assert_eq!(h.total_weight(), int(9));
    let non_dummy: Rational = (4..h.num_vertices()).map(|v| h.weight(v).clone()).sum();
    assert!(non_dummy.is_one());
    assert_eq!(inst.variable_weight("a").unwrap(), ratio(1, 2));
    let dummies: Vec<String> = (0..4).map(dummy_id).collect();
    assert!(h.is_independent(&dummies).unwrap());
    assert_eq!(inst.candidates, candidate_count(&csp, &p));
}

/// Recomputes `π(∩ v) ∩ u` and the bias gate from the ids of every edge.
#[test]
fn every_edge_satisfies_the_rules() {
    let (csp, _) = make_toy_layered_csp(&ToySpec {
        layers: 2,
        vars_per_layer: vec![1, 2],
        range_sizes: vec![2, 3],
        density: int(1),
        planted: true,
        seed: 4,
    })
    .unwrap();
    let p = params(3, ratio(1, 10), 2);
    let inst = build_reduction(&csp, &p).unwrap();
    let h = &inst.hypergraph;
    assert!(h.num_edges() > 0);
    for e in 0..h.num_edges() {
        let ids = h.edge_ids(e);
        let parsed: Vec<Option<(String, u64, u64)>> = ids
            .iter()
            .map(|id| {
                let tag = id.split_once('/').unwrap().1;
                tag.strip_prefix("H:").map(|rest| {
                    let f: Vec<&str> = rest.split(',').collect();
                    (f[0].to_string(), f[2].parse().unwrap(), f[3].parse().unwrap())
                })
            })
            .collect();
        let vars: BTreeSet<&String> = parsed.iter().flatten().map(|(v, _, _)| v).collect();
        assert_eq!(vars.len(), 2, "edge {ids:?} spans two variables");
        let c = csp
            .constraints()
            .iter()
            .find(|c| vars.contains(&c.x) && vars.contains(&c.y))
            .expect("edge belongs to a constraint");
        let ys: Vec<&(String, u64, u64)> = parsed.iter().flatten().filter(|(v, _, _)| v == &c.y).collect();
        assert_eq!(ys.len(), 1);
        let u = ys[0].2;
        let xs: Vec<&(String, u64, u64)> = parsed.iter().flatten().filter(|(v, _, _)| v == &c.x).collect();
        let qsum: Rational = xs.iter().map(|(_, j, _)| p.q(*j)).sum();
        assert!(qsum >= Rational::one());
        let inter = xs.iter().fold(u64::MAX, |acc, (_, _, m)| acc & m);
        let proj = (0..2).filter(|a| inter >> a & 1 == 1).fold(0u64, |acc, a| acc | 1 << c.pi[a]);
        assert_eq!(proj & u, 0);
    }
}

#[test]
fn completeness_on_planted_instances() {
    for (seed, r) in [(1, 1), (2, 2), (3, 1)] {
        let (csp, planted) = make_toy_layered_csp(&ToySpec {
            layers: 2,
            vars_per_layer: vec![1, 2],
            range_sizes: vec![2, 2],
            density: int(1),
            planted: true,
            seed,
        })
        .unwrap();
        let p = params(3, ratio(1, 10), r);
        let inst = build_reduction(&csp, &p).unwrap();
        let a = planted.unwrap();
        let c = completeness_certificate(&inst, &a).unwrap();
        assert!(inst.hypergraph.first_contained(&c.mask).is_none());
        assert_eq!(c.non_dummy_weight, completeness_weight(&p));
        // membership is exactly "dummy, or contains the planted label"
        for (v, vert) in inst.hypergraph.vertices().iter().enumerate() {
            let expected = match vert.id.split_once("/H:") {
                None => true,
                Some((_, rest)) => {
                    let f: Vec<&str> = rest.split(',').collect();
                    let mask: u64 = f[3].parse().unwrap();
                    mask >> a[f[0]] & 1 == 1
                }
            };
            assert_eq!(c.mask[v], expected, "{}", vert.id);
        }
    }
}

#[test]
fn completeness_rejects_bad_labelings() {
    let csp = one_constraint();
    let inst = build_reduction(&csp, &params(3, ratio(1, 10), 1)).unwrap();
    assert!(matches!(
        completeness_certificate(&inst, &labels(&[("a", 0), ("b", 1)])),
        Err(ReductionError::Unsatisfied { .. })
    ));
    assert!(completeness_certificate(&inst, &labels(&[("a", 0)])).is_err());
}

#[test]
fn significance_and_sequences() {
    let csp = one_constraint();
    let p = params(3, ratio(1, 10), 2);
    let inst = build_reduction(&csp, &p).unwrap();
    let a = labels(&[("a", 1), ("b", 1)]);
    let star = completeness_certificate(&inst, &a).unwrap();
    let sig = significant_blocks(&inst, &star.mask, "a").unwrap();
    assert_eq!(sig.count(), 2 * 4);
    assert!(sig.in_x_prime);
    assert_eq!(
        good_sequence(&inst, &star.mask, "a").unwrap(),
        GoodSequence::Sequence(vec![2, 2, 2, 2])
    );
    // measures of I* are the biases themselves
    let m = block_measures(&inst, &star.mask, "b").unwrap();
    for row in &m {
        assert_eq!(row, &vec![p.p(1), p.p(2)]);
    }
    let empty = vec![false; inst.hypergraph.num_vertices()];
    assert!(significant_blocks(&inst, &empty, "a").unwrap().blocks.is_empty());
    assert!(matches!(
        good_sequence(&inst, &empty, "a").unwrap(),
        GoodSequence::NotInXPrime { count: 0, .. }
    ));
}

#[test]
fn decode_star_and_dummies() {
    let (csp, planted) = make_toy_layered_csp(&ToySpec {
        layers: 2,
        vars_per_layer: vec![2, 2],
        range_sizes: vec![3, 2],
        density: int(1),
        planted: true,
        seed: 9,
    })
    .unwrap();
    let p = params(3, ratio(1, 10), 1);
    let inst = build_reduction(&csp, &p).unwrap();
    let a = planted.unwrap();
    let star = completeness_certificate(&inst, &a).unwrap();
    let t = witness_threshold(&p).unwrap();
    let d = decode_labeling(&inst, &star.mask, 5, 0, 1).unwrap();
    for s in &d.sources {
        assert_eq!(s.status, VarStatus::Labeled);
        let b = s.b.as_ref().unwrap();
        assert!(!b.is_empty() && (b.len() as u64) < t);
        assert!(b.contains(&a[&s.var]));
    }
    assert_eq!(d, decode_labeling(&inst, &star.mask, 5, 0, 1).unwrap());

    let mut dummies = vec![false; inst.hypergraph.num_vertices()];
    for v in inst.dummies() {
        dummies[v] = true;
    }
    let d = decode_labeling(&inst, &dummies, 5, 0, 1).unwrap();
    assert!(d.labeling.is_empty());
    assert!(d.sources.iter().all(|s| s.status == VarStatus::NotInXPrime));
    assert_eq!(d.satisfied, Some(Rational::zero()));

    let all = vec![true; inst.hypergraph.num_vertices()];
    assert!(matches!(
        decode_labeling(&inst, &all, 5, 0, 1),
        Err(ReductionError::NotIndependent(_))
    ));
}

#[test]
fn budget_is_enforced() {
    let csp = one_constraint();
    let p = params(3, ratio(1, 10), 1);
    assert!(matches!(
        build_reduction_with_budget(&csp, &p, 10),
        Err(ReductionError::Budget { .. })
    ));
}
