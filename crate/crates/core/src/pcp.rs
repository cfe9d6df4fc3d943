//! Layered label cover: variables in layers, per-layer label ranges, and
//! projection constraints from earlier to later layers.
//!
//! Layers and labels are 0-based. A constraint `x -> y` is a table `pi`
//! indexed by the labels of `x`'s layer.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

pub const DEFAULT_LABELING_BUDGET: u128 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcpError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("need layer indices l < l' below {layers}, got ({l}, {l2})")]
    BadLayerPair { l: usize, l2: usize, layers: usize },
    #[error("variable {0:?} has no label")]
    MissingLabel(String),
    #[error("label {label} of {var:?} is outside range {range}")]
    LabelOutOfRange { var: String, label: usize, range: usize },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("search space {size} exceeds budget {budget}")]
    Budget { size: u128, budget: u128 },
    #[error("weak density precondition: {0}")]
    Precondition(String),
    #[error("bad generator parameters: {0}")]
    Generator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub x: String,
    pub y: String,
    pub pi: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CspDoc {
    layers: Vec<Vec<String>>,
    ranges: Vec<usize>,
    constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::serde_opt_str")]
    soundness_param: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCsp {
    layers: Vec<Vec<String>>,
    ranges: Vec<usize>,
    constraints: Vec<Constraint>,
    /// Soundness level the instance is meant to model; metadata only.
    pub soundness_param: Option<Rational>,
    location: HashMap<String, (usize, usize)>,
}

/// A possibly partial labeling, keyed by variable name.
pub type Labeling = BTreeMap<String, usize>;

/// Satisfaction of the constraints between two layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairFraction {
    Fraction(Rational),
    /// The layer pair carries no constraints.
    NoConstraints,
}

impl PairFraction {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            PairFraction::Fraction(r) => Some(r),
            PairFraction::NoConstraints => None,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            PairFraction::Fraction(r) => serde_json::Value::String(rational::format_rational(r)),
            PairFraction::NoConstraints => serde_json::Value::Null,
        }
    }
}

impl LayeredCsp {
    pub fn new(
        layers: Vec<Vec<String>>,
        ranges: Vec<usize>,
        constraints: Vec<Constraint>,
        soundness_param: Option<Rational>,
    ) -> Result<Self, PcpError> {
        let bad = |m: String| Err(PcpError::Malformed(m));
        if layers.len() != ranges.len() {
            return bad(format!("{} layers but {} ranges", layers.len(), ranges.len()));
        }
        if let Some(l) = ranges.iter().position(|&r| r == 0) {
            return bad(format!("layer {l} has an empty range"));
        }
        let mut location = HashMap::new();
        for (l, vars) in layers.iter().enumerate() {
            for (i, v) in vars.iter().enumerate() {
                if v.is_empty() || v.contains(',') || v.contains('/') {
                    return bad(format!("variable name {v:?} must be nonempty without ',' or '/'"));
                }
                if location.insert(v.clone(), (l, i)).is_some() {
                    return bad(format!("duplicate variable {v:?}"));
                }
            }
        }
        let mut seen = HashSet::new();
        for (n, c) in constraints.iter().enumerate() {
            let (Some(&(lx, _)), Some(&(ly, _))) = (location.get(&c.x), location.get(&c.y)) else {
                return bad(format!("constraint {n} names an unknown variable"));
            };
            if lx >= ly {
                return bad(format!("constraint {n} must go from an earlier to a later layer"));
            }
            if c.pi.len() != ranges[lx] {
                return bad(format!("constraint {n}: projection has {} entries, range is {}", c.pi.len(), ranges[lx]));
            }
            if c.pi.iter().any(|&b| b >= ranges[ly]) {
                return bad(format!("constraint {n}: projection leaves the target range"));
            }
            if !seen.insert((c.x.clone(), c.y.clone())) {
                return bad(format!("constraint {n} repeats the pair ({}, {})", c.x, c.y));
            }
        }
        Ok(Self {
            layers,
            ranges,
            constraints,
            soundness_param,
            location,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<String>] {
        &self.layers
    }

    pub fn ranges(&self) -> &[usize] {
        &self.ranges
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// `(layer, position)` of a variable.
    pub fn locate(&self, var: &str) -> Option<(usize, usize)> {
        self.location.get(var).copied()
    }

    pub fn layer_of(&self, var: &str) -> Option<usize> {
        self.locate(var).map(|(l, _)| l)
    }

    pub fn range_of(&self, var: &str) -> Option<usize> {
        self.layer_of(var).map(|l| self.ranges[l])
    }

    /// Constraints between layers `l` and `l2` (in either order of arguments).
    pub fn between(&self, l: usize, l2: usize) -> impl Iterator<Item = &Constraint> + '_ {
        self.constraints.iter().filter(move |c| {
            let (a, b) = (self.location[&c.x].0, self.location[&c.y].0);
            (a, b) == (l, l2) || (a, b) == (l2, l)
        })
    }

    pub fn to_json(&self) -> String {
        let doc = CspDoc {
            layers: self.layers.clone(),
            ranges: self.ranges.clone(),
            constraints: self.constraints.clone(),
            soundness_param: self.soundness_param.clone(),
        };
        serde_json::to_string(&doc).expect("csp serializes") + "\n"
    }

    pub fn from_json(doc: &str) -> Result<Self, PcpError> {
        let d: CspDoc = serde_json::from_str(doc).map_err(|e| PcpError::Malformed(e.to_string()))?;
        Self::new(d.layers, d.ranges, d.constraints, d.soundness_param)
    }

    fn check_pair(&self, l: usize, l2: usize) -> Result<(), PcpError> {
        if l >= l2 || l2 >= self.layers.len() {
            return Err(PcpError::BadLayerPair {
                l,
                l2,
                layers: self.layers.len(),
            });
        }
        Ok(())
    }

    fn label(&self, a: &Labeling, var: &str) -> Result<usize, PcpError> {
        let label = *a.get(var).ok_or_else(|| PcpError::MissingLabel(var.to_string()))?;
        let range = self.range_of(var).ok_or_else(|| PcpError::UnknownVariable(var.to_string()))?;
        if label >= range {
            return Err(PcpError::LabelOutOfRange {
                var: var.to_string(),
                label,
                range,
            });
        }
        Ok(label)
    }

    /// Checks that every label present is in range and names a variable.
    pub fn check_labeling(&self, a: &Labeling) -> Result<(), PcpError> {
        for var in a.keys() {
            self.label(a, var)?;
        }
        Ok(())
    }
}

/// Fraction of the `l -> l2` constraints whose projection maps `A(x)` to `A(y)`.
pub fn satisfied_fraction(csp: &LayeredCsp, a: &Labeling, l: usize, l2: usize) -> Result<PairFraction, PcpError> {
    csp.check_pair(l, l2)?;
    for var in csp.layers[l].iter().chain(&csp.layers[l2]) {
        csp.label(a, var)?;
    }
    let (mut total, mut sat) = (0u64, 0u64);
    for c in csp.between(l, l2) {
        total += 1;
        if c.pi[a[&c.x]] == a[&c.y] {
            sat += 1;
        }
    }
    Ok(if total == 0 {
        PairFraction::NoConstraints
    } else {
        PairFraction::Fraction(Rational::new(sat.into(), total.into()))
    })
}

/// Like [`satisfied_fraction`], but counts unlabeled endpoints as unsatisfied.
pub fn partial_satisfied_fraction(
    csp: &LayeredCsp,
    a: &Labeling,
    l: usize,
    l2: usize,
) -> Result<PairFraction, PcpError> {
    csp.check_pair(l, l2)?;
    csp.check_labeling(a)?;
    let (mut total, mut sat) = (0u64, 0u64);
    for c in csp.between(l, l2) {
        total += 1;
        if let (Some(&ax), Some(&ay)) = (a.get(&c.x), a.get(&c.y)) {
            if c.pi[ax] == ay {
                sat += 1;
            }
        }
    }
    Ok(if total == 0 {
        PairFraction::NoConstraints
    } else {
        PairFraction::Fraction(Rational::new(sat.into(), total.into()))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestLabeling {
    pub labeling: Labeling,
    pub fraction: PairFraction,
    pub satisfied: u64,
    pub total: u64,
}

pub fn best_labeling(csp: &LayeredCsp, l: usize, l2: usize) -> Result<BestLabeling, PcpError> {
    best_labeling_with_budget(csp, l, l2, DEFAULT_LABELING_BUDGET)
}

/// Exhaustive optimum over the two layers. Labelings of the earlier layer are
/// enumerated; given one, each later-layer variable independently takes its
/// most-satisfying label, which is exact. Ties go to the lexicographically
/// first labeling (earlier layer in variable order, then smallest labels).
pub fn best_labeling_with_budget(
    csp: &LayeredCsp,
    l: usize,
    l2: usize,
    budget: u128,
) -> Result<BestLabeling, PcpError> {
    csp.check_pair(l, l2)?;
    let xs = &csp.layers[l];
    let ys = &csp.layers[l2];
    let (rx, ry) = (csp.ranges[l], csp.ranges[l2]);
    let size = (rx as u128)
        .checked_pow(xs.len() as u32)
        .ok_or(PcpError::Budget { size: u128::MAX, budget })?;
    if size > budget {
        return Err(PcpError::Budget { size, budget });
    }
    // per y: list of (x position, projection)
    let mut incoming: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); ys.len()];
    let mut total = 0u64;
    for c in csp.between(l, l2) {
        let (_, xi) = csp.location[&c.x];
        let (_, yi) = csp.location[&c.y];
        incoming[yi].push((xi, &c.pi));
        total += 1;
    }
    let mut assign = vec![0usize; xs.len()];
    let mut best: Option<(u64, Vec<usize>, Vec<usize>)> = None;
    let mut counts = vec![0u64; ry];
    'enumerate: loop {
        let mut score = 0;
        let mut y_labels = Vec::with_capacity(ys.len());
        for inc in &incoming {
            counts.iter_mut().for_each(|c| *c = 0);
            for &(xi, pi) in inc {
                counts[pi[assign[xi]]] += 1;
            }
            let (lab, cnt) = counts
                .iter()
                .enumerate()
                .fold((0, 0), |(bl, bc), (lab, &c)| if c > bc { (lab, c) } else { (bl, bc) });
            score += cnt;
            y_labels.push(lab);
        }
        if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
            best = Some((score, assign.clone(), y_labels));
        }
        for p in (0..xs.len()).rev() {
            assign[p] += 1;
            if assign[p] < rx {
                continue 'enumerate;
            }
            assign[p] = 0;
        }
        break;
    }
    let (satisfied, xa, ya) = best.expect("at least one labeling is enumerated");
    let mut labeling = Labeling::new();
    for (v, &a) in xs.iter().zip(&xa) {
        labeling.insert(v.clone(), a);
    }
    for (v, &a) in ys.iter().zip(&ya) {
        labeling.insert(v.clone(), a);
    }
    let fraction = if total == 0 {
        PairFraction::NoConstraints
    } else {
        PairFraction::Fraction(Rational::new(satisfied.into(), total.into()))
    };
    Ok(BestLabeling {
        labeling,
        fraction,
        satisfied,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityOutcome {
    /// Layers `(l, l2)` (as given, `l < l2`) whose chosen subsets carry
    /// `count` of the `total` constraints between them, `count >= δ²/4 · total`.
    Pair { l: usize, l2: usize, count: u64, total: u64 },
    Fail,
}

/// Looks for a pair among the chosen layers whose chosen variables carry at
/// least a `δ²/4` fraction of the constraints between the two layers. Pairs
/// without constraints never qualify.
pub fn weak_density_check(
    csp: &LayeredCsp,
    delta: &Rational,
    layer_idxs: &[usize],
    subsets: &[Vec<String>],
) -> Result<DensityOutcome, PcpError> {
    let pre = |m: String| Err(PcpError::Precondition(m));
    if !rational::is_in_open_unit(delta) && !delta.is_one() {
        return pre(format!("delta {delta} must lie in (0, 1]"));
    }
    if layer_idxs.len() != subsets.len() {
        return pre(format!("{} layers but {} subsets", layer_idxs.len(), subsets.len()));
    }
    let need = rational::ceil_to_int(&(Rational::from_integer(2.into()) / delta));
    if num_bigint::BigInt::from(layer_idxs.len()) < need {
        return pre(format!("need at least {need} layers, got {}", layer_idxs.len()));
    }
    let mut seen = HashSet::new();
    let mut chosen: Vec<HashSet<&str>> = Vec::new();
    for (&l, s) in layer_idxs.iter().zip(subsets) {
        if l >= csp.num_layers() {
            return pre(format!("layer {l} does not exist"));
        }
        if !seen.insert(l) {
            return pre(format!("layer {l} chosen twice"));
        }
        let set: HashSet<&str> = s.iter().map(String::as_str).collect();
        if let Some(v) = set.iter().find(|v| csp.layer_of(v) != Some(l)) {
            return pre(format!("{v:?} is not a variable of layer {l}"));
        }
        let size = Rational::from_integer((set.len() as u64).into());
        if size < delta * Rational::from_integer((csp.layers[l].len() as u64).into()) {
            return pre(format!("subset of layer {l} is smaller than delta times the layer"));
        }
        chosen.push(set);
    }
    let quarter_sq = delta * delta / Rational::from_integer(4.into());
    for a in 0..layer_idxs.len() {
        for b in a + 1..layer_idxs.len() {
            let (la, lb) = (layer_idxs[a], layer_idxs[b]);
            let (mut count, mut total) = (0u64, 0u64);
            for c in csp.between(la, lb) {
                total += 1;
                let inside = |v: &str| chosen[a].contains(v) || chosen[b].contains(v);
                if inside(&c.x) && inside(&c.y) {
                    count += 1;
                }
            }
            if total > 0
                && Rational::from_integer(count.into()) >= &quarter_sq * Rational::from_integer(total.into())
            {
                let (l, l2) = if la < lb { (la, lb) } else { (lb, la) };
                return Ok(DensityOutcome::Pair { l, l2, count, total });
            }
        }
    }
    Ok(DensityOutcome::Fail)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToySpec {
    pub layers: usize,
    pub vars_per_layer: Vec<usize>,
    pub range_sizes: Vec<usize>,
    /// Probability that a cross-layer variable pair carries a constraint.
    pub density: Rational,
    pub planted: bool,
    pub seed: u64,
}

pub fn toy_variable(layer: usize, i: usize) -> String {
    format!("v{}_{}", layer + 1, i + 1)
}

/// Seeded toy instance. When `planted`, the returned labeling satisfies
/// every constraint.
pub fn make_toy_layered_csp(spec: &ToySpec) -> Result<(LayeredCsp, Option<Labeling>), PcpError> {
    let gen_err = |m: &str| Err(PcpError::Generator(m.to_string()));
    if spec.layers < 2 {
        return gen_err("need at least two layers");
    }
    if spec.vars_per_layer.len() != spec.layers || spec.range_sizes.len() != spec.layers {
        return gen_err("one variable count and one range size per layer");
    }
    if spec.vars_per_layer.contains(&0) || spec.range_sizes.contains(&0) {
        return gen_err("variable counts and range sizes must be positive");
    }
    if spec.density < Rational::zero() || spec.density > Rational::one() {
        return gen_err("density must lie in [0, 1]");
    }
    let density = rational::to_f64(&spec.density);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let layers: Vec<Vec<String>> = (0..spec.layers)
        .map(|l| (0..spec.vars_per_layer[l]).map(|i| toy_variable(l, i)).collect())
        .collect();
    let planted: Option<Labeling> = spec.planted.then(|| {
        layers
            .iter()
            .enumerate()
            .flat_map(|(l, vars)| vars.iter().map(move |v| (l, v)))
            .map(|(l, v)| (v.clone(), rng.gen_range(0..spec.range_sizes[l])))
            .collect()
    });
    let mut constraints = Vec::new();
    for l in 0..spec.layers {
        for l2 in l + 1..spec.layers {
            for x in &layers[l] {
                for y in &layers[l2] {
                    if !rng.gen_bool(density) {
                        continue;
                    }
                    let mut pi: Vec<usize> = (0..spec.range_sizes[l])
                        .map(|_| rng.gen_range(0..spec.range_sizes[l2]))
                        .collect();
                    if let Some(a) = &planted {
                        pi[a[x]] = a[y];
                    }
                    constraints.push(Constraint {
                        x: x.clone(),
                        y: y.clone(),
                        pi,
                    });
                }
            }
        }
    }
    let csp = LayeredCsp::new(layers, spec.range_sizes.clone(), constraints, None)?;
    Ok((csp, planted))
}
