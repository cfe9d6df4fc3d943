//! Weighted k-partite k-uniform hypergraphs, cover and independent-set
//! certificates, and the canonical JSON document format.
//!
//! Vertices are addressed by structured string ids (`"part/tag"`) at the API
//! boundary and by dense indices internally. Edges store one vertex index
//! per part, in part order, once the instance is valid.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational, Rational};

pub type VertexIdx = usize;
pub type EdgeIdx = usize;

#[derive(Debug, Error)]
pub enum HypergraphError {
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("part index {part} out of range for k = {k}")]
    PartOutOfRange { part: usize, k: usize },
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(VertexIdx),
    #[error("value vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub part: usize,
    pub weight: Rational,
}

/// A hypergraph whose vertex set is split into `k` given parts.
///
/// Construction is permissive: [`PartiteHypergraph::validate`] reports every
/// violated invariant instead of the builder rejecting edges.
#[derive(Debug, Clone)]
pub struct PartiteHypergraph {
    k: usize,
    vertices: Vec<Vertex>,
    parts: Vec<Vec<VertexIdx>>,
    edges: Vec<Vec<VertexIdx>>,
    index: HashMap<String, VertexIdx>,
}

impl PartialEq for PartiteHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.vertices == other.vertices
            && self.parts == other.parts
            && self.edges == other.edges
    }
}

impl Eq for PartiteHypergraph {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EdgeSize { edge: EdgeIdx, size: usize, k: usize },
    EdgePartite { edge: EdgeIdx, part: usize, count: usize },
    DuplicateEdge { edge: EdgeIdx, first: EdgeIdx },
    NegativeWeight { vertex: String },
    DuplicateVertexId { vertex: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeSize { edge, size, k } => {
                write!(f, "edge {edge} has {size} vertices, expected {k}")
            }
            Violation::EdgePartite { edge, part, count } => {
                write!(f, "edge {edge} has {count} vertices in part {part}, expected 1")
            }
            Violation::DuplicateEdge { edge, first } => {
                write!(f, "edge {edge} duplicates edge {first}")
            }
            Violation::NegativeWeight { vertex } => write!(f, "vertex {vertex} has negative weight"),
            Violation::DuplicateVertexId { vertex } => write!(f, "vertex id {vertex} is not unique"),
        }
    }
}

/// A vertex set that meets every edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    #[serde(rename = "vertexSet")]
    pub vertex_set: BTreeSet<String>,
    #[serde(with = "crate::rational::serde_str")]
    pub weight: Rational,
}

/// A vertex set containing no edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSetCertificate {
    #[serde(rename = "vertexSet")]
    pub vertex_set: BTreeSet<String>,
    #[serde(with = "crate::rational::serde_str")]
    pub weight: Rational,
}

/// Per-vertex LP values, indexed like [`PartiteHypergraph::vertices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FractionalIssue {
    OutOfRange { vertex: VertexIdx },
    Uncovered { edge: EdgeIdx },
    Objective { stated: Rational, actual: Rational },
}

impl FractionalSolution {
    pub fn new(h: &PartiteHypergraph, values: Vec<Rational>) -> Result<Self, HypergraphError> {
        if values.len() != h.num_vertices() {
            return Err(HypergraphError::LengthMismatch {
                got: values.len(),
                expected: h.num_vertices(),
            });
        }
        let objective = h.weigh_values(&values);
        Ok(Self { values, objective })
    }

    /// Re-checks bounds, every edge constraint and the objective.
    pub fn issues(&self, h: &PartiteHypergraph) -> Vec<FractionalIssue> {
        let mut out = Vec::new();
        if self.values.len() != h.num_vertices() {
            return vec![FractionalIssue::OutOfRange {
                vertex: self.values.len(),
            }];
        }
        for (v, x) in self.values.iter().enumerate() {
            if x.is_negative() || x > &Rational::one() {
                out.push(FractionalIssue::OutOfRange { vertex: v });
            }
        }
        for (e, edge) in h.edges().iter().enumerate() {
            let sum: Rational = edge.iter().map(|&v| &self.values[v]).sum();
            if sum < Rational::one() {
                out.push(FractionalIssue::Uncovered { edge: e });
            }
        }
        let actual = h.weigh_values(&self.values);
        if actual != self.objective {
            out.push(FractionalIssue::Objective {
                stated: self.objective.clone(),
                actual,
            });
        }
        out
    }

    pub fn is_feasible(&self, h: &PartiteHypergraph) -> bool {
        self.issues(h).is_empty()
    }

    pub fn to_id_map(&self, h: &PartiteHypergraph) -> BTreeMap<String, String> {
        h.vertices()
            .iter()
            .zip(&self.values)
            .map(|(v, x)| (v.id.clone(), format_rational(x)))
            .collect()
    }
}

impl PartiteHypergraph {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            vertices: Vec::new(),
            parts: vec![Vec::new(); k],
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexIdx) -> &Vertex {
        &self.vertices[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn parts(&self) -> &[Vec<VertexIdx>] {
        &self.parts
    }

    pub fn edges(&self) -> &[Vec<VertexIdx>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn lookup(&self, id: &str) -> Option<VertexIdx> {
        self.index.get(id).copied()
    }

    pub fn weight(&self, v: VertexIdx) -> &Rational {
        &self.vertices[v].weight
    }

    pub fn add_vertex(
        &mut self,
        part: usize,
        id: impl Into<String>,
        weight: Rational,
    ) -> Result<VertexIdx, HypergraphError> {
        let id = id.into();
        if part >= self.k {
            return Err(HypergraphError::PartOutOfRange { part, k: self.k });
        }
        if self.index.contains_key(&id) {
            return Err(HypergraphError::DuplicateVertex(id));
        }
        let idx = self.vertices.len();
        self.index.insert(id.clone(), idx);
        self.vertices.push(Vertex { id, part, weight });
        self.parts[part].push(idx);
        Ok(idx)
    }

    /// Appends an edge without checking partiteness; see [`Self::validate`].
    pub fn add_edge(&mut self, mut edge: Vec<VertexIdx>) -> Result<EdgeIdx, HypergraphError> {
        if let Some(&bad) = edge.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(HypergraphError::VertexOutOfRange(bad));
        }
        edge.sort_by_key(|&v| (self.vertices[v].part, v));
        self.edges.push(edge);
        Ok(self.edges.len() - 1)
    }

    pub fn add_edge_by_ids<S: AsRef<str>>(&mut self, ids: &[S]) -> Result<EdgeIdx, HypergraphError> {
        let edge = self.resolve(ids.iter().map(|s| s.as_ref()))?;
        self.add_edge(edge)
    }

    pub fn resolve<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<Vec<VertexIdx>, HypergraphError> {
        ids.into_iter()
            .map(|id| {
                self.lookup(id)
                    .ok_or_else(|| HypergraphError::UnknownVertex(id.to_owned()))
            })
            .collect()
    }

    pub fn mask_of<S: AsRef<str>>(
        &self,
        ids: impl IntoIterator<Item = S>,
    ) -> Result<Vec<bool>, HypergraphError> {
        let mut mask = vec![false; self.vertices.len()];
        for id in ids {
            let id = id.as_ref();
            let v = self
                .lookup(id)
                .ok_or_else(|| HypergraphError::UnknownVertex(id.to_owned()))?;
            mask[v] = true;
        }
        Ok(mask)
    }

    pub fn ids_of_mask(&self, mask: &[bool]) -> BTreeSet<String> {
        mask.iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(v, _)| self.vertices[v].id.clone())
            .collect()
    }

    pub fn total_weight(&self) -> Rational {
        self.vertices.iter().map(|v| &v.weight).sum()
    }

    pub fn weigh_mask(&self, mask: &[bool]) -> Rational {
        self.vertices
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| &v.weight)
            .sum()
    }

    pub fn weigh_values(&self, values: &[Rational]) -> Rational {
        self.vertices
            .iter()
            .zip(values)
            .filter(|(_, x)| !x.is_zero())
            .map(|(v, x)| &v.weight * x)
            .sum()
    }

    pub fn is_unit_weight(&self) -> bool {
        self.vertices.iter().all(|v| v.weight.is_one())
    }

    /// Lists every violated structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen_ids = HashSet::new();
        for v in &self.vertices {
            if !seen_ids.insert(v.id.as_str()) {
                out.push(Violation::DuplicateVertexId { vertex: v.id.clone() });
            }
            if v.weight.is_negative() {
                out.push(Violation::NegativeWeight { vertex: v.id.clone() });
            }
        }
        let mut seen_edges: HashMap<Vec<VertexIdx>, EdgeIdx> = HashMap::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.len() != self.k {
                out.push(Violation::EdgeSize {
                    edge: e,
                    size: edge.len(),
                    k: self.k,
                });
            }
            let mut counts = vec![0usize; self.k];
            for &v in edge {
                counts[self.vertices[v].part] += 1;
            }
            for (part, &count) in counts.iter().enumerate() {
                if count != 1 && (count > 1 || edge.len() == self.k) {
                    out.push(Violation::EdgePartite { edge: e, part, count });
                }
            }
            let mut key = edge.clone();
            key.sort_unstable();
            if let Some(&first) = seen_edges.get(&key) {
                out.push(Violation::DuplicateEdge { edge: e, first });
            } else {
                seen_edges.insert(key, e);
            }
        }
        out
    }

    /// First edge not met by `mask`, if any.
    pub fn first_uncovered(&self, mask: &[bool]) -> Option<EdgeIdx> {
        self.edges
            .iter()
            .position(|edge| !edge.iter().any(|&v| mask[v]))
    }

    /// First edge entirely inside `mask`, if any.
    pub fn first_contained(&self, mask: &[bool]) -> Option<EdgeIdx> {
        self.edges
            .iter()
            .position(|edge| edge.iter().all(|&v| mask[v]))
    }

    /// `Ok(None)` when `s` is a cover, otherwise the ids of the first uncovered edge.
    pub fn check_cover<S: AsRef<str>>(
        &self,
        s: impl IntoIterator<Item = S>,
    ) -> Result<Option<Vec<String>>, HypergraphError> {
        let mask = self.mask_of(s)?;
        Ok(self.first_uncovered(&mask).map(|e| self.edge_ids(e)))
    }

    pub fn is_cover<S: AsRef<str>>(
        &self,
        s: impl IntoIterator<Item = S>,
    ) -> Result<bool, HypergraphError> {
        Ok(self.check_cover(s)?.is_none())
    }

    /// `Ok(None)` when `s` is independent, otherwise the ids of the first contained edge.
    pub fn check_independent<S: AsRef<str>>(
        &self,
        s: impl IntoIterator<Item = S>,
    ) -> Result<Option<Vec<String>>, HypergraphError> {
        let mask = self.mask_of(s)?;
        Ok(self.first_contained(&mask).map(|e| self.edge_ids(e)))
    }

    pub fn is_independent<S: AsRef<str>>(
        &self,
        s: impl IntoIterator<Item = S>,
    ) -> Result<bool, HypergraphError> {
        Ok(self.check_independent(s)?.is_none())
    }

    pub fn edge_ids(&self, e: EdgeIdx) -> Vec<String> {
        self.edges[e]
            .iter()
            .map(|&v| self.vertices[v].id.clone())
            .collect()
    }

    pub fn cover_certificate(&self, mask: &[bool]) -> CoverCertificate {
        CoverCertificate {
            vertex_set: self.ids_of_mask(mask),
            weight: self.weigh_mask(mask),
        }
    }

    pub fn independent_certificate(&self, mask: &[bool]) -> IndependentSetCertificate {
        IndependentSetCertificate {
            vertex_set: self.ids_of_mask(mask),
            weight: self.weigh_mask(mask),
        }
    }

    /// Sets of edge indices incident to each vertex.
    pub fn incidence(&self) -> Vec<Vec<EdgeIdx>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(e);
            }
        }
        inc
    }

    /// Rebuilds the instance in canonical order: vertices sorted by
    /// (part, id), each edge in part order, edges sorted by their id tuples.
    pub fn canonicalize(&self) -> Self {
        let mut order: Vec<VertexIdx> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (&self.vertices[a], &self.vertices[b]);
            (va.part, &va.id).cmp(&(vb.part, &vb.id))
        });
        let mut remap = vec![0; self.vertices.len()];
        let mut out = Self::new(self.k);
        for &old in &order {
            let v = &self.vertices[old];
            let idx = out.vertices.len();
            remap[old] = idx;
            out.index.insert(v.id.clone(), idx);
            out.vertices.push(v.clone());
            out.parts[v.part].push(idx);
        }
        let mut edges: Vec<Vec<VertexIdx>> = self
            .edges
            .iter()
            .map(|edge| {
                let mut e: Vec<VertexIdx> = edge.iter().map(|&v| remap[v]).collect();
                // new indices are already ordered by (part, id)
                e.sort_unstable();
                e
            })
            .collect();
        edges.sort();
        out.edges = edges;
        out
    }

    /// Canonical, byte-deterministic document (three lines plus a newline).
    pub fn serialize(&self) -> String {
        let c = self.canonicalize();
        let q = |s: &str| serde_json::to_string(s).expect("string serialization");
        let parts: Vec<String> = c
            .parts
            .iter()
            .map(|p| {
                let ids: Vec<String> = p.iter().map(|&v| q(&c.vertices[v].id)).collect();
                format!("[{}]", ids.join(","))
            })
            .collect();
        let weights: Vec<String> = c
            .vertices
            .iter()
            .map(|v| format!("{}:{}", q(&v.id), q(&format_rational(&v.weight))))
            .collect();
        let edges: Vec<String> = c
            .edges
            .iter()
            .map(|e| {
                let ids: Vec<String> = e.iter().map(|&v| q(&c.vertices[v].id)).collect();
                format!("[{}]", ids.join(","))
            })
            .collect();
        format!(
            "{{\"k\":{},\"parts\":[{}],\n\"weights\":{{{}}},\n\"edges\":[{}]}}\n",
            c.k,
            parts.join(","),
            weights.join(","),
            edges.join(",")
        )
    }

    pub fn parse(doc: &str) -> Result<Self, ParseError> {
        let raw: HypergraphDoc = serde_json::from_str(doc).map_err(|e| ParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.into_hypergraph()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct HypergraphDoc {
    k: usize,
    parts: Vec<Vec<String>>,
    #[serde(default)]
    weights: BTreeMap<String, String>,
    #[serde(default)]
    edges: Vec<Vec<String>>,
}

impl HypergraphDoc {
    fn into_hypergraph(self) -> Result<PartiteHypergraph, ParseError> {
        let field = |field: String, message: String| ParseError::Field { field, message };
        if self.k == 0 {
            return Err(field("k".into(), "k must be positive".into()));
        }
        if self.parts.len() != self.k {
            return Err(field(
                "parts".into(),
                format!("expected {} parts, found {}", self.k, self.parts.len()),
            ));
        }
        let mut h = PartiteHypergraph::new(self.k);
        for (p, part) in self.parts.iter().enumerate() {
            for (i, id) in part.iter().enumerate() {
                let weight = match self.weights.get(id) {
                    Some(w) => parse_rational(w)
                        .map_err(|e| field(format!("weights[{id:?}]"), e.to_string()))?,
                    None => Rational::one(),
                };
                h.add_vertex(p, id.clone(), weight)
                    .map_err(|e| field(format!("parts[{p}][{i}]"), e.to_string()))?;
            }
        }
        if let Some(id) = self.weights.keys().find(|id| h.lookup(id).is_none()) {
            return Err(field(
                format!("weights[{id:?}]"),
                "weight given for unknown vertex".into(),
            ));
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let mut idx = Vec::with_capacity(edge.len());
            for (i, id) in edge.iter().enumerate() {
                let v = h
                    .lookup(id)
                    .ok_or_else(|| field(format!("edges[{e}][{i}]"), format!("unknown vertex {id:?}")))?;
                idx.push(v);
            }
            h.add_edge(idx).expect("indices resolved above");
        }
        Ok(h)
    }
}
