//! Python bindings. Rationals cross the boundary as `"n/d"` strings; reports
//! come back as plain dicts.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hypervc::gapgen;
use hypervc::optimize::{self, SolveMode};
use hypervc::pcp::{self, Labeling, LayeredCsp, ToySpec};
use hypervc::rational::{format_rational, parse_rational, Rational};
use hypervc::reduction::{self, ReductionInstance, ReductionParams};
use hypervc::setfam::{self, SetFamily};
use hypervc::PartiteHypergraph;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rat(s: &str) -> PyResult<Rational> {
    parse_rational(s).map_err(err)
}

/// Round-trips a JSON document into Python objects.
fn loads<'py>(py: Python<'py>, doc: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (doc,))
}

fn family(n: usize, sets: &[Vec<usize>]) -> PyResult<SetFamily> {
    SetFamily::from_element_lists(n, sets).map_err(err)
}

/// A k-partite k-uniform weighted hypergraph.
#[pyclass(name = "Hypergraph", module = "hypervc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHypergraph {
    inner: PartiteHypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        Ok(Self { inner: PartiteHypergraph::parse(doc).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.serialize()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn total_weight(&self) -> String {
        format_rational(&self.inner.total_weight())
    }

    /// Structural problems, empty when the hypergraph is well formed.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| format!("{v:?}")).collect()
    }

    fn is_cover(&self, ids: Vec<String>) -> PyResult<bool> {
        self.inner.is_cover(&ids).map_err(err)
    }

    fn is_independent(&self, ids: Vec<String>) -> PyResult<bool> {
        self.inner.is_independent(&ids).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(k={}, vertices={}, edges={})",
            self.inner.k(),
            self.inner.num_vertices(),
            self.inner.num_edges()
        )
    }
}

/// Exact LP optimum: `(objective, {id: value})`.
#[pyfunction]
fn solve_lp(h: &PyHypergraph) -> PyResult<(String, BTreeMap<String, String>)> {
    let lp = optimize::solve_lp(&h.inner).map_err(err)?;
    Ok((format_rational(lp.value()), lp.solution.to_id_map(&h.inner)))
}

/// Minimum-weight cover by branch and bound.
#[pyfunction]
#[pyo3(signature = (h, node_budget = optimize::DEFAULT_NODE_BUDGET))]
fn exact_min_vc<'py>(py: Python<'py>, h: &PyHypergraph, node_budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let c = optimize::exact_min_vc_with_budget(&h.inner, node_budget).map_err(err)?;
    let ids: Vec<&String> = c.certificate.vertex_set.iter().collect();
    let doc = serde_json::json!({
        "weight": format_rational(&c.certificate.weight),
        "cover": ids,
        "optimal": c.optimal,
        "nodes": c.nodes,
    });
    loads(py, &doc.to_string())
}

/// Solve report for `mode` in lp | exact | round | greedy | all.
#[pyfunction]
#[pyo3(signature = (h, mode = "all", name = "instance", node_budget = optimize::DEFAULT_NODE_BUDGET))]
fn solve<'py>(py: Python<'py>, h: &PyHypergraph, mode: &str, name: &str, node_budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let mode: SolveMode = mode.parse().map_err(err)?;
    let rep = optimize::solve(&h.inner, name, mode, node_budget).map_err(err)?;
    loads(py, &rep.to_json())
}

#[pyfunction]
#[pyo3(signature = (r, k, full = false))]
fn ahk_instance(r: u64, k: usize, full: bool) -> PyResult<PyHypergraph> {
    let inst = gapgen::build_ahk(r, k, full).map_err(err)?;
    Ok(PyHypergraph { inner: inst.hypergraph })
}

#[pyfunction]
#[pyo3(signature = (r, k, full = false, node_budget = optimize::DEFAULT_NODE_BUDGET))]
fn gap_report<'py>(py: Python<'py>, r: u64, k: usize, full: bool, node_budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let inst = gapgen::build_ahk(r, k, full).map_err(err)?;
    let rep = gapgen::verify_gap(&inst, node_budget).map_err(err)?;
    loads(py, &serde_json::to_string(&rep).map_err(err)?)
}

#[pyfunction]
fn chernoff_t(eps: &str, delta: &str) -> PyResult<u64> {
    setfam::chernoff_t(&rat(eps)?, &rat(delta)?).map_err(err)
}

/// `μ_p` of a family of subsets of `{1..n}`.
#[pyfunction]
fn measure(n: usize, sets: Vec<Vec<usize>>, p: &str) -> PyResult<String> {
    let m = setfam::measure_family(&family(n, &sets)?, &rat(p)?).map_err(err)?;
    Ok(format_rational(&m))
}

#[pyfunction]
fn left_shift(n: usize, sets: Vec<Vec<usize>>) -> PyResult<Vec<Vec<usize>>> {
    Ok(setfam::left_shift(&family(n, &sets)?).element_lists())
}

#[pyfunction]
fn is_cross_intersecting(n: usize, families: Vec<Vec<Vec<usize>>>, t: usize) -> PyResult<bool> {
    let fams = families.iter().map(|s| family(n, s)).collect::<PyResult<Vec<_>>>()?;
    Ok(setfam::is_cross_intersecting(&fams, t, setfam::DEFAULT_PRODUCT_LIMIT)
        .map_err(err)?
        .holds())
}

/// A layered label-cover instance.
#[pyclass(name = "LayeredCsp", module = "hypervc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLayeredCsp {
    inner: LayeredCsp,
}

#[pymethods]
impl PyLayeredCsp {
    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        Ok(Self { inner: LayeredCsp::from_json(doc).map_err(err)? })
    }

    /// Seeded toy instance and, when `planted`, its satisfying labeling.
    #[staticmethod]
    #[pyo3(signature = (vars_per_layer, range_sizes, density = "1/2", seed = 0, planted = true))]
    fn toy(
        vars_per_layer: Vec<usize>,
        range_sizes: Vec<usize>,
        density: &str,
        seed: u64,
        planted: bool,
    ) -> PyResult<(Self, Option<Labeling>)> {
        let (csp, lab) = pcp::make_toy_layered_csp(&ToySpec {
            layers: vars_per_layer.len(),
            vars_per_layer,
            range_sizes,
            density: rat(density)?,
            planted,
            seed,
        })
        .map_err(err)?;
        Ok((Self { inner: csp }, lab))
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn layers(&self) -> Vec<Vec<String>> {
        self.inner.layers().to_vec()
    }

    #[getter]
    fn num_constraints(&self) -> usize {
        self.inner.constraints().len()
    }

    /// `(labeling, satisfied, total)` of the best labeling of layers `l < l2`.
    fn best_labeling(&self, l: usize, l2: usize) -> PyResult<(Labeling, u64, u64)> {
        let b = pcp::best_labeling(&self.inner, l, l2).map_err(err)?;
        Ok((b.labeling, b.satisfied, b.total))
    }
}

/// The reduction hypergraph of a layered label-cover instance.
#[pyclass(name = "Reduction", module = "hypervc_py", frozen)]
struct PyReduction {
    inner: ReductionInstance,
}

#[pymethods]
impl PyReduction {
    #[new]
    fn new(csp: &PyLayeredCsp, k: usize, eps: &str, r: u64) -> PyResult<Self> {
        let params = ReductionParams::new(k, rat(eps)?, r).map_err(err)?;
        Ok(Self { inner: reduction::build_reduction(&csp.inner, &params).map_err(err)? })
    }

    fn hypergraph(&self) -> PyHypergraph {
        PyHypergraph { inner: self.inner.hypergraph.clone() }
    }

    /// Expected non-dummy weight of a completeness certificate.
    fn completeness_weight(&self) -> String {
        format_rational(&reduction::completeness_weight(&self.inner.params))
    }

    /// Vertex ids of the completeness certificate for a satisfying labeling.
    fn completeness_ids(&self, labeling: Labeling) -> PyResult<Vec<String>> {
        let c = reduction::completeness_certificate(&self.inner, &labeling).map_err(err)?;
        Ok(self.inner.hypergraph.ids_of_mask(&c.mask).into_iter().collect())
    }

    /// Decode report over every layer pair.
    fn decode<'py>(&self, py: Python<'py>, ids: Vec<String>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let mask = reduction::mask_from_ids(&self.inner, &ids).map_err(err)?;
        let rep = reduction::decode_all(&self.inner, &mask, seed).map_err(err)?;
        loads(py, &rep.to_json())
    }
}

#[pymodule]
fn hypervc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyLayeredCsp>()?;
    m.add_class::<PyReduction>()?;
    m.add_function(wrap_pyfunction!(solve_lp, m)?)?;
    m.add_function(wrap_pyfunction!(exact_min_vc, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(ahk_instance, m)?)?;
    m.add_function(wrap_pyfunction!(gap_report, m)?)?;
    m.add_function(wrap_pyfunction!(chernoff_t, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(left_shift, m)?)?;
    m.add_function(wrap_pyfunction!(is_cross_intersecting, m)?)?;
    Ok(())
}
