//! Python bindings for `msflab`.

use ::msflab as core;
use core::exact::rational_string;
use core::{EdgeId, ForestMask, GridTopology, Label, MultiGraph, VertexId, ZValue};
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::VertexOutOfRange { .. } | core::Error::UnknownEdge(_) => PyIndexError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn ids(mask: &ForestMask) -> Vec<usize> {
    mask.iter().map(|e| e.0).collect()
}

fn vertices(vs: &[usize]) -> Vec<VertexId> {
    vs.iter().map(|&v| VertexId(v)).collect()
}

fn edges(es: &[usize]) -> Vec<EdgeId> {
    es.iter().map(|&e| EdgeId(e)).collect()
}

/// Finite multigraph; edges are numbered in insertion order.
#[pyclass(name = "Graph", module = "msflab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: MultiGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self {
            inner: MultiGraph::new(vertex_count, &edges).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (dimension, side, torus = false))]
    fn grid(dimension: usize, side: usize, torus: bool) -> PyResult<Self> {
        let topology = if torus { GridTopology::Torus } else { GridTopology::Free };
        Ok(Self {
            inner: core::grid_box(dimension, side, topology).map_err(err)?,
        })
    }

    #[staticmethod]
    fn correlation_example() -> Self {
        Self {
            inner: core::build_correlation_example().graph,
        }
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::parse_graph(text).map_err(err)?.graph,
        })
    }

    fn to_text(&self) -> String {
        core::format_graph(&core::GraphDocument::new(self.inner.clone()))
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edge_list()
    }

    fn tag(&self, name: &str) -> Option<Vec<usize>> {
        self.inner.tagged(name).map(|vs| vs.iter().map(|v| v.0).collect())
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

/// Injective edge labels in [0, 1].
#[pyclass(name = "Labeling", module = "msflab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLabeling {
    inner: core::Labeling,
}

#[pymethods]
impl PyLabeling {
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::Labeling::from_floats(values).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (graph, seed, exact = false))]
    fn sample(graph: &PyGraph, seed: u64, exact: bool) -> Self {
        let inner = if exact {
            core::Labeling::sample_exact(&graph.inner, seed)
        } else {
            core::Labeling::sample(&graph.inner, seed)
        };
        Self { inner }
    }

    fn values(&self) -> Vec<f64> {
        (0..self.inner.len()).map(|e| self.inner.value(EdgeId(e))).collect()
    }

    fn label(&self, edge: usize) -> PyResult<String> {
        if edge >= self.inner.len() {
            return Err(PyIndexError::new_err(format!("no edge {edge}")));
        }
        Ok(match self.inner.label(EdgeId(edge)) {
            Label::Float(x) => x.to_string(),
            other => other.to_string(),
        })
    }

    fn less(&self, e: usize, f: usize) -> PyResult<bool> {
        if e.max(f) >= self.inner.len() {
            return Err(PyIndexError::new_err("edge out of range"));
        }
        Ok(self.inner.less(EdgeId(e), EdgeId(f)))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn check_len(graph: &PyGraph, labels: &PyLabeling) -> PyResult<()> {
    if graph.inner.edge_count() != labels.inner.len() {
        return Err(PyValueError::new_err(format!(
            "{} labels for {} edges",
            labels.inner.len(),
            graph.inner.edge_count()
        )));
    }
    Ok(())
}

fn z_py(z: ZValue, labels: &core::Labeling) -> f64 {
    match z {
        ZValue::Infinite => f64::INFINITY,
        other => other.value(labels),
    }
}

/// Edge ids of the free minimal spanning forest.
#[pyfunction]
fn free_forest(graph: &PyGraph, labels: &PyLabeling) -> PyResult<Vec<usize>> {
    check_len(graph, labels)?;
    Ok(ids(&core::kruskal_mst(&graph.inner, &labels.inner)))
}

/// Edge ids of the wired minimal spanning forest.
#[pyfunction]
fn wired_forest(graph: &PyGraph, boundary: Vec<usize>, labels: &PyLabeling) -> PyResult<Vec<usize>> {
    check_len(graph, labels)?;
    Ok(ids(
        &core::wired_mst(&graph.inner, &vertices(&boundary), &labels.inner).map_err(err)?
    ))
}

/// Free `Z` value of an edge; `inf` for a bridge, 0 for a loop.
#[pyfunction]
fn z_free(graph: &PyGraph, labels: &PyLabeling, edge: usize) -> PyResult<f64> {
    check_len(graph, labels)?;
    let z = core::z_free(&graph.inner, &labels.inner, EdgeId(edge)).map_err(err)?;
    Ok(z_py(z, &labels.inner))
}

#[pyfunction]
fn z_wired(graph: &PyGraph, boundary: Vec<usize>, labels: &PyLabeling, edge: usize) -> PyResult<f64> {
    check_len(graph, labels)?;
    let z = core::z_wired(&graph.inner, &vertices(&boundary), &labels.inner, EdgeId(edge)).map_err(err)?;
    Ok(z_py(z, &labels.inner))
}

/// Accepted edges of the invasion tree (or basin) from `source`.
#[pyfunction]
#[pyo3(signature = (graph, labels, source, steps = None, basin = false))]
fn invade(
    graph: &PyGraph,
    labels: &PyLabeling,
    source: usize,
    steps: Option<usize>,
    basin: bool,
) -> PyResult<Vec<usize>> {
    check_len(graph, labels)?;
    let steps = steps.unwrap_or(usize::MAX);
    let run = if basin {
        core::invasion_basin
    } else {
        core::invasion_tree
    };
    let trace = run(&graph.inner, &labels.inner, VertexId(source), steps).map_err(err)?;
    Ok(trace.edges_in_order.iter().map(|e| e.0).collect())
}

#[pyfunction]
fn invasion_union(graph: &PyGraph, boundary: Vec<usize>, labels: &PyLabeling) -> PyResult<Vec<usize>> {
    check_len(graph, labels)?;
    Ok(ids(&core::invasion_union(
        &graph.inner,
        &vertices(&boundary),
        &labels.inner,
    )
    .map_err(err)?))
}

/// Exact probability, as a `"p/q"` string, that `tree` is the minimal spanning tree.
#[pyfunction]
fn mst_probability(graph: &PyGraph, tree: Vec<usize>) -> PyResult<String> {
    Ok(rational_string(
        &core::mst_probability(&graph.inner, &edges(&tree)).map_err(err)?,
    ))
}

/// Every spanning tree with its exact probability.
#[pyfunction]
fn tree_catalog(graph: &PyGraph) -> PyResult<Vec<(Vec<usize>, String)>> {
    let c = core::tree_catalog(&graph.inner).map_err(err)?;
    Ok(c.trees
        .iter()
        .zip(&c.probabilities)
        .map(|(t, p)| (t.iter().map(|e| e.0).collect(), rational_string(p)))
        .collect())
}

/// `P(a, b in T) / (P(a in T) P(b in T))` as a `"p/q"` string.
#[pyfunction]
fn edge_correlation(graph: &PyGraph, a: usize, b: usize) -> PyResult<String> {
    let c = core::tree_catalog(&graph.inner).map_err(err)?;
    let r = core::edge_correlation(&c, EdgeId(a), EdgeId(b)).map_err(err)?;
    Ok(rational_string(&r.ratio))
}

type DualParts = (usize, Vec<(usize, usize)>, Vec<usize>);

/// Dual of the plane grid of the given side: (vertices, edges, bijection).
#[pyfunction]
fn grid_dual(side: usize) -> PyResult<DualParts> {
    let emb = core::embed_grid(side).map_err(err)?;
    let pair = core::dual_graph(&emb).map_err(err)?;
    let d = pair.dual_graph();
    Ok((
        d.vertex_count(),
        d.edge_list(),
        pair.edge_bijection.iter().map(|e| e.0).collect(),
    ))
}

/// Runs one acceptance criterion; returns (pass, summary line).
#[pyfunction]
#[pyo3(signature = (id, full = false))]
fn run_criterion(py: Python<'_>, id: u8, full: bool) -> PyResult<(bool, String)> {
    let level = if full {
        core::SuiteLevel::Full
    } else {
        core::SuiteLevel::Quick
    };
    let r = py.detach(|| core::suite::run_criterion(id, level)).map_err(err)?;
    Ok((r.pass, r.line()))
}

#[pymodule]
fn msflab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyLabeling>()?;
    m.add_function(wrap_pyfunction!(free_forest, m)?)?;
    m.add_function(wrap_pyfunction!(wired_forest, m)?)?;
    m.add_function(wrap_pyfunction!(z_free, m)?)?;
    m.add_function(wrap_pyfunction!(z_wired, m)?)?;
    m.add_function(wrap_pyfunction!(invade, m)?)?;
    m.add_function(wrap_pyfunction!(invasion_union, m)?)?;
    m.add_function(wrap_pyfunction!(mst_probability, m)?)?;
    m.add_function(wrap_pyfunction!(tree_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(edge_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(grid_dual, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}
