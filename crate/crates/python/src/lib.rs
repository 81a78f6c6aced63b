//! Python bindings: words, core graphs, the Whitehead test and the decision procedure.
//!
//! Words cross the boundary as strings in letter syntax (`a..z` generators,
//! `A..Z` inverses, `"1"` for the identity) or as [`PyWord`] objects.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use monomorph::decider::{Decider, Instance, Strategy, Verdict as CoreVerdict};
use monomorph::subgroup_search::topographs;
use monomorph::whitehead::OrbitSearch;
use monomorph::{image_rank as core_image_rank, CoreGraph, FreeGroup, Word};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse(text: &str, rank: usize) -> PyResult<Word> {
    FreeGroup::new(rank).map_err(err)?.parse(text).map_err(err)
}

fn parse_all(texts: &[String], rank: usize) -> PyResult<Vec<Word>> {
    texts.iter().map(|t| parse(t, rank)).collect()
}

fn texts(ws: &[Word]) -> Vec<String> {
    ws.iter().map(Word::to_text).collect()
}

fn strategy(name: &str) -> PyResult<Strategy> {
    name.parse().map_err(PyValueError::new_err)
}

/// A reduced word in a free group.
#[pyclass(name = "Word", frozen, eq, hash)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyWord {
    inner: Word,
}

#[pymethods]
impl PyWord {
    #[new]
    #[pyo3(signature = (text = "1"))]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyWord { inner: Word::parse(text).map_err(err)? })
    }

    /// Builds a word from signed generator indices, e.g. `[1, -2]` for `aB`.
    #[staticmethod]
    fn from_signed(letters: Vec<i32>) -> PyResult<Self> {
        if letters.contains(&0) {
            return Err(PyValueError::new_err("generator indices start at 1"));
        }
        Ok(PyWord { inner: Word::from_signed(&letters) })
    }

    fn to_signed(&self) -> Vec<i32> {
        self.inner.to_signed()
    }

    fn inverse(&self) -> Self {
        PyWord { inner: self.inner.inverse() }
    }

    fn cyclic_core(&self) -> Self {
        PyWord { inner: self.inner.cyclic_core() }
    }

    fn substitute(&self, images: Vec<String>) -> PyResult<Self> {
        let images = parse_all(&images, 26)?;
        Ok(PyWord { inner: self.inner.substitute(&images).map_err(err)? })
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyWord { inner: self.inner.mul(&other.inner) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Word('{}')", self.inner.to_text())
    }
}

/// Folded core graph of a finitely generated subgroup.
#[pyclass(name = "CoreGraph", frozen)]
struct PyCoreGraph {
    inner: CoreGraph,
}

#[pymethods]
impl PyCoreGraph {
    #[new]
    fn new(rank: usize, generators: Vec<String>) -> PyResult<Self> {
        Ok(PyCoreGraph { inner: CoreGraph::build(&parse_all(&generators, rank)?) })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    fn contains(&self, word: &str) -> PyResult<bool> {
        Ok(self.inner.contains(&Word::parse(word).map_err(err)?))
    }

    /// Expression of `word` over the generators, or `None` if it is not a member.
    fn member(&self, word: &str) -> PyResult<Option<String>> {
        Ok(self.inner.member(&Word::parse(word).map_err(err)?).map(|m| m.expression.to_text()))
    }

    fn basis(&self) -> Vec<String> {
        texts(&self.inner.tree_basis())
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }
}

/// Outcome of a decision: `answer`, `witness` (images of the generators) and `trace`.
#[pyclass(name = "Verdict", frozen, get_all)]
struct PyVerdict {
    answer: String,
    witness: Option<Vec<String>>,
    candidates: usize,
    whitehead_calls: usize,
    candidate_generation_ms: f64,
    whitehead_ms: f64,
    certificate: Option<String>,
}

#[pymethods]
impl PyVerdict {
    fn __bool__(&self) -> bool {
        self.answer == "YES"
    }

    fn __repr__(&self) -> String {
        format!("Verdict(answer={}, witness={:?})", self.answer, self.witness)
    }
}

impl From<CoreVerdict> for PyVerdict {
    fn from(v: CoreVerdict) -> Self {
        PyVerdict {
            answer: v.answer.to_string(),
            witness: v.witness.as_ref().map(|w| texts(&w.images)),
            candidates: v.trace.candidates,
            whitehead_calls: v.trace.whitehead_calls,
            candidate_generation_ms: v.timings.candidate_generation.as_secs_f64() * 1e3,
            whitehead_ms: v.timings.whitehead.as_secs_f64() * 1e3,
            certificate: v.trace.accepted.map(|a| a.certificate.to_text()),
        }
    }
}

/// Decides whether a monomorphism of the free group of rank `n` sends `u` to `v`.
#[pyfunction]
#[pyo3(signature = (n, u, v, strategy = "testsub"))]
fn decide(n: usize, u: &str, v: &str, strategy: &str) -> PyResult<PyVerdict> {
    let inst = Instance::new(n, parse(u, n)?, parse(v, n)?);
    let verdict = Decider::new(n).map_err(err)?.decide(&inst, self::strategy(strategy)?).map_err(err)?;
    Ok(verdict.into())
}

/// Decides whether one monomorphism sends every `us[j]` to `vs[j]`.
#[pyfunction]
#[pyo3(signature = (n, us, vs, strategy = "testsub"))]
fn decide_multi(n: usize, us: Vec<String>, vs: Vec<String>, strategy: &str) -> PyResult<PyVerdict> {
    let inst = Instance::multi(n, parse_all(&us, n)?, parse_all(&vs, n)?);
    let verdict = Decider::new(n).map_err(err)?.decide(&inst, self::strategy(strategy)?).map_err(err)?;
    Ok(verdict.into())
}

/// Brute-force search for images of length at most `bound`.
#[pyfunction]
fn oracle(n: usize, u: &str, v: &str, bound: usize) -> PyResult<Option<Vec<String>>> {
    let inst = Instance::new(n, parse(u, n)?, parse(v, n)?);
    Ok(monomorph::oracle(&inst, bound).map(|w| texts(&w.images)))
}

/// Whitehead test: the certificate text if an automorphism sends each `us[j]` to `vs[j]`.
#[pyfunction]
fn equivalent(n: usize, us: Vec<String>, vs: Vec<String>) -> PyResult<Option<String>> {
    let cert = OrbitSearch::new(n).equivalent(&parse_all(&us, n)?, &parse_all(&vs, n)?).map_err(err)?;
    Ok(cert.map(|c| c.to_text()))
}

/// Rank of the subgroup generated by `images`.
#[pyfunction]
fn image_rank(n: usize, images: Vec<String>) -> PyResult<usize> {
    Ok(core_image_rank(&parse_all(&images, n)?))
}

/// Candidate subgroups for target `v`: a list of dicts with `basis` and `w`.
#[pyfunction]
#[pyo3(signature = (n, v, strategy = "testsub"))]
fn candidates<'py>(py: Python<'py>, n: usize, v: &str, strategy: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let v = parse(v, n)?;
    if v.is_empty() {
        return Err(PyValueError::new_err("target must be nontrivial"));
    }
    let cands = Decider::new(n).map_err(err)?.candidates(&[v], self::strategy(strategy)?);
    cands
        .iter()
        .map(|c| {
            let d = PyDict::new_bound(py);
            d.set_item("basis", texts(&c.basis))?;
            d.set_item("w", c.expression().to_text())?;
            Ok(d)
        })
        .collect()
}

/// Topological graphs of rank `g` as `(vertices, arcs)` pairs.
#[pyfunction]
fn topological_graphs(g: usize) -> PyResult<Vec<(usize, Vec<(usize, usize)>)>> {
    if g == 0 {
        return Err(PyValueError::new_err("rank must be at least 1"));
    }
    Ok(topographs(g).iter().map(|t| (t.vertices, t.arcs.clone())).collect())
}

#[pymodule]
pub fn monomorph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWord>()?;
    m.add_class::<PyCoreGraph>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(decide_multi, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(image_rank, m)?)?;
    m.add_function(wrap_pyfunction!(candidates, m)?)?;
    m.add_function(wrap_pyfunction!(topological_graphs, m)?)?;
    Ok(())
}
