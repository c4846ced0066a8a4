use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use padic::corner::{self, AdditiveMap, CornerParams};
use padic::random::{BinarySeq, Seed};
use padic::ring::RingPresentation;
use padic::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::NonUnit(_) | Error::NonInvertible(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::ResourceLimit(_) | Error::Inconclusive(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Serializes through JSON so reports arrive as plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(x).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn ring(p: u64, n: u32) -> PyResult<Arc<padic::PadicRing>> {
    padic::PadicRing::new(p, n).map_err(err)
}

/// Element of Z/p^N, a p-adic integer known to N digits.
#[pyclass(name = "PadicApprox", module = "padic_rigid", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPadic(padic::PadicApprox);

#[pymethods]
impl PyPadic {
    #[new]
    fn new(p: u64, precision: u32, value: BigInt) -> PyResult<Self> {
        Ok(Self(ring(p, precision)?.from_int(&value)))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    #[getter]
    fn residue(&self) -> BigUint {
        self.0.residue().clone()
    }

    /// Representative in `(-p^N/2, p^N/2]`.
    fn symmetric(&self) -> BigInt {
        self.0.symmetric()
    }

    /// `N` for zero.
    fn valuation(&self) -> u32 {
        self.0.valuation()
    }

    /// Base-p digits, least significant first.
    fn digits(&self) -> Vec<u64> {
        self.0.digits()
    }

    fn is_unit(&self) -> bool {
        self.0.is_unit()
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.unit_inverse().map(Self).map_err(err)
    }

    fn reduce_precision(&self, precision: u32) -> PyResult<Self> {
        self.0.reduce_precision(precision).map(Self).map_err(err)
    }

    fn __add__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.add(&o.0).map(Self).map_err(err)
    }

    fn __sub__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.sub(&o.0).map(Self).map_err(err)
    }

    fn __mul__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.mul(&o.0).map(Self).map_err(err)
    }

    fn __neg__(&self) -> Self {
        Self(self.0.neg())
    }

    fn __repr__(&self) -> String {
        format!("PadicApprox(p={}, precision={}, residue={})", self.0.p(), self.0.precision(), self.0.residue())
    }
}

/// Finitely supported vector with coordinates in Z/p^N.
#[pyclass(name = "PadicVector", module = "padic_rigid", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyVector(padic::PadicVector);

#[pymethods]
impl PyVector {
    #[new]
    fn new(p: u64, precision: u32, entries: BTreeMap<usize, BigInt>) -> PyResult<Self> {
        let r = ring(p, precision)?;
        Ok(Self(padic::PadicVector::from_ints(&r, entries.iter().map(|(i, x)| (*i, x)))))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    /// Non-zero coordinates as `{index: residue}`.
    fn entries(&self) -> BTreeMap<usize, BigUint> {
        self.0.entries().clone()
    }

    fn valuation(&self) -> u32 {
        self.0.valuation()
    }

    fn __add__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.add(&o.0).map(Self).map_err(err)
    }

    fn __sub__(&self, o: PyRef<'_, Self>) -> PyResult<Self> {
        self.0.sub(&o.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PadicVector(p={}, precision={}, entries={:?})", self.0.p(), self.0.precision(), self.0.entries())
    }
}

fn vectors(xs: &[PyRef<'_, PyVector>]) -> Vec<padic::PadicVector> {
    xs.iter().map(|v| v.0.clone()).collect()
}

fn label_set(xs: Vec<u32>) -> BTreeSet<u32> {
    xs.into_iter().collect()
}

/// Labelled module model for membership and rigidity probes.
#[pyclass(name = "CornerModel", module = "padic_rigid", frozen)]
struct PyCorner(corner::CornerModel);

#[pymethods]
impl PyCorner {
    #[staticmethod]
    #[pyo3(signature = (seed=0, ring="integers", p=5, precision=16, cap=8, height=10, module_rank=3, labels=vec![0, 1, 2], generators_per_label=2))]
    #[allow(clippy::too_many_arguments)]
    fn build(
        seed: u64,
        ring: &str,
        p: u64,
        precision: u32,
        cap: u32,
        height: u64,
        module_rank: usize,
        labels: Vec<u32>,
        generators_per_label: usize,
    ) -> PyResult<Self> {
        let params = CornerParams {
            ring: RingPresentation::load(ring).map_err(err)?,
            p,
            precision,
            cap,
            height,
            module_rank,
            labels,
            generators_per_label,
        };
        corner::CornerModel::build(params, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// Width of the window: coordinates of the module.
    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    /// Generator vectors as `(label, vector)`.
    fn generators(&self) -> Vec<(u32, PyVector)> {
        self.0.generators().iter().map(|g| (g.label, PyVector(g.vector.clone()))).collect()
    }

    fn membership<'py>(&self, py: Python<'py>, x: PyRef<'_, PyVector>, labels: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
        let r = self.0.membership(&x.0, &label_set(labels)).map_err(err)?;
        to_py(py, &r)
    }

    /// `map` is "random", "identity", or a list of ring coordinates for a
    /// multiplication map.
    #[pyo3(signature = (source, target, map=None, seed=0))]
    fn rigidity<'py>(
        &self,
        py: Python<'py>,
        source: Vec<u32>,
        target: Vec<u32>,
        map: Option<Bound<'py, PyAny>>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let (a, d) = (label_set(source), label_set(target));
        let m = &self.0;
        let r = match map {
            None => corner::rigidity_trial(m, &a, &d, &Seed::new(seed)),
            Some(v) if v.extract::<String>().is_ok_and(|s| s == "random") => {
                corner::rigidity_trial(m, &a, &d, &Seed::new(seed))
            }
            Some(v) if v.extract::<String>().is_ok_and(|s| s == "identity") => {
                corner::rigidity_trial_with(m, &a, &d, &AdditiveMap::identity(m.width()))
            }
            Some(v) => {
                let r: Vec<BigInt> = v.extract()?;
                if r.len() != m.params.ring.rank() {
                    return Err(PyValueError::new_err("ring element has the wrong number of coordinates"));
                }
                let phi = AdditiveMap::multiplication(&m.params.ring, m.params.module_rank, &r);
                corner::rigidity_trial_with(m, &a, &d, &phi)
            }
        }
        .map_err(err)?;
        to_py(py, &r)
    }
}

#[pyfunction]
fn sample_uniform(p: u64, precision: u32, seed: u64) -> PyResult<PyPadic> {
    padic::random::sample_uniform(p, precision, &Seed::new(seed)).map(PyPadic).map_err(err)
}

/// Value of the branch spelled by a 0/1 string in the random tree of `seed`.
#[pyfunction]
fn sample_branch_value(p: u64, branch: &str, seed: u64) -> PyResult<PyPadic> {
    let f: BinarySeq = branch.parse().map_err(err)?;
    padic::random::sample_branch_value(p, &f, &Seed::new(seed)).map(PyPadic).map_err(err)
}

#[pyfunction]
fn sample_tree<'py>(py: Python<'py>, p: u64, depth: u32, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let t = padic::random::sample_tree(p, depth, &Seed::new(seed)).map_err(err)?;
    to_py(py, &t)
}

#[pyfunction]
fn sample_nearly_uniform(p: u64, precision: u32, alpha: f64, seed: u64) -> PyResult<PyVector> {
    padic::random::sample_nearly_uniform(p, precision, alpha, &Seed::new(seed)).map(PyVector).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (values, degree=2, height=10))]
fn find_relation<'py>(py: Python<'py>, values: Vec<PyRef<'py, PyPadic>>, degree: u32, height: u64) -> PyResult<Bound<'py, PyAny>> {
    let xs: Vec<_> = values.iter().map(|v| v.0.clone()).collect();
    let r = padic::independence::find_relation(&xs, degree, height).map_err(err)?;
    to_py(py, &r)
}

/// Number of roots of the integer polynomial (coefficients, constant term
/// first) in Z/p^n.
#[pyfunction]
fn count_roots_mod_pn(coeffs: Vec<BigInt>, p: u64, n: u32) -> PyResult<BigUint> {
    padic::independence::count_roots_mod_pn(&padic::poly::UniPoly::new(coeffs), p, n).map_err(err)
}

#[pyfunction]
fn jp_linear_independence<'py>(py: Python<'py>, vectors_: Vec<PyRef<'py, PyVector>>) -> PyResult<Bound<'py, PyAny>> {
    let r = padic::free::jp_linear_independence(&vectors(&vectors_)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn finite_rank_free_basis<'py>(py: Python<'py>, elements: Vec<PyRef<'py, PyVector>>, cap: u32) -> PyResult<Bound<'py, PyAny>> {
    let r = padic::free::finite_rank_free_basis(&vectors(&elements), cap).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (trials, seed=0, p=2, precision=32, window=8, alpha=1.5, num_random=3, cap=None))]
#[allow(clippy::too_many_arguments)]
fn freeness_pipeline<'py>(
    py: Python<'py>,
    trials: u64,
    seed: u64,
    p: u64,
    precision: u32,
    window: usize,
    alpha: f64,
    num_random: usize,
    cap: Option<u32>,
) -> PyResult<Bound<'py, PyAny>> {
    let params = padic::free::FreenessParams {
        p,
        precision,
        window,
        alpha,
        num_random,
        cap: cap.unwrap_or(precision.div_ceil(2)),
    };
    params.validate().map_err(err)?;
    let r = padic::free::freeness_pipeline(&params, trials, &Seed::new(seed)).map_err(err)?;
    to_py(py, &r)
}

/// `pairs` is a list of `(a, e)` coordinate lists; `None` means `(b_i, 1)`
/// for every basis element.
#[pyfunction]
#[pyo3(signature = (ring, pairs=None, budget=10_000, box_bound=3, deterministic_only=false, seed=0))]
fn zassenhaus_realize<'py>(
    py: Python<'py>,
    ring: &str,
    pairs: Option<Vec<(Vec<BigInt>, Vec<BigInt>)>>,
    budget: u64,
    box_bound: u64,
    deterministic_only: bool,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = RingPresentation::load(ring).map_err(err)?;
    let pairs = pairs.unwrap_or_else(|| padic::zassenhaus::auto_pairs(&r));
    let params = padic::zassenhaus::RealizeParams {
        budget,
        box_bound,
        deterministic_only,
    };
    let rep = padic::zassenhaus::realize(&r, &pairs, &params, &Seed::new(seed)).map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
fn density_report<'py>(py: Python<'py>, poly: &str, bound: u64) -> PyResult<Bound<'py, PyAny>> {
    let f: padic::poly::UniPoly = poly.parse().map_err(err)?;
    let r = padic::density::density_report(&f, bound).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn has_root_mod_p(poly: &str, p: u64) -> PyResult<bool> {
    let f: padic::poly::UniPoly = poly.parse().map_err(err)?;
    padic::density::has_root_mod_p(&f, p).map_err(err)
}

#[pyfunction]
fn gl_exact_count(n: u32, q: u64) -> PyResult<BigUint> {
    padic::stats::gl_exact_count(n, q).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, q, trials, seed=0))]
fn gl_invertibility_mc<'py>(py: Python<'py>, n: u32, q: u64, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = padic::stats::gl_invertibility_mc(n, q, trials, &Seed::new(seed)).map_err(err)?;
    to_py(py, &r)
}

/// Runs a registered experiment given as `name:key=value,...`.
#[pyfunction]
#[pyo3(signature = (experiment, trials, seed=0))]
fn run_trials<'py>(py: Python<'py>, experiment: &str, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let e: padic::stats::Experiment = experiment.parse().map_err(err)?;
    let r = padic::stats::run_trials(&e, trials, &Seed::new(seed)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (suite="all"))]
fn run_acceptance<'py>(py: Python<'py>, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = padic::acceptance::run_suite(suite).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn padic_rigid(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPadic>()?;
    m.add_class::<PyVector>()?;
    m.add_class::<PyCorner>()?;
    m.add_function(wrap_pyfunction!(sample_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(sample_branch_value, m)?)?;
    m.add_function(wrap_pyfunction!(sample_tree, m)?)?;
    m.add_function(wrap_pyfunction!(sample_nearly_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(find_relation, m)?)?;
    m.add_function(wrap_pyfunction!(count_roots_mod_pn, m)?)?;
    m.add_function(wrap_pyfunction!(jp_linear_independence, m)?)?;
    m.add_function(wrap_pyfunction!(finite_rank_free_basis, m)?)?;
    m.add_function(wrap_pyfunction!(freeness_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(zassenhaus_realize, m)?)?;
    m.add_function(wrap_pyfunction!(density_report, m)?)?;
    m.add_function(wrap_pyfunction!(has_root_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(gl_exact_count, m)?)?;
    m.add_function(wrap_pyfunction!(gl_invertibility_mc, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
