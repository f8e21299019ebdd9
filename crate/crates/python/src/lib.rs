//! Python bindings: `import pyhasse`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hasse::global::{
    certify_with, search_counterexamples as search, verify_certificate, CertifyOptions,
    CounterexampleCertificate, Hypothesis, SearchConfig,
};
use hasse::system::{Quad, SystemCoeffs};
use hasse::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

type Tuple4 = (i64, i64, i64, i64);

fn tuple(q: Quad) -> Tuple4 {
    (q.u, q.v, q.w, q.z)
}

/// The system `aU² + bV² + cW² = dZ²`, `UW = V²`.
#[pyclass(name = "System", frozen)]
#[derive(Clone)]
struct PySystem {
    inner: SystemCoeffs,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (a, b, c, d))]
    fn new(a: i64, b: i64, c: i64, d: i64) -> PyResult<Self> {
        Ok(PySystem {
            inner: SystemCoeffs::new(a, b, c, d).map_err(py_err)?,
        })
    }

    #[getter]
    fn coeffs(&self) -> Tuple4 {
        let s = self.inner;
        (s.a, s.b, s.c, s.d)
    }

    fn __repr__(&self) -> String {
        let s = self.inner;
        format!("System({}, {}, {}, {})", s.a, s.b, s.c, s.d)
    }

    /// Local solvability at the reals and every prime (needs `b = 0`).
    fn decide_local(&self) -> PyResult<PyLocalReport> {
        if !self.inner.is_diagonal() {
            return Err(PyValueError::new_err("local decisions need b = 0"));
        }
        let rep = hasse::local::decide_local(&self.inner).map_err(py_err)?;
        Ok(PyLocalReport { inner: rep })
    }

    /// Least primitive integer solution with entries bounded by `height`.
    fn global_search(&self, height: i64) -> PyResult<Option<Tuple4>> {
        Ok(hasse::global::global_search_height(&self.inner, height)
            .map_err(py_err)?
            .map(tuple))
    }

    /// A nontrivial solution modulo the odd prime `p`.
    fn solve_fp(&self, p: i64) -> PyResult<Tuple4> {
        Ok(tuple(hasse::conics::solve_general_fp(&self.inner, p).map_err(py_err)?.quad))
    }

    /// A solution in `Z_p`, returned modulo `p^precision`.
    #[pyo3(signature = (p, precision = 8))]
    fn padic_solve(&self, p: i64, precision: usize) -> PyResult<Tuple4> {
        let sol = hasse::padic::p_local_solve_general(&self.inner, p, precision).map_err(py_err)?;
        Ok(tuple(sol.at(precision)))
    }

    fn satisfies_mod(&self, quad: Tuple4, m: i64) -> bool {
        Quad::new(quad.0, quad.1, quad.2, quad.3).satisfies_mod(&self.inner, m)
    }
}

#[pyclass(name = "LocalReport", frozen)]
struct PyLocalReport {
    inner: hasse::local::LocalReport,
}

#[pymethods]
impl PyLocalReport {
    #[getter]
    fn locally_solvable(&self) -> bool {
        self.inner.locally_solvable
    }

    #[getter]
    fn real_solvable(&self) -> bool {
        self.inner.real.solvable
    }

    /// `(p, solvable, case, witness, modulus)` per prime.
    #[getter]
    fn primes(&self) -> Vec<(i64, bool, String, Option<Tuple4>, Option<i64>)> {
        self.inner
            .primes
            .iter()
            .map(|v| {
                (
                    v.p,
                    v.solvable,
                    format!("{:?}", v.case),
                    v.witness.map(|w| tuple(w.quad)),
                    v.witness.map(|w| w.modulus),
                )
            })
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("reports serialize")
    }

    fn __repr__(&self) -> String {
        format!(
            "LocalReport(locally_solvable={}, primes={:?})",
            self.inner.locally_solvable,
            self.inner.primes.iter().map(|v| v.p).collect::<Vec<_>>()
        )
    }
}

#[pyclass(name = "Certificate", frozen)]
struct PyCertificate {
    inner: CounterexampleCertificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn q(&self) -> i64 {
        self.inner.q
    }

    #[getter]
    fn d(&self) -> i64 {
        self.inner.d
    }

    #[getter]
    fn hypothesis(&self) -> &'static str {
        match self.inner.hypothesis {
            Hypothesis::Strict => "strict",
            Hypothesis::Relaxed => "relaxed",
        }
    }

    /// `None` if valid, otherwise the name of the first failing check.
    fn verify(&self) -> Option<String> {
        verify_certificate(&self.inner).err().map(|f| f.check)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("certificates serialize")
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(PyCertificate {
            inner: serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Certificate(q={}, d={})", self.inner.q, self.inner.d)
    }
}

#[pyfunction]
fn legendre(a: i64, p: i64) -> PyResult<i8> {
    Ok(hasse::modarith::legendre(a, p).map_err(py_err)?.as_i8())
}

#[pyfunction]
fn lift_rth_power(n: i64, r: u32, p: i64, k: u32) -> PyResult<i64> {
    let req = hasse::modarith::LiftRequest::new(n, r, p, k).map_err(py_err)?;
    Ok(hasse::lifting::lift_rth_power(req).map_err(py_err)?.value())
}

#[pyfunction]
fn lift_fourth_power_2adic(n: i64, k: u32) -> PyResult<i64> {
    Ok(hasse::lifting::lift_fourth_power_2adic(n, k).map_err(py_err)?.value())
}

#[pyfunction]
fn decide_p_local(a: i64, c: i64, d: i64, p: i64) -> PyResult<bool> {
    Ok(hasse::local::decide_p_local(a, c, d, p).map_err(py_err)?.solvable)
}

#[pyfunction]
fn fourth_power_obstruction(q: i64, d: i64) -> PyResult<bool> {
    hasse::global::fourth_power_obstruction(q, d).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (q, d, relaxed = false))]
fn certify_counterexample(q: i64, d: i64, relaxed: bool) -> PyResult<Option<PyCertificate>> {
    let opts = CertifyOptions {
        hypothesis: if relaxed { Hypothesis::Relaxed } else { Hypothesis::Strict },
        height: None,
    };
    Ok(certify_with(q, d, &opts)
        .map_err(py_err)?
        .certificate()
        .map(|inner| PyCertificate { inner }))
}

#[pyfunction]
fn search_counterexamples(q_bound: i64, d_bound: i64) -> PyResult<Vec<PyCertificate>> {
    Ok(search(&SearchConfig::new(q_bound, d_bound))
        .map_err(py_err)?
        .into_iter()
        .map(|inner| PyCertificate { inner })
        .collect())
}

#[pyfunction]
fn padic_from_int(n: i64, p: i64, precision: usize) -> PyResult<Vec<i64>> {
    Ok(hasse::padic::padic_from_int(n as i128, p, precision)
        .map_err(py_err)?
        .digits)
}

#[pymodule]
fn pyhasse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyLocalReport>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(lift_rth_power, m)?)?;
    m.add_function(wrap_pyfunction!(lift_fourth_power_2adic, m)?)?;
    m.add_function(wrap_pyfunction!(decide_p_local, m)?)?;
    m.add_function(wrap_pyfunction!(fourth_power_obstruction, m)?)?;
    m.add_function(wrap_pyfunction!(certify_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(search_counterexamples, m)?)?;
    m.add_function(wrap_pyfunction!(padic_from_int, m)?)?;
    Ok(())
}
