//! Python bindings: exact series, rational-kernel identities, theta kernels
//! and the suite runner.

use num_complex::Complex64;
use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qcurrent::suite::{run_suite as run, SuiteConfig};
use qcurrent::theta::{self, Fixture, KernelPoint, ThetaData};
use qcurrent::{level0, rational, zn, QcError, RegionSeries};
use std::path::PathBuf;

fn err(e: QcError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Exact truncated series over Q(i) in several Laurent variables and ħ.
#[pyclass(name = "Series", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries(RegionSeries);

#[pymethods]
impl PySeries {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        RegionSeries::from_text(text).map(PySeries).map_err(err)
    }
    fn to_text(&self) -> String {
        self.0.to_text()
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn vars(&self) -> Vec<String> {
        self.0.vars().iter().map(|s| s.to_string()).collect()
    }
    fn order(&self) -> u32 {
        self.0.order()
    }
    /// Coefficient of `ħ^k · Π var^exp` as `(re, im)` rational strings.
    fn coeff(&self, k: u32, exps: Vec<i64>) -> (String, String) {
        let c = self.0.coeff(k, &exps);
        (c.re.to_string(), c.im.to_string())
    }
    fn __len__(&self) -> usize {
        self.0.len()
    }
    fn __add__(&self, o: PyRef<'_, PySeries>) -> PyResult<Self> {
        self.0.add(&o.0).map(PySeries).map_err(err)
    }
    fn __sub__(&self, o: PyRef<'_, PySeries>) -> PyResult<Self> {
        self.0.sub(&o.0).map(PySeries).map_err(err)
    }
    fn __mul__(&self, o: PyRef<'_, PySeries>) -> PyResult<Self> {
        self.0.mul(&o.0).map(PySeries).map_err(err)
    }
    fn __neg__(&self) -> Self {
        PySeries(self.0.neg())
    }
    fn __repr__(&self) -> String {
        format!("Series(vars={:?}, order={}, terms={})", self.0.vars(), self.0.order(), self.0.len())
    }
}

/// `q(z,w)` of the curve `ω = z^{N−1}dz`, expanded for `|w| < |z|`.
#[pyfunction]
fn q_closed(n: i64, order: u32, window: i64) -> PyResult<PySeries> {
    let one = BigRational::from_integer(1.into());
    rational::compute_q_closed(n, order, window, &one).map(|q| PySeries(q.q)).map_err(err)
}

/// Numerators of `q` and `1/q` on their vanishing loci; both are zero.
#[pyfunction]
fn vanishing_locus(n: i64, order: u32, window: i64) -> PyResult<(PySeries, PySeries)> {
    let r = rational::verify_vanishing_locus(n, order, window).map_err(err)?;
    Ok((PySeries(r.q_locus), PySeries(r.q_inverse_locus)))
}

/// `q_{α^N ħ}(αz, αw) − q_ħ(z, w)` for `α = num/den`.
#[pyfunction]
fn scaling_covariance(n: i64, num: i64, den: i64, order: u32, window: i64) -> PyResult<PySeries> {
    if den == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    rational::scaling_covariance(n, &BigRational::new(num.into(), den.into()), order, window).map(PySeries).map_err(err)
}

/// Residual of the U identity with the computed `U`.
#[pyfunction]
fn u_identity_residual(n: i64, m: usize, order: u32, window: i64) -> PyResult<PySeries> {
    rational::compute_u(n, m, order, window).map(|u| PySeries(u.residual)).map_err(err)
}

/// Residue pairing `⟨e_i, e^j⟩` as strings.
#[pyfunction]
fn basis_duality(n: i64, m: usize) -> PyResult<Vec<Vec<String>>> {
    let d = level0::basis_duality(n, m).map_err(err)?;
    Ok(d.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect())
}

/// Nonzero entries of the twisted cobracket identities for `xi` (e.g. "e[z^-2]").
#[pyfunction]
fn classical_twist(n: i64, window: i64, xi: &str) -> PyResult<(String, usize, usize)> {
    let x: level0::LieElem = xi.parse().map_err(err)?;
    let r = level0::classical_twist_check(n, window, x).map_err(err)?;
    Ok((format!("{:?}", r.status).to_lowercase(), r.twist_r + r.twist_bar, r.duality_mismatches + r.invariance))
}

/// Number of (p, q) component relations with a nonzero residual.
#[pyfunction]
fn xy_equivalence_failures(n: i64, order: u32, window: i64) -> PyResult<usize> {
    let es = zn::xy_residuals(n, order, window, zn::XYVariant::ProofDerived).map_err(err)?;
    Ok(es.iter().filter(|e| !e.is_zero()).count())
}

/// Riemann theta function with half-integer characteristic.
#[pyclass(name = "ThetaData", frozen)]
struct PyThetaData(ThetaData);

#[pymethods]
impl PyThetaData {
    #[new]
    #[pyo3(signature = (omega, alpha, beta, eps=1e-15))]
    fn new(omega: Vec<Vec<Complex64>>, alpha: Vec<f64>, beta: Vec<f64>, eps: f64) -> PyResult<Self> {
        ThetaData::new(omega, alpha, beta, eps).map(PyThetaData).map_err(err)
    }
    #[getter]
    fn genus(&self) -> usize {
        self.0.g
    }
    fn parity(&self) -> i32 {
        self.0.parity()
    }
    /// `(θ(z), error bound)`
    fn eval(&self, z: Vec<Complex64>) -> PyResult<(Complex64, f64)> {
        let v = self.0.eval(&z).map_err(err)?;
        Ok((v.value(), v.error_abs()))
    }
    /// `∇θ(z)`
    fn gradient(&self, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let v = self.0.eval(&z).map_err(err)?;
        let s = v.log_scale.exp();
        Ok(v.grad.iter().map(|g| g * s).collect())
    }
    /// `∂_hθ(u+e)/θ(u+e)`
    fn green_h(&self, u: Vec<Complex64>, e: Vec<Complex64>, h: Vec<Complex64>) -> PyResult<Complex64> {
        let s = vec![Complex64::new(0.0, 0.0); h.len()];
        theta::green_h_eval(&u, &self.0, &KernelPoint { e, h, s }).map_err(err)
    }
}

type CheckTuple = (String, String, f64, f64, bool);

/// `(check, name, residual, tolerance, pass)` rows for a fixture file.
#[pyfunction]
fn fixture_checks(path: PathBuf) -> PyResult<Vec<CheckTuple>> {
    let fx = Fixture::load(&path).map_err(err)?;
    let rows = theta::run_fixture_checks(&fx).map_err(err)?;
    Ok(rows.into_iter().map(|r| (r.check, r.name, r.residual, r.tolerance, r.pass)).collect())
}

/// Runs a suite and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (name, n=None, k=None, window=None, m=None, fixtures=None))]
fn run_suite(
    py: Python<'_>,
    name: &str,
    n: Option<Vec<i64>>,
    k: Option<u32>,
    window: Option<i64>,
    m: Option<usize>,
    fixtures: Option<Vec<PathBuf>>,
) -> PyResult<String> {
    let mut cfg = SuiteConfig::new(name.parse().map_err(err)?);
    cfg.n = n.unwrap_or_default();
    cfg.k = k;
    cfg.window = window;
    cfg.m = m;
    cfg.fixtures = fixtures.unwrap_or_default();
    let report = py.detach(|| run(&cfg, false)).map_err(err)?;
    Ok(report.to_json())
}

#[pymodule]
fn qcurrent_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", qcurrent::ENGINE_VERSION)?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyThetaData>()?;
    m.add_function(wrap_pyfunction!(q_closed, m)?)?;
    m.add_function(wrap_pyfunction!(vanishing_locus, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(u_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(basis_duality, m)?)?;
    m.add_function(wrap_pyfunction!(classical_twist, m)?)?;
    m.add_function(wrap_pyfunction!(xy_equivalence_failures, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_checks, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
