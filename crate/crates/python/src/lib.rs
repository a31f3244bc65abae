//! Python bindings for the `sblfem` solvers, norms and study driver.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sblfem::approx1d::{self, Corrector, CorrectorKind};
use sblfem::fem1d::{self, Difference, Field1D, ProblemSpec1D};
use sblfem::fem2d::{self, DiskMeshConfig, MixedDiscreteField, ProblemSpec2D};
use sblfem::meshing::{self, SblMesh1D};
use sblfem::problems;
use sblfem::study::{self, StudyConfig};
use sblfem::verify::{self as checks, Suite};

fn err(e: sblfem::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// 1D problem `ε²u'''' − (bu')' + cu = f` from the catalog.
#[pyclass(name = "Problem1D", frozen)]
struct PyProblem1D {
    inner: ProblemSpec1D,
}

#[pymethods]
impl PyProblem1D {
    #[staticmethod]
    fn catalog(name: &str, eps: f64) -> PyResult<Self> {
        Ok(Self {
            inner: problems::catalog_1d(name, eps).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }

    /// `k`-th derivative of the exact solution at `x`.
    fn exact(&self, x: f64, k: usize) -> PyResult<f64> {
        let exact = self
            .inner
            .exact()
            .ok_or_else(|| err(sblfem::Error::MissingDecomposition))?;
        Ok(exact.u.derivative(x, k))
    }

    fn forcing(&self, x: f64) -> f64 {
        (self.inner.f)(x)
    }

    fn __repr__(&self) -> String {
        format!("Problem1D({:?}, eps={:e})", self.inner.name, self.inner.eps)
    }
}

/// Three-element SBL mesh on `[0, 1]`.
#[pyclass(name = "Mesh1D", frozen)]
struct PyMesh1D {
    inner: SblMesh1D,
}

#[pymethods]
impl PyMesh1D {
    #[new]
    fn new(kappa: f64, p: usize, eps: f64) -> PyResult<Self> {
        Ok(Self {
            inner: meshing::build_mesh_1d(kappa, p, eps).map_err(err)?,
        })
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes.clone()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    fn has_layer(&self) -> bool {
        self.inner.has_layer()
    }
}

/// Member of the C¹ space on an SBL mesh: a Galerkin solution or an
/// interpolant.
#[pyclass(name = "Field1D", frozen)]
struct PyField1D {
    inner: fem1d::DiscreteField1D,
}

#[pymethods]
impl PyField1D {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs.clone()
    }

    #[getter]
    fn mesh(&self) -> PyMesh1D {
        PyMesh1D {
            inner: self.inner.mesh.clone(),
        }
    }

    #[pyo3(signature = (x, k = 0))]
    fn eval(&self, x: f64, k: usize) -> PyResult<f64> {
        if k > 2 {
            return Err(PyValueError::new_err("derivative order must be at most 2"));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(err(sblfem::Error::OutOfDomain(x)));
        }
        Ok(self.inner.derivative(x, k))
    }

    fn max_c1_jump(&self) -> f64 {
        self.inner.max_c1_jump()
    }

    /// Error norms against the exact solution of `problem`:
    /// `energy, balanced, l2, h1, h2_seminorm, max, c1max`.
    fn error_norms<'py>(
        &self,
        py: Python<'py>,
        problem: &PyProblem1D,
    ) -> PyResult<Bound<'py, PyDict>> {
        let exact = problem
            .inner
            .exact()
            .ok_or_else(|| err(sblfem::Error::MissingDecomposition))?;
        let r = fem1d::norms_1d(
            &Difference(&exact.u, &self.inner),
            &problem.inner,
            &self.inner.mesh,
            self.inner.mesh.kappa,
        );
        let d = PyDict::new(py);
        for (k, v) in [
            ("energy", r.energy),
            ("balanced", r.balanced),
            ("l2", r.l2),
            ("h1", r.h1),
            ("h2_seminorm", r.h2_seminorm),
            ("max", r.max),
            ("c1max", r.c1max),
        ] {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn galerkin_residual(&self, problem: &PyProblem1D) -> PyResult<f64> {
        fem1d::galerkin_residual(&problem.inner, &self.inner).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (problem, p, kappa = 1.0))]
fn solve_1d(py: Python<'_>, problem: &PyProblem1D, p: usize, kappa: f64) -> PyResult<PyField1D> {
    let inner = py
        .detach(|| fem1d::solve_1d(&problem.inner, kappa, p))
        .map_err(err)?;
    Ok(PyField1D { inner })
}

/// C¹ interpolant `I_p u` of the exact solution on the SBL mesh.
#[pyfunction]
#[pyo3(signature = (problem, p, kappa = 1.0))]
fn interpolate_1d(problem: &PyProblem1D, p: usize, kappa: f64) -> PyResult<PyField1D> {
    let exact = problem
        .inner
        .exact()
        .ok_or_else(|| err(sblfem::Error::MissingDecomposition))?;
    let mesh = meshing::build_mesh_1d(kappa, p, problem.inner.eps).map_err(err)?;
    Ok(PyField1D {
        inner: approx1d::interpolate_c1(&exact.u, &mesh, p).map_err(err)?,
    })
}

/// Special representative `û_p` (requires `κpε < 1/3`).
#[pyfunction]
#[pyo3(signature = (problem, p, kappa = 1.0))]
fn special_representative(problem: &PyProblem1D, p: usize, kappa: f64) -> PyResult<PyField1D> {
    Ok(PyField1D {
        inner: approx1d::special_representative(&problem.inner, kappa, p)
            .map_err(err)?
            .field,
    })
}

/// `|χ_i|_{k,(0,τ)}` of the corrector `χ_0` or `χ_1`.
#[pyfunction]
fn corrector_seminorm(tau: f64, i: usize, k: usize) -> PyResult<f64> {
    let kind = match i {
        0 => CorrectorKind::Chi0,
        1 => CorrectorKind::Chi1,
        _ => return Err(PyValueError::new_err("corrector index must be 0 or 1")),
    };
    if k > 3 {
        return Err(PyValueError::new_err("seminorm order must be at most 3"));
    }
    Ok(Corrector::new(tau, kind).map_err(err)?.seminorm(k))
}

/// Exact `sup ‖q^{(k)}‖₀ / (p^{2k}‖q‖₀)` over `P_p` on `[−1, 1]`.
#[pyfunction]
fn markov_sup(p: usize, k: usize) -> PyResult<f64> {
    if k == 0 || k > p {
        return Err(PyValueError::new_err("need 1 <= k <= p"));
    }
    Ok(approx1d::markov_sup(p, k))
}

#[pyfunction]
fn scaled_i0(x: f64) -> f64 {
    problems::scaled_i0(x)
}

#[pyfunction]
fn scaled_i1(x: f64) -> f64 {
    problems::scaled_i1(x)
}

/// 2D problem on the unit disk from the catalog.
#[pyclass(name = "Problem2D", frozen)]
struct PyProblem2D {
    inner: ProblemSpec2D,
}

#[pymethods]
impl PyProblem2D {
    #[staticmethod]
    #[pyo3(signature = (name, eps, b = 1.0, c = 1.0, f0 = 1.0))]
    fn catalog(name: &str, eps: f64, b: f64, c: f64, f0: f64) -> PyResult<Self> {
        Ok(Self {
            inner: problems::catalog_2d(name, eps, b, c, f0).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }

    /// Exact `(u, w)` at a point.
    fn exact(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        let exact = self
            .inner
            .exact
            .as_ref()
            .ok_or_else(|| err(sblfem::Error::MissingDecomposition))?;
        Ok((exact.u.value([x, y]), exact.w.value([x, y])))
    }
}

/// Discrete pair `(u_p, w_p)` of the mixed method.
#[pyclass(name = "Field2D", frozen)]
struct PyField2D {
    inner: MixedDiscreteField,
}

#[pymethods]
impl PyField2D {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn num_elements(&self) -> usize {
        self.inner.mesh.len()
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.dofs.num_nodes()
    }

    #[getter]
    fn node_coords(&self) -> Vec<(f64, f64)> {
        self.inner
            .dofs
            .coords
            .iter()
            .map(|c| (c[0], c[1]))
            .collect()
    }

    #[getter]
    fn u_values(&self) -> Vec<f64> {
        self.inner.u.values.clone()
    }

    #[getter]
    fn w_values(&self) -> Vec<f64> {
        self.inner.w.values.clone()
    }

    /// `(u, w)` on element `e` at reference `(ξ, η) ∈ [0, 1]²`.
    fn eval(&self, e: usize, xi: f64, eta: f64) -> PyResult<(f64, f64)> {
        if e >= self.inner.mesh.len() {
            return Err(PyValueError::new_err(format!("element {e} out of range")));
        }
        let ((u, _), (w, _)) = self.inner.eval(e, xi, eta);
        Ok((u, w))
    }

    #[pyo3(signature = (samples = 20))]
    fn max_trace_jump(&self, samples: usize) -> PyResult<f64> {
        self.inner.max_trace_jump(samples).map_err(err)
    }

    /// Error norms against the exact solution:
    /// `energy, balanced, l2_u, h1_u, l2_w, max_u, max_w`.
    #[pyo3(signature = (problem, kappa = 1.0))]
    fn error_norms<'py>(
        &self,
        py: Python<'py>,
        problem: &PyProblem2D,
        kappa: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = fem2d::norms_2d(&problem.inner, &self.inner, kappa).map_err(err)?;
        let d = PyDict::new(py);
        for (k, v) in [
            ("energy", r.energy),
            ("balanced", r.balanced),
            ("l2_u", r.l2_u),
            ("h1_u", r.h1_u),
            ("l2_w", r.l2_w),
            ("max_u", r.max_u),
            ("max_w", r.max_w),
        ] {
            d.set_item(k, v)?;
        }
        Ok(d)
    }

    fn galerkin_residual(&self, problem: &PyProblem2D) -> PyResult<f64> {
        fem2d::galerkin_residual(&problem.inner, &self.inner).map_err(err)
    }

    /// Per-element `n × n` sample grids as CSV.
    #[pyo3(signature = (n = 5))]
    fn to_csv(&self, n: usize) -> String {
        self.inner.to_csv(n)
    }
}

#[pyfunction]
#[pyo3(signature = (problem, p, kappa = 1.0, rho0 = 0.5, n_sectors = 8))]
fn solve_2d(
    py: Python<'_>,
    problem: &PyProblem2D,
    p: usize,
    kappa: f64,
    rho0: f64,
    n_sectors: usize,
) -> PyResult<PyField2D> {
    let config = DiskMeshConfig { rho0, n_sectors };
    let inner = py
        .detach(|| fem2d::solve_mixed(&problem.inner, kappa, p, config))
        .map_err(err)?;
    Ok(PyField2D { inner })
}

/// SBL disk mesh as the JSON document written by `dump-mesh`.
#[pyfunction]
#[pyo3(signature = (eps, p, kappa = 1.0, rho0 = 0.5, n_sectors = 8))]
fn mesh_2d_json(eps: f64, p: usize, kappa: f64, rho0: f64, n_sectors: usize) -> PyResult<String> {
    let mesh = meshing::build_sbl_mesh_disk(rho0, n_sectors, kappa, p, eps).map_err(err)?;
    serde_json::to_string(&mesh).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs a study from TOML text; writes the report files when `out` is
/// given and returns `(csv, fits)`.
#[pyfunction]
#[pyo3(signature = (config_toml, out = None))]
fn run_study<'py>(
    py: Python<'py>,
    config_toml: &str,
    out: Option<&str>,
) -> PyResult<(String, Bound<'py, PyAny>)> {
    let cfg = StudyConfig::from_toml_str(config_toml).map_err(err)?;
    let report = py.detach(|| study::run_study(&cfg)).map_err(err)?;
    if let Some(dir) = out {
        study::write_report(&report, std::path::Path::new(dir)).map_err(err)?;
    }
    let fits =
        serde_json::to_string(&report.fits).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((study::to_csv(&report.rows), json_to_py(py, &fits)?))
}

/// Runs a check suite (`"ALL"`, `"QUADRATURE"`, ...) and returns the summary.
#[pyfunction]
#[pyo3(signature = (suite = "ALL"))]
fn verify<'py>(py: Python<'py>, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite =
        serde_json::from_value(serde_json::Value::String(suite.to_ascii_uppercase()))
            .map_err(|_| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    let summary = py.detach(|| checks::run(suite));
    let text = serde_json::to_string(&summary).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

#[pymodule]
fn sblfem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem1D>()?;
    m.add_class::<PyMesh1D>()?;
    m.add_class::<PyField1D>()?;
    m.add_class::<PyProblem2D>()?;
    m.add_class::<PyField2D>()?;
    m.add_function(wrap_pyfunction!(solve_1d, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate_1d, m)?)?;
    m.add_function(wrap_pyfunction!(special_representative, m)?)?;
    m.add_function(wrap_pyfunction!(corrector_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(markov_sup, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_i0, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_i1, m)?)?;
    m.add_function(wrap_pyfunction!(solve_2d, m)?)?;
    m.add_function(wrap_pyfunction!(mesh_2d_json, m)?)?;
    m.add_function(wrap_pyfunction!(run_study, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("CATALOG_1D", problems::CATALOG_1D.to_vec())?;
    m.add("CATALOG_2D", problems::CATALOG_2D.to_vec())?;
    Ok(())
}
