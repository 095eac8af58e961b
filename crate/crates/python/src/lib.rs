//! Python bindings: scenario runner, energy models, radial profiles, voids
//! and shocks.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use confstress::cli_report::{self, ScenarioConfig};
use confstress::energy_models::{
    make_double_well_sv, make_dynamic_potential, make_linear_isotropic, make_power_p, make_prestressed_radial,
    IsotropicSv,
};
use confstress::radial_solver::{self, default_r_max};
use confstress::shock_dynamics::{self, ShockSolution1D};
use confstress::tensor_core::{self, EnergyModel, Mat};
use confstress::void_energy::{self, VoidScenario};
use confstress::Error;

fn py_err(e: Error) -> PyErr {
    if e.exit_code() == 2 {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_mat(rows: &[Vec<f64>]) -> PyResult<Mat> {
    let n = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty rectangular list of rows"));
    }
    Ok(Mat::from_fn(rows.len(), n, |i, j| rows[i][j]))
}

fn from_mat(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

/// Runs a registered scenario and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (name, params=None, order=None, tol=None, deterministic=false))]
fn run_scenario(
    name: &str,
    params: Option<BTreeMap<String, f64>>,
    order: Option<usize>,
    tol: Option<f64>,
    deterministic: bool,
) -> PyResult<String> {
    let mut config = ScenarioConfig::new(name);
    config.params = params.unwrap_or_default();
    config.order = order;
    config.tol = tol;
    config.deterministic = deterministic;
    let report = cli_report::run(&config).map_err(py_err)?;
    Ok(report.to_json())
}

/// `(name, description, anchor)` for every registered scenario.
#[pyfunction]
fn list_scenarios() -> Vec<(String, String, String)> {
    cli_report::catalog()
        .iter()
        .map(|s| (s.name.to_string(), s.description.to_string(), s.anchor.to_string()))
        .collect()
}

/// Closed-form and quadrature energy of the prestressed ball.
#[pyfunction]
#[pyo3(signature = (n, a, radius=1.0))]
fn example1_energy(n: usize, a: f64, radius: f64) -> PyResult<(f64, f64)> {
    let e = radial_solver::example1_energy(n, a, radius).map_err(py_err)?;
    Ok((e.closed_form, e.quadrature))
}

/// An energy density `W(x, y, F)`.
#[pyclass(frozen)]
struct Model {
    inner: Arc<dyn EnergyModel>,
}

impl Model {
    fn args(&self, f: &[Vec<f64>], x: Option<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<f64>, Mat)> {
        let (m, n) = self.inner.dims();
        let f = to_mat(f)?;
        if f.shape() != (m, n) {
            return Err(PyValueError::new_err(format!("F must be {m}x{n}")));
        }
        let x = x.unwrap_or_else(|| vec![0.0; n]);
        let y = y.unwrap_or_else(|| f.mul_vec(&x));
        Ok((x, y, f))
    }
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn linear_isotropic(lam: f64, mu: f64, n: usize) -> PyResult<Model> {
        Ok(Model { inner: Arc::new(make_linear_isotropic(lam, mu, n).map_err(py_err)?) })
    }

    #[staticmethod]
    fn power(p: f64, n: usize, m: usize) -> PyResult<Model> {
        Ok(Model { inner: Arc::new(make_power_p(p, n, m).map_err(py_err)?) })
    }

    #[staticmethod]
    fn prestressed_radial(a: f64, n: usize) -> PyResult<Model> {
        Ok(Model { inner: Arc::new(make_prestressed_radial(a, n).map_err(py_err)?) })
    }

    #[staticmethod]
    #[pyo3(signature = (fa, fb, curvature, n, bias=0.0))]
    fn double_well(fa: f64, fb: f64, curvature: f64, n: usize, bias: f64) -> PyResult<Model> {
        Ok(Model { inner: Arc::new(make_double_well_sv(fa, fb, curvature, bias, n).map_err(py_err)?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    /// `(m, n)`: target and reference dimensions.
    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    /// Energy at `F`; `x` defaults to the origin and `y` to `F x`.
    #[pyo3(signature = (f, x=None, y=None))]
    fn w(&self, f: Vec<Vec<f64>>, x: Option<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<f64> {
        let (x, y, f) = self.args(&f, x, y)?;
        self.inner.w(&x, &y, &f).map_err(py_err)
    }

    #[pyo3(signature = (f, x=None, y=None))]
    fn piola(&self, f: Vec<Vec<f64>>, x: Option<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let (x, y, f) = self.args(&f, x, y)?;
        Ok(from_mat(&tensor_core::piola(self.inner.as_ref(), &x, &y, &f).map_err(py_err)?))
    }

    #[pyo3(signature = (f, x=None, y=None))]
    fn eshelby(&self, f: Vec<Vec<f64>>, x: Option<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let (x, y, f) = self.args(&f, x, y)?;
        Ok(from_mat(&tensor_core::eshelby(self.inner.as_ref(), &x, &y, &f).map_err(py_err)?))
    }

    /// Weierstrass excess `W(G) − W(F) − ⟨W_F(F), G − F⟩`.
    #[pyo3(signature = (f, g, x=None, y=None))]
    fn excess(&self, f: Vec<Vec<f64>>, g: Vec<Vec<f64>>, x: Option<Vec<f64>>, y: Option<Vec<f64>>) -> PyResult<f64> {
        let (x, y, f) = self.args(&f, x, y)?;
        let g = to_mat(&g)?;
        tensor_core::excess(self.inner.as_ref(), &x, &y, &f, &g).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.inner.name())
    }
}

/// Radial extremal of a double-well energy shot outward from the interface.
#[pyclass(frozen)]
struct RadialProfile {
    inner: radial_solver::RadialProfile,
    model: IsotropicSv,
}

#[pymethods]
impl RadialProfile {
    /// Shoots from the common tangent of the well when `f0`, `beta` are omitted.
    #[new]
    #[pyo3(signature = (fa, fb, curvature=1.0, bias=0.0, n=3, f0=None, beta=None, r_max=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        fa: f64,
        fb: f64,
        curvature: f64,
        bias: f64,
        n: usize,
        f0: Option<f64>,
        beta: Option<f64>,
        r_max: Option<f64>,
    ) -> PyResult<RadialProfile> {
        let model = make_double_well_sv(fa, fb, curvature, bias, n).map_err(py_err)?;
        let (f0, beta) = match (f0, beta) {
            (Some(a), Some(b)) => (a, b),
            (None, None) => radial_solver::solve_interface_conditions(&model).map_err(py_err)?,
            _ => return Err(PyValueError::new_err("give both f0 and beta or neither")),
        };
        let inner = radial_solver::shoot_rode(&model, f0, beta, n, r_max.unwrap_or(default_r_max(n))).map_err(py_err)?;
        Ok(RadialProfile { inner, model })
    }

    /// `(η(r), η′(r))`.
    fn eval(&self, r: f64) -> PyResult<(f64, f64)> {
        self.inner.eval(r).map_err(py_err)
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.inner.r_max()
    }

    /// `(f_inf, A, alpha)` of `η/r ≈ f_inf + A r^{−alpha}`, if fitted.
    #[getter]
    fn far_field(&self) -> Option<(f64, f64, Option<f64>)> {
        self.inner.far_field.as_ref().map(|f| (f.f_inf, f.a, f.alpha))
    }

    /// Rows `(r, η, η′, W, P_rr, P*_rr)`.
    fn table(&self) -> PyResult<Vec<[f64; 6]>> {
        self.inner.tsv_rows(&self.model).map_err(py_err)
    }
}

type GriffithTuple = (f64, Vec<(f64, f64)>, f64);

/// Spherical cavity in a hydrostatically loaded linear isotropic body.
#[pyclass(frozen)]
struct Void {
    inner: VoidScenario,
}

#[pymethods]
impl Void {
    #[new]
    #[pyo3(signature = (n, lam, mu, p, order=None))]
    fn new(n: usize, lam: f64, mu: f64, p: f64, order: Option<usize>) -> PyResult<Void> {
        let mut inner = VoidScenario::hydrostatic(n, lam, mu, p).map_err(py_err)?;
        if let Some(o) = order {
            inner.order = o;
        }
        Ok(Void { inner })
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa()
    }

    /// Energy change from the cavity traction work, `(quadrature, reference)`.
    fn delta_e_linear(&self) -> PyResult<(f64, f64)> {
        let t = void_energy::delta_e_linear(&self.inner).map_err(py_err)?;
        Ok((t.quadrature, t.reference))
    }

    /// Energy change from the configurational route, `(quadrature, reference)`.
    fn delta_e_gct(&self) -> PyResult<(f64, f64)> {
        let t = void_energy::delta_e_gct(&self.inner).map_err(py_err)?;
        Ok((t.quadrature, t.reference))
    }

    /// `(closed_form, truncated [(R, value)], extrapolated)`.
    fn griffith(&self) -> PyResult<GriffithTuple> {
        let g = void_energy::griffith_discrepancy(&self.inner).map_err(py_err)?;
        Ok((g.closed_form, g.truncated, g.extrapolated))
    }
}

/// Piecewise-constant 1D shock for `U(F) = c2 F²/2 + c4 F⁴/4`.
#[pyclass(frozen)]
struct Shock {
    inner: ShockSolution1D,
}

#[pymethods]
impl Shock {
    #[new]
    #[pyo3(signature = (f_minus, f_plus, v_plus=0.0, c2=1.0, c4=1.0))]
    fn new(f_minus: f64, f_plus: f64, v_plus: f64, c2: f64, c4: f64) -> PyResult<Shock> {
        let u = make_dynamic_potential(c2, c4).map_err(py_err)?;
        Ok(Shock { inner: shock_dynamics::build_shock(u, f_minus, f_plus, v_plus).map_err(py_err)? })
    }

    #[getter]
    fn speed(&self) -> f64 {
        self.inner.speed
    }

    #[getter]
    fn v_minus(&self) -> f64 {
        self.inner.v_minus
    }

    #[getter]
    fn lax(&self) -> Option<bool> {
        self.inner.lax
    }

    /// Driving force `p*` on the shock.
    fn pstar(&self) -> PyResult<f64> {
        Ok(shock_dynamics::shock_pstar(&self.inner).map_err(py_err)?.pstar)
    }

    /// `(lhs, rhs, pass)` of the energy balance on `[a, b]` at time `t`.
    fn energy_balance(&self, a: f64, b: f64, t: f64) -> PyResult<(f64, f64, bool)> {
        let r = shock_dynamics::verify_energy_balance(&self.inner, a, b, t).map_err(py_err)?;
        Ok((r.lhs, r.rhs, r.pass))
    }
}

#[pymodule]
#[pyo3(name = "confstress")]
fn confstress_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cli_report::VERSION)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(example1_energy, m)?)?;
    m.add_class::<Model>()?;
    m.add_class::<RadialProfile>()?;
    m.add_class::<Void>()?;
    m.add_class::<Shock>()?;
    Ok(())
}
