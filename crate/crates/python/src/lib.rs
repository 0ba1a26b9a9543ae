//! Python bindings. Matrices travel as lists of rows, exponents as floats
//! (`float("inf")` for the sup norm).

use numrad::projections::{MinimalProjection, NormKind, OptimizerConfig, ProjectionProblem};
use numrad::symmetry::{fourier_projection, lebesgue_constant, rudin_average, FourierGrid, IsometryGroup};
use numrad::unicity::{builtin_instances, strong_unicity_estimate, UnicityConfig};
use numrad::{DMatrix, DVector, Exponent, LpSpace, Method, Operator, SearchConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Rows = Vec<Vec<f64>>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: &Rows) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
        return Err(err("matrix must be a non-empty list of equal-length rows"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn to_rows(m: &DMatrix<f64>) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn search(method: &str, starts: usize, seed: u64) -> PyResult<SearchConfig> {
    Ok(SearchConfig { method: parse::<Method>(method)?, starts, seed, ..Default::default() })
}

/// Finite-dimensional `ℓᵖ` space.
#[pyclass(name = "LpSpace", frozen)]
struct PyLpSpace {
    inner: LpSpace,
}

#[pymethods]
impl PyLpSpace {
    #[new]
    fn new(dim: usize, p: f64) -> PyResult<Self> {
        let inner = LpSpace::new(dim, Exponent::new(p).map_err(err)?).map_err(err)?;
        Ok(PyLpSpace { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p.as_f64()
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.p.dual().as_f64()
    }

    fn norm(&self, x: Vec<f64>) -> PyResult<f64> {
        let x = DVector::from_vec(x);
        self.inner.check_dim(&x).map_err(err)?;
        Ok(self.inner.norm(&x))
    }

    fn dual_norm(&self, y: Vec<f64>) -> PyResult<f64> {
        let y = DVector::from_vec(y);
        self.inner.check_dim(&y).map_err(err)?;
        Ok(self.inner.dual_norm(&y))
    }

    /// Unit functionals norming `x`; a single one when the space is smooth.
    fn support_functionals(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let fs = self.inner.ext_functionals(&DVector::from_vec(x)).map_err(err)?;
        Ok(fs.into_iter().map(|f| f.iter().copied().collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("LpSpace(dim={}, p={})", self.inner.dim, self.inner.p.as_f64())
    }
}

/// Value of a norm or radius search with its witness pair.
#[pyclass(frozen, get_all)]
struct Estimate {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    method: String,
}

fn estimate(
    space: &PyLpSpace,
    matrix: Rows,
    method: &str,
    starts: usize,
    seed: u64,
    radius: bool,
) -> PyResult<Estimate> {
    let op = Operator::on(space.inner, to_matrix(&matrix)?).map_err(err)?;
    let cfg = search(method, starts, seed)?;
    let r = if radius { numrad::numerical_radius(&op, &cfg) } else { numrad::operator_norm(&op, &cfg) }.map_err(err)?;
    Ok(Estimate {
        value: r.value,
        x: r.witness_x.iter().copied().collect(),
        y: r.witness_y.iter().copied().collect(),
        method: r.method.to_string(),
    })
}

#[pyfunction]
#[pyo3(signature = (space, matrix, method = "auto", starts = 64, seed = 0))]
fn numerical_radius(space: &PyLpSpace, matrix: Rows, method: &str, starts: usize, seed: u64) -> PyResult<Estimate> {
    estimate(space, matrix, method, starts, seed, true)
}

#[pyfunction]
#[pyo3(signature = (space, matrix, method = "auto", starts = 64, seed = 0))]
fn operator_norm(space: &PyLpSpace, matrix: Rows, method: &str, starts: usize, seed: u64) -> PyResult<Estimate> {
    estimate(space, matrix, method, starts, seed, false)
}

/// Outcome of a minimal-projection search.
#[pyclass(frozen, get_all)]
struct Minimum {
    operator: Rows,
    theta: Vec<f64>,
    value: f64,
    kind: String,
    converged: bool,
    method: String,
    certificate_feasible: Option<bool>,
    certificate_residual: Option<f64>,
}

impl Minimum {
    fn from(m: MinimalProjection, cert: Option<(bool, f64)>) -> Self {
        Minimum {
            operator: to_rows(&m.operator),
            theta: m.theta.iter().copied().collect(),
            value: m.value,
            kind: format!("{:?}", m.kind).to_lowercase(),
            converged: m.converged,
            method: m.method.to_string(),
            certificate_feasible: cert.map(|c| c.0),
            certificate_residual: cert.map(|c| c.1),
        }
    }
}

fn problem(space: &PyLpSpace, basis: Vec<Vec<f64>>) -> PyResult<ProjectionProblem> {
    ProjectionProblem::projection(space.inner, basis.into_iter().map(DVector::from_vec).collect()).map_err(err)
}

/// Minimises the operator norm or the numerical radius over all projections
/// onto the span of `basis`, then checks the invariance certificate at the
/// minimiser when `certify` is set.
#[pyfunction]
#[pyo3(signature = (space, basis, kind = "radius", restarts = 32, seed = 0, certify = true, tol = 1e-4))]
fn minimal_projection(
    space: &PyLpSpace,
    basis: Vec<Vec<f64>>,
    kind: &str,
    restarts: usize,
    seed: u64,
    certify: bool,
    tol: f64,
) -> PyResult<Minimum> {
    let prob = problem(space, basis)?;
    let kind: NormKind = parse(kind)?;
    let cfg = OptimizerConfig { restarts, seed, ..Default::default() };
    let m = numrad::minimal_projection(&prob, kind, &cfg).map_err(err)?;
    let cert = if certify && prob.subspace_dim() < space.inner.dim {
        let pairs = numrad::extremal_pairs(&m.operator, &prob, kind, tol, &cfg.search()).map_err(err)?;
        let out = numrad::invariance_certificate(&pairs.pairs, &prob, tol).map_err(err)?;
        Some((out.is_feasible(), out.certificate().residual))
    } else {
        None
    };
    Ok(Minimum::from(m, cert))
}

/// Average of `matrix` over a named group: `cyclic`, `sign` or `trivial`.
#[pyfunction]
fn group_average(space: &PyLpSpace, matrix: Rows, group: &str) -> PyResult<Rows> {
    let g = match group {
        "cyclic" => IsometryGroup::cyclic_shifts(space.inner),
        "sign" => IsometryGroup::sign_changes(space.inner),
        "trivial" => IsometryGroup::trivial(space.inner),
        other => return Err(err(format!("unknown group {other:?} (cyclic|sign|trivial)"))),
    };
    Ok(to_rows(&rudin_average(&to_matrix(&matrix)?, &g).map_err(err)?))
}

/// Lebesgue constant of the degree-`n` Fourier projection on a grid of `points` nodes.
#[pyfunction]
#[pyo3(signature = (n, points = None))]
fn fourier_lebesgue_constant(n: usize, points: Option<usize>) -> PyResult<f64> {
    let grid = FourierGrid::new(n, points.unwrap_or(4 * n + 4)).map_err(err)?;
    Ok(lebesgue_constant(&grid))
}

#[pyfunction]
#[pyo3(signature = (n, points = None))]
fn fourier_projection_matrix(n: usize, points: Option<usize>) -> PyResult<Rows> {
    let grid = FourierGrid::new(n, points.unwrap_or(4 * n + 4)).map_err(err)?;
    Ok(to_rows(&fourier_projection(&grid)))
}

/// Constant and the two minimisers for the hyperplane `ker f` of `ℓ∞⁴`.
#[pyfunction]
fn hyperplane_constant(f: Vec<f64>) -> PyResult<(f64, Rows, Rows)> {
    let h = numrad::dim4_lambda(&f).map_err(err)?;
    Ok((h.lambda, to_rows(&h.first), to_rows(&h.second)))
}

/// Sampled strong-unicity constant at the first minimiser of a built-in instance.
#[pyfunction]
#[pyo3(signature = (instance, samples = 10_000, seed = 0))]
fn strong_unicity(instance: &str, samples: usize, seed: u64) -> PyResult<f64> {
    let inst = builtin_instances()
        .into_iter()
        .find(|i| i.name == instance)
        .ok_or_else(|| err(format!("unknown instance {instance:?}")))?;
    let prob = inst.projection_problem();
    let (at, extra) = match inst.minimizers.split_first() {
        Some((first, rest)) => (first.clone(), rest.to_vec()),
        None => {
            let cfg = OptimizerConfig { seed, ..Default::default() };
            (numrad::minimal_projection(&prob, NormKind::Radius, &cfg).map_err(err)?.operator, Vec::new())
        }
    };
    let cfg = UnicityConfig { samples, seed, extra, ..Default::default() };
    Ok(strong_unicity_estimate(&prob, &at, NormKind::Radius, &cfg).map_err(err)?.r_hat)
}

#[pyfunction]
fn instance_names() -> Vec<&'static str> {
    builtin_instances().iter().map(|i| i.name).collect()
}

#[pymodule]
fn pynumrad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLpSpace>()?;
    m.add_class::<Estimate>()?;
    m.add_class::<Minimum>()?;
    m.add_function(wrap_pyfunction!(numerical_radius, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_projection, m)?)?;
    m.add_function(wrap_pyfunction!(group_average, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_lebesgue_constant, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_projection_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(hyperplane_constant, m)?)?;
    m.add_function(wrap_pyfunction!(strong_unicity, m)?)?;
    m.add_function(wrap_pyfunction!(instance_names, m)?)?;
    Ok(())
}
