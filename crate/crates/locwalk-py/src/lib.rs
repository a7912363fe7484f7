//! Python bindings for the locwalk numerical laboratory.
//!
//! Exposes the main types (bodies, densities, samples, sets, the
//! localization simulator) and the scalar kernels (barrier solver and
//! derivatives, tensor-shift gap, exact profiles, cone bound, special
//! functions) as the `locwalk_py` extension module.

use locwalk::ballwalk;
use locwalk::barrier;
use locwalk::bodies;
use locwalk::isoperimetry;
use locwalk::linalg::SymMatrix;
use locwalk::localization;
use locwalk::rng::stream_rng;
use locwalk::special;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: locwalk::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sym_from_rows(rows: Vec<Vec<f64>>) -> PyResult<SymMatrix> {
    SymMatrix::from_rows(&rows).map_err(err)
}

fn sym_to_rows(m: &SymMatrix) -> Vec<Vec<f64>> {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Convex body: ball(n, r), cube(n, side), or cone(n, d).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Body {
    inner: bodies::ConvexBody,
}

#[pymethods]
impl Body {
    #[staticmethod]
    fn ball(n: usize, r: f64) -> PyResult<Self> {
        Ok(Body {
            inner: bodies::ConvexBody::ball(n, r).map_err(err)?,
        })
    }

    #[staticmethod]
    fn cube(n: usize, side: f64) -> PyResult<Self> {
        Ok(Body {
            inner: bodies::ConvexBody::cube(n, side).map_err(err)?,
        })
    }

    #[staticmethod]
    fn cone(n: usize, d: f64) -> PyResult<Self> {
        Ok(Body {
            inner: bodies::ConvexBody::cone(n, d).map_err(err)?,
        })
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.inner.diameter()
    }

    #[getter]
    fn bounding_radius(&self) -> f64 {
        self.inner.bounding_radius()
    }
}

/// Logconcave density: gaussian(n), product_exponential(n), or
/// uniform_on_body(body).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Density {
    inner: bodies::Density,
}

#[pymethods]
impl Density {
    #[staticmethod]
    fn gaussian(n: usize) -> PyResult<Self> {
        Ok(Density {
            inner: bodies::Density::gaussian(n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn product_exponential(n: usize) -> PyResult<Self> {
        Ok(Density {
            inner: bodies::Density::product_exponential(n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn uniform_on_body(body: &Body) -> Self {
        Density {
            inner: bodies::Density::uniform_on_body(body.inner.clone()),
        }
    }

    fn log_density(&self, x: Vec<f64>) -> f64 {
        self.inner.log_density(&x)
    }

    /// count i.i.d. draws using stream (seed, stream).
    #[pyo3(signature = (count, seed, stream = 0))]
    fn sample(&self, count: usize, seed: u64, stream: u64) -> PyResult<Sample> {
        let mut rng = stream_rng(seed, stream);
        Ok(Sample {
            inner: bodies::sample_iid(&self.inner, count, &mut rng).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }
}

/// Test set: halfspace {theta.x >= b}, slab {lo <= theta.x <= hi}, or the
/// centered ball {|x|^2 <= r^2}.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Set {
    inner: bodies::SetSpec,
}

#[pymethods]
impl Set {
    #[staticmethod]
    fn halfspace(theta: Vec<f64>, b: f64) -> Self {
        Set {
            inner: bodies::SetSpec::halfspace(theta, b),
        }
    }

    #[staticmethod]
    fn slab(theta: Vec<f64>, lo: f64, hi: f64) -> Self {
        Set {
            inner: bodies::SetSpec::Slab { theta, lo, hi },
        }
    }

    #[staticmethod]
    fn ball(radius: f64) -> Self {
        Set {
            inner: bodies::SetSpec::Ball { radius },
        }
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        self.inner.contains(&x)
    }
}

/// Weighted point cloud.
#[pyclass]
struct Sample {
    inner: bodies::WeightedSample,
}

#[pymethods]
impl Sample {
    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ess(&self) -> f64 {
        self.inner.ess()
    }

    /// (mean vector, covariance matrix, degenerate flag).
    fn mean_cov(&self) -> PyResult<(Vec<f64>, Vec<Vec<f64>>, bool)> {
        let mc = bodies::mean_cov(&self.inner).map_err(err)?;
        Ok((mc.mean.clone(), sym_to_rows(&mc.cov), mc.degenerate))
    }

    fn set_measure(&self, set: &Set) -> f64 {
        bodies::set_measure(&self.inner, &set.inner)
    }

    fn boundary_measure(&self, set: &Set, h: f64) -> PyResult<f64> {
        bodies::boundary_measure(&self.inner, &set.inner, h).map_err(err)
    }
}

/// Particle simulator for the tilting process dc_t = dW_t + mu_t dt.
#[pyclass]
struct Localization {
    state: localization::LocalizationState,
    rng: locwalk::rng::Rng,
}

fn parse_mode(mode: &str) -> PyResult<localization::LocMode> {
    match mode {
        "exact-gaussian" => Ok(localization::LocMode::ExactGaussian),
        "reweight" => Ok(localization::LocMode::Reweight),
        "mcmc-refresh" => Ok(localization::LocMode::McmcRefresh),
        other => Err(PyValueError::new_err(format!(
            "unknown mode `{other}` (expected exact-gaussian, reweight, mcmc-refresh)"
        ))),
    }
}

#[pymethods]
impl Localization {
    #[new]
    #[pyo3(signature = (density, particles, mode, seed, stream = 0))]
    fn new(
        density: &Density,
        particles: usize,
        mode: &str,
        seed: u64,
        stream: u64,
    ) -> PyResult<Self> {
        let mut rng = stream_rng(seed, stream);
        let state = localization::init_localization(
            &density.inner,
            particles,
            parse_mode(mode)?,
            &mut rng,
        )
        .map_err(err)?;
        Ok(Localization { state, rng })
    }

    fn step(&mut self, dt: f64) -> PyResult<()> {
        localization::localization_step(&mut self.state, dt, &mut self.rng).map_err(err)
    }

    fn refresh(&mut self) -> PyResult<()> {
        localization::refresh_particles(&mut self.state, &mut self.rng).map_err(err)
    }

    #[getter]
    fn t(&self) -> f64 {
        self.state.t
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.state.c.clone()
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.state.mu.clone()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        sym_to_rows(&self.state.cov)
    }

    #[getter]
    fn ess(&self) -> f64 {
        self.state.ess
    }

    fn measure(&self, set: &Set) -> f64 {
        self.state.measure(&set.inner)
    }
}

/// Barrier potential psi(u) = -(u+1)^-2.
#[pyfunction]
fn psi(u: f64) -> PyResult<f64> {
    barrier::psi(u).map_err(err)
}

/// Solve tr((uI - X)^-q) = phi; returns (u, residual, gap).
#[pyfunction]
#[pyo3(signature = (x, q, phi, tol = 1e-10))]
fn solve_u(x: Vec<Vec<f64>>, q: u32, phi: f64, tol: f64) -> PyResult<(f64, f64, f64)> {
    let m = sym_from_rows(x)?;
    let v = barrier::solve_u(&m, q, phi, tol).map_err(err)?;
    Ok((v.u, v.residual, v.gap))
}

/// First directional derivative of u at X along H.
#[pyfunction]
fn du(x: Vec<Vec<f64>>, q: u32, phi: f64, h: Vec<Vec<f64>>) -> PyResult<f64> {
    barrier::du(&sym_from_rows(x)?, q, phi, &sym_from_rows(h)?).map_err(err)
}

/// Second directional derivative of u at X along (H1, H2).
#[pyfunction]
fn d2u(
    x: Vec<Vec<f64>>,
    q: u32,
    phi: f64,
    h1: Vec<Vec<f64>>,
    h2: Vec<Vec<f64>>,
) -> PyResult<f64> {
    barrier::d2u(
        &sym_from_rows(x)?,
        q,
        phi,
        &sym_from_rows(h1)?,
        &sym_from_rows(h2)?,
    )
    .map_err(err)
}

/// (lhs, rhs, gap) of tr(A^a D A^b D) <= tr(A^(a+b) D^2).
#[pyfunction]
fn tensor_shift_gap(
    a: Vec<Vec<f64>>,
    delta: Vec<Vec<f64>>,
    alpha: f64,
    beta: f64,
) -> PyResult<(f64, f64, f64)> {
    barrier::tensor_shift_gap(&sym_from_rows(a)?, &sym_from_rows(delta)?, alpha, beta)
        .map_err(err)
}

/// Exact 1-d interval profile; returns (g, boundary, kappa, psi).
#[pyfunction]
fn gaussian_interval_profile(a: f64, b: f64, y: f64, t: f64) -> PyResult<(f64, f64, f64, f64)> {
    let p = isoperimetry::gaussian_interval_profile(a, b, y, t).map_err(err)?;
    Ok((p.g, p.boundary, p.kappa, p.psi))
}

/// Truncated-cone slab bound; returns (t0, p_slab, kappa_upper, rho_upper).
#[pyfunction]
fn cone_slab_profile(n: usize, d: f64) -> PyResult<(f64, f64, f64, f64)> {
    let p = isoperimetry::cone_slab_profile(n, d).map_err(err)?;
    Ok((p.t0, p.p_slab, p.kappa_upper, p.rho_upper))
}

/// Exact small-ball table; returns rows (epsilon, p, bound).
#[pyfunction]
fn small_ball_exact(n: usize, eps_grid: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
    let mut rng = stream_rng(0, 0);
    let rows = isoperimetry::small_ball_experiment(
        n,
        &eps_grid,
        isoperimetry::SmallBallMode::GaussianExact,
        &mut rng,
    )
    .map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.epsilon, r.p, r.bound))
        .collect())
}

/// Standard normal CDF.
#[pyfunction]
fn normal_cdf(x: f64) -> f64 {
    special::normal_cdf(x)
}

/// Chi-square CDF with `dof` degrees of freedom.
#[pyfunction]
fn chi2_cdf(dof: f64, x: f64) -> PyResult<f64> {
    special::chi2_cdf(dof, x).map_err(err)
}

/// Ball walk on a density; returns (final point, proper steps, total steps).
#[pyfunction]
#[pyo3(signature = (density, x0, delta, steps, seed, stream = 0))]
fn run_ball_walk(
    density: &Density,
    x0: Vec<f64>,
    delta: f64,
    steps: u64,
    seed: u64,
    stream: u64,
) -> PyResult<(Vec<f64>, u64, u64)> {
    let mut rng = stream_rng(seed, stream);
    let params = ballwalk::WalkParams::new(delta, steps, steps).map_err(err)?;
    let summary = ballwalk::run_chain(&density.inner, x0, &params, &[], &mut rng).map_err(err)?;
    let last = summary
        .thinned
        .last()
        .cloned()
        .ok_or_else(|| PyValueError::new_err("no recorded position"))?;
    Ok((last, summary.proper_steps, summary.total_steps))
}

/// Monte Carlo local conductance; returns (estimate, stderr).
#[pyfunction]
#[pyo3(signature = (body, x, delta, m, seed, stream = 0))]
fn local_conductance(
    body: &Body,
    x: Vec<f64>,
    delta: f64,
    m: usize,
    seed: u64,
    stream: u64,
) -> PyResult<(f64, f64)> {
    let mut rng = stream_rng(seed, stream);
    ballwalk::local_conductance(&body.inner, &x, delta, m, &mut rng).map_err(err)
}

/// Cone mixing experiment; returns rows (chain_id, proper, total, censored).
#[pyfunction]
#[pyo3(signature = (n, d, delta, chains, seed))]
fn cone_mixing(
    n: usize,
    d: f64,
    delta: Option<f64>,
    chains: usize,
    seed: u64,
) -> PyResult<Vec<(usize, u64, u64, bool)>> {
    let rows = ballwalk::cone_mixing_experiment(n, d, delta, chains, seed, None).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.chain_id, r.proper_steps, r.total_steps, r.censored))
        .collect())
}

/// Mean signed x1 displacement per proper step on a slice; returns
/// (mean, stderr).
#[pyfunction]
#[pyo3(signature = (body, delta, slice_t, m, seed, stream = 0))]
fn drift_estimate(
    body: &Body,
    delta: f64,
    slice_t: f64,
    m: usize,
    seed: u64,
    stream: u64,
) -> PyResult<(f64, f64)> {
    let mut rng = stream_rng(seed, stream);
    let est = ballwalk::drift_estimate(&body.inner, delta, slice_t, m, &mut rng).map_err(err)?;
    Ok((est.mean, est.stderr))
}

#[pymodule]
fn locwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Body>()?;
    m.add_class::<Density>()?;
    m.add_class::<Set>()?;
    m.add_class::<Sample>()?;
    m.add_class::<Localization>()?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(solve_u, m)?)?;
    m.add_function(wrap_pyfunction!(du, m)?)?;
    m.add_function(wrap_pyfunction!(d2u, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_shift_gap, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_interval_profile, m)?)?;
    m.add_function(wrap_pyfunction!(cone_slab_profile, m)?)?;
    m.add_function(wrap_pyfunction!(small_ball_exact, m)?)?;
    m.add_function(wrap_pyfunction!(normal_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(run_ball_walk, m)?)?;
    m.add_function(wrap_pyfunction!(local_conductance, m)?)?;
    m.add_function(wrap_pyfunction!(cone_mixing, m)?)?;
    m.add_function(wrap_pyfunction!(drift_estimate, m)?)?;
    Ok(())
}
