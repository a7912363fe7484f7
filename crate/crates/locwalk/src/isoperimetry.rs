//! Isoperimetric profiles, concentration tails, small-ball probabilities,
//! moment inequalities, and the truncated-cone upper bound.
//!
//! The 1-d interval profile is exact (standard normal CDF); the empirical
//! log-Cheeger estimate minimizes the profile ratio over tested halfspaces
//! only, so it is an upper-bound estimate of the true constant. The cone
//! bound evaluates the slab measure ((t₀+1)/n)^{n−1} − (t₀/n)^{n−1} in the
//! log domain (log1p/expm1) to dodge catastrophic cancellation.

use crate::bodies::{boundary_measure, set_measure, Density, SetSpec, WeightedSample};
use crate::special::{chi2_cdf, normal_interval_mass, normal_pdf};
use crate::util::{dot, median, norm_sq};
use crate::{Error, Result};
use rand::Rng;

/// One point of an isoperimetric profile: set measure g, boundary rate,
/// and the two normalized ratios
/// ψ = boundary/min(g, 1−g) and κ = ψ/√log(1/min(g, 1−g)).
#[derive(Debug, Clone)]
pub struct ProfilePoint {
    pub descriptor: String,
    pub g: f64,
    pub boundary: f64,
    pub kappa: f64,
    pub psi: f64,
}

impl ProfilePoint {
    pub fn new(descriptor: impl Into<String>, g: f64, boundary: f64) -> Result<Self> {
        if !(g > 0.0 && g < 1.0) {
            return Err(Error::invalid("g", "measure must lie strictly in (0, 1)"));
        }
        let gmin = g.min(1.0 - g);
        let psi = boundary / gmin;
        let kappa = psi / (1.0 / gmin).ln().sqrt();
        Ok(ProfilePoint {
            descriptor: descriptor.into(),
            g,
            boundary,
            kappa,
            psi,
        })
    }
}

/// Exact profile of S = \[y, b\] under the density ∝ e^{−tx²/2}·1 on \[a, b\]:
/// g = ∫_y^b e^{−tx²/2} / ∫_a^b e^{−tx²/2}, boundary = e^{−ty²/2} / ∫_a^b,
/// computed through the standard normal CDF after rescaling x → x√t.
///
/// ```
/// use locwalk::isoperimetry::gaussian_interval_profile;
///
/// // a symmetric cut carries half the mass
/// let p = gaussian_interval_profile(-2.0, 2.0, 0.0, 1.0).unwrap();
/// assert!((p.g - 0.5).abs() < 1e-14);
/// ```
pub fn gaussian_interval_profile(a: f64, b: f64, y: f64, t: f64) -> Result<ProfilePoint> {
    if !(a < y && y < b) {
        return Err(Error::invalid("y", "need a < y < b"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid("t", "must be positive"));
    }
    let s = t.sqrt();
    let total = normal_interval_mass(a * s, b * s);
    if total <= 0.0 {
        return Err(Error::invalid("a", "interval carries no mass"));
    }
    let g = normal_interval_mass(y * s, b * s) / total;
    let boundary = s * normal_pdf(y * s) / total;
    ProfilePoint::new(format!("interval[{a},{b}]cut{y}t{t}"), g, boundary)
}

/// Empirical log-Cheeger upper bound over halfspaces {θᵀx ≥ b}: the
/// minimum profile κ over all tested (direction, threshold) pairs, using
/// the Minkowski boundary surrogate with step h. Sets whose empirical
/// measure falls outside [10/m, 1 − 10/m] are skipped.
pub fn estimate_log_cheeger(
    sample: &WeightedSample,
    directions: &[Vec<f64>],
    thresholds: &[f64],
    h: f64,
) -> Result<(f64, String)> {
    let m = sample.len();
    if m < 1000 {
        return Err(Error::invalid("sample", "need at least 10^3 points"));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("h", "must be positive"));
    }
    let resolution = 10.0 / m as f64;
    let mut best: Option<ProfilePoint> = None;
    for (di, theta) in directions.iter().enumerate() {
        let nrm = norm_sq(theta).sqrt();
        if (nrm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("directions", "must be unit vectors"));
        }
        for &b in thresholds {
            let set = SetSpec::halfspace(theta.clone(), b);
            let g = set_measure(sample, &set);
            if g < resolution || g > 1.0 - resolution {
                continue;
            }
            let rate = boundary_measure(sample, &set, h)?;
            let point = ProfilePoint::new(format!("dir{di}_b{b}"), g, rate)?;
            if best.as_ref().is_none_or(|p| point.kappa < p.kappa) {
                best = Some(point);
            }
        }
    }
    let best = best.ok_or_else(|| {
        Error::Degenerate("no tested halfspace had resolvable measure".into())
    })?;
    Ok((best.kappa, best.descriptor))
}

/// Observable whose concentration is tested: a 1-Lipschitz scalar function.
#[derive(Debug, Clone)]
pub enum GKind {
    /// ‖x‖₂.
    EuclideanNorm,
    /// θᵀx for a unit vector θ.
    FixedDirection(Vec<f64>),
}

impl GKind {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            GKind::EuclideanNorm => norm_sq(x).sqrt(),
            GKind::FixedDirection(theta) => dot(theta, x),
        }
    }
}

/// Empirical upper-tail table for a Lipschitz observable.
#[derive(Debug, Clone)]
pub struct TailTable {
    pub t_grid: Vec<f64>,
    /// P(g(x) − median ≥ t) per grid point.
    pub tail_median: Vec<f64>,
    /// P(g(x) − mean ≥ t) per grid point.
    pub tail_mean: Vec<f64>,
    /// Rows whose empirical tail fell to zero (below MC resolution).
    pub censored: Vec<bool>,
    /// Largest c with every positive median tail ≤ exp(−c·t²/(t+√n)).
    pub fitted_c: Option<f64>,
    pub median: f64,
    pub mean: f64,
    pub n: usize,
    pub m: usize,
}

/// Estimate tails of g(x) − center on `m` i.i.d. draws and fit the largest
/// constant c such that every resolvable grid tail satisfies
/// tail(t) ≤ exp(−c·t²/(t+√n)).
pub fn concentration_experiment<R: Rng + ?Sized>(
    density: &Density,
    g_kind: &GKind,
    t_grid: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<TailTable> {
    if let GKind::FixedDirection(theta) = g_kind {
        if (norm_sq(theta).sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("direction", "must be a unit vector"));
        }
    }
    concentration_experiment_fn(density, |x| g_kind.eval(x), t_grid, m, rng)
}

/// Same as [`concentration_experiment`] for an arbitrary (assumed
/// 1-Lipschitz) observable.
pub fn concentration_experiment_fn<R, F>(
    density: &Density,
    g_fn: F,
    t_grid: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<TailTable>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> f64,
{
    if m < 100_000 {
        return Err(Error::invalid("m", "need >= 1e5 draws for meaningful tails"));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("t_grid", "must be strictly increasing"));
    }
    let mut values = Vec::with_capacity(m);
    for _ in 0..m {
        let x = density.sample_one(rng)?;
        values.push(g_fn(&x));
    }
    let med = median(&values);
    let mean = values.iter().sum::<f64>() / m as f64;

    let tail_at = |center: f64, t: f64| -> f64 {
        values.iter().filter(|&&v| v - center >= t).count() as f64 / m as f64
    };
    let tail_median: Vec<f64> = t_grid.iter().map(|&t| tail_at(med, t)).collect();
    let tail_mean: Vec<f64> = t_grid.iter().map(|&t| tail_at(mean, t)).collect();
    let censored: Vec<bool> = tail_median.iter().map(|&p| p == 0.0).collect();

    let sqrt_n = (density.dim() as f64).sqrt();
    let fitted_c = t_grid
        .iter()
        .zip(&tail_median)
        .filter(|(&t, &p)| t > 0.0 && p > 0.0)
        .map(|(&t, &p)| -p.ln() * (t + sqrt_n) / (t * t))
        .fold(None, |acc: Option<f64>, c| {
            Some(acc.map_or(c, |a| a.min(c)))
        });

    Ok(TailTable {
        t_grid: t_grid.to_vec(),
        tail_median,
        tail_mean,
        censored,
        fitted_c,
        median: med,
        mean,
        n: density.dim(),
        m,
    })
}

/// One row of the small-ball table.
#[derive(Debug, Clone, Copy)]
pub struct SmallBallRow {
    pub epsilon: f64,
    /// P(‖x‖² ≤ εn): exact chi-square value or MC estimate.
    pub p: f64,
    /// Reference bound ε^{√n}.
    pub bound: f64,
    /// MC estimate fell below the 10/m resolution floor.
    pub below_resolution: bool,
    /// Bound assertion P ≤ ε^{√n}; only armed for exact mode at ε ≤ 0.2.
    pub pass: bool,
}

/// Probability source for [`small_ball_experiment`].
pub enum SmallBallMode<'a> {
    /// Exact chi-square CDF (standard normal instance).
    GaussianExact,
    /// Monte Carlo on an arbitrary density with `m` draws.
    MonteCarlo { density: &'a Density, m: usize },
}

/// Table of P(‖x‖² ≤ εn) against the reference bound ε^{√n}.
pub fn small_ball_experiment<R: Rng + ?Sized>(
    n: usize,
    eps_grid: &[f64],
    mode: SmallBallMode<'_>,
    rng: &mut R,
) -> Result<Vec<SmallBallRow>> {
    if eps_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::invalid("epsilon", "grid values must lie in (0, 1]"));
    }
    let nf = n as f64;
    let sqrt_n = nf.sqrt();

    let mc_norms: Option<(Vec<f64>, usize)> = match &mode {
        SmallBallMode::GaussianExact => None,
        SmallBallMode::MonteCarlo { density, m } => {
            if density.dim() != n {
                return Err(Error::invalid("density", "dimension mismatch"));
            }
            let mut norms = Vec::with_capacity(*m);
            for _ in 0..*m {
                norms.push(norm_sq(&density.sample_one(rng)?));
            }
            Some((norms, *m))
        }
    };

    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let bound = (sqrt_n * eps.ln()).exp();
        let (p, below) = match &mc_norms {
            None => (chi2_cdf(nf, eps * nf)?, false),
            Some((norms, m)) => {
                let hits = norms.iter().filter(|&&v| v <= eps * nf).count();
                let est = hits as f64 / *m as f64;
                (est, est < 10.0 / *m as f64)
            }
        };
        let armed = matches!(mode, SmallBallMode::GaussianExact) && eps <= 0.2;
        rows.push(SmallBallRow {
            epsilon: eps,
            p,
            bound,
            below_resolution: below,
            pass: !armed || p <= bound,
        });
    }
    Ok(rows)
}

/// Result of [`moment_check`].
#[derive(Debug, Clone, Copy)]
pub struct MomentCheck {
    /// Ê‖x‖^k.
    pub lhs: f64,
    /// (2k)^k (Ê‖x‖²)^{k/2}.
    pub rhs: f64,
    pub stderr_lhs: f64,
    pub pass: bool,
}

/// Logconcave moment inequality E‖x‖^k ≤ (2k)^k (E‖x‖²)^{k/2} on a sample.
pub fn moment_check(sample: &WeightedSample, k: u32) -> Result<MomentCheck> {
    if k < 1 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    if sample.is_empty() {
        return Err(Error::invalid("sample", "must be nonempty"));
    }
    let w = sample.normalized_weights();
    let mut lhs = 0.0;
    let mut second = 0.0;
    for (x, &wi) in sample.points.iter().zip(&w) {
        let nsq = norm_sq(x);
        lhs += wi * nsq.powf(k as f64 / 2.0);
        second += wi * nsq;
    }
    let mut var = 0.0;
    for (x, &wi) in sample.points.iter().zip(&w) {
        let v = norm_sq(x).powf(k as f64 / 2.0) - lhs;
        var += wi * wi * v * v;
    }
    let rhs = (2.0 * k as f64).powi(k as i32) * second.powf(k as f64 / 2.0);
    Ok(MomentCheck {
        lhs,
        rhs,
        stderr_lhs: var.sqrt(),
        pass: lhs <= rhs,
    })
}

/// Analytic slab bound on the truncated cone.
#[derive(Debug, Clone, Copy)]
pub struct ConeSlabProfile {
    pub t0: f64,
    /// Slab measure relative to the full cone.
    pub p_slab: f64,
    pub log_p_slab: f64,
    /// κ-upper bound 2/√log(1/p).
    pub kappa_upper: f64,
    /// ρ reported as κ².
    pub rho_upper: f64,
}

/// Exact evaluation of the slab measure
/// p = ((t₀+1)/n)^{n−1} − (t₀/n)^{n−1} with t₀ = n − √(D² − n), and the
/// induced bounds κ ≤ 2/√log(1/p), ρ ≤ κ² (slab expansion is at most 2).
pub fn cone_slab_profile(n: usize, d: f64) -> Result<ConeSlabProfile> {
    let nf = n as f64;
    if !(d >= 2.0 * nf.sqrt() && d <= nf / 2.0) {
        return Err(Error::invalid(
            "d",
            format!("must satisfy 2*sqrt(n) <= D <= n/2 (n = {n})"),
        ));
    }
    let t0 = nf - (d * d - nf).sqrt();
    // log-domain: la = (n−1)·log((t0+1)/n), lb = (n−1)·log(t0/n), la > lb
    let la = (nf - 1.0) * ((t0 + 1.0 - nf) / nf).ln_1p();
    let lb = (nf - 1.0) * ((t0 - nf) / nf).ln_1p();
    // p = e^la − e^lb = e^la · (−expm1(lb − la))
    let one_minus = -(lb - la).exp_m1();
    let log_p = la + one_minus.ln();
    let p = log_p.exp();
    let kappa_upper = 2.0 / (-log_p).sqrt();
    Ok(ConeSlabProfile {
        t0,
        p_slab: p,
        log_p_slab: log_p,
        kappa_upper,
        rho_upper: kappa_upper * kappa_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{sample_iid, ConvexBody};
    use crate::rng::stream_rng;

    #[test]
    fn profile_symmetric_cut_is_half() {
        for t in [0.3, 1.0, 7.0] {
            let p = gaussian_interval_profile(-2.0, 2.0, 0.0, t).unwrap();
            assert!((p.g - 0.5).abs() < 1e-14, "t={t}: g={}", p.g);
        }
    }

    #[test]
    fn profile_reference_values() {
        let p = gaussian_interval_profile(-10.0, 10.0, 1.0, 1.0).unwrap();
        assert!((p.g - 0.158655).abs() < 1e-6, "g = {}", p.g);
        assert!((p.boundary - 0.241971).abs() < 1e-6, "boundary = {}", p.boundary);
    }

    #[test]
    fn profile_scaling_identity() {
        // profile at (a,b,y;t) = profile at (a√t, b√t, y√t; 1) with the
        // boundary (hence kappa) scaled by √t
        let cases = [
            (-3.0, 4.0, 0.7),
            (-10.0, 10.0, 1.0),
            (-0.5, 2.5, 1.5),
            (0.1, 6.0, 2.0),
        ];
        for (a, b, y) in cases {
            for t in [0.25f64, 1.0, 4.0, 16.0] {
                let s = t.sqrt();
                let left = gaussian_interval_profile(a, b, y, t).unwrap();
                let right = gaussian_interval_profile(a * s, b * s, y * s, 1.0).unwrap();
                assert!((left.g - right.g).abs() < 1e-10);
                assert!((left.boundary - s * right.boundary).abs() < 1e-10 * s);
                assert!((left.kappa - s * right.kappa).abs() < 1e-10 * s);
            }
        }
    }

    #[test]
    fn profile_internal_consistency() {
        let p = gaussian_interval_profile(-4.0, 5.0, 1.2, 2.0).unwrap();
        let gmin = p.g.min(1.0 - p.g);
        assert!((p.kappa * (1.0 / gmin).ln().sqrt() - p.psi).abs() < 1e-12);
        assert!(p.kappa >= 0.0 && p.psi >= 0.0);
    }

    #[test]
    fn profile_rejects_degenerate() {
        assert!(gaussian_interval_profile(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(gaussian_interval_profile(-1.0, 1.0, 1.5, 1.0).is_err());
        assert!(gaussian_interval_profile(-1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn profile_kappa_floor_random_intervals() {
        // empirical Ω(1) floor at t = 1: every tested cut with g ≤ 1/2 has
        // kappa ≥ 0.3
        let mut rng = stream_rng(300, 0);
        let mut checked = 0;
        for _ in 0..300 {
            let a = rng.random_range(-15.0..-0.2);
            let b = rng.random_range(0.2..15.0);
            let y = rng.random_range(a + 0.05..b - 0.05);
            // cuts so deep in a tail that g rounds to 0 or 1 are skipped
            let p = match gaussian_interval_profile(a, b, y, 1.0) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if p.g <= 0.5 && p.g > 1e-10 {
                assert!(p.kappa >= 0.3, "kappa {} at ({a},{b},{y})", p.kappa);
                checked += 1;
            }
        }
        assert!(checked > 50, "only {checked} cuts exercised the floor");
    }

    #[test]
    fn log_cheeger_gaussian_2d() {
        let d = Density::gaussian(2).unwrap();
        let sample = sample_iid(&d, 200_000, &mut stream_rng(301, 0)).unwrap();
        let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let thresholds: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
        let (kappa, desc) = estimate_log_cheeger(&sample, &dirs, &thresholds, 0.05).unwrap();
        assert!((kappa - 0.958).abs() <= 0.1, "kappa = {kappa} at {desc}");

        // duplicate directions change nothing
        let dirs2 = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
        let (kappa2, _) = estimate_log_cheeger(&sample, &dirs2, &thresholds, 0.05).unwrap();
        assert_eq!(kappa, kappa2);
    }

    #[test]
    fn log_cheeger_cube_positive() {
        let body = ConvexBody::isotropic_cube(2).unwrap();
        let d = Density::uniform_on_body(body);
        let sample = sample_iid(&d, 50_000, &mut stream_rng(302, 0)).unwrap();
        let dirs = vec![vec![1.0, 0.0]];
        let thresholds = vec![-1.0, 0.0, 1.0];
        let (kappa, _) = estimate_log_cheeger(&sample, &dirs, &thresholds, 0.05).unwrap();
        assert!(kappa > 0.0);

        // too few points rejected
        let tiny = sample_iid(&d, 100, &mut stream_rng(302, 1)).unwrap();
        assert!(estimate_log_cheeger(&tiny, &dirs, &thresholds, 0.05).is_err());
        // non-unit direction rejected
        assert!(
            estimate_log_cheeger(&sample, &[vec![2.0, 0.0]], &thresholds, 0.05).is_err()
        );
    }

    #[test]
    fn concentration_median_row_and_monotone() {
        let d = Density::gaussian(3).unwrap();
        let grid = vec![0.0, 0.5, 1.0, 1.5, 2.0];
        let table = concentration_experiment(
            &d,
            &GKind::EuclideanNorm,
            &grid,
            100_000,
            &mut stream_rng(303, 0),
        )
        .unwrap();
        // t = 0 with median centering: tail = 1/2 up to MC error
        assert!((table.tail_median[0] - 0.5).abs() < 0.01);
        for w in table.tail_median.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in table.tail_mean.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn concentration_gaussian_fitted_constant() {
        let d = Density::gaussian(100).unwrap();
        let grid = vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
        let table = concentration_experiment(
            &d,
            &GKind::EuclideanNorm,
            &grid,
            150_000,
            &mut stream_rng(304, 0),
        )
        .unwrap();
        let c = table.fitted_c.expect("resolvable tails exist");
        assert!(c >= 0.05, "fitted c = {c}");
    }

    #[test]
    fn concentration_custom_lipschitz() {
        // max coordinate is 1-Lipschitz
        let d = Density::gaussian(3).unwrap();
        let grid = vec![0.0, 0.5, 1.0, 2.0];
        let table = concentration_experiment_fn(
            &d,
            |x| x.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            &grid,
            100_000,
            &mut stream_rng(309, 0),
        )
        .unwrap();
        assert!((table.tail_median[0] - 0.5).abs() < 0.01);
        for w in table.tail_median.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn concentration_rejects_small_m_and_bad_grid() {
        let d = Density::gaussian(2).unwrap();
        let mut rng = stream_rng(305, 0);
        assert!(concentration_experiment(&d, &GKind::EuclideanNorm, &[0.0, 1.0], 999, &mut rng)
            .is_err());
        assert!(concentration_experiment(
            &d,
            &GKind::EuclideanNorm,
            &[1.0, 0.5],
            100_000,
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn small_ball_exact_values() {
        let mut rng = stream_rng(306, 0);
        // epsilon = 1 at large n: chi-square median sits just below n
        let rows =
            small_ball_experiment(100, &[1.0], SmallBallMode::GaussianExact, &mut rng).unwrap();
        assert!(rows[0].p > 0.5 && rows[0].p < 0.56, "p = {}", rows[0].p);

        // epsilon -> 0 drives p -> 0
        let rows =
            small_ball_experiment(20, &[1e-4], SmallBallMode::GaussianExact, &mut rng).unwrap();
        assert!(rows[0].p < 1e-30);

        // n=100, eps=0.1: P(chi2_100 <= 10) <= 1e-10
        let rows =
            small_ball_experiment(100, &[0.1], SmallBallMode::GaussianExact, &mut rng).unwrap();
        assert!(rows[0].p <= 0.1f64.powi(10));
        assert!(rows[0].pass);

        assert!(small_ball_experiment(10, &[0.0], SmallBallMode::GaussianExact, &mut rng)
            .is_err());
        assert!(small_ball_experiment(10, &[1.5], SmallBallMode::GaussianExact, &mut rng)
            .is_err());
    }

    #[test]
    fn small_ball_monte_carlo_cross_check() {
        let mut rng = stream_rng(307, 0);
        let d = Density::gaussian(25).unwrap();
        let m = 200_000;
        let grid = [0.6, 1.0];
        let mc = small_ball_experiment(
            25,
            &grid,
            SmallBallMode::MonteCarlo { density: &d, m },
            &mut rng,
        )
        .unwrap();
        let exact =
            small_ball_experiment(25, &grid, SmallBallMode::GaussianExact, &mut rng).unwrap();
        for (a, b) in mc.iter().zip(&exact) {
            if !a.below_resolution {
                let se = (b.p * (1.0 - b.p) / m as f64).sqrt();
                assert!(
                    (a.p - b.p).abs() <= 4.0 * se.max(1e-9),
                    "eps {}: mc {} exact {}",
                    a.epsilon,
                    a.p,
                    b.p
                );
            }
        }

        // deep cell is below MC resolution and must be flagged, not zeroed
        let deep = small_ball_experiment(
            25,
            &[0.05],
            SmallBallMode::MonteCarlo { density: &d, m: 100_000 },
            &mut rng,
        )
        .unwrap();
        assert!(deep[0].below_resolution);
    }

    #[test]
    fn moment_check_cases() {
        let mut rng = stream_rng(308, 0);
        let g10 = Density::gaussian(10).unwrap();
        let s = sample_iid(&g10, 100_000, &mut rng).unwrap();

        // k = 2: rhs = 16 * lhs, always passes
        let m2 = moment_check(&s, 2).unwrap();
        assert!(m2.pass);
        assert!((m2.rhs / m2.lhs - 16.0).abs() < 1e-9);

        // k = 4 on gaussian n=10: E|x|^4 = n^2 + 2n = 120 vs 8^4 n^2
        let m4 = moment_check(&s, 4).unwrap();
        assert!((m4.lhs - 120.0).abs() < 4.0, "lhs = {}", m4.lhs);
        assert!(m4.rhs > 400_000.0 && m4.pass);

        let pe = Density::product_exponential(10).unwrap();
        let s3 = sample_iid(&pe, 100_000, &mut rng).unwrap();
        assert!(moment_check(&s3, 3).unwrap().pass);

        assert!(moment_check(&s, 0).is_err());
    }

    #[test]
    fn cone_slab_reference_values() {
        let p = cone_slab_profile(64, 16.0).unwrap();
        assert!((p.t0 - 50.1436).abs() < 1e-3, "t0 = {}", p.t0);
        assert!(
            (p.p_slab - 5.2e-7).abs() < 0.4e-7,
            "p_slab = {:e}",
            p.p_slab
        );
        assert!((p.kappa_upper - 0.53).abs() < 0.01, "kappa = {}", p.kappa_upper);
        assert!((p.rho_upper - p.kappa_upper * p.kappa_upper).abs() < 1e-15);
    }

    #[test]
    fn cone_slab_band_and_edges() {
        // kappa_upper * sqrt(D) stays within a factor-3 band across D
        let vals: Vec<f64> = [16.0, 24.0, 32.0]
            .iter()
            .map(|&d| cone_slab_profile(64, d).unwrap().kappa_upper * d.sqrt())
            .collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi / lo <= 3.0, "band ratio {}", hi / lo);

        // boundary D = 2*sqrt(n) is well-defined with positive measure
        let n = 64;
        let p = cone_slab_profile(n, 2.0 * (n as f64).sqrt()).unwrap();
        assert!((p.t0 - (n as f64 - (3.0 * n as f64).sqrt())).abs() < 1e-12);
        assert!(p.p_slab > 0.0 && p.p_slab < 1.0);

        assert!(cone_slab_profile(64, 10.0).is_err());
        assert!(cone_slab_profile(64, 40.0).is_err());
    }
}
