//! Convex bodies, logconcave densities, and weighted-sample statistics.
//!
//! Three body kinds are supported: the Euclidean ball of radius R, the cube
//! of side s centered at the origin, and the truncated cone
//!
//!   K_D = { x : 0 ≤ x₁ ≤ n,  Σ_{i≥2} x_i² ≤ x₁²/n,  (x₁−n)² + Σ_{i≥2} x_i² ≤ D² },
//!
//! whose truncation ball is centered at the base center (n, 0, …, 0).
//! Densities are stored as log-densities up to an additive constant and are
//! −∞ outside their support; all weights and acceptance ratios downstream
//! are computed in log space.

use crate::linalg::SymMatrix;
use crate::util::{dot, norm_sq};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Laplace scale with unit variance: density (1/√2)·e^{−√2|x|}.
const LAPLACE_SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// JSON-facing body description: `{"kind": "...", "n": ..., params...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball { n: usize, r: f64 },
    Cube { n: usize, side: f64 },
    Cone { n: usize, d: f64 },
}

/// JSON-facing density description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Gaussian { n: usize },
    ProductExponential { n: usize },
    UniformOnBody { body: BodySpec },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyKind {
    Ball { radius: f64 },
    Cube { side: f64 },
    Cone { d: f64 },
}

/// Convex body with deterministic membership.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    dim: usize,
    kind: BodyKind,
}

impl ConvexBody {
    pub fn ball(n: usize, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", "dimension must be >= 2"));
        }
        if !(r > 0.0) {
            return Err(Error::invalid("r", "ball radius must be positive"));
        }
        Ok(ConvexBody {
            dim: n,
            kind: BodyKind::Ball { radius: r },
        })
    }

    pub fn cube(n: usize, side: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", "dimension must be >= 2"));
        }
        if !(side > 0.0) {
            return Err(Error::invalid("side", "cube side must be positive"));
        }
        Ok(ConvexBody {
            dim: n,
            kind: BodyKind::Cube { side },
        })
    }

    /// Cube with unit per-coordinate variance (side 2√3).
    pub fn isotropic_cube(n: usize) -> Result<Self> {
        Self::cube(n, 2.0 * 3.0f64.sqrt())
    }

    pub fn cone(n: usize, d: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("n", "dimension must be >= 2"));
        }
        if !(d > 0.0) {
            return Err(Error::invalid("d", "cone truncation radius must be positive"));
        }
        Ok(ConvexBody {
            dim: n,
            kind: BodyKind::Cone { d },
        })
    }

    /// Whether (n, D) lies in the range 2√n ≤ D ≤ n/2 where the truncated
    /// cone is nearly isotropic; callers are expected to warn outside it.
    pub fn cone_params_standard(n: usize, d: f64) -> bool {
        let nf = n as f64;
        d >= 2.0 * nf.sqrt() && d <= nf / 2.0
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Ball { n, r } => Self::ball(*n, *r),
            BodySpec::Cube { n, side } => Self::cube(*n, *side),
            BodySpec::Cone { n, d } => Self::cone(*n, *d),
        }
    }

    pub fn spec(&self) -> BodySpec {
        match self.kind {
            BodyKind::Ball { radius } => BodySpec::Ball {
                n: self.dim,
                r: radius,
            },
            BodyKind::Cube { side } => BodySpec::Cube { n: self.dim, side },
            BodyKind::Cone { d } => BodySpec::Cone { n: self.dim, d },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        match self.kind {
            BodyKind::Ball { radius } => norm_sq(x) <= radius * radius,
            BodyKind::Cube { side } => {
                let half = 0.5 * side;
                x.iter().all(|&xi| xi.abs() <= half)
            }
            BodyKind::Cone { d } => {
                let n = self.dim as f64;
                let x1 = x[0];
                if !(0.0 <= x1 && x1 <= n) {
                    return false;
                }
                let lat: f64 = x[1..].iter().map(|v| v * v).sum();
                lat <= x1 * x1 / n && (x1 - n) * (x1 - n) + lat <= d * d
            }
        }
    }

    /// Center from which `bounding_radius` is measured: the origin for
    /// ball/cube, the base center (n, 0, …, 0) for the cone.
    pub fn reference_center(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        if let BodyKind::Cone { .. } = self.kind {
            c[0] = self.dim as f64;
        }
        c
    }

    /// Every point of the body lies within this radius of the reference
    /// center.
    pub fn bounding_radius(&self) -> f64 {
        match self.kind {
            BodyKind::Ball { radius } => radius,
            BodyKind::Cube { side } => 0.5 * side * (self.dim as f64).sqrt(),
            BodyKind::Cone { d } => d,
        }
    }

    /// Recorded diameter: 2R for the ball, s√n for the cube, and the
    /// truncation-ball radius D for the cone.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            BodyKind::Ball { radius } => 2.0 * radius,
            BodyKind::Cube { side } => side * (self.dim as f64).sqrt(),
            BodyKind::Cone { d } => d,
        }
    }
}

/// Construct a body from its JSON-facing spec.
pub fn make_body(spec: &BodySpec) -> Result<ConvexBody> {
    ConvexBody::from_spec(spec)
}

#[derive(Debug, Clone)]
pub enum DensityKind {
    /// Standard normal on ℝⁿ.
    Gaussian,
    /// i.i.d. coordinates with density (1/√2)e^{−√2|x_i|} (unit variance).
    ProductExponential,
    /// Constant on a convex body.
    UniformOnBody(ConvexBody),
    /// base(x)·exp(cᵀx − (t/2)‖x‖²), up to normalization.
    GaussianTilted {
        base: Box<Density>,
        c: Vec<f64>,
        t: f64,
    },
}

/// Logconcave density, stored as a log-density up to an additive constant.
#[derive(Debug, Clone)]
pub struct Density {
    dim: usize,
    kind: DensityKind,
}

impl Density {
    pub fn gaussian(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n", "dimension must be >= 1"));
        }
        Ok(Density {
            dim: n,
            kind: DensityKind::Gaussian,
        })
    }

    pub fn product_exponential(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n", "dimension must be >= 1"));
        }
        Ok(Density {
            dim: n,
            kind: DensityKind::ProductExponential,
        })
    }

    pub fn uniform_on_body(body: ConvexBody) -> Self {
        Density {
            dim: body.dim(),
            kind: DensityKind::UniformOnBody(body),
        }
    }

    /// Tilt by exp(cᵀx − (t/2)‖x‖²).
    pub fn tilt(&self, c: &[f64], t: f64) -> Result<Self> {
        if c.len() != self.dim {
            return Err(Error::invalid("c", "tilt vector dimension mismatch"));
        }
        Ok(Density {
            dim: self.dim,
            kind: DensityKind::GaussianTilted {
                base: Box::new(self.clone()),
                c: c.to_vec(),
                t,
            },
        })
    }

    pub fn from_spec(spec: &DensitySpec) -> Result<Self> {
        match spec {
            DensitySpec::Gaussian { n } => Self::gaussian(*n),
            DensitySpec::ProductExponential { n } => Self::product_exponential(*n),
            DensitySpec::UniformOnBody { body } => {
                Ok(Self::uniform_on_body(ConvexBody::from_spec(body)?))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    /// Support body, if bounded.
    pub fn support(&self) -> Option<&ConvexBody> {
        match &self.kind {
            DensityKind::UniformOnBody(b) => Some(b),
            DensityKind::GaussianTilted { base, .. } => base.support(),
            _ => None,
        }
    }

    pub fn in_support(&self, x: &[f64]) -> bool {
        self.support().is_none_or(|b| b.contains(x))
    }

    /// Log-density up to an additive constant; −∞ outside the support.
    pub fn log_density(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            DensityKind::Gaussian => -0.5 * norm_sq(x),
            DensityKind::ProductExponential => {
                -std::f64::consts::SQRT_2 * x.iter().map(|v| v.abs()).sum::<f64>()
            }
            DensityKind::UniformOnBody(b) => {
                if b.contains(x) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            DensityKind::GaussianTilted { base, c, t } => {
                let b = base.log_density(x);
                if b == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                b + dot(c, x) - 0.5 * t * norm_sq(x)
            }
        }
    }

    /// Whether `sample_one` can draw exactly (or by cheap rejection).
    pub fn has_exact_sampler(&self) -> bool {
        match &self.kind {
            DensityKind::Gaussian | DensityKind::ProductExponential => true,
            DensityKind::UniformOnBody(b) => match b.kind() {
                BodyKind::Ball { .. } | BodyKind::Cube { .. } => true,
                BodyKind::Cone { .. } => b.dim() <= 8,
            },
            DensityKind::GaussianTilted { .. } => false,
        }
    }

    /// One exact draw.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        match &self.kind {
            DensityKind::Gaussian => {
                Ok((0..self.dim).map(|_| rng.sample(StandardNormal)).collect())
            }
            DensityKind::ProductExponential => {
                Ok((0..self.dim).map(|_| sample_laplace(rng)).collect())
            }
            DensityKind::UniformOnBody(b) => sample_uniform_on_body(b, rng),
            DensityKind::GaussianTilted { .. } => Err(Error::NoSampler(
                "tilted densities are sampled by MCMC, not i.i.d.".into(),
            )),
        }
    }
}

/// Construct a density from its JSON-facing spec.
pub fn make_density(spec: &DensitySpec) -> Result<Density> {
    Density::from_spec(spec)
}

fn sample_laplace<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random::<f64>() - 0.5;
        let x = -LAPLACE_SCALE * u.signum() * (1.0 - 2.0 * u.abs()).ln();
        if x.is_finite() {
            return x;
        }
    }
}

/// Uniform point in the unit ball: Gaussian direction, radius U^{1/n}.
pub fn uniform_in_unit_ball<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = norm_sq(&g).sqrt();
        if nrm > 0.0 {
            let r = rng.random::<f64>().powf(1.0 / n as f64);
            return g.iter().map(|v| v * r / nrm).collect();
        }
    }
}

fn sample_uniform_on_body<R: Rng + ?Sized>(body: &ConvexBody, rng: &mut R) -> Result<Vec<f64>> {
    let n = body.dim();
    match body.kind() {
        BodyKind::Ball { radius } => Ok(uniform_in_unit_ball(n, rng)
            .iter()
            .map(|v| v * radius)
            .collect()),
        BodyKind::Cube { side } => {
            Ok((0..n).map(|_| (rng.random::<f64>() - 0.5) * side).collect())
        }
        BodyKind::Cone { .. } => {
            if n > 8 {
                return Err(Error::NoSampler(format!(
                    "rejection sampling on the cone is limited to n <= 8 (got n = {n})"
                )));
            }
            // rejection from the bounding cylinder [0, n] x B_{sqrt(n)}
            let nf = n as f64;
            let rmax = nf.sqrt();
            loop {
                let x1 = rng.random::<f64>() * nf;
                let mut x = vec![0.0; n];
                x[0] = x1;
                let lat = uniform_in_unit_ball(n - 1, rng);
                for i in 1..n {
                    x[i] = lat[i - 1] * rmax;
                }
                if body.contains(&x) {
                    return Ok(x);
                }
            }
        }
    }
}

/// Test set: halfspace {θᵀx ≥ b}, slab {lo ≤ θᵀx ≤ hi}, centered ball
/// {‖x‖² ≤ r²}, or the complement of one of these.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    Halfspace { theta: Vec<f64>, b: f64 },
    Slab { theta: Vec<f64>, lo: f64, hi: f64 },
    Ball { radius: f64 },
    Complement(Box<SetSpec>),
}

impl SetSpec {
    pub fn halfspace(theta: Vec<f64>, b: f64) -> Self {
        SetSpec::Halfspace { theta, b }
    }

    /// Halfspace {x_axis ≥ b} along a coordinate axis.
    pub fn axis_halfspace(n: usize, axis: usize, b: f64) -> Self {
        let mut theta = vec![0.0; n];
        theta[axis] = 1.0;
        SetSpec::Halfspace { theta, b }
    }

    pub fn complement(self) -> Self {
        SetSpec::Complement(Box::new(self))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            SetSpec::Halfspace { theta, b } => dot(theta, x) >= *b,
            SetSpec::Slab { theta, lo, hi } => {
                let v = dot(theta, x);
                *lo <= v && v <= *hi
            }
            SetSpec::Ball { radius } => norm_sq(x) <= radius * radius,
            SetSpec::Complement(inner) => !inner.contains(x),
        }
    }

    /// h-enlargement used by the Minkowski boundary surrogate.
    pub fn enlarged(&self, h: f64) -> Result<SetSpec> {
        if !(h > 0.0) {
            return Err(Error::invalid("h", "enlargement must be positive"));
        }
        match self {
            SetSpec::Halfspace { theta, b } => Ok(SetSpec::Halfspace {
                theta: theta.clone(),
                b: b - h,
            }),
            SetSpec::Slab { theta, lo, hi } => Ok(SetSpec::Slab {
                theta: theta.clone(),
                lo: lo - h,
                hi: hi + h,
            }),
            SetSpec::Ball { radius } => Ok(SetSpec::Ball { radius: radius + h }),
            SetSpec::Complement(_) => Err(Error::invalid(
                "set",
                "complement sets do not support h-enlargement",
            )),
        }
    }

    /// Short label for CSV columns.
    pub fn label(&self) -> String {
        match self {
            SetSpec::Halfspace { b, .. } => format!("half_{b}"),
            SetSpec::Slab { lo, hi, .. } => format!("slab_{lo}_{hi}"),
            SetSpec::Ball { radius } => format!("ball_{radius}"),
            SetSpec::Complement(inner) => format!("not_{}", inner.label()),
        }
    }
}

/// Result of [`mean_cov`]: weighted mean/covariance plus a degeneracy flag
/// (all weight on a single point yields the zero matrix, flagged).
#[derive(Debug, Clone)]
pub struct MeanCov {
    pub mean: Vec<f64>,
    pub cov: SymMatrix,
    pub degenerate: bool,
}

/// Weighted point cloud with log-space weights.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub points: Vec<Vec<f64>>,
    pub log_weights: Vec<f64>,
}

impl WeightedSample {
    /// Unit-weight sample.
    pub fn unit(points: Vec<Vec<f64>>) -> Self {
        let m = points.len();
        WeightedSample {
            points,
            log_weights: vec![0.0; m],
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    /// Normalized weights (max-subtraction in log space, so no underflow).
    pub fn normalized_weights(&self) -> Vec<f64> {
        let max = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return vec![0.0; self.log_weights.len()];
        }
        let raw: Vec<f64> = self.log_weights.iter().map(|&lw| (lw - max).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|&w| w / total).collect()
    }

    /// Effective sample size (Σw)²/Σw², computed on the max-shifted raw
    /// weights so a unit-weight sample reports exactly m.
    pub fn ess(&self) -> f64 {
        let max = self
            .log_weights
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &lw in &self.log_weights {
            let w = (lw - max).exp();
            s1 += w;
            s2 += w * w;
        }
        if s2 == 0.0 {
            0.0
        } else {
            s1 * s1 / s2
        }
    }
}

/// Weighted mean and covariance Σ wᵢ(xᵢ−μ)(xᵢ−μ)ᵀ.
pub fn mean_cov(sample: &WeightedSample) -> Result<MeanCov> {
    let m = sample.len();
    if m == 0 {
        return Err(Error::invalid("sample", "must contain at least one point"));
    }
    let n = sample.dim();
    let w = sample.normalized_weights();
    let positive = w.iter().filter(|&&v| v > 0.0).count();

    let mut mean = vec![0.0; n];
    for (p, &wi) in sample.points.iter().zip(&w) {
        for i in 0..n {
            mean[i] += wi * p[i];
        }
    }

    if positive <= 1 {
        return Ok(MeanCov {
            mean,
            cov: SymMatrix::zeros(n),
            degenerate: true,
        });
    }

    let mut cov = SymMatrix::zeros(n);
    let mut centered = vec![0.0; n];
    for (p, &wi) in sample.points.iter().zip(&w) {
        if wi == 0.0 {
            continue;
        }
        for i in 0..n {
            centered[i] = p[i] - mean[i];
        }
        for i in 0..n {
            for j in i..n {
                let v = cov.get(i, j) + wi * centered[i] * centered[j];
                cov.set_sym(i, j, v);
            }
        }
    }
    Ok(MeanCov {
        mean,
        cov,
        degenerate: false,
    })
}

/// Weighted probability of a set, in [0, 1]. A `Complement` set is computed
/// as 1 − measure(inner), so a set and its complement sum to 1 exactly.
pub fn set_measure(sample: &WeightedSample, set: &SetSpec) -> f64 {
    if let SetSpec::Complement(inner) = set {
        return 1.0 - set_measure(sample, inner);
    }
    let w = sample.normalized_weights();
    sample
        .points
        .iter()
        .zip(&w)
        .filter(|(p, _)| set.contains(p))
        .map(|(_, &wi)| wi)
        .sum()
}

/// Standard error of [`set_measure`] under the weighted estimator.
pub fn set_measure_stderr(sample: &WeightedSample, set: &SetSpec) -> f64 {
    let g = set_measure(sample, set);
    let w = sample.normalized_weights();
    sample
        .points
        .iter()
        .zip(&w)
        .map(|(p, &wi)| {
            let b = if set.contains(p) { 1.0 } else { 0.0 };
            wi * wi * (b - g) * (b - g)
        })
        .sum::<f64>()
        .sqrt()
}

/// One-sided Minkowski boundary surrogate [P(S_h) − P(S)]/h on a sample.
pub fn boundary_measure(sample: &WeightedSample, set: &SetSpec, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::invalid("h", "must be positive"));
    }
    let grown = set.enlarged(h)?;
    Ok((set_measure(sample, &grown) - set_measure(sample, set)) / h)
}

/// Default enlargement step: 1e−3 × (support diameter, or √n when the
/// support is unbounded).
pub fn default_boundary_h(density: &Density) -> f64 {
    let scale = density
        .support()
        .map(|b| b.diameter())
        .unwrap_or((density.dim() as f64).sqrt());
    1e-3 * scale
}

/// `count` i.i.d. draws with unit weights; deterministic given the RNG.
pub fn sample_iid<R: Rng + ?Sized>(
    density: &Density,
    count: usize,
    rng: &mut R,
) -> Result<WeightedSample> {
    if !density.has_exact_sampler() {
        return Err(Error::NoSampler(format!(
            "no exact sampler for this density kind in dimension {}",
            density.dim()
        )));
    }
    let points = (0..count)
        .map(|_| density.sample_one(rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedSample::unit(points))
}

/// Empirical whitening transform from a sample: x ↦ A^{−1/2}(x − μ).
#[derive(Debug, Clone)]
pub struct Whitening {
    pub mean: Vec<f64>,
    pub inv_sqrt_cov: SymMatrix,
}

impl Whitening {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        self.inv_sqrt_cov.matvec(&centered)
    }
}

/// Estimate covariance from the sample and return the A^{−1/2} map.
pub fn empirical_whitening(sample: &WeightedSample) -> Result<Whitening> {
    let mc = mean_cov(sample)?;
    if mc.degenerate {
        return Err(Error::Degenerate("whitening of a degenerate sample".into()));
    }
    let inv_sqrt_cov = mc.cov.power(-0.5)?;
    Ok(Whitening {
        mean: mc.mean,
        inv_sqrt_cov,
    })
}

/// CSV export with columns x_1..x_n,log_w.
pub fn write_sample_csv<W: Write>(sample: &WeightedSample, out: &mut W) -> Result<()> {
    let n = sample.dim();
    let header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    writeln!(out, "{},log_w", header.join(","))?;
    for (p, lw) in sample.points.iter().zip(&sample.log_weights) {
        let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{},{lw}", row.join(","))?;
    }
    Ok(())
}
