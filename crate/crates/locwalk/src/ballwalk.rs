//! Ball walk with a Metropolis filter.
//!
//! One step from x proposes y = x + δu with u uniform in the unit ball and
//! accepts with probability min(1, p(y)/p(x)), rejecting automatically when
//! y leaves the support. For uniform-on-body targets this reduces to the
//! plain membership filter. A step is *proper* when the point actually
//! moves. Chains never share RNG state: each one owns a stream derived
//! from (seed, chain index), so multi-chain experiments are reproducible
//! regardless of scheduling.

use crate::bodies::{uniform_in_unit_ball, BodyKind, ConvexBody, Density};
use crate::rng::stream_rng;
use crate::util::{mean_stderr, norm_sq};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

/// Current point plus step accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    pub x: Vec<f64>,
    pub proper_steps: u64,
    pub total_steps: u64,
}

impl WalkState {
    pub fn new(x: Vec<f64>, target: &Density) -> Result<Self> {
        if !target.in_support(&x) || target.log_density(&x) == f64::NEG_INFINITY {
            return Err(Error::Degenerate(
                "walk state lies outside the target support".into(),
            ));
        }
        Ok(WalkState {
            x,
            proper_steps: 0,
            total_steps: 0,
        })
    }
}

/// Chain parameters: step radius δ, step budget, and recording stride.
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    pub delta: f64,
    pub max_steps: u64,
    pub thin: u64,
}

impl WalkParams {
    pub fn new(delta: f64, max_steps: u64, thin: u64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::invalid("delta", "step radius must be positive"));
        }
        if max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be positive"));
        }
        Ok(WalkParams {
            delta,
            max_steps,
            thin: thin.max(1),
        })
    }
}

/// Metropolis decision for a proposed move x → y. Ratios ≥ 1 are accepted
/// without consuming randomness.
pub(crate) fn metropolis_accept<R: Rng + ?Sized>(
    target: &Density,
    x: &[f64],
    y: &[f64],
    rng: &mut R,
) -> bool {
    let ly = target.log_density(y);
    if ly == f64::NEG_INFINITY {
        return false;
    }
    let log_ratio = ly - target.log_density(x);
    if log_ratio >= 0.0 {
        return true;
    }
    rng.random::<f64>().ln() < log_ratio
}

/// One ball-walk step; returns whether the step was proper (point moved).
/// Rejection leaves `state.x` bit-identical; counters always advance.
///
/// ```
/// use locwalk::ballwalk::{ball_walk_step, WalkState};
/// use locwalk::bodies::{ConvexBody, Density};
/// use locwalk::rng::stream_rng;
///
/// let target = Density::uniform_on_body(ConvexBody::ball(3, 1.0).unwrap());
/// let mut state = WalkState::new(vec![0.0; 3], &target).unwrap();
/// let mut rng = stream_rng(0, 0);
/// // a 0.5-ball around the center stays inside the unit ball
/// assert!(ball_walk_step(&mut state, &target, 0.5, &mut rng).unwrap());
/// assert_eq!(state.proper_steps, 1);
/// ```
pub fn ball_walk_step<R: Rng + ?Sized>(
    state: &mut WalkState,
    target: &Density,
    delta: f64,
    rng: &mut R,
) -> Result<bool> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "step radius must be positive"));
    }
    if !target.in_support(&state.x) {
        return Err(Error::Degenerate(
            "walk state outside target support (corrupted state)".into(),
        ));
    }
    let n = state.x.len();
    let u = uniform_in_unit_ball(n, rng);
    let y: Vec<f64> = state
        .x
        .iter()
        .zip(&u)
        .map(|(xi, ui)| xi + delta * ui)
        .collect();
    let accept = metropolis_accept(target, &state.x, &y, rng);
    state.total_steps += 1;
    if accept {
        state.x = y;
        state.proper_steps += 1;
    }
    Ok(accept)
}

/// Monte Carlo local conductance ℓ(x) = vol(body ∩ (x + δB)) / vol(δB):
/// fraction of `m` uniform δ-ball probes landing in the body, with its
/// binomial standard error √(ℓ(1−ℓ)/m).
pub fn local_conductance<R: Rng + ?Sized>(
    body: &ConvexBody,
    x: &[f64],
    delta: f64,
    m: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::invalid("m", "need at least one probe"));
    }
    let n = body.dim();
    let mut hits = 0usize;
    let mut probe = vec![0.0; n];
    for _ in 0..m {
        let u = uniform_in_unit_ball(n, rng);
        for i in 0..n {
            probe[i] = x[i] + delta * u[i];
        }
        if body.contains(&probe) {
            hits += 1;
        }
    }
    let ell = hits as f64 / m as f64;
    Ok((ell, (ell * (1.0 - ell) / m as f64).sqrt()))
}

/// Scalar observable recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observer {
    /// A single coordinate.
    Coordinate(usize),
    /// Euclidean norm ‖x‖.
    Norm,
}

impl Observer {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Observer::Coordinate(i) => x[*i],
            Observer::Norm => norm_sq(x).sqrt(),
        }
    }
}

/// Trajectory summary from [`run_chain`].
#[derive(Debug, Clone)]
pub struct ChainSummary {
    pub proper_steps: u64,
    pub total_steps: u64,
    /// Positions recorded every `thin` steps (after the step).
    pub thinned: Vec<Vec<f64>>,
    /// One series per observer, sampled on the same stride.
    pub series: Vec<Vec<f64>>,
}

/// Run a single chain for `params.max_steps` steps.
pub fn run_chain<R: Rng + ?Sized>(
    target: &Density,
    x0: Vec<f64>,
    params: &WalkParams,
    observers: &[Observer],
    rng: &mut R,
) -> Result<ChainSummary> {
    let mut state = WalkState::new(x0, target)?;
    let mut thinned = Vec::new();
    let mut series = vec![Vec::new(); observers.len()];
    for step in 1..=params.max_steps {
        ball_walk_step(&mut state, target, params.delta, rng)?;
        if step % params.thin == 0 {
            thinned.push(state.x.clone());
            for (obs, out) in observers.iter().zip(series.iter_mut()) {
                out.push(obs.eval(&state.x));
            }
        }
    }
    Ok(ChainSummary {
        proper_steps: state.proper_steps,
        total_steps: state.total_steps,
        thinned,
        series,
    })
}

/// Per-chain outcome of the truncated-cone mixing experiment.
#[derive(Debug, Clone, Copy)]
pub struct ConeChainResult {
    pub chain_id: usize,
    pub proper_steps: u64,
    pub total_steps: u64,
    pub censored: bool,
}

/// Start height of the mixing experiment: t₀ = n − √(D² − n).
pub fn cone_start_height(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    nf - (d * d - nf).sqrt()
}

/// Mixing experiment on the truncated cone: each chain starts uniform on
/// the slab K_D ∩ {t₀ ≤ x₁ ≤ t₀+1} and walks until x₁ ≥ n − 1 (within
/// distance 1 of the base) or the step cap. Step cap defaults to 50·n²·D
/// total steps, with censoring flagged. Chains run in parallel on streams
/// (seed, chain index) and are reported in chain order.
pub fn cone_mixing_experiment(
    n: usize,
    d: f64,
    delta: Option<f64>,
    chains: usize,
    seed: u64,
    step_cap: Option<u64>,
) -> Result<Vec<ConeChainResult>> {
    if n < 16 {
        return Err(Error::invalid("n", "mixing experiment requires n >= 16"));
    }
    if !ConvexBody::cone_params_standard(n, d) {
        return Err(Error::invalid(
            "d",
            format!("must satisfy 2*sqrt(n) <= D <= n/2 (n = {n})"),
        ));
    }
    if chains == 0 {
        return Err(Error::invalid("chains", "need at least one chain"));
    }
    let nf = n as f64;
    let delta = delta.unwrap_or(1.0 / nf.sqrt());
    let cap = step_cap.unwrap_or((50.0 * nf * nf * d) as u64);
    let results: Vec<ConeChainResult> = (0..chains)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let (proper, total, censored) = cone_mixing_run(n, d, delta, cap, &mut rng);
            ConeChainResult {
                chain_id: i,
                proper_steps: proper,
                total_steps: total,
                censored,
            }
        })
        .collect();
    Ok(results)
}

/// Single-chain runner; only needs D² > n so edge cases outside the public
/// parameter range stay testable.
pub(crate) fn cone_mixing_run<R: Rng + ?Sized>(
    n: usize,
    d: f64,
    delta: f64,
    step_cap: u64,
    rng: &mut R,
) -> (u64, u64, bool) {
    let nf = n as f64;
    assert!(d * d > nf, "start height requires D^2 > n");
    let body = ConvexBody::cone(n, d).expect("validated cone parameters");
    let target = Density::uniform_on_body(body.clone());
    let t0 = cone_start_height(n, d);
    let hi = (t0 + 1.0).min(nf);

    // rejection from the bounding cylinder of the slab
    let rmax = hi / nf.sqrt();
    let x0 = loop {
        let x1 = t0 + rng.random::<f64>() * (hi - t0);
        let lat = uniform_in_unit_ball(n - 1, rng);
        let mut x = vec![0.0; n];
        x[0] = x1;
        for i in 1..n {
            x[i] = lat[i - 1] * rmax;
        }
        if body.contains(&x) {
            break x;
        }
    };

    let goal = nf - 1.0;
    let mut state = WalkState::new(x0, &target).expect("start sampled inside the body");
    let mut censored = false;
    while state.x[0] < goal {
        if state.total_steps >= step_cap {
            censored = true;
            break;
        }
        ball_walk_step(&mut state, &target, delta, rng).expect("state stays in support");
    }
    (state.proper_steps, state.total_steps, censored)
}

/// Drift estimate along e₁ from points uniform on the slice {x₁ = slice_t}:
/// the average of (x₁′ − x₁) over `m` proper steps, with standard error.
#[derive(Debug, Clone, Copy)]
pub struct DriftEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub proper: u64,
    pub total: u64,
}

fn slice_radius(body: &ConvexBody, t: f64) -> Result<f64> {
    let n = body.dim() as f64;
    match body.kind() {
        BodyKind::Cone { d } => {
            if !(t > 0.0 && t < n) {
                return Err(Error::invalid("slice_t", "slice outside the cone height"));
            }
            let ball = d * d - (t - n) * (t - n);
            if ball <= 0.0 {
                return Err(Error::invalid(
                    "slice_t",
                    "slice outside the truncation ball",
                ));
            }
            Ok((t / n.sqrt()).min(ball.sqrt()))
        }
        BodyKind::Ball { radius } => {
            if t.abs() >= *radius {
                return Err(Error::invalid("slice_t", "slice outside the ball"));
            }
            Ok((radius * radius - t * t).sqrt())
        }
        BodyKind::Cube { .. } => Err(Error::invalid(
            "body",
            "cube slices are sampled per-coordinate, not radially",
        )),
    }
}

fn sample_on_slice<R: Rng + ?Sized>(body: &ConvexBody, t: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = body.dim();
    match body.kind() {
        BodyKind::Cube { side } => {
            let half = 0.5 * side;
            if t.abs() > half {
                return Err(Error::invalid("slice_t", "slice outside the cube"));
            }
            let mut x = vec![0.0; n];
            x[0] = t;
            for xi in x.iter_mut().skip(1) {
                *xi = (rng.random::<f64>() - 0.5) * side;
            }
            Ok(x)
        }
        _ => {
            let r = slice_radius(body, t)?;
            let lat = uniform_in_unit_ball(n - 1, rng);
            let mut x = vec![0.0; n];
            x[0] = t;
            for i in 1..n {
                x[i] = lat[i - 1] * r;
            }
            Ok(x)
        }
    }
}

/// Mean signed x₁ displacement per proper step, started fresh each trial
/// from a uniform point on the slice.
pub fn drift_estimate<R: Rng + ?Sized>(
    body: &ConvexBody,
    delta: f64,
    slice_t: f64,
    m: usize,
    rng: &mut R,
) -> Result<DriftEstimate> {
    if m == 0 {
        return Err(Error::invalid("m", "need at least one proper step"));
    }
    let target = Density::uniform_on_body(body.clone());
    let mut displacements = Vec::with_capacity(m);
    let mut total = 0u64;
    let attempt_cap = (m as u64) * 1000;
    while displacements.len() < m {
        if total >= attempt_cap {
            return Err(Error::Degenerate(format!(
                "proper steps too rare on this slice ({}/{m} after {total} attempts)",
                displacements.len()
            )));
        }
        let x0 = sample_on_slice(body, slice_t, rng)?;
        let mut state = WalkState::new(x0, &target)?;
        total += 1;
        if ball_walk_step(&mut state, &target, delta, rng)? {
            displacements.push(state.x[0] - slice_t);
        }
    }
    let (mean, stderr) = mean_stderr(&displacements);
    Ok(DriftEstimate {
        mean,
        stderr,
        proper: m as u64,
        total,
    })
}
