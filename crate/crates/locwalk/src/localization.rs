//! Particle simulation of the localization process
//!
//!   c₀ = 0,   dc_t = dW_t + μ_t dt,
//!   p_t(x) ∝ exp(c_tᵀx − (t/2)‖x‖²) p(x),
//!
//! discretized with Euler–Maruyama. The ensemble is drawn from the base
//! density once and reweighted; log-weights are recomputed from scratch at
//! every step from (c, t) and the last refresh anchor, never accumulated.
//! Three modes:
//!
//! - `ExactGaussian` (base = standard normal): μ_t = c_t/(1+t) and
//!   A_t = I/(1+t) in closed form; refresh resamples conjugately.
//! - `Reweight`: pure importance reweighting, no refresh mechanism.
//! - `McmcRefresh`: systematic resampling followed by ball-walk moves
//!   targeting the tilted density, used for body-supported bases.
//!
//! On top of the simulator sit statistical checks of the process: set
//! measures g_t = p_t(E) are martingales, log(1/g_t) stays in an explicit
//! band, and the quadratic variation of g_t obeys both the diameter bound
//! d\[g\]_t ≤ D²g²dt and the 30‖A_t‖·g²log²(1/g)dt bound.

use crate::ballwalk::{ball_walk_step, WalkState};
use crate::barrier::{psi, solve_u_default, BarrierParams};
use crate::bodies::{mean_cov, sample_iid, set_measure, Density, DensityKind, SetSpec, WeightedSample};
use crate::linalg::SymMatrix;
use crate::rng::{stream_rng, Rng as StreamRng};
use crate::util::{mean_stderr, norm_sq};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Ensemble maintenance strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocMode {
    ExactGaussian,
    Reweight,
    McmcRefresh,
}

/// SDE discretization parameters.
#[derive(Debug, Clone, Copy)]
pub struct SdeParams {
    pub dt: f64,
    pub t_max: f64,
    pub particles: usize,
    pub ess_floor: f64,
}

impl SdeParams {
    pub fn new(dt: f64, t_max: f64, particles: usize, ess_floor: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= t_max) {
            return Err(Error::invalid("dt", "must satisfy 0 < dt <= T"));
        }
        if particles < 2 {
            return Err(Error::invalid("particles", "must be >= 2"));
        }
        if !(ess_floor > 0.0 && ess_floor <= 1.0) {
            return Err(Error::invalid("ess_floor", "must lie in (0, 1]"));
        }
        Ok(SdeParams {
            dt,
            t_max,
            particles,
            ess_floor,
        })
    }

    pub fn steps(&self) -> usize {
        ((self.t_max / self.dt).round() as usize).max(1)
    }
}

/// Full simulator state: time, tilt, ensemble, cached moments.
#[derive(Debug, Clone)]
pub struct LocalizationState {
    pub t: f64,
    pub c: Vec<f64>,
    pub mode: LocMode,
    base: Density,
    /// Tilt/time of the last refresh; particles follow p_{anchor} and the
    /// weights carry only the tilt accumulated since.
    anchor_c: Vec<f64>,
    anchor_t: f64,
    /// Per-particle proposal correction (nonzero only for stratified
    /// initialization); cleared by refreshes.
    log_weight_offset: Vec<f64>,
    pub ensemble: WeightedSample,
    pub mu: Vec<f64>,
    pub cov: SymMatrix,
    pub ess: f64,
}

/// Log-weight of a particle under tilt (c, t) relative to anchor (c₀, t₀):
/// (c − c₀)ᵀx − ((t − t₀)/2)‖x‖². Kept as a free function so consistency
/// tests can recompute states bit-for-bit.
pub fn tilt_log_weight(c: &[f64], anchor_c: &[f64], t: f64, anchor_t: f64, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += (c[i] - anchor_c[i]) * x[i];
    }
    acc - 0.5 * (t - anchor_t) * norm_sq(x)
}

impl LocalizationState {
    fn recompute_weights(&mut self) -> Result<()> {
        let mut any_finite = false;
        for ((lw, x), &off) in self
            .ensemble
            .log_weights
            .iter_mut()
            .zip(&self.ensemble.points)
            .zip(&self.log_weight_offset)
        {
            *lw = off + tilt_log_weight(&self.c, &self.anchor_c, self.t, self.anchor_t, x);
            if lw.is_nan() {
                return Err(Error::Degenerate(format!(
                    "non-finite log-weight at t = {} (tilt |c| = {:e})",
                    self.t,
                    norm_sq(&self.c).sqrt()
                )));
            }
            any_finite |= lw.is_finite();
        }
        if !any_finite {
            return Err(Error::Degenerate(
                "all particle weights collapsed to -inf".into(),
            ));
        }
        Ok(())
    }

    fn refresh_moments(&mut self) -> Result<()> {
        match self.mode {
            LocMode::ExactGaussian => {
                let scale = 1.0 / (1.0 + self.t);
                self.mu = self.c.iter().map(|ci| ci * scale).collect();
                self.cov = SymMatrix::identity(self.c.len()).scale(scale);
            }
            _ => {
                let mc = mean_cov(&self.ensemble)?;
                if mc.degenerate {
                    return Err(Error::Degenerate(
                        "ensemble weight collapsed onto a single particle".into(),
                    ));
                }
                self.mu = mc.mean;
                // rounding may leave eigenvalues a hair below zero; anything
                // materially negative is a real failure
                self.cov = mc.cov.clamp_psd(0.0, -1e-10)?;
            }
        }
        self.ess = self.ensemble.ess();
        Ok(())
    }

    /// Measure of a set under the current weighted ensemble.
    pub fn measure(&self, set: &SetSpec) -> f64 {
        set_measure(&self.ensemble, set)
    }
}

/// Draw the initial ensemble at t = 0, c = 0.
pub fn init_localization<R: Rng + ?Sized>(
    base: &Density,
    m: usize,
    mode: LocMode,
    rng: &mut R,
) -> Result<LocalizationState> {
    if m < 2 {
        return Err(Error::invalid("particles", "must be >= 2"));
    }
    if mode == LocMode::ExactGaussian && !matches!(base.kind(), DensityKind::Gaussian) {
        return Err(Error::invalid(
            "mode",
            "exact_gaussian mode requires a standard normal base",
        ));
    }
    let ensemble = sample_iid(base, m, rng)?;
    let n = base.dim();
    let mut state = LocalizationState {
        t: 0.0,
        c: vec![0.0; n],
        mode,
        base: base.clone(),
        anchor_c: vec![0.0; n],
        anchor_t: 0.0,
        log_weight_offset: vec![0.0; m],
        ensemble,
        mu: vec![0.0; n],
        cov: SymMatrix::identity(n),
        ess: m as f64,
    };
    state.refresh_moments()?;
    Ok(state)
}

/// Initial ensemble with stratified oversampling of a small target set:
/// `frac·m` particles are drawn conditional on the set (by rejection) and
/// the rest from the base; log-weights carry the mixture correction
/// −log((1−frac) + frac·1_E(x)/ĝ₀) built from the pilot estimate ĝ₀ of the
/// set measure. Sharpens g_t resolution when g₀ is tiny.
pub fn init_localization_stratified<R: Rng + ?Sized>(
    base: &Density,
    m: usize,
    mode: LocMode,
    set: &SetSpec,
    frac: f64,
    g0_pilot: f64,
    rng: &mut R,
) -> Result<LocalizationState> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::invalid("frac", "oversampling fraction must lie in (0,1)"));
    }
    if !(g0_pilot > 0.0 && g0_pilot < 1.0) {
        return Err(Error::invalid("g0_pilot", "pilot measure must lie in (0,1)"));
    }
    let mut state = init_localization(base, m, mode, rng)?;
    let m_set = ((frac * m as f64).round() as usize).clamp(1, m - 1);
    // replace the first m_set particles with conditional draws
    let attempt_cap = (1000.0 * m_set as f64 / g0_pilot) as u64;
    let mut attempts = 0u64;
    for i in 0..m_set {
        loop {
            attempts += 1;
            if attempts > attempt_cap {
                return Err(Error::Degenerate(format!(
                    "conditional rejection sampling exhausted after {attempts} draws \
                     (pilot g0 = {g0_pilot:e})"
                )));
            }
            let x = base.sample_one(rng)?;
            if set.contains(&x) {
                state.ensemble.points[i] = x;
                break;
            }
        }
    }
    for (i, x) in state.ensemble.points.iter().enumerate() {
        let ind = if set.contains(x) { 1.0 } else { 0.0 };
        state.log_weight_offset[i] = -((1.0 - frac) + frac * ind / g0_pilot).ln();
    }
    state.recompute_weights()?;
    state.refresh_moments()?;
    Ok(state)
}

/// One Euler–Maruyama step: ΔW ∼ N(0, dt·I), c ← c + ΔW + μ_t·dt,
/// t ← t + dt, weights and moments recomputed from scratch.
pub fn localization_step<R: Rng + ?Sized>(
    state: &mut LocalizationState,
    dt: f64,
    rng: &mut R,
) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let n = state.c.len();
    let sqrt_dt = dt.sqrt();
    for i in 0..n {
        let dw: f64 = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        state.c[i] += dw + state.mu[i] * dt;
    }
    state.t += dt;
    state.recompute_weights()?;
    state.refresh_moments()
}

/// Systematic resampling by normalized weights; deterministic given rng.
fn systematic_resample<R: Rng + ?Sized>(
    sample: &WeightedSample,
    m: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let w = sample.normalized_weights();
    let start: f64 = rng.random::<f64>() / m as f64;
    let mut out = Vec::with_capacity(m);
    let mut cum = 0.0;
    let mut i = 0usize;
    for k in 0..m {
        let target = start + k as f64 / m as f64;
        while cum + w[i] < target && i + 1 < w.len() {
            cum += w[i];
            i += 1;
        }
        out.push(sample.points[i].clone());
    }
    out
}

/// Ball-walk moves per particle during an MCMC refresh.
const REFRESH_STEPS_PER_DIM: usize = 10;

/// Re-equilibrate the ensemble at the current (c, t): conjugate resampling
/// in exact-Gaussian mode, systematic resampling plus ball-walk moves on
/// the tilted density in MCMC mode. Unit weights and ess = m afterwards.
pub fn refresh_particles<R: Rng + ?Sized>(
    state: &mut LocalizationState,
    rng: &mut R,
) -> Result<()> {
    let m = state.ensemble.len();
    let n = state.c.len();
    match state.mode {
        LocMode::Reweight => {
            return Err(Error::invalid(
                "mode",
                "reweight mode has no refresh mechanism",
            ))
        }
        LocMode::ExactGaussian => {
            let scale = 1.0 / (1.0 + state.t);
            let sd = scale.sqrt();
            let mut points = Vec::with_capacity(m);
            for _ in 0..m {
                let p: Vec<f64> = (0..n)
                    .map(|i| state.c[i] * scale + sd * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                points.push(p);
            }
            state.ensemble = WeightedSample::unit(points);
        }
        LocMode::McmcRefresh => {
            let target = state.base.tilt(&state.c, state.t)?;
            let delta = 1.0 / (n as f64).sqrt();
            let steps = REFRESH_STEPS_PER_DIM * n;
            let mut points = systematic_resample(&state.ensemble, m, rng);
            for p in points.iter_mut() {
                let mut walk = WalkState::new(std::mem::take(p), &target)?;
                for _ in 0..steps {
                    ball_walk_step(&mut walk, &target, delta, rng)?;
                }
                *p = walk.x;
            }
            state.ensemble = WeightedSample::unit(points);
        }
    }
    state.anchor_c = state.c.clone();
    state.anchor_t = state.t;
    // resampling already consumed the weights, corrections included
    state.log_weight_offset = vec![0.0; m];
    state.refresh_moments()
}

/// Per-step record from [`run_localization`].
#[derive(Debug, Clone)]
pub struct LocRow {
    pub step: usize,
    pub t: f64,
    pub opnorm_a: f64,
    pub u: f64,
    pub psi: f64,
    pub ess: f64,
    pub g: Vec<f64>,
}

/// Measures of one tracked set along a path.
#[derive(Debug, Clone)]
pub struct SetTrace {
    pub set: SetSpec,
    pub series: Vec<(f64, f64)>,
}

/// Split localization rows into one (t, g_t) trace per tracked set.
pub fn set_traces(rows: &[LocRow], sets: &[SetSpec]) -> Vec<SetTrace> {
    sets.iter()
        .enumerate()
        .map(|(i, s)| SetTrace {
            set: s.clone(),
            series: rows.iter().map(|r| (r.t, r.g[i])).collect(),
        })
        .collect()
}

/// Run one path to the horizon, recording ‖A_t‖_op, the barrier value
/// u(A_t), Ψ(u), ess, and the measure of each tracked set per step.
/// Refresh triggers when ess < ess_floor·m (except in reweight mode).
pub fn run_localization<R: Rng + ?Sized>(
    base: &Density,
    params: &SdeParams,
    mode: LocMode,
    test_sets: &[SetSpec],
    barrier: BarrierParams,
    rng: &mut R,
) -> Result<Vec<LocRow>> {
    let mut state = init_localization(base, params.particles, mode, rng)?;
    let mut rows = Vec::with_capacity(params.steps() + 1);
    let record = |state: &LocalizationState, step: usize| -> Result<LocRow> {
        let bv = solve_u_default(&state.cov, barrier.q, barrier.phi)?;
        Ok(LocRow {
            step,
            t: state.t,
            opnorm_a: state.cov.op_norm(),
            u: bv.u,
            psi: psi(bv.u)?,
            ess: state.ess,
            g: test_sets.iter().map(|s| state.measure(s)).collect(),
        })
    };
    rows.push(record(&state, 0)?);
    for step in 1..=params.steps() {
        localization_step(&mut state, params.dt, rng)?;
        if mode != LocMode::Reweight && state.ess < params.ess_floor * params.particles as f64 {
            refresh_particles(&mut state, rng)?;
        }
        rows.push(record(&state, step)?);
    }
    Ok(rows)
}

/// Minimal path simulation for the statistical checks: per-step set
/// measures, optional operator norms, and refresh markers.
struct PathTrace {
    g: Vec<f64>,
    opnorm: Vec<f64>,
    refreshed: Vec<bool>,
}

fn simulate_path(
    base: &Density,
    params: &SdeParams,
    mode: LocMode,
    set: &SetSpec,
    track_opnorm: bool,
    stratify: Option<(f64, f64)>,
    rng: &mut StreamRng,
) -> Result<PathTrace> {
    let mut state = match stratify {
        Some((frac, g0_pilot)) => {
            init_localization_stratified(base, params.particles, mode, set, frac, g0_pilot, rng)?
        }
        None => init_localization(base, params.particles, mode, rng)?,
    };
    let steps = params.steps();
    let mut g = Vec::with_capacity(steps + 1);
    let mut opnorm = Vec::with_capacity(if track_opnorm { steps + 1 } else { 0 });
    let mut refreshed = Vec::with_capacity(steps + 1);
    g.push(state.measure(set));
    refreshed.push(false);
    if track_opnorm {
        opnorm.push(state.cov.op_norm());
    }
    for _ in 0..steps {
        localization_step(&mut state, params.dt, rng)?;
        let mut did_refresh = false;
        if mode != LocMode::Reweight && state.ess < params.ess_floor * params.particles as f64 {
            refresh_particles(&mut state, rng)?;
            did_refresh = true;
        }
        g.push(state.measure(set));
        refreshed.push(did_refresh);
        if track_opnorm {
            opnorm.push(state.cov.op_norm());
        }
    }
    Ok(PathTrace {
        g,
        opnorm,
        refreshed,
    })
}

/// Result of [`martingale_check`].
#[derive(Debug, Clone, Copy)]
pub struct MartingaleCheck {
    pub mean_g_t: f64,
    pub stderr: f64,
    pub g0: f64,
    pub pass: bool,
}

/// E\[g_T\] = g₀ test over independent paths: the paired statistic
/// mean(g_T − g₀) must sit within 4 standard errors of zero.
pub fn martingale_check(
    base: &Density,
    set: &SetSpec,
    params: &SdeParams,
    mode: LocMode,
    runs: usize,
    seed: u64,
) -> Result<MartingaleCheck> {
    if runs < 30 {
        return Err(Error::invalid("runs", "martingale check needs >= 30 runs"));
    }
    let results: Vec<Result<(f64, f64)>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let trace = simulate_path(base, params, mode, set, false, None, &mut rng)?;
            Ok((*trace.g.first().unwrap(), *trace.g.last().unwrap()))
        })
        .collect();
    let mut g0s = Vec::with_capacity(runs);
    let mut gts = Vec::with_capacity(runs);
    for r in results {
        let (g0, gt) = r?;
        g0s.push(g0);
        gts.push(gt);
    }
    let diffs: Vec<f64> = gts.iter().zip(&g0s).map(|(a, b)| a - b).collect();
    let (mean_diff, se) = mean_stderr(&diffs);
    let mean_g_t = gts.iter().sum::<f64>() / runs as f64;
    let g0 = g0s.iter().sum::<f64>() / runs as f64;
    Ok(MartingaleCheck {
        mean_g_t,
        stderr: se,
        g0,
        pass: mean_diff.abs() <= 4.0 * se,
    })
}

/// Result of [`band_check`].
#[derive(Debug, Clone, Copy)]
pub struct BandCheck {
    pub exit_fraction: f64,
    pub bound: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// Fraction of paths for which log(1/g_t) leaves the band
/// [log(1/g₀) − γ, log(1/g₀) + D²t/2 + γ] before the horizon, compared
/// against 4·exp(−γ²/(2TD²)).
pub fn band_check(
    base: &Density,
    set: &SetSpec,
    params: &SdeParams,
    mode: LocMode,
    gamma: f64,
    runs: usize,
    seed: u64,
) -> Result<BandCheck> {
    if gamma < 0.0 {
        return Err(Error::invalid("gamma", "must be nonnegative"));
    }
    let d = base
        .support()
        .map(|b| b.diameter())
        .ok_or_else(|| Error::invalid("base", "band check requires bounded support"))?;
    let exits: Vec<Result<bool>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let trace = simulate_path(base, params, mode, set, false, None, &mut rng)?;
            let l0 = -(trace.g[0].max(1e-300)).ln();
            let exited = trace.g.iter().enumerate().any(|(k, &gk)| {
                let lk = -(gk.max(1e-300)).ln();
                let t = k as f64 * params.dt;
                lk > l0 + 0.5 * d * d * t + gamma || lk < l0 - gamma
            });
            Ok(exited)
        })
        .collect();
    let mut count = 0usize;
    for e in exits {
        if e? {
            count += 1;
        }
    }
    let fraction = count as f64 / runs as f64;
    let bound = 4.0 * (-gamma * gamma / (2.0 * params.t_max * d * d)).exp();
    let stderr = (fraction * (1.0 - fraction) / runs as f64).sqrt();
    Ok(BandCheck {
        exit_fraction: fraction,
        bound,
        stderr,
        pass: fraction <= bound + 4.0 * stderr,
    })
}

/// One side of the quadratic-variation comparison.
#[derive(Debug, Clone, Copy)]
pub struct QvSide {
    pub mean: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Result of [`qv_check`].
#[derive(Debug, Clone)]
pub struct QvCheck {
    /// Mean (Δg)²/(g²dt) against D²; `None` (with reason) when the base has
    /// unbounded support.
    pub diameter_side: std::result::Result<QvSide, String>,
    /// Mean (Δg)²/(g² log²(1/g) dt) against 30·max‖A_t‖_op.
    pub opnorm_side: QvSide,
    /// Increments skipped because g hit 0/1 or a refresh broke continuity.
    pub skipped: u64,
}

/// Empirical quadratic-variation ratios of g_t over independent paths.
pub fn qv_check(
    base: &Density,
    set: &SetSpec,
    params: &SdeParams,
    mode: LocMode,
    runs: usize,
    seed: u64,
) -> Result<QvCheck> {
    if runs < 2 {
        return Err(Error::invalid("runs", "need >= 2 runs"));
    }
    let diameter = base.support().map(|b| b.diameter());
    let per_run: Vec<Result<(f64, f64, f64, u64)>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let trace = simulate_path(base, params, mode, set, true, None, &mut rng)?;
            let mut q_d = Vec::new();
            let mut q_a = Vec::new();
            let mut max_op = 0.0f64;
            let mut skipped = 0u64;
            for k in 0..trace.g.len() - 1 {
                max_op = max_op.max(trace.opnorm[k]);
                // a refresh between k and k+1 injects resampling noise that
                // is not SDE quadratic variation
                if trace.refreshed[k + 1] {
                    skipped += 1;
                    continue;
                }
                let gk = trace.g[k];
                if gk <= 1e-12 || gk >= 1.0 - 1e-12 {
                    skipped += 1;
                    continue;
                }
                let dg = trace.g[k + 1] - gk;
                let log_g = (1.0 / gk).ln();
                q_d.push(dg * dg / (gk * gk * params.dt));
                if log_g > 1e-9 {
                    q_a.push(dg * dg / (gk * gk * log_g * log_g * params.dt));
                } else {
                    skipped += 1;
                }
            }
            let mean_d = if q_d.is_empty() {
                0.0
            } else {
                q_d.iter().sum::<f64>() / q_d.len() as f64
            };
            let mean_a = if q_a.is_empty() {
                0.0
            } else {
                q_a.iter().sum::<f64>() / q_a.len() as f64
            };
            Ok((mean_d, mean_a, max_op, skipped))
        })
        .collect();

    let mut d_means = Vec::with_capacity(runs);
    let mut a_means = Vec::with_capacity(runs);
    let mut max_op = 0.0f64;
    let mut skipped = 0u64;
    for r in per_run {
        let (md, ma, mo, sk) = r?;
        d_means.push(md);
        a_means.push(ma);
        max_op = max_op.max(mo);
        skipped += sk;
    }
    let (mean_d, se_d) = mean_stderr(&d_means);
    let (mean_a, se_a) = mean_stderr(&a_means);
    let a_bound = 30.0 * max_op;
    let opnorm_side = QvSide {
        mean: mean_a,
        stderr: se_a,
        bound: a_bound,
        pass: mean_a <= a_bound + 4.0 * se_a,
    };
    let diameter_side = match diameter {
        Some(d) => Ok(QvSide {
            mean: mean_d,
            stderr: se_d,
            bound: d * d,
            pass: mean_d <= d * d + 4.0 * se_d,
        }),
        None => Err("diameter bound skipped: base has unbounded support".to_string()),
    };
    Ok(QvCheck {
        diameter_side,
        opnorm_side,
        skipped,
    })
}

/// Result of [`gsqrt_check`].
#[derive(Debug, Clone, Copy)]
pub struct GsqrtCheck {
    /// E[g_T √log(1/g_T) · 1(g_T ≤ ½)] over paths.
    pub value: f64,
    /// Per-path reference E[g₀ √log(1/g₀) · 1(g₀ ≤ ½)].
    pub reference: f64,
    pub ratio: f64,
    /// Soft check ratio ≥ 0.2 (logged by callers, never fatal).
    pub soft_pass: bool,
}

fn g_sqrt_log(g: f64) -> f64 {
    if g <= 0.0 || g > 0.5 {
        0.0
    } else {
        g * (1.0 / g).ln().sqrt()
    }
}

/// Persistence of g√log(1/g) for small initial sets: reports the ratio of
/// E[g_T √log(1/g_T) 1(g_T ≤ ½)] to its t = 0 value. The 0.2 floor is a
/// soft check only.
pub fn gsqrt_check(
    base: &Density,
    set: &SetSpec,
    params: &SdeParams,
    mode: LocMode,
    runs: usize,
    seed: u64,
    stratify_frac: Option<f64>,
) -> Result<GsqrtCheck> {
    if base.support().is_none() {
        return Err(Error::invalid("base", "gsqrt check requires bounded support"));
    }
    // pilot estimate of g0 enforces the small-set precondition and feeds
    // the optional stratified oversampling of the set region
    let pilot = sample_iid(base, 20_000, &mut stream_rng(seed, u64::MAX))?;
    let g0_pilot = set_measure(&pilot, set);
    if g0_pilot > 0.05 {
        return Err(Error::invalid(
            "set",
            format!("initial measure {g0_pilot:.4} exceeds the 0.05 precondition"),
        ));
    }
    let stratify = stratify_frac.map(|frac| (frac, g0_pilot));
    let results: Vec<Result<(f64, f64)>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let trace = simulate_path(base, params, mode, set, false, stratify, &mut rng)?;
            Ok((
                g_sqrt_log(*trace.g.first().unwrap()),
                g_sqrt_log(*trace.g.last().unwrap()),
            ))
        })
        .collect();
    let mut v0 = 0.0;
    let mut vt = 0.0;
    for r in results {
        let (a, b) = r?;
        v0 += a;
        vt += b;
    }
    let reference = v0 / runs as f64;
    let value = vt / runs as f64;
    let ratio = if reference > 0.0 { value / reference } else { f64::NAN };
    Ok(GsqrtCheck {
        value,
        reference,
        ratio,
        soft_pass: ratio >= 0.2,
    })
}

/// Ensemble estimators built on the solved barrier at A_t.
#[derive(Debug, Clone)]
pub struct AlphaKappa {
    pub alpha: Vec<f64>,
    pub kappa: f64,
    pub u: f64,
    /// ‖α‖₂ / u^{3/2}, the scale-free diffusion-coefficient diagnostic.
    pub ratio: f64,
}

/// Estimate κ = tr((uI−A_t)^{−(q+1)}) and
/// α = (1/κ)·E[x̃ᵀ(uI−A_t)^{−(q+1)}x̃ · x̃] on the centered ensemble.
pub fn alpha_kappa_estimate(
    state: &LocalizationState,
    q: u32,
    phi: f64,
) -> Result<AlphaKappa> {
    let bv = solve_u_default(&state.cov, q, phi)?;
    let eig = state.cov.eigh();
    let lmax = *eig.values.last().unwrap();
    if bv.u <= lmax {
        return Err(Error::Degenerate(format!(
            "barrier u = {} does not clear lambda_max = {lmax}",
            bv.u
        )));
    }
    let qi = q as i32;
    let kappa: f64 = eig.values.iter().map(|&l| (bv.u - l).powi(-(qi + 1))).sum();
    let resolvent: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| (bv.u - l).powi(-(qi + 1)))
        .collect();
    let m_mat = eig.recompose(&resolvent);

    let n = state.mu.len();
    let w = state.ensemble.normalized_weights();
    let mut alpha = vec![0.0; n];
    let mut centered = vec![0.0; n];
    for (x, &wi) in state.ensemble.points.iter().zip(&w) {
        if wi == 0.0 {
            continue;
        }
        for i in 0..n {
            centered[i] = x[i] - state.mu[i];
        }
        let quad = m_mat.quad_form(&centered);
        for i in 0..n {
            alpha[i] += wi * quad * centered[i];
        }
    }
    for a in alpha.iter_mut() {
        *a /= kappa;
    }
    let ratio = norm_sq(&alpha).sqrt() / bv.u.powf(1.5);
    Ok(AlphaKappa {
        alpha,
        kappa,
        u: bv.u,
        ratio,
    })
}
