//! Experiment dispatch: configuration in, CSV + summary out.
//!
//! Every experiment derives its randomness from (seed, stream index) and
//! reduces in index order, so output bytes depend only on the config.
//! `LOCWALK_THREADS` caps the rayon pool used for the run.

use crate::ballwalk::cone_mixing_experiment;
use crate::barrier::{d2u, du, psi, solve_u_default, tensor_shift_gap, BarrierParams, DEFAULT_TOL};
use crate::bodies::{ConvexBody, Density, SetSpec};
use crate::config::{BaseKind, ExperimentConfig, ExperimentKind};
use crate::isoperimetry::{
    concentration_experiment, cone_slab_profile, gaussian_interval_profile,
    small_ball_experiment, GKind, SmallBallMode,
};
use crate::linalg::{conjugate, random_orthogonal, SymMatrix};
use crate::localization::{run_localization, LocMode, SdeParams};
use crate::report::{csv_row, fmt_f64, ExperimentReport};
use crate::rng::stream_rng;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::time::Instant;

/// One row of the barrier check suite.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub test: &'static str,
    pub instance_id: usize,
    pub metric: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn random_spectrum_instance(n: usize, rng: &mut crate::rng::Rng) -> SymMatrix {
    let vals: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.9)).collect();
    let q = random_orthogonal(n, rng);
    conjugate(&SymMatrix::diag(&vals), &q)
}

fn random_sym(n: usize, rng: &mut crate::rng::Rng) -> SymMatrix {
    let mut h = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            h.set_sym(i, j, rng.random_range(-1.0..1.0));
        }
    }
    h
}

/// Finite-difference and inequality suite behind `barrier check` and the
/// acceptance gate: first/second directional derivatives against central
/// differences of the solver, the du(X,I)=1 / d2u(X,I,I)=0 identities,
/// translation covariance, the Ψ anchor, and 100 tensor-shift instances.
pub fn barrier_check_suite(n: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let phi = n as f64;
    let eps1 = 1e-5;
    let eps2 = 1e-4;

    for q in 1..=3u32 {
        let mut rng = stream_rng(seed, q as u64);
        for inst in 0..20 {
            let x = random_spectrum_instance(n, &mut rng);
            let h = random_sym(n, &mut rng);
            let id = SymMatrix::identity(n);

            // first derivative vs central difference
            let analytic = du(&x, q, phi, &h)?;
            let up = solve_u_default(&x.add(&h.scale(eps1)), q, phi)?.u;
            let dn = solve_u_default(&x.add(&h.scale(-eps1)), q, phi)?.u;
            let fd = (up - dn) / (2.0 * eps1);
            let rel = ((analytic - fd) / fd.abs().max(1e-8)).abs();
            rows.push(CheckRow {
                test: "du_fd",
                instance_id: (q as usize - 1) * 20 + inst,
                metric: "rel_err",
                value: rel,
                threshold: 1e-5,
                pass: rel <= 1e-5,
            });

            // second derivative along h vs second central difference
            let analytic2 = d2u(&x, q, phi, &h, &h)?;
            let upp = solve_u_default(&x.add(&h.scale(eps2)), q, phi)?.u;
            let mid = solve_u_default(&x, q, phi)?.u;
            let dnn = solve_u_default(&x.add(&h.scale(-eps2)), q, phi)?.u;
            let fd2 = (upp - 2.0 * mid + dnn) / (eps2 * eps2);
            let rel2 = ((analytic2 - fd2) / fd2.abs().max(1e-6)).abs();
            rows.push(CheckRow {
                test: "d2u_fd",
                instance_id: (q as usize - 1) * 20 + inst,
                metric: "rel_err",
                value: rel2,
                threshold: 1e-4,
                pass: rel2 <= 1e-4,
            });

            // identities
            let e1 = (du(&x, q, phi, &id)? - 1.0).abs();
            rows.push(CheckRow {
                test: "du_identity",
                instance_id: (q as usize - 1) * 20 + inst,
                metric: "abs_err",
                value: e1,
                threshold: 1e-10,
                pass: e1 <= 1e-10,
            });
            let e2 = d2u(&x, q, phi, &id, &id)?.abs();
            rows.push(CheckRow {
                test: "d2u_identity",
                instance_id: (q as usize - 1) * 20 + inst,
                metric: "abs_err",
                value: e2,
                threshold: 1e-10,
                pass: e2 <= 1e-10,
            });

            // translation covariance u(X + sI) = u(X) + s
            let s: f64 = rng.random_range(-0.5..2.0);
            let u0 = solve_u_default(&x, q, phi)?.u;
            let us = solve_u_default(&x.shift(s), q, phi)?.u;
            let e3 = (us - (u0 + s)).abs();
            rows.push(CheckRow {
                test: "translation",
                instance_id: (q as usize - 1) * 20 + inst,
                metric: "abs_err",
                value: e3,
                threshold: 1e-10,
                pass: e3 <= 1e-10,
            });
        }
    }

    // Ψ(3/2) = −4/25 exactly
    let anchor = psi(1.5)? + 4.0 / 25.0;
    rows.push(CheckRow {
        test: "psi_anchor",
        instance_id: 0,
        metric: "abs_err",
        value: anchor.abs(),
        threshold: 0.0,
        pass: anchor == 0.0,
    });

    // tensor-shift inequality on 100 random instances
    let mut rng = stream_rng(seed, 1000);
    for inst in 0..100 {
        let vals: Vec<f64> = (0..5).map(|_| rng.random_range(0.05..3.0)).collect();
        let qrot = random_orthogonal(5, &mut rng);
        let a = conjugate(&SymMatrix::diag(&vals), &qrot);
        let delta = random_sym(5, &mut rng);
        let alpha = rng.random_range(0.0..3.0);
        let beta = rng.random_range(0.0..3.0);
        let (_, _, gap) = tensor_shift_gap(&a, &delta, alpha, beta)?;
        rows.push(CheckRow {
            test: "tensor_shift",
            instance_id: inst,
            metric: "gap",
            value: gap,
            threshold: -1e-10,
            pass: gap >= -1e-10,
        });
    }

    Ok(rows)
}

pub(crate) fn base_density(cfg: &ExperimentConfig) -> Result<Density> {
    match cfg.base {
        BaseKind::Gaussian => Density::gaussian(cfg.n),
        BaseKind::Cube => Ok(Density::uniform_on_body(ConvexBody::isotropic_cube(cfg.n)?)),
        BaseKind::ProductExponential => Density::product_exponential(cfg.n),
    }
}

fn run_ballwalk(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    if !ConvexBody::cone_params_standard(cfg.n, cfg.d) {
        eprintln!(
            "warning: (n={}, D={}) lies outside the standard range 2*sqrt(n) <= D <= n/2",
            cfg.n, cfg.d
        );
    }
    let results = cone_mixing_experiment(
        cfg.n,
        cfg.d,
        Some(cfg.delta),
        cfg.chains,
        cfg.seed,
        None,
    )?;
    let mut csv = csv_row(["chain_id", "n", "D", "delta", "proper_steps", "total_steps", "censored"]);
    for r in &results {
        csv.push_str(&csv_row([
            r.chain_id.to_string(),
            cfg.n.to_string(),
            fmt_f64(cfg.d),
            fmt_f64(cfg.delta),
            r.proper_steps.to_string(),
            r.total_steps.to_string(),
            r.censored.to_string(),
        ]));
    }
    let mut proper: Vec<f64> = results.iter().map(|r| r.proper_steps as f64).collect();
    proper.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = proper[proper.len() / 2];
    let censored = results.iter().filter(|r| r.censored).count();
    let summary = json!({
        "median_proper_steps": median,
        "censored_chains": censored,
        "chains": results.len(),
    });
    Ok((csv, summary, true))
}

fn run_localize(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let base = base_density(cfg)?;
    let params = SdeParams::new(cfg.dt, cfg.t_max, cfg.particles, cfg.ess_floor)?;
    let barrier = BarrierParams::new(cfg.q, cfg.phi)?;
    let sets = [
        SetSpec::axis_halfspace(cfg.n, 0, 0.0),
        SetSpec::Ball {
            radius: (cfg.n as f64).sqrt(),
        },
    ];
    let mode = cfg.mode;
    let all_rows: Vec<Result<Vec<crate::localization::LocRow>>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream_rng(cfg.seed, run as u64);
            run_localization(&base, &params, mode, &sets, barrier, &mut rng)
        })
        .collect();

    let mut header = vec![
        "run_id".to_string(),
        "step".to_string(),
        "t".to_string(),
        "opnorm_A".to_string(),
        "u".to_string(),
        "psi".to_string(),
        "ess".to_string(),
    ];
    for s in &sets {
        header.push(format!("g_{}", s.label()));
    }
    let mut csv = csv_row(header.iter().map(|s| s.as_str()));
    let mut pass = true;
    let mut max_opnorm_err = 0.0f64;
    for (run, rows) in all_rows.into_iter().enumerate() {
        let rows = rows?;
        for row in rows {
            if mode == LocMode::ExactGaussian {
                max_opnorm_err =
                    max_opnorm_err.max((row.opnorm_a - 1.0 / (1.0 + row.t)).abs());
            }
            pass &= row.ess <= cfg.particles as f64 + 1e-9;
            let mut fields = vec![
                run.to_string(),
                row.step.to_string(),
                fmt_f64(row.t),
                fmt_f64(row.opnorm_a),
                fmt_f64(row.u),
                fmt_f64(row.psi),
                fmt_f64(row.ess),
            ];
            for &g in &row.g {
                pass &= (0.0..=1.0).contains(&g);
                fields.push(fmt_f64(g));
            }
            csv.push_str(&csv_row(fields.iter().map(|s| s.as_str())));
        }
    }
    if mode == LocMode::ExactGaussian {
        pass &= max_opnorm_err <= 1e-12;
    }
    let summary = json!({
        "runs": cfg.runs,
        "steps_per_run": params.steps(),
        "exact_gaussian_opnorm_max_err": if mode == LocMode::ExactGaussian { Value::from(max_opnorm_err) } else { Value::Null },
    });
    Ok((csv, summary, pass))
}

fn run_barrier_check(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let rows = barrier_check_suite(cfg.n, cfg.seed)?;
    let mut csv = csv_row(["test", "instance_id", "metric", "value", "threshold", "pass"]);
    let mut pass = true;
    for r in &rows {
        pass &= r.pass;
        csv.push_str(&csv_row([
            r.test.to_string(),
            r.instance_id.to_string(),
            r.metric.to_string(),
            fmt_f64(r.value),
            fmt_f64(r.threshold),
            r.pass.to_string(),
        ]));
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    let summary = json!({
        "rows": rows.len(),
        "failures": failures,
        "solver_tol": DEFAULT_TOL,
    });
    Ok((csv, summary, pass))
}

fn run_cone_lb(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let mut csv = csv_row(["n", "D", "t0", "p_slab", "kappa_upper", "rho_upper", "kappa_sqrt_d"]);
    let mut band = Vec::new();
    for &d in &cfg.d_grid {
        let p = cone_slab_profile(cfg.n, d)?;
        let ks = p.kappa_upper * d.sqrt();
        band.push(ks);
        csv.push_str(&csv_row([
            cfg.n.to_string(),
            fmt_f64(d),
            fmt_f64(p.t0),
            fmt_f64(p.p_slab),
            fmt_f64(p.kappa_upper),
            fmt_f64(p.rho_upper),
            fmt_f64(ks),
        ]));
    }
    let lo = band.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = band.iter().cloned().fold(0.0f64, f64::max);
    let ratio = hi / lo;
    let pass = band.len() < 2 || ratio <= 3.0;
    let summary = json!({
        "band_ratio_kappa_sqrt_d": ratio,
        "band_pass": pass,
    });
    Ok((csv, summary, pass))
}

fn run_profile(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let (a, b) = (-10.0, 10.0);
    let y_grid: Vec<f64> = (0..50).map(|i| 3.0 * i as f64 / 49.0).collect();
    let mut csv = csv_row(["t", "y", "g", "boundary", "kappa", "psi"]);
    let mut pass = true;
    let mut min_kappa_t1 = f64::INFINITY;
    let mut max_scaling_err = 0.0f64;
    for &t in &cfg.t_grid {
        for &y in &y_grid {
            let p = gaussian_interval_profile(a, b, y, t)?;
            // exact rescaling identity against the t = 1 profile
            let s = t.sqrt();
            let ref1 = gaussian_interval_profile(a * s, b * s, y * s, 1.0)?;
            let err = (p.kappa - s * ref1.kappa).abs() / s.max(1.0);
            max_scaling_err = max_scaling_err.max(err);
            if (t - 1.0).abs() < 1e-12 && p.g <= 0.5 {
                min_kappa_t1 = min_kappa_t1.min(p.kappa);
            }
            csv.push_str(&csv_row([
                fmt_f64(t),
                fmt_f64(y),
                fmt_f64(p.g),
                fmt_f64(p.boundary),
                fmt_f64(p.kappa),
                fmt_f64(p.psi),
            ]));
        }
    }
    pass &= max_scaling_err <= 1e-10;
    if min_kappa_t1.is_finite() {
        pass &= min_kappa_t1 >= 0.3;
    }
    let summary = json!({
        "max_scaling_err": max_scaling_err,
        "min_kappa_at_t1": if min_kappa_t1.is_finite() { Value::from(min_kappa_t1) } else { Value::Null },
    });
    Ok((csv, summary, pass))
}

fn run_concentration(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let base = base_density(cfg)?;
    let mut rng = stream_rng(cfg.seed, 0);
    let table = concentration_experiment(
        &base,
        &GKind::EuclideanNorm,
        &cfg.t_grid,
        cfg.particles,
        &mut rng,
    )?;
    let mut csv = csv_row(["t", "tail_median", "tail_mean", "censored", "bound_at_fitted_c"]);
    let sqrt_n = (cfg.n as f64).sqrt();
    let mut pass = true;
    for (i, &t) in table.t_grid.iter().enumerate() {
        let bound = table
            .fitted_c
            .map(|c| (-c * t * t / (t + sqrt_n)).exp())
            .unwrap_or(f64::NAN);
        csv.push_str(&csv_row([
            fmt_f64(t),
            fmt_f64(table.tail_median[i]),
            fmt_f64(table.tail_mean[i]),
            table.censored[i].to_string(),
            fmt_f64(bound),
        ]));
    }
    for w in table.tail_median.windows(2) {
        pass &= w[1] <= w[0];
    }
    for w in table.tail_mean.windows(2) {
        pass &= w[1] <= w[0];
    }
    let summary = json!({
        "median": table.median,
        "mean": table.mean,
        "fitted_c": table.fitted_c,
        "m": table.m,
    });
    Ok((csv, summary, pass))
}

fn run_smallball(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    let mut rng = stream_rng(cfg.seed, 0);
    let exact = small_ball_experiment(cfg.n, &cfg.eps_grid, SmallBallMode::GaussianExact, &mut rng)?;
    let gaussian = Density::gaussian(cfg.n)?;
    let mc = small_ball_experiment(
        cfg.n,
        &cfg.eps_grid,
        SmallBallMode::MonteCarlo {
            density: &gaussian,
            m: cfg.particles,
        },
        &mut rng,
    )?;
    let mut csv = csv_row([
        "epsilon",
        "p_exact",
        "bound",
        "pass_exact",
        "p_mc",
        "mc_below_resolution",
    ]);
    let mut pass = true;
    for (e, m) in exact.iter().zip(&mc) {
        pass &= e.pass;
        if !m.below_resolution {
            let se = (e.p * (1.0 - e.p) / cfg.particles as f64).sqrt();
            pass &= (m.p - e.p).abs() <= 4.0 * se.max(1e-12);
        }
        csv.push_str(&csv_row([
            fmt_f64(e.epsilon),
            fmt_f64(e.p),
            fmt_f64(e.bound),
            e.pass.to_string(),
            fmt_f64(m.p),
            m.below_resolution.to_string(),
        ]));
    }
    let summary = json!({
        "n": cfg.n,
        "mc_draws": cfg.particles,
    });
    Ok((csv, summary, pass))
}

fn dispatch(cfg: &ExperimentConfig) -> Result<(String, Value, bool)> {
    match cfg.experiment {
        ExperimentKind::Ballwalk => run_ballwalk(cfg),
        ExperimentKind::Localize => run_localize(cfg),
        ExperimentKind::BarrierCheck => run_barrier_check(cfg),
        ExperimentKind::ConeLb => run_cone_lb(cfg),
        ExperimentKind::Profile => run_profile(cfg),
        ExperimentKind::Concentration => run_concentration(cfg),
        ExperimentKind::Smallball => run_smallball(cfg),
    }
}

/// Version string recorded in summaries.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run one configured experiment. The CSV in the returned report is a pure
/// function of the config (including seed); the summary carries wall-clock
/// and version metadata.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let (csv, mut summary, pass) = match std::env::var("LOCWALK_THREADS") {
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                Error::Config(format!("LOCWALK_THREADS must be a positive integer (got `{raw}`)"))
            })?;
            if threads == 0 {
                return Err(Error::Config("LOCWALK_THREADS must be >= 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cfg))?
        }
        Err(_) => dispatch(cfg)?,
    };
    if let Value::Object(ref mut map) = summary {
        map.insert("experiment".into(), Value::from(cfg.experiment.name()));
        map.insert("seed".into(), Value::from(cfg.seed));
        map.insert("version".into(), Value::from(ARTIFACT_VERSION));
        map.insert("pass".into(), Value::from(pass));
        map.insert(
            "wall_clock_secs".into(),
            Value::from(started.elapsed().as_secs_f64()),
        );
        map.insert(
            "config".into(),
            serde_json::from_str(&cfg.echo_json()).expect("echo is valid JSON"),
        );
    }
    Ok(ExperimentReport {
        config_echo: cfg.echo_json(),
        csv,
        summary,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn cfg(s: &str) -> ExperimentConfig {
        let args: Vec<String> = s.split_whitespace().map(String::from).collect();
        parse_config(&args).unwrap()
    }

    #[test]
    fn barrier_suite_all_green() {
        let rows = barrier_check_suite(5, 17).unwrap();
        // 3 q-values x 20 instances x 5 tests + psi anchor + 100 tensor rows
        assert_eq!(rows.len(), 3 * 20 * 5 + 1 + 100);
        for r in &rows {
            assert!(r.pass, "{} #{} value {:e}", r.test, r.instance_id, r.value);
        }
    }

    #[test]
    fn smallball_experiment_end_to_end() {
        let report = run_experiment(&cfg("smallball --n 25 --particles 2000 --eps-grid 0.6,1.0"))
            .unwrap();
        assert!(report.pass);
        assert!(report.csv.starts_with("epsilon,"));
        assert_eq!(report.csv.lines().count(), 3);
    }

    #[test]
    fn identical_config_identical_bytes() {
        let a = run_experiment(&cfg("ballwalk --n 16 --D 8 --chains 4 --seed 11")).unwrap();
        let b = run_experiment(&cfg("ballwalk --n 16 --D 8 --chains 4 --seed 11")).unwrap();
        assert_eq!(a.csv, b.csv);
        let c = run_experiment(&cfg("ballwalk --n 16 --D 8 --chains 4 --seed 12")).unwrap();
        assert_ne!(a.csv, c.csv);
    }

    #[test]
    fn localize_small_run_passes() {
        let report = run_experiment(&cfg(
            "localize --n 4 --particles 256 --runs 2 --dt 0.01 --T 0.1",
        ))
        .unwrap();
        assert!(report.pass);
        let header = report.csv.lines().next().unwrap();
        assert!(header.starts_with("run_id,step,t,opnorm_A,u,psi,ess,g_half_0,g_ball_"));
        // 2 runs x (10 steps + initial row) + header
        assert_eq!(report.csv.lines().count(), 1 + 2 * 11);
    }

    #[test]
    fn cone_lb_band_pass() {
        let report = run_experiment(&cfg("cone-lb --n 64 --d-grid 16,24,32")).unwrap();
        assert!(report.pass);
        assert_eq!(report.csv.lines().count(), 4);
    }

    #[test]
    fn profile_scaling_and_floor() {
        let report = run_experiment(&cfg("profile")).unwrap();
        assert!(report.pass);
        let summary = &report.summary;
        assert!(summary["max_scaling_err"].as_f64().unwrap() <= 1e-10);
        assert!(summary["min_kappa_at_t1"].as_f64().unwrap() >= 0.3);
    }
}
