//! Experiment configuration: `--key value` flags, an optional JSON config
//! file, defaults, and validation.
//!
//! Flags override file values; unknown keys are rejected in both; every
//! range error names the violated precondition. The first bare token may
//! name the experiment (`locwalk smallball --n 100`), with `barrier check`
//! accepted as a two-token spelling of `barrier-check`.

use crate::localization::LocMode;
use crate::{Error, Result};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Localize,
    BarrierCheck,
    Ballwalk,
    ConeLb,
    Profile,
    Concentration,
    Smallball,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "localize" => Ok(Self::Localize),
            "barrier-check" => Ok(Self::BarrierCheck),
            "ballwalk" => Ok(Self::Ballwalk),
            "cone-lb" => Ok(Self::ConeLb),
            "profile" => Ok(Self::Profile),
            "concentration" => Ok(Self::Concentration),
            "smallball" => Ok(Self::Smallball),
            other => Err(Error::Config(format!(
                "unknown experiment `{other}` (expected one of localize, barrier-check, \
                 ballwalk, cone-lb, profile, concentration, smallball)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Localize => "localize",
            Self::BarrierCheck => "barrier-check",
            Self::Ballwalk => "ballwalk",
            Self::ConeLb => "cone-lb",
            Self::Profile => "profile",
            Self::Concentration => "concentration",
            Self::Smallball => "smallball",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Base density selector for ensemble experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Gaussian,
    Cube,
    ProductExponential,
}

impl BaseKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "cube" => Ok(Self::Cube),
            "product-exponential" => Ok(Self::ProductExponential),
            other => Err(Error::Config(format!(
                "unknown base `{other}` (expected gaussian, cube, product-exponential)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Cube => "cube",
            Self::ProductExponential => "product-exponential",
        }
    }
}

fn parse_mode(s: &str) -> Result<LocMode> {
    match s {
        "exact-gaussian" => Ok(LocMode::ExactGaussian),
        "reweight" => Ok(LocMode::Reweight),
        "mcmc-refresh" => Ok(LocMode::McmcRefresh),
        other => Err(Error::Config(format!(
            "unknown mode `{other}` (expected exact-gaussian, reweight, mcmc-refresh)"
        ))),
    }
}

pub fn mode_name(mode: LocMode) -> &'static str {
    match mode {
        LocMode::ExactGaussian => "exact-gaussian",
        LocMode::Reweight => "reweight",
        LocMode::McmcRefresh => "mcmc-refresh",
    }
}

/// Fully validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub d: f64,
    pub delta: f64,
    pub dt: f64,
    pub t_max: f64,
    pub particles: usize,
    pub chains: usize,
    pub runs: usize,
    pub seed: u64,
    pub ess_floor: f64,
    pub q: u32,
    pub phi: f64,
    pub eps_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub d_grid: Vec<f64>,
    pub base: BaseKind,
    pub mode: LocMode,
    pub output: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "n",
    "D",
    "delta",
    "dt",
    "T",
    "particles",
    "chains",
    "runs",
    "seed",
    "ess_floor",
    "q",
    "phi",
    "eps_grid",
    "t_grid",
    "d_grid",
    "base",
    "mode",
    "output",
];

fn flag_to_key(flag: &str) -> Result<&'static str> {
    let stripped = flag.trim_start_matches("--");
    let normalized = match stripped {
        "ess-floor" => "ess_floor",
        "eps-grid" => "eps_grid",
        "t-grid" => "t_grid",
        "d-grid" => "d_grid",
        other => other,
    };
    KNOWN_KEYS
        .iter()
        .find(|&&k| k == normalized)
        .copied()
        .ok_or_else(|| Error::Config(format!("unknown flag `{flag}`")))
}

fn grid_from_value(key: &str, v: &Value) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Config(format!("{key} must be a JSON array of numbers")))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Config(format!("{key} entries must be numbers")))
        })
        .collect()
}

fn grid_from_str(key: &str, s: &str) -> Result<Value> {
    let vals: Result<Vec<f64>> = s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: `{tok}` is not a number")))
        })
        .collect();
    Ok(Value::from(vals?))
}

struct RawConfig {
    map: BTreeMap<String, Value>,
}

impl RawConfig {
    fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("{key} must be a number"))),
        }
    }

    fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => match v.as_u64() {
                Some(u) => Ok(Some(u as usize)),
                None => Err(Error::Config(format!(
                    "{key} must be a nonnegative integer (got {v})"
                ))),
            },
        }
    }

    fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("{key} must be a nonnegative integer"))),
        }
    }

    fn get_str(&self, key: &str) -> Result<Option<&str>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| Error::Config(format!("{key} must be a string"))),
        }
    }

    fn get_grid(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => grid_from_value(key, v).map(Some),
        }
    }
}

/// Parse argv (without the program name). `--config file.json` loads file
/// values first; explicit flags override them.
pub fn parse_config(argv: &[String]) -> Result<ExperimentConfig> {
    let mut flag_map: BTreeMap<String, Value> = BTreeMap::new();
    let mut config_path: Option<PathBuf> = None;

    let mut i = 0;
    // leading bare tokens name the experiment
    let mut subcommand: Vec<&str> = Vec::new();
    while i < argv.len() && !argv[i].starts_with("--") {
        subcommand.push(argv[i].as_str());
        i += 1;
    }
    match subcommand.as_slice() {
        [] => {}
        ["barrier", "check"] | ["barrier-check"] => {
            flag_map.insert("experiment".into(), Value::from("barrier-check"));
        }
        [one] => {
            flag_map.insert("experiment".into(), Value::from(*one));
        }
        more => {
            return Err(Error::Config(format!(
                "unrecognized subcommand `{}`",
                more.join(" ")
            )))
        }
    }

    while i < argv.len() {
        let flag = &argv[i];
        if !flag.starts_with("--") {
            return Err(Error::Config(format!(
                "expected `--key value` pairs, found `{flag}`"
            )));
        }
        let value = argv
            .get(i + 1)
            .ok_or_else(|| Error::Config(format!("flag `{flag}` is missing its value")))?;
        if flag == "--config" {
            config_path = Some(PathBuf::from(value));
            i += 2;
            continue;
        }
        let key = flag_to_key(flag)?;
        let parsed: Value = match key {
            "experiment" | "base" | "mode" | "output" => Value::from(value.as_str()),
            "eps_grid" | "t_grid" | "d_grid" => grid_from_str(key, value)?,
            "n" | "particles" | "chains" | "runs" | "seed" | "q" => {
                let u: u64 = value.parse().map_err(|_| {
                    Error::Config(format!("{key} must be a nonnegative integer (got `{value}`)"))
                })?;
                Value::from(u)
            }
            _ => {
                let f: f64 = value.parse().map_err(|_| {
                    Error::Config(format!("{key} must be a number (got `{value}`)"))
                })?;
                Value::from(f)
            }
        };
        flag_map.insert(key.to_string(), parsed);
        i += 2;
    }

    let mut map: BTreeMap<String, Value> = BTreeMap::new();
    if let Some(path) = &config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {path:?}: {e}")))?;
        let parsed: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config file is not valid JSON: {e}")))?;
        let obj = parsed
            .as_object()
            .ok_or_else(|| Error::Config("config file must hold a JSON object".into()))?;
        for (k, v) in obj {
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}` in config file")));
            }
            map.insert(k.clone(), v.clone());
        }
    }
    // flags override the file
    for (k, v) in flag_map {
        map.insert(k, v);
    }

    build(RawConfig { map })
}

fn build(raw: RawConfig) -> Result<ExperimentConfig> {
    let experiment = ExperimentKind::parse(
        raw.get_str("experiment")?
            .ok_or_else(|| Error::Config("missing experiment (use a subcommand or --experiment)".into()))?,
    )?;

    let n = raw.get_usize("n")?.unwrap_or(match experiment {
        ExperimentKind::Localize => 8,
        ExperimentKind::BarrierCheck => 5,
        ExperimentKind::Ballwalk => 25,
        ExperimentKind::ConeLb => 64,
        ExperimentKind::Profile => 1,
        ExperimentKind::Concentration => 100,
        ExperimentKind::Smallball => 100,
    });
    let nf = n as f64;
    let d = raw.get_f64("D")?.unwrap_or(match experiment {
        ExperimentKind::Ballwalk => 10.0,
        _ => 16.0,
    });
    let delta = raw.get_f64("delta")?.unwrap_or(1.0 / nf.max(1.0).sqrt());
    let dt = raw.get_f64("dt")?.unwrap_or(1e-3);
    let t_max = raw.get_f64("T")?.unwrap_or(1.0);
    let particles = raw.get_usize("particles")?.unwrap_or(match experiment {
        ExperimentKind::Concentration => 1_000_000,
        ExperimentKind::Smallball => 200_000,
        _ => 2048,
    });
    let chains = raw.get_usize("chains")?.unwrap_or(32);
    let runs = raw.get_usize("runs")?.unwrap_or(4);
    let seed = raw.get_u64("seed")?.unwrap_or(0);
    let ess_floor = raw.get_f64("ess_floor")?.unwrap_or(0.5);
    let q = raw.get_u64("q")?.unwrap_or(2) as u32;
    let phi = raw
        .get_f64("phi")?
        .unwrap_or(2f64.powi(q as i32) * nf.max(1.0));
    let eps_grid = raw
        .get_grid("eps_grid")?
        .unwrap_or_else(|| vec![0.05, 0.1, 0.2]);
    let t_grid = raw.get_grid("t_grid")?.unwrap_or_else(|| match experiment {
        ExperimentKind::Profile => vec![0.25, 1.0, 4.0, 16.0],
        _ => (0..=8).map(|i| i as f64).collect(),
    });
    let d_grid = raw
        .get_grid("d_grid")?
        .unwrap_or_else(|| vec![16.0, 24.0, 32.0]);
    let base = match raw.get_str("base")? {
        Some(s) => BaseKind::parse(s)?,
        None => match experiment {
            ExperimentKind::Concentration => BaseKind::ProductExponential,
            _ => BaseKind::Gaussian,
        },
    };
    let mode = match raw.get_str("mode")? {
        Some(s) => parse_mode(s)?,
        None => match base {
            BaseKind::Gaussian => LocMode::ExactGaussian,
            BaseKind::Cube => LocMode::McmcRefresh,
            BaseKind::ProductExponential => LocMode::Reweight,
        },
    };
    let output = raw.get_str("output")?.map(PathBuf::from);

    let config = ExperimentConfig {
        experiment,
        n,
        d,
        delta,
        dt,
        t_max,
        particles,
        chains,
        runs,
        seed,
        ess_floor,
        q,
        phi,
        eps_grid,
        t_grid,
        d_grid,
        base,
        mode,
        output,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &ExperimentConfig) -> Result<()> {
    let nf = c.n as f64;
    let fail = |msg: String| Err(Error::Config(msg));
    match c.experiment {
        ExperimentKind::Localize => {
            if c.n < 1 {
                return fail(format!("n must be >= 1 (got {})", c.n));
            }
            if c.particles < 2 {
                return fail(format!("particles must be >= 2 (got {})", c.particles));
            }
            if !(c.dt > 0.0 && c.dt <= c.t_max) {
                return fail(format!("dt must satisfy 0 < dt <= T (dt={}, T={})", c.dt, c.t_max));
            }
            if !(c.ess_floor > 0.0 && c.ess_floor <= 1.0) {
                return fail(format!("ess_floor must lie in (0,1] (got {})", c.ess_floor));
            }
            if c.runs < 1 {
                return fail("runs must be >= 1".into());
            }
            if c.q < 1 {
                return fail("q must be >= 1".into());
            }
            if !(c.phi > 0.0) {
                return fail(format!("phi must be positive (got {})", c.phi));
            }
            if c.mode == LocMode::ExactGaussian && c.base != BaseKind::Gaussian {
                return fail("mode exact-gaussian requires base gaussian".into());
            }
        }
        ExperimentKind::BarrierCheck => {
            if c.n < 2 {
                return fail(format!("n must be >= 2 (got {})", c.n));
            }
            if c.q < 1 {
                return fail("q must be >= 1".into());
            }
        }
        ExperimentKind::Ballwalk => {
            if c.n < 16 {
                return fail(format!("ballwalk requires n >= 16 (got {})", c.n));
            }
            if !(c.d >= 2.0 * nf.sqrt() && c.d <= nf / 2.0) {
                return fail(format!(
                    "D must satisfy 2*sqrt(n) <= D <= n/2 (n={}, D={})",
                    c.n, c.d
                ));
            }
            if !(c.delta > 0.0) {
                return fail(format!("delta must be positive (got {})", c.delta));
            }
            if c.chains < 1 {
                return fail("chains must be >= 1".into());
            }
        }
        ExperimentKind::ConeLb => {
            if c.n < 16 {
                return fail(format!("cone-lb requires n >= 16 (got {})", c.n));
            }
            for &d in &c.d_grid {
                if !(d >= 2.0 * nf.sqrt() && d <= nf / 2.0) {
                    return fail(format!(
                        "d_grid entries must satisfy 2*sqrt(n) <= D <= n/2 (n={}, D={d})",
                        c.n
                    ));
                }
            }
            if c.d_grid.is_empty() {
                return fail("d_grid must be nonempty".into());
            }
        }
        ExperimentKind::Profile => {
            if c.t_grid.iter().any(|&t| !(t > 0.0)) {
                return fail("t_grid entries must be positive".into());
            }
            if c.t_grid.is_empty() {
                return fail("t_grid must be nonempty".into());
            }
        }
        ExperimentKind::Concentration => {
            if c.n < 1 {
                return fail(format!("n must be >= 1 (got {})", c.n));
            }
            if c.particles < 100_000 {
                return fail(format!(
                    "concentration needs particles >= 1e5 (got {})",
                    c.particles
                ));
            }
            if c.t_grid.windows(2).any(|w| w[0] >= w[1]) || c.t_grid.is_empty() {
                return fail("t_grid must be strictly increasing and nonempty".into());
            }
            if c.base == BaseKind::Cube {
                return fail("concentration supports gaussian and product-exponential bases".into());
            }
        }
        ExperimentKind::Smallball => {
            if c.n < 1 {
                return fail(format!("n must be >= 1 (got {})", c.n));
            }
            if c.eps_grid.is_empty() || c.eps_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
                return fail("eps_grid entries must lie in (0, 1]".into());
            }
            if c.particles < 1000 {
                return fail(format!(
                    "smallball MC cross-check needs particles >= 1000 (got {})",
                    c.particles
                ));
            }
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Canonical JSON echo of the effective configuration (sorted keys).
    pub fn echo_json(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("experiment", Value::from(self.experiment.name()));
        m.insert("n", Value::from(self.n as u64));
        m.insert("D", Value::from(self.d));
        m.insert("delta", Value::from(self.delta));
        m.insert("dt", Value::from(self.dt));
        m.insert("T", Value::from(self.t_max));
        m.insert("particles", Value::from(self.particles as u64));
        m.insert("chains", Value::from(self.chains as u64));
        m.insert("runs", Value::from(self.runs as u64));
        m.insert("seed", Value::from(self.seed));
        m.insert("ess_floor", Value::from(self.ess_floor));
        m.insert("q", Value::from(self.q));
        m.insert("phi", Value::from(self.phi));
        m.insert("eps_grid", Value::from(self.eps_grid.clone()));
        m.insert("t_grid", Value::from(self.t_grid.clone()));
        m.insert("d_grid", Value::from(self.d_grid.clone()));
        m.insert("base", Value::from(self.base.name()));
        m.insert("mode", Value::from(mode_name(self.mode)));
        serde_json::to_string(&m).expect("plain JSON map")
    }
}
