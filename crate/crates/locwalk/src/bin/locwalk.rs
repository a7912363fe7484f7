//! Experiment runner CLI.
//!
//! Exit codes: 0 = all hard assertions passed, 1 = a hard assertion or
//! runtime failure, 2 = configuration error.

use locwalk::config::parse_config;
use locwalk::runner::run_experiment;
use locwalk::Error;
use std::process::ExitCode;

const USAGE: &str = r#"locwalk — sampling and isoperimetry experiments over convex bodies

USAGE:
    locwalk <experiment> [--key value ...]
    locwalk --experiment <name> [--key value ...]
    locwalk --config file.json [--key value ...]   (flags override the file)

EXPERIMENTS:
    ballwalk       cone mixing: chains to the base of the truncated cone
                   CSV: chain_id,n,D,delta,proper_steps,total_steps,censored
    localize       tilting-process paths with barrier diagnostics
                   CSV: run_id,step,t,opnorm_A,u,psi,ess,g_<set>...
    barrier check  derivative/inequality suite
                   CSV: test,instance_id,metric,value,threshold,pass
    cone-lb        analytic slab bound on the truncated cone
                   CSV: n,D,t0,p_slab,kappa_upper,rho_upper,kappa_sqrt_d
    profile        exact 1-d interval profiles
                   CSV: t,y,g,boundary,kappa,psi
    concentration  Lipschitz tail table with fitted constant
                   CSV: t,tail_median,tail_mean,censored,bound_at_fitted_c
    smallball      P(|x|^2 <= eps*n) exact + MC cross-check
                   CSV: epsilon,p_exact,bound,pass_exact,p_mc,mc_below_resolution

KEYS (defaults depend on the experiment):
    --n --D --delta --dt --T --particles --chains --runs --seed
    --ess-floor --q --phi --eps-grid v1,v2,... --t-grid ... --d-grid ...
    --base gaussian|cube|product-exponential
    --mode exact-gaussian|reweight|mcmc-refresh
    --output path.csv     (summary lands next to it as path.csv.summary.json)

ENVIRONMENT:
    LOCWALK_THREADS       caps the worker pool; output bytes do not depend
                          on it.

Exit codes: 0 pass, 1 hard-assertion failure, 2 configuration error.
"#;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args.iter().any(|a| a == "--help" || a == "-h") {
        print!("{USAGE}");
        return ExitCode::from(if args.is_empty() { 2 } else { 0 });
    }

    let config = match parse_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match run_experiment(&config) {
        Ok(report) => {
            if let Err(e) = report.write_outputs(config.output.as_deref()) {
                eprintln!("error writing output: {e}");
                return ExitCode::from(1);
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("hard assertions failed (see summary)");
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
