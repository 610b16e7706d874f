//! Command-line front end: solve, sweep, converge, and validate commands
//! with JSON config input and CSV output.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::entropy;
use crate::error::{QiccError, Result};
use crate::estimator::Scenario;
use crate::oracle::{self, SymbolModel};
use crate::solver::{self, GInit, Solution, Termination};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qicc",
    about = "Power allocation for joint over-the-air computation and communication \
             on a bosonic multiple-access channel"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON config path; built-in standard setup when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a single allocation at a requested sum-rate.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Requested sum-rate in bits, or `half-max`.
        #[arg(long, default_value = "0")]
        r_sum: String,
        #[arg(long)]
        monotone_guard: bool,
    },
    /// Trace the MSE–sum-rate trade-off over a uniform rate grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of grid points on [0, R_max], endpoints included.
        #[arg(long)]
        grid: Option<usize>,
        /// Reuse each solution's OAC powers to initialize the next point
        /// (sequential).
        #[arg(long)]
        warm_start: bool,
        #[arg(long)]
        monotone_guard: bool,
    },
    /// Emit the per-iteration convergence trace at one sum-rate.
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "half-max")]
        r_sum: String,
        #[arg(long)]
        monotone_guard: bool,
    },
    /// Solve, then cross-check the analytic MSE against the Monte-Carlo
    /// channel simulator.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "half-max")]
        r_sum: String,
        /// Monte-Carlo sample count override.
        #[arg(long)]
        samples: Option<usize>,
        /// RNG seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Entry point shared by the binary and the tests; returns the process exit
/// code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Solve { common, r_sum, monotone_guard } => {
            cmd_solve(&common, &r_sum, monotone_guard)
        }
        Command::Sweep { common, grid, warm_start, monotone_guard } => {
            cmd_sweep(&common, grid, warm_start, monotone_guard)
        }
        Command::Converge { common, r_sum, monotone_guard } => {
            cmd_converge(&common, &r_sum, monotone_guard)
        }
        Command::Validate { common, r_sum, samples, seed } => {
            cmd_validate(&common, &r_sum, samples, seed)
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &QiccError) -> i32 {
    match e {
        QiccError::Infeasible { .. } => EXIT_INFEASIBLE,
        _ => EXIT_CONFIG,
    }
}

fn load_config(common: &CommonArgs) -> Result<ConfigFile> {
    match &common.config {
        Some(path) => ConfigFile::from_path(path),
        None => Ok(ConfigFile::standard()),
    }
}

fn parse_r_sum(text: &str, scenario: &Scenario) -> Result<f64> {
    if text == "half-max" {
        return Ok(0.5 * entropy::max_sum_rate(scenario));
    }
    text.parse::<f64>()
        .map_err(|_| QiccError::Config(format!("invalid r_sum '{text}' (number or half-max)")))
        .and_then(|r| {
            if r >= 0.0 && r.is_finite() {
                Ok(r)
            } else {
                Err(QiccError::Config(format!("r_sum must be finite and >= 0, got {r}")))
            }
        })
}

/// 12 significant digits, stable across platforms.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.11e}")
    }
}

fn write_output(common: &CommonArgs, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn solve_at(cfg: &ConfigFile, scenario: &Scenario, r_sum: f64, guard: bool) -> Result<Solution> {
    let mut params = cfg.solver_params(r_sum)?;
    params.monotone_guard = params.monotone_guard || guard;
    solver::ao_solve(scenario, &params)
}

fn cmd_solve(common: &CommonArgs, r_sum: &str, guard: bool) -> Result<i32> {
    let cfg = load_config(common)?;
    let scenario = cfg.scenario()?;
    let r_sum = parse_r_sum(r_sum, &scenario)?;
    let r_max = entropy::max_sum_rate(&scenario);

    let sol = match solve_at(&cfg, &scenario, r_sum, guard) {
        Ok(sol) => sol,
        Err(QiccError::Infeasible { requested, max }) => {
            eprintln!(
                "infeasible: requested sum-rate {} bits exceeds R_max = {} bits",
                sig12(requested),
                sig12(max)
            );
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e),
    };

    let mut report = String::new();
    report.push_str(&format!(
        "scenario: K={} M={} N0={} Pc={} Pt={}\n",
        scenario.k, scenario.m, scenario.n0, scenario.pc, scenario.pt
    ));
    report.push_str(&format!("r_sum_bits = {}\n", sig12(r_sum)));
    report.push_str(&format!("r_max_bits = {}\n", sig12(r_max)));
    report.push_str(&format!("mse = {}\n", sig12(sol.mse)));
    let g: Vec<String> = sol.alloc.g.iter().map(|&x| sig12(x)).collect();
    report.push_str(&format!("g = [{}]\n", g.join(", ")));
    report.push_str(&format!("n_sig = {}\n", sig12(sol.alloc.n_sig)));
    report.push_str(&format!("h = {}\n", sig12(sol.alloc.h.0)));
    let pm: Vec<String> = sol.comm_powers.iter().map(|&x| sig12(x)).collect();
    report.push_str(&format!("comm_powers = [{}]\n", pm.join(", ")));
    report.push_str(&format!(
        "iterations = {} ({})\n",
        sol.trace.iterations.len() - 1,
        termination_label(sol.trace.terminated_by)
    ));

    match &common.out {
        Some(path) => {
            let record = solution_record(&scenario, r_sum, &sol);
            std::fs::write(path, record)?;
            print!("{report}");
        }
        None => print!("{report}"),
    }
    Ok(EXIT_OK)
}

fn solution_record(scenario: &Scenario, r_sum: f64, sol: &Solution) -> String {
    serde_json::json!({
        "scenario": {
            "k": scenario.k, "m": scenario.m, "eta": scenario.eta,
            "n0": scenario.n0, "pc": scenario.pc, "pt": scenario.pt,
        },
        "r_sum_bits": r_sum,
        "mse": sol.mse,
        "g": sol.alloc.g,
        "n_sig": sol.alloc.n_sig,
        "h": sol.alloc.h.0,
        "comm_powers": sol.comm_powers,
        "gamma_max": sol.gamma_max,
        "iterations": sol.trace.iterations.len() - 1,
        "terminated_by": termination_label(sol.trace.terminated_by),
    })
    .to_string()
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::ToleranceMet => "tolerance-met",
        Termination::MaxIterations => "max-iterations",
        Termination::Infeasible => "infeasible",
    }
}

/// One solved point of the trade-off sweep.
pub struct TradeoffPoint {
    pub r_sum: f64,
    pub mse: f64,
    pub iterations: usize,
    pub status: &'static str,
}

/// Evenly spaced sum-rate grid on [0, R_max], both endpoints included.
pub fn sweep_grid(scenario: &Scenario, n: usize) -> Vec<f64> {
    let r_max = entropy::max_sum_rate(scenario);
    (0..n)
        .map(|i| {
            if n == 1 {
                0.0
            } else {
                r_max * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Solves every grid point independently; point failures land in the status
/// column instead of aborting the sweep.
pub fn run_sweep(
    cfg: &ConfigFile,
    scenario: &Scenario,
    grid: &[f64],
    warm_start: bool,
    guard: bool,
) -> Result<Vec<TradeoffPoint>> {
    let solve_point = |r: f64, init: Option<Vec<f64>>| -> (TradeoffPoint, Option<Vec<f64>>) {
        let params = match cfg.solver_params(r) {
            Ok(mut p) => {
                p.monotone_guard = p.monotone_guard || guard;
                if let Some(g) = init {
                    p.g_init = GInit::Explicit(g);
                }
                p
            }
            Err(_) => {
                return (
                    TradeoffPoint { r_sum: r, mse: f64::NAN, iterations: 0, status: "config-error" },
                    None,
                )
            }
        };
        match solver::ao_solve(scenario, &params) {
            Ok(sol) => {
                let point = TradeoffPoint {
                    r_sum: r,
                    mse: sol.mse,
                    iterations: sol.trace.iterations.len() - 1,
                    status: match sol.trace.terminated_by {
                        Termination::ToleranceMet => "converged",
                        Termination::MaxIterations => "max-iterations",
                        Termination::Infeasible => "infeasible",
                    },
                };
                (point, Some(sol.alloc.g))
            }
            Err(QiccError::Infeasible { .. }) => (
                TradeoffPoint { r_sum: r, mse: f64::NAN, iterations: 0, status: "infeasible" },
                None,
            ),
            Err(_) => (
                TradeoffPoint { r_sum: r, mse: f64::NAN, iterations: 0, status: "error" },
                None,
            ),
        }
    };

    if warm_start {
        let mut points = Vec::with_capacity(grid.len());
        let mut prev_g: Option<Vec<f64>> = None;
        for &r in grid {
            let (point, g) = solve_point(r, prev_g.take());
            if g.is_some() {
                prev_g = g;
            }
            points.push(point);
        }
        Ok(points)
    } else {
        let pool = sweep_pool()?;
        Ok(pool.install(|| {
            use rayon::prelude::*;
            grid.par_iter().map(|&r| solve_point(r, None).0).collect()
        }))
    }
}

/// Thread pool for independent sweep points; `QICC_THREADS` caps the width
/// (0 or unset = automatic).
fn sweep_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("QICC_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| QiccError::Config(format!("QICC_THREADS must be an integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| QiccError::Config(format!("thread pool: {e}")))
}

pub fn sweep_csv(points: &[TradeoffPoint]) -> String {
    let mut out = String::from("r_sum_bits,mse,iterations,status\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            sig12(p.r_sum),
            if p.mse.is_nan() { "nan".into() } else { sig12(p.mse) },
            p.iterations,
            p.status
        ));
    }
    out
}

fn cmd_sweep(
    common: &CommonArgs,
    grid: Option<usize>,
    warm_start: bool,
    guard: bool,
) -> Result<i32> {
    let cfg = load_config(common)?;
    let scenario = cfg.scenario()?;
    let n = grid.unwrap_or(cfg.sweep.grid);
    if n < 2 && cfg.sweep.r_sum_list.is_none() {
        return Err(QiccError::Config("sweep needs at least 2 grid points".into()));
    }
    let grid_points = match &cfg.sweep.r_sum_list {
        Some(list) => list.clone(),
        None => sweep_grid(&scenario, n),
    };
    let points = run_sweep(&cfg, &scenario, &grid_points, warm_start, guard)?;
    write_output(common, &sweep_csv(&points))?;
    Ok(EXIT_OK)
}

pub fn converge_csv(scenario: &Scenario, sol: &Solution) -> String {
    let mut out = String::from("iter,mse,n_sig,aggregate_oac_power\n");
    for e in &sol.trace.iterations {
        let agg: f64 = e.g.iter().zip(scenario.eta_oac()).map(|(g, eta)| g * eta).sum();
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.iter,
            sig12(e.mse),
            sig12(e.n_sig),
            sig12(agg)
        ));
    }
    out
}

fn cmd_converge(common: &CommonArgs, r_sum: &str, guard: bool) -> Result<i32> {
    let cfg = load_config(common)?;
    let scenario = cfg.scenario()?;
    let r_sum = parse_r_sum(r_sum, &scenario)?;
    let sol = solve_at(&cfg, &scenario, r_sum, guard)?;
    write_output(common, &converge_csv(&scenario, &sol))?;
    Ok(EXIT_OK)
}

fn cmd_validate(
    common: &CommonArgs,
    r_sum: &str,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<i32> {
    let cfg = load_config(common)?;
    let scenario = cfg.scenario()?;
    let r_sum = parse_r_sum(r_sum, &scenario)?;
    let sol = solve_at(&cfg, &scenario, r_sum, false)?;

    let model = SymbolModel {
        distribution: cfg.distribution()?,
        seed: seed.unwrap_or(cfg.oracle.seed),
    };
    let n = samples.unwrap_or(cfg.oracle.n_samples);
    let est = oracle::simulate_mse(&scenario, &sol.alloc, &sol.comm_powers, &model, n)?;

    let deviation = (est.mse_hat - sol.mse).abs();
    let pass = deviation <= 4.0 * est.std_err;
    let mut report = String::new();
    report.push_str(&format!("analytic_mse = {}\n", sig12(sol.mse)));
    report.push_str(&format!("empirical_mse = {}\n", sig12(est.mse_hat)));
    report.push_str(&format!("std_err = {}\n", sig12(est.std_err)));
    report.push_str(&format!("n_samples = {}\n", est.n_samples));
    report.push_str(&format!(
        "result = {} (|diff| = {}, 4-sigma band = {})\n",
        if pass { "PASS" } else { "FAIL" },
        sig12(deviation),
        sig12(4.0 * est.std_err)
    ));
    write_output(common, &report)?;
    Ok(if pass { EXIT_OK } else { EXIT_VALIDATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spans_endpoints() {
        let cfg = ConfigFile::standard();
        let s = cfg.scenario().unwrap();
        let grid = sweep_grid(&s, 5);
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.0);
        assert!((grid[4] - entropy::max_sum_rate(&s)).abs() < 1e-15);
    }

    #[test]
    fn r_sum_parsing() {
        let s = ConfigFile::standard().scenario().unwrap();
        assert_eq!(parse_r_sum("0", &s).unwrap(), 0.0);
        let half = parse_r_sum("half-max", &s).unwrap();
        assert!((half - 0.5 * entropy::max_sum_rate(&s)).abs() < 1e-15);
        assert!(parse_r_sum("-1", &s).is_err());
        assert!(parse_r_sum("abc", &s).is_err());
    }

    #[test]
    fn sweep_csv_format() {
        let points = vec![
            TradeoffPoint { r_sum: 0.0, mse: 0.5, iterations: 1, status: "converged" },
            TradeoffPoint { r_sum: 1.0, mse: f64::NAN, iterations: 0, status: "infeasible" },
        ];
        let csv = sweep_csv(&points);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "r_sum_bits,mse,iterations,status");
        assert_eq!(lines.next().unwrap(), "0,5.00000000000e-1,1,converged");
        assert_eq!(lines.next().unwrap(), "1.00000000000e0,nan,0,infeasible");
    }
}
