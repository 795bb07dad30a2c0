use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use vlbm::analysis::layer;
use vlbm::cases::{self, RunConfig, RunOptions, StudyTarget};
use vlbm::monotonicity::max_bgk_omega;
use vlbm::output;

#[derive(Parser)]
#[command(name = "vlbm", version, about = "Vectorial lattice Boltzmann benchmarks with equilibrium boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case and write CSV outputs.
    Run {
        config: PathBuf,
        /// Output directory (overridden by VLBM_OUTPUT_DIR).
        #[arg(long)]
        output_dir: Option<String>,
    },
    /// Print the monotonicity report of a configuration.
    Check { config: PathBuf },
    /// Grid-refinement study.
    Study {
        config: PathBuf,
        /// Resolutions, e.g. `--j 100,200,400` (default: `study_j` of the config).
        #[arg(long, value_delimiter = ',')]
        j: Option<Vec<usize>>,
        /// `exact`, `godunov` or `self` (default: `study_target` of the config).
        #[arg(long)]
        target: Option<String>,
    },
    /// Boundary-layer predictors next to the simulated layer (D1Q2 transport).
    Layer {
        #[arg(long = "cells", default_value_t = 20)]
        j: usize,
        /// Courant number, in (-1, 0).
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        courant: f64,
        /// Wrong trace imposed at the outflow.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        trace: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// List the registered cases.
    List,
}

fn load(path: &PathBuf) -> Result<RunConfig> {
    RunConfig::load(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, output_dir } => {
            let mut cfg = load(&config)?;
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            let problem = cases::build_problem(&cfg)?;
            let out = cases::run_problem(&problem, RunOptions::from_config(&cfg, &problem))?;
            let dir = cfg.resolve_output_dir();
            let files = output::write_run(&dir, &problem, &out)?;
            println!("case = {}", problem.name);
            println!("verdict = {}", out.metadata.report.verdict);
            println!("steps = {}", out.metadata.steps);
            println!("realized_final_time = {:.16e}", out.metadata.realized_time);
            if out.metadata.fallbacks > 0 {
                println!("guard_fallbacks = {}", out.metadata.fallbacks);
            }
            if out.metadata.flagged_traces > 0 {
                println!("flagged_traces = {}", out.metadata.flagged_traces);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Check { config } => {
            let cfg = load(&config)?;
            let problem = cases::build_problem(&cfg)?;
            let report = problem.monotonicity()?;
            println!("case = {}", problem.name);
            println!("{report}");
            if problem.equilibrium.flux.is_scalar() {
                let star = max_bgk_omega(&problem.equilibrium, problem.data_bound)?;
                println!("max_bgk_omega = {:.16e}", star.omega);
                println!("max_bgk_omega_admissible = {}", star.admissible);
            }
        }
        Command::Study { config, j, target } => {
            let cfg = load(&config)?;
            let js = j.or_else(|| cfg.study_j.clone()).context("no resolutions: pass --j or set study_j")?;
            let target: StudyTarget = target
                .or_else(|| cfg.study_target.clone())
                .unwrap_or_else(|| "exact".into())
                .parse()?;
            let result = cases::convergence_study(&cfg, &js, target)?;
            let meta = cases::build_problem(&cfg)?.resolved;
            let csv = output::study_csv(&meta, &result);
            let dir = cfg.resolve_output_dir();
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(format!("{}_study.csv", cfg.case));
            std::fs::write(&path, &csv)?;
            println!("j,dx,l1_error");
            for r in &result.rows {
                println!("{},{:.16e},{:.16e}", r.j, r.dx, r.error);
            }
            match result.slope {
                Some(s) => println!("slope = {s:.16e}"),
                None => println!("slope = none"),
            }
            println!("wrote {}", path.display());
        }
        Command::Layer { j, courant, trace, steps, omega } => {
            if !(courant > -1.0 && courant < 0.0) {
                bail!("the Courant number must lie in (-1, 0)");
            }
            let sim = layer::simulate_layer(j, courant, trace, steps, omega)?;
            let kappa = layer::stable_root_kappa1(omega, courant).ok();
            match kappa {
                Some(k) => println!("# kappa_minus(1) = {k:.16e}"),
                None => println!("# kappa_minus(1) undefined"),
            }
            let at_one = omega == 1.0;
            let (cheb, oracle) = if at_one {
                (
                    Some(layer::boundary_layer_chebyshev_profile(j, courant, trace, steps)?),
                    Some(layer::tridiagonal_oracle(j, courant, trace, steps)?),
                )
            } else {
                (None, None)
            };
            println!("j,simulation,longtime,neumann,chebyshev,tridiagonal");
            for (i, u) in sim.iter().enumerate() {
                let lt = layer::boundary_layer_longtime(omega, courant, trace, i).map(|v| format!("{v:.16e}")).unwrap_or_default();
                let neu = if at_one { format!("{:.16e}", layer::neumann_limit(courant, trace, i)) } else { String::new() };
                let c = cheb.as_ref().map(|v| format!("{:.16e}", v[i])).unwrap_or_default();
                let o = oracle.as_ref().map(|v| format!("{:.16e}", v[i])).unwrap_or_default();
                println!("{i},{u:.16e},{lt},{neu},{c},{o}");
            }
        }
        Command::List => {
            for c in cases::registry() {
                println!(
                    "{:<18} {} J={} lambda={} omega={} T={}  {}",
                    c.name,
                    c.stencil.name(),
                    c.default_j,
                    c.default_lambda,
                    c.default_omega,
                    c.default_t_final,
                    c.description
                );
            }
        }
    }
    Ok(())
}
