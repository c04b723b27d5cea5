#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use acmf_core::harness::acceptance::{self, group, CriterionResult};
use acmf_core::harness::{experiment_verdicts, run_experiment, write_verdicts, ExperimentConfig, Verdict};
use acmf_core::profile::{solve_profile, WeightSpec};
use acmf_core::Potential;

#[derive(Parser)]
#[command(name = "acmf", version, about = "Allen-Cahn flow on two-dimensional space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the weighted transition profile and write it as CSV.
    Profile {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        weight_c: f64,
        #[arg(long, default_value_t = 1.0)]
        potential_scale: f64,
        #[arg(long, short, default_value = "profile.csv")]
        output: PathBuf,
    },
    /// Run one simulation of an experiment configuration.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Sweep member to run; the first when absent.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run every member of the epsilon sweep and write verdicts.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance criteria; exit status 1 on any failure.
    ///
    /// With a configuration: the standalone checks plus the verdicts of that
    /// experiment. Without: the full suite over the shipped experiments.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write verdicts.csv for the full suite.
        #[arg(long, default_value = "runs")]
        output: PathBuf,
    },
    /// Kernel identity and finite-difference checks only.
    KernelCheck,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))
}

fn report(criteria: &[CriterionResult]) -> bool {
    for c in criteria {
        println!("{}", c.line());
        for v in &c.verdicts {
            println!("    {}", v.line());
        }
    }
    criteria.iter().all(CriterionResult::pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Profile {
            epsilon,
            weight_c,
            potential_scale,
            output,
        } => {
            if !(potential_scale > 0.0) {
                bail!("potential scale must be positive");
            }
            let p = solve_profile(
                epsilon,
                &Potential::scaled_quartic(potential_scale),
                &WeightSpec::new(weight_c),
            )?;
            p.write_csv(&output)?;
            println!(
                "wrote {} ({} intervals, discrepancy sup {:.3e})",
                output.display(),
                p.intervals(),
                p.discrepancy_sup()
            );
            Ok(true)
        }
        Command::Evolve { config, epsilon } => {
            let mut cfg = load(&config)?;
            let index = match epsilon {
                Some(e) => cfg
                    .epsilon
                    .values
                    .iter()
                    .position(|v| (v - e).abs() <= 1e-12 * e.abs())
                    .with_context(|| format!("epsilon {e} is not in the sweep {:?}", cfg.epsilon.values))?,
                None => 0,
            };
            let shape = cfg.shape_for(index);
            cfg.epsilon.values = vec![cfg.epsilon.values[index]];
            cfg.grid.shape = [shape.0, shape.1];
            cfg.grid.sizes.clear();
            let r = run_experiment(&cfg)?;
            for m in &r.members {
                println!(
                    "eps {}: t = {:.4}, {} steps, extinction {:?} (oracle {:.4}), output {}",
                    m.epsilon,
                    m.final_time,
                    m.steps,
                    m.extinction_time,
                    m.oracle_extinction,
                    m.dir.display()
                );
            }
            Ok(true)
        }
        Command::Sweep { config } => {
            let cfg = load(&config)?;
            let r = run_experiment(&cfg)?;
            let verdicts = experiment_verdicts(&r);
            write_verdicts(&r.dir.join("verdicts.csv"), &verdicts)?;
            for v in &verdicts {
                println!("{}", v.line());
            }
            println!("{} run directories under {}", r.members.len(), r.dir.display());
            Ok(true)
        }
        Command::Verify { config, output } => {
            let (verdicts, dir): (Vec<Verdict>, PathBuf) = match config {
                Some(path) => {
                    let cfg = load(&path)?;
                    cfg.validate()?;
                    let mut v = acceptance::standalone_verdicts()?;
                    let r = run_experiment(&cfg)?;
                    v.extend(experiment_verdicts(&r));
                    (v, r.dir)
                }
                None => {
                    let v = acceptance::full_suite(&mut |msg| log::info!("{msg}"))?;
                    (v, output)
                }
            };
            std::fs::create_dir_all(&dir)?;
            write_verdicts(&dir.join("verdicts.csv"), &verdicts)?;
            Ok(report(&group(&verdicts)))
        }
        Command::KernelCheck => Ok(report(&group(&acceptance::kernel_identities()?))),
    }
}
