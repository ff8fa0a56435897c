//! `wbl`: runs weighted Bergman space experiments from a JSON config.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Parser, Subcommand};

use commands::{default_out, Failure, Run};
use config::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(name = "wbl", version, about = "Polynomial approximation experiments in weighted Bergman spaces")]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; defaults to the config's `out`, then `.`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `quad.tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the Monte-Carlo cross-checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gram matrix of the monomials and its condition estimate.
    Gram,
    /// d_n = dist(f, polynomials of degree <= n) for n <= n_max.
    DensityScan,
    /// 1/sqrt(z) scan on a moon, with a pole control.
    MoonCriterion,
    /// Non-density certificate for cos(z/2).
    Certify {
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "M")]
        m: Option<f64>,
    },
    /// Sandwich bounds for the Poisson extension of |x|^p.
    PoissonCheck {
        #[arg(long)]
        p: Option<f64>,
    },
    /// Integral of prod |z - z_i|^-alpha_i against the equal-area bound.
    PotentialCheck,
    /// Stage-k geometry of the nested arc regions and the strip search.
    MoonStage,
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = cli.tol {
        cfg.quad.tol = t;
    }
    match cli.command {
        Command::Certify { p, m } => {
            if let Some(p) = p {
                cfg.certify.p = p;
            }
            if m.is_some() {
                cfg.certify.m = m;
            }
        }
        Command::PoissonCheck { p: Some(p) } => cfg.poisson.p = p,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("WBL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("WBL_THREADS = {v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numerical(e.into()))
}

fn run(cli: Cli) -> Result<String, Failure> {
    threads()?;
    let config = resolve(&cli)?;
    let out = default_out(&config, cli.out.as_deref());
    let r = Run {
        config,
        out,
        seed: cli.seed,
    };
    match cli.command {
        Command::Gram => r.gram(),
        Command::DensityScan => r.density_scan(),
        Command::MoonCriterion => r.moon_criterion(),
        Command::Certify { .. } => r.certify(),
        Command::PoissonCheck { .. } => r.poisson_check(),
        Command::PotentialCheck => r.potential_check(),
        Command::MoonStage => r.moon_stage(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code() as u8)
        }
    }
}
