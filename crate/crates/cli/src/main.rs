use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tcpks::lab::{self, RunConfig};

/// Taylor-Couette chemotaxis laboratory.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// key=value configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; defaults to the hardware parallelism.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Random seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time-step one run; exit 0 bounded, 2 blown up, 3 undecided.
    Simulate,
    /// Linear-model rate sweep over sweep_A x sweep_k.
    Sweep,
    /// Random-sample checks of the elliptic estimates; exit 0 iff all hold within 5%.
    VerifyLemmas,
    /// Re-fit per-mode decay rates from an existing series.csv.
    FitRates {
        /// Path of the series.csv to re-fit.
        series: PathBuf,
    },
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            lab::parse_config(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.params.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Simulate => {
            let out = lab::cmd_simulate(&cfg)?;
            println!("{}", out.classification);
            println!("summary: {}", out.summary_path.display());
            Ok(out.exit_code as u8)
        }
        Command::Sweep => {
            let out = lab::cmd_sweep(&cfg, cli.workers)?;
            println!("p_A = {:.4}", out.exponents.p_a);
            println!("p_k = {:.4}", out.exponents.p_k);
            Ok(0)
        }
        Command::VerifyLemmas => {
            let out = lab::cmd_verify_lemmas(&cfg)?;
            println!("{} violations beyond 5% slack", out.violations);
            Ok(out.exit_code as u8)
        }
        Command::FitRates { series } => {
            let rates = lab::cmd_fit_rates(series, &cfg.out_dir, cfg.fit_window)?;
            for (name, rate) in rates {
                println!("{name} {rate:.6e}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
