use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use matconc_cli::{emit_report, run_experiment, ExperimentConfig, Format};

#[derive(Parser)]
#[command(name = "matconc", version, about = "Monte Carlo audits of matrix concentration bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its CSV tables and JSON summary.
    Run {
        config: PathBuf,
        /// Output directory (default: the config's `output_dir`, else `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Replace the config's trial count.
        #[arg(long)]
        trials_override: Option<usize>,
    },
}

fn run(config: PathBuf, out: Option<PathBuf>, threads: Option<usize>, trials: Option<usize>) -> anyhow::Result<bool> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut cfg = ExperimentConfig::from_path(&config)?;
    if let Some(n) = trials {
        cfg.trials = n;
    }
    let report = run_experiment(&cfg)?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
    let written = emit_report(&report, &[Format::Csv, Format::Json], &dir)?;
    for v in &report.verdicts {
        println!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    for (name, k) in &report.fitted_k {
        println!("fitted K {name} = {k:.6}");
    }
    println!("wrote {} files to {}", written.len(), dir.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run {
        config,
        out,
        threads,
        trials_override,
    } = cli.command;
    match run(config, out, threads, trials_override) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
