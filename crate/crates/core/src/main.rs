use std::path::PathBuf;
use std::process::ExitCode;

use blowup_lab::cli::{parse_config, run_pipeline, Command, Overrides};
use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Freewave,
    Blowup,
    Numerology,
    Regularity,
    All,
}

/// Certify the free wave, the blowup construction and the exponent ledgers.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// JSON file of defaults; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cutoff width δ, decimal or fraction (default 1/64).
    #[arg(long)]
    delta: Option<String>,
    /// Base frequency N₀ (default 1024).
    #[arg(long)]
    n0: Option<String>,
    /// Last scale i (default 6).
    #[arg(long)]
    imax: Option<usize>,
    /// Dimension N or range N..M.
    #[arg(long)]
    d: Option<String>,
    /// Reading of the d = 10 first branch: printed or corrected.
    #[arg(long)]
    variant: Option<String>,
    /// Output directory (default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Freewave => Command::Freewave,
        Cmd::Blowup => Command::Blowup,
        Cmd::Numerology => Command::Numerology,
        Cmd::Regularity => Command::Regularity,
        Cmd::All => Command::All,
    };
    let flags = Overrides {
        config: args.config,
        delta: args.delta,
        n0: args.n0,
        i_max: args.imax,
        d: args.d,
        variant: args.variant,
        out: args.out,
        threads: args.threads,
    };
    let cfg = match parse_config(command, &flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("verify: {e}");
            return ExitCode::from(2);
        }
    }
    match run_pipeline(&cfg) {
        Ok(report) => {
            for (name, secs) in &report.timings {
                let status = if report.errors.contains_key(name) {
                    "ERROR"
                } else if report.certificates[name]["pass"].as_bool().unwrap_or(false) {
                    "pass"
                } else {
                    "FAIL"
                };
                eprintln!("{name:<12} {status:<5} {secs:8.2} s");
            }
            for (name, e) in &report.errors {
                eprintln!("{name}: {e}");
            }
            eprintln!("report: {}", cfg.out.join("report.json").display());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::FAILURE
        }
    }
}
