//! `cga-opt` — run optimization campaigns from JSON manifests.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cga_opt::cli::{cmd_compare, cmd_eval, cmd_optimize, error_chain};

#[derive(Parser)]
#[command(name = "cga-opt", version, about = "Circuit-parameter optimization campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization campaign and write its artifacts.
    Optimize {
        /// Run manifest (JSON).
        #[arg(short, long)]
        config: PathBuf,
        /// Output directory (overrides the manifest's `output_dir`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run CGA and the GA baseline across seeds under equal budgets.
    Compare {
        /// Run manifest (JSON); its algorithm section must be `cga`.
        #[arg(short, long)]
        config: PathBuf,
        /// Seeds: an inclusive range `1..20` or a comma list `3,1,4`.
        #[arg(long)]
        seeds: Option<String>,
        /// Output directory (overrides the manifest's `output_dir`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a single parameter point (or raw metrics) and print the FoM.
    Eval {
        /// Run manifest (JSON).
        #[arg(short, long)]
        config: PathBuf,
        /// `initial` or `name=value,...`; unnamed parameters keep initials.
        #[arg(long)]
        values: Option<String>,
        /// Raw `gain_db,power_w,nf_db` — bypasses the evaluator entirely.
        #[arg(long)]
        metrics: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Optimize { config, output } => {
            cmd_optimize(config, output.as_deref()).map(|_| ())
        }
        Command::Compare {
            config,
            seeds,
            output,
        } => cmd_compare(config, seeds.as_deref(), output.as_deref()).map(|_| ()),
        Command::Eval {
            config,
            values,
            metrics,
        } => cmd_eval(config, values.as_deref(), metrics.as_deref()).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", error_chain(&err));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
