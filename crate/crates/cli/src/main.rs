use std::path::PathBuf;
use std::process::ExitCode;

use bubblescan::ReturnMode;
use bubblescan_cli::{
    cmd_analyze, cmd_simulate, cmd_validate, OutputFormat, RunConfig, SimulateConfig,
    ValidateConfig,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bubblescan",
    version,
    about = "Detect asset-price bubbles with the U, V and C window statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a daily price CSV (columns `date`, `close`).
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        window: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 10)]
        merge_gap: usize,
        #[arg(long, default_value_t = 1)]
        min_run: usize,
        #[arg(long, default_value = "simple")]
        returns: ReturnMode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "json,csv")]
        formats: Vec<OutputFormat>,
    },
    /// Simulate the null distributions of U, V and C and check them.
    Validate {
        #[arg(long, default_value_t = 100)]
        window: usize,
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Skip writing fig1.svg.
        #[arg(long)]
        no_svg: bool,
    },
    /// Write a synthetic price series for a named scenario or a scenario JSON file.
    Simulate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Analyze {
            input,
            window,
            alpha,
            merge_gap,
            min_run,
            returns,
            out,
            formats,
        } => {
            let cfg = RunConfig {
                input,
                window,
                alpha,
                merge_gap,
                min_run,
                returns,
                out,
                formats,
            };
            let outcome = cmd_analyze(&cfg)?;
            for line in outcome.summary_lines() {
                println!("{line}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            window,
            reps,
            seed,
            out,
            no_svg,
        } => {
            let outcome = cmd_validate(&ValidateConfig {
                window,
                reps,
                seed,
                out,
                svg: !no_svg,
            })?;
            if outcome.low_power {
                eprintln!("warning: {reps} replications give low power; checks may fail by chance");
            }
            for c in &outcome.checks {
                println!(
                    "{} {:<36} {:.5} (limit {:.5})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.limit
                );
            }
            if outcome.simulation.redraws > 0 {
                println!("redrawn degenerate windows: {}", outcome.simulation.redraws);
            }
            Ok(if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Simulate {
            scenario,
            seed,
            out,
        } => {
            let path = cmd_simulate(&SimulateConfig {
                scenario,
                seed,
                out,
            })?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
