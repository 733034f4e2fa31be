// `!(x > 0.0)` guards reject NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod pipeline;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use pipeline::{Outputs, PipelineError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rrlab",
    about = "Radiation-reaction numerics laboratory: trajectories, spectra, position shifts, \
             WKB amplitude checks, wave packets and one-loop corrections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// INI-style configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir` from the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write into a non-empty output directory.
    #[arg(long)]
    force: bool,
    /// Also write gnuplot scripts next to each CSV.
    #[arg(long)]
    emit_gnuplot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the unperturbed trajectory and export it.
    Trajectory(RunArgs),
    /// Trajectory plus the acceleration spectrum.
    Spectrum(RunArgs),
    /// Larmor power, radiated energy and emission probability.
    Radiation(RunArgs),
    /// All four position-shift routes and their comparison.
    Shift(RunArgs),
    /// ℏ-ladder comparison of the direct and asymptotic amplitudes.
    WkbCheck(RunArgs),
    /// Wave-packet normalization and position expectations.
    Packet(RunArgs),
    /// Mass shift, potential correction and δV forward shift.
    Renorm(RunArgs),
    /// Shift pipeline swept over hbar, v_minus_inf or p_bar.
    Sweep(RunArgs),
}

fn run(
    args: &RunArgs,
    f: impl Fn(&RunConfig, &Outputs) -> Result<(), PipelineError>,
) -> Result<(), PipelineError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        PipelineError::Validation(format!(
            "cannot read config `{}`: {e}",
            args.config.display()
        ))
    })?;
    let cfg = RunConfig::parse(&text)?;
    let dir = args.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    let out = Outputs::prepare(&dir, args.force, args.emit_gnuplot)?;
    f(&cfg, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Trajectory(a) => run(a, pipeline::run_trajectory),
        Command::Spectrum(a) => run(a, pipeline::run_spectrum),
        Command::Radiation(a) => run(a, pipeline::run_radiation),
        Command::Shift(a) => run(a, pipeline::run_shift),
        Command::WkbCheck(a) => run(a, pipeline::run_wkb_check),
        Command::Packet(a) => run(a, pipeline::run_packet),
        Command::Renorm(a) => run(a, pipeline::run_renorm),
        Command::Sweep(a) => run(a, pipeline::run_sweep),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
