use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use minkflow_cli::{cmd_profile, cmd_run, cmd_sweep, cmd_verify, parse_config, CliError};

/// Solver and diagnostics runner for quasilinear parabolic flows
/// u_t = (v(u_x))_x with Neumann slope data, including the mean curvature
/// flow of spacelike graphs in the Lorentz-Minkowski plane.
#[derive(Parser)]
#[command(name = "minkflow", version)]
struct Cli {
    /// Directory all output files are written into.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Suppress summary output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow and write trace, profile and translator CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also write an SVG overlay of the final state and the translator.
        #[arg(long)]
        plot: bool,
    },
    /// Run the flow and check every enabled invariant; exit 0 iff all pass.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the Cartesian product of the sweep axes and write a summary CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit the translator profile CSV without running the flow.
    Profile {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &PathBuf) -> Result<minkflow_cli::RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { config, plot } => {
            let cfg = load(&config)?;
            cmd_run(&cfg, &cli.output_dir, cli.quiet, plot)?;
            Ok(true)
        }
        Command::Verify { config } => {
            let cfg = load(&config)?;
            cmd_verify(&cfg, cli.quiet)
        }
        Command::Sweep { config } => {
            let cfg = load(&config)?;
            cmd_sweep(&cfg, &cli.output_dir, cli.quiet)?;
            Ok(true)
        }
        Command::Profile { config } => {
            let cfg = load(&config)?;
            cmd_profile(&cfg, &cli.output_dir, cli.quiet)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
