use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pipenet_cli::commands::{self, Report};
use pipenet_cli::verify::VerifyOptions;
use pipenet_cli::Exit;
use pipenet_core::junction::coupling_jacobian;

/// Junction solver and network simulator for gas flow in pipe networks.
///
/// Exit codes: 0 success, 1 configuration or I/O error, 2 no convergence,
/// 3 flow reversal, 4 degenerate inflow, 5 invalid topology, 6 numerical
/// failure, 7 verification failure.
#[derive(Parser)]
#[command(name = "pipenet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the generalised Riemann problem for constant pipe states.
    SolveJunction { config: PathBuf },
    /// Run a network simulation and write the output bundle.
    Simulate {
        config: PathBuf,
        /// Run both the entropy-mix and the pressure-equal coupling.
        #[arg(long)]
        mode_compare: bool,
        /// Output directory (defaults to `output.directory` of the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact solution of the two-pipe file read as a standard shock tube.
    ShockTube {
        config: PathBuf,
        /// Write the exact profile at `run.end_time` to this CSV file.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Run the randomised self-checks.
    Verify {
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = VerifyOptions::default().trials)]
        trials: usize,
    },
}

fn finish(result: Result<Report, pipenet_cli::CliError>) -> ExitCode {
    match result {
        Ok(report) => {
            print!("{}", report.stdout);
            eprint!("{}", report.stderr);
            if report.failed_checks {
                ExitCode::from(Exit::VerifyFailed as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.exit.class(), e.message);
            ExitCode::from(e.exit as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(Exit::Config as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    finish(match cli.command {
        Command::SolveJunction { config } => commands::solve_junction(&config),
        Command::Simulate {
            config,
            mode_compare,
            out,
        } => commands::simulate(&config, mode_compare, out.as_deref()),
        Command::ShockTube { config, profile } => commands::shock_tube(&config, profile.as_deref()),
        Command::Verify { seed, trials } => Ok(commands::verify(
            &VerifyOptions { seed, trials },
            &coupling_jacobian,
        )),
    })
}
