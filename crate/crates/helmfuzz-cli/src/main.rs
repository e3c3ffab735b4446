//! `helmfuzz` — closed-loop tanker autopilot simulations from the command
//! line. Exit codes: 0 success, 2 usage or configuration error, 3
//! simulation failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use helmfuzz_cli::commands;

#[derive(Parser)]
#[command(name = "helmfuzz", version, about = "Fuzzy heading autopilot simulator for a large tanker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop scenario and write the log as CSV
    Run(RunArgs),
    /// Inspect and validate fuzzy controller definitions
    Fis {
        #[command(subcommand)]
        command: FisCommand,
    },
    /// Run a grid of scenarios over depths and command angles
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in scenario: fig4 (45 deg, 24 m), fig5 (45 deg, 200 m) or
    /// fig6 (10/20/-5 deg over a 24-200 m depth ramp)
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario config file (see the README for the format)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path, or '-' for standard output
    #[arg(long)]
    out: String,
    /// Also write a gnuplot script rendering the run
    #[arg(long)]
    emit_plot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FisCommand {
    /// Evaluate the controller at one point; inputs are in radians because
    /// they address the controller universes directly
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        psi_err: f64,
        #[arg(long, allow_hyphen_values = true)]
        r_err: f64,
        /// 'builtin' or a path to a .fis file
        #[arg(long, default_value = "builtin")]
        fis: String,
    },
    /// Validate a .fis file; '-' reads standard input
    Check { path: String },
    /// Print the canonical form of the built-in controller
    Dump,
}

#[derive(Args)]
struct SweepArgs {
    /// Base scenario config; defaults to the built-in baseline
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated water depths in metres
    #[arg(long)]
    depths: Option<String>,
    /// Comma-separated heading commands in degrees
    #[arg(long)]
    commands: Option<String>,
    /// Directory for per-cell CSVs and summary.csv
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads (default: HELMFUZZ_JOBS, else one per core)
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::cmd_run(
            args.preset.as_deref(),
            args.config.as_deref(),
            &args.out,
            args.emit_plot.as_deref(),
        ),
        Command::Fis { command } => match command {
            FisCommand::Eval { psi_err, r_err, fis } => {
                commands::cmd_fis_eval(psi_err, r_err, &fis)
            }
            FisCommand::Check { path } => commands::cmd_fis_check(&path),
            FisCommand::Dump => commands::cmd_fis_dump(),
        },
        Command::Sweep(args) => commands::cmd_sweep(
            args.config.as_deref(),
            args.depths.as_deref(),
            args.commands.as_deref(),
            &args.out_dir,
            args.jobs,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
