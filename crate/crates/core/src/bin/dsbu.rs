use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dsbu::app::execute;
use dsbu::io::config::{parse_config_for, Mode};
use dsbu::Error;

/// Davey–Stewartson blow-up laboratory.
#[derive(Parser)]
#[command(name = "dsbu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the ground state and the sharp constant.
    GroundState { config: PathBuf },
    /// Time-step the Cauchy problem and record conserved quantities.
    Evolve { config: PathBuf },
    /// Windowed-mass traces over the snapshots of an evolve run.
    Analyze { config: PathBuf },
    /// Compare against built-in oracles.
    Verify { config: Option<PathBuf> },
}

fn run(cli: Cli) -> Result<(), Error> {
    let (mode, path) = match cli.command {
        Command::GroundState { config } => (Mode::GroundState, Some(config)),
        Command::Evolve { config } => (Mode::Evolve, Some(config)),
        Command::Analyze { config } => (Mode::Analyze, Some(config)),
        Command::Verify { config } => (Mode::Verify, config),
    };
    let text = match &path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    let cfg = parse_config_for(&text, mode)?;
    let out_dir = std::env::var_os("DSBU_OUTPUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| cfg.output_dir.clone());
    execute(&cfg, &out_dir, &mut std::io::stdout().lock())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dsbu: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
