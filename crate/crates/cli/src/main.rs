//! `hole-qft`: run the hole-theory and Fock-space experiments from one config.

mod columnar;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, OUT_DIR_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    #[error(transparent)]
    Library(#[from] hole_qft::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use hole_qft::Error as E;
        match self {
            CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Library(E::Leakage { .. } | E::SolveDiverged { .. } | E::NotNormalized(_)) => 2,
            CliError::Library(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hole-qft", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set sim.cutoff=16`. Repeatable; wins over the file.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (beats HOLE_QFT_OUT_DIR and `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form propagator against the time-stepping oracle.
    VerifyEvolution(Common),
    /// Packet plus sea energy as the derived pulse strength grows.
    HtSweep(Common),
    /// Vacuum Schwinger term over the Fock cutoffs.
    Schwinger(Common),
    /// Continuity residual of the stepped evolution and the Fock-space obstruction.
    Continuity(Common),
    /// Consolidated markdown summary, recomputing missing or stale outputs.
    Report(Common),
    /// Print the effective configuration as TOML.
    ShowConfig(Common),
}

enum Action {
    Run(commands::Kind),
    Report,
    ShowConfig,
}

fn run(cli: Cli) -> Result<(), CliError> {
    use commands::Kind;
    let (common, action) = match cli.command {
        Command::VerifyEvolution(c) => (c, Action::Run(Kind::VerifyEvolution)),
        Command::HtSweep(c) => (c, Action::Run(Kind::HtSweep)),
        Command::Schwinger(c) => (c, Action::Run(Kind::Schwinger)),
        Command::Continuity(c) => (c, Action::Run(Kind::Continuity)),
        Command::Report(c) => (c, Action::Report),
        Command::ShowConfig(c) => (c, Action::ShowConfig),
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let cfg = RunConfig::load(common.config.as_deref(), &common.overrides, env_out, common.out)?;
    match action {
        Action::Run(kind) => commands::run_and_write(&cfg, kind),
        Action::Report => commands::report::run(&cfg),
        Action::ShowConfig => {
            print!("{}", toml::to_string(&cfg).expect("config serializes"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
