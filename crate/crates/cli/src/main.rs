use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ppc_core::report::{run_command, Command, RunOptions};
use ppc_core::specfile::load_spec;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Structure equations, connection and realization checks.
    Check,
    /// Ricci-soliton system with (κ, μ) and Segre data.
    Soliton,
    /// Frame-engine Ricci against the coordinate oracle.
    Crossval,
    /// Rotated-frame bracket probe for the Darboux example.
    ProbeHomogeneity,
    /// Every applicable section.
    Report,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Check => Command::Check,
            Cmd::Soliton => Command::Soliton,
            Cmd::Crossval => Command::Crossval,
            Cmd::ProbeHomogeneity => Command::ProbeHomogeneity,
            Cmd::Report => Command::Report,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Verify paracontact structures and their Ricci solitons.
///
/// Exit status: 0 all checks pass, 1 a residual exceeds its tolerance,
/// 2 input or schema error.
#[derive(Debug, Parser)]
#[command(name = "ppc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Spec file (TOML).
    file: PathBuf,
    /// Override every default tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Number of random sample points (fixed points are added on top).
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Skip sample points where evaluation is singular.
    #[arg(long)]
    skip_singular: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let spec = match load_spec(&cli.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        tol: cli.tol,
        points: cli.points,
        seed: cli.seed,
        skip_singular: cli.skip_singular,
    };
    match run_command(&spec, cli.command.into(), &opts) {
        Ok(report) => {
            match cli.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
