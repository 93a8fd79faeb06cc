use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qw3_cli::{load_config, run_experiment, RunError};

#[derive(Parser)]
#[command(
    name = "qw3",
    version,
    about = "Three-state quantum walk with decoherence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run { config: PathBuf },
    /// Run several experiments; each writes to its own output_dir.
    Sweep { configs: Vec<PathBuf> },
}

fn run_one(path: &Path) -> Result<(), RunError> {
    let cfg = load_config(path)?;
    let report = run_experiment(&cfg)?;
    println!(
        "{}: {} steps, sigma {:.6}, wrote {} ({:.3} s)",
        path.display(),
        cfg.steps,
        report.sigma_series.sigma.last().copied().unwrap_or(0.0),
        cfg.output_dir.display(),
        report.metadata.wall_time_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    // Usage errors are config errors here; clap's own code 2 means capacity.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    let paths = match cli.command {
        Command::Run { config } => vec![config],
        Command::Sweep { configs } => configs,
    };
    let mut code = 0;
    for path in &paths {
        if let Err(err) = run_one(path) {
            eprintln!("error: {}: {err}", path.display());
            code = match (code, err.exit_code()) {
                (2, _) | (_, 2) => 2,
                _ => 1,
            };
        }
    }
    ExitCode::from(code as u8)
}
