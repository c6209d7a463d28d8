use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use starmod_cli::{index_command, morita_command, run_path, validate_path, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "starmod", version, about = "Exact checks for star products, deformed modules and Morita classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-task wall-clock times (makes reports run-dependent).
        #[arg(long)]
        timings: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a scenario file's schema and references without running it.
    Validate { scenario: PathBuf },
    /// Index series of the deformation of a classical projection.
    Index {
        projection: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long = "K", default_value_t = 4)]
        order: usize,
    },
    /// Decide Morita equivalence of two characteristic classes.
    Morita { model: PathBuf, class_a: PathBuf, class_b: PathBuf },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { scenario, format, out, timings, jobs } => {
            let report = match run_path(&scenario, RunOptions { timings, jobs }) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let body = match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            };
            match out {
                Some(path) => {
                    if let Err(source) = std::fs::write(&path, body) {
                        return fail(CliError::Io { path, source });
                    }
                }
                None => print!("{body}"),
            }
            if report.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Validate { scenario } => match validate_path(&scenario) {
            Ok(diags) => {
                println!("{}", serde_json::to_string_pretty(&diags).expect("diagnostics serialize"));
                if diags.is_empty() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(e),
        },
        Command::Index { projection, algebra, order } => match index_command(&projection, &algebra, order) {
            Ok(v) => {
                println!("{v}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Morita { model, class_a, class_b } => match morita_command(&model, &class_a, &class_b) {
            Ok(r) => {
                println!("{}", serde_json::to_string(&r).expect("report serializes"));
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
