use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use squeezecav::{execute, parse_config_with, Mode, Overrides, RunError, SCHEMA_HELP};

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Evolve,
    Steady,
    Threshold,
    OracleCompare,
    Figures,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Evolve => Mode::Evolve,
            CliMode::Steady => Mode::Steady,
            CliMode::Threshold => Mode::Threshold,
            CliMode::OracleCompare => Mode::OracleCompare,
            CliMode::Figures => Mode::Figures,
        }
    }
}

/// Squeezed light in a lossy, parametrically pumped cavity.
///
/// Exit codes: 0 success, 2 config error, 3 solver error, 4 I/O error.
#[derive(Parser)]
#[command(name = "squeezecav", version, after_long_help = SCHEMA_HELP)]
struct Cli {
    /// Scenario to run; overrides the config's `mode`.
    mode: CliMode,
    /// JSON config file (schema in --help).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RK4 step; overrides `dtau`.
    #[arg(long)]
    dtau: Option<f64>,
    /// Final time; overrides `tau_end`.
    #[arg(long = "tau-end")]
    tau_end: Option<f64>,
}

fn run(cli: Cli) -> Result<bool, RunError> {
    let text = fs::read_to_string(&cli.config).map_err(|source| RunError::Io {
        path: cli.config.clone(),
        source,
    })?;
    let overrides = Overrides {
        mode: Some(cli.mode.into()),
        output_dir: cli.out,
        dtau: cli.dtau,
        tau_end: cli.tau_end,
    };
    let cfg = parse_config_with(&text, &overrides)?;
    let outcome = execute(&cfg)?;
    for c in outcome.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: {}", c.name, c.detail);
    }
    for f in &outcome.failures {
        eprintln!("{}: {}", f.scenario, f.error);
    }
    eprintln!(
        "wrote {} dataset(s) and manifest.json to {}",
        outcome.datasets.len(),
        cfg.output_dir.display()
    );
    Ok(outcome.succeeded())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
