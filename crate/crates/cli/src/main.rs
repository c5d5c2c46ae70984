use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lrsinr_cli::config::{parse_raw, resolve, ExperimentKind, Format, Overrides, RawConfig};
use lrsinr_cli::{run, CliError};

/// SINR loss of adaptive low-rank filters: closed-form predictions and
/// Monte-Carlo sweeps. Angles are in degrees.
#[derive(Debug, Parser)]
#[command(name = "lrsinr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials (overrides the config).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 = all cores, 1 = sequential.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write a gnuplot script for the CSV output.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Closed-form SINR-loss predictions at one configuration.
    Predict,
    /// Predictions plus Monte-Carlo means at one configuration.
    Simulate,
    /// Low-rank SINR loss against the snapshot count K.
    SweepK,
    /// Low-rank SINR loss against the target angle.
    SweepTheta,
    /// MSE of the structured quadratic form against its limits over m.
    MseQf,
    /// MSE of the low-rank SINR loss against its limits over m.
    MseSinr,
    /// Histogram of sample-covariance eigenvalues.
    EigPdf,
    /// Separation margin over JNR and aspect ratio.
    Separation,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Predict => ExperimentKind::Predict,
            Command::Simulate => ExperimentKind::Simulate,
            Command::SweepK => ExperimentKind::SweepK,
            Command::SweepTheta => ExperimentKind::SweepTheta,
            Command::MseQf => ExperimentKind::MseQf,
            Command::MseSinr => ExperimentKind::MseSinr,
            Command::EigPdf => ExperimentKind::EigPdf,
            Command::Separation => ExperimentKind::Separation,
        }
    }
}

fn load(cli: &Cli) -> Result<lrsinr_cli::RunConfig, CliError> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_raw(&text)?
        }
        None => RawConfig::default(),
    };
    raw.apply(&Overrides {
        seed: cli.seed,
        trials: cli.trials,
        threads: cli.threads,
        out: cli.out.clone(),
        format: cli.format,
        plot: cli.plot.clone(),
    });
    resolve(raw, Some(cli.command.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match load(&cli).and_then(|cfg| run(&cfg)) {
        Ok(table) => {
            for (name, value) in &table.summary {
                eprintln!("{name} = {}", lrsinr_cli::format_sig12(*value));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
