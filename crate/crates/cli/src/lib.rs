//! Command-line front end for the lrsinr-core experiments: JSON config,
//! subcommand dispatch and CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::io::Write;
use std::path::Path;

use lrsinr_core::experiments::{
    eigen_pdf_histogram, listed_eigenvalue_model, mse_sinr_loss_sweep, mse_structured_qf_sweep,
    predict_report, predict_report_at_ratio, separation_sweep, simulate_report, sinr_loss_vs_k, sinr_loss_vs_theta,
    snapshots_for,
};
use lrsinr_core::scenario::build_covariance;

pub use config::{parse_config, resolve, Experiment, ExperimentKind, Format, Overrides, RawConfig, RunConfig};
pub use error::{CliError, Result};
pub use output::{format_sig12, plot_script, to_csv, to_json, Table};

/// Runs the configured experiment and returns its table.
pub fn execute(cfg: &RunConfig) -> Result<Table> {
    let sc = &cfg.scenario;
    let mc = &cfg.mc;
    let kind = cfg.experiment.kind();
    let table = match &cfg.experiment {
        Experiment::Predict { theta_deg, snapshots } => {
            let (report, k, c) = match *snapshots {
                config::Snapshots::K(k) => {
                    if k == 0 {
                        return Err(CliError::validation("k", "must be at least 1"));
                    }
                    (predict_report(sc, *theta_deg, k)?, k, sc.m as f64 / k as f64)
                }
                config::Snapshots::Ratio(c) => {
                    (predict_report_at_ratio(sc, *theta_deg, c)?, snapshots_for(sc.m, c)?, c)
                }
            };
            output::report_table(kind, *theta_deg, k, c, &report)
        }
        Experiment::Simulate { theta_deg, k } => {
            if *k == 0 {
                return Err(CliError::validation("k", "must be at least 1"));
            }
            let report = simulate_report(sc, *theta_deg, *k, mc)?;
            output::report_table(kind, *theta_deg, *k, sc.m as f64 / *k as f64, &report)
        }
        Experiment::SweepK { theta_deg, k_grid } => output::sweep_table(kind, &sinr_loss_vs_k(sc, *theta_deg, k_grid, mc)?),
        Experiment::SweepTheta { k, theta_grid } => {
            output::sweep_table(kind, &sinr_loss_vs_theta(sc, *k, theta_grid, mc)?)
        }
        Experiment::MseQf { eigenvalues, c, m_grid } => {
            output::sweep_table(kind, &mse_structured_qf_sweep(sc, eigenvalues, *c, m_grid, mc)?)
        }
        Experiment::MseSinr { c, m_grid, theta_deg } => {
            output::sweep_table(kind, &mse_sinr_loss_sweep(sc, *c, m_grid, *theta_deg, mc)?)
        }
        Experiment::EigPdf { c, bins, eigenvalues, multiplicity } => {
            let model = match eigenvalues {
                Some(values) => listed_eigenvalue_model(sc.m, values, *multiplicity, sc.sigma2)?,
                None => build_covariance(sc)?,
            };
            output::sweep_table(kind, &eigen_pdf_histogram(&model, *c, mc, *bins)?.to_sweep())
        }
        Experiment::Separation { jnr_db_grid, c_grid } => {
            output::sweep_table(kind, &separation_sweep(sc, jnr_db_grid, c_grid)?)
        }
    };
    Ok(table)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Renders `table` in the configured format to the output path (or
/// standard output), plus the plot script when requested.
pub fn write_output(cfg: &RunConfig, table: &Table) -> Result<()> {
    let text = match cfg.output_format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table),
    };
    match &cfg.output_path {
        Some(path) => write_file(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })?,
    }
    if let (Some(plot), Some(data)) = (&cfg.plot_path, &cfg.output_path) {
        write_file(plot, &plot_script(table.experiment, data))?;
    }
    Ok(())
}

/// Executes and writes; returns the table for diagnostics.
pub fn run(cfg: &RunConfig) -> Result<Table> {
    let table = execute(cfg)?;
    write_output(cfg, &table)?;
    Ok(table)
}
