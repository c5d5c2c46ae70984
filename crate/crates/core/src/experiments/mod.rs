//! Monte-Carlo harness and the parameter sweeps built on it.

mod mc;
mod sweeps;

pub use mc::{mean, mse, run_trials, std_dev, std_error, McConfig};
pub use sweeps::{
    eigen_pdf_histogram, listed_eigenvalue_model, mse_sinr_loss_sweep, mse_structured_qf_sweep,
    pooled_eigenvalues, predict_report, predict_report_at_ratio, separation_sweep,
    separation_threshold_db, simulate_report, sinr_loss_vs_k, sinr_loss_vs_theta, snapshots_for,
    Histogram, Multiplicity, SweepRecord, SweepResult, DEGENERATE_FLAG,
};
