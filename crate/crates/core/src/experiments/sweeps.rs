//! Parameter sweeps, spectrum histograms and single-configuration reports.

use serde::{Deserialize, Serialize};

use super::mc::{mean, mse, run_trials, std_error, McConfig};
use crate::error::{Error, Result};
use crate::estimators::{
    estimated_complement, sinr_loss_fullrank, sinr_loss_lr, true_projectors, ComplementOperator,
    SinrLossReport, SubspaceComplement,
};
use crate::linalg::{hermitian_eigvals, inner, quad_form, ComplexMatrix, C64, ONE};
use crate::rmt::{
    deterministic_projector, deterministic_structured_qf, performance_break, predict_gifo_baseline,
    predict_sinr_loss_fullrank, MpLaw,
};
use crate::scenario::{
    build_covariance, build_covariance_with_eigenvalues, draw_samples, sample_scm, spiked_spectrum,
    steering_vector, CovarianceModel, ScenarioConfig,
};

/// Flag attached to grid points whose steering vector lies in the
/// interference subspace.
pub const DEGENERATE_FLAG: &str = "degenerate_steering";

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis_value: f64,
    pub mc_mean: Option<f64>,
    /// Standard error of `mc_mean`.
    pub mc_std: Option<f64>,
    pub prediction_spiked: Option<f64>,
    pub prediction_naive: Option<f64>,
    pub prediction_gifo: Option<f64>,
    pub trials: usize,
    /// Sweep-specific columns, in output order.
    pub extra: Vec<(String, Option<f64>)>,
    pub flag: Option<String>,
}

impl SweepRecord {
    pub fn new(axis_value: f64) -> Self {
        Self {
            axis_value,
            mc_mean: None,
            mc_std: None,
            prediction_spiked: None,
            prediction_naive: None,
            prediction_gifo: None,
            trials: 0,
            extra: Vec::new(),
            flag: None,
        }
    }

    fn with_mc(mut self, values: &[f64]) -> Self {
        self.mc_mean = Some(mean(values));
        self.mc_std = Some(std_error(values));
        self.trials = values.len();
        self
    }

    fn push(&mut self, name: &str, value: Option<f64>) {
        self.extra.push((name.to_string(), value));
    }

    /// Value of a sweep-specific column.
    pub fn extra(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|(n, _)| n == name).and_then(|(_, v)| *v)
    }
}

/// Metric tabulated against a swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub records: Vec<SweepRecord>,
    /// Scalar by-products (e.g. the performance-break angle).
    pub summary: Vec<(String, f64)>,
}

impl SweepResult {
    pub fn axis_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.axis_value).collect()
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// How an explicit eigenvalue list populates the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    /// One eigenvector per listed spike.
    #[default]
    Fixed,
    /// Each listed spike, and the noise level, gets `m/(n+1)` eigenvectors.
    Proportional,
}

/// Diagonal covariance with the listed spike eigenvalues (canonical basis)
/// and noise level `sigma2` elsewhere.
pub fn listed_eigenvalue_model(
    m: usize,
    spikes: &[f64],
    multiplicity: Multiplicity,
    sigma2: f64,
) -> Result<CovarianceModel> {
    let mut sorted = spikes.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let values: Vec<f64> = match multiplicity {
        Multiplicity::Fixed => sorted,
        Multiplicity::Proportional => {
            let each = m / (spikes.len() + 1);
            sorted.iter().flat_map(|&v| std::iter::repeat_n(v, each)).collect()
        }
    };
    let r = values.len();
    if r >= m {
        return Err(Error::RankTooLarge { rank: r, dim: m });
    }
    let basis = ComplexMatrix::from_fn(m, r, |i, j| if i == j { ONE } else { C64::new(0.0, 0.0) });
    CovarianceModel::from_spikes(basis, values, sigma2)
}

/// Snapshot count `K = round(m/c)`.
pub fn snapshots_for(m: usize, c: f64) -> Result<usize> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
    }
    let k = (m as f64 / c).round() as usize;
    if k == 0 {
        return Err(Error::InvalidArgument(format!("c = {c} leaves no snapshots at m = {m}")));
    }
    Ok(k)
}

/// SCM eigenvalues of every trial, each list descending.
pub fn pooled_eigenvalues(model: &CovarianceModel, k: usize, mc: &McConfig) -> Result<Vec<Vec<f64>>> {
    run_trials(mc, |_, seed| hermitian_eigvals(&sample_scm(model, k, seed)?))
}

/// Normalised histogram of pooled SCM eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    pub bin_width: f64,
    /// MP bulk support `[σ²λ₋, σ²λ₊]`.
    pub mp_support: (f64, f64),
    /// Sample-spike limits `σ²τᵢ`.
    pub spike_limits: Vec<f64>,
    pub k: usize,
    pub trials: usize,
    pub sigma2: f64,
    pub c: f64,
}

impl Histogram {
    /// Table with columns eigenvalue, density, mp_density.
    pub fn to_sweep(&self) -> SweepResult {
        let law = MpLaw::new(self.c).expect("validated");
        let records = self
            .centers
            .iter()
            .zip(&self.density)
            .map(|(&x, &d)| {
                let mut rec = SweepRecord::new(x);
                rec.push("density", Some(d));
                rec.push("mp_density", Some(law.pdf(x / self.sigma2) / self.sigma2));
                rec
            })
            .collect();
        let mut summary = vec![
            ("k".to_string(), self.k as f64),
            ("mp_lambda_minus".to_string(), self.mp_support.0),
            ("mp_lambda_plus".to_string(), self.mp_support.1),
        ];
        for (i, t) in self.spike_limits.iter().enumerate() {
            summary.push((format!("tau_{}", i + 1), *t));
        }
        SweepResult {
            axis_name: "eigenvalue".into(),
            records,
            summary,
        }
    }
}

/// Histogram of all SCM eigenvalues over `mc.trials` draws at `K = round(m/c)`.
pub fn eigen_pdf_histogram(model: &CovarianceModel, c: f64, mc: &McConfig, bins: usize) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidArgument(format!("at least 10 bins required, got {bins}")));
    }
    let k = snapshots_for(model.dim(), c)?;
    let law = MpLaw::new(c)?;
    let spectrum = spiked_spectrum(model, c)?;
    let pooled: Vec<f64> = pooled_eigenvalues(model, k, mc)?.into_iter().flatten().collect();
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min).min(law.lambda_minus * model.sigma2());
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = (lo.max(0.0), hi + 1e-9 * hi.abs().max(1.0));
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &pooled {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let total = pooled.len() as f64;
    Ok(Histogram {
        centers: (0..bins).map(|b| lo + (b as f64 + 0.5) * width).collect(),
        density: counts.iter().map(|&n| n as f64 / (total * width)).collect(),
        bin_width: width,
        mp_support: (law.lambda_minus * model.sigma2(), law.lambda_plus * model.sigma2()),
        spike_limits: spectrum.scaled_taus(),
        k,
        trials: mc.trials,
        sigma2: model.sigma2(),
        c,
    })
}

/// Separation margin `ω_r − √c` of the weakest jammer over a JNR × c grid
/// (closed form). Rows run over the JNR grid for each c in turn.
pub fn separation_sweep(cfg: &ScenarioConfig, jnr_db_grid: &[f64], c_grid: &[f64]) -> Result<SweepResult> {
    if jnr_db_grid.is_empty() || c_grid.is_empty() {
        return Err(Error::InvalidArgument("separation sweep needs non-empty grids".into()));
    }
    cfg.validate()?;
    let weakest = *cfg.jammer_powers.last().expect("validated");
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for &c in c_grid {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("aspect ratio must be positive, got {c}")));
        }
        let margins: Vec<f64> = jnr_db_grid
            .iter()
            .map(|&x| 10f64.powf(x / 10.0) * weakest / cfg.sigma2 - c.sqrt())
            .collect();
        for (&x, &margin) in jnr_db_grid.iter().zip(&margins) {
            let mut rec = SweepRecord::new(x);
            rec.push("c", Some(c));
            rec.push("margin", Some(margin));
            records.push(rec);
        }
        summary.push((format!("threshold_db(c={c})"), separation_threshold_db(cfg, c)));
        if let Some(x0) = zero_crossing(jnr_db_grid, &margins) {
            summary.push((format!("zero_crossing_db(c={c})"), x0));
        }
    }
    Ok(SweepResult {
        axis_name: "jnr_db".into(),
        records,
        summary,
    })
}

/// JNR (dB) at which the weakest jammer meets `ω_r = √c` exactly.
pub fn separation_threshold_db(cfg: &ScenarioConfig, c: f64) -> f64 {
    let weakest = *cfg.jammer_powers.last().unwrap_or(&f64::NAN);
    10.0 * (c.sqrt() * cfg.sigma2 / weakest).log10()
}

/// First sign change of `ys` along `xs`, linearly interpolated.
fn zero_crossing(xs: &[f64], ys: &[f64]) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        if y[0] == 0.0 {
            Some(x[0])
        } else if y[0].signum() != y[1].signum() {
            Some(x[0] + (x[1] - x[0]) * y[0] / (y[0] - y[1]))
        } else {
            None
        }
    })
}

fn scenario_at(cfg: &ScenarioConfig, m: usize) -> ScenarioConfig {
    ScenarioConfig { m, ..cfg.clone() }
}

fn estimated_lr(model: &CovarianceModel, k: usize, seed: u64) -> Result<SubspaceComplement> {
    estimated_complement(&sample_scm(model, k, seed)?, model.rank())
}

/// MC error of `s₁ᴴΠ̂⊥RΠ̂⊥s₁` (s₁ the first jammer's normalised steering
/// vector) against the spiked and the naive limits, over a grid of m at
/// fixed c. `eigenvalues` lists the spike eigenvalues, one per jammer AoA.
pub fn mse_structured_qf_sweep(
    cfg: &ScenarioConfig,
    eigenvalues: &[f64],
    c: f64,
    m_grid: &[usize],
    mc: &McConfig,
) -> Result<SweepResult> {
    if m_grid.is_empty() {
        return Err(Error::InvalidArgument("m grid is empty".into()));
    }
    let mut records = Vec::new();
    for &m in m_grid {
        let model = build_covariance_with_eigenvalues(&scenario_at(cfg, m), eigenvalues)?;
        let k = snapshots_for(m, c)?;
        let r_mat = model.covariance();
        let scale = 1.0 / (m as f64).sqrt();
        let s: Vec<C64> = steering_vector(cfg.jammer_aoas_deg[0], m, cfg.spacing_over_wavelength)
            .into_iter()
            .map(|z| z * scale)
            .collect();
        let spiked = deterministic_structured_qf(&s, r_mat, &s, &model, m as f64 / k as f64)?.re;
        let w = true_projectors(&model).apply_complement(&s);
        let naive = quad_form(&w, r_mat, &w)?.re;
        let values = run_trials(mc, |_, seed| {
            let w = estimated_lr(&model, k, seed)?.apply_complement(&s);
            Ok(inner(&w, &model.apply(&w)).re)
        })?;
        let mut rec = SweepRecord::new(m as f64).with_mc(&values);
        rec.prediction_spiked = Some(spiked);
        rec.prediction_naive = Some(naive);
        rec.push("k", Some(k as f64));
        rec.push("mse_spiked", Some(mse(&values, spiked)));
        rec.push("mse_naive", Some(mse(&values, naive)));
        records.push(rec);
    }
    Ok(SweepResult {
        axis_name: "m".into(),
        records,
        summary: Vec::new(),
    })
}

/// MC error of `ρ̂_LR` against `ρ_LR` and against the spiked prediction over
/// a grid of m with `K = round(m/c)`.
pub fn mse_sinr_loss_sweep(
    cfg: &ScenarioConfig,
    c: f64,
    m_grid: &[usize],
    theta_deg: f64,
    mc: &McConfig,
) -> Result<SweepResult> {
    if m_grid.is_empty() {
        return Err(Error::InvalidArgument("m grid is empty".into()));
    }
    let mut records = Vec::new();
    for &m in m_grid {
        let model = build_covariance(&scenario_at(cfg, m))?;
        let k = snapshots_for(m, c)?;
        if k <= model.rank() {
            return Err(Error::InvalidArgument(format!(
                "K = round(m/c) = {k} must exceed r = {} at m = {m}",
                model.rank()
            )));
        }
        let a = steering_vector(theta_deg, m, cfg.spacing_over_wavelength);
        let naive = sinr_loss_lr(&model, &a, &true_projectors(&model))?;
        let spiked = sinr_loss_lr(&model, &a, &deterministic_projector(&model, m as f64 / k as f64)?)?;
        let values = run_trials(mc, |_, seed| sinr_loss_lr(&model, &a, &estimated_lr(&model, k, seed)?))?;
        let mut rec = SweepRecord::new(m as f64).with_mc(&values);
        rec.prediction_spiked = Some(spiked);
        rec.prediction_naive = Some(naive);
        rec.prediction_gifo = predict_gifo_baseline(model.rank(), k).ok();
        rec.push("k", Some(k as f64));
        rec.push("mse_spiked", Some(mse(&values, spiked)));
        rec.push("mse_naive", Some(mse(&values, naive)));
        records.push(rec);
    }
    Ok(SweepResult {
        axis_name: "m".into(),
        records,
        summary: Vec::new(),
    })
}

/// Adaptive low-rank SINR loss against the snapshot count K.
pub fn sinr_loss_vs_k(cfg: &ScenarioConfig, theta_deg: f64, k_grid: &[usize], mc: &McConfig) -> Result<SweepResult> {
    if k_grid.is_empty() {
        return Err(Error::InvalidArgument("K grid is empty".into()));
    }
    let model = build_covariance(cfg)?;
    let (m, r) = (model.dim(), model.rank());
    if let Some(&k) = k_grid.iter().find(|&&k| k <= r) {
        return Err(Error::InvalidArgument(format!("K = {k} must exceed r = {r}")));
    }
    let a = steering_vector(theta_deg, m, cfg.spacing_over_wavelength);
    let naive = sinr_loss_lr(&model, &a, &true_projectors(&model))?;
    let mut records = Vec::new();
    for &k in k_grid {
        let spiked = sinr_loss_lr(&model, &a, &deterministic_projector(&model, m as f64 / k as f64)?)?;
        let values = run_trials(mc, |_, seed| sinr_loss_lr(&model, &a, &estimated_lr(&model, k, seed)?))?;
        let mut rec = SweepRecord::new(k as f64).with_mc(&values);
        rec.prediction_spiked = Some(spiked);
        rec.prediction_naive = Some(naive);
        rec.prediction_gifo = Some(predict_gifo_baseline(r, k)?);
        records.push(rec);
    }
    Ok(SweepResult {
        axis_name: "k".into(),
        records,
        summary: Vec::new(),
    })
}

/// Adaptive low-rank SINR loss against the target angle at fixed K.
/// Each trial's estimated subspace is reused across the whole angle grid.
/// Angles whose steering vector falls in the interference subspace are
/// flagged rather than aborting the sweep. The summary carries the
/// performance break of the spiked prediction.
pub fn sinr_loss_vs_theta(cfg: &ScenarioConfig, k: usize, theta_grid: &[f64], mc: &McConfig) -> Result<SweepResult> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidArgument("angle grid is empty".into()));
    }
    let model = build_covariance(cfg)?;
    let (m, r) = (model.dim(), model.rank());
    let gifo = predict_gifo_baseline(r, k)?;
    let bar = deterministic_projector(&model, m as f64 / k as f64)?;
    let exact = true_projectors(&model);
    let steering: Vec<Vec<C64>> = theta_grid
        .iter()
        .map(|&t| steering_vector(t, m, cfg.spacing_over_wavelength))
        .collect();
    let per_trial = run_trials(mc, |_, seed| {
        let est = estimated_lr(&model, k, seed)?;
        steering.iter().map(|a| degenerate_as_none(sinr_loss_lr(&model, a, &est))).collect::<Result<Vec<_>>>()
    })?;

    let mut records = Vec::with_capacity(theta_grid.len());
    for (i, (&theta, a)) in theta_grid.iter().zip(&steering).enumerate() {
        let naive = degenerate_as_none(sinr_loss_lr(&model, a, &exact))?;
        let spiked = degenerate_as_none(sinr_loss_lr(&model, a, &bar))?;
        let values: Option<Vec<f64>> = per_trial.iter().map(|t| t[i]).collect();
        let mut rec = match &values {
            Some(v) => SweepRecord::new(theta).with_mc(v),
            None => SweepRecord::new(theta),
        };
        rec.prediction_naive = naive;
        rec.prediction_spiked = spiked;
        rec.prediction_gifo = Some(gifo);
        if naive.is_none() || spiked.is_none() || values.is_none() {
            rec.flag = Some(DEGENERATE_FLAG.into());
        }
        records.push(rec);
    }
    let brk = performance_break(&model, &cfg.jammer_aoas_deg, cfg.spacing_over_wavelength, k, theta_grid)?;
    Ok(SweepResult {
        axis_name: "theta_deg".into(),
        records,
        summary: vec![
            ("performance_break_deg".into(), brk.theta_deg.unwrap_or(f64::NAN)),
            ("plateau".into(), brk.plateau),
            ("break_jammer_deg".into(), brk.jammer_deg),
        ],
    })
}

fn degenerate_as_none(v: Result<f64>) -> Result<Option<f64>> {
    match v {
        Ok(x) => Ok(Some(x)),
        Err(Error::DegenerateSteering) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Closed-form predictions at one configuration (no sampling).
pub fn predict_report(cfg: &ScenarioConfig, theta_deg: f64, k: usize) -> Result<SinrLossReport> {
    let model = build_covariance(cfg)?;
    let a = steering_vector(theta_deg, model.dim(), cfg.spacing_over_wavelength);
    let c = model.dim() as f64 / k as f64;
    report_predictions(&model, &a, c, k)
}

/// Predictions at an explicit aspect ratio `c`; `1 − r/K` uses `K = round(m/c)`.
pub fn predict_report_at_ratio(cfg: &ScenarioConfig, theta_deg: f64, c: f64) -> Result<SinrLossReport> {
    let model = build_covariance(cfg)?;
    let a = steering_vector(theta_deg, model.dim(), cfg.spacing_over_wavelength);
    let k = snapshots_for(model.dim(), c)?;
    report_predictions(&model, &a, c, k)
}

fn report_predictions(model: &CovarianceModel, a: &[C64], c: f64, k: usize) -> Result<SinrLossReport> {
    let mut flags = Vec::new();
    let pred_fullrank = match predict_sinr_loss_fullrank(c) {
        Ok(v) => Some(v),
        Err(Error::InvalidRegime(_)) => {
            flags.push("fullrank_regime_c_ge_1");
            None
        }
        Err(e) => return Err(e),
    };
    let pred_gifo = predict_gifo_baseline(model.rank(), k).ok();
    if pred_gifo.is_none() {
        flags.push("gifo_k_le_r");
    }
    Ok(SinrLossReport {
        rho_hat: None,
        rho_lr: sinr_loss_lr(model, a, &true_projectors(model))?,
        rho_hat_lr: None,
        pred_fullrank,
        pred_lr_spiked: sinr_loss_lr(model, a, &deterministic_projector(model, c)?)?,
        pred_gifo,
        flag: (!flags.is_empty()).then(|| flags.join(";")),
    })
}

/// Predictions plus MC means of `ρ̂` (when `K ≥ m + 2`) and `ρ̂_LR`.
pub fn simulate_report(cfg: &ScenarioConfig, theta_deg: f64, k: usize, mc: &McConfig) -> Result<SinrLossReport> {
    let model = build_covariance(cfg)?;
    let m = model.dim();
    let a = steering_vector(theta_deg, m, cfg.spacing_over_wavelength);
    let mut report = report_predictions(&model, &a, m as f64 / k as f64, k)?;
    let fullrank = k >= m + 2;
    let per_trial = run_trials(mc, |_, seed| {
        if fullrank {
            let samples = draw_samples(&model, k, seed)?;
            let lr = estimated_complement(&samples.scm, model.rank())?;
            Ok((Some(sinr_loss_fullrank(&samples, &model, &a)?), sinr_loss_lr(&model, &a, &lr)?))
        } else {
            Ok((None, sinr_loss_lr(&model, &a, &estimated_lr(&model, k, seed)?)?))
        }
    })?;
    let lr: Vec<f64> = per_trial.iter().map(|t| t.1).collect();
    report.rho_hat_lr = Some(mean(&lr));
    if fullrank {
        let fr: Vec<f64> = per_trial.iter().filter_map(|t| t.0).collect();
        report.rho_hat = Some(mean(&fr));
    } else {
        let note = "adaptive_fullrank_needs_k_ge_m_plus_2";
        report.flag = Some(match report.flag.take() {
            Some(f) => format!("{f};{note}"),
            None => note.into(),
        });
    }
    Ok(report)
}
