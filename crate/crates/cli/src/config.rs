//! JSON run configuration: flat experiment keys plus a nested `scenario`.
//!
//! Parsing goes through [`RawConfig`] (every key optional, unknown keys
//! rejected), command-line flags are layered on top, and [`resolve`] checks
//! the result into a typed [`RunConfig`].

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use lrsinr_core::experiments::{McConfig, Multiplicity};
use lrsinr_core::scenario::ScenarioConfig;
use lrsinr_core::Error;

use crate::error::{CliError, Result};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_BINS: usize = 50;
/// Guards against runaway range grids.
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Predict,
    Simulate,
    SweepK,
    SweepTheta,
    MseQf,
    MseSinr,
    EigPdf,
    Separation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Predict => "predict",
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::SweepK => "sweep-k",
            ExperimentKind::SweepTheta => "sweep-theta",
            ExperimentKind::MseQf => "mse-qf",
            ExperimentKind::MseSinr => "mse-sinr",
            ExperimentKind::EigPdf => "eig-pdf",
            ExperimentKind::Separation => "separation",
        }
    }

    /// Experiment-specific keys this experiment reads.
    fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Predict => &["theta_deg", "k", "c"],
            ExperimentKind::Simulate => &["theta_deg", "k"],
            ExperimentKind::SweepK => &["theta_deg", "k_grid"],
            ExperimentKind::SweepTheta => &["k", "theta_grid"],
            ExperimentKind::MseQf => &["eigenvalues", "c", "m_grid"],
            ExperimentKind::MseSinr => &["c", "m_grid", "theta_deg"],
            ExperimentKind::EigPdf => &["c", "bins", "eigenvalues", "multiplicity"],
            ExperimentKind::Separation => &["jnr_db_grid", "c_grid"],
        }
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Real grid: an explicit list or an inclusive `{start, stop, step}` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    fn expand(&self, field: &str) -> Result<Vec<f64>> {
        let values = match self {
            Grid::List(v) => v.clone(),
            Grid::Range(r) => {
                if !(r.start.is_finite() && r.stop.is_finite() && r.step > 0.0 && r.stop >= r.start) {
                    return Err(CliError::validation(field, "range needs finite start <= stop and step > 0"));
                }
                // small slack so that e.g. 20..24 step 0.05 includes 24
                let n = ((r.stop - r.start) / r.step + 1e-9).floor();
                if n >= MAX_GRID_POINTS as f64 {
                    return Err(CliError::validation(field, "range has too many points"));
                }
                (0..=n as usize).map(|i| r.start + i as f64 * r.step).collect()
            }
        };
        check_grid(field, &values)?;
        Ok(values)
    }
}

fn check_grid(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::validation(field, "grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::validation(field, "grid values must be finite"));
    }
    Ok(())
}

/// Config file as written: every key optional, unknown keys rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<ScenarioConfig>,
    pub experiment: Option<ExperimentKind>,
    pub theta_deg: Option<f64>,
    pub k: Option<usize>,
    pub c: Option<f64>,
    pub k_grid: Option<Vec<usize>>,
    pub theta_grid: Option<Grid>,
    pub m_grid: Option<Vec<usize>>,
    pub eigenvalues: Option<Vec<f64>>,
    pub multiplicity: Option<Multiplicity>,
    pub bins: Option<usize>,
    pub jnr_db_grid: Option<Grid>,
    pub c_grid: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PathBuf>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PathBuf>,
}

impl RawConfig {
    pub fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.or(self.seed);
        self.trials = o.trials.or(self.trials);
        self.threads = o.threads.or(self.threads);
        self.out = o.out.clone().or(self.out.take());
        self.format = o.format.or(self.format);
        self.plot = o.plot.clone().or(self.plot.take());
    }

    /// JSON text without the unset keys.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serialises");
        if let Value::Object(map) = &mut value {
            map.retain(|_, v| !v.is_null());
        }
        serde_json::to_string_pretty(&value).expect("config serialises")
    }

    fn present_keys(&self) -> BTreeSet<String> {
        match serde_json::to_value(self).expect("config serialises") {
            Value::Object(map) => map.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, _)| k).collect(),
            _ => BTreeSet::new(),
        }
    }
}

/// Reads a config document; syntax and schema errors carry their position.
pub fn parse_raw(text: &str) -> Result<RawConfig> {
    serde_json::from_str(text).map_err(|e| {
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: message.strip_suffix(&suffix).unwrap_or(&message).to_string(),
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snapshots {
    K(usize),
    /// Aspect ratio `c = m/K`.
    Ratio(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Predict { theta_deg: f64, snapshots: Snapshots },
    Simulate { theta_deg: f64, k: usize },
    SweepK { theta_deg: f64, k_grid: Vec<usize> },
    SweepTheta { k: usize, theta_grid: Vec<f64> },
    MseQf { eigenvalues: Vec<f64>, c: f64, m_grid: Vec<usize> },
    MseSinr { c: f64, m_grid: Vec<usize>, theta_deg: f64 },
    EigPdf { c: f64, bins: usize, eigenvalues: Option<Vec<f64>>, multiplicity: Multiplicity },
    Separation { jnr_db_grid: Vec<f64>, c_grid: Vec<f64> },
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::Predict { .. } => ExperimentKind::Predict,
            Experiment::Simulate { .. } => ExperimentKind::Simulate,
            Experiment::SweepK { .. } => ExperimentKind::SweepK,
            Experiment::SweepTheta { .. } => ExperimentKind::SweepTheta,
            Experiment::MseQf { .. } => ExperimentKind::MseQf,
            Experiment::MseSinr { .. } => ExperimentKind::MseSinr,
            Experiment::EigPdf { .. } => ExperimentKind::EigPdf,
            Experiment::Separation { .. } => ExperimentKind::Separation,
        }
    }
}

/// Validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub experiment: Experiment,
    pub mc: McConfig,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
    /// Gnuplot script to generate next to the CSV.
    pub plot_path: Option<PathBuf>,
}

/// Parses and validates a complete config document (the `experiment` key is
/// then required).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    resolve(parse_raw(text)?, None)
}

fn required<T: Clone>(value: &Option<T>, field: &str, kind: ExperimentKind) -> Result<T> {
    value.clone().ok_or_else(|| CliError::validation(field, format!("required by `{kind}`")))
}

fn non_empty<T: Clone>(value: &Option<Vec<T>>, field: &str, kind: ExperimentKind) -> Result<Vec<T>> {
    let v = required(value, field, kind)?;
    if v.is_empty() {
        return Err(CliError::validation(field, "grid is empty"));
    }
    Ok(v)
}

fn grid(value: &Option<Grid>, field: &str, kind: ExperimentKind) -> Result<Vec<f64>> {
    required(value, field, kind)?.expand(field)
}

/// Checks a raw config into a [`RunConfig`]. `command`, when given, is the
/// subcommand the user ran; a conflicting `experiment` key is an error.
pub fn resolve(raw: RawConfig, command: Option<ExperimentKind>) -> Result<RunConfig> {
    let kind = match (raw.experiment, command) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::validation("experiment", format!("config says `{a}` but the command is `{b}`")))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(CliError::validation("experiment", "missing")),
    };

    let all_specific: BTreeSet<&str> = [
        ExperimentKind::Predict,
        ExperimentKind::Simulate,
        ExperimentKind::SweepK,
        ExperimentKind::SweepTheta,
        ExperimentKind::MseQf,
        ExperimentKind::MseSinr,
        ExperimentKind::EigPdf,
        ExperimentKind::Separation,
    ]
    .iter()
    .flat_map(|k| k.keys().iter().copied())
    .collect();
    for key in raw.present_keys() {
        if all_specific.contains(key.as_str()) && !kind.keys().contains(&key.as_str()) {
            return Err(CliError::validation(&key, format!("not used by `{kind}`")));
        }
    }

    let scenario = raw.scenario.clone().unwrap_or_else(ScenarioConfig::paper);
    scenario.validate().map_err(|e| match e {
        Error::InvalidScenario { field, reason } => CliError::validation(&format!("scenario.{field}"), reason),
        e => e.into(),
    })?;

    let trials = raw.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(CliError::validation("trials", "must be at least 1"));
    }
    let mc = McConfig::new(trials, raw.seed.unwrap_or(0)).with_parallelism(raw.threads.unwrap_or(0));

    let experiment = match kind {
        ExperimentKind::Predict => {
            let snapshots = match (raw.k, raw.c) {
                (Some(_), Some(_)) => return Err(CliError::validation("c", "give either `k` or `c`, not both")),
                (Some(k), None) => Snapshots::K(k),
                (None, Some(c)) => Snapshots::Ratio(c),
                (None, None) => return Err(CliError::validation("c", "`predict` needs `k` or `c`")),
            };
            Experiment::Predict {
                theta_deg: required(&raw.theta_deg, "theta_deg", kind)?,
                snapshots,
            }
        }
        ExperimentKind::Simulate => Experiment::Simulate {
            theta_deg: required(&raw.theta_deg, "theta_deg", kind)?,
            k: required(&raw.k, "k", kind)?,
        },
        ExperimentKind::SweepK => Experiment::SweepK {
            theta_deg: required(&raw.theta_deg, "theta_deg", kind)?,
            k_grid: non_empty(&raw.k_grid, "k_grid", kind)?,
        },
        ExperimentKind::SweepTheta => Experiment::SweepTheta {
            k: required(&raw.k, "k", kind)?,
            theta_grid: grid(&raw.theta_grid, "theta_grid", kind)?,
        },
        ExperimentKind::MseQf => Experiment::MseQf {
            eigenvalues: non_empty(&raw.eigenvalues, "eigenvalues", kind)?,
            c: required(&raw.c, "c", kind)?,
            m_grid: non_empty(&raw.m_grid, "m_grid", kind)?,
        },
        ExperimentKind::MseSinr => Experiment::MseSinr {
            c: required(&raw.c, "c", kind)?,
            m_grid: non_empty(&raw.m_grid, "m_grid", kind)?,
            theta_deg: required(&raw.theta_deg, "theta_deg", kind)?,
        },
        ExperimentKind::EigPdf => {
            let bins = raw.bins.unwrap_or(DEFAULT_BINS);
            if bins < 10 {
                return Err(CliError::validation("bins", "at least 10 bins required"));
            }
            Experiment::EigPdf {
                c: required(&raw.c, "c", kind)?,
                bins,
                eigenvalues: raw.eigenvalues.clone(),
                multiplicity: raw.multiplicity.unwrap_or_default(),
            }
        }
        ExperimentKind::Separation => {
            let c_grid = non_empty(&raw.c_grid, "c_grid", kind)?;
            check_grid("c_grid", &c_grid)?;
            Experiment::Separation {
                jnr_db_grid: grid(&raw.jnr_db_grid, "jnr_db_grid", kind)?,
                c_grid,
            }
        }
    };

    let output_format = raw.format.unwrap_or_default();
    if raw.plot.is_some() {
        if matches!(kind, ExperimentKind::Predict | ExperimentKind::Simulate) {
            return Err(CliError::validation("plot", format!("`{kind}` produces a single row; nothing to plot")));
        }
        if output_format != Format::Csv {
            return Err(CliError::validation("plot", "plot scripts read the CSV output; use --format csv"));
        }
        if raw.out.is_none() {
            return Err(CliError::validation("plot", "plot scripts need a CSV file; set --out"));
        }
    }

    Ok(RunConfig {
        scenario,
        experiment,
        mc,
        output_path: raw.out,
        output_format,
        plot_path: raw.plot,
    })
}

impl RunConfig {
    /// Raw form that [`resolve`] maps back to `self`.
    pub fn to_raw(&self) -> RawConfig {
        let mut raw = RawConfig {
            scenario: Some(self.scenario.clone()),
            experiment: Some(self.experiment.kind()),
            trials: Some(self.mc.trials),
            seed: Some(self.mc.master_seed),
            threads: Some(self.mc.parallelism),
            out: self.output_path.clone(),
            format: Some(self.output_format),
            plot: self.plot_path.clone(),
            ..RawConfig::default()
        };
        match &self.experiment {
            Experiment::Predict { theta_deg, snapshots } => {
                raw.theta_deg = Some(*theta_deg);
                match snapshots {
                    Snapshots::K(k) => raw.k = Some(*k),
                    Snapshots::Ratio(c) => raw.c = Some(*c),
                }
            }
            Experiment::Simulate { theta_deg, k } => {
                raw.theta_deg = Some(*theta_deg);
                raw.k = Some(*k);
            }
            Experiment::SweepK { theta_deg, k_grid } => {
                raw.theta_deg = Some(*theta_deg);
                raw.k_grid = Some(k_grid.clone());
            }
            Experiment::SweepTheta { k, theta_grid } => {
                raw.k = Some(*k);
                raw.theta_grid = Some(Grid::List(theta_grid.clone()));
            }
            Experiment::MseQf { eigenvalues, c, m_grid } => {
                raw.eigenvalues = Some(eigenvalues.clone());
                raw.c = Some(*c);
                raw.m_grid = Some(m_grid.clone());
            }
            Experiment::MseSinr { c, m_grid, theta_deg } => {
                raw.c = Some(*c);
                raw.m_grid = Some(m_grid.clone());
                raw.theta_deg = Some(*theta_deg);
            }
            Experiment::EigPdf { c, bins, eigenvalues, multiplicity } => {
                raw.c = Some(*c);
                raw.bins = Some(*bins);
                raw.eigenvalues = eigenvalues.clone();
                raw.multiplicity = Some(*multiplicity);
            }
            Experiment::Separation { jnr_db_grid, c_grid } => {
                raw.jnr_db_grid = Some(Grid::List(jnr_db_grid.clone()));
                raw.c_grid = Some(c_grid.clone());
            }
        }
        raw
    }

    /// Serialised config that parses back to an equal `RunConfig`.
    pub fn to_json(&self) -> String {
        self.to_raw().to_json()
    }
}
