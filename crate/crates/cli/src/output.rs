//! Tabular output: fixed per-experiment columns, CSV/JSON rendering and
//! gnuplot scripts.

use std::path::Path;

use serde_json::{Map, Value};

use lrsinr_core::estimators::SinrLossReport;
use lrsinr_core::experiments::{SweepRecord, SweepResult};

use crate::config::ExperimentKind;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Num(f64),
    Text(String),
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Rows in axis order under a fixed header; `summary` holds scalar
/// by-products that do not fit the row schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: ExperimentKind,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, f64)>,
}

const LOSS_COLUMNS: [&str; 7] = [
    "mc_mean",
    "mc_std",
    "prediction_spiked",
    "prediction_naive",
    "prediction_gifo",
    "trials",
    "flag",
];

/// Column names for each sweep experiment; the first is the swept axis.
pub fn sweep_columns(kind: ExperimentKind) -> Vec<&'static str> {
    let head: &[&str] = match kind {
        ExperimentKind::SweepK => &["k"],
        ExperimentKind::SweepTheta => &["theta_deg"],
        ExperimentKind::MseQf => {
            return vec![
                "m",
                "k",
                "mc_mean",
                "mc_std",
                "prediction_spiked",
                "prediction_naive",
                "mse_spiked",
                "mse_naive",
                "trials",
                "flag",
            ]
        }
        ExperimentKind::MseSinr => {
            return vec![
                "m",
                "k",
                "mc_mean",
                "mc_std",
                "prediction_spiked",
                "prediction_naive",
                "prediction_gifo",
                "mse_spiked",
                "mse_naive",
                "trials",
                "flag",
            ]
        }
        ExperimentKind::EigPdf => return vec!["eigenvalue", "density", "mp_density", "flag"],
        ExperimentKind::Separation => return vec!["jnr_db", "c", "margin", "flag"],
        ExperimentKind::Predict | ExperimentKind::Simulate => return report_columns(),
    };
    head.iter().chain(LOSS_COLUMNS.iter()).copied().collect()
}

pub fn report_columns() -> Vec<&'static str> {
    vec![
        "theta_deg",
        "k",
        "c",
        "rho_hat",
        "rho_lr",
        "rho_hat_lr",
        "pred_fullrank",
        "pred_lr_spiked",
        "pred_gifo",
        "flag",
    ]
}

fn record_cell(rec: &SweepRecord, column: &str, axis: &str) -> Cell {
    match column {
        c if c == axis => Cell::Num(rec.axis_value),
        "mc_mean" => rec.mc_mean.into(),
        "mc_std" => rec.mc_std.into(),
        "prediction_spiked" => rec.prediction_spiked.into(),
        "prediction_naive" => rec.prediction_naive.into(),
        "prediction_gifo" => rec.prediction_gifo.into(),
        "trials" => Cell::Num(rec.trials as f64),
        "flag" => rec.flag.clone().map_or(Cell::Empty, Cell::Text),
        other => rec.extra(other).into(),
    }
}

pub fn sweep_table(kind: ExperimentKind, result: &SweepResult) -> Table {
    let columns = sweep_columns(kind);
    let rows = result
        .records
        .iter()
        .map(|rec| columns.iter().map(|c| record_cell(rec, c, &result.axis_name)).collect())
        .collect();
    Table {
        experiment: kind,
        columns,
        rows,
        summary: result.summary.clone(),
    }
}

pub fn report_table(kind: ExperimentKind, theta_deg: f64, k: usize, c: f64, report: &SinrLossReport) -> Table {
    let row = vec![
        Cell::Num(theta_deg),
        Cell::Num(k as f64),
        Cell::Num(c),
        report.rho_hat.into(),
        Cell::Num(report.rho_lr),
        report.rho_hat_lr.into(),
        report.pred_fullrank.into(),
        Cell::Num(report.pred_lr_spiked),
        report.pred_gifo.into(),
        report.flag.clone().map_or(Cell::Empty, Cell::Text),
    ];
    Table {
        experiment: kind,
        columns: report_columns(),
        rows: vec![row],
        summary: Vec::new(),
    }
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped,
/// exponent form outside `[1e-5, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    trim_zeros(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn render_cell(cell: &Cell) -> String {
    match cell {
        Cell::Empty => String::new(),
        Cell::Num(x) => format_sig12(*x),
        Cell::Text(t) => t.clone(),
    }
}

/// Header row, then one line per row; comma-separated, newline-terminated.
pub fn to_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.iter().map(render_cell).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Integral values below 2⁵³ are written as JSON integers.
fn json_number(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
        return Value::from(x as i64);
    }
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// `{experiment, columns, rows: [{column: value}], summary: {name: value}}`;
/// missing and non-finite values become null.
pub fn to_json(table: &Table) -> String {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, cell)| {
                    let v = match cell {
                        Cell::Empty => Value::Null,
                        Cell::Num(x) => json_number(*x),
                        Cell::Text(t) => Value::String(t.clone()),
                    };
                    (c.to_string(), v)
                })
                .collect();
            Value::Object(obj)
        })
        .collect();
    let summary: Map<String, Value> = table.summary.iter().map(|(k, v)| (k.clone(), json_number(*v))).collect();
    let mut doc = Map::new();
    doc.insert("experiment".into(), Value::String(table.experiment.name().into()));
    doc.insert(
        "columns".into(),
        Value::Array(table.columns.iter().map(|c| Value::String(c.to_string())).collect()),
    );
    doc.insert("rows".into(), Value::Array(rows));
    doc.insert("summary".into(), Value::Object(summary));
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("table serialises");
    text.push('\n');
    text
}

/// Gnuplot script plotting the CSV at `data`. Columns are addressed by name.
pub fn plot_script(kind: ExperimentKind, data: &Path) -> String {
    let file = data.display().to_string().replace('\'', "''");
    let col = |name: &str| format!("(column(\"{name}\"))");
    let series = |x: &str, ys: &[(&str, &str)]| {
        ys.iter()
            .map(|(y, style)| format!("'{file}' using {}:{} with {style} title '{y}'", col(x), col(y)))
            .collect::<Vec<_>>()
            .join(", \\\n     ")
    };
    let loss = [
        ("mc_mean", "linespoints"),
        ("prediction_spiked", "lines"),
        ("prediction_naive", "lines"),
        ("prediction_gifo", "lines"),
    ];
    let (labels, body) = match kind {
        ExperimentKind::SweepK => ("set xlabel 'K'\nset ylabel 'SINR loss'\nset logscale x", series("k", &loss)),
        ExperimentKind::SweepTheta => ("set xlabel 'theta (deg)'\nset ylabel 'SINR loss'", series("theta_deg", &loss)),
        ExperimentKind::MseQf | ExperimentKind::MseSinr => (
            "set xlabel 'm'\nset ylabel 'MSE'\nset logscale xy",
            series("m", &[("mse_spiked", "linespoints"), ("mse_naive", "linespoints")]),
        ),
        ExperimentKind::EigPdf => (
            "set xlabel 'eigenvalue'\nset ylabel 'density'\nset style fill solid 0.4",
            series("eigenvalue", &[("density", "boxes"), ("mp_density", "lines")]),
        ),
        ExperimentKind::Separation => (
            "set xlabel 'JNR (dB)'\nset ylabel 'margin'",
            format!(
                "'{file}' using {}:{}:{} with points palette title 'margin (colour: c)'",
                col("jnr_db"),
                col("margin"),
                col("c")
            ),
        ),
        ExperimentKind::Predict | ExperimentKind::Simulate => ("", String::new()),
    };
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset grid\n{labels}\nplot {body}\npause mouse close\n"
    )
}
