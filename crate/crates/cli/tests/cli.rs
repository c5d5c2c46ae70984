use std::path::Path;
use std::process::Command;

use lrsinr_cli::config::{parse_raw, Overrides, Snapshots, DEFAULT_TRIALS};
use lrsinr_cli::output::sweep_table;
use lrsinr_cli::{execute, format_sig12, parse_config, resolve, to_csv, CliError, Experiment, ExperimentKind, Format};
use lrsinr_core::experiments::{sinr_loss_vs_theta, McConfig, Multiplicity};
use lrsinr_core::scenario::ScenarioConfig;
use lrsinr_core::Error;

const PAPER_SCENARIO: &str = r#"{"m": 100, "jammer_aoas_deg": [-20, 0, 20], "jammer_powers": [6, 2, 1], "jnr_db": 10}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lrsinr"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn minimal_predict_config_gets_defaults() {
    let cfg = parse_config(&format!(r#"{{"scenario": {PAPER_SCENARIO}, "experiment": "predict", "theta_deg": 50, "c": 0.03}}"#))
        .unwrap();
    assert_eq!(cfg.scenario, ScenarioConfig::paper());
    assert_eq!(cfg.mc, McConfig::new(DEFAULT_TRIALS, 0));
    assert_eq!(cfg.output_format, Format::Csv);
    assert_eq!(cfg.experiment, Experiment::Predict { theta_deg: 50.0, snapshots: Snapshots::Ratio(0.03) });
    assert_eq!(cfg.scenario.sigma2, 1.0);
    assert_eq!(cfg.scenario.spacing_over_wavelength, 0.5);
}

#[test]
fn zero_trials_names_the_field() {
    let err = parse_config(r#"{"experiment": "sweep-k", "theta_deg": 20.5, "k_grid": [6], "trials": 0}"#).unwrap_err();
    assert!(matches!(&err, CliError::Validation { field, .. } if field == "trials"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn parse_errors_carry_position() {
    let err = parse_raw("{\n  \"experiment\": \"predict\",\n  \"nope\": 1\n}").unwrap_err();
    match err {
        CliError::Parse { line, message, .. } => {
            assert_eq!(line, 3);
            assert!(message.contains("nope"), "{message}");
        }
        other => panic!("{other}"),
    }
    assert!(matches!(parse_raw("{\"k\": }"), Err(CliError::Parse { line: 1, .. })));
}

#[test]
fn validation_names_offending_fields() {
    let field = |text: &str| match parse_config(text).unwrap_err() {
        CliError::Validation { field, .. } => field,
        other => panic!("{other}"),
    };
    assert_eq!(field(r#"{"experiment": "predict", "theta_deg": 50}"#), "c");
    assert_eq!(field(r#"{"experiment": "predict", "theta_deg": 50, "k": 6, "c": 0.1}"#), "c");
    assert_eq!(field(r#"{"experiment": "sweep-k", "theta_deg": 50, "k_grid": []}"#), "k_grid");
    assert_eq!(field(r#"{"experiment": "sweep-k", "theta_deg": 50, "k_grid": [6], "bins": 20}"#), "bins");
    assert_eq!(field(r#"{"experiment": "eig-pdf", "c": 0.1, "bins": 5}"#), "bins");
    assert_eq!(field(r#"{"experiment": "separation", "jnr_db_grid": {"start": 1, "stop": 0, "step": 1}, "c_grid": [1]}"#), "jnr_db_grid");
    assert_eq!(field(r#"{"scenario": {"m": 10, "jammer_aoas_deg": [0], "jammer_powers": [-1], "jnr_db": 0}, "experiment": "predict", "theta_deg": 1, "k": 5}"#), "scenario.jammer_powers");
    assert_eq!(field(r#"{"experiment": "predict", "theta_deg": 50, "k": 6, "plot": "x.gp", "out": "x.csv"}"#), "plot");
    assert_eq!(field(r#"{"theta_deg": 50, "k": 6}"#), "experiment");
}

#[test]
fn config_round_trips() {
    let texts = [
        r#"{"experiment": "predict", "theta_deg": 50, "c": 0.06, "seed": 9, "format": "json"}"#.to_string(),
        r#"{"experiment": "sweep-theta", "k": 6, "theta_grid": {"start": 20, "stop": 24, "step": 0.05}, "threads": 1, "out": "a.csv", "plot": "a.gp"}"#.to_string(),
        r#"{"experiment": "eig-pdf", "c": 0.1, "eigenvalues": [7, 3, 2], "multiplicity": "proportional"}"#.to_string(),
        format!(r#"{{"scenario": {PAPER_SCENARIO}, "experiment": "mse-qf", "eigenvalues": [71, 31, 21], "c": 0.1, "m_grid": [50, 100], "trials": 7}}"#),
        r#"{"experiment": "separation", "jnr_db_grid": [-10, 0, 10], "c_grid": [0.04, 2]}"#.to_string(),
    ];
    for text in texts {
        let cfg = parse_config(&text).unwrap();
        assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg, "{text}");
    }
    let range = parse_config(r#"{"experiment": "sweep-theta", "k": 6, "theta_grid": {"start": 20, "stop": 24, "step": 0.05}}"#).unwrap();
    match range.experiment {
        Experiment::SweepTheta { theta_grid, .. } => {
            assert_eq!(theta_grid.len(), 81);
            assert!((theta_grid[80] - 24.0).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    let pdf = parse_config(r#"{"experiment": "eig-pdf", "c": 0.1}"#).unwrap();
    assert!(matches!(pdf.experiment, Experiment::EigPdf { bins: 50, multiplicity: Multiplicity::Fixed, eigenvalues: None, .. }));
}

#[test]
fn flags_win_over_config() {
    let mut raw = parse_raw(r#"{"experiment": "sweep-k", "theta_deg": 1, "k_grid": [6], "seed": 1, "trials": 5, "threads": 3, "format": "json"}"#).unwrap();
    raw.apply(&Overrides { seed: Some(2), trials: Some(9), format: Some(Format::Csv), ..Overrides::default() });
    let cfg = resolve(raw, Some(ExperimentKind::SweepK)).unwrap();
    assert_eq!(cfg.mc, McConfig::new(9, 2).with_parallelism(3));
    assert_eq!(cfg.output_format, Format::Csv);
    let raw = parse_raw(r#"{"experiment": "sweep-k", "theta_deg": 1, "k_grid": [6]}"#).unwrap();
    assert!(matches!(resolve(raw, Some(ExperimentKind::Predict)), Err(CliError::Validation { field, .. }) if field == "experiment"));
}

#[test]
fn significant_digit_rendering() {
    assert_eq!(format_sig12(0.5), "0.5");
    assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_sig12(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
    assert_eq!(format_sig12(123456789012345.0), "1.23456789012e14");
    assert_eq!(format_sig12(-20.5), "-20.5");
    assert_eq!(format_sig12(1000.0), "1000");
    assert_eq!(format_sig12(0.0), "0");
    assert_eq!(format_sig12(f64::NAN), "NaN");
    assert_eq!(format_sig12(9.99999999999999), "10");
    for x in [std::f64::consts::PI, -1.0e-300, 6.02214076e23, 0.999986783781234] {
        let back: f64 = format_sig12(x).parse().unwrap();
        assert!((back - x).abs() <= 5e-12 * x.abs(), "{x} -> {back}");
    }
}

#[test]
fn csv_tables_have_header_flag_column_and_parse_back() {
    let cfg = ScenarioConfig::paper();
    let single = sinr_loss_vs_theta(&cfg, 6, &[35.0], &McConfig::new(4, 1)).unwrap();
    let text = to_csv(&sweep_table(ExperimentKind::SweepTheta, &single));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "theta_deg,mc_mean,mc_std,prediction_spiked,prediction_naive,prediction_gifo,trials,flag");
    let mc_mean: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    let want = single.records[0].mc_mean.unwrap();
    assert!((mc_mean - want).abs() <= 5e-12 * want.abs());
    assert_eq!(format_sig12(mc_mean), format_sig12(want));

    let flagged = sinr_loss_vs_theta(&cfg, 6, &[10.0, 20.0, 30.0], &McConfig::new(2, 1)).unwrap();
    let text = to_csv(&sweep_table(ExperimentKind::SweepTheta, &flagged));
    let flags: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(flags.iter().filter(|f| !f.is_empty()).count(), 1);
    assert_eq!(flags[1], "degenerate_steering");
}

#[test]
fn predict_row_carries_regime_flag() {
    let cfg = parse_config(r#"{"experiment": "predict", "theta_deg": 50, "k": 50}"#).unwrap();
    let table = execute(&cfg).unwrap();
    let text = to_csv(&table);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "50");
    assert_eq!(row[6], "");
    assert_eq!(row[9], "fullrank_regime_c_ge_1");
    assert_eq!(table.experiment, ExperimentKind::Predict);
}

#[test]
fn numerical_failures_map_to_exit_3() {
    assert_eq!(CliError::from(Error::Singular { smallest: 0.0 }).exit_code(), 3);
    assert_eq!(CliError::from(Error::NoConvergence { budget: 1 }).exit_code(), 3);
    assert_eq!(CliError::from(Error::DegenerateSteering).exit_code(), 2);
    assert_eq!(CliError::from(Error::InvalidRegime("c".into())).exit_code(), 2);
}

#[test]
fn predict_binary_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", r#"{"theta_deg": 50, "c": 0.06}"#);
    let out = dir.path().join("p.csv");
    let status = bin().args(["predict", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta_deg,k,c,rho_hat,rho_lr,rho_hat_lr,pred_fullrank,pred_lr_spiked,pred_gifo,flag"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "1667");
    assert_eq!(row[6], "0.94");
    let gifo: f64 = row[8].parse().unwrap();
    assert!((gifo - (1.0 - 3.0 / 1667.0)).abs() < 1e-11);
}

#[test]
fn separation_binary_writes_csv_json_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.json", r#"{"jnr_db_grid": {"start": -10, "stop": 10, "step": 1}, "c_grid": [0.04, 2]}"#);
    let csv = dir.path().join("s.csv");
    let plot = dir.path().join("s.gp");
    let out = bin().args(["separation", "--config"]).arg(&cfg).arg("--out").arg(&csv).arg("--plot").arg(&plot).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("jnr_db,c,margin,flag\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 21);
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero_crossing_db(c=0.04)"));
    let script = std::fs::read_to_string(&plot).unwrap();
    assert!(script.contains("column(\"margin\")") && script.contains("s.csv"));

    let out = bin().args(["separation", "--format", "json", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["experiment"], "separation");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 42);
}

#[test]
fn user_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(
        dir.path(),
        "dup.json",
        r#"{"scenario": {"m": 20, "jammer_aoas_deg": [10, 10], "jammer_powers": [2, 1], "jnr_db": 10}, "theta_deg": 50, "k": 10}"#,
    );
    let out = bin().args(["predict", "--config"]).arg(&dup).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("collinear"));

    // weakest jammer below the separation threshold at c = 1.5
    let weak = write(
        dir.path(),
        "weak.json",
        r#"{"scenario": {"m": 100, "jammer_aoas_deg": [-20, 0, 20], "jammer_powers": [6, 2, 1], "jnr_db": -5}, "theta_deg": 50, "c": 1.5}"#,
    );
    let out = bin().args(["predict", "--config"]).arg(&weak).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("separation"));

    let out = bin().args(["sweep-k", "--trials", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["predict", "--config"]).arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["predict", "--format", "xml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "k.json",
        r#"{"scenario": {"m": 24, "jammer_aoas_deg": [-20, 0, 20], "jammer_powers": [6, 2, 1], "jnr_db": 10}, "theta_deg": 20.5, "k_grid": [6, 12, 48], "trials": 25, "seed": 77}"#,
    );
    let texts: Vec<Vec<u8>> = ["1", "2", "4"]
        .iter()
        .map(|t| {
            let out = bin().args(["sweep-k", "--threads", t, "--config"]).arg(&cfg).output().unwrap();
            assert_eq!(out.status.code(), Some(0));
            out.stdout
        })
        .collect();
    assert!(texts.windows(2).all(|w| w[0] == w[1]));
}
