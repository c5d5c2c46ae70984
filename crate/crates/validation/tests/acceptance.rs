//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use lrsinr_validation::{
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, Verdict,
};

const C9_THREADS: [&str; 3] = ["1", "2", "4"];

/// The `lrsinr` binary sits next to the `deps` directory holding this test.
fn lrsinr_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let bin = dir.join(format!("lrsinr{}", std::env::consts::EXE_SUFFIX));
    bin.exists().then_some(bin)
}

/// Same sweeps, same seed, different thread counts: CSV bytes must match.
fn criterion_9() -> Result<Verdict, String> {
    let bin = lrsinr_binary().ok_or("lrsinr binary not built (cargo build -p lrsinr-cli)")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenario = r#""scenario": {"m": 32, "jammer_aoas_deg": [-20, 0, 20], "jammer_powers": [6, 2, 1], "jnr_db": 10}"#;
    let configs = [
        ("sweep-k", format!(r#"{{{scenario}, "theta_deg": 20.5, "k_grid": [6, 10, 20, 40]}}"#)),
        ("sweep-theta", format!(r#"{{{scenario}, "k": 6, "theta_grid": {{"start": 15, "stop": 25, "step": 0.5}}}}"#)),
        ("mse-sinr", format!(r#"{{{scenario}, "c": 3, "m_grid": [33, 66], "theta_deg": 50}}"#)),
        ("eig-pdf", format!(r#"{{{scenario}, "c": 0.2, "bins": 40}}"#)),
    ];
    let mut checked = 0;
    for (cmd, text) in &configs {
        let cfg = dir.path().join(format!("{cmd}.json"));
        std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for threads in C9_THREADS {
            let out = dir.path().join(format!("{cmd}-{threads}.csv"));
            let run = Command::new(&bin)
                .arg(cmd)
                .arg("--config")
                .arg(&cfg)
                .args(["--seed", "99", "--trials", "24", "--threads", threads, "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !run.status.success() {
                return Ok(Verdict {
                    passed: false,
                    detail: format!(
                        "{cmd} --threads {threads} exited with {}: {}",
                        run.status,
                        String::from_utf8_lossy(&run.stderr).trim()
                    ),
                });
            }
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if !outputs.windows(2).all(|w| w[0] == w[1]) {
            return Ok(Verdict {
                passed: false,
                detail: format!("{cmd}: CSV differs across --threads {C9_THREADS:?}"),
            });
        }
        checked += 1;
    }
    Ok(Verdict {
        passed: true,
        detail: format!("{checked} sweeps byte-identical across --threads {C9_THREADS:?}"),
    })
}

fn main() -> ExitCode {
    let criteria: Vec<(usize, Box<dyn Fn() -> Result<Verdict, String>>)> = vec![
        (1, Box::new(|| Ok(criterion_1()))),
        (2, Box::new(|| criterion_2().map_err(|e| e.to_string()))),
        (3, Box::new(|| criterion_3().map_err(|e| e.to_string()))),
        (4, Box::new(|| criterion_4().map_err(|e| e.to_string()))),
        (5, Box::new(|| criterion_5().map_err(|e| e.to_string()))),
        (6, Box::new(|| criterion_6().map_err(|e| e.to_string()))),
        (7, Box::new(|| criterion_7().map_err(|e| e.to_string()))),
        (8, Box::new(|| criterion_8().map_err(|e| e.to_string()))),
        (9, Box::new(criterion_9)),
    ];
    let mut failed = Vec::new();
    for (n, check) in criteria {
        let start = Instant::now();
        let verdict = check().unwrap_or_else(|e| Verdict {
            passed: false,
            detail: format!("error: {e}"),
        });
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag} — {} [{:.1}s]", verdict.detail, start.elapsed().as_secs_f64());
        if !verdict.passed {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
