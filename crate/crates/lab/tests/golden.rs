//! Golden reports for small, fast configurations.
//!
//! `cargo test -p fractal-wave-lab --test golden -- --bless` (or
//! `FWLAB_BLESS=1`) rewrites the files under `tests/golden/`. Otherwise
//! each report is compared with its golden file: structure and text
//! exactly, numbers to `1e-9` relative plus `1e-12` absolute, so that
//! roundoff-level entries and a different libm do not count as regressions.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use fractal_wave_lab::config::{FractalArg, Settings};
use fractal_wave_lab::run::run_command;
use serde_json::Value;

fn cases() -> Vec<(&'static str, &'static str, Settings)> {
    let sg = |level| Settings { fractal: Some(FractalArg::Sg), level: Some(level), ..Default::default() };
    let interval = |level| Settings { fractal: Some(FractalArg::Interval), level: Some(level), ..Default::default() };
    vec![
        ("build_sg2", "build", sg(2)),
        ("eigen_sg2", "eigen", sg(2)),
        ("eigen_interval4", "eigen", interval(4)),
        ("wave_sg3", "wave", Settings { preset: Some("eigenmode:2".into()), steps: Some(25), ..sg(3) }),
        ("heat_interval5", "heat", Settings { seed: Some(3), ..interval(5) }),
        (
            "convergence_interval",
            "convergence",
            Settings { fractal: Some(FractalArg::Interval), levels: Some(vec![3, 4, 5]), ..Default::default() },
        ),
    ]
}

fn close(a: &Value, b: &Value, path: &str, diffs: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if (x - y).abs() > 1e-9 * x.abs().max(y.abs()) + 1e-12 {
                diffs.push(format!("{path}: {x} vs {y}"));
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                close(p, q, &format!("{path}[{i}]"), diffs);
            }
        }
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => {
            for (k, p) in x {
                match y.get(k) {
                    Some(q) => close(p, q, &format!("{path}.{k}"), diffs),
                    None => diffs.push(format!("{path}.{k}: missing")),
                }
            }
        }
        _ if a == b => {}
        _ => diffs.push(format!("{path}: {a} vs {b}")),
    }
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn main() -> ExitCode {
    let bless = std::env::args().any(|a| a == "--bless") || std::env::var_os("FWLAB_BLESS").is_some_and(|v| v == "1");
    let dir = golden_dir();
    let mut failed = 0;
    for (name, cmd, settings) in cases() {
        let report = run_command(cmd, &settings).expect(name).report.to_json().unwrap();
        let path = dir.join(format!("{name}.json"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &report).unwrap();
            println!("blessed {name}");
            continue;
        }
        let Ok(expected) = std::fs::read_to_string(&path) else {
            println!("golden {name} ... FAIL (missing {}; run with --bless)", path.display());
            failed += 1;
            continue;
        };
        let mut diffs = Vec::new();
        close(&serde_json::from_str(&report).unwrap(), &serde_json::from_str(&expected).unwrap(), "$", &mut diffs);
        if diffs.is_empty() {
            println!("golden {name} ... ok");
        } else {
            failed += 1;
            println!("golden {name} ... FAIL");
            for d in diffs.iter().take(10) {
                println!("    {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
