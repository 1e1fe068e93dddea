//! Dispatch from subcommand names to experiments, and output writing.
//!
//! Wall-clock timings are returned to the caller rather than stored in the
//! reports, so that two runs with the same settings write identical files.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::config::{FractalArg, Format, Settings};
use crate::error::{io_err, usage, Result};
use crate::experiments::basic::{run_build, run_eigen, run_export, run_heat, run_wave, BasicConfig, EigenConfig, HeatConfig, WaveConfig};
use crate::experiments::convergence::{run_convergence, ConvergenceConfig};
use crate::experiments::kernel::{run_kernel_fit, KernelConfig};
use crate::experiments::mollify::{run_mollified_decay, MollifyConfig};
use crate::experiments::oscillate::{run_oscillation, OscillateConfig};
use crate::experiments::probe::{run_probe, ProbeConfig};
use crate::experiments::Outcome;
use crate::report::Report;

pub const COMMANDS: &[&str] =
    &["build", "eigen", "wave", "heat", "convergence", "probe", "kernel-fit", "mollify", "oscillate", "export"];

/// Runs subcommand `command` with `settings`.
pub fn run_command(command: &str, settings: &Settings) -> Result<Outcome> {
    let s = settings;
    match command {
        "build" => run_build(&BasicConfig::from_settings(s, 3, 4)?),
        "eigen" => run_eigen(&EigenConfig::from_settings(s)?),
        "wave" => run_wave(&WaveConfig::from_settings(s)?),
        "heat" => run_heat(&HeatConfig::from_settings(s)?),
        "convergence" => run_convergence(&ConvergenceConfig::from_settings(s)?),
        "probe" => run_probe(&ProbeConfig::from_settings(s)?),
        "kernel-fit" => run_kernel_fit(&KernelConfig::from_settings(s)?),
        "mollify" => run_mollified_decay(&MollifyConfig::from_settings(s)?),
        "oscillate" => run_oscillation(&OscillateConfig::from_settings(s)?),
        "export" => run_export(&WaveConfig::from_settings(s)?),
        other => Err(usage(format!("unknown command {other}"))),
    }
}

/// Writes the report in `format`, the data artifacts, and with `plot` the SVGs.
pub fn write_outcome(outcome: &Outcome, dir: &Path, format: Format, plot: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    match format {
        Format::Json => outcome.report.write_json(dir)?,
        Format::Csv => outcome.report.write_csv(dir)?,
    }
    let plots = if plot { outcome.plots.as_slice() } else { &[] };
    for a in outcome.artifacts.iter().chain(plots) {
        let path = dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(io_err(&path))?;
    }
    Ok(())
}

/// One entry of the full suite: output subdirectory, subcommand, settings.
pub fn suite_plan(seed: u64) -> Vec<(String, &'static str, Settings)> {
    let base = Settings { seed: Some(seed), ..Default::default() };
    let on = |f: FractalArg| Settings { fractal: Some(f), ..base.clone() };
    let mut plan = Vec::new();
    for cmd in ["build", "eigen", "wave", "heat", "export"] {
        plan.push((cmd.to_string(), cmd, base.clone()));
    }
    for cmd in ["convergence", "probe", "kernel-fit"] {
        plan.push((format!("{cmd}-sg"), cmd, on(FractalArg::Sg)));
        plan.push((format!("{cmd}-interval"), cmd, on(FractalArg::Interval)));
    }
    plan.push(("mollify".into(), "mollify", base.clone()));
    plan.push(("oscillate".into(), "oscillate", base));
    plan
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: String,
    pub report: Report,
    pub elapsed: Duration,
}

/// Runs every experiment with default settings into `out/<name>/`.
pub fn run_suite(out: &Path, seed: u64, format: Format, plot: bool) -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    for (name, cmd, settings) in suite_plan(seed) {
        let start = Instant::now();
        let outcome = run_command(cmd, &settings)?;
        let elapsed = start.elapsed();
        write_outcome(&outcome, &out.join(&name), format, plot)?;
        entries.push(SuiteEntry { name, report: outcome.report, elapsed });
    }
    Ok(entries)
}
