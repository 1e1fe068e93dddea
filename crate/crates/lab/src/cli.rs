//! Command-line interface of `fwlab`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{BoundaryArg, ConfigFile, FractalArg, Format, Settings};
use crate::error::{LabError, Result};
use crate::run::{run_command, run_suite, write_outcome};

#[derive(Debug, Parser)]
#[command(name = "fwlab", version, about = "Wave and heat experiments on the Sierpinski gasket and the unit interval")]
pub struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Seed of the random presets.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the level-m graph, write graph.json.
    Build(Flags),
    /// Dense eigensolve, write spectrum.csv.
    Eigen(Flags),
    /// Leapfrog run from a preset, write trajectory.csv.
    Wave(Flags),
    /// Heat semigroup and the heat-wave transmutation.
    Heat(Flags),
    /// Leapfrog convergence against a finer spectral reference.
    Convergence(Flags),
    /// Arrival times at the far corner across levels.
    Probe(Flags),
    /// Heat kernel exponents.
    KernelFit(Flags),
    /// Decay of the time-mollified wave away from the support.
    Mollify(Flags),
    /// Oscillation frequencies of eigenmode copies on several scales.
    Oscillate(Flags),
    /// Graph, spectrum and binary trajectory frames.
    Export(Flags),
    /// Every experiment with default settings, one subdirectory each.
    Suite,
}

/// Per-experiment settings. Each experiment reads the ones it uses.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, value_enum)]
    pub fractal: Option<FractalArg>,
    #[arg(long)]
    pub level: Option<usize>,
    /// Comma-separated, e.g. 2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// eigenmode:N, bump:K, smooth:K, constant[:C], sine or random.
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated presets.
    #[arg(long, value_delimiter = ',')]
    pub presets: Option<Vec<String>>,
    /// Comma-separated presets used as initial velocity.
    #[arg(long, value_delimiter = ',')]
    pub velocities: Option<Vec<String>>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Time step.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub step_scale: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub bump_depth: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub scales: Option<usize>,
    /// Number of eigenfunctions to write (eigen).
    #[arg(long)]
    pub modes: Option<usize>,
}

impl Flags {
    fn settings(&self) -> Settings {
        Settings {
            fractal: self.fractal,
            level: self.level,
            levels: self.levels.clone(),
            boundary: self.boundary,
            preset: self.preset.clone(),
            presets: self.presets.clone(),
            velocities: self.velocities.clone(),
            steps: self.steps,
            h: self.h,
            step_scale: self.step_scale,
            t: self.t,
            times: self.times.clone(),
            horizon: self.horizon,
            tolerance: self.tolerance,
            epsilon: self.epsilon,
            bump_depth: self.bump_depth,
            sigmas: self.sigmas.clone(),
            radii: self.radii.clone(),
            scales: self.scales,
            modes: self.modes,
            ..Default::default()
        }
    }
}

impl Command {
    fn name_and_flags(&self) -> Option<(&'static str, &Flags)> {
        Some(match self {
            Command::Build(f) => ("build", f),
            Command::Eigen(f) => ("eigen", f),
            Command::Wave(f) => ("wave", f),
            Command::Heat(f) => ("heat", f),
            Command::Convergence(f) => ("convergence", f),
            Command::Probe(f) => ("probe", f),
            Command::KernelFit(f) => ("kernel-fit", f),
            Command::Mollify(f) => ("mollify", f),
            Command::Oscillate(f) => ("oscillate", f),
            Command::Export(f) => ("export", f),
            Command::Suite => return None,
        })
    }
}

/// Runs the parsed command; `Ok(true)` when every verdict is PASS.
pub fn execute(cli: &Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let globals = Settings { seed: cli.seed, out: cli.out.clone(), format: cli.format, plot: cli.plot.then_some(true), ..Default::default() };
    match cli.command.name_and_flags() {
        Some((name, flags)) => {
            let s = file.for_command(name).overlay(&globals).overlay(&flags.settings());
            let outcome = run_command(name, &s)?;
            let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("fwlab-out").join(name));
            write_outcome(&outcome, &dir, s.format.unwrap_or_default(), s.plot.unwrap_or(false))?;
            let r = &outcome.report;
            for c in &r.checks {
                let tag = if c.informational { " (informational)" } else { "" };
                eprintln!("  {:<28} {}{tag}", c.name, if c.passed { "pass" } else { "fail" });
            }
            println!("{name}: {} -> {}", r.label, dir.display());
            Ok(r.passed())
        }
        None => {
            let s = file.common.overlay(&globals);
            let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("fwlab-out"));
            let entries = run_suite(&dir, s.seed.unwrap_or(0), s.format.unwrap_or_default(), s.plot.unwrap_or(false))?;
            let mut ok = true;
            for e in &entries {
                ok &= e.report.passed();
                println!("{:<22} {:<32} {:>8.2}s", e.name, e.report.label, e.elapsed.as_secs_f64());
            }
            Ok(ok)
        }
    }
}

/// Exit code 0 on PASS, 1 on FAIL, 2 on usage or runtime errors.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            match &e {
                LabError::Usage(_) => eprintln!("usage error: {e}"),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn lists_and_globals_parse() {
        let cli = Cli::try_parse_from(["fwlab", "convergence", "--levels", "2,3,4", "--times", "0.5,1", "--seed", "4", "--plot"]).unwrap();
        let Command::Convergence(f) = &cli.command else { panic!() };
        assert_eq!(f.levels, Some(vec![2, 3, 4]));
        assert_eq!(f.times, Some(vec![0.5, 1.0]));
        assert_eq!((cli.seed, cli.plot), (Some(4), true));
        assert!(Cli::try_parse_from(["fwlab", "probe", "--levels", "3,x"]).is_err());
    }
}
