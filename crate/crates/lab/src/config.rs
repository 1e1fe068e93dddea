//! Experiment settings.
//!
//! Settings come from three layers, later ones winning: built-in defaults of
//! each experiment, a TOML file (top-level keys apply to every subcommand,
//! a `[subcommand]` table to that one only) and command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fractal_wave_core::{Boundary, FractalKind, FractalSpec};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, usage, Result};
use crate::presets::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FractalArg {
    Sg,
    Interval,
}

impl FractalArg {
    pub fn kind(self) -> FractalKind {
        match self {
            FractalArg::Sg => FractalKind::SierpinskiGasket,
            FractalArg::Interval => FractalKind::Interval,
        }
    }

    pub fn spec(self) -> FractalSpec {
        FractalSpec::of_kind(self.kind())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Neumann,
    Dirichlet,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Neumann => Boundary::Neumann,
            BoundaryArg::Dirichlet => Boundary::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every tunable of every subcommand; unset fields fall back to the
/// experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub fractal: Option<FractalArg>,
    pub level: Option<usize>,
    pub levels: Option<Vec<usize>>,
    pub boundary: Option<BoundaryArg>,
    pub preset: Option<String>,
    pub presets: Option<Vec<String>>,
    /// Presets used as initial velocity (convergence).
    pub velocities: Option<Vec<String>>,
    pub steps: Option<usize>,
    /// Time step.
    pub h: Option<f64>,
    /// Multiplier `c` in `h_m = c (μ r)^{m/2}`.
    pub step_scale: Option<f64>,
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    pub tolerance: Option<f64>,
    pub epsilon: Option<f64>,
    pub bump_depth: Option<usize>,
    pub sigmas: Option<Vec<f64>>,
    pub radii: Option<Vec<f64>>,
    pub scales: Option<usize>,
    pub modes: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(mut self, over: &Settings) -> Self {
        overlay!(self, over; fractal, level, levels, boundary, preset, presets, velocities, steps, h, step_scale, t,
            times, horizon, tolerance, epsilon, bump_depth, sigmas, radii, scales, modes, seed, out, format, plot);
        self
    }

    pub fn presets_or(&self, default: &[&str]) -> Result<Vec<Preset>> {
        match &self.presets {
            Some(list) => list.iter().map(|p| p.parse()).collect(),
            None => default.iter().map(|p| p.parse()).collect(),
        }
    }

    pub fn preset_or(&self, default: &str) -> Result<Preset> {
        self.preset.as_deref().unwrap_or(default).parse()
    }
}

/// A parsed configuration file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub common: Settings,
    pub sections: Vec<(String, Settings)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut common = toml::Table::new();
        let mut sections = Vec::new();
        for (key, value) in table {
            match value {
                toml::Value::Table(t) => sections.push((key, t.try_into::<Settings>()?)),
                other => {
                    common.insert(key, other);
                }
            }
        }
        Ok(Self { common: common.try_into()?, sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    /// Settings for `command`: common keys, then its section.
    pub fn for_command(&self, command: &str) -> Settings {
        let mut s = self.common.clone();
        for (name, section) in &self.sections {
            if name == command {
                s = s.overlay(section);
            }
        }
        s
    }
}

pub fn check_levels(levels: &[usize], min_count: usize) -> Result<()> {
    if levels.len() < min_count {
        return Err(usage(format!("need at least {min_count} levels, got {}", levels.len())));
    }
    if levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(usage("levels must be consecutive and increasing"));
    }
    Ok(())
}
