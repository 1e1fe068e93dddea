//! Leapfrog against a finer spectral reference across levels.
//!
//! For each level `m` the scheme runs with `h_m = scale (μ r)^{m/2}`. The
//! reference is the exact spectral solution on level `m + 3`, evaluated
//! with the Chebyshev propagator and restricted to `V_m`. Both are compared
//! at the frame time `n h_m`, `n = round(t / h_m)`, so the error measured is
//! the scheme's own and not a mismatch in time.

use std::f64::consts::PI;

use fractal_wave_core::evolution::{operator_lambda_max, ChebyshevPropagator, Leapfrog, LeapfrogOptions, WaveInput};
use fractal_wave_core::{ApproxGraph, Boundary, EnergyForm, Field, FractalKind};
use rayon::prelude::*;
use serde::Serialize;

use super::{default_step_scale, level_step, Outcome};
use crate::config::{check_levels, BoundaryArg, FractalArg, Settings};
use crate::error::{usage, Result};
use crate::plot::{line_plot, Axes, Series};
use crate::presets::{restrict, Preset};
use crate::report::{ReportBuilder, Rule, Table};

/// Finest level the reference may use.
pub const REFERENCE_CAP: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceConfig {
    pub fractal: FractalArg,
    pub levels: Vec<usize>,
    pub boundary: BoundaryArg,
    /// Initial positions, each run with zero velocity.
    pub presets: Vec<Preset>,
    /// Initial velocities, each run with zero position.
    pub velocities: Vec<Preset>,
    pub times: Vec<f64>,
    /// Time at which the per-level ratio decides the verdict.
    pub t: f64,
    pub step_scale: f64,
    pub reference_offset: usize,
    /// Level of the closed-form comparison on the interval.
    pub closed_form_level: Option<usize>,
    pub min_ratio: f64,
    pub seed: u64,
}

impl ConvergenceConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        let default_levels: Vec<usize> = match fractal {
            FractalArg::Sg => (2..=5).collect(),
            FractalArg::Interval => (3..=7).collect(),
        };
        let cfg = Self {
            fractal,
            levels: s.levels.clone().unwrap_or(default_levels),
            boundary: s.boundary.unwrap_or(BoundaryArg::Neumann),
            presets: s.presets_or(&["eigenmode:2", "smooth:1"])?,
            velocities: match (&s.velocities, fractal) {
                (Some(list), _) => list.iter().map(|p| p.parse()).collect::<Result<_>>()?,
                (None, FractalArg::Sg) => vec![Preset::Bump(1)],
                (None, FractalArg::Interval) => Vec::new(),
            },
            times: s.times.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0]),
            t: s.t.unwrap_or(0.5),
            step_scale: s.step_scale.unwrap_or_else(|| default_step_scale(fractal)),
            reference_offset: 3,
            closed_form_level: match fractal {
                FractalArg::Interval => Some(8),
                FractalArg::Sg => None,
            },
            min_ratio: 3.0,
            seed: s.seed.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        check_levels(&self.levels, 3)?;
        let top = self.levels[self.levels.len() - 1] + self.reference_offset;
        if top > REFERENCE_CAP {
            return Err(usage(format!("reference level {top} exceeds the cap {REFERENCE_CAP}")));
        }
        if !self.times.iter().any(|&t| t == self.t) {
            return Err(usage(format!("verdict time {} is not among the times {:?}", self.t, self.times)));
        }
        if self.times.iter().any(|&t| !(t > 0.0)) {
            return Err(usage("times must be positive"));
        }
        Ok(())
    }
}

/// One initial datum: a preset in the position or the velocity slot.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Datum {
    preset: Preset,
    velocity: bool,
}

impl std::fmt::Display for Datum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}={}", if self.velocity { "g" } else { "f" }, self.preset)
    }
}

impl Datum {
    fn input(&self, form: &EnergyForm, values: Field) -> Result<WaveInput> {
        Ok(if self.velocity { WaveInput::velocity(form, values)? } else { WaveInput::position(form, values)? })
    }
}

struct LevelRun {
    datum: Datum,
    level: usize,
    h: f64,
    /// `(t, n, error)` per requested time.
    errors: Vec<(f64, usize, f64)>,
}

fn run_level(cfg: &ConvergenceConfig, datum: Datum, master: &[f64], master_graph: &ApproxGraph, m: usize) -> Result<LevelRun> {
    let spec = cfg.fractal.spec();
    let b: Boundary = cfg.boundary.into();
    let form = EnergyForm::build(&spec, m, b)?;
    let fine = EnergyForm::build(&spec, m + cfg.reference_offset, b)?;
    let f = restrict(master_graph, form.graph(), master)?;
    let f_fine = restrict(master_graph, fine.graph(), master)?;
    let input = datum.input(&form, f)?;
    let fine_input = datum.input(&fine, f_fine)?;
    let h = level_step(&spec, m, cfg.step_scale);
    let opts = LeapfrogOptions { allow_cfl_violation: false, lambda_max: Some(operator_lambda_max(&form)?) };
    let mut lf = Leapfrog::new(&form, &input, h, opts)?;
    let prop = ChebyshevPropagator::new(&fine);
    let mut targets: Vec<(f64, usize)> = cfg.times.iter().map(|&t| (t, (t / h).round() as usize)).collect();
    targets.sort_by_key(|&(_, n)| n);
    let mut errors = Vec::new();
    for (t, n) in targets {
        let frame: Vec<f64> = if n == 0 {
            input.f.values.clone()
        } else {
            while lf.step_index() < n {
                lf.advance();
            }
            lf.current().to_vec()
        };
        let reference = prop.wave(&fine_input, n as f64 * h)?;
        let reference = fine.graph().restrict(form.graph(), &reference)?;
        let err = frame.iter().zip(&reference).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
        errors.push((t, n, err));
    }
    errors.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(LevelRun { datum, level: m, h, errors })
}

/// Leapfrog at `level` against the continuum eigenmode on the interval.
fn closed_form(cfg: &ConvergenceConfig, n: usize, level: usize) -> Result<Vec<(f64, f64)>> {
    let spec = cfg.fractal.spec();
    let b: Boundary = cfg.boundary.into();
    let form = EnergyForm::build(&spec, level, b)?;
    let k = match b {
        Boundary::Dirichlet => n as f64,
        Boundary::Neumann => n as f64 - 1.0,
    };
    let mode = |x: f64| match b {
        Boundary::Dirichlet => (k * PI * x).sin(),
        Boundary::Neumann => (k * PI * x).cos(),
    };
    let omega = k * PI;
    let f = Preset::Eigenmode(n).master_field(&spec, b, level, level, cfg.seed)?;
    let input = WaveInput::position(&form, f)?;
    let h = level_step(&spec, level, cfg.step_scale);
    let mut lf = Leapfrog::new(&form, &input, h, LeapfrogOptions::default())?;
    let mut out = Vec::new();
    for &t in &cfg.times {
        let steps = (t / h).round() as usize;
        while lf.step_index() < steps {
            lf.advance();
        }
        let tn = steps as f64 * h;
        let err = form
            .graph()
            .coords()
            .iter()
            .zip(lf.current())
            .fold(0.0f64, |e, (c, u)| e.max((u - (omega * tn).cos() * mode(c[0])).abs()));
        out.push((t, err));
    }
    Ok(out)
}

pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Outcome> {
    cfg.validate()?;
    let spec = cfg.fractal.spec();
    let b: Boundary = cfg.boundary.into();
    let base = cfg.levels[0];
    let master_level = cfg.levels[cfg.levels.len() - 1] + cfg.reference_offset;
    let master_graph = ApproxGraph::build(&spec, master_level, b)?;
    let data: Vec<Datum> = cfg
        .presets
        .iter()
        .map(|&preset| Datum { preset, velocity: false })
        .chain(cfg.velocities.iter().map(|&preset| Datum { preset, velocity: true }))
        .collect();
    let masters = data
        .iter()
        .map(|d| d.preset.master_field(&spec, b, base, master_level, cfg.seed).map(|f| f.values))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..data.len()).flat_map(|p| cfg.levels.iter().map(move |&m| (p, m))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(p, m)| run_level(cfg, data[p], &masters[p], &master_graph, m))
        .collect::<Result<Vec<_>>>()?;

    let mut errors = Table::new("errors", &["datum", "level", "h", "t", "steps", "error"]);
    let mut ratios = Table::new("ratios", &["datum", "t", "level", "ratio"]);
    let mut rate = Table::new("rate", &["datum", "level", "ratio"]);
    let mut growth = Table::new("time_growth", &["datum", "level", "t", "ratio"]);
    for run in &runs {
        for &(t, n, e) in &run.errors {
            errors.push(vec![run.datum.to_string().into(), run.level.into(), run.h.into(), t.into(), n.into(), e.into()]);
        }
        for (i, &(t, _, e)) in run.errors.iter().enumerate() {
            if let Some(&(_, _, e2)) = run.errors.iter().skip(i + 1).find(|x| (x.0 - 2.0 * t).abs() < 1e-12) {
                growth.push(vec![run.datum.to_string().into(), run.level.into(), t.into(), (e2 / e).into()]);
            }
        }
    }
    let mut series = Vec::new();
    for datum in &data {
        let of = |m: usize| runs.iter().find(|r| r.datum == *datum && r.level == m).unwrap();
        for (ti, &t) in cfg.times.iter().enumerate() {
            let mut pts = Vec::new();
            for w in cfg.levels.windows(2) {
                let (a, c) = (of(w[0]), of(w[1]));
                let r = a.errors[ti].2 / c.errors[ti].2;
                ratios.push(vec![datum.to_string().into(), t.into(), w[0].into(), r.into()]);
                if t == cfg.t {
                    rate.push(vec![datum.to_string().into(), w[0].into(), r.into()]);
                }
            }
            for &m in &cfg.levels {
                pts.push((m as f64, of(m).errors[ti].2));
            }
            series.push(Series::new(format!("{datum} t={t}"), pts));
        }
    }

    let mut rb = ReportBuilder::new("convergence", cfg)?;
    rb.table(errors).table(ratios).table(rate).table(growth);
    rb.check("ratio_at_t", Rule::AtLeast { table: "rate".into(), column: "ratio".into(), bound: cfg.min_ratio });
    rb.info("error_growth_linear_in_t", Rule::AtMost { table: "time_growth".into(), column: "ratio".into(), bound: 2.5 });
    if let Some(level) = cfg.closed_form_level {
        if cfg.fractal.kind() == FractalKind::Interval {
            let mut cf = Table::new("closed_form", &["datum", "level", "t", "error"]);
            for preset in &cfg.presets {
                if let Preset::Eigenmode(n) = *preset {
                    for (t, e) in closed_form(cfg, n, level)? {
                        cf.push(vec![Datum { preset: *preset, velocity: false }.to_string().into(), level.into(), t.into(), e.into()]);
                    }
                }
            }
            if !cf.rows.is_empty() {
                rb.table(cf);
                rb.check("closed_form_error", Rule::AtMost { table: "closed_form".into(), column: "error".into(), bound: 1e-2 });
            }
        }
    }
    rb.note(format!("reference: spectral solution on level m+{} restricted to V_m", cfg.reference_offset));
    let mut out = Outcome::new(rb.finish()?);
    out.plots.push(super::Artifact::new(
        "convergence.svg",
        line_plot("sup error against level", "level", "sup error", &series, Axes { log_x: false, log_y: true }),
    ));
    Ok(out)
}
