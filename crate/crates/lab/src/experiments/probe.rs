//! Arrival times of a localized velocity pulse.
//!
//! The initial velocity is the nonnegative bump in the cell `F_0^k K` and
//! the target is the far corner `q_1`. The arrival time `τ_ε` is the first
//! frame time `k h` at which the leapfrog solution exceeds `ε`; the scheme
//! defines `u` only at those times. On the gasket the hop speed of the
//! scheme grows with the level and `τ_ε` keeps decreasing. On the interval
//! it settles at the distance to the support.

use fractal_wave_core::evolution::{operator_lambda_max, Leapfrog, LeapfrogOptions, WaveInput};
use fractal_wave_core::{Boundary, EnergyForm, Field};
use rayon::prelude::*;
use serde::Serialize;

use super::{default_step_scale, level_step, Artifact, Outcome};
use crate::config::{check_levels, FractalArg, Settings};
use crate::error::{usage, LabError, Result};
use crate::plot::{line_plot, Axes, Series};
use crate::presets::Preset;
use crate::report::{Direction, ReportBuilder, Rule, Table};

#[derive(Debug, Clone, Serialize)]
pub struct ProbeConfig {
    pub fractal: FractalArg,
    pub levels: Vec<usize>,
    pub bump_depth: usize,
    /// Threshold relative to `‖g‖∞`.
    pub epsilon: f64,
    /// Further thresholds for the monotonicity table.
    pub epsilons: Vec<f64>,
    pub horizon: f64,
    pub step_scale: f64,
    /// Largest allowed `τ(m+1)/τ(m)` on the gasket.
    pub max_ratio: f64,
    /// Largest allowed relative change of `τ` over the last two levels on
    /// the interval.
    pub max_change: f64,
}

impl ProbeConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        if s.boundary.is_some_and(|b| Boundary::from(b) != Boundary::Neumann) {
            return Err(usage("the probe uses Neumann conditions"));
        }
        let cfg = Self {
            fractal,
            levels: s.levels.clone().unwrap_or_else(|| match fractal {
                FractalArg::Sg => vec![3, 4, 5],
                FractalArg::Interval => (6..=10).collect(),
            }),
            bump_depth: s.bump_depth.unwrap_or(1),
            epsilon: s.epsilon.unwrap_or(1e-8),
            epsilons: vec![1e-10, 1e-8, 1e-6],
            horizon: s.horizon.unwrap_or(match fractal {
                FractalArg::Sg => 5.0,
                FractalArg::Interval => 2.0,
            }),
            step_scale: s.step_scale.unwrap_or_else(|| default_step_scale(fractal)),
            max_ratio: 0.9,
            max_change: 0.05,
        };
        check_levels(&cfg.levels, 2)?;
        if cfg.levels[0] <= cfg.bump_depth {
            return Err(usage(format!("levels must exceed the bump depth {}", cfg.bump_depth)));
        }
        if !(cfg.epsilon > 0.0 && cfg.horizon > 0.0) {
            return Err(usage("epsilon and horizon must be positive"));
        }
        Ok(cfg)
    }
}

struct Arrival {
    level: usize,
    h: f64,
    /// `τ` for each threshold, in the order given.
    taus: Vec<f64>,
    trace: Vec<(f64, f64)>,
}

fn arrival(cfg: &ProbeConfig, m: usize, thresholds: &[f64]) -> Result<Arrival> {
    let spec = cfg.fractal.spec();
    let form = EnergyForm::build(&spec, m, Boundary::Neumann)?;
    let g = Preset::Bump(cfg.bump_depth).field(&form, 0)?;
    let scale = g.sup_norm();
    let target = form.graph().corner(1);
    let input = WaveInput::new(&form, Field::zeros(form.graph()), g)?;
    let h = level_step(&spec, m, cfg.step_scale);
    let opts = LeapfrogOptions { allow_cfl_violation: false, lambda_max: Some(operator_lambda_max(&form)?) };
    let mut lf = Leapfrog::new(&form, &input, h, opts)?;
    let mut taus = vec![f64::NAN; thresholds.len()];
    let mut trace = vec![(0.0, 0.0)];
    let steps = (cfg.horizon / h).ceil() as usize;
    loop {
        let cur = lf.current()[target];
        let t = lf.time();
        trace.push((t, cur));
        for (tau, &eps) in taus.iter_mut().zip(thresholds) {
            let level = eps * scale;
            if tau.is_nan() && cur > level {
                *tau = t;
            }
        }
        if taus.iter().all(|t| !t.is_nan()) || lf.step_index() >= steps {
            break;
        }
        lf.advance();
    }
    if let Some(k) = taus.iter().position(|t| t.is_nan()) {
        return Err(LabError::HorizonTooShort { level: m, vertex: target, epsilon: thresholds[k] * scale, horizon: cfg.horizon });
    }
    Ok(Arrival { level: m, h, taus, trace })
}

pub fn run_probe(cfg: &ProbeConfig) -> Result<Outcome> {
    let mut thresholds = vec![cfg.epsilon];
    thresholds.extend(cfg.epsilons.iter().copied().filter(|&e| e != cfg.epsilon));
    let runs = cfg.levels.par_iter().map(|&m| arrival(cfg, m, &thresholds)).collect::<Result<Vec<_>>>()?;

    let mut times = Table::new("arrival", &["level", "h", "epsilon", "tau"]);
    for r in &runs {
        times.push(vec![r.level.into(), r.h.into(), cfg.epsilon.into(), r.taus[0].into()]);
    }
    let mut eps = Table::new("epsilon_monotonicity", &["level", "epsilon", "tau"]);
    let mut order: Vec<usize> = (0..thresholds.len()).collect();
    order.sort_by(|&a, &b| thresholds[a].total_cmp(&thresholds[b]));
    for r in &runs {
        for &k in &order {
            eps.push(vec![r.level.into(), thresholds[k].into(), r.taus[k].into()]);
        }
    }
    let mut rb = ReportBuilder::new("probe", cfg)?;
    let eps_rule = Rule::Monotone {
        table: "epsilon_monotonicity".into(),
        column: "tau".into(),
        group: Some("level".into()),
        direction: Direction::Increasing,
        strict: false,
    };
    match cfg.fractal {
        FractalArg::Sg => {
            let mut ratios = Table::new("ratios", &["level", "ratio"]);
            for w in runs.windows(2) {
                ratios.push(vec![w[0].level.into(), (w[1].taus[0] / w[0].taus[0]).into()]);
            }
            rb.table(times).table(ratios).table(eps);
            rb.check("arrival_decreases", Rule::AtMost { table: "ratios".into(), column: "ratio".into(), bound: cfg.max_ratio });
            rb.check("epsilon_monotone", eps_rule);
            rb.pass_label("consistent with infinite speed");
            rb.note("arrival times decreasing across levels are evidence for, not a proof of, infinite propagation speed");
        }
        FractalArg::Interval => {
            let n = runs.len();
            let (a, b) = (runs[n - 2].taus[0], runs[n - 1].taus[0]);
            // Unit speed from the edge of the support `[0, 2^{-k}]` to `x = 1`.
            let distance = 1.0 - 0.5f64.powi(cfg.bump_depth as i32);
            let mut limit = Table::new("limit", &["level", "tau", "relative_change", "distance", "tol"]);
            limit.push(vec![
                runs[n - 1].level.into(),
                b.into(),
                ((b - a).abs() / b).into(),
                distance.into(),
                (cfg.max_change * distance).into(),
            ]);
            rb.table(times).table(limit).table(eps);
            rb.check("arrival_converges", Rule::AtMost { table: "limit".into(), column: "relative_change".into(), bound: cfg.max_change });
            rb.info(
                "arrival_matches_unit_speed",
                Rule::Within { table: "limit".into(), value: "tau".into(), target: "distance".into(), tol: "tol".into() },
            );
            rb.check("epsilon_monotone", eps_rule);
            rb.pass_label("finite speed");
        }
    }
    let mut out = Outcome::new(rb.finish()?);
    let series: Vec<Series> = runs.iter().map(|r| Series::new(format!("level {}", r.level), r.trace.clone())).collect();
    out.plots.push(Artifact::new(
        "probe_trace.svg",
        line_plot("u(q1, t) at the far corner", "t", "u", &series, Axes::default()),
    ));
    Ok(out)
}
