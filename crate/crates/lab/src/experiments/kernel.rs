//! Heat kernel exponents from the computed spectrum.
//!
//! On the diagonal `p(x, x, t) ~ t^{-α}` for small `t`, with `α` the
//! reciprocal of the Weyl exponent of the same spectrum. Off the diagonal
//! the kernel decays like `exp(-c (d^β / t)^{1/(β-1)})`; the slope of
//! `log(-log(p(x, y, t) / p(x, x, t)))` against `log d(x, y)` estimates
//! `β/(β-1)`.

use fractal_wave_core::evolution::heat_kernel;
use fractal_wave_core::linalg::line_fit;
use fractal_wave_core::spectral::{eigendecompose, weyl_exponent};
use fractal_wave_core::{Boundary, EnergyForm};
use rayon::prelude::*;
use serde::Serialize;

use super::{log_space, Artifact, Outcome};
use crate::config::{FractalArg, Settings};
use crate::error::{usage, LabError, Result};
use crate::plot::{line_plot, Axes, Series};
use crate::report::{Direction, ReportBuilder, Rule, Table};

#[derive(Debug, Clone, Serialize)]
pub struct KernelConfig {
    pub fractal: FractalArg,
    pub level: usize,
    /// Index of the corner used as the base point.
    pub corner: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Time of the off-diagonal study.
    pub t_off: f64,
    pub tolerance: f64,
    /// Off-diagonal values below this fraction of `p(x, x, t)` are treated
    /// as roundoff and left out of the stretched-exponent fit.
    pub floor: f64,
    pub min_pairs: usize,
}

impl KernelConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        if s.boundary.is_some_and(|b| Boundary::from(b) != Boundary::Neumann) {
            return Err(usage("the kernel fit uses Neumann conditions"));
        }
        let (level, tolerance, min_level) = match fractal {
            FractalArg::Sg => (6, 0.1, 5),
            FractalArg::Interval => (8, 0.05, 5),
        };
        let cfg = Self {
            fractal,
            level: s.level.unwrap_or(level),
            corner: 0,
            t_min: 1e-3,
            t_max: 1e-1,
            points: 21,
            t_off: s.t.unwrap_or(0.01),
            tolerance: s.tolerance.unwrap_or(tolerance),
            floor: 1e-10,
            min_pairs: 5,
        };
        if cfg.level < min_level {
            return Err(usage(format!("the kernel fit needs level >= {min_level}")));
        }
        if !(cfg.t_off > 0.0) {
            return Err(usage("t must be positive"));
        }
        Ok(cfg)
    }
}

/// `β/(β-1)` for the walk dimension `β` (`log 5 / log 2` on the gasket).
fn expected_shape(fractal: FractalArg) -> f64 {
    let beta = match fractal {
        FractalArg::Sg => 5f64.ln() / 2f64.ln(),
        FractalArg::Interval => 2.0,
    };
    beta / (beta - 1.0)
}

pub fn run_kernel_fit(cfg: &KernelConfig) -> Result<Outcome> {
    let spec = cfg.fractal.spec();
    let form = EnergyForm::build(&spec, cfg.level, Boundary::Neumann)?;
    let basis = eigendecompose(&form)?;
    let g = form.graph();
    let x = g.corner(cfg.corner);
    let weyl = weyl_exponent(&basis)?;

    let times = log_space(cfg.t_min, cfg.t_max, cfg.points);
    let diag = times.iter().map(|&t| heat_kernel(&basis, x, x, t)).collect::<fractal_wave_core::Result<Vec<_>>>()?;
    let fit = line_fit(&times.iter().map(|t| t.ln()).collect::<Vec<_>>(), &diag.iter().map(|p| p.ln()).collect::<Vec<_>>())?;
    let alpha = -fit.slope;
    let target = match cfg.fractal {
        FractalArg::Sg => 1.0 / weyl.exponent,
        FractalArg::Interval => 0.5,
    };
    let mut on_diag = Table::new("on_diagonal", &["t", "p"]);
    for (&t, &p) in times.iter().zip(&diag) {
        on_diag.push(vec![t.into(), p.into()]);
    }
    let mut alpha_t = Table::new(
        "alpha",
        &["alpha", "target", "tol", "rms_residual", "weyl_exponent", "inverse_weyl", "log3_over_log5"],
    );
    alpha_t.push(vec![
        alpha.into(),
        target.into(),
        cfg.tolerance.into(),
        fit.rms_residual.into(),
        weyl.exponent.into(),
        (1.0 / weyl.exponent).into(),
        (3f64.ln() / 5f64.ln()).into(),
    ]);

    // Off-diagonal values at one time, grouped by hop distance from x.
    let t = cfg.t_off;
    let p_xx = heat_kernel(&basis, x, x, t)?;
    let p: Vec<f64> = (0..g.num_vertices())
        .into_par_iter()
        .map(|y| heat_kernel(&basis, x, y, t))
        .collect::<fractal_wave_core::Result<Vec<_>>>()?;
    let hops = g.hop_distances(x);
    let max_hop = hops.iter().copied().max().unwrap_or(0);
    let mut classes = Table::new("distance_classes", &["hops", "vertices", "max_p", "min_p"]);
    for k in 0..=max_hop {
        let vals: Vec<f64> = (0..p.len()).filter(|&y| hops[y] == k).map(|y| p[y]).collect();
        if vals.is_empty() {
            continue;
        }
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        classes.push(vec![k.into(), vals.len().into(), hi.into(), lo.into()]);
    }

    let mut pairs = Table::new("stretched_points", &["vertex", "distance", "p", "log_distance", "log_neg_log_ratio"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for y in 0..p.len() {
        let ratio = p[y] / p_xx;
        if y == x || !(ratio > cfg.floor && ratio < 1.0) {
            continue;
        }
        let d = g.metric_distance(x, y);
        let (lx, ly) = (d.ln(), (-ratio.ln()).ln());
        xs.push(lx);
        ys.push(ly);
        pairs.push(vec![y.into(), d.into(), p[y].into(), lx.into(), ly.into()]);
    }
    if xs.len() < cfg.min_pairs {
        return Err(LabError::DegenerateFit { usable: xs.len(), needed: cfg.min_pairs });
    }
    let shape = line_fit(&xs, &ys)?;
    let mut shape_t = Table::new("stretched_exponent", &["t", "slope", "expected", "tol", "rms_residual", "pairs"]);
    shape_t.push(vec![
        t.into(),
        shape.slope.into(),
        expected_shape(cfg.fractal).into(),
        0.25.into(),
        shape.rms_residual.into(),
        xs.len().into(),
    ]);

    let mut rb = ReportBuilder::new("kernel-fit", cfg)?;
    rb.table(on_diag).table(alpha_t).table(classes).table(shape_t).table(pairs);
    rb.check(
        "alpha_matches_spectrum",
        Rule::Within { table: "alpha".into(), value: "alpha".into(), target: "target".into(), tol: "tol".into() },
    );
    rb.check(
        "off_diagonal_decreasing",
        Rule::Monotone {
            table: "distance_classes".into(),
            column: "max_p".into(),
            group: None,
            direction: Direction::Decreasing,
            strict: true,
        },
    );
    rb.info(
        "stretched_exponent",
        Rule::Within {
            table: "stretched_exponent".into(),
            value: "slope".into(),
            target: "expected".into(),
            tol: "tol".into(),
        },
    );
    rb.note(format!("base point: corner {} (vertex {x}); C calibrated on the diagonal p(x, x, t)", cfg.corner));
    let mut out = Outcome::new(rb.finish()?);
    let pts: Vec<(f64, f64)> = times.iter().copied().zip(diag.iter().copied()).collect();
    out.plots.push(Artifact::new(
        "kernel_diagonal.svg",
        line_plot("p(x, x, t)", "t", "p", &[Series::new("on-diagonal", pts)], Axes { log_x: true, log_y: true }),
    ));
    let scatter: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let mut sorted = scatter.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.plots.push(Artifact::new(
        "kernel_offdiagonal.svg",
        line_plot("log(-log(p/p_xx)) against log d", "log d", "log(-log ratio)", &[Series::new("pairs", sorted)], Axes::default()),
    ));
    Ok(out)
}
