//! Decay of the time-mollified wave away from the support of the data.
//!
//! For `f` supported in one cell the table holds
//! `sup { |(φ_σ * W f)(x, t)| : d(x, supp f) ≥ r }` over a grid of `r`, `t`
//! and `σ`. The column `sigma_max` is the scale
//! `(t^{β-1} / r^β)^{1/(β-2)}` of the small-σ regime, with `β` the walk
//! dimension obtained from the fitted Weyl exponent.

use fractal_wave_core::evolution::{mollified_wave, spectral_heat};
use fractal_wave_core::spectral::{eigendecompose, weyl_exponent};
use fractal_wave_core::{Boundary, EnergyForm, FractalKind};
use serde::Serialize;

use super::{require_sg, Artifact, Outcome};
use crate::config::{FractalArg, Settings};
use crate::error::{usage, LabError, Result};
use crate::plot::heatmap;
use crate::presets::Preset;
use crate::report::{Direction, ReportBuilder, Rule, Table};

#[derive(Debug, Clone, Serialize)]
pub struct MollifyConfig {
    pub fractal: FractalArg,
    pub level: usize,
    pub preset: Preset,
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Tolerance of the `t = 0` identity with the heat semigroup.
    pub tolerance: f64,
}

impl MollifyConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        require_sg(fractal, "mollify")?;
        if s.boundary.is_some_and(|b| Boundary::from(b) != Boundary::Neumann) {
            return Err(usage("the decay study uses Neumann conditions"));
        }
        let cfg = Self {
            fractal,
            level: s.level.unwrap_or(5),
            preset: s.preset_or("bump:2")?,
            radii: s.radii.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]),
            times: s.times.clone().unwrap_or_else(|| vec![0.0, 0.1, 0.3, 1.0]),
            sigmas: s.sigmas.clone().unwrap_or_else(|| vec![0.005, 0.01, 0.02]),
            tolerance: s.tolerance.unwrap_or(1e-10),
        };
        if !matches!(cfg.preset, Preset::Bump(_)) {
            return Err(usage("the decay study needs data supported in one cell (preset bump:K)"));
        }
        if cfg.sigmas.iter().any(|&s| !(s > 0.0)) || cfg.times.iter().any(|&t| !(t >= 0.0)) {
            return Err(usage("sigmas must be positive and times nonnegative"));
        }
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&cfg.radii) || !sorted(&cfg.sigmas) {
            return Err(usage("radii and sigmas must be strictly increasing"));
        }
        Ok(cfg)
    }
}

pub fn run_mollified_decay(cfg: &MollifyConfig) -> Result<Outcome> {
    let spec = cfg.fractal.spec();
    debug_assert_eq!(spec.kind, FractalKind::SierpinskiGasket);
    let form = EnergyForm::build(&spec, cfg.level, Boundary::Neumann)?;
    let g = form.graph();
    let basis = eigendecompose(&form)?;
    let f = cfg.preset.field(&form, 0)?;
    let support: Vec<usize> = (0..g.num_vertices()).filter(|&x| f[x] != 0.0).collect();
    let dist: Vec<f64> = (0..g.num_vertices())
        .map(|x| support.iter().map(|&y| g.metric_distance(x, y)).fold(f64::INFINITY, f64::min))
        .collect();
    let far: Vec<Vec<usize>> = cfg
        .radii
        .iter()
        .map(|&r| {
            let set: Vec<usize> = (0..dist.len()).filter(|&x| dist[x] >= r).collect();
            if set.is_empty() {
                Err(LabError::EmptyFarSet { radius: r })
            } else {
                Ok(set)
            }
        })
        .collect::<Result<_>>()?;
    let weyl = weyl_exponent(&basis)?;
    let d_f = 3f64.ln() / 2f64.ln();
    let beta = weyl.exponent * d_f;

    let mut grid = Table::new("decay", &["group", "t", "sigma", "r", "far_vertices", "value", "sigma_max", "in_regime"]);
    let mut by_sigma = Table::new("decay_by_sigma", &["group", "r", "t", "sigma", "value"]);
    let mut identity = Table::new("heat_identity", &["r", "sigma", "mollified", "heat", "difference", "tol"]);
    let sup_on = |u: &[f64], set: &[usize]| set.iter().fold(0.0f64, |m, &x| m.max(u[x].abs()));
    let mut values = vec![vec![vec![0.0; cfg.radii.len()]; cfg.sigmas.len()]; cfg.times.len()];
    let mut snapshot = None;
    for (ti, &t) in cfg.times.iter().enumerate() {
        for (si, &sigma) in cfg.sigmas.iter().enumerate() {
            let w = mollified_wave(&basis, &f, sigma, t)?;
            let heat = if t == 0.0 { Some(spectral_heat(&basis, &f, sigma / 2.0)?) } else { None };
            for (ri, &r) in cfg.radii.iter().enumerate() {
                let v = sup_on(&w, &far[ri]);
                values[ti][si][ri] = v;
                let sigma_max = (t.powf(beta - 1.0) / r.powf(beta)).powf(1.0 / (beta - 2.0));
                grid.push(vec![
                    format!("t={t},sigma={sigma}").into(),
                    t.into(),
                    sigma.into(),
                    r.into(),
                    far[ri].len().into(),
                    v.into(),
                    sigma_max.into(),
                    (sigma <= sigma_max).into(),
                ]);
                if let Some(p) = &heat {
                    let hv = sup_on(p, &far[ri]);
                    identity.push(vec![r.into(), sigma.into(), v.into(), hv.into(), (v - hv).abs().into(), cfg.tolerance.into()]);
                }
            }
            if ti + 1 == cfg.times.len() && si == 0 {
                snapshot = Some(w);
            }
        }
    }
    for (ri, &r) in cfg.radii.iter().enumerate() {
        for (ti, &t) in cfg.times.iter().enumerate() {
            for (si, &sigma) in cfg.sigmas.iter().enumerate() {
                by_sigma.push(vec![format!("r={r},t={t}").into(), r.into(), t.into(), sigma.into(), values[ti][si][ri].into()]);
            }
        }
    }
    let mut beta_t = Table::new("walk_dimension", &["weyl_exponent", "fractal_dimension", "beta"]);
    beta_t.push(vec![weyl.exponent.into(), d_f.into(), beta.into()]);

    let mut rb = ReportBuilder::new("mollify", cfg)?;
    rb.table(grid).table(by_sigma).table(identity).table(beta_t);
    rb.check(
        "nonincreasing_in_r",
        Rule::Monotone {
            table: "decay".into(),
            column: "value".into(),
            group: Some("group".into()),
            direction: Direction::Decreasing,
            strict: false,
        },
    );
    rb.check(
        "decreasing_in_sigma",
        Rule::Monotone {
            table: "decay_by_sigma".into(),
            column: "value".into(),
            group: Some("group".into()),
            direction: Direction::Decreasing,
            strict: true,
        },
    );
    rb.check(
        "t0_equals_heat",
        Rule::Within { table: "heat_identity".into(), value: "mollified".into(), target: "heat".into(), tol: "tol".into() },
    );
    let mut out = Outcome::new(rb.finish()?);
    if let Some(w) = snapshot {
        out.plots.push(Artifact::new("mollified_snapshot.svg", heatmap("mollified wave at the last time", g, &w)));
    }
    Ok(out)
}
