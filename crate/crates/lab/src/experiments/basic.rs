//! The utility subcommands: graph construction, eigensolve, a single wave
//! or heat run, and bulk export. Each still produces a report whose checks
//! cover the basic invariants of what it computed.

use fractal_wave_core::evolution::{
    leapfrog_invariant, leapfrog_with, operator_lambda_max, spectral_heat, transmute, LeapfrogOptions,
    Trajectory, TransmuteOptions, WaveInput, CFL_LIMIT,
};
use fractal_wave_core::spectral::{eigendecompose, weyl_exponent};
use fractal_wave_core::{Boundary, EnergyForm, FractalKind};
use serde::Serialize;

use super::{default_step_scale, level_step, Artifact, Outcome};
use crate::config::{BoundaryArg, FractalArg, Settings};
use crate::error::{usage, Result};
use crate::io::{graph_json, read_frames, spectrum_csv, trajectory_csv, vectors_csv, write_frames};
use crate::plot::{heatmap, line_plot, Axes, Series};
use crate::presets::Preset;
use crate::report::{Direction, ReportBuilder, Rule, Table};

/// Largest level the dense subcommands accept.
pub const DENSE_CAP_SG: usize = 6;
pub const DENSE_CAP_INTERVAL: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct BasicConfig {
    pub fractal: FractalArg,
    pub level: usize,
    pub boundary: BoundaryArg,
}

impl BasicConfig {
    pub fn from_settings(s: &Settings, sg_level: usize, interval_level: usize) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        let level = s.level.unwrap_or(match fractal {
            FractalArg::Sg => sg_level,
            FractalArg::Interval => interval_level,
        });
        let cap = match fractal {
            FractalArg::Sg => DENSE_CAP_SG,
            FractalArg::Interval => DENSE_CAP_INTERVAL,
        };
        if level > cap {
            return Err(usage(format!("level {level} exceeds the cap {cap} for dense computations")));
        }
        Ok(Self { fractal, level, boundary: s.boundary.unwrap_or(BoundaryArg::Neumann) })
    }

    fn form(&self) -> Result<EnergyForm> {
        Ok(EnergyForm::build(&self.fractal.spec(), self.level, self.boundary.into())?)
    }
}

pub fn run_build(cfg: &BasicConfig) -> Result<Outcome> {
    let form = cfg.form()?;
    let g = form.graph();
    let m = cfg.level as u32;
    let (vertices, edges, cells) = match cfg.fractal.kind() {
        FractalKind::SierpinskiGasket => ((3usize.pow(m + 1) + 3) / 2, 3usize.pow(m + 1), 3usize.pow(m)),
        FractalKind::Interval => ((1usize << m) + 1, 1usize << m, 1usize << m),
    };
    let mut counts = Table::new("counts", &["quantity", "value", "expected", "tol"]);
    counts.push(vec!["vertices".into(), g.num_vertices().into(), vertices.into(), 0.0.into()]);
    counts.push(vec!["edges".into(), g.edges().len().into(), edges.into(), 0.0.into()]);
    counts.push(vec!["cells".into(), g.cells().len().into(), cells.into(), 0.0.into()]);
    counts.push(vec!["total_mass".into(), form.mu().iter().sum::<f64>().into(), 1.0.into(), 1e-12.into()]);
    let mut info = Table::new("graph", &["boundary_vertices", "gershgorin_bound", "max_degree"]);
    let max_degree = (0..g.num_vertices()).map(|x| g.degree(x)).max().unwrap_or(0);
    info.push(vec![g.boundary().len().into(), form.gershgorin_bound().into(), max_degree.into()]);

    let mut rb = ReportBuilder::new("build", cfg)?;
    rb.table(counts).table(info);
    rb.check("counts_match", Rule::Within { table: "counts".into(), value: "value".into(), target: "expected".into(), tol: "tol".into() });
    let mut out = Outcome::new(rb.finish()?);
    out.artifacts.push(Artifact::new("graph.json", graph_json(&form)?));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenConfig {
    #[serde(flatten)]
    pub basic: BasicConfig,
    /// Eigenfunctions written to `spectrum_vectors.csv`.
    pub vectors: Option<usize>,
    pub tolerance: f64,
}

impl EigenConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        Ok(Self {
            basic: BasicConfig::from_settings(s, 4, 6)?,
            vectors: s.modes,
            tolerance: s.tolerance.unwrap_or(1e-9),
        })
    }
}

pub fn run_eigen(cfg: &EigenConfig) -> Result<Outcome> {
    let form = cfg.basic.form()?;
    let basis = eigendecompose(&form)?;
    let (residual, gram) = basis.diagnostics(&form);
    let mut diag = Table::new("diagnostics", &["eigenpairs", "clusters", "max_residual", "max_gram_error", "tol"]);
    diag.push(vec![
        basis.len().into(),
        basis.clusters().len().into(),
        residual.into(),
        gram.into(),
        cfg.tolerance.into(),
    ]);
    let mut low = Table::new("lowest", &["n", "lambda", "eigenspace_dim"]);
    for k in 0..basis.len().min(10) {
        low.push(vec![(k + 1).into(), basis.lambdas()[k].into(), basis.eigenspace_of(k).len().into()]);
    }
    let expected = match cfg.basic.fractal.kind() {
        FractalKind::SierpinskiGasket => 5f64.ln() / 3f64.ln(),
        FractalKind::Interval => 2.0,
    };
    let mut rb = ReportBuilder::new("eigen", cfg)?;
    rb.table(diag).table(low);
    match weyl_exponent(&basis) {
        Ok(w) => {
            let mut weyl = Table::new("weyl", &["exponent", "expected", "tol", "rms_residual", "n_lo", "n_hi"]);
            weyl.push(vec![
                w.exponent.into(),
                expected.into(),
                0.1.into(),
                w.fit.rms_residual.into(),
                w.window.0.into(),
                w.window.1.into(),
            ]);
            rb.table(weyl);
            rb.info("weyl_exponent", Rule::Within { table: "weyl".into(), value: "exponent".into(), target: "expected".into(), tol: "tol".into() });
        }
        Err(e) => {
            rb.note(format!("no Weyl fit at this level: {e}"));
        }
    }
    rb.check("residuals", Rule::AtMost { table: "diagnostics".into(), column: "max_residual".into(), bound: cfg.tolerance });
    rb.check("orthonormality", Rule::AtMost { table: "diagnostics".into(), column: "max_gram_error".into(), bound: cfg.tolerance });
    let mut out = Outcome::new(rb.finish()?);
    out.artifacts.push(Artifact::new("spectrum.csv", spectrum_csv(&basis)?));
    if let Some(count) = cfg.vectors {
        out.artifacts.push(Artifact::new("spectrum_vectors.csv", vectors_csv(&basis, count)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveConfig {
    #[serde(flatten)]
    pub basic: BasicConfig,
    pub preset: Preset,
    pub steps: usize,
    pub h: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl WaveConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let basic = BasicConfig::from_settings(s, 4, 6)?;
        let spec = basic.fractal.spec();
        let scale = s.step_scale.unwrap_or_else(|| default_step_scale(basic.fractal));
        let h = s.h.unwrap_or_else(|| level_step(&spec, basic.level, scale));
        if !(h > 0.0) {
            return Err(usage("time step must be positive"));
        }
        Ok(Self {
            preset: s.preset_or("eigenmode:4")?,
            steps: s.steps.unwrap_or(200),
            h,
            seed: s.seed.unwrap_or(0),
            tolerance: s.tolerance.unwrap_or(1e-8),
            basic,
        })
    }
}

/// Leapfrog run shared by `wave` and `export`.
fn run_leapfrog(cfg: &WaveConfig, form: &EnergyForm) -> Result<(Trajectory, f64)> {
    let f = cfg.preset.field(form, cfg.seed)?;
    let input = WaveInput::position(form, f)?;
    let lmax = operator_lambda_max(form)?;
    let opts = LeapfrogOptions { allow_cfl_violation: false, lambda_max: Some(lmax) };
    Ok((leapfrog_with(form, &input, cfg.h, cfg.steps, opts)?, lmax))
}

pub fn run_wave(cfg: &WaveConfig) -> Result<Outcome> {
    let form = cfg.basic.form()?;
    let g = form.graph();
    let (traj, lmax) = run_leapfrog(cfg, &form)?;

    let mut run = Table::new("run", &["h", "steps", "scaled_lambda_max", "cfl_limit"]);
    run.push(vec![cfg.h.into(), cfg.steps.into(), (cfg.h * cfg.h * lmax).into(), CFL_LIMIT.into()]);

    let f = &traj.frames[0];
    let scale = form.inner(f, f).max(f64::MIN_POSITIVE);
    let mut invariant = Table::new("invariant", &["initial", "max_drift", "relative_drift", "tol"]);
    if traj.frames.len() > 1 {
        let inv: Vec<f64> = traj.frames.windows(2).map(|w| leapfrog_invariant(&form, cfg.h, &w[0], &w[1])).collect();
        let drift = inv.iter().map(|v| (v - inv[0]).abs()).fold(0.0, f64::max);
        let denom = inv[0].abs().max(scale);
        invariant.push(vec![inv[0].into(), drift.into(), (drift / denom).into(), cfg.tolerance.into()]);
    }

    let mut rb = ReportBuilder::new("wave", cfg)?;
    rb.table(run).table(invariant);
    rb.check("cfl", Rule::AtMost { table: "run".into(), column: "scaled_lambda_max".into(), bound: CFL_LIMIT });
    rb.check("invariant_conserved", Rule::AtMost { table: "invariant".into(), column: "relative_drift".into(), bound: cfg.tolerance });

    // A discrete eigenmode evolves as `cos(kθ) φ` with `cos θ = 1 - h²λ/2`.
    if let Preset::Eigenmode(n) = cfg.preset {
        let basis = eigendecompose(&form)?;
        let lambda = basis.lambdas()[n - 1];
        let theta = (1.0 - 0.5 * cfg.h * cfg.h * lambda).clamp(-1.0, 1.0).acos();
        let err = traj
            .frames
            .iter()
            .enumerate()
            .map(|(k, u)| {
                let c = (k as f64 * theta).cos();
                u.iter().zip(f.iter()).map(|(a, b)| (a - c * b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let mut exact = Table::new("eigenmode_recurrence", &["lambda", "theta", "max_error", "tol"]);
        exact.push(vec![lambda.into(), theta.into(), (err / f.sup_norm().max(f64::MIN_POSITIVE)).into(), 1e-9.into()]);
        rb.table(exact);
        rb.check("eigenmode_recurrence", Rule::AtMost { table: "eigenmode_recurrence".into(), column: "max_error".into(), bound: 1e-9 });
    }
    let mut out = Outcome::new(rb.finish()?);
    out.artifacts.push(Artifact::new("trajectory.csv", trajectory_csv(&traj, 1)?));

    let watch: Vec<usize> = {
        let peak = (0..g.num_vertices()).max_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs())).unwrap_or(0);
        let mut v = vec![peak, g.corner(0), g.num_vertices() / 2];
        v.dedup();
        v
    };
    let series: Vec<Series> = watch
        .iter()
        .map(|&x| Series::new(format!("vertex {x}"), traj.frames.iter().enumerate().map(|(k, u)| (k as f64 * cfg.h, u[x])).collect()))
        .collect();
    out.plots.push(Artifact::new("wave_traces.svg", line_plot("vertex traces", "t", "u", &series, Axes::default())));
    if let Some(last) = traj.frames.last() {
        out.plots.push(Artifact::new("wave_final.svg", heatmap("final frame", g, last)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatConfig {
    #[serde(flatten)]
    pub basic: BasicConfig,
    pub preset: Preset,
    pub times: Vec<f64>,
    pub seed: u64,
    /// Tolerance of the transmutation identity.
    pub tolerance: f64,
}

impl HeatConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let cfg = Self {
            basic: BasicConfig::from_settings(s, 4, 6)?,
            preset: s.preset_or("random")?,
            times: s.times.clone().unwrap_or_else(|| vec![0.001, 0.01, 0.05, 0.1]),
            seed: s.seed.unwrap_or(0),
            tolerance: s.tolerance.unwrap_or(1e-6),
        };
        if cfg.times.is_empty() || cfg.times.iter().any(|&t| !(t > 0.0)) || cfg.times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("heat times must be positive and strictly increasing"));
        }
        Ok(cfg)
    }
}

pub fn run_heat(cfg: &HeatConfig) -> Result<Outcome> {
    let form = cfg.basic.form()?;
    let basis = eigendecompose(&form)?;
    let f = cfg.preset.field(&form, cfg.seed)?;
    let input = WaveInput::position(&form, f.clone())?;
    let mass = |u: &[f64]| form.mu().iter().zip(u).map(|(m, v)| m * v).sum::<f64>();
    let mass0 = mass(&f);

    let mut evo = Table::new("evolution", &["t", "sup", "mass", "mass_change"]);
    evo.push(vec![0.0.into(), f.sup_norm().into(), mass0.into(), 0.0.into()]);
    let mut tm = Table::new("transmutation", &["t", "difference", "tol"]);
    let mut last = f.clone();
    for &t in &cfg.times {
        let p = spectral_heat(&basis, &f, t)?;
        let m = mass(&p);
        evo.push(vec![t.into(), p.sup_norm().into(), m.into(), (m - mass0).abs().into()]);
        let v = transmute(&basis, &input, t, TransmuteOptions::default())?;
        tm.push(vec![t.into(), p.sup_distance(&v).into(), cfg.tolerance.into()]);
        last = p;
    }
    let mut rb = ReportBuilder::new("heat", cfg)?;
    rb.table(evo).table(tm);
    rb.check("sup_nonincreasing", Rule::Monotone {
        table: "evolution".into(),
        column: "sup".into(),
        group: None,
        direction: Direction::Decreasing,
        strict: false,
    });
    if Boundary::from(cfg.basic.boundary) == Boundary::Neumann {
        rb.check("mass_conserved", Rule::AtMost { table: "evolution".into(), column: "mass_change".into(), bound: 1e-10 });
    }
    rb.check("transmutation", Rule::AtMost { table: "transmutation".into(), column: "difference".into(), bound: cfg.tolerance });
    let mut out = Outcome::new(rb.finish()?);
    out.plots.push(Artifact::new("heat_final.svg", heatmap("heat solution at the last time", form.graph(), &last)));
    Ok(out)
}

pub fn run_export(cfg: &WaveConfig) -> Result<Outcome> {
    let form = cfg.basic.form()?;
    let basis = eigendecompose(&form)?;
    let (traj, _) = run_leapfrog(cfg, &form)?;
    let mut frames = Vec::new();
    write_frames(&traj, &mut frames)?;
    let back = read_frames(&mut frames.as_slice())?;
    let mismatch = traj
        .frames
        .iter()
        .zip(&back.frames)
        .map(|(a, b)| a.iter().zip(b.iter()).filter(|(x, y)| x.to_bits() != y.to_bits()).count())
        .sum::<usize>()
        + traj.frames.len().abs_diff(back.frames.len());
    let header = back.level == traj.level && back.scheme == traj.scheme && back.h == traj.h && back.t0 == traj.t0;
    let mismatch = mismatch + usize::from(!header);
    let mut rt = Table::new("roundtrip", &["frames", "vertices", "bytes", "mismatched_values", "header_matches"]);
    rt.push(vec![traj.frames.len().into(), traj.num_vertices().into(), frames.len().into(), mismatch.into(), header.into()]);
    let mut rb = ReportBuilder::new("export", cfg)?;
    rb.table(rt);
    rb.check("binary_roundtrip", Rule::AtMost { table: "roundtrip".into(), column: "mismatched_values".into(), bound: 0.0 });
    let mut out = Outcome::new(rb.finish()?);
    out.artifacts.push(Artifact::new("graph.json", graph_json(&form)?));
    out.artifacts.push(Artifact::new("spectrum.csv", spectrum_csv(&basis)?));
    out.artifacts.push(Artifact::new("trajectory.fwtr", frames));
    out.artifacts.push(Artifact::new("trajectory.csv", trajectory_csv(&traj, 1)?));
    Ok(out)
}
