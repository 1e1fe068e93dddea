//! Multi-scale oscillation on the gasket.
//!
//! Spectral decimation multiplies eigenvalues by about 5 per level, so an
//! eigenmode copied onto a finer scale oscillates about `√5` times faster.
//! The initial datum is a sum of modes near `5^s λ₄`, `s = 0, 1, …`, and the
//! frequency of each component is read off the zero crossings of its
//! projection.

use fractal_wave_core::evolution::{SpectralWave, WaveInput};
use fractal_wave_core::spectral::{eigendecompose, EigenBasis};
use fractal_wave_core::{Boundary, EnergyForm, Field};
use serde::Serialize;

use super::{crossing_frequency, require_sg, zero_crossings, Artifact, Outcome};
use crate::config::{FractalArg, Settings};
use crate::error::{usage, Result};
use crate::plot::{line_plot, Axes, Series};
use crate::report::{ReportBuilder, Rule, Table};

use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct OscillateConfig {
    pub fractal: FractalArg,
    pub level: usize,
    /// Number of scales `s = 0, …, scales - 1`.
    pub scales: usize,
    /// 1-based index of the base mode.
    pub mode: usize,
    /// Periods of the slowest component covered by the time window.
    pub periods: usize,
    /// Relative tolerance of adjacent frequency ratios against `√5`.
    pub ratio_tol: f64,
    pub trace_tol: f64,
    pub phi4_target: f64,
    pub phi4_tol: f64,
}

impl OscillateConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let fractal = s.fractal.unwrap_or(FractalArg::Sg);
        require_sg(fractal, "oscillate")?;
        if s.boundary.is_some_and(|b| Boundary::from(b) != Boundary::Neumann) {
            return Err(usage("the oscillation demo uses Neumann conditions"));
        }
        let cfg = Self {
            fractal,
            level: s.level.unwrap_or(5),
            scales: s.scales.unwrap_or(3),
            mode: 4,
            periods: 10,
            ratio_tol: 0.1,
            trace_tol: s.tolerance.unwrap_or(1e-6),
            phi4_target: -0.75,
            phi4_tol: 0.015,
        };
        if !(2..=4).contains(&cfg.scales) {
            return Err(usage("oscillate needs 2 to 4 scales"));
        }
        if cfg.mode < 2 {
            return Err(usage("the base mode must be nonconstant (mode >= 2)"));
        }
        Ok(cfg)
    }
}

fn sup(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// First basis vector of the eigenspace whose eigenvalue is nearest `target`.
fn nearest_mode(basis: &EigenBasis, target: f64) -> usize {
    let lambdas = basis.lambdas();
    let best = (0..lambdas.len())
        .min_by(|&a, &b| (lambdas[a] - target).abs().total_cmp(&(lambdas[b] - target).abs()))
        .unwrap_or(0);
    basis.eigenspace_of(best).start
}

pub fn run_oscillation(cfg: &OscillateConfig) -> Result<Outcome> {
    let form = EnergyForm::build(&cfg.fractal.spec(), cfg.level, Boundary::Neumann)?;
    let basis = eigendecompose(&form)?;
    let lambdas = basis.lambdas();
    if cfg.mode > lambdas.len() {
        return Err(usage(format!("mode {} exceeds the {} eigenvalues at this level", cfg.mode, lambdas.len())));
    }
    let base = lambdas[cfg.mode - 1];
    let modes: Vec<usize> = (0..cfg.scales).map(|s| nearest_mode(&basis, base * 5f64.powi(s as i32))).collect();
    if modes.windows(2).any(|w| w[0] == w[1]) {
        return Err(usage("the level is too coarse to separate the requested scales"));
    }

    let g = form.graph();
    let mut f = Field::zeros(g);
    for &k in &modes {
        let phi = basis.phi(k);
        let s = sup(phi);
        f.iter_mut().zip(phi).for_each(|(o, p)| *o += p / s);
    }
    let input = WaveInput::position(&form, f)?;
    let wave = SpectralWave::new(&basis, &input)?;

    let slowest = lambdas[modes[0]].sqrt();
    let fastest = lambdas[modes[cfg.scales - 1]].sqrt();
    let t_max = cfg.periods as f64 * 2.0 * PI / slowest;
    let dt = 2.0 * PI / fastest / 32.0;

    let mut scales = Table::new("scales", &["scale", "mode", "lambda", "cluster_dim", "expected_frequency", "frequency", "crossings"]);
    let mut freqs = Vec::new();
    let mut series = Vec::new();
    for (s, &k) in modes.iter().enumerate() {
        let a = wave.alpha()[k];
        let w = lambdas[k].sqrt();
        let proj = |t: f64| a * (w * t).cos();
        let crossings = zero_crossings(proj, t_max, dt);
        let nu = crossing_frequency(&crossings).unwrap_or(f64::NAN);
        freqs.push(nu);
        let cluster = basis.eigenspace_of(k);
        scales.push(vec![
            s.into(),
            (k + 1).into(),
            lambdas[k].into(),
            cluster.len().into(),
            (w / (2.0 * PI)).into(),
            nu.into(),
            crossings.len().into(),
        ]);
        let pts: Vec<(f64, f64)> = (0..=400).map(|i| {
            let t = t_max * i as f64 / 400.0 / cfg.periods as f64 * 2.0;
            (t, proj(t) / a.abs().max(f64::MIN_POSITIVE))
        }).collect();
        series.push(Series::new(&format!("scale {s}"), pts));
    }
    let mut ratios = Table::new("ratios", &["scale", "ratio", "target", "tol"]);
    let root5 = 5f64.sqrt();
    for s in 1..freqs.len() {
        ratios.push(vec![s.into(), (freqs[s] / freqs[s - 1]).into(), root5.into(), (cfg.ratio_tol * root5).into()]);
    }

    // A single mode gives a pure cosine at every vertex.
    let k0 = modes[0];
    let single = WaveInput::position(&form, basis.field(k0))?;
    let single = SpectralWave::new(&basis, &single)?;
    let vertex = (0..g.num_vertices()).max_by(|&a, &b| basis.phi(k0)[a].abs().total_cmp(&basis.phi(k0)[b].abs())).unwrap_or(0);
    let n = g.num_vertices();
    let trace = |t: f64| {
        let mut b = vec![0.0; n];
        single.eval_into(t, &mut b);
        b[vertex]
    };
    let crossings = zero_crossings(trace, t_max, 2.0 * PI / slowest / 32.0);
    let expected = slowest / (2.0 * PI);
    let measured = crossing_frequency(&crossings).unwrap_or(f64::NAN);
    let mut single_t = Table::new("single_mode", &["vertex", "expected_frequency", "frequency", "relative_error", "tol"]);
    single_t.push(vec![
        vertex.into(),
        expected.into(),
        measured.into(),
        ((measured - expected).abs() / expected).into(),
        cfg.trace_tol.into(),
    ]);

    // Positive datum `4ψ + 7` whose wave turns negative at `cos(√λ t) = -1`.
    let psi0 = basis.phi(k0);
    let top = psi0.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let psi: Vec<f64> = psi0.iter().map(|v| 2.0 * v / top).collect();
    let datum: Vec<f64> = psi.iter().map(|v| 4.0 * v + 7.0).collect();
    let half_period = PI / slowest;
    let later: Vec<f64> = psi.iter().map(|v| 4.0 * v * (slowest * half_period).cos() + 7.0).collect();
    let min = |u: &[f64]| u.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mut sign = Table::new("sign_change", &["t", "min_initial", "min_at_t", "max_at_t"]);
    sign.push(vec![
        half_period.into(),
        min(&datum).into(),
        min(&later).into(),
        later.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)).into(),
    ]);

    let k4 = 3.min(lambdas.len() - 1);
    let phi4 = basis.phi(k4);
    let (lo, hi) = (min(phi4), phi4.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)));
    let (lo, hi) = if hi.abs() >= lo.abs() { (lo, hi) } else { (-hi, -lo) };
    let l2 = basis.inner(phi4, phi4).sqrt();
    let simple = basis.is_simple(k4);
    let mut phi4_t = Table::new("phi4", &["lambda", "eigenspace_dim", "simple", "min", "max", "ratio", "target", "tol"]);
    phi4_t.push(vec![
        lambdas[k4].into(),
        basis.eigenspace_of(k4).len().into(),
        simple.into(),
        (lo / l2).into(),
        (hi / l2).into(),
        (lo / hi).into(),
        cfg.phi4_target.into(),
        cfg.phi4_tol.into(),
    ]);

    let mut rb = ReportBuilder::new("oscillate", cfg)?;
    rb.table(scales).table(ratios).table(single_t).table(sign).table(phi4_t);
    rb.check("frequency_ratio_sqrt5", Rule::Within {
        table: "ratios".into(),
        value: "ratio".into(),
        target: "target".into(),
        tol: "tol".into(),
    });
    rb.check("single_mode_frequency", Rule::AtMost {
        table: "single_mode".into(),
        column: "relative_error".into(),
        bound: cfg.trace_tol,
    });
    rb.check("initial_datum_positive", Rule::AtLeast { table: "sign_change".into(), column: "min_initial".into(), bound: 1.0 });
    rb.check("wave_changes_sign", Rule::Below { table: "sign_change".into(), column: "min_at_t".into(), bound: 0.0 });
    let phi4_rule = Rule::Within { table: "phi4".into(), value: "ratio".into(), target: "target".into(), tol: "tol".into() };
    if simple {
        rb.check("phi4_ratio", phi4_rule);
    } else {
        rb.info("phi4_ratio", phi4_rule);
        rb.note(format!(
            "the fourth eigenvalue has a {}-dimensional eigenspace; the ratio of the basis element chosen by the orthonormalization is reported only",
            basis.eigenspace_of(k4).len()
        ));
    }
    let mut out = Outcome::new(rb.finish()?);
    out.plots.push(Artifact::new(
        "oscillation.svg",
        line_plot("mode projections", "t", "normalized coefficient", &series, Axes::default()),
    ));
    Ok(out)
}
