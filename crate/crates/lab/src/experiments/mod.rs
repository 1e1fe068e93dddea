//! Experiment drivers. Each driver is a pure function of its configuration
//! returning a [`Outcome`]; writing files is left to the caller.

pub mod basic;
pub mod convergence;
pub mod kernel;
pub mod mollify;
pub mod oscillate;
pub mod probe;

use fractal_wave_core::{FractalKind, FractalSpec};

use crate::config::FractalArg;
use crate::error::{usage, Result};
use crate::report::Report;

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self { name: name.into(), bytes: bytes.into() }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Data files, always written.
    pub artifacts: Vec<Artifact>,
    /// SVG plots, written with `--plot`.
    pub plots: Vec<Artifact>,
}

impl Outcome {
    pub fn new(report: Report) -> Self {
        Self { report, artifacts: Vec::new(), plots: Vec::new() }
    }
}

/// Default time-step multiplier: `h = scale (μ r)^{m/2}`. On the interval
/// `(μ r)^{m/2} = 2^{-m}` equals the mesh width, which is past the stability
/// limit, so the step is halved.
pub fn default_step_scale(fractal: FractalArg) -> f64 {
    match fractal {
        FractalArg::Sg => 1.0,
        FractalArg::Interval => 0.5,
    }
}

/// `scale · (μ_1 r_1)^{m/2}`; `5^{-m/2}` on the gasket.
pub fn level_step(spec: &FractalSpec, level: usize, scale: f64) -> f64 {
    scale * (spec.measure_weights[0] * spec.renormalization[0]).powf(level as f64 / 2.0)
}

pub(crate) fn require_sg(fractal: FractalArg, what: &str) -> Result<()> {
    if fractal.kind() != FractalKind::SierpinskiGasket {
        return Err(usage(format!("{what} runs on the gasket only (--fractal sg)")));
    }
    Ok(())
}

/// `[lo, hi]` split into `n` points equally spaced in `log t`.
pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Zero crossings of `f` on `[0, t_max]`, located on a grid of spacing `dt`
/// and refined by bisection.
pub(crate) fn zero_crossings(f: impl Fn(f64) -> f64, t_max: f64, dt: f64) -> Vec<f64> {
    let steps = (t_max / dt).ceil() as usize;
    let mut out = Vec::new();
    let mut prev = f(0.0);
    for k in 1..=steps {
        let t = (k as f64 * dt).min(t_max);
        let cur = f(t);
        if prev != 0.0 && prev.signum() != cur.signum() {
            let (mut a, mut b, mut fa) = (t - dt, t, prev);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
                if b - a < 1e-15 * t.max(1.0) {
                    break;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = cur;
    }
    out
}

/// Frequency (cycles per unit time) from consecutive zero crossings, which
/// are half a period apart.
pub(crate) fn crossing_frequency(crossings: &[f64]) -> Option<f64> {
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some((crossings.len() - 1) as f64 / (2.0 * span))
}
