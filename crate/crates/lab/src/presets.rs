//! Named initial data.
//!
//! A preset can be realized on one level ([`Preset::field`]) or on a master
//! level from which coarser levels are obtained by restriction
//! ([`Preset::master_field`]), so that a convergence study compares the same
//! function across levels.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use fractal_wave_core::evolution::ChebyshevPropagator;
use fractal_wave_core::spectral::{decimate_sg_lowest, eigendecompose, extend_eigenfunction, sg_children};
use fractal_wave_core::{ApproxGraph, Boundary, EnergyForm, Field, FractalKind, FractalSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `φ_n`, counted from 1 in nondecreasing eigenvalue order.
    Eigenmode(usize),
    /// Ground state of the Dirichlet problem placed in the cell `F_0^k K`,
    /// scaled to maximum 1 and zero elsewhere.
    Bump(usize),
    /// Indicator of the cell `F_0^k K` smoothed by the heat semigroup for
    /// time `τ_k = (μ r)^k / 4`, scaled to maximum 1. Not compactly
    /// supported, but regular enough for rate studies.
    Smooth(usize),
    Constant(f64),
    /// `sin(πx)` on the interval, `sin(πx) sin(2πy/√3)` on the gasket.
    Sine,
    /// Independent uniform values in `[-1, 1]`.
    Random,
}

impl FromStr for Preset {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let int = |a: Option<&str>| -> Result<usize> {
            a.ok_or_else(|| usage(format!("preset {name} needs an argument, e.g. {name}:2")))?
                .parse()
                .map_err(|_| usage(format!("bad preset argument in {s}")))
        };
        match name {
            "eigenmode" => {
                let n = int(arg)?;
                if n == 0 {
                    return Err(usage("eigenmodes are counted from 1"));
                }
                Ok(Preset::Eigenmode(n))
            }
            "bump" => Ok(Preset::Bump(int(arg)?)),
            "smooth" => Ok(Preset::Smooth(int(arg)?)),
            "constant" => Ok(Preset::Constant(match arg {
                Some(a) => a.parse().map_err(|_| usage(format!("bad preset argument in {s}")))?,
                None => 1.0,
            })),
            "sine" if arg.is_none() => Ok(Preset::Sine),
            "random" if arg.is_none() => Ok(Preset::Random),
            _ => Err(usage(format!("unknown preset {s}; expected eigenmode:N, bump:K, smooth:K, constant[:C], sine or random"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Eigenmode(n) => write!(f, "eigenmode:{n}"),
            Preset::Bump(k) => write!(f, "bump:{k}"),
            Preset::Smooth(k) => write!(f, "smooth:{k}"),
            Preset::Constant(c) => write!(f, "constant:{c}"),
            Preset::Sine => write!(f, "sine"),
            Preset::Random => write!(f, "random"),
        }
    }
}

impl serde::Serialize for Preset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn project(graph: &ApproxGraph, mut f: Field) -> Field {
    for &b in graph.boundary() {
        f[b] = 0.0;
    }
    f
}

/// `(3/8)·5^m`, the ratio between `-μ^{-1}H_m` eigenvalues and graph values
/// `ℓ` on the gasket, read off the form itself.
fn gasket_scale(form: &EnergyForm) -> f64 {
    form.diagonal()[0] / (4.0 * form.mu()[0])
}

/// Extends a gasket eigenfunction with graph value `ell` on `graph` to
/// `target` levels by the lower decimation branch.
fn extend_to(
    spec: &FractalSpec,
    boundary: Boundary,
    mut graph: ApproxGraph,
    mut u: Vec<f64>,
    mut ell: f64,
    target: usize,
) -> Result<(ApproxGraph, Vec<f64>)> {
    while graph.level() < target {
        let fine = ApproxGraph::build(spec, graph.level() + 1, boundary)?;
        let child = sg_children(ell).0;
        u = extend_eigenfunction(&graph, &fine, &u, child)?;
        ell = child;
        graph = fine;
    }
    Ok((graph, u))
}

fn gasket_bump(spec: &FractalSpec, graph: &ApproxGraph, depth: usize) -> Result<Vec<f64>> {
    let m = graph.level();
    if m < depth + 1 {
        return Err(usage(format!("bump:{depth} needs level >= {}", depth + 1)));
    }
    let ground = decimate_sg_lowest(1, Boundary::Dirichlet, 1)?;
    let (lambda, phi) = &ground[0];
    let one = EnergyForm::build(spec, 1, Boundary::Dirichlet)?;
    let ell = lambda / gasket_scale(&one);
    let (small, u) = extend_to(spec, Boundary::Dirichlet, one.graph().clone(), phi.values.clone(), ell, m - depth)?;
    let top = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut out = vec![0.0; graph.num_vertices()];
    for (i, &j) in graph.cell_map(&small, &vec![0u8; depth])?.iter().enumerate() {
        out[j] = sign * u[i] / top;
    }
    Ok(out)
}

fn smooth_indicator(form: &EnergyForm, depth: usize) -> Result<Vec<f64>> {
    let g = form.graph();
    if g.level() < depth {
        return Err(usage(format!("smooth:{depth} needs level >= {depth}")));
    }
    let spec = form.spec();
    let cell = ApproxGraph::build(spec, g.level() - depth, Boundary::Neumann)?;
    let mut indicator = vec![0.0; g.num_vertices()];
    for j in g.cell_map(&cell, &vec![0u8; depth])? {
        indicator[j] = 1.0;
    }
    for &b in g.boundary() {
        indicator[b] = 0.0;
    }
    let tau = 0.25 * (spec.measure_weights[0] * spec.renormalization[0]).powi(depth as i32);
    let u = ChebyshevPropagator::new(form).heat(&indicator, tau)?;
    let top = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(u.into_iter().map(|v| v / top).collect())
}

fn interval_bump(graph: &ApproxGraph, depth: usize) -> Vec<f64> {
    let w = 0.5f64.powi(depth as i32);
    graph.coords().iter().map(|c| if c[0] <= w { (PI * c[0] / w).sin() } else { 0.0 }).collect()
}

fn sine(graph: &ApproxGraph) -> Vec<f64> {
    let s = 2.0 / 3f64.sqrt();
    graph
        .coords()
        .iter()
        .map(|c| match graph.kind() {
            FractalKind::Interval => (PI * c[0]).sin(),
            FractalKind::SierpinskiGasket => (PI * c[0]).sin() * (PI * s * c[1]).sin(),
        })
        .collect()
}

fn random(graph: &ApproxGraph, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..graph.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

impl Preset {
    /// The preset on the level of `form`, vanishing on its boundary set.
    /// `eigenmode:n` is the discrete eigenfunction of this level.
    pub fn field(&self, form: &EnergyForm, seed: u64) -> Result<Field> {
        let g = form.graph();
        let values = match *self {
            Preset::Eigenmode(n) => {
                let basis = eigendecompose(form)?;
                if n > basis.len() {
                    return Err(usage(format!("eigenmode:{n} exceeds the {} modes of this level", basis.len())));
                }
                basis.phi(n - 1).to_vec()
            }
            Preset::Bump(k) => match g.kind() {
                FractalKind::Interval => interval_bump(g, k),
                FractalKind::SierpinskiGasket => gasket_bump(form.spec(), g, k)?,
            },
            Preset::Smooth(k) => smooth_indicator(form, k)?,
            Preset::Constant(c) => vec![c; g.num_vertices()],
            Preset::Sine => sine(g),
            Preset::Random => random(g, seed),
        };
        Ok(project(g, Field::new(g.level(), values)))
    }

    /// The preset on `master`, built so that restrictions to levels
    /// `>= base` describe one function. `eigenmode:n` is `φ_n` of level
    /// `base` extended by spectral decimation on the gasket, and the sampled
    /// continuum eigenfunction on the interval.
    pub fn master_field(
        &self,
        spec: &FractalSpec,
        boundary: Boundary,
        base: usize,
        master: usize,
        seed: u64,
    ) -> Result<Field> {
        let form = EnergyForm::build(spec, master, boundary)?;
        let g = form.graph();
        match *self {
            Preset::Eigenmode(n) => {
                let values = match spec.kind {
                    FractalKind::Interval => {
                        let k = n as f64;
                        g.coords()
                            .iter()
                            .map(|c| match boundary {
                                Boundary::Dirichlet => (k * PI * c[0]).sin(),
                                Boundary::Neumann => ((k - 1.0) * PI * c[0]).cos(),
                            })
                            .collect()
                    }
                    FractalKind::SierpinskiGasket => {
                        let coarse = EnergyForm::build(spec, base, boundary)?;
                        let basis = eigendecompose(&coarse)?;
                        if n > basis.len() {
                            return Err(usage(format!("eigenmode:{n} exceeds the {} modes of level {base}", basis.len())));
                        }
                        let ell = basis.lambdas()[n - 1] / gasket_scale(&coarse);
                        let phi = basis.phi(n - 1).to_vec();
                        extend_to(spec, boundary, coarse.graph().clone(), phi, ell, master)?.1
                    }
                };
                Ok(project(g, Field::new(master, values)))
            }
            _ => self.field(&form, seed),
        }
    }
}

/// `u` restricted from its level to the level of `coarse`.
pub fn restrict(fine: &ApproxGraph, coarse: &ApproxGraph, u: &[f64]) -> Result<Field> {
    Ok(Field::new(coarse.level(), fine.restrict(coarse, u)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for s in ["eigenmode:4", "bump:2", "smooth:1", "constant:1.5", "sine", "random"] {
            assert_eq!(s.parse::<Preset>().unwrap().to_string(), s);
        }
        for s in ["eigenmode:0", "eigenmode", "bump:x", "wobble", "sine:3"] {
            assert!(s.parse::<Preset>().is_err(), "{s}");
        }
    }

    #[test]
    fn decimated_eigenmode_restricts_to_itself() {
        let spec = FractalSpec::sierpinski_gasket();
        let f5 = Preset::Eigenmode(2).master_field(&spec, Boundary::Neumann, 2, 5, 0).unwrap();
        let g5 = ApproxGraph::build(&spec, 5, Boundary::Neumann).unwrap();
        let form3 = EnergyForm::build(&spec, 3, Boundary::Neumann).unwrap();
        let f3 = restrict(&g5, form3.graph(), &f5).unwrap();
        // The restriction is an eigenfunction of level 3.
        let lf = form3.laplacian(&f3).unwrap();
        let ratio = lf[7] / f3[7];
        assert!(lf.iter().zip(f3.iter()).all(|(a, b)| (a - ratio * b).abs() < 1e-9 * ratio.abs()));
    }

    #[test]
    fn bump_is_supported_in_one_cell_and_nonnegative() {
        let spec = FractalSpec::sierpinski_gasket();
        let form = EnergyForm::build(&spec, 4, Boundary::Neumann).unwrap();
        let b = Preset::Bump(2).field(&form, 0).unwrap();
        let g = form.graph();
        assert!((b.sup_norm() - 1.0).abs() < 1e-15);
        for x in 0..g.num_vertices() {
            assert!(b[x] >= 0.0);
            let v = &g.vertices()[x];
            if b[x] > 0.0 {
                assert!(v.word.len() >= 2 && v.word[..2] == [0, 0]);
            }
        }
        let seeds: Vec<Field> = [1, 1, 2].iter().map(|&s| Preset::Random.field(&form, s).unwrap()).collect();
        assert_eq!(seeds[0], seeds[1]);
        assert_ne!(seeds[0], seeds[2]);
    }
}
