//! Heat solutions as Gaussian time averages of wave solutions:
//! `v(x, t) = ∫ (4πt)^{-1/2} e^{-s²/(4t)} u(x, s) ds` where `u` solves the
//! wave equation with `u(·, 0) = f`, `u_t(·, 0) = 0`. Such `u` is even in
//! `s`, so the integral is twice the one over `[0, S]`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{SpectralWave, Trajectory, WaveInput};
use crate::error::{invalid, Error, Result};
use crate::field::{sup_norm, Field};
use crate::quadrature;
use crate::spectral::EigenBasis;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmuteOptions {
    /// Absolute quadrature tolerance, relative to `max(1, ‖f‖∞)`.
    pub tol: f64,
    /// Gaussian mass allowed beyond the truncation point `S`.
    pub tail: f64,
}

impl Default for TransmuteOptions {
    fn default() -> Self {
        Self { tol: 1e-10, tail: 1e-12 }
    }
}

/// Smallest `S` (up to bisection precision) with
/// `∫_{|s|>S} (4πt)^{-1/2} e^{-s²/(4t)} ds = erfc(S / 2√t) ≤ tail`.
pub fn gaussian_cutoff(t: f64, tail: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while libm::erfc(hi) > tail {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if libm::erfc(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    2.0 * t.sqrt() * hi
}

fn kernel(t: f64, s: f64) -> f64 {
    (-s * s / (4.0 * t)).exp() / (4.0 * core::f64::consts::PI * t).sqrt()
}

/// Transmutation with wave values from the spectral solution, exact at
/// every quadrature node.
pub fn transmute(basis: &EigenBasis, input: &WaveInput, t: f64, opts: TransmuteOptions) -> Result<Field> {
    if !(t > 0.0) {
        return Err(invalid("transmutation needs t > 0"));
    }
    if input.g.iter().any(|&v| v != 0.0) {
        return Err(invalid("transmutation needs zero initial velocity"));
    }
    let wave = SpectralWave::new(basis, input)?;
    let n = basis.num_vertices();
    let s_max = gaussian_cutoff(t, opts.tail);
    let tol = opts.tol * sup_norm(&input.f).max(1.0);
    let q = quadrature::integrate_vec(
        |s, out| {
            wave.eval_into(s, out);
            let w = 2.0 * kernel(t, s);
            out.iter_mut().for_each(|v| *v *= w);
        },
        n,
        0.0,
        s_max,
        tol,
        0.0,
        20_000,
    )?;
    Ok(Field::new(basis.level(), q.value))
}

/// Transmutation from stored frames `u(·, k h)` of a `g = 0` run, using
/// cubic interpolation between frames (frames at negative times come from
/// the evenness of `u`). Accuracy is limited by the interpolation, about
/// `h⁴` times the fourth time derivative.
pub fn transmute_trajectory(traj: &Trajectory, t: f64, opts: TransmuteOptions) -> Result<Field> {
    if !(t > 0.0) {
        return Err(invalid("transmutation needs t > 0"));
    }
    let s_max = gaussian_cutoff(t, opts.tail);
    let h = traj.h;
    let last = traj.frames.len().saturating_sub(1);
    // The last panel needs one frame beyond it for the cubic stencil.
    let available = if last >= 2 { h * (last - 1) as f64 } else { 0.0 };
    if available < s_max {
        return Err(Error::InsufficientCoverage { required: s_max, available });
    }
    let n = traj.num_vertices();
    let frame = |k: isize| -> &[f64] { &traj.frames[k.unsigned_abs()].values };
    let panels = (s_max / h).ceil() as usize;
    let tol = opts.tol * traj.frames.iter().map(|f| f.sup_norm()).fold(1.0, f64::max) / panels as f64;
    let mut total = vec![0.0; n];
    for p in 0..panels {
        let a = p as f64 * h;
        let b = ((p + 1) as f64 * h).min(s_max);
        let base = p as isize;
        let stencil: [&[f64]; 4] = [frame(base - 1), frame(base), frame(base + 1), frame(base + 2)];
        let q = quadrature::integrate_vec(
            |s, out: &mut [f64]| {
                // Lagrange weights on nodes -1, 0, 1, 2 (in units of h).
                let x = s / h - base as f64;
                let w = [
                    -x * (x - 1.0) * (x - 2.0) / 6.0,
                    (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
                    -(x + 1.0) * x * (x - 2.0) / 2.0,
                    (x + 1.0) * x * (x - 1.0) / 6.0,
                ];
                let k = 2.0 * kernel(t, s);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = k * (w[0] * stencil[0][i] + w[1] * stencil[1][i] + w[2] * stencil[2][i] + w[3] * stencil[3][i]);
                }
            },
            n,
            a,
            b,
            tol,
            0.0,
            64,
        )?;
        total.iter_mut().zip(&q.value).for_each(|(t, v)| *t += v);
    }
    Ok(Field::new(traj.level, total))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_has_requested_tail() {
        for t in [0.01, 0.1, 1.0] {
            let s = gaussian_cutoff(t, 1e-12);
            let z = s / (2.0 * t.sqrt());
            assert!(libm::erfc(z) <= 1e-12 && libm::erfc(z * 0.999) > 1e-12);
        }
    }

    #[test]
    fn kernel_integrates_to_one() {
        let t = 0.05;
        let s = gaussian_cutoff(t, 1e-14);
        let v = quadrature::integrate(|x| 2.0 * kernel(t, x), 0.0, s, 1e-14).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
