//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub value: Vec<f64>,
    /// Sum over subintervals of the sup-norm Kronrod–Gauss differences.
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn kronrod(f: &mut impl FnMut(f64, &mut [f64]), dim: usize, a: f64, b: f64, buf: &mut [f64]) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for (j, &x) in XGK.iter().enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in nodes {
            f(c + s * h * x, buf);
            for i in 0..dim {
                k[i] += WGK[j] * buf[i];
                if j % 2 == 1 {
                    g[i] += WG[j / 2] * buf[i];
                } else if j == 7 {
                    g[i] += WG[3] * buf[i];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for i in 0..dim {
        k[i] *= h;
        g[i] *= h;
        error = error.max((k[i] - g[i]).abs());
    }
    Piece { a, b, value: k, error }
}

/// Integrates `f: [a, b] → R^dim` (written into the output slice) until the
/// summed error estimate is at most `max(abs_tol, rel_tol·‖value‖∞)`.
pub fn integrate_vec(
    mut f: impl FnMut(f64, &mut [f64]),
    dim: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    let mut buf = vec![0.0; dim];
    let mut pieces = vec![kronrod(&mut f, dim, a, b, &mut buf)];
    let mut evaluations = 15;
    loop {
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        for p in &pieces {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
            err += p.error;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(Quadrature { value: total, error: err, intervals: pieces.len(), evaluations });
        }
        if pieces.len() >= max_intervals {
            return Err(Error::NoConvergence { what: "adaptive quadrature", iterations: pieces.len() });
        }
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].error.total_cmp(&pieces[j].error))
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(kronrod(&mut f, dim, p.a, mid, &mut buf));
        pieces.push(kronrod(&mut f, dim, mid, p.b, &mut buf));
        evaluations += 30;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let q = integrate_vec(|x, out| out[0] = f(x), 1, a, b, abs_tol, 0.0, 10_000)?;
    Ok(q.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        let q = integrate_vec(
            |x, o| {
                o[0] = x.powi(10);
                o[1] = 1.0;
            },
            2,
            -1.0,
            2.0,
            1e-13,
            0.0,
            1,
        )
        .unwrap();
        assert!((q.value[0] - (2f64.powi(11) + 1.0) / 11.0).abs() < 1e-12);
        assert!((q.value[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_cosine_integral() {
        // ∫ e^{-s²/4t} cos(ks) ds / sqrt(4πt) = e^{-k² t}
        let (t, k) = (0.05f64, 7.0f64);
        let c = 1.0 / (4.0 * core::f64::consts::PI * t).sqrt();
        let v = integrate(|s| 2.0 * c * (-s * s / (4.0 * t)).exp() * (k * s).cos(), 0.0, 4.0, 1e-13).unwrap();
        assert!((v - (-k * k * t).exp()).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate_vec(|x, o| o[0] = (1.0 / x.max(1e-300)).sin(), 1, 0.0, 1.0, 1e-15, 0.0, 4);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
