use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::WaveInput;
use crate::error::{invalid, Result};
use crate::field::Field;
use crate::spectral::EigenBasis;

/// Gaussian `φ_σ(s) = (2πσ)^{-1/2} e^{-s²/(2σ)}` of variance `σ`.
pub fn mollifier(sigma: f64, s: f64) -> f64 {
    (-s * s / (2.0 * sigma)).exp() / (2.0 * core::f64::consts::PI * sigma).sqrt()
}

/// `sin(√λ t)/√λ`, continued by `t` at `λ = 0`.
fn sinc_term(lambda: f64, t: f64) -> f64 {
    if lambda == 0.0 {
        t
    } else {
        let w = lambda.sqrt();
        (w * t).sin() / w
    }
}

/// The formal solution `Σ α_n cos(√λ_n t) φ_n + Σ β_n sin(√λ_n t)/√λ_n φ_n`
/// with precomputed coefficients, for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SpectralWave<'a> {
    basis: &'a EigenBasis,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl<'a> SpectralWave<'a> {
    pub fn new(basis: &'a EigenBasis, input: &WaveInput) -> Result<Self> {
        Ok(Self { basis, alpha: basis.expand(&input.f)?, beta: basis.expand(&input.g)? })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Expansion coefficients of `u(·, t)`.
    pub fn coefficients(&self, t: f64) -> Vec<f64> {
        self.basis
            .lambdas()
            .iter()
            .zip(self.alpha.iter().zip(&self.beta))
            .map(|(&l, (&a, &b))| a * (l.sqrt() * t).cos() + b * sinc_term(l, t))
            .collect()
    }

    pub fn at(&self, t: f64) -> Field {
        Field::new(self.basis.level(), self.basis.synthesize_values(&self.coefficients(t)))
    }

    /// Writes `u(·, t)` into `out`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, c) in self.coefficients(t).into_iter().enumerate() {
            if c != 0.0 {
                out.iter_mut().zip(self.basis.phi(k)).for_each(|(o, p)| *o += c * p);
            }
        }
    }
}

pub fn spectral_wave(basis: &EigenBasis, input: &WaveInput, t: f64) -> Result<Field> {
    Ok(SpectralWave::new(basis, input)?.at(t))
}

/// `P_t f = Σ a_n e^{-λ_n t} φ_n`.
pub fn spectral_heat(basis: &EigenBasis, f: &Field, t: f64) -> Result<Field> {
    if !(t >= 0.0) {
        return Err(invalid("heat semigroup needs t >= 0"));
    }
    let a = basis.expand(f)?;
    let damped: Vec<f64> = a.iter().zip(basis.lambdas()).map(|(a, l)| a * (-l * t).exp()).collect();
    basis.synthesize(&damped)
}

/// `p(x, y, t) = Σ e^{-λ_n t} φ_n(x) φ_n(y)`, the kernel of `P_t` against `μ`.
pub fn heat_kernel(basis: &EigenBasis, x: usize, y: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("heat kernel needs t > 0"));
    }
    if x >= basis.num_vertices() || y >= basis.num_vertices() {
        return Err(invalid("heat kernel: vertex index out of range"));
    }
    // Summed from the top of the spectrum down so the small terms go first.
    Ok((0..basis.len())
        .rev()
        .map(|k| (-basis.lambdas()[k] * t).exp() * (basis.phi(k)[x] * basis.phi(k)[y]))
        .sum())
}

/// `P_z f = Σ a_n e^{-λ_n z} φ_n` for complex `z` with `Re z > 0`.
pub fn complex_heat(basis: &EigenBasis, f: &Field, z: Complex64) -> Result<Vec<Complex64>> {
    if !(z.re > 0.0) {
        return Err(invalid("complex heat semigroup needs Re z > 0"));
    }
    let a = basis.expand(f)?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.num_vertices()];
    for (k, (&ak, &l)) in a.iter().zip(basis.lambdas()).enumerate() {
        let c = (-z * l).exp() * ak;
        out.iter_mut().zip(basis.phi(k)).for_each(|(o, &p)| *o += c * p);
    }
    Ok(out)
}

/// `(φ_σ * W f)(t) = Σ a_n e^{-σλ_n/2} cos(√λ_n t) φ_n`.
pub fn mollified_wave(basis: &EigenBasis, f: &Field, sigma: f64, t: f64) -> Result<Field> {
    if !(sigma > 0.0) {
        return Err(invalid("mollifier width must be positive"));
    }
    let a = basis.expand(f)?;
    let c: Vec<f64> = a
        .iter()
        .zip(basis.lambdas())
        .map(|(a, &l)| a * (-0.5 * sigma * l).exp() * (l.sqrt() * t).cos())
        .collect();
    basis.synthesize(&c)
}
