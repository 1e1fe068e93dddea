//! Spectral functions of `A = -μ^{-1}H_m` applied without an eigenbasis.
//!
//! `F(A) v` is evaluated through a Chebyshev expansion of `F` on
//! `[0, b]`, `b` a Gershgorin bound for the spectrum. This reproduces
//! `spectral_wave` and `spectral_heat` to roundoff on levels too large for a
//! dense eigensolver.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::WaveInput;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::forms::EnergyForm;

const MAX_DEGREE: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct ChebyshevPropagator<'a> {
    form: &'a EnergyForm,
    bound: f64,
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(form: &'a EnergyForm) -> Self {
        Self { form, bound: form.gershgorin_bound().max(f64::MIN_POSITIVE) }
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Chebyshev coefficients of `F(b (x + 1) / 2)` on `[-1, 1]`, truncated
    /// where the series has converged to roundoff.
    fn coefficients(&self, func: &impl Fn(f64) -> f64, start: usize) -> Result<Vec<f64>> {
        let mut m = start.max(16);
        loop {
            let values: Vec<f64> = (0..m)
                .map(|j| {
                    let x = (core::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
                    func(0.5 * self.bound * (x + 1.0))
                })
                .collect();
            let mut c = vec![0.0; m];
            for (j, &fv) in values.iter().enumerate() {
                let x = (core::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos();
                let (mut t0, mut t1) = (1.0, x);
                c[0] += fv;
                if m > 1 {
                    c[1] += fv * x;
                }
                for ck in c.iter_mut().skip(2) {
                    let t2 = 2.0 * x * t1 - t0;
                    *ck += fv * t2;
                    t0 = t1;
                    t1 = t2;
                }
            }
            c.iter_mut().for_each(|ck| *ck *= 2.0 / m as f64);
            c[0] *= 0.5;
            let scale = values.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
            // Coefficients past the bandwidth sit at the roundoff level of
            // the discrete transform; converged once the last quarter does.
            let cutoff = 4.0 * f64::EPSILON * (m as f64).sqrt() * scale;
            let tail_start = m - m / 4;
            if c[tail_start..].iter().all(|v| v.abs() <= 10.0 * cutoff) {
                let keep = c.iter().rposition(|v| v.abs() > cutoff).map_or(1, |k| k + 1);
                c.truncate(keep);
                return Ok(c);
            }
            if m >= MAX_DEGREE {
                return Err(Error::NoConvergence { what: "Chebyshev expansion", iterations: m });
            }
            m *= 2;
        }
    }

    /// `X v = (2/b) A v - v`.
    fn apply_x(&self, v: &[f64], out: &mut [f64]) {
        self.form.apply_laplacian(v, out);
        let s = -2.0 / self.bound;
        out.iter_mut().zip(v).for_each(|(o, v)| *o = s * *o - v);
    }

    fn apply(&self, func: impl Fn(f64) -> f64, v: &[f64], start: usize) -> Result<Vec<f64>> {
        let c = self.coefficients(&func, start)?;
        let n = v.len();
        let mut prev = v.to_vec();
        let mut out: Vec<f64> = v.iter().map(|x| c[0] * x).collect();
        if c.len() == 1 {
            return Ok(out);
        }
        let mut curr = vec![0.0; n];
        self.apply_x(v, &mut curr);
        out.iter_mut().zip(&curr).for_each(|(o, t)| *o += c[1] * t);
        let mut next = vec![0.0; n];
        for &ck in &c[2..] {
            self.apply_x(&curr, &mut next);
            next.iter_mut().zip(&prev).for_each(|(t, p)| *t = 2.0 * *t - p);
            out.iter_mut().zip(&next).for_each(|(o, t)| *o += ck * t);
            core::mem::swap(&mut prev, &mut curr);
            core::mem::swap(&mut curr, &mut next);
        }
        Ok(out)
    }

    fn wave_degree(&self, tau: f64) -> usize {
        (1.2 * tau.abs() * self.bound.sqrt()) as usize + 40
    }

    /// `cos(τ √A) f`.
    pub fn cos_sqrt(&self, f: &[f64], tau: f64) -> Result<Vec<f64>> {
        self.apply(|l| (tau * l.max(0.0).sqrt()).cos(), f, self.wave_degree(tau))
    }

    /// `sin(τ √A) / √A g`, with value `τ g` on the kernel of `A`.
    pub fn sinc_sqrt(&self, g: &[f64], tau: f64) -> Result<Vec<f64>> {
        let func = |l: f64| {
            let w = l.max(0.0).sqrt();
            if w * tau.abs() < 1e-8 {
                tau * (1.0 - tau * tau * l / 6.0)
            } else {
                (tau * w).sin() / w
            }
        };
        self.apply(func, g, self.wave_degree(tau))
    }

    /// `e^{-τ A} f`, `τ ≥ 0`.
    pub fn heat(&self, f: &[f64], tau: f64) -> Result<Vec<f64>> {
        if !(tau >= 0.0) {
            return Err(crate::error::invalid("heat semigroup needs t >= 0"));
        }
        let start = (2.0 * (tau * self.bound).sqrt()) as usize + 40;
        self.apply(|l| (-tau * l).exp(), f, start)
    }

    /// Wave solution `cos(τ√A) f + sin(τ√A)/√A g`.
    pub fn wave(&self, input: &WaveInput, tau: f64) -> Result<Field> {
        let mut u = self.cos_sqrt(&input.f, tau)?;
        if input.g.iter().any(|&v| v != 0.0) {
            let v = self.sinc_sqrt(&input.g, tau)?;
            u.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
        }
        Ok(Field::new(self.form.level(), u))
    }
}
