//! Time evolution: leapfrog, spectral wave and heat solutions, heat kernels,
//! complex-time heat semigroup, heat–wave transmutation and the
//! time-mollified wave operator.

mod leapfrog;
mod propagator;
mod spectral;
mod transmute;

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::field::Field;
use crate::forms::EnergyForm;

pub use leapfrog::{
    cfl_timestep, cfl_timestep_with_safety, leapfrog, leapfrog_invariant, leapfrog_with,
    operator_lambda_max, scaled_lambda_max, Leapfrog, LeapfrogOptions, CFL_LIMIT, CFL_SAFETY,
};
pub use propagator::ChebyshevPropagator;
pub use spectral::{
    complex_heat, heat_kernel, mollified_wave, mollifier, spectral_heat, spectral_wave, SpectralWave,
};
pub use transmute::{gaussian_cutoff, transmute, transmute_trajectory, TransmuteOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scheme {
    Leapfrog,
    SpectralWave,
    SpectralHeat,
}

/// Frames `u(·, k h)`, `k = 0, 1, …`, all on one level and all vanishing on `B`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub scheme: Scheme,
    pub level: usize,
    pub h: f64,
    pub t0: f64,
    pub frames: Vec<Field>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Time of the last frame.
    pub fn horizon(&self) -> f64 {
        self.t0 + self.h * self.frames.len().saturating_sub(1) as f64
    }

    pub fn num_vertices(&self) -> usize {
        self.frames.first().map_or(0, |f| f.len())
    }

    /// Samples `solver` at `t = k h` for `k < steps + 1`.
    pub fn sample(
        scheme: Scheme,
        level: usize,
        h: f64,
        steps: usize,
        mut solver: impl FnMut(f64) -> Result<Field>,
    ) -> Result<Self> {
        let frames = (0..=steps).map(|k| solver(k as f64 * h)).collect::<Result<Vec<_>>>()?;
        Ok(Self { scheme, level, h, t0: 0.0, frames })
    }
}

/// Initial data `u(·, 0) = f`, `u_t(·, 0) = g`, both vanishing on `B`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveInput {
    pub f: Field,
    pub g: Field,
}

impl WaveInput {
    /// Checks the level against `form` and that `f`, `g` vanish on the
    /// boundary set of its graph.
    pub fn new(form: &EnergyForm, f: Field, g: Field) -> Result<Self> {
        f.check(form.graph())?;
        g.check(form.graph())?;
        for &b in form.graph().boundary() {
            if f[b] != 0.0 || g[b] != 0.0 {
                return Err(invalid("initial data must vanish on the boundary set"));
            }
        }
        Ok(Self { f, g })
    }

    /// As [`new`](Self::new) after setting the boundary values to zero.
    pub fn projected(form: &EnergyForm, mut f: Field, mut g: Field) -> Result<Self> {
        f.check(form.graph())?;
        g.check(form.graph())?;
        for &b in form.graph().boundary() {
            f[b] = 0.0;
            g[b] = 0.0;
        }
        Ok(Self { f, g })
    }

    /// Position-only data (`g = 0`).
    pub fn position(form: &EnergyForm, f: Field) -> Result<Self> {
        let g = Field::zeros(form.graph());
        Self::new(form, f, g)
    }

    /// Velocity-only data (`f = 0`).
    pub fn velocity(form: &EnergyForm, g: Field) -> Result<Self> {
        let f = Field::zeros(form.graph());
        Self::new(form, f, g)
    }
}
