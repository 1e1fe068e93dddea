use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{Scheme, Trajectory, WaveInput};
use crate::error::{invalid, Error, Result};
use crate::field::Field;
use crate::forms::EnergyForm;
use crate::linalg;

/// Upper end of the stability interval of the scaled operator `-h²μ^{-1}H`.
pub const CFL_LIMIT: f64 = 3.0;
/// Default relative safety margin below [`CFL_LIMIT`].
pub const CFL_SAFETY: f64 = 0.01;

/// `λ_max(-μ^{-1}H_m)` on functions vanishing on `B`, to `1e-10` relative.
pub fn operator_lambda_max(form: &EnergyForm) -> Result<f64> {
    let g = form.graph();
    let interior = g.interior();
    let n = g.num_vertices();
    let inv_sqrt: Vec<f64> = form.mu().iter().map(|m| 1.0 / m.sqrt()).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        let mut full = vec![0.0; n];
        for (k, &v) in interior.iter().enumerate() {
            full[v] = x[k] * inv_sqrt[v];
        }
        let mut hx = vec![0.0; n];
        form.apply_h(&full, &mut hx);
        for (k, &v) in interior.iter().enumerate() {
            y[k] = -hx[v] * inv_sqrt[v];
        }
    };
    linalg::lambda_max(apply, interior.len(), 1e-10, 100_000)
}

/// `λ_max(-h²μ^{-1}H_m)`.
pub fn scaled_lambda_max(form: &EnergyForm, h: f64) -> Result<f64> {
    Ok(h * h * operator_lambda_max(form)?)
}

/// Time step with `λ_max(-h²μ^{-1}H_m) = 3 (1 - 0.01)`.
pub fn cfl_timestep(form: &EnergyForm) -> Result<f64> {
    cfl_timestep_with_safety(form, CFL_SAFETY)
}

pub fn cfl_timestep_with_safety(form: &EnergyForm, safety: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&safety) {
        return Err(invalid("CFL safety margin must lie in [0, 1)"));
    }
    let lmax = operator_lambda_max(form)?;
    if lmax <= 0.0 {
        return Err(invalid("operator has no positive spectrum"));
    }
    Ok((CFL_LIMIT * (1.0 - safety) / lmax).sqrt())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeapfrogOptions {
    /// Run even when `λ_max(-h²μ^{-1}H) > 3`.
    pub allow_cfl_violation: bool,
    /// Known `λ_max(-μ^{-1}H)`; skips the eigenvalue iteration.
    pub lambda_max: Option<f64>,
}

/// Streaming leapfrog integrator
/// `u(t+1) = 2u(t) - u(t-1) + h² μ^{-1}H u(t)`, boundary values pinned to 0.
#[derive(Debug, Clone)]
pub struct Leapfrog<'a> {
    form: &'a EnergyForm,
    h: f64,
    prev: Vec<f64>,
    curr: Vec<f64>,
    scratch: Vec<f64>,
    step: usize,
}

impl<'a> Leapfrog<'a> {
    /// Starts at step 1: frame 0 is `f`, frame 1 is
    /// `f + h g + (h²/2) μ^{-1}H f`.
    pub fn new(form: &'a EnergyForm, input: &WaveInput, h: f64, opts: LeapfrogOptions) -> Result<Self> {
        check_input(form, input)?;
        check_cfl(form, h, opts)?;
        let n = form.num_vertices();
        let mut lf = vec![0.0; n];
        form.apply_laplacian(&input.f, &mut lf);
        let mut curr: Vec<f64> = (0..n)
            .map(|x| input.f[x] + h * input.g[x] + 0.5 * h * h * lf[x])
            .collect();
        pin(form, &mut curr);
        Ok(Self { form, h, prev: input.f.values.clone(), curr, scratch: lf, step: 1 })
    }

    /// Resumes from two consecutive frames `(u(t-1), u(t))`, labelled as
    /// steps `step - 1` and `step`.
    pub fn from_frames(
        form: &'a EnergyForm,
        h: f64,
        prev: Vec<f64>,
        curr: Vec<f64>,
        step: usize,
        opts: LeapfrogOptions,
    ) -> Result<Self> {
        let n = form.num_vertices();
        if prev.len() != n || curr.len() != n {
            return Err(invalid("frames do not match the form's vertex count"));
        }
        check_cfl(form, h, opts)?;
        Ok(Self { form, h, prev, curr, scratch: vec![0.0; n], step })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.h
    }

    pub fn current(&self) -> &[f64] {
        &self.curr
    }

    pub fn previous(&self) -> &[f64] {
        &self.prev
    }

    /// Advances one step and returns the new frame.
    pub fn advance(&mut self) -> &[f64] {
        self.form.apply_laplacian(&self.curr, &mut self.scratch);
        let h2 = self.h * self.h;
        for x in 0..self.curr.len() {
            self.scratch[x] = 2.0 * self.curr[x] - self.prev[x] + h2 * self.scratch[x];
        }
        pin(self.form, &mut self.scratch);
        core::mem::swap(&mut self.prev, &mut self.curr);
        core::mem::swap(&mut self.curr, &mut self.scratch);
        self.step += 1;
        &self.curr
    }

    /// The conserved quantity of the recurrence for the current pair of
    /// frames (see [`leapfrog_invariant`]).
    pub fn invariant(&self) -> f64 {
        leapfrog_invariant(self.form, self.h, &self.prev, &self.curr)
    }
}

/// `‖u(t) - u(t-1)‖² + h² E_m(u(t), u(t-1))` in the weighted norm. Exactly
/// conserved by the leapfrog recurrence, and positive when
/// `λ_max(-h²μ^{-1}H) < 4`.
pub fn leapfrog_invariant(form: &EnergyForm, h: f64, prev: &[f64], curr: &[f64]) -> f64 {
    let diff: Vec<f64> = curr.iter().zip(prev).map(|(a, b)| a - b).collect();
    form.inner(&diff, &diff) + h * h * form.bilinear_of(curr, prev)
}

fn pin(form: &EnergyForm, u: &mut [f64]) {
    for &b in form.graph().boundary() {
        u[b] = 0.0;
    }
}

fn check_input(form: &EnergyForm, input: &WaveInput) -> Result<()> {
    input.f.check(form.graph())?;
    input.g.check(form.graph())?;
    if form.graph().boundary().iter().any(|&b| input.f[b] != 0.0 || input.g[b] != 0.0) {
        return Err(invalid("initial data must vanish on the boundary set"));
    }
    Ok(())
}

fn check_cfl(form: &EnergyForm, h: f64, opts: LeapfrogOptions) -> Result<()> {
    if !(h > 0.0) {
        return Err(invalid("time step must be positive"));
    }
    if opts.allow_cfl_violation {
        return Ok(());
    }
    let lmax = match opts.lambda_max {
        Some(l) => l,
        None => operator_lambda_max(form)?,
    };
    let scaled = h * h * lmax;
    if scaled > CFL_LIMIT {
        return Err(Error::CflViolation { lambda_max: scaled });
    }
    Ok(())
}

/// Runs `steps` leapfrog steps and returns all `steps + 1` frames.
pub fn leapfrog(form: &EnergyForm, input: &WaveInput, h: f64, steps: usize) -> Result<Trajectory> {
    leapfrog_with(form, input, h, steps, LeapfrogOptions::default())
}

pub fn leapfrog_with(
    form: &EnergyForm,
    input: &WaveInput,
    h: f64,
    steps: usize,
    opts: LeapfrogOptions,
) -> Result<Trajectory> {
    let level = form.level();
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(input.f.clone());
    if steps > 0 {
        let mut lf = Leapfrog::new(form, input, h, opts)?;
        frames.push(Field::new(level, lf.current().to_vec()));
        for _ in 1..steps {
            frames.push(Field::new(level, lf.advance().to_vec()));
        }
    } else {
        check_input(form, input)?;
        check_cfl(form, h, opts)?;
    }
    Ok(Trajectory { scheme: Scheme::Leapfrog, level, h, t0: 0.0, frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Boundary, FractalSpec};

    #[test]
    fn interval_timestep_matches_closed_form() {
        for m in [3usize, 6] {
            let f = EnergyForm::build(&FractalSpec::interval(), m, Boundary::Dirichlet).unwrap();
            let n = 1usize << m;
            let lmax = 4.0 * (n * n) as f64 * (core::f64::consts::PI * (n - 1) as f64 / (2 * n) as f64).sin().powi(2);
            let l = operator_lambda_max(&f).unwrap();
            assert!((l - lmax).abs() < 1e-10 * lmax, "{l} {lmax}");
            let h = cfl_timestep(&f).unwrap();
            assert!((h * h * lmax - 3.0 * 0.99).abs() < 1e-9);
        }
    }

    #[test]
    fn doubling_conductances_scales_step() {
        let f = EnergyForm::build(&FractalSpec::sierpinski_gasket(), 3, Boundary::Neumann).unwrap();
        let h1 = cfl_timestep(&f).unwrap();
        let h2 = cfl_timestep(&f.scaled(2.0)).unwrap();
        assert!((h2 / h1 - 1.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn constants_are_stationary_and_cfl_is_enforced() {
        let f = EnergyForm::build(&FractalSpec::sierpinski_gasket(), 2, Boundary::Neumann).unwrap();
        let input = WaveInput::position(&f, Field::constant(f.graph(), 2.5)).unwrap();
        let h = 5f64.powf(-1.0);
        let traj = leapfrog(&f, &input, h, 50).unwrap();
        assert!(traj.frames.iter().all(|fr| fr.iter().all(|&v| (v - 2.5).abs() < 1e-13)));
        let err = leapfrog(&f, &input, 10.0 * h, 5).unwrap_err();
        assert!(matches!(err, Error::CflViolation { .. }));
        let opts = LeapfrogOptions { allow_cfl_violation: true, lambda_max: None };
        assert!(leapfrog_with(&f, &input, 10.0 * h, 5, opts).is_ok());
    }
}
