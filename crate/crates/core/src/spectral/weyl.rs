use alloc::vec::Vec;

use num_traits::Float;

use super::EigenBasis;
use crate::error::{Error, Result};
use crate::linalg::{line_fit, LineFit};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeylFit {
    /// Fitted `α` in `λ_n ≈ C n^α`.
    pub exponent: f64,
    pub fit: LineFit,
    /// Inclusive index window `[n_lo, n_hi]` (1-based) used by the fit.
    pub window: (usize, usize),
}

/// Slope of `log λ_n` against `log n` over the middle half of the
/// logarithmic index range, `N^{1/4} ≤ n ≤ N^{3/4}`, skipping zero
/// eigenvalues. The low end avoids the first few modes; the high end stays
/// clear of the part of the spectrum where the graph operator departs from
/// its continuum limit.
pub fn weyl_exponent(basis: &EigenBasis) -> Result<WeylFit> {
    fit_lambdas(basis.lambdas())
}

pub(crate) fn fit_lambdas(lambdas: &[f64]) -> Result<WeylFit> {
    let total = lambdas.len();
    if total < 100 {
        return Err(Error::TooFewPoints { needed: 100, got: total });
    }
    let nf = total as f64;
    let lo = nf.powf(0.25).ceil() as usize;
    let hi = nf.powf(0.75).floor() as usize;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in lo.max(1)..=hi.min(total) {
        let l = lambdas[n - 1];
        if l > 0.0 {
            xs.push((n as f64).ln());
            ys.push(l.ln());
        }
    }
    let fit = line_fit(&xs, &ys)?;
    Ok(WeylFit { exponent: fit.slope, fit, window: (lo, hi) })
}
