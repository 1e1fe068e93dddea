use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;

use super::{cluster_ranges, orthonormalize, EigenBasis};
use crate::error::{Error, Result};
use crate::forms::EnergyForm;

/// Largest number of non-boundary unknowns [`eigendecompose`] accepts.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// Full eigenbasis of `-μ^{-1}H_m` on functions vanishing on `B`.
///
/// The symmetric matrix `M^{-1/2}(-H_II)M^{-1/2}` on the non-boundary block
/// is diagonalized densely and the eigenvectors are mapped back by
/// `M^{-1/2}`.
pub fn eigendecompose(form: &EnergyForm) -> Result<EigenBasis> {
    eigendecompose_capped(form, DEFAULT_DENSE_CAP)
}

pub fn eigendecompose_capped(form: &EnergyForm, cap: usize) -> Result<EigenBasis> {
    let g = form.graph();
    let interior = g.interior();
    let k = interior.len();
    if k > cap {
        return Err(Error::DenseCap { what: "eigenproblem", size: k, cap });
    }
    let n = g.num_vertices();
    let mu = form.mu();
    let mut slot = vec![usize::MAX; n];
    for (i, &x) in interior.iter().enumerate() {
        slot[x] = i;
    }
    let scale: Vec<f64> = interior.iter().map(|&x| 1.0 / mu[x].sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(k, k);
    for (i, &x) in interior.iter().enumerate() {
        s[(i, i)] = form.diagonal()[x] * scale[i] * scale[i];
    }
    for (&(x, y), &c) in g.edges().iter().zip(form.conductances()) {
        let (i, j) = (slot[x], slot[y]);
        if i != usize::MAX && j != usize::MAX {
            let v = -c * scale[i] * scale[j];
            s[(i, j)] += v;
            s[(j, i)] += v;
        }
    }
    let eig = SymmetricEigen::new(s.clone());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = eig.eigenvectors.select_columns(&order);
    let ranges = cluster_ranges(&sorted);
    let (y, rayleigh) = refine(&s, y, &sorted, &ranges);
    let top = sorted.last().copied().unwrap_or(0.0).abs().max(1.0);

    let mut spaces = Vec::new();
    for range in ranges {
        let mean = rayleigh[range.clone()].iter().sum::<f64>() / range.len() as f64;
        // The form is positive semidefinite; roundoff-level values are zero.
        let lambda = if mean.abs() <= 1e-12 * top { 0.0 } else { mean };
        let vectors: Vec<Vec<f64>> = range
            .map(|col| {
                let mut v = vec![0.0; n];
                for (i, &x) in interior.iter().enumerate() {
                    v[x] = y[(i, col)] * scale[i];
                }
                v
            })
            .collect();
        spaces.push((lambda, orthonormalize(mu, vectors)));
    }
    Ok(EigenBasis::from_eigenspaces(g.level(), g.boundary().to_vec(), mu.to_vec(), spaces))
}

/// One first-order correction of the computed eigenvectors `y` (columns in
/// the order of `values`): with `C = yᵀ (S y - y Θ)`, column `i` gains
/// `-C_ji / (θ_j - θ_i)` of column `j` for every `j` outside its cluster.
/// Projecting the small residual rather than `S y` keeps the couplings free
/// of cancellation.
/// Returns the corrected vectors with their Rayleigh quotients. Couplings too
/// large for first-order treatment are left alone.
fn refine(s: &DMatrix<f64>, y: DMatrix<f64>, values: &[f64], ranges: &[core::ops::Range<usize>]) -> (DMatrix<f64>, Vec<f64>) {
    let k = values.len();
    let mut cluster = vec![0usize; k];
    for (c, r) in ranges.iter().enumerate() {
        cluster[r.clone()].iter_mut().for_each(|v| *v = c);
    }
    let mut r = s * &y;
    for (i, mut col) in r.column_iter_mut().enumerate() {
        col.axpy(-values[i], &y.column(i), 1.0);
    }
    let c = y.transpose() * r;
    let mut d = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if cluster[i] == cluster[j] {
                continue;
            }
            let gap = values[j] - values[i];
            let cji = c[(j, i)];
            if cji.abs() < 0.1 * gap.abs() {
                d[(j, i)] = -cji / gap;
            }
        }
    }
    let mut z = &y + &y * d;
    for mut col in z.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let rayleigh = (0..k).map(|i| z.column(i).dot(&(s * z.column(i)))).collect();
    (z, rayleigh)
}
