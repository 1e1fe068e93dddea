//! Eigenbases of `-Δ_m = -μ^{-1}H_m` on the non-boundary subspace.

mod decimation;
mod dense;
mod weyl;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_traits::Float;

use crate::error::{invalid, Result};
use crate::field::Field;
use crate::forms::EnergyForm;

pub use decimation::{decimate_sg, decimate_sg_lowest, extend_eigenfunction, sg_children};
pub use dense::{eigendecompose, eigendecompose_capped, DEFAULT_DENSE_CAP};
pub use weyl::{weyl_exponent, WeylFit};

/// Eigenvalues closer than this (relative to `max(λ_max, 1)`) share an
/// eigenspace.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Eigenpairs `(λ_n, φ_n)` of `-μ^{-1}H_m` with `φ_n = 0` on `B`,
/// orthonormal in `(u, v)_m = Σ u v μ`.
///
/// Inside every eigenspace the basis is fixed by [`canonical_basis`], so the
/// modes do not depend on how the eigenspace was computed.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenBasis {
    level: usize,
    boundary: Vec<usize>,
    mu: Vec<f64>,
    lambdas: Vec<f64>,
    modes: Vec<f64>,
    clusters: Vec<Range<usize>>,
}

impl EigenBasis {
    /// Assembles a basis from eigenpairs given eigenspace by eigenspace.
    /// Each group must be a μ-orthonormal basis of one eigenspace; groups are
    /// re-based canonically and sorted by eigenvalue.
    pub(crate) fn from_eigenspaces(
        level: usize,
        boundary: Vec<usize>,
        mu: Vec<f64>,
        mut spaces: Vec<(f64, Vec<Vec<f64>>)>,
    ) -> Self {
        spaces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = mu.len();
        let mut lambdas = Vec::new();
        let mut modes = Vec::new();
        let mut clusters = Vec::with_capacity(spaces.len());
        for (lambda, vectors) in spaces {
            let start = lambdas.len();
            for v in canonical_basis(&mu, &vectors) {
                debug_assert_eq!(v.len(), n);
                lambdas.push(lambda);
                modes.extend(v);
            }
            clusters.push(start..lambdas.len());
        }
        Self { level, boundary, mu, lambdas, modes, clusters }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn num_vertices(&self) -> usize {
        self.mu.len()
    }

    /// Number of eigenpairs, `|V_m| - |B|`.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Nondecreasing eigenvalues.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// `φ_{k+1}` (zero-based index `k`) as vertex values.
    pub fn phi(&self, k: usize) -> &[f64] {
        let n = self.num_vertices();
        &self.modes[k * n..(k + 1) * n]
    }

    pub fn field(&self, k: usize) -> Field {
        Field::new(self.level, self.phi(k).to_vec())
    }

    /// Index ranges of the eigenspaces, in eigenvalue order.
    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    /// Index range of the eigenspace containing mode `k`.
    pub fn eigenspace_of(&self, k: usize) -> Range<usize> {
        self.clusters
            .iter()
            .find(|r| r.contains(&k))
            .cloned()
            .unwrap_or(k..k + 1)
    }

    pub fn is_simple(&self, k: usize) -> bool {
        self.eigenspace_of(k).len() == 1
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mu).map(|((a, b), m)| a * b * m).sum()
    }

    fn check(&self, u: &Field) -> Result<()> {
        if u.level != self.level || u.len() != self.num_vertices() {
            return Err(crate::Error::LevelMismatch {
                expected: self.level,
                expected_len: self.num_vertices(),
                got: u.level,
                got_len: u.len(),
            });
        }
        Ok(())
    }

    /// Coefficients `a_n = (u, φ_n)_m`.
    pub fn expand(&self, u: &Field) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.expand_values(u))
    }

    pub(crate) fn expand_values(&self, u: &[f64]) -> Vec<f64> {
        let weighted: Vec<f64> = u.iter().zip(&self.mu).map(|(a, m)| a * m).collect();
        (0..self.len())
            .map(|k| self.phi(k).iter().zip(&weighted).map(|(p, w)| p * w).sum())
            .collect()
    }

    /// `Σ a_n φ_n`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Field> {
        if coeffs.len() != self.len() {
            return Err(invalid("coefficient vector length differs from the basis size"));
        }
        Ok(Field::new(self.level, self.synthesize_values(coeffs)))
    }

    pub(crate) fn synthesize_values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vertices()];
        for (k, &a) in coeffs.iter().enumerate() {
            if a != 0.0 {
                out.iter_mut().zip(self.phi(k)).for_each(|(o, p)| *o += a * p);
            }
        }
        out
    }

    /// Keeps only the lowest `count` eigenpairs.
    pub fn truncated(&self, count: usize) -> Self {
        let count = count.min(self.len());
        let n = self.num_vertices();
        let clusters = self
            .clusters
            .iter()
            .filter(|r| r.start < count)
            .map(|r| r.start..r.end.min(count))
            .collect();
        Self {
            level: self.level,
            boundary: self.boundary.clone(),
            mu: self.mu.clone(),
            lambdas: self.lambdas[..count].to_vec(),
            modes: self.modes[..count * n].to_vec(),
            clusters,
        }
    }

    /// Largest relative residual `‖-Hφ - λμφ‖ / ‖μφ‖` over non-boundary rows,
    /// and the largest entry of `|Gram - I|` in the weighted inner product.
    pub fn diagnostics(&self, form: &EnergyForm) -> (f64, f64) {
        let n = self.num_vertices();
        let g = form.graph();
        let mut hphi = vec![0.0; n];
        let mut residual = 0.0f64;
        for k in 0..self.len() {
            let phi = self.phi(k);
            form.apply_h(phi, &mut hphi);
            let (mut r2, mut m2) = (0.0, 0.0);
            for x in 0..n {
                if g.is_boundary(x) {
                    continue;
                }
                let mphi = self.mu[x] * phi[x];
                r2 += (-hphi[x] - self.lambdas[k] * mphi).powi(2);
                m2 += mphi * mphi;
            }
            residual = residual.max((r2 / m2).sqrt());
        }
        let mut gram = 0.0f64;
        for i in 0..self.len() {
            for j in i..self.len() {
                let d = self.inner(self.phi(i), self.phi(j)) - if i == j { 1.0 } else { 0.0 };
                gram = gram.max(d.abs());
            }
        }
        (residual, gram)
    }
}

/// Groups sorted eigenvalues into eigenspaces.
pub(crate) fn cluster_ranges(lambdas: &[f64]) -> Vec<Range<usize>> {
    let top = lambdas.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = CLUSTER_TOL * top;
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=lambdas.len() {
        if k == lambdas.len() || lambdas[k] - lambdas[k - 1] > tol {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}

/// Canonical μ-orthonormal basis of the span of `vectors` (which must be
/// μ-orthonormal).
///
/// Vertices are visited in index order; the normalized point mass
/// `δ_v / sqrt(μ_v)` is projected onto the eigenspace, orthogonalized against
/// the vectors already accepted and kept when its remaining norm is at least
/// `0.5 / sqrt(|V|)`. The result depends only on the subspace. For a simple
/// eigenvalue this fixes the sign: `φ(v) > 0` at the first vertex where the
/// mode is not negligible.
pub fn canonical_basis(mu: &[f64], vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = vectors.len();
    let n = mu.len();
    if d == 0 {
        return Vec::new();
    }
    let threshold = 0.5 / (n as f64).sqrt();
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(d);
    for v in 0..n {
        if accepted.len() == d {
            break;
        }
        let s = mu[v].sqrt();
        let mut c: Vec<f64> = vectors.iter().map(|q| q[v] * s).collect();
        for _ in 0..2 {
            for a in &accepted {
                let p: f64 = a.iter().zip(&c).map(|(x, y)| x * y).sum();
                c.iter_mut().zip(a).for_each(|(c, a)| *c -= p * a);
            }
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm >= threshold {
            c.iter_mut().for_each(|x| *x /= norm);
            accepted.push(c);
        }
    }
    debug_assert_eq!(accepted.len(), d);
    accepted
        .iter()
        .map(|c| {
            let mut out = vec![0.0; n];
            for (coef, q) in c.iter().zip(vectors) {
                out.iter_mut().zip(q).for_each(|(o, q)| *o += coef * q);
            }
            out
        })
        .collect()
}

/// μ-orthonormalizes `vectors` in place by modified Gram–Schmidt (twice),
/// dropping vectors that become negligible.
pub(crate) fn orthonormalize(mu: &[f64], vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let ip = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(mu).map(|((x, y), m)| x * y * m).sum() };
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let n0 = ip(&v, &v).sqrt();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &out {
                let p = ip(&v, q);
                v.iter_mut().zip(q).for_each(|(v, q)| *v -= p * q);
            }
        }
        let n1 = ip(&v, &v).sqrt();
        if n1 > 1e-8 * n0 {
            v.iter_mut().for_each(|x| *x /= n1);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_split_on_gaps() {
        let r = cluster_ranges(&[0.0, 1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0]);
        assert_eq!(r, vec![0..1, 1..3, 3..4, 4..6]);
        assert!(cluster_ranges(&[]).is_empty());
    }

    #[test]
    fn canonical_basis_is_basis_independent() {
        let mu = vec![0.25; 4];
        let e = |i: usize| {
            let mut v = vec![0.0; 4];
            v[i] = 2.0;
            v
        };
        let a = canonical_basis(&mu, &[e(1), e(2)]);
        let (c, s) = (0.6f64, 0.8f64);
        let rotated: Vec<Vec<f64>> = vec![
            e(1).iter().zip(e(2)).map(|(x, y)| c * x + s * y).collect(),
            e(1).iter().zip(e(2)).map(|(x, y)| -s * x + c * y).collect(),
        ];
        let b = canonical_basis(&mu, &rotated);
        for (x, y) in a.iter().zip(&b) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-14);
            }
        }
        assert_eq!(a[0], e(1));
    }
}
