//! Spectral decimation on the Sierpinski gasket.
//!
//! Work is done with the graph eigenvalue `ℓ` of `(D - A)u = (ℓ/4) D u`
//! (degree matrix `D`, adjacency `A`), which at interior vertices reads
//! `4u(x) - Σ_{y~x} u(y) = ℓ u(x)`. An eigenfunction with value `ℓ'` on
//! `V_{k+1}` restricts to one with `ℓ = ℓ'(5 - ℓ')` on `V_k` unless
//! `ℓ' ∈ {2, 5, 6}`; conversely a `V_k` eigenfunction extends to `V_{k+1}`
//! for each root `ℓ'` outside those values. Eigenspaces for 2, 5 and 6 are
//! computed directly on the level where they appear.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;

use super::{orthonormalize, EigenBasis, CLUSTER_TOL, DEFAULT_DENSE_CAP};
use crate::error::{invalid, Error, Result};
use crate::field::Field;
use crate::forms::EnergyForm;
use crate::geometry::{ApproxGraph, Boundary, FractalKind, FractalSpec};
use crate::linalg;

const FORBIDDEN: [f64; 2] = [2.0, 5.0];
const BORN: [f64; 3] = [2.0, 5.0, 6.0];

/// The two roots `ℓ'` of `ℓ'(5 - ℓ') = ℓ`, smaller first. The smaller root is
/// evaluated in cancellation-free form.
pub fn sg_children(parent: f64) -> (f64, f64) {
    let disc = (25.0 - 4.0 * parent).max(0.0).sqrt();
    let minus = 2.0 * parent / (5.0 + disc);
    (minus, 5.0 - minus)
}

/// Extends an eigenfunction with graph value `ell` (the value on the finer
/// level) from `coarse` (`V_k`) to `fine` (`V_{k+1}`). Each new vertex
/// `z` between cell corners `a`, `b`, opposite `c`, receives
/// `((4 - ℓ)(u_a + u_b) + 2u_c) / ((2 - ℓ)(5 - ℓ))`.
pub fn extend_eigenfunction(
    coarse: &ApproxGraph,
    fine: &ApproxGraph,
    u: &[f64],
    ell: f64,
) -> Result<Vec<f64>> {
    if coarse.kind() != FractalKind::SierpinskiGasket
        || fine.kind() != FractalKind::SierpinskiGasket
        || fine.level() != coarse.level() + 1
        || u.len() != coarse.num_vertices()
    {
        return Err(invalid("decimation extends gasket functions by exactly one level"));
    }
    let denom = (2.0 - ell) * (5.0 - ell);
    if denom.abs() < 1e-12 {
        return Err(Error::Decimation(format!("value {ell} has no extension")));
    }
    let mut out = vec![0.0; fine.num_vertices()];
    for (i, &j) in fine.embedding_of(coarse)?.iter().enumerate() {
        out[j] = u[i];
    }
    let mut word = Vec::with_capacity(fine.level());
    for cell in coarse.cells() {
        let v = |c: usize| u[cell.vertices[c]];
        for (a, b, c) in [(0u8, 1u8, 2usize), (0, 2, 1), (1, 2, 0)] {
            word.clear();
            word.extend_from_slice(&cell.word);
            word.push(a);
            let z = fine
                .locate(&word, b)
                .ok_or_else(|| Error::Decimation(format!("missing junction in cell {:?}", cell.word)))?;
            out[z] = ((4.0 - ell) * (v(a as usize) + v(b as usize)) + 2.0 * v(c)) / denom;
        }
    }
    Ok(out)
}

/// Full eigenspace of the graph value `ell` on the non-boundary vertices,
/// via a full-pivot nullspace computation.
fn born_eigenspace(g: &ApproxGraph, ell: f64) -> Result<Vec<Vec<f64>>> {
    let interior = g.interior();
    let k = interior.len();
    if k > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCap { what: "decimation eigenspace", size: k, cap: DEFAULT_DENSE_CAP });
    }
    let mut slot = vec![usize::MAX; g.num_vertices()];
    for (i, &x) in interior.iter().enumerate() {
        slot[x] = i;
    }
    let mut a = DMatrix::<f64>::zeros(k, k);
    for (i, &x) in interior.iter().enumerate() {
        let d = g.degree(x) as f64;
        a[(i, i)] = d * (1.0 - ell / 4.0);
        for &y in g.neighbors(x) {
            if slot[y] != usize::MAX {
                a[(i, slot[y])] -= 1.0;
            }
        }
    }
    Ok(linalg::nullspace(a, 1e-9)
        .into_iter()
        .map(|v| {
            let mut full = vec![0.0; g.num_vertices()];
            for (i, &x) in interior.iter().enumerate() {
                full[x] = v[i];
            }
            full
        })
        .collect())
}

/// Conversion from graph values `ℓ` to eigenvalues of `-μ^{-1}H_m`, read off
/// the assembled form: `λ = (-H_xx / μ_x) ℓ / 4`, which must be the same at
/// every vertex.
fn scale_factor(form: &EnergyForm) -> Result<f64> {
    let ratios: Vec<f64> = form.diagonal().iter().zip(form.mu()).map(|(d, m)| d / m).collect();
    let r0 = ratios[0];
    if ratios.iter().any(|r| (r - r0).abs() > 1e-12 * r0) {
        return Err(Error::Decimation("form is not a multiple of the normalized Laplacian".into()));
    }
    Ok(r0 / 4.0)
}

/// Complete eigenbasis of `-μ^{-1}H_m` on the gasket at `level`, generated by
/// spectral decimation from level 0.
pub fn decimate_sg(level: usize, boundary: Boundary) -> Result<EigenBasis> {
    let spec = FractalSpec::sierpinski_gasket();
    let mut graph = ApproxGraph::build(&spec, 0, boundary)?;
    // (ℓ, eigenvectors) on the current level.
    let mut spaces: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    if boundary == Boundary::Neumann {
        spaces.push((0.0, vec![vec![1.0; 3]]));
        spaces.push((6.0, vec![vec![1.0, -1.0, 0.0], vec![1.0, 0.0, -1.0]]));
    }
    for k in 1..=level {
        let fine = ApproxGraph::build(&spec, k, boundary)?;
        let mut next: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
        for (ell, vectors) in &spaces {
            let (lo, hi) = sg_children(*ell);
            for child in [lo, hi] {
                if FORBIDDEN.iter().any(|f| (child - f).abs() < 1e-9) {
                    continue;
                }
                let ext = vectors
                    .iter()
                    .map(|v| extend_eigenfunction(&graph, &fine, v, child))
                    .collect::<Result<Vec<_>>>()?;
                next.push((child, ext));
            }
        }
        for ell in BORN {
            let space = born_eigenspace(&fine, ell)?;
            if !space.is_empty() {
                next.push((ell, space));
            }
        }
        spaces = next;
        graph = fine;
    }

    let form = EnergyForm::assemble(&spec, graph)?;
    let dim = form.graph().interior().len();
    let found: usize = spaces.iter().map(|s| s.1.len()).sum();
    if found != dim {
        return Err(Error::Decimation(format!(
            "level {level}: generated {found} eigenfunctions for a space of dimension {dim}"
        )));
    }
    let factor = scale_factor(&form)?;
    spaces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, Vec<Vec<f64>>)> = Vec::new();
    for (ell, vectors) in spaces {
        match merged.last_mut() {
            Some(last) if (ell - last.0).abs() <= CLUSTER_TOL * 6.0 => last.1.extend(vectors),
            _ => merged.push((ell, vectors)),
        }
    }
    let mu = form.mu().to_vec();
    let mut out = Vec::with_capacity(merged.len());
    for (ell, vectors) in merged {
        let count = vectors.len();
        let basis = orthonormalize(&mu, vectors);
        if basis.len() != count {
            return Err(Error::Decimation(format!("eigenspace of value {ell} lost rank")));
        }
        out.push((factor * ell, basis));
    }
    Ok(EigenBasis::from_eigenspaces(level, form.graph().boundary().to_vec(), mu, out))
}

/// The lowest `count` decimated eigenpairs.
pub fn decimate_sg_lowest(level: usize, boundary: Boundary, count: usize) -> Result<Vec<(f64, Field)>> {
    let basis = decimate_sg(level, boundary)?;
    Ok((0..count.min(basis.len())).map(|k| (basis.lambdas()[k], basis.field(k))).collect())
}
