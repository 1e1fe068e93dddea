//! Small numerical kernels shared by the form, spectral and evolution code.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Float;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite operator. `x` holds the initial guess and receives the solution.
/// Stops when `‖b - Ax‖ ≤ tol·‖b‖`; returns the iteration count.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok(it);
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        z.iter_mut().zip(&r).zip(diag).for_each(|((z, r), d)| *z = r / d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    if dot(&r, &r).sqrt() <= tol * bnorm {
        Ok(max_iter)
    } else {
        Err(Error::NoConvergence { what: "conjugate gradients", iterations: max_iter })
    }
}

/// Deterministic start vector with energy in every mode of a graph operator.
pub fn probe_vector(n: usize) -> Vec<f64> {
    // Weyl sequence with the golden ratio conjugate, centred.
    const G: f64 = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| {
            let t = ((i as f64 + 1.0) * G).fract();
            t - 0.5 + 1e-3 * (i % 7) as f64
        })
        .collect()
}

/// Largest eigenvalue of a symmetric operator by restarted Lanczos
/// iteration, i.e. power iteration accelerated by Rayleigh–Ritz on the
/// Krylov space of the iterates.
///
/// Converges when successive Ritz values agree to `tol` (relative) and the
/// Ritz residual is below `sqrt(tol)` times the Ritz value; at most
/// `max_matvecs` operator applications are spent.
pub fn lambda_max(
    apply: impl Fn(&[f64], &mut [f64]),
    n: usize,
    tol: f64,
    max_matvecs: usize,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let block = n.min(48);
    let mut start = probe_vector(n);
    let mut prev = f64::NAN;
    let mut used = 0;
    let mut w = vec![0.0; n];
    while used < max_matvecs {
        let norm = dot(&start, &start).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        start.iter_mut().for_each(|v| *v /= norm);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(block);
        let mut beta: Vec<f64> = Vec::with_capacity(block);
        for j in 0..block {
            apply(&basis[j], &mut w);
            used += 1;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Full reorthogonalization, done twice.
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q);
                    axpy(-c, q, &mut w);
                }
            }
            let b = dot(&w, &w).sqrt();
            if j + 1 == block || b <= 1e-14 * a.abs().max(1e-300) {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let s = eig.eigenvectors.column(imax);
        let residual = (beta[k - 1] * s[k - 1]).abs();
        let mut ritz = vec![0.0; n];
        for (i, q) in basis.iter().enumerate().take(k) {
            axpy(s[i], q, &mut ritz);
        }
        let scale = theta.abs().max(f64::MIN_POSITIVE);
        let settled = (theta - prev).abs() <= tol * scale;
        if residual <= 1e-14 * scale || (settled && residual <= tol.sqrt() * scale) {
            return Ok(theta);
        }
        prev = theta;
        start = ritz;
    }
    Err(Error::NoConvergence { what: "largest-eigenvalue iteration", iterations: used })
}

/// Basis of the right nullspace of `a` by Gaussian elimination with full
/// pivoting. Pivots below `tol·max|a_ij|` are treated as zero.
pub fn nullspace(mut a: DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = a.shape();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut colperm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;
    while rank < rows.min(cols) {
        let (mut pr, mut pc, mut best) = (rank, rank, 0.0);
        for j in rank..cols {
            for i in rank..rows {
                let v = a[(i, j)].abs();
                if v > best {
                    best = v;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= tol * scale || best == 0.0 {
            break;
        }
        a.swap_rows(rank, pr);
        a.swap_columns(rank, pc);
        colperm.swap(rank, pc);
        let p = a[(rank, rank)];
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let f = a[(i, rank)] / p;
            if f != 0.0 {
                for j in rank..cols {
                    let v = a[(rank, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        rank += 1;
    }
    // Reduced form: [D  N] with D diagonal, free variables are columns rank..
    (rank..cols)
        .map(|free| {
            let mut x = vec![0.0; cols];
            x[colperm[free]] = 1.0;
            for i in 0..rank {
                x[colperm[i]] = -a[(i, free)] / a[(i, i)];
            }
            x
        })
        .collect()
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub points: usize,
}

pub fn line_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..n {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if sxx == 0.0 {
        return Err(crate::error::invalid("line fit: all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = (0..n).map(|i| (ys[i] - slope * xs[i] - intercept).powi(2)).sum();
    Ok(LineFit { slope, intercept, rms_residual: (ss / nf).sqrt(), points: n })
}
