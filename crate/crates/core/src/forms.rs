//! Compatible self-similar Dirichlet forms on the graphs `Γ_m`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::field::Field;
use crate::geometry::{ApproxGraph, Boundary, FractalSpec};
use crate::linalg;

/// `E_m(u, u) = Σ_e c_e (u(x) - u(y))²` together with the operator `H_m`
/// (`E_m(u, v) = -(u, H_m v)` in the unweighted pairing) and the weights
/// `μ_{m,x}`.
#[derive(Debug, Clone)]
pub struct EnergyForm {
    spec: FractalSpec,
    graph: ApproxGraph,
    conductance: Vec<f64>,
    diag: Vec<f64>,
    mu: Vec<f64>,
}

impl EnergyForm {
    pub fn assemble(spec: &FractalSpec, graph: ApproxGraph) -> Result<Self> {
        spec.validate()?;
        if spec.kind != graph.kind() {
            return Err(invalid("energy form: graph was built from a different fractal"));
        }
        let v0 = spec.v0_size() as f64;
        let cell_r: Vec<f64> = graph
            .cells()
            .iter()
            .map(|c| c.word.iter().map(|&i| spec.renormalization[i as usize]).product())
            .collect();
        let conductance: Vec<f64> = graph
            .edge_cells()
            .iter()
            .map(|&c| spec.base_conductance / cell_r[c])
            .collect();
        let mut diag = vec![0.0; graph.num_vertices()];
        for (&(x, y), &c) in graph.edges().iter().zip(&conductance) {
            diag[x] += c;
            diag[y] += c;
        }
        let mut mu = vec![0.0; graph.num_vertices()];
        for cell in graph.cells() {
            let m: f64 = cell.word.iter().map(|&i| spec.measure_weights[i as usize]).product();
            for &v in &cell.vertices {
                mu[v] += m / v0;
            }
        }
        Ok(Self { spec: spec.clone(), graph, conductance, diag, mu })
    }

    /// Builds the graph and assembles its form in one step.
    pub fn build(spec: &FractalSpec, level: usize, boundary: Boundary) -> Result<Self> {
        Self::assemble(spec, ApproxGraph::build(spec, level, boundary)?)
    }

    pub fn spec(&self) -> &FractalSpec {
        &self.spec
    }

    pub fn graph(&self) -> &ApproxGraph {
        &self.graph
    }

    pub fn level(&self) -> usize {
        self.graph.level()
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Per-edge conductances, parallel to `graph().edges()`.
    pub fn conductances(&self) -> &[f64] {
        &self.conductance
    }

    /// `-H_m(x, x)`: total conductance at each vertex.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Same form with every conductance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.conductance.iter_mut().for_each(|c| *c *= factor);
        out.diag.iter_mut().for_each(|c| *c *= factor);
        out
    }

    /// Same form with a different boundary set on the same graph.
    pub fn with_boundary(&self, boundary: Vec<usize>) -> Result<Self> {
        let mut out = self.clone();
        out.graph = out.graph.with_boundary(boundary)?;
        Ok(out)
    }

    fn check_field(&self, u: &Field) -> Result<()> {
        u.check(&self.graph)
    }

    /// `out = H_m u`, i.e. `(H u)(x) = Σ_y c_xy (u(y) - u(x))`.
    pub fn apply_h(&self, u: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            let mut s = -self.diag[x] * u[x];
            for (&y, &e) in self.graph.neighbors(x).iter().zip(self.graph.neighbor_edges(x)) {
                s += self.conductance[e] * u[y];
            }
            *o = s;
        }
    }

    /// `out = μ^{-1} H_m u` with rows in `B` set to zero.
    pub fn apply_laplacian(&self, u: &[f64], out: &mut [f64]) {
        self.apply_h(u, out);
        for (x, o) in out.iter_mut().enumerate() {
            *o = if self.graph.is_boundary(x) { 0.0 } else { *o / self.mu[x] };
        }
    }

    pub fn h(&self, u: &Field) -> Result<Field> {
        self.check_field(u)?;
        let mut out = vec![0.0; u.len()];
        self.apply_h(u, &mut out);
        Ok(Field::new(u.level, out))
    }

    pub fn laplacian(&self, u: &Field) -> Result<Field> {
        self.check_field(u)?;
        let mut out = vec![0.0; u.len()];
        self.apply_laplacian(u, &mut out);
        Ok(Field::new(u.level, out))
    }

    /// `E_m(u, u)`.
    pub fn energy(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        Ok(self.energy_of(u))
    }

    /// `E_m(u, v)`.
    pub fn bilinear(&self, u: &Field, v: &Field) -> Result<f64> {
        self.check_field(u)?;
        self.check_field(v)?;
        Ok(self.bilinear_of(u, v))
    }

    pub fn energy_of(&self, u: &[f64]) -> f64 {
        self.bilinear_of(u, u)
    }

    pub fn bilinear_of(&self, u: &[f64], v: &[f64]) -> f64 {
        self.graph
            .edges()
            .iter()
            .zip(&self.conductance)
            .map(|(&(x, y), c)| c * (u[x] - u[y]) * (v[x] - v[y]))
            .sum()
    }

    /// `(u, v)_m = Σ_x u(x) v(x) μ_{m,x}`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mu).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }

    /// Weighted mean `Σ u μ / Σ μ`.
    pub fn mean(&self, u: &[f64]) -> f64 {
        self.inner(u, &vec![1.0; u.len()]) / self.mu.iter().sum::<f64>()
    }

    /// Upper bound for the spectrum of `-μ^{-1}H_m` (Gershgorin).
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.num_vertices())
            .filter(|&x| !self.graph.is_boundary(x))
            .map(|x| 2.0 * self.diag[x] / self.mu[x])
            .fold(0.0, f64::max)
    }

    /// Minimizes `E_m` subject to prescribed values on `fixed` (indices, and
    /// values in the same order). Solves the interior block of `H_m` by
    /// conjugate gradients.
    pub fn minimize_energy(&self, fixed: &[usize], values: &[f64]) -> Result<Vec<f64>> {
        if fixed.len() != values.len() || fixed.is_empty() {
            return Err(invalid("energy minimization needs matching, nonempty constraints"));
        }
        let n = self.num_vertices();
        let mut u = vec![0.0; n];
        let mut is_fixed = vec![false; n];
        for (&i, &v) in fixed.iter().zip(values) {
            if i >= n {
                return Err(invalid("constrained vertex index out of range"));
            }
            is_fixed[i] = true;
            u[i] = v;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
        if free.is_empty() {
            return Ok(u);
        }
        let mut slot = vec![usize::MAX; n];
        for (k, &i) in free.iter().enumerate() {
            slot[i] = k;
        }
        // -H_II x = H_IF u_F
        let mut rhs = vec![0.0; free.len()];
        for (k, &x) in free.iter().enumerate() {
            for (&y, &e) in self.graph.neighbors(x).iter().zip(self.graph.neighbor_edges(x)) {
                if is_fixed[y] {
                    rhs[k] += self.conductance[e] * u[y];
                }
            }
        }
        let diag: Vec<f64> = free.iter().map(|&x| self.diag[x]).collect();
        let apply = |v: &[f64], out: &mut [f64]| {
            for (k, &x) in free.iter().enumerate() {
                let mut s = self.diag[x] * v[k];
                for (&y, &e) in self.graph.neighbors(x).iter().zip(self.graph.neighbor_edges(x)) {
                    if slot[y] != usize::MAX {
                        s -= self.conductance[e] * v[slot[y]];
                    }
                }
                out[k] = s;
            }
        };
        let mut sol = vec![0.0; free.len()];
        linalg::conjugate_gradient(apply, &diag, &rhs, &mut sol, 1e-14, 50 * free.len() + 1000)?;
        for (k, &x) in free.iter().enumerate() {
            u[x] = sol[k];
        }
        Ok(u)
    }
}

/// Harmonic extension of `u` from `coarse` to the finer form `fine`.
///
/// Harmonic extension from `V_k` to `V_{k+1}` is local: the new points of a
/// cell `F_ω K` depend only on the values at its corners. The level-1
/// extension matrix is computed once from the level-1 energy-minimization
/// problem and then applied cell by cell, level by level.
pub fn harmonic_extension(coarse: &EnergyForm, fine: &EnergyForm, u: &Field) -> Result<Field> {
    u.check(coarse.graph())?;
    if coarse.spec() != fine.spec() || fine.level() <= coarse.level() {
        return Err(invalid("harmonic extension needs the same fractal and a finer level"));
    }
    let spec = coarse.spec();
    let v0 = spec.v0_size();
    let unit = EnergyForm::build(spec, 1, Boundary::Neumann)?;
    let one = unit.graph();
    let base = ApproxGraph::build(spec, 0, Boundary::Neumann)?;
    let corner_idx = one.embedding_of(&base)?;
    // ext[p] = weights of the V_0 corners for point p of V_1.
    let mut ext = vec![vec![0.0; v0]; one.num_vertices()];
    for c in 0..v0 {
        let mut vals = vec![0.0; v0];
        vals[c] = 1.0;
        let h = unit.minimize_energy(&corner_idx, &vals)?;
        for (p, w) in h.iter().enumerate() {
            ext[p][c] = *w;
        }
    }
    let mut current = u.values.clone();
    let mut prev_graph = coarse.graph().clone();
    for level in coarse.level() + 1..=fine.level() {
        let g = if level == fine.level() {
            fine.graph().clone()
        } else {
            ApproxGraph::build_capped(spec, level, Boundary::Neumann, level)?
        };
        let mut next = vec![f64::NAN; g.num_vertices()];
        for (i, &j) in g.embedding_of(&prev_graph)?.iter().enumerate() {
            next[j] = current[i];
        }
        for cell in prev_graph.cells() {
            let vals: Vec<f64> = cell.vertices.iter().map(|&v| current[v]).collect();
            let targets = g.cell_map(one, &cell.word)?;
            for (p, &t) in targets.iter().enumerate() {
                if next[t].is_nan() {
                    next[t] = ext[p].iter().zip(&vals).map(|(w, v)| w * v).sum();
                }
            }
        }
        current = next;
        prev_graph = g;
    }
    Ok(Field::new(fine.level(), current))
}

/// Effective resistance `R(x, y) = 1 / min{E_m(v): v(x) = 1, v(y) = 0}`.
pub fn resistance(form: &EnergyForm, x: usize, y: usize) -> Result<f64> {
    let n = form.num_vertices();
    if x >= n || y >= n {
        return Err(invalid("resistance: vertex index out of range"));
    }
    if x == y {
        return Err(invalid("resistance: points must differ"));
    }
    let v = form.minimize_energy(&[x, y], &[1.0, 0.0])?;
    Ok(1.0 / form.energy_of(&v))
}

/// All pairwise resistances, from the Green matrix of the grounded
/// Laplacian: `R(x, y) = G_xx + G_yy - 2 G_xy` with `G = (-H + J/n)^{-1}`.
pub fn resistance_matrix(form: &EnergyForm) -> Result<DMatrix<f64>> {
    let n = form.num_vertices();
    let mut l = DMatrix::<f64>::from_element(n, n, 1.0 / n as f64);
    for x in 0..n {
        l[(x, x)] += form.diagonal()[x];
    }
    for (&(x, y), &c) in form.graph().edges().iter().zip(form.conductances()) {
        l[(x, y)] -= c;
        l[(y, x)] -= c;
    }
    let g = l.cholesky().ok_or(Error::Singular)?.inverse();
    Ok(DMatrix::from_fn(n, n, |i, j| g[(i, i)] + g[(j, j)] - 2.0 * g[(i, j)]))
}

/// `max_{x,y ∈ V_m} R(x, y)`.
pub fn resistance_diameter(form: &EnergyForm) -> Result<f64> {
    Ok(resistance_matrix(form)?.iter().copied().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FractalKind;

    fn form(kind: FractalKind, level: usize) -> EnergyForm {
        EnergyForm::build(&FractalSpec::of_kind(kind), level, Boundary::Neumann).unwrap()
    }

    #[test]
    fn interval_rows_are_scaled_second_differences() {
        let m = 5;
        let f = form(FractalKind::Interval, m);
        let g = f.graph();
        let u: Vec<f64> = g.coords().iter().map(|c| (3.0 * c[0]).sin() + c[0] * c[0]).collect();
        let mut lu = vec![0.0; u.len()];
        f.apply_laplacian(&u, &mut lu);
        let step = 0.5f64.powi(m as i32);
        let scale = 4f64.powi(m as i32);
        for x in 0..g.num_vertices() {
            if g.degree(x) != 2 {
                continue;
            }
            let nb = g.neighbors(x);
            let expect = scale * (u[nb[0]] + u[nb[1]] - 2.0 * u[x]);
            assert!((lu[x] - expect).abs() < 1e-9 * scale, "{}", lu[x] - expect);
            let xs: Vec<f64> = nb.iter().map(|&y| g.coords()[y][0]).collect();
            assert!((xs[0] - xs[1]).abs() - 2.0 * step < 1e-15);
        }
    }

    #[test]
    fn gasket_identity_with_normalized_laplacian() {
        for m in 0..5 {
            let f = form(FractalKind::SierpinskiGasket, m);
            let g = f.graph();
            let u: Vec<f64> = (0..g.num_vertices()).map(|i| ((i * 37 % 11) as f64).cos()).collect();
            let mut lu = vec![0.0; u.len()];
            f.apply_laplacian(&u, &mut lu);
            let s = 1.5 * 5f64.powi(m as i32);
            for x in 0..g.num_vertices() {
                let nb = g.neighbors(x);
                let avg = nb.iter().map(|&y| u[y]).sum::<f64>() / nb.len() as f64;
                assert!((lu[x] - s * (avg - u[x])).abs() < 1e-11 * s);
            }
        }
    }

    #[test]
    fn measure_is_a_probability() {
        for kind in [FractalKind::Interval, FractalKind::SierpinskiGasket] {
            for m in 0..6 {
                let total: f64 = form(kind, m).mu().iter().sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn energy_examples() {
        let f = form(FractalKind::Interval, 0);
        assert_eq!(f.energy(&Field::new(0, vec![0.0, 1.0])).unwrap(), 1.0);
        let f = form(FractalKind::SierpinskiGasket, 0);
        let e = f.energy(&Field::new(0, vec![1.0, 0.0, 0.0])).unwrap();
        assert!((e - 2.0 * f.spec().base_conductance).abs() < 1e-15);
        let c = Field::constant(f.graph(), 3.5);
        assert_eq!(f.energy(&c).unwrap(), 0.0);
        assert!(f.h(&c).unwrap().iter().all(|&v| v == 0.0));
        assert!(f.energy(&Field::new(1, vec![0.0; 3])).is_err());
    }

    #[test]
    fn energy_matches_operator_pairing() {
        let f = form(FractalKind::SierpinskiGasket, 3);
        let u: Vec<f64> = (0..f.num_vertices()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut hu = vec![0.0; u.len()];
        f.apply_h(&u, &mut hu);
        let pairing = -linalg::dot(&u, &hu);
        let e = f.energy_of(&u);
        assert!((e - pairing).abs() < 1e-12 * e);
    }

    #[test]
    fn gasket_level_one_extension() {
        let coarse = form(FractalKind::SierpinskiGasket, 0);
        let fine = form(FractalKind::SierpinskiGasket, 1);
        let u = Field::new(0, vec![0.0, 1.0, 0.0]);
        let ext = harmonic_extension(&coarse, &fine, &u).unwrap();
        let g = fine.graph();
        let at = |w: u8, c: u8| ext[g.locate(&[w], c).unwrap()];
        // Midpoints adjacent to q_1 take 2/5, the opposite one 1/5.
        assert!((at(0, 1) - 0.4).abs() < 1e-14);
        assert!((at(1, 2) - 0.4).abs() < 1e-14);
        assert!((at(0, 2) - 0.2).abs() < 1e-14);
        // Direct global minimization agrees.
        let fixed = g.embedding_of(coarse.graph()).unwrap();
        let direct = fine.minimize_energy(&fixed, &u).unwrap();
        assert!(ext.sup_distance(&direct) < 1e-13);
    }

    #[test]
    fn interval_extension_is_linear_interpolation() {
        let coarse = form(FractalKind::Interval, 2);
        let fine = form(FractalKind::Interval, 6);
        let u = Field::from_fn(coarse.graph(), |i| 2.0 - 3.0 * coarse.graph().coords()[i][0]);
        let ext = harmonic_extension(&coarse, &fine, &u).unwrap();
        for (i, c) in fine.graph().coords().iter().enumerate() {
            assert!((ext[i] - (2.0 - 3.0 * c[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn resistance_examples() {
        let f = form(FractalKind::Interval, 3);
        let (a, b) = (f.graph().corner(0), f.graph().corner(1));
        assert!((resistance(&f, a, b).unwrap() - 1.0).abs() < 1e-12);
        let half = f.graph().locate(&[0], 1).unwrap();
        assert!((resistance(&f, a, half).unwrap() - 0.5).abs() < 1e-12);
        assert!(resistance(&f, a, a).is_err());

        // Trace onto V_0 is E_0 at every level: a triangle of conductance c
        // has corner-to-corner resistance 2/(3c).
        for m in 0..4 {
            let f = form(FractalKind::SierpinskiGasket, m);
            let g = f.graph();
            let r = resistance(&f, g.corner(0), g.corner(1)).unwrap();
            let expect = 2.0 / (3.0 * f.spec().base_conductance);
            assert!((r - expect).abs() < 1e-10 * expect, "m={m}: {r}");
        }
    }

    #[test]
    fn resistance_matrix_agrees_with_pairwise_solves() {
        let f = form(FractalKind::SierpinskiGasket, 2);
        let r = resistance_matrix(&f).unwrap();
        for x in 0..f.num_vertices() {
            assert!(r[(x, x)].abs() < 1e-12);
            for y in (x + 1)..f.num_vertices() {
                let direct = resistance(&f, x, y).unwrap();
                assert!((r[(x, y)] - direct).abs() < 1e-10 * direct);
            }
        }
    }
}
