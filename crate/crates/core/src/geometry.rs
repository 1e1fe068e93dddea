//! Iterated-function-system combinatorics for the supported fractals.
//!
//! A point of `V_m` is addressed by a word `ω = i_1 … i_k` (`k ≤ m`) and a
//! corner `c` of `V_0`, standing for `F_ω(q_c)`. Both supported fractals use
//! maps of the form `F_i(x) = (x + q_i) / 2`, so `F_i` fixes `q_i` and
//! `F_i(q_j) = F_j(q_i)`. These two identities are the whole gluing rule and
//! give every point a unique canonical address computed with exact word
//! arithmetic.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Largest level [`ApproxGraph::build`] accepts unless a different cap is
/// passed to [`ApproxGraph::build_capped`]. The gasket has 88 575 vertices at
/// this level.
pub const DEFAULT_LEVEL_CAP: usize = 10;

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FractalKind {
    Interval,
    SierpinskiGasket,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Boundary {
    /// `B = ∅`.
    Neumann,
    /// `B = V_0`.
    Dirichlet,
}

/// Self-similar structure of a fractal: the maps, the energy renormalizers
/// `r_i`, the measure weights `μ_i` and the level-0 edge conductance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FractalSpec {
    pub kind: FractalKind,
    pub renormalization: Vec<f64>,
    pub measure_weights: Vec<f64>,
    /// Conductance of every edge of `Γ_0`.
    pub base_conductance: f64,
}

impl FractalSpec {
    /// `[0, 1]` with `F_1(x) = x/2`, `F_2(x) = x/2 + 1/2`, `r = μ = (1/2, 1/2)`.
    ///
    /// Unit base conductance gives `E_m(u) = Σ_k 2^m |u(x_{k+1}) - u(x_k)|²`,
    /// whose Laplacian is the ordinary `u''`.
    pub fn interval() -> Self {
        Self {
            kind: FractalKind::Interval,
            renormalization: vec![0.5, 0.5],
            measure_weights: vec![0.5, 0.5],
            base_conductance: 1.0,
        }
    }

    /// The Sierpinski gasket with `r_i = 3/5` and the uniform measure.
    ///
    /// The base conductance `1/4` makes `μ_{m,x}^{-1} H_m = (3/2) 5^m Δ_m`
    /// with `Δ_m` the degree-normalized graph Laplacian, at every vertex.
    pub fn sierpinski_gasket() -> Self {
        Self {
            kind: FractalKind::SierpinskiGasket,
            renormalization: vec![0.6, 0.6, 0.6],
            measure_weights: vec![1.0 / 3.0; 3],
            base_conductance: 0.25,
        }
    }

    pub fn of_kind(kind: FractalKind) -> Self {
        match kind {
            FractalKind::Interval => Self::interval(),
            FractalKind::SierpinskiGasket => Self::sierpinski_gasket(),
        }
    }

    pub fn num_maps(&self) -> usize {
        self.renormalization.len()
    }

    pub fn v0_size(&self) -> usize {
        match self.kind {
            FractalKind::Interval => 2,
            FractalKind::SierpinskiGasket => 3,
        }
    }

    /// Planar coordinates of the points of `V_0`.
    pub fn corners(&self) -> &'static [[f64; 2]] {
        match self.kind {
            FractalKind::Interval => &[[0.0, 0.0], [1.0, 0.0]],
            FractalKind::SierpinskiGasket => &[[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3_2]],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_maps();
        if n != self.v0_size() || self.measure_weights.len() != n {
            return Err(invalid("fractal spec: map count, V_0 size and weights disagree"));
        }
        if self
            .renormalization
            .iter()
            .chain(&self.measure_weights)
            .any(|&x| !(x > 0.0 && x < 1.0))
        {
            return Err(invalid("fractal spec: r_i and mu_i must lie in (0, 1)"));
        }
        let total: f64 = self.measure_weights.iter().sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(invalid("fractal spec: measure weights must sum to 1"));
        }
        if !(self.base_conductance > 0.0) {
            return Err(invalid("fractal spec: base conductance must be positive"));
        }
        Ok(())
    }

    /// Image of `p` under `F_word = F_{i_1} ∘ … ∘ F_{i_k}`.
    pub fn map_point(&self, word: &[u8], mut p: [f64; 2]) -> [f64; 2] {
        let q = self.corners();
        for &i in word.iter().rev() {
            let c = q[i as usize];
            p = [(p[0] + c[0]) * 0.5, (p[1] + c[1]) * 0.5];
        }
        p
    }
}

/// Address `F_word(q_corner)` of a point of `V_*`.
///
/// The derived ordering (word lexicographically, then corner) is the vertex
/// ordering of every [`ApproxGraph`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VertexId {
    pub word: Vec<u8>,
    pub corner: u8,
}

impl VertexId {
    pub fn new(word: Vec<u8>, corner: u8) -> Self {
        Self { word, corner }
    }

    /// Canonical representative: trailing letters equal to the corner are
    /// dropped (`F_c q_c = q_c`), and of the two addresses `ω i · c` and
    /// `ω c · i` of a junction point the one with the smaller last letter is
    /// kept.
    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn canonicalize(&mut self) {
        while self.word.last() == Some(&self.corner) {
            self.word.pop();
        }
        if let Some(last) = self.word.last_mut() {
            if *last > self.corner {
                core::mem::swap(last, &mut self.corner);
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.clone().canonical() == *self
    }
}

/// A level-`m` cell `F_ω K` with the indices of its `|V_0|` corners, listed
/// in corner order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub word: Vec<u8>,
    pub vertices: Vec<usize>,
}

/// The graph `Γ_m = (V_m, E_m)` with its boundary set, cells and embedding.
#[derive(Debug, Clone)]
pub struct ApproxGraph {
    kind: FractalKind,
    level: usize,
    vertices: Vec<VertexId>,
    coords: Vec<[f64; 2]>,
    edges: Vec<(usize, usize)>,
    edge_cell: Vec<usize>,
    cells: Vec<Cell>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
    nbr_offsets: Vec<usize>,
    nbrs: Vec<usize>,
    nbr_edges: Vec<usize>,
    star_offsets: Vec<usize>,
    star_cells: Vec<usize>,
}

impl ApproxGraph {
    pub fn build(spec: &FractalSpec, level: usize, boundary: Boundary) -> Result<Self> {
        Self::build_capped(spec, level, boundary, DEFAULT_LEVEL_CAP)
    }

    pub fn build_capped(
        spec: &FractalSpec,
        level: usize,
        boundary: Boundary,
        cap: usize,
    ) -> Result<Self> {
        if level > cap {
            return Err(Error::LevelCap { level, cap });
        }
        spec.validate()?;
        let n_maps = spec.num_maps();
        let v0 = spec.v0_size();
        let n_cells = n_maps.pow(level as u32);

        let words: Vec<Vec<u8>> = (0..n_cells).map(|k| word_of(k, n_maps, level)).collect();

        let mut vertices: Vec<VertexId> = Vec::with_capacity(n_cells * v0);
        for w in &words {
            for c in 0..v0 {
                vertices.push(VertexId::new(w.clone(), c as u8).canonical());
            }
        }
        vertices.sort_unstable();
        vertices.dedup();

        let index = |id: &VertexId| vertices.binary_search(id).expect("corner of a cell is a vertex");
        let mut cells = Vec::with_capacity(n_cells);
        let mut edges = Vec::with_capacity(n_cells * v0 * (v0 - 1) / 2);
        let mut edge_cell = Vec::with_capacity(edges.capacity());
        for (ci, w) in words.into_iter().enumerate() {
            let corners: Vec<usize> = (0..v0)
                .map(|c| index(&VertexId::new(w.clone(), c as u8).canonical()))
                .collect();
            for a in 0..v0 {
                for b in a + 1..v0 {
                    let (x, y) = (corners[a], corners[b]);
                    edges.push((x.min(y), x.max(y)));
                    edge_cell.push(ci);
                }
            }
            cells.push(Cell { word: w, vertices: corners });
        }

        let coords = vertices
            .iter()
            .map(|id| spec.map_point(&id.word, spec.corners()[id.corner as usize]))
            .collect();

        let nv = vertices.len();
        let (nbr_offsets, nbrs, nbr_edges) = {
            let mut deg = vec![0usize; nv];
            for &(x, y) in &edges {
                deg[x] += 1;
                deg[y] += 1;
            }
            let mut offsets = vec![0usize; nv + 1];
            for i in 0..nv {
                offsets[i + 1] = offsets[i] + deg[i];
            }
            let mut fill = offsets.clone();
            let mut nbrs = vec![0usize; offsets[nv]];
            let mut nbr_edges = vec![0usize; offsets[nv]];
            for (e, &(x, y)) in edges.iter().enumerate() {
                nbrs[fill[x]] = y;
                nbr_edges[fill[x]] = e;
                fill[x] += 1;
                nbrs[fill[y]] = x;
                nbr_edges[fill[y]] = e;
                fill[y] += 1;
            }
            (offsets, nbrs, nbr_edges)
        };

        let (star_offsets, star_cells) = {
            let mut count = vec![0usize; nv];
            for cell in &cells {
                for &v in &cell.vertices {
                    count[v] += 1;
                }
            }
            let mut offsets = vec![0usize; nv + 1];
            for i in 0..nv {
                offsets[i + 1] = offsets[i] + count[i];
            }
            let mut fill = offsets.clone();
            let mut star = vec![0usize; offsets[nv]];
            for (ci, cell) in cells.iter().enumerate() {
                for &v in &cell.vertices {
                    star[fill[v]] = ci;
                    fill[v] += 1;
                }
            }
            (offsets, star)
        };

        let mut graph = Self {
            kind: spec.kind,
            level,
            vertices,
            coords,
            edges,
            edge_cell,
            cells,
            boundary: Vec::new(),
            is_boundary: vec![false; nv],
            nbr_offsets,
            nbrs,
            nbr_edges,
            star_offsets,
            star_cells,
        };
        if boundary == Boundary::Dirichlet {
            let b: Vec<usize> = (0..nv).filter(|&i| graph.vertices[i].word.is_empty()).collect();
            graph.set_boundary(b)?;
        }
        Ok(graph)
    }

    /// Replace the boundary set `B` by an arbitrary subset of `V_m`.
    pub fn with_boundary(mut self, boundary: Vec<usize>) -> Result<Self> {
        self.set_boundary(boundary)?;
        Ok(self)
    }

    fn set_boundary(&mut self, mut boundary: Vec<usize>) -> Result<()> {
        boundary.sort_unstable();
        boundary.dedup();
        if boundary.last().is_some_and(|&b| b >= self.num_vertices()) {
            return Err(invalid("boundary vertex index out of range"));
        }
        self.is_boundary.iter_mut().for_each(|b| *b = false);
        for &b in &boundary {
            self.is_boundary[b] = true;
        }
        self.boundary = boundary;
        Ok(())
    }

    pub fn kind(&self) -> FractalKind {
        self.kind
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Index of the cell containing each edge.
    pub fn edge_cells(&self) -> &[usize] {
        &self.edge_cell
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.is_boundary[x]
    }

    pub fn boundary_kind(&self) -> Option<Boundary> {
        if self.boundary.is_empty() {
            Some(Boundary::Neumann)
        } else if self.boundary.len() == self.corner_count()
            && self.boundary.iter().all(|&b| self.vertices[b].word.is_empty())
        {
            Some(Boundary::Dirichlet)
        } else {
            None
        }
    }

    /// Vertices outside `B`, in index order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&i| !self.is_boundary[i]).collect()
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.nbrs[self.nbr_offsets[x]..self.nbr_offsets[x + 1]]
    }

    /// Edge indices parallel to [`neighbors`](Self::neighbors).
    pub fn neighbor_edges(&self, x: usize) -> &[usize] {
        &self.nbr_edges[self.nbr_offsets[x]..self.nbr_offsets[x + 1]]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.nbr_offsets[x + 1] - self.nbr_offsets[x]
    }

    fn corner_count(&self) -> usize {
        match self.kind {
            FractalKind::Interval => 2,
            FractalKind::SierpinskiGasket => 3,
        }
    }

    /// Index of the point `q_c` of `V_0`.
    pub fn corner(&self, c: usize) -> usize {
        self.index_of(&VertexId::new(Vec::new(), c as u8))
            .expect("V_0 is contained in every V_m")
    }

    /// Dense index of a canonical address.
    pub fn index_of(&self, id: &VertexId) -> Option<usize> {
        self.vertices.binary_search(id).ok()
    }

    /// Dense index of `F_word(q_corner)`, canonicalizing first.
    pub fn locate(&self, word: &[u8], corner: u8) -> Option<usize> {
        self.index_of(&VertexId::new(word.to_vec(), corner).canonical())
    }

    fn check_index(&self, x: usize) -> Result<()> {
        if x < self.num_vertices() {
            Ok(())
        } else {
            Err(invalid("vertex index out of range"))
        }
    }

    /// Cells containing `x`; their union is the support of the tent
    /// function `ψ_x^m`.
    pub fn cell_star(&self, x: usize) -> Result<&[usize]> {
        self.check_index(x)?;
        Ok(&self.star_cells[self.star_offsets[x]..self.star_offsets[x + 1]])
    }

    /// Hop distance in `Γ_m`.
    pub fn graph_distance(&self, x: usize, y: usize) -> Result<usize> {
        self.check_index(x)?;
        self.check_index(y)?;
        Ok(self.hop_distances(x)[y])
    }

    /// Hop distances from `x` to every vertex (breadth-first search).
    pub fn hop_distances(&self, x: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        let mut queue = VecDeque::new();
        dist[x] = 0;
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance used by the kernel experiments: Euclidean distance of the
    /// standard embedding. On the interval this equals `2^{-m}` times the hop
    /// distance.
    pub fn metric_distance(&self, x: usize, y: usize) -> f64 {
        let (a, b) = (self.coords[x], self.coords[y]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    /// Indices in `self` of the points `F_word(p)`, `p ∈ source`. Requires
    /// `source.level() + word.len() <= self.level()` and the same fractal.
    pub fn cell_map(&self, source: &ApproxGraph, word: &[u8]) -> Result<Vec<usize>> {
        if source.kind != self.kind || source.level + word.len() > self.level {
            return Err(invalid("cell map needs the same fractal and a coarser source"));
        }
        let mut buf = Vec::with_capacity(self.level);
        source
            .vertices
            .iter()
            .map(|p| {
                buf.clear();
                buf.extend_from_slice(word);
                buf.extend_from_slice(&p.word);
                self.locate(&buf, p.corner)
                    .ok_or_else(|| invalid("cell image is not a vertex"))
            })
            .collect()
    }

    /// Indices in `self` of the vertices of a coarser graph (`V_k ⊆ V_m`).
    pub fn embedding_of(&self, coarse: &ApproxGraph) -> Result<Vec<usize>> {
        self.cell_map(coarse, &[])
    }

    /// Values of `u` (a function on `self`) at the vertices of `coarse`.
    pub fn restrict(&self, coarse: &ApproxGraph, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.embedding_of(coarse)?.into_iter().map(|i| u[i]).collect())
    }
}

fn word_of(mut k: usize, base: usize, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for slot in w.iter_mut().rev() {
        *slot = (k % base) as u8;
        k /= base;
    }
    w
}

impl PartialEq for ApproxGraph {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.level == other.level
            && self.vertices == other.vertices
            && self.boundary == other.boundary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(level: usize, b: Boundary) -> ApproxGraph {
        ApproxGraph::build(&FractalSpec::sierpinski_gasket(), level, b).unwrap()
    }

    fn interval(level: usize, b: Boundary) -> ApproxGraph {
        ApproxGraph::build(&FractalSpec::interval(), level, b).unwrap()
    }

    #[test]
    fn interval_level_two_dirichlet() {
        let g = interval(2, Boundary::Dirichlet);
        assert_eq!(g.num_vertices(), 5);
        assert_eq!(g.edges().len(), 4);
        let mut xs: Vec<f64> = g.coords().iter().map(|c| c[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let b: Vec<f64> = g.boundary().iter().map(|&i| g.coords()[i][0]).collect();
        assert_eq!(b, vec![0.0, 1.0]);
    }

    #[test]
    fn gasket_level_zero_is_triangle() {
        let g = sg(0, Boundary::Neumann);
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(g.boundary().is_empty());
    }

    #[test]
    fn gasket_level_two_counts() {
        let g = sg(2, Boundary::Neumann);
        assert_eq!(g.num_vertices(), 15);
        assert_eq!(g.edges().len(), 27);
    }

    #[test]
    fn counts_match_closed_forms() {
        for m in 0..=6 {
            let g = interval(m, Boundary::Neumann);
            assert_eq!(g.num_vertices(), (1 << m) + 1);
            assert_eq!(g.edges().len(), 1 << m);
            let g = sg(m, Boundary::Neumann);
            let p = 3usize.pow(m as u32 + 1);
            assert_eq!(g.num_vertices(), (p + 3) / 2);
            assert_eq!(g.edges().len(), p);
        }
    }

    #[test]
    fn degrees() {
        let g = sg(4, Boundary::Neumann);
        for x in 0..g.num_vertices() {
            let expected = if g.vertices()[x].word.is_empty() { 2 } else { 4 };
            assert_eq!(g.degree(x), expected);
        }
        let g = interval(4, Boundary::Neumann);
        for x in 0..g.num_vertices() {
            let expected = if g.vertices()[x].word.is_empty() { 1 } else { 2 };
            assert_eq!(g.degree(x), expected);
        }
    }

    #[test]
    fn canonicalization_is_idempotent_and_glues_junctions() {
        let a = VertexId::new(vec![0, 1, 2], 1).canonical();
        assert_eq!(a, VertexId::new(vec![0, 1, 1], 2));
        assert_eq!(a.clone().canonical(), a);
        // F_0 q_1 = F_1 q_0
        assert_eq!(
            VertexId::new(vec![1], 0).canonical(),
            VertexId::new(vec![0], 1).canonical()
        );
        // F_2 F_2 q_2 = q_2
        assert_eq!(VertexId::new(vec![2, 2], 2).canonical(), VertexId::new(vec![], 2));
    }

    #[test]
    fn coarse_vertices_survive_refinement() {
        for m in 0..5 {
            let (a, b) = (sg(m, Boundary::Neumann), sg(m + 1, Boundary::Neumann));
            let map = b.embedding_of(&a).unwrap();
            for (i, &j) in map.iter().enumerate() {
                assert_eq!(a.vertices()[i], b.vertices()[j]);
                assert_eq!(a.coords()[i], b.coords()[j]);
            }
        }
        assert_eq!(sg(3, Boundary::Dirichlet), sg(3, Boundary::Dirichlet));
    }

    #[test]
    fn coordinates_are_distinct() {
        let g = sg(4, Boundary::Neumann);
        let mut pts: Vec<(i64, i64)> = g
            .coords()
            .iter()
            .map(|c| ((c[0] * 1e9).round() as i64, (c[1] * 1e9).round() as i64))
            .collect();
        pts.sort_unstable();
        pts.dedup();
        assert_eq!(pts.len(), g.num_vertices());
    }

    #[test]
    fn every_edge_lies_in_its_cell_and_graph_is_connected() {
        let g = sg(3, Boundary::Neumann);
        for (e, &(x, y)) in g.edges().iter().enumerate() {
            let cell = &g.cells()[g.edge_cells()[e]];
            assert!(cell.vertices.contains(&x) && cell.vertices.contains(&y));
        }
        let d = g.hop_distances(0);
        assert!(d.iter().all(|&k| k != usize::MAX));
        let mut covered = vec![false; g.num_vertices()];
        for c in g.cells() {
            c.vertices.iter().for_each(|&v| covered[v] = true);
        }
        assert!(covered.into_iter().all(|c| c));
    }

    #[test]
    fn cell_stars() {
        let g = interval(2, Boundary::Neumann);
        let half = g.locate(&[0], 1).unwrap();
        let star = g.cell_star(half).unwrap();
        let words: Vec<&[u8]> = star.iter().map(|&c| g.cells()[c].word.as_slice()).collect();
        assert_eq!(words, vec![&[0u8, 1][..], &[1, 0][..]]);

        let g = sg(1, Boundary::Neumann);
        let mid = g.locate(&[0], 1).unwrap();
        assert_eq!(g.cell_star(mid).unwrap().len(), 2);
        assert_eq!(g.cell_star(g.corner(2)).unwrap().len(), 1);
        assert!(g.cell_star(99).is_err());
    }

    #[test]
    fn distances() {
        let g = interval(3, Boundary::Neumann);
        let (a, b) = (g.corner(0), g.corner(1));
        assert_eq!(g.graph_distance(a, b).unwrap(), 8);
        assert_eq!(g.graph_distance(a, a).unwrap(), 0);
        assert!((g.metric_distance(a, b) - 1.0).abs() < 1e-15);

        let g = sg(1, Boundary::Neumann);
        assert_eq!(g.graph_distance(g.corner(0), g.corner(1)).unwrap(), 2);
        for x in 0..g.num_vertices() {
            for y in 0..g.num_vertices() {
                let d = g.graph_distance(x, y).unwrap();
                assert_eq!(d, g.graph_distance(y, x).unwrap());
                assert_eq!(d == 0, x == y);
            }
        }
    }

    #[test]
    fn level_cap() {
        let spec = FractalSpec::sierpinski_gasket();
        assert_eq!(
            ApproxGraph::build(&spec, 11, Boundary::Neumann).unwrap_err(),
            Error::LevelCap { level: 11, cap: 10 }
        );
        assert!(ApproxGraph::build_capped(&spec, 3, Boundary::Neumann, 2).is_err());
    }

    #[test]
    fn dirichlet_boundary_is_v0() {
        let g = sg(3, Boundary::Dirichlet);
        assert_eq!(g.boundary().len(), 3);
        assert_eq!(g.boundary_kind(), Some(Boundary::Dirichlet));
        for &b in g.boundary() {
            assert!(g.vertices()[b].word.is_empty());
        }
        assert_eq!(sg(3, Boundary::Neumann).boundary_kind(), Some(Boundary::Neumann));
    }

    #[test]
    fn cell_map_places_copies() {
        let coarse = sg(1, Boundary::Neumann);
        let fine = sg(3, Boundary::Neumann);
        let spec = FractalSpec::sierpinski_gasket();
        let map = fine.cell_map(&coarse, &[2, 0]).unwrap();
        for (p, &i) in map.iter().enumerate() {
            let expect = spec.map_point(&[2, 0], coarse.coords()[p]);
            let got = fine.coords()[i];
            assert!((expect[0] - got[0]).abs() < 1e-14 && (expect[1] - got[1]).abs() < 1e-14);
        }
    }
}
