use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::geometry::ApproxGraph;

/// A real function on `V_m`, indexed like the vertices of the level-`m` graph.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Field {
    pub level: usize,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(level: usize, values: Vec<f64>) -> Self {
        Self { level, values }
    }

    pub fn zeros(graph: &ApproxGraph) -> Self {
        Self::constant(graph, 0.0)
    }

    pub fn constant(graph: &ApproxGraph, c: f64) -> Self {
        Self::new(graph.level(), vec![c; graph.num_vertices()])
    }

    pub fn from_fn(graph: &ApproxGraph, mut f: impl FnMut(usize) -> f64) -> Self {
        Self::new(graph.level(), (0..graph.num_vertices()).map(&mut f).collect())
    }

    /// Checks that the field lives on `graph`.
    pub fn check(&self, graph: &ApproxGraph) -> Result<()> {
        if self.level == graph.level() && self.values.len() == graph.num_vertices() {
            Ok(())
        } else {
            Err(Error::LevelMismatch {
                expected: graph.level(),
                expected_len: graph.num_vertices(),
                got: self.level,
                got_len: self.values.len(),
            })
        }
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        sup_distance(&self.values, other)
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

pub fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sup_distance(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}
