//! Numerical analysis of wave and heat equations on post-critically-finite
//! self-similar fractals.
//!
//! The crate covers the whole pipeline from combinatorics to time evolution:
//!
//! * [`geometry`] builds the level-`m` graph approximations `Γ_m = (V_m, E_m)`
//!   of the unit interval and the Sierpinski gasket from their iterated
//!   function systems.
//! * [`forms`] assembles the self-similar Dirichlet forms `E_m`, the operators
//!   `H_m`, the measure weights `μ_{m,x}`, harmonic extension and effective
//!   resistance.
//! * [`spectral`] computes eigenbases of `-Δ` (dense, and by spectral
//!   decimation on the gasket) together with spectral diagnostics.
//! * [`evolution`] contains the leapfrog scheme, spectral wave/heat solvers,
//!   heat kernels, complex-time semigroups, heat-wave transmutation and the
//!   time-mollified wave operator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, experiment
//! drivers and the command line live in the companion `fractal-wave-lab`
//! crate.
#![no_std]
#![forbid(unsafe_code)]
// Dev-dependencies link std, whose inherent float methods shadow
// `num_traits::Float` in test builds.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod evolution;
pub mod field;
pub mod forms;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use field::Field;
pub use forms::EnergyForm;
pub use geometry::{ApproxGraph, Boundary, FractalKind, FractalSpec, VertexId};
pub use spectral::EigenBasis;
