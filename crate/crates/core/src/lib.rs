//! Vectorial lattice Boltzmann schemes on structured grids for one- and
//! two-dimensional hyperbolic conservation laws.
//!
//! The crate is organised along the scheme's phases:
//!
//! - [`lattice`]: velocity stencils, grids, distribution storage with ghost
//!   strips, moments and streaming.
//! - [`flux`]: flux functions of the benchmark systems.
//! - [`equilibrium`]: equilibrium families and equilibrium initialization.
//! - [`collision`]: TRT/BGK relaxation and a positivity-guarded variant.
//! - [`boundary`]: ghost filling from equilibria (Dirichlet data,
//!   extrapolated traces, reflective walls, composite sides).
//! - [`monotonicity`]: certification of monotone relaxation.
//! - [`analysis`]: diagnostics, boundary-layer predictors and oracles.
//! - [`reference`]: Godunov scheme and exact solutions.
//! - [`cases`]: benchmark registry, configuration and the time-stepping driver.

pub mod analysis;
pub mod boundary;
pub mod cases;
pub mod collision;
pub mod equilibrium;
mod error;
pub mod flux;
pub mod lattice;
pub mod monotonicity;
pub mod output;
pub mod reference;

pub use error::{Error, Result};

/// Largest number of conserved components handled by the built-in models.
pub const MAX_COMPONENTS: usize = 4;

/// Largest number of discrete velocities of a supported stencil.
pub const MAX_VELOCITIES: usize = 5;
