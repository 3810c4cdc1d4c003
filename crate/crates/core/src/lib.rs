//! Kernels for a 1D-space / 3D-velocity hybrid gas solver.
//!
//! The crate couples an ES-BGK discrete-velocity kinetic solver with
//! compressible Euler / Navier-Stokes finite-volume solvers. Cells switch
//! between the two descriptions through moment-realizability indicators
//! (fluid to kinetic) and an L1 distance to the truncated Chapman-Enskog
//! distribution (kinetic to fluid).
//!
//! Everything here is allocation-only `no_std`; IO, configuration files and
//! the command-line front end live in the `kinfluid` crate.
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod equilibrium;
pub mod error;
pub mod field;
pub mod fluid;
pub mod grid;
pub mod hybrid;
pub mod indicators;
pub mod kinetic;
pub mod linalg;
pub mod moments;
pub mod state;

pub use error::{Error, Result};
pub use field::DistributionField;
pub use grid::{BoundaryKind, SpatialGrid, VelocityGrid};
pub use state::{Conserved, GasModel, Gradients, MacroState, SecondGradients};

/// Density below which a cell is treated as vacuum.
pub const RHO_FLOOR: f64 = 1e-12;

/// Ratio of specific heats of a monatomic gas with three translational
/// degrees of freedom.
pub const GAMMA: f64 = 5.0 / 3.0;
