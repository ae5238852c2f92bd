//! Fast kinetic schemes (FKS) and their high-order extension (HOFKS) for the
//! discrete-velocity BGK equation on uniform Cartesian grids.
//!
//! The crate is `no_std` and only needs `alloc`. Floating-point transcendental
//! functions come from `libm`, so results are bit-reproducible across targets.
//!
//! Layout:
//! - [`dvm`]: velocity lattice, moments, discrete Maxwellian, conservative projection.
//! - [`mesh`]: the spatial grid and per-cell moment fields.
//! - [`transport`]: exact shift-based transport plus BGK relaxation (FKS).
//! - [`euler`]: first-order Rusanov and MUSCL/Van Leer finite volumes for the Euler system.
//! - [`hofks`]: the hybrid kinetic/Euler stepper.
//! - [`problems`]: benchmark setups, exact vortex solution and error norms.
//! - [`solver`]: scheme selection and time-step control shared by drivers.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod dvm;
pub mod error;
pub mod euler;
pub mod hofks;
mod linalg;
pub mod mesh;
pub mod problems;
pub mod solver;
pub mod transport;

pub use dvm::{ConservationOperator, ConservedMoments, VelocityGrid};
pub use error::{Error, Result};
pub use mesh::{Boundary, MomentField, SpatialGrid};
pub use solver::{Scheme, Solver, SolverConfig};

/// Largest supported physical (and velocity) dimension.
pub const MAX_DIM: usize = 2;

/// Length of the conserved-moment vector in the largest supported dimension.
pub const MAX_MOMENTS: usize = MAX_DIM + 2;
