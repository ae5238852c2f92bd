//! Discrete velocity model: the velocity lattice, collision invariants,
//! discrete moments, the discrete Maxwellian and the conservative L2
//! projection that restores exact moments on a truncated lattice.

mod grid;
mod maxwellian;
mod moments;
mod projection;

pub use grid::VelocityGrid;
pub use maxwellian::{discrete_maxwellian, maxwellian};
pub use moments::{discrete_moments, CollisionInvariants, ConservedMoments};
pub use projection::{projected_equilibrium, ConservationOperator};
