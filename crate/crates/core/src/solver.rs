//! Scheme selection shared by drivers.

use crate::dvm::VelocityGrid;
use crate::error::{Error, Result};
use crate::euler::{EulerScheme, EulerSolver};
use crate::hofks::Hofks;
use crate::mesh::{MomentField, SpatialGrid};
use crate::problems::ProblemSpec;
use crate::transport::Fks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Fks,
    Hofks,
    EulerUpwind,
    EulerMuscl,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Fks,
        Scheme::Hofks,
        Scheme::EulerUpwind,
        Scheme::EulerMuscl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Fks => "fks",
            Scheme::Hofks => "hofks",
            Scheme::EulerUpwind => "euler-upwind",
            Scheme::EulerMuscl => "euler-muscl",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Scheme::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn is_kinetic(self) -> bool {
        matches!(self, Scheme::Fks | Scheme::Hofks)
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Run parameters independent of the problem geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub tau: f64,
    /// Time-step factor: `dt = cfl dx / max|v|` for FKS, `dt = cfl dx / alpha`
    /// for HOFKS and the Euler schemes.
    pub cfl: f64,
    pub gamma: f64,
}

impl SolverConfig {
    /// Defaults taken from the problem: its `tau` and `gamma`, factor 1/2.
    pub fn for_problem(spec: &ProblemSpec, scheme: Scheme) -> Self {
        SolverConfig {
            scheme,
            tau: spec.tau,
            cfl: 0.5,
            gamma: spec.gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::InvalidParameter("CFL factor must be positive"));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidParameter("gamma must exceed 1"));
        }
        Ok(())
    }
}

/// A running solver of any scheme.
#[derive(Debug, Clone)]
pub enum Solver {
    Fks(Fks),
    Hofks(Hofks),
    Euler(EulerSolver),
}

impl Solver {
    pub fn new(
        config: &SolverConfig,
        velocity: VelocityGrid,
        space: SpatialGrid,
        initial: MomentField,
    ) -> Result<Self> {
        config.validate()?;
        Ok(match config.scheme {
            Scheme::Fks => Solver::Fks(Fks::new(velocity, space, initial)?),
            Scheme::Hofks => {
                Solver::Hofks(Hofks::with_gamma(velocity, space, initial, config.gamma)?)
            }
            Scheme::EulerUpwind => Solver::Euler(EulerSolver::new(
                space,
                initial,
                config.gamma,
                EulerScheme::Upwind,
            )?),
            Scheme::EulerMuscl => Solver::Euler(EulerSolver::new(
                space,
                initial,
                config.gamma,
                EulerScheme::Muscl,
            )?),
        })
    }

    /// Builds grids and initial data from a problem setup.
    pub fn for_problem(spec: &ProblemSpec, config: &SolverConfig) -> Result<Self> {
        spec.validate()?;
        let space = spec.spatial_grid()?;
        let velocity = spec.velocity_grid()?;
        let initial = spec.initial_moments(&space);
        Self::new(config, velocity, space, initial)
    }

    pub fn step(&mut self, dt: f64, tau: f64) -> Result<()> {
        match self {
            Solver::Fks(s) => s.step(dt, tau),
            Solver::Hofks(s) => s.step(dt, tau),
            Solver::Euler(s) => s.step(dt),
        }
    }

    pub fn timestep(&self, cfl: f64) -> Result<f64> {
        match self {
            Solver::Fks(s) => s.timestep(cfl),
            Solver::Hofks(s) => s.timestep(cfl),
            Solver::Euler(s) => s.timestep(cfl),
        }
    }

    pub fn moments(&self) -> &MomentField {
        match self {
            Solver::Fks(s) => s.moments(),
            Solver::Hofks(s) => s.moments(),
            Solver::Euler(s) => s.moments(),
        }
    }

    pub fn space(&self) -> &SpatialGrid {
        match self {
            Solver::Fks(s) => s.space(),
            Solver::Hofks(s) => s.space(),
            Solver::Euler(s) => s.space(),
        }
    }

    pub fn time(&self) -> f64 {
        match self {
            Solver::Fks(s) => s.time(),
            Solver::Hofks(s) => s.time(),
            Solver::Euler(s) => s.time(),
        }
    }

    /// Unknowns per cell: velocity nodes for kinetic schemes, `d + 2` otherwise.
    pub fn dofs_per_cell(&self) -> usize {
        match self {
            Solver::Fks(s) => s.velocity().len(),
            Solver::Hofks(s) => s.velocity().len(),
            Solver::Euler(s) => s.space().dim() + 2,
        }
    }
}
