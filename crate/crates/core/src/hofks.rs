//! High-order FKS: the relaxed distribution is split into a kinetic part
//! `lambda f` and an equilibrium part `(1 - lambda) E`. Both are transported
//! exactly, but the moments of the equilibrium part are replaced by a MUSCL
//! Euler update and the transported equilibrium is re-matched to them.
//!
//! The equilibrium profile `E` lives in the same frame as `f`, so both carry
//! identical displacement and their piecewise-constant pieces stay aligned.

use alloc::vec;
use alloc::vec::Vec;

use crate::dvm::{ConservationOperator, ConservedMoments, VelocityGrid};
use crate::error::{Error, Result};
use crate::euler::{euler_step, kinetic_gamma, EulerScheme, EulerState};
use crate::mesh::{MomentField, SpatialGrid};
use crate::transport::{fks_timestep, DistributionField, EquilibriumField, RelaxationWeight};

/// `(lambda f, (1 - lambda) E)` elementwise.
pub fn split_relax(
    f: &[f64],
    equilibrium: &[f64],
    weight: RelaxationWeight,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if f.len() != equilibrium.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: equilibrium.len(),
        });
    }
    Ok((
        f.iter().map(|x| weight.keep * x).collect(),
        equilibrium.iter().map(|x| weight.blend * x).collect(),
    ))
}

/// `U_*`: moments of the transported kinetic part, cell by cell.
pub fn kinetic_part_moments(
    op: &ConservationOperator,
    kinetic: &[f64],
    cells: usize,
) -> Result<MomentField> {
    Ok(MomentField::new(op.field_moments(kinetic, cells)?))
}

/// `U_E = (1 - lambda) Euler(U, dt)`, one MUSCL step of the full-weight state.
pub fn euler_part_moments(
    state: &MomentField,
    grid: &SpatialGrid,
    dt: f64,
    weight: RelaxationWeight,
    gamma: f64,
) -> Result<MomentField> {
    if weight.blend == 0.0 {
        return Ok(MomentField::zeros(grid.dim(), state.len()));
    }
    let next = euler_step(
        &EulerState::new(state.clone(), gamma),
        grid,
        dt,
        EulerScheme::Muscl,
    )?;
    if weight.blend == 1.0 {
        return Ok(next.moments);
    }
    Ok(next.moments.scaled(weight.blend))
}

/// Corrects every cell of the velocity-major equilibrium part so its moments
/// equal `targets`.
pub fn match_equilibrium(
    op: &ConservationOperator,
    equilibrium: &mut [f64],
    targets: &MomentField,
) -> Result<()> {
    op.correct_field(equilibrium, targets.cells())
}

/// HOFKS solver state.
#[derive(Debug, Clone)]
pub struct Hofks {
    velocity: VelocityGrid,
    space: SpatialGrid,
    op: ConservationOperator,
    gamma: f64,
    field: DistributionField,
    equilibrium: EquilibriumField,
    hybrid: MomentField,
    lambda: f64,
    cells: Vec<f64>,
    eq_cells: Vec<f64>,
}

impl Hofks {
    /// Starts from local equilibrium; `U_H` is the initial moment field.
    pub fn new(velocity: VelocityGrid, space: SpatialGrid, initial: MomentField) -> Result<Self> {
        let gamma = kinetic_gamma(space.dim());
        Self::with_gamma(velocity, space, initial, gamma)
    }

    /// As [`Hofks::new`] with an explicit ratio of specific heats for the
    /// Euler part.
    pub fn with_gamma(
        velocity: VelocityGrid,
        space: SpatialGrid,
        initial: MomentField,
        gamma: f64,
    ) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::InvalidParameter("gamma must exceed 1"));
        }
        let op = ConservationOperator::new(&velocity)?;
        let field = DistributionField::equilibrium(&initial, &velocity, &space, &op)?;
        let equilibrium = EquilibriumField {
            values: field.values().to_vec(),
        };
        Ok(Hofks {
            velocity,
            space,
            op,
            gamma,
            field,
            equilibrium,
            hybrid: initial,
            lambda: 1.0,
            cells: Vec::new(),
            eq_cells: Vec::new(),
        })
    }

    /// One hybrid step of size `dt` with relaxation time `tau`.
    pub fn step(&mut self, dt: f64, tau: f64) -> Result<()> {
        let weight = RelaxationWeight::new(dt, tau)?;
        let n = self.field.cells();
        let total = self.field.nodes() * n;
        self.cells.resize(total, 0.0);
        self.eq_cells.resize(total, 0.0);

        self.field.transport(dt)?;
        self.field
            .evaluate_at_centers(&self.space, &mut self.cells)?;
        self.field
            .evaluate_values(&self.equilibrium.values, &self.space, &mut self.eq_cells)?;

        for (f, e) in self.cells.iter_mut().zip(self.eq_cells.iter_mut()) {
            *f *= weight.keep;
            *e *= weight.blend;
        }
        let kinetic = kinetic_part_moments(&self.op, &self.cells, n)?;
        let euler = euler_part_moments(&self.hybrid, &self.space, dt, weight, self.gamma)?;
        if weight.blend != 0.0 {
            match_equilibrium(&self.op, &mut self.eq_cells, &euler)?;
            for (f, e) in self.cells.iter_mut().zip(&self.eq_cells) {
                *f += e;
            }
        }
        let hybrid: Vec<ConservedMoments> = kinetic
            .cells()
            .iter()
            .zip(euler.cells())
            .map(|(a, b)| *a + *b)
            .collect();
        let hybrid = MomentField::new(hybrid);

        self.op
            .equilibrium_field(&self.velocity, hybrid.cells(), &mut self.eq_cells)?;
        // scatter the new equilibrium before the frame is rebased by the store
        self.field
            .scatter_values(&self.eq_cells, &self.space, &mut self.equilibrium.values)?;
        self.field.store_cell_values(&self.cells, &self.space)?;

        self.hybrid = hybrid;
        self.lambda = weight.keep;
        Ok(())
    }

    /// HOFKS steps follow the Euler CFL restriction; the kinetic restriction
    /// only matters for accuracy, since transport is exact.
    pub fn timestep(&self, factor: f64) -> Result<f64> {
        crate::euler::euler_timestep(
            &EulerState::new(self.hybrid.clone(), self.gamma),
            self.space.spacing(),
            factor,
        )
    }

    /// `cfl dx / max |v|`, the kinetic restriction.
    pub fn kinetic_timestep(&self, cfl: f64) -> Result<f64> {
        fks_timestep(&self.velocity, &self.space, cfl)
    }

    /// Hybrid moments `U_H`.
    pub fn moments(&self) -> &MomentField {
        &self.hybrid
    }

    /// Moments recomputed from the stored distribution.
    pub fn kinetic_moments(&self) -> Result<MomentField> {
        Ok(MomentField::new(
            self.op
                .field_moments(&self.cell_values()?, self.field.cells())?,
        ))
    }

    pub fn cell_values(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.field.values().len()];
        self.field.evaluate_at_centers(&self.space, &mut out)?;
        Ok(out)
    }

    /// `lambda` of the last step (1 before any step).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn field(&self) -> &DistributionField {
        &self.field
    }

    pub fn space(&self) -> &SpatialGrid {
        &self.space
    }

    pub fn velocity(&self) -> &VelocityGrid {
        &self.velocity
    }

    pub fn operator(&self) -> &ConservationOperator {
        &self.op
    }

    pub fn time(&self) -> f64 {
        self.field.time()
    }
}
