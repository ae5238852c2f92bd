//! Exact transport of piecewise-constant profiles and BGK relaxation: the
//! fast kinetic scheme (FKS).
//!
//! Each velocity row `k` of a [`DistributionField`] stores a piecewise-constant
//! profile together with its cumulative displacement `s_k = v_k t / dx`
//! (in cells). Transport only advances `s_k`; values are read at cell centers
//! through the index map `m = floor(j - s_k + 1/2)` and written back through
//! the same map, so every profile keeps its discontinuities at the same
//! relative positions.

use alloc::vec;
use alloc::vec::Vec;

use crate::dvm::{ConservationOperator, VelocityGrid};
use crate::error::{Error, Result};
use crate::mesh::{Boundary, MomentField, SpatialGrid};
use crate::MAX_DIM;

/// Velocity-major distribution values (`values[k * cells + j]`) plus the
/// per-row displacement that places them in space.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    nodes: usize,
    cells: usize,
    dim: usize,
    values: Vec<f64>,
    /// `v_k / dx`, cells per unit time.
    speeds: Vec<[f64; MAX_DIM]>,
    /// `s_k = v_k t / dx`.
    displacement: Vec<[f64; MAX_DIM]>,
    /// Integer frame origin per row. Only moves on `Copy` axes, where the
    /// stored profile is re-anchored on the grid after each write-back.
    anchor: Vec<[i64; MAX_DIM]>,
    time: f64,
}

/// Cell values of an equilibrium profile that shares the frame (and thus the
/// discontinuity positions) of a companion [`DistributionField`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumField {
    pub values: Vec<f64>,
}

impl DistributionField {
    /// Wraps velocity-major cell values at `t = 0`.
    pub fn new(values: Vec<f64>, velocity: &VelocityGrid, space: &SpatialGrid) -> Result<Self> {
        if velocity.dim() != space.dim() {
            return Err(Error::InvalidGrid("velocity and spatial dimensions differ"));
        }
        let (nodes, cells) = (velocity.len(), space.len());
        if values.len() != nodes * cells {
            return Err(Error::LengthMismatch {
                expected: nodes * cells,
                got: values.len(),
            });
        }
        let dx = space.spacing();
        let speeds = velocity
            .nodes()
            .iter()
            .map(|v| {
                let mut s = [0.0; MAX_DIM];
                for a in 0..velocity.dim() {
                    s[a] = v[a] / dx;
                }
                s
            })
            .collect();
        Ok(DistributionField {
            nodes,
            cells,
            dim: space.dim(),
            values,
            speeds,
            displacement: vec![[0.0; MAX_DIM]; nodes],
            anchor: vec![[0; MAX_DIM]; nodes],
            time: 0.0,
        })
    }

    /// Moment-matched equilibrium in every cell.
    pub fn equilibrium(
        moments: &MomentField,
        velocity: &VelocityGrid,
        space: &SpatialGrid,
        op: &ConservationOperator,
    ) -> Result<Self> {
        let mut values = vec![0.0; velocity.len() * space.len()];
        op.equilibrium_field(velocity, moments.cells(), &mut values)?;
        Self::new(values, velocity, space)
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Stored values in the field's own frame.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `s_k` in cells.
    pub fn displacement(&self, k: usize) -> &[f64] {
        &self.displacement[k][..self.dim]
    }

    /// Advances every profile by `dt`: `s_k += v_k dt / dx`. No data moves.
    pub fn transport(&mut self, dt: f64) -> Result<()> {
        if !(dt >= 0.0) {
            return Err(Error::InvalidParameter("time step must be non-negative"));
        }
        for (s, c) in self.displacement.iter_mut().zip(&self.speeds) {
            for a in 0..self.dim {
                s[a] += c[a] * dt;
            }
        }
        self.time += dt;
        Ok(())
    }

    /// Per-axis integer offset such that cell `j` reads stored index `j + offset`.
    #[inline]
    fn offsets(&self, k: usize) -> [i64; MAX_DIM] {
        let mut o = [0; MAX_DIM];
        for a in 0..self.dim {
            let shift = self.displacement[k][a] - self.anchor[k][a] as f64;
            o[a] = libm::floor(0.5 - shift) as i64;
        }
        o
    }

    fn index_maps(
        &self,
        k: usize,
        grid: &SpatialGrid,
        src: &mut [Vec<usize>; MAX_DIM],
        dst: &mut [Vec<usize>; MAX_DIM],
    ) {
        let off = self.offsets(k);
        for a in 0..self.dim {
            let len = grid.counts()[a];
            let bc = grid.boundary(a);
            src[a].clear();
            dst[a].clear();
            for j in 0..len {
                let m = bc.resolve(j as i64 + off[a], len);
                src[a].push(m);
                dst[a].push(match bc {
                    Boundary::Periodic => m,
                    Boundary::Copy => j,
                });
            }
        }
    }

    /// Reads the stored profile `stored` (same frame as `self`) at every cell
    /// center into `out`, both velocity-major.
    pub fn evaluate_values(
        &self,
        stored: &[f64],
        grid: &SpatialGrid,
        out: &mut [f64],
    ) -> Result<()> {
        self.check(stored.len(), grid)?;
        self.check(out.len(), grid)?;
        let mut src = [Vec::new(), Vec::new()];
        let mut dst = [Vec::new(), Vec::new()];
        let cells = self.cells;
        for k in 0..self.nodes {
            self.index_maps(k, grid, &mut src, &mut dst);
            let row = &stored[k * cells..(k + 1) * cells];
            let o = &mut out[k * cells..(k + 1) * cells];
            gather(row, o, &src, self.dim, grid.counts());
        }
        Ok(())
    }

    /// Cell-center values `f_k(x_j - v_k t)` of this field.
    pub fn evaluate_at_centers(&self, grid: &SpatialGrid, out: &mut [f64]) -> Result<()> {
        self.evaluate_values(&self.values, grid, out)
    }

    /// Writes cell-center values back into `stored` through the same index
    /// map used by [`Self::evaluate_values`]. Call [`Self::rebase`] once after
    /// all profiles sharing this frame have been written.
    pub fn scatter_values(
        &self,
        cell_values: &[f64],
        grid: &SpatialGrid,
        stored: &mut [f64],
    ) -> Result<()> {
        self.check(stored.len(), grid)?;
        self.check(cell_values.len(), grid)?;
        let mut src = [Vec::new(), Vec::new()];
        let mut dst = [Vec::new(), Vec::new()];
        let cells = self.cells;
        for k in 0..self.nodes {
            self.index_maps(k, grid, &mut src, &mut dst);
            let from = &cell_values[k * cells..(k + 1) * cells];
            let row = &mut stored[k * cells..(k + 1) * cells];
            scatter(from, row, &dst, self.dim, grid.counts());
        }
        Ok(())
    }

    /// Moves the frame origin of `Copy` axes onto the grid so that the values
    /// just scattered sit at their own cells. Inflow cells then own the
    /// boundary value and outflow data is dropped.
    pub fn rebase(&mut self, grid: &SpatialGrid) {
        for k in 0..self.nodes {
            let off = self.offsets(k);
            for a in 0..self.dim {
                if grid.boundary(a) == Boundary::Copy {
                    self.anchor[k][a] -= off[a];
                }
            }
        }
    }

    /// Replaces this field's cell-center values by `cell_values`.
    pub fn store_cell_values(&mut self, cell_values: &[f64], grid: &SpatialGrid) -> Result<()> {
        let mut stored = core::mem::take(&mut self.values);
        let res = self.scatter_values(cell_values, grid, &mut stored);
        self.values = stored;
        res?;
        self.rebase(grid);
        Ok(())
    }

    fn check(&self, len: usize, grid: &SpatialGrid) -> Result<()> {
        if grid.len() != self.cells || grid.dim() != self.dim {
            return Err(Error::InvalidGrid("spatial grid does not match the field"));
        }
        if len != self.nodes * self.cells {
            return Err(Error::LengthMismatch {
                expected: self.nodes * self.cells,
                got: len,
            });
        }
        Ok(())
    }
}

#[inline]
fn gather(row: &[f64], out: &mut [f64], src: &[Vec<usize>; MAX_DIM], dim: usize, counts: &[usize]) {
    if dim == 1 {
        for (o, &m) in out.iter_mut().zip(&src[0]) {
            *o = row[m];
        }
    } else {
        let n1 = counts[1];
        for (i, &mi) in src[0].iter().enumerate() {
            let o = &mut out[i * n1..(i + 1) * n1];
            let r = &row[mi * n1..(mi + 1) * n1];
            for (x, &ml) in o.iter_mut().zip(&src[1]) {
                *x = r[ml];
            }
        }
    }
}

#[inline]
fn scatter(
    from: &[f64],
    row: &mut [f64],
    dst: &[Vec<usize>; MAX_DIM],
    dim: usize,
    counts: &[usize],
) {
    if dim == 1 {
        for (x, &m) in from.iter().zip(&dst[0]) {
            row[m] = *x;
        }
    } else {
        let n1 = counts[1];
        for (i, &mi) in dst[0].iter().enumerate() {
            let f = &from[i * n1..(i + 1) * n1];
            let r = &mut row[mi * n1..(mi + 1) * n1];
            for (x, &ml) in f.iter().zip(&dst[1]) {
                r[ml] = *x;
            }
        }
    }
}

/// Weights of the exact relaxation update `f <- keep f + blend E`, with
/// `keep = exp(-dt/tau)` and `blend = 1 - keep`.
///
/// `keep` snaps to exactly 0 when it underflows and `blend` snaps to exactly
/// 0 when `keep` rounds to 1, so both limits are literal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationWeight {
    pub keep: f64,
    pub blend: f64,
}

impl RelaxationWeight {
    pub fn new(dt: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter("relaxation time must be positive"));
        }
        if !(dt >= 0.0) {
            return Err(Error::InvalidParameter("time step must be non-negative"));
        }
        let x = dt / tau;
        let keep = libm::exp(-x);
        if keep < f64::MIN_POSITIVE {
            return Ok(RelaxationWeight {
                keep: 0.0,
                blend: 1.0,
            });
        }
        if keep >= 1.0 {
            return Ok(RelaxationWeight {
                keep: 1.0,
                blend: 0.0,
            });
        }
        Ok(RelaxationWeight {
            keep,
            blend: -libm::expm1(-x),
        })
    }
}

/// Exact solution of `df/dt = (E - f)/tau` over `dt` with `E` frozen.
pub fn relax(f_star: &[f64], equilibrium: &[f64], dt: f64, tau: f64) -> Result<Vec<f64>> {
    if f_star.len() != equilibrium.len() {
        return Err(Error::LengthMismatch {
            expected: f_star.len(),
            got: equilibrium.len(),
        });
    }
    let w = RelaxationWeight::new(dt, tau)?;
    Ok(f_star
        .iter()
        .zip(equilibrium)
        .map(|(f, e)| w.keep * f + w.blend * e)
        .collect())
}

/// `dt = cfl dx / max_k ||v_k||_inf`.
pub fn fks_timestep(velocity: &VelocityGrid, space: &SpatialGrid, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0) {
        return Err(Error::InvalidParameter("CFL factor must be positive"));
    }
    let vmax = velocity.max_speed();
    if vmax == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    Ok(cfl * space.spacing() / vmax)
}

/// Reusable buffers for [`fks_step`].
#[derive(Debug, Default, Clone)]
pub struct FksWorkspace {
    cells: Vec<f64>,
    equilibrium: Vec<f64>,
}

/// One FKS step: exact transport, cell-center evaluation, moment-matched
/// equilibrium, relaxation written back in the field's own frame.
///
/// Returns the post-step moments, which relaxation leaves unchanged.
pub fn fks_step(
    field: &mut DistributionField,
    space: &SpatialGrid,
    velocity: &VelocityGrid,
    op: &ConservationOperator,
    dt: f64,
    tau: f64,
) -> Result<MomentField> {
    fks_step_with(
        field,
        space,
        velocity,
        op,
        dt,
        tau,
        &mut FksWorkspace::default(),
    )
}

pub fn fks_step_with(
    field: &mut DistributionField,
    space: &SpatialGrid,
    velocity: &VelocityGrid,
    op: &ConservationOperator,
    dt: f64,
    tau: f64,
    work: &mut FksWorkspace,
) -> Result<MomentField> {
    let weight = RelaxationWeight::new(dt, tau)?;
    let total = field.nodes * field.cells;
    work.cells.resize(total, 0.0);
    field.transport(dt)?;
    field.evaluate_at_centers(space, &mut work.cells)?;
    let moments = MomentField::new(op.field_moments(&work.cells, field.cells)?);
    if weight.blend == 0.0 {
        // collisionless: the relaxed values are f* itself, already in place
        return Ok(moments);
    }
    work.equilibrium.resize(total, 0.0);
    op.equilibrium_field(velocity, moments.cells(), &mut work.equilibrium)?;
    for (f, e) in work.cells.iter_mut().zip(&work.equilibrium) {
        *f = weight.keep * *f + weight.blend * e;
    }
    field.store_cell_values(&work.cells, space)?;
    Ok(moments)
}

/// FKS solver state: grids, projection operator, field and its moments.
#[derive(Debug, Clone)]
pub struct Fks {
    velocity: VelocityGrid,
    space: SpatialGrid,
    op: ConservationOperator,
    field: DistributionField,
    moments: MomentField,
    work: FksWorkspace,
}

impl Fks {
    /// Starts from local equilibrium with the given moments.
    pub fn new(velocity: VelocityGrid, space: SpatialGrid, initial: MomentField) -> Result<Self> {
        let op = ConservationOperator::new(&velocity)?;
        let field = DistributionField::equilibrium(&initial, &velocity, &space, &op)?;
        Ok(Fks {
            velocity,
            space,
            op,
            field,
            moments: initial,
            work: FksWorkspace::default(),
        })
    }

    /// Starts from arbitrary velocity-major cell values.
    pub fn from_values(
        velocity: VelocityGrid,
        space: SpatialGrid,
        values: Vec<f64>,
    ) -> Result<Self> {
        let op = ConservationOperator::new(&velocity)?;
        let field = DistributionField::new(values, &velocity, &space)?;
        let moments = MomentField::new(op.field_moments(field.values(), space.len())?);
        Ok(Fks {
            velocity,
            space,
            op,
            field,
            moments,
            work: FksWorkspace::default(),
        })
    }

    pub fn step(&mut self, dt: f64, tau: f64) -> Result<()> {
        self.moments = fks_step_with(
            &mut self.field,
            &self.space,
            &self.velocity,
            &self.op,
            dt,
            tau,
            &mut self.work,
        )?;
        Ok(())
    }

    pub fn timestep(&self, cfl: f64) -> Result<f64> {
        fks_timestep(&self.velocity, &self.space, cfl)
    }

    pub fn moments(&self) -> &MomentField {
        &self.moments
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

    /// Cell-center values of the current field.
    pub fn cell_values(&self) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.field.values.len()];
        self.field.evaluate_at_centers(&self.space, &mut out)?;
        Ok(out)
    }

    pub fn time(&self) -> f64 {
        self.field.time()
    }
}
