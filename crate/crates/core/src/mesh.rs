//! Uniform Cartesian spatial grids and per-cell moment fields.

use alloc::vec::Vec;

use crate::dvm::ConservedMoments;
use crate::error::{Error, Result};
use crate::MAX_DIM;

/// Boundary treatment along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Indices wrap around.
    Periodic,
    /// Zero-gradient: out-of-range indices clamp to the nearest cell.
    Copy,
}

impl Boundary {
    /// Maps a possibly out-of-range index onto `0..len`.
    #[inline]
    pub fn resolve(self, index: i64, len: usize) -> usize {
        match self {
            Boundary::Periodic => index.rem_euclid(len as i64) as usize,
            Boundary::Copy => index.clamp(0, len as i64 - 1) as usize,
        }
    }
}

/// Cell centers `x_j = j dx + b` on a box, cells being `[x_j - dx/2, x_j + dx/2)`.
///
/// Cells are flattened row-major: axis 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    counts: [usize; MAX_DIM],
    spacing: f64,
    origin: [f64; MAX_DIM],
    boundary: [Boundary; MAX_DIM],
}

impl SpatialGrid {
    /// Splits the box `[lo_i, hi_i]` into `counts[i]` cells per axis. The cell
    /// size must be the same on every axis.
    pub fn new(
        dim: usize,
        counts: &[usize],
        bounds: &[(f64, f64)],
        boundary: &[Boundary],
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid("spatial dimension must be 1 or 2"));
        }
        if counts.len() != dim || bounds.len() != dim || boundary.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: counts.len().min(bounds.len()).min(boundary.len()),
            });
        }
        let mut c = [1; MAX_DIM];
        let mut origin = [0.0; MAX_DIM];
        let mut bc = [Boundary::Periodic; MAX_DIM];
        let mut spacing = None::<f64>;
        for a in 0..dim {
            let (lo, hi) = bounds[a];
            if counts[a] == 0 {
                return Err(Error::InvalidGrid("need at least one cell per axis"));
            }
            if !(lo < hi) {
                return Err(Error::InvalidGrid("spatial bounds must satisfy lo < hi"));
            }
            let dx = (hi - lo) / counts[a] as f64;
            match spacing {
                Some(s) if libm::fabs(s - dx) > 1e-12 * s => {
                    return Err(Error::InvalidGrid("cell size must be equal on all axes"))
                }
                None => spacing = Some(dx),
                _ => {}
            }
            c[a] = counts[a];
            origin[a] = lo + 0.5 * dx;
            bc[a] = boundary[a];
        }
        Ok(SpatialGrid {
            dim,
            counts: c,
            spacing: spacing.expect("dim >= 1"),
            origin,
            boundary: bc,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    /// Cell size `dx`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Center of cell zero, `b`.
    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn boundary(&self, axis: usize) -> Boundary {
        self.boundary[axis]
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundary[..self.dim]
    }

    /// Total number of cells `M`.
    pub fn len(&self) -> usize {
        self.counts[..self.dim].iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of flat cell `j`.
    pub fn unflatten(&self, mut j: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for a in (0..self.dim).rev() {
            idx[a] = j % self.counts[a];
            j /= self.counts[a];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        let mut j = 0;
        for a in 0..self.dim {
            j = j * self.counts[a] + idx[a];
        }
        j
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.counts[axis + 1..self.dim].iter().product()
    }

    /// Center of flat cell `j`; unused coordinates are zero.
    pub fn center(&self, j: usize) -> [f64; MAX_DIM] {
        let idx = self.unflatten(j);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * self.spacing + self.origin[a];
        }
        x
    }

    /// Box extents `(lo, hi)` along `axis`.
    pub fn extent(&self, axis: usize) -> (f64, f64) {
        let lo = self.origin[axis] - 0.5 * self.spacing;
        (lo, lo + self.counts[axis] as f64 * self.spacing)
    }
}

/// Conserved moments for every cell of a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    cells: Vec<ConservedMoments>,
}

impl MomentField {
    pub fn new(cells: Vec<ConservedMoments>) -> Self {
        MomentField { cells }
    }

    pub fn zeros(dim: usize, len: usize) -> Self {
        MomentField {
            cells: alloc::vec![ConservedMoments::zero(dim); len],
        }
    }

    /// Samples `init` at every cell center.
    pub fn from_fn(grid: &SpatialGrid, mut init: impl FnMut(&[f64]) -> ConservedMoments) -> Self {
        let cells = (0..grid.len())
            .map(|j| {
                let x = grid.center(j);
                init(&x[..grid.dim()])
            })
            .collect();
        MomentField { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[ConservedMoments] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [ConservedMoments] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<ConservedMoments> {
        self.cells
    }

    /// Sum over all cells.
    pub fn total(&self) -> ConservedMoments {
        let dim = self.cells.first().map_or(1, |c| c.dim());
        self.cells
            .iter()
            .fold(ConservedMoments::zero(dim), |acc, c| acc + *c)
    }

    pub fn densities(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.density()).collect()
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for c in &mut self.cells {
            *c = c.scaled(factor);
        }
        self
    }

    /// First cell that is not physical, if any.
    pub fn validate(&self) -> Result<()> {
        for (j, c) in self.cells.iter().enumerate() {
            c.validated().map_err(|e| e.at_cell(j))?;
        }
        Ok(())
    }

    /// Largest `|a - b|` over all cells and components, divided by the
    /// largest `|b|`.
    pub fn relative_distance(&self, other: &MomentField) -> f64 {
        let mut num = 0.0_f64;
        let mut den = 0.0_f64;
        for (a, b) in self.cells.iter().zip(&other.cells) {
            num = num.max((*a - *b).max_abs());
            den = den.max(b.max_abs());
        }
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

impl core::ops::Index<usize> for MomentField {
    type Output = ConservedMoments;

    fn index(&self, j: usize) -> &ConservedMoments {
        &self.cells[j]
    }
}
