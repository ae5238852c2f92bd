use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::MAX_DIM;

/// Uniform Cartesian lattice of velocities `v_k = k * dv + a`.
///
/// Nodes are flattened row-major over the velocity axes (the last axis varies
/// fastest). Bounds are node positions: both endpoints belong to the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    dim: usize,
    counts: [usize; MAX_DIM],
    spacing: f64,
    offset: [f64; MAX_DIM],
    nodes: Vec<[f64; MAX_DIM]>,
}

impl VelocityGrid {
    /// Builds a lattice with `counts[i]` nodes spanning `bounds[i] = (lo, hi)`
    /// inclusively on every axis. All axes must share the same spacing.
    pub fn new(dim: usize, counts: &[usize], bounds: &[(f64, f64)]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid("velocity dimension must be 1 or 2"));
        }
        if counts.len() != dim || bounds.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: counts.len().min(bounds.len()),
            });
        }
        let mut spacing = None::<f64>;
        let mut c = [1usize; MAX_DIM];
        let mut offset = [0.0; MAX_DIM];
        for axis in 0..dim {
            let (lo, hi) = bounds[axis];
            if counts[axis] < 2 {
                return Err(Error::InvalidGrid(
                    "need at least two velocity nodes per axis",
                ));
            }
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidGrid("velocity bounds must satisfy lo < hi"));
            }
            let dv = (hi - lo) / (counts[axis] - 1) as f64;
            if let Some(s) = spacing {
                if libm::fabs(s - dv) > 1e-12 * s {
                    return Err(Error::InvalidGrid(
                        "velocity spacing must be equal on all axes",
                    ));
                }
            } else {
                spacing = Some(dv);
            }
            c[axis] = counts[axis];
            offset[axis] = lo;
        }
        let spacing = spacing.expect("dim >= 1");
        let total: usize = c[..dim].iter().product();
        let mut nodes = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut v = [0.0; MAX_DIM];
            for axis in (0..dim).rev() {
                let k = rem % c[axis];
                rem /= c[axis];
                v[axis] = k as f64 * spacing + offset[axis];
            }
            nodes.push(v);
        }
        Ok(VelocityGrid {
            dim,
            counts: c,
            spacing,
            offset,
            nodes,
        })
    }

    /// Same count and bounds `[-bound, bound]` on every axis.
    pub fn symmetric(dim: usize, count: usize, bound: f64) -> Result<Self> {
        let counts = [count; MAX_DIM];
        let bounds = [(-bound, bound); MAX_DIM];
        Self::new(
            dim,
            &counts[..dim.min(MAX_DIM)],
            &bounds[..dim.min(MAX_DIM)],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    /// Lattice step `dv`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Lattice offset `a` (the lower bound on each axis).
    pub fn offset(&self) -> &[f64] {
        &self.offset[..self.dim]
    }

    /// Total number of nodes `N`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Velocity of node `k`; entries past `dim` are zero.
    pub fn node(&self, k: usize) -> &[f64; MAX_DIM] {
        &self.nodes[k]
    }

    pub fn nodes(&self) -> &[[f64; MAX_DIM]] {
        &self.nodes
    }

    /// Quadrature weight `dv^d` of a single node.
    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing, self.dim as f64)
    }

    /// Largest per-axis speed `max_k ||v_k||_inf`.
    pub fn max_speed(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|v| v[..self.dim].iter())
            .fold(0.0_f64, |m, x| m.max(libm::fabs(*x)))
    }

    /// Smallest half-width of the lattice over all axes, measured from zero.
    pub fn min_bound(&self) -> f64 {
        (0..self.dim)
            .map(|a| {
                let lo = self.offset[a];
                let hi = lo + (self.counts[a] - 1) as f64 * self.spacing;
                libm::fabs(lo).min(libm::fabs(hi))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sod_lattice() {
        let g = VelocityGrid::new(1, &[100], &[(-15.0, 15.0)]).unwrap();
        assert_eq!(g.len(), 100);
        assert!((g.spacing() - 30.0 / 99.0).abs() < 1e-15);
        assert_eq!(g.node(0)[0], -15.0);
        assert!((g.node(99)[0] - 15.0).abs() < 1e-13);
    }

    #[test]
    fn two_point_lattice() {
        let g = VelocityGrid::new(1, &[2], &[(0.0, 1.0)]).unwrap();
        assert_eq!(g.node(0)[0], 0.0);
        assert_eq!(g.node(1)[0], 1.0);
        assert_eq!(g.spacing(), 1.0);
    }

    #[test]
    fn planar_lattice_is_row_major() {
        let g = VelocityGrid::symmetric(2, 20, 15.0).unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g.node(0), &[-15.0, -15.0]);
        assert_eq!(g.node(1)[0], -15.0);
        assert!((g.node(1)[1] - (-15.0 + 30.0 / 19.0)).abs() < 1e-14);
        assert_eq!(g.node(20)[1], -15.0);
        // lattice property
        for (k, v) in g.nodes().iter().enumerate() {
            let (i, j) = (k / 20, k % 20);
            assert_eq!(v[0], i as f64 * g.spacing() + g.offset()[0]);
            assert_eq!(v[1], j as f64 * g.spacing() + g.offset()[1]);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(VelocityGrid::new(1, &[1], &[(0.0, 1.0)]).is_err());
        assert!(VelocityGrid::new(1, &[4], &[(1.0, 0.0)]).is_err());
        assert!(VelocityGrid::new(3, &[4, 4, 4], &[(0.0, 1.0); 3]).is_err());
        assert!(VelocityGrid::new(2, &[4, 5], &[(0.0, 1.0); 2]).is_err());
    }
}
