use core::ops::{Add, AddAssign, Index, Mul, Sub};

use alloc::vec::Vec;

use super::VelocityGrid;
use crate::error::{Error, Result};
use crate::{MAX_DIM, MAX_MOMENTS};

/// Conserved quantities `U = (rho, rho u, E)` of one cell.
///
/// Stored as a fixed `(d+2)`-vector; slots past `d+2` stay zero. The
/// temperature is `theta = (2E/rho - |u|^2)/d`, i.e. the gas constant is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedMoments {
    dim: usize,
    values: [f64; MAX_MOMENTS],
}

impl ConservedMoments {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension must be 1 or 2");
        ConservedMoments {
            dim,
            values: [0.0; MAX_MOMENTS],
        }
    }

    /// Builds `U` from a `(d+2)`-slice `(rho, rho u, E)`.
    pub fn from_slice(dim: usize, values: &[f64]) -> Self {
        let mut u = Self::zero(dim);
        assert_eq!(values.len(), dim + 2, "moment vector must have d+2 entries");
        u.values[..dim + 2].copy_from_slice(values);
        u
    }

    /// Builds `U` from density, mean velocity and temperature `theta`.
    pub fn from_primitive(density: f64, velocity: &[f64], temperature: f64) -> Self {
        let dim = velocity.len();
        let mut u = Self::zero(dim);
        let speed2: f64 = velocity.iter().map(|c| c * c).sum();
        u.values[0] = density;
        for (a, c) in velocity.iter().enumerate() {
            u.values[1 + a] = density * c;
        }
        u.values[dim + 1] = 0.5 * density * speed2 + 0.5 * dim as f64 * density * temperature;
        u
    }

    /// Builds `U` for a polytropic gas from density, velocity and pressure.
    pub fn from_pressure(density: f64, velocity: &[f64], pressure: f64, gamma: f64) -> Self {
        let dim = velocity.len();
        let mut u = Self::zero(dim);
        let speed2: f64 = velocity.iter().map(|c| c * c).sum();
        u.values[0] = density;
        for (a, c) in velocity.iter().enumerate() {
            u.values[1 + a] = density * c;
        }
        u.values[dim + 1] = 0.5 * density * speed2 + pressure / (gamma - 1.0);
        u
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `d+2` active entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.dim + 2]
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values[..self.dim + 2]
    }

    pub fn density(&self) -> f64 {
        self.values[0]
    }

    pub fn momentum(&self) -> &[f64] {
        &self.values[1..1 + self.dim]
    }

    pub fn energy(&self) -> f64 {
        self.values[self.dim + 1]
    }

    /// Mean velocity `u = rho u / rho`; unused axes are zero.
    pub fn velocity(&self) -> [f64; MAX_DIM] {
        let mut u = [0.0; MAX_DIM];
        for a in 0..self.dim {
            u[a] = self.values[1 + a] / self.values[0];
        }
        u
    }

    fn kinetic_energy(&self) -> f64 {
        let rho = self.values[0];
        self.momentum().iter().map(|m| m * m).sum::<f64>() / (2.0 * rho)
    }

    /// `theta = (2E/rho - |u|^2)/d`.
    pub fn temperature(&self) -> f64 {
        2.0 * (self.energy() - self.kinetic_energy()) / (self.dim as f64 * self.density())
    }

    /// Polytropic pressure `(gamma - 1)(E - rho |u|^2 / 2)`.
    pub fn pressure(&self, gamma: f64) -> f64 {
        (gamma - 1.0) * (self.energy() - self.kinetic_energy())
    }

    /// `rho > 0` and `theta > 0`, both finite.
    pub fn is_physical(&self) -> bool {
        let rho = self.density();
        let theta = self.temperature();
        rho > 0.0 && theta > 0.0 && rho.is_finite() && theta.is_finite()
    }

    /// Returns `self` if it is physical, an [`Error::InvalidState`] otherwise.
    pub fn validated(self) -> Result<Self> {
        if self.is_physical() {
            Ok(self)
        } else {
            Err(Error::InvalidState {
                cell: None,
                density: self.density(),
                temperature: self.temperature(),
            })
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        for v in self.values.iter_mut() {
            *v *= factor;
        }
        self
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.as_slice()
            .iter()
            .fold(0.0_f64, |m, v| m.max(libm::fabs(*v)))
    }
}

impl Index<usize> for ConservedMoments {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl Add for ConservedMoments {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for ConservedMoments {
    fn add_assign(&mut self, rhs: Self) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.values.iter_mut().zip(rhs.values) {
            *a += b;
        }
    }
}

impl Sub for ConservedMoments {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.values.iter_mut().zip(rhs.values) {
            *a -= b;
        }
        self
    }
}

impl Mul<ConservedMoments> for f64 {
    type Output = ConservedMoments;

    fn mul(self, rhs: ConservedMoments) -> ConservedMoments {
        rhs.scaled(self)
    }
}

/// Discrete collision invariants `m_k = (1, v_k, |v_k|^2 / 2)` for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionInvariants {
    dim: usize,
    rows: Vec<[f64; MAX_MOMENTS]>,
}

impl CollisionInvariants {
    pub fn new(grid: &VelocityGrid) -> Self {
        Self::from_nodes(grid.dim(), grid.nodes())
    }

    pub fn from_nodes(dim: usize, nodes: &[[f64; MAX_DIM]]) -> Self {
        let rows = nodes
            .iter()
            .map(|v| {
                let mut m = [0.0; MAX_MOMENTS];
                m[0] = 1.0;
                let mut half_sq = 0.0;
                for a in 0..dim {
                    m[1 + a] = v[a];
                    half_sq += v[a] * v[a];
                }
                m[dim + 1] = 0.5 * half_sq;
                m
            })
            .collect();
        CollisionInvariants { dim, rows }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `m_k` as a `(d+2)`-slice.
    pub fn get(&self, k: usize) -> &[f64] {
        &self.rows[k][..self.dim + 2]
    }
}

/// `U = sum_k m_k f_k dv^d`.
pub fn discrete_moments(values: &[f64], grid: &VelocityGrid) -> Result<ConservedMoments> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let dim = grid.dim();
    let mut acc = [0.0; MAX_MOMENTS];
    for (v, f) in grid.nodes().iter().zip(values) {
        acc[0] += f;
        let mut sq = 0.0;
        for a in 0..dim {
            acc[1 + a] += v[a] * f;
            sq += v[a] * v[a];
        }
        acc[dim + 1] += 0.5 * sq * f;
    }
    let w = grid.cell_volume();
    Ok(ConservedMoments::from_slice(dim, &acc[..dim + 2]).scaled(w))
}
