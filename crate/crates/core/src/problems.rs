//! Benchmark problems. The advected isentropic vortex also carries its exact
//! solution, which the error norms below compare against.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dvm::{ConservedMoments, VelocityGrid};
use crate::error::{Error, Result};
use crate::euler::kinetic_gamma;
use crate::mesh::{Boundary, MomentField, SpatialGrid};
use crate::MAX_DIM;

/// Shipped benchmark problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    Sod1d,
    Vortex2d,
    Sod2d,
    Implosion2d,
}

impl Problem {
    pub const ALL: [Problem; 4] = [
        Problem::Sod1d,
        Problem::Vortex2d,
        Problem::Sod2d,
        Problem::Implosion2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Sod1d => "sod1d",
            Problem::Vortex2d => "vortex2d",
            Problem::Sod2d => "sod2d",
            Problem::Implosion2d => "implosion2d",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Problem::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Problem::Sod1d => "1D shock tube on [0,1], 300 cells, t = 0.05",
            Problem::Vortex2d => "advected isentropic vortex on the periodic box [0,10]^2, t = 1",
            Problem::Sod2d => "cylindrical shock tube on [0,2]^2, disk of radius 0.2, t = 0.07",
            Problem::Implosion2d => "converging flow onto a low-density disk on [0,2]^2, t = 0.07",
        }
    }

    /// Default setup of this problem.
    pub fn spec(self) -> ProblemSpec {
        match self {
            Problem::Sod1d => init_sod_1d(),
            Problem::Vortex2d => init_vortex_2d(100),
            Problem::Sod2d => init_sod_2d(),
            Problem::Implosion2d => init_implosion_2d(),
        }
    }
}

/// Parameters of the isentropic vortex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexParams {
    pub center: [f64; 2],
    pub beta: f64,
    /// Ratio of specific heats used to build the profile (`rho = T^(1/(g-1))`,
    /// `p = rho^g`).
    pub profile_gamma: f64,
    /// Multiplier of the temperature dip. `beta^2` balances the centrifugal
    /// force exactly; other values give a non-stationary profile.
    pub temperature_strength: f64,
    pub background_velocity: [f64; 2],
    /// Side length of the periodic box `[lo, lo + length]^2`.
    pub lo: f64,
    pub length: f64,
}

impl Default for VortexParams {
    fn default() -> Self {
        VortexParams {
            center: [5.0, 5.0],
            beta: 5.0,
            profile_gamma: 5.0 / 3.0,
            temperature_strength: 25.0,
            background_velocity: [1.0, 1.0],
            lo: 0.0,
            length: 10.0,
        }
    }
}

/// Primitive vortex state at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexPoint {
    pub density: f64,
    pub velocity: [f64; 2],
    pub temperature: f64,
    pub pressure: f64,
}

impl VortexParams {
    /// Minimal-image offset `x - x0` on the periodic box.
    pub fn offset(&self, x: &[f64]) -> [f64; 2] {
        let mut d = [0.0; 2];
        for a in 0..2 {
            let mut r = x[a] - self.center[a];
            r -= self.length * libm::round(r / self.length);
            d[a] = r;
        }
        d
    }

    /// `delta T*` as a function of `r^2`.
    pub fn temperature_perturbation(&self, r2: f64) -> f64 {
        let g = self.profile_gamma;
        -(g - 1.0) * self.temperature_strength / (8.0 * g * PI * PI) * libm::exp(1.0 - r2)
    }

    /// Initial state at `x`.
    pub fn initial(&self, x: &[f64]) -> VortexPoint {
        let [dx, dy] = self.offset(x);
        let r2 = dx * dx + dy * dy;
        let amp = self.beta / (2.0 * PI) * libm::exp(0.5 * (1.0 - r2));
        let t = 1.0 + self.temperature_perturbation(r2);
        let g = self.profile_gamma;
        let density = libm::pow(t, 1.0 / (g - 1.0));
        VortexPoint {
            density,
            velocity: [
                self.background_velocity[0] - dy * amp,
                self.background_velocity[1] + dx * amp,
            ],
            temperature: t,
            pressure: libm::pow(density, g),
        }
    }

    /// Exact density at time `t`: the initial profile translated by the
    /// background velocity and wrapped into the box.
    pub fn exact_density(&self, x: &[f64], t: f64) -> f64 {
        let back = [
            x[0] - self.background_velocity[0] * t,
            x[1] - self.background_velocity[1] * t,
        ];
        self.initial(&back).density
    }
}

/// `rho^ex(x, t)` of the vortex.
pub fn exact_vortex_density(x: &[f64], t: f64, params: &VortexParams) -> f64 {
    params.exact_density(x, t)
}

/// Initial-data shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// Left state for `x <= split`, right state beyond.
    Tube {
        split: f64,
        left: [f64; 3],
        right: [f64; 3],
    },
    /// `(rho, u, theta)` inside the disk, another state outside.
    Disk {
        center: [f64; 2],
        radius: f64,
        inside: [f64; 3],
        outside: [f64; 3],
    },
    /// Disk at rest inside; outside, velocity `+-speed` pointing toward the
    /// center along each axis.
    Implosion {
        center: [f64; 2],
        radius: f64,
        inside: [f64; 2],
        outside: [f64; 2],
        speed: f64,
    },
    Vortex(VortexParams),
}

/// Complete problem setup.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub dim: usize,
    pub bounds: [(f64, f64); MAX_DIM],
    pub cells: usize,
    pub boundary: Boundary,
    pub velocity_nodes: usize,
    pub velocity_bound: f64,
    pub tau: f64,
    pub t_final: f64,
    /// Ratio of specific heats of the gas, used for the Euler parts and to
    /// convert pressure into energy.
    pub gamma: f64,
    pub initial: InitialData,
}

fn sq(x: f64) -> f64 {
    x * x
}

fn tube_state(s: [f64; 3]) -> ConservedMoments {
    ConservedMoments::from_primitive(s[0], &[s[1]], s[2])
}

/// 1D shock tube.
pub fn init_sod_1d() -> ProblemSpec {
    ProblemSpec {
        problem: Problem::Sod1d,
        dim: 1,
        bounds: [(0.0, 1.0), (0.0, 0.0)],
        cells: 300,
        boundary: Boundary::Copy,
        velocity_nodes: 100,
        velocity_bound: 15.0,
        tau: 1e-4,
        t_final: 0.05,
        gamma: kinetic_gamma(1),
        initial: InitialData::Tube {
            split: 0.5,
            left: [1.0, 0.0, 5.0],
            right: [0.125, 0.0, 4.0],
        },
    }
}

/// Isentropic vortex on an `m x m` mesh.
pub fn init_vortex_2d(m: usize) -> ProblemSpec {
    ProblemSpec {
        problem: Problem::Vortex2d,
        dim: 2,
        bounds: [(0.0, 10.0), (0.0, 10.0)],
        cells: m,
        boundary: Boundary::Periodic,
        velocity_nodes: 20,
        velocity_bound: 15.0,
        tau: 1e-4,
        t_final: 1.0,
        gamma: kinetic_gamma(2),
        initial: InitialData::Vortex(VortexParams::default()),
    }
}

/// Cylindrical shock tube.
pub fn init_sod_2d() -> ProblemSpec {
    ProblemSpec {
        problem: Problem::Sod2d,
        dim: 2,
        bounds: [(0.0, 2.0), (0.0, 2.0)],
        cells: 100,
        boundary: Boundary::Copy,
        velocity_nodes: 20,
        velocity_bound: 15.0,
        tau: 1e-4,
        t_final: 0.07,
        gamma: kinetic_gamma(2),
        initial: InitialData::Disk {
            center: [1.0, 1.0],
            radius: 0.2,
            inside: [1.0, 0.0, 5.0],
            outside: [0.125, 0.0, 4.0],
        },
    }
}

/// Implosion onto a light disk.
pub fn init_implosion_2d() -> ProblemSpec {
    ProblemSpec {
        problem: Problem::Implosion2d,
        dim: 2,
        bounds: [(0.0, 2.0), (0.0, 2.0)],
        cells: 100,
        boundary: Boundary::Copy,
        velocity_nodes: 40,
        velocity_bound: 20.0,
        tau: 1e-3,
        t_final: 0.07,
        gamma: kinetic_gamma(2),
        initial: InitialData::Implosion {
            center: [1.0, 1.0],
            radius: 0.2,
            inside: [0.125, 4.0],
            outside: [1.0, 4.0],
            speed: 1.0,
        },
    }
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        self.problem.name()
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid> {
        let d = self.dim;
        SpatialGrid::new(
            d,
            &[self.cells; MAX_DIM][..d],
            &self.bounds[..d],
            &[self.boundary; MAX_DIM][..d],
        )
    }

    pub fn velocity_grid(&self) -> Result<VelocityGrid> {
        VelocityGrid::symmetric(self.dim, self.velocity_nodes, self.velocity_bound)
    }

    pub fn vortex(&self) -> Option<&VortexParams> {
        match &self.initial {
            InitialData::Vortex(p) => Some(p),
            _ => None,
        }
    }

    /// Conserved moments at point `x`.
    pub fn state_at(&self, x: &[f64]) -> ConservedMoments {
        match self.initial {
            InitialData::Tube { split, left, right } => {
                if x[0] <= split {
                    tube_state(left)
                } else {
                    tube_state(right)
                }
            }
            InitialData::Disk {
                center,
                radius,
                inside,
                outside,
            } => {
                let r2 = sq(x[0] - center[0]) + sq(x[1] - center[1]);
                let s = if r2 <= radius * radius {
                    inside
                } else {
                    outside
                };
                ConservedMoments::from_primitive(s[0], &[s[1], s[1]], s[2])
            }
            InitialData::Implosion {
                center,
                radius,
                inside,
                outside,
                speed,
            } => {
                let r2 = sq(x[0] - center[0]) + sq(x[1] - center[1]);
                if r2 <= radius * radius {
                    ConservedMoments::from_primitive(inside[0], &[0.0, 0.0], inside[1])
                } else {
                    let toward = |a: usize| if x[a] <= center[a] { speed } else { -speed };
                    ConservedMoments::from_primitive(
                        outside[0],
                        &[toward(0), toward(1)],
                        outside[1],
                    )
                }
            }
            InitialData::Vortex(p) => {
                let s = p.initial(x);
                ConservedMoments::from_pressure(s.density, &s.velocity, s.pressure, self.gamma)
            }
        }
    }

    /// Cell-averaged-by-midpoint initial moments.
    pub fn initial_moments(&self, grid: &SpatialGrid) -> MomentField {
        MomentField::from_fn(grid, |x| self.state_at(x))
    }

    /// Fails when some initial state has `|u_a| + 6 sqrt(theta)` beyond the
    /// velocity bound.
    pub fn check_velocity_bounds(&self) -> Result<()> {
        let grid = self.spatial_grid()?;
        let mut required = 0.0_f64;
        for u in self.initial_moments(&grid).cells() {
            let u = u.validated()?;
            let vel = u.velocity();
            let spread = 6.0 * libm::sqrt(u.temperature());
            for a in 0..self.dim {
                required = required.max(libm::fabs(vel[a]) + spread);
            }
        }
        if required > self.velocity_bound {
            return Err(Error::VelocityBoundsTooNarrow {
                problem: self.name(),
                required,
                available: self.velocity_bound,
            });
        }
        Ok(())
    }

    /// Exact density, where the problem has one.
    pub fn exact_density(&self, x: &[f64], t: f64) -> Option<f64> {
        self.vortex().map(|p| p.exact_density(x, t))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::InvalidParameter("tau must be positive"));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::InvalidParameter("final time must be positive"));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::InvalidParameter("gamma must exceed 1"));
        }
        self.check_velocity_bounds()
    }
}

/// Relative L1 and L-infinity errors of `computed` against `exact`.
pub fn error_norms(computed: &[f64], exact: &[f64]) -> Result<(f64, f64)> {
    if computed.len() != exact.len() {
        return Err(Error::LengthMismatch {
            expected: exact.len(),
            got: computed.len(),
        });
    }
    let (mut num1, mut den1, mut numi, mut deni) = (0.0, 0.0, 0.0_f64, 0.0_f64);
    for (c, e) in computed.iter().zip(exact) {
        let d = libm::fabs(e - c);
        num1 += d;
        den1 += libm::fabs(*e);
        numi = numi.max(d);
        deni = deni.max(libm::fabs(*e));
    }
    if den1 == 0.0 {
        return Err(Error::InvalidParameter(
            "exact solution vanishes identically",
        ));
    }
    Ok((num1 / den1, numi / deni))
}

/// Density errors of a moment field against the exact vortex at time `t`.
pub fn vortex_errors(
    moments: &MomentField,
    grid: &SpatialGrid,
    params: &VortexParams,
    t: f64,
) -> Result<(f64, f64)> {
    let exact: Vec<f64> = (0..grid.len())
        .map(|j| params.exact_density(&grid.center(j), t))
        .collect();
    error_norms(&moments.densities(), &exact)
}

/// Observed order between meshes with `m` and `m_fine` cells per direction.
pub fn convergence_rate(err: f64, err_fine: f64, m: usize, m_fine: usize) -> f64 {
    libm::log(err / err_fine) / libm::log(m_fine as f64 / m as f64)
}

/// Errors on one mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshError {
    pub cells: usize,
    pub l1: f64,
    pub linf: f64,
}

/// Errors over a sequence of meshes with the rates between consecutive ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub meshes: Vec<MeshError>,
}

impl ErrorReport {
    pub fn push(&mut self, e: MeshError) {
        self.meshes.push(e);
    }

    /// `(l1 rate, linf rate)` between mesh `i - 1` and `i`; `None` for the
    /// first mesh.
    pub fn rates(&self, i: usize) -> Option<(f64, f64)> {
        if i == 0 || i >= self.meshes.len() {
            return None;
        }
        let (a, b) = (&self.meshes[i - 1], &self.meshes[i]);
        Some((
            convergence_rate(a.l1, b.l1, a.cells, b.cells),
            convergence_rate(a.linf, b.linf, a.cells, b.cells),
        ))
    }

    pub fn l1_rates(&self) -> Vec<f64> {
        (1..self.meshes.len())
            .filter_map(|i| self.rates(i))
            .map(|r| r.0)
            .collect()
    }

    pub fn linf_rates(&self) -> Vec<f64> {
        (1..self.meshes.len())
            .filter_map(|i| self.rates(i))
            .map(|r| r.1)
            .collect()
    }
}
