//! Finite volumes for the compressible Euler system: first-order local
//! Lax-Friedrichs (Rusanov) and second-order MUSCL with flux splitting
//! `F +- alpha U` and the Van Leer limiter.
//!
//! The multi-dimensional update is unsplit: fluxes on every axis are built
//! from the same state and summed.

use alloc::vec::Vec;

use crate::dvm::ConservedMoments;
use crate::error::{Error, Result};
use crate::mesh::{MomentField, SpatialGrid};

/// Spatial scheme of the Euler solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerScheme {
    Upwind,
    Muscl,
}

/// Macroscopic state with its ratio of specific heats.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub moments: MomentField,
    pub gamma: f64,
}

impl EulerState {
    pub fn new(moments: MomentField, gamma: f64) -> Self {
        EulerState { moments, gamma }
    }
}

/// `gamma = (d+2)/d`, the value consistent with the kinetic closure.
pub fn kinetic_gamma(dim: usize) -> f64 {
    (dim as f64 + 2.0) / dim as f64
}

fn primitive(u: &ConservedMoments, gamma: f64) -> Result<(f64, [f64; 2], f64)> {
    let rho = u.density();
    let p = u.pressure(gamma);
    if !(rho > 0.0 && p > 0.0 && rho.is_finite() && p.is_finite()) {
        return Err(Error::InvalidState {
            cell: None,
            density: rho,
            temperature: p / rho,
        });
    }
    Ok((rho, u.velocity(), p))
}

/// Physical flux along `axis`: `(rho u_a, rho u_a u + p e_a, (E + p) u_a)`.
pub fn euler_flux(u: &ConservedMoments, axis: usize, gamma: f64) -> Result<ConservedMoments> {
    let (_, vel, p) = primitive(u, gamma)?;
    Ok(flux_unchecked(u, &vel, p, axis))
}

#[inline]
fn flux_unchecked(u: &ConservedMoments, vel: &[f64; 2], p: f64, axis: usize) -> ConservedMoments {
    let dim = u.dim();
    let ua = vel[axis];
    let mut f = *u;
    let s = f.as_mut_slice();
    s[0] = u.momentum()[axis];
    for b in 0..dim {
        s[1 + b] = u.momentum()[b] * ua;
    }
    s[1 + axis] += p;
    s[dim + 1] = (u.energy() + p) * ua;
    f
}

/// Largest characteristic speed `max_a |u_a| + c`, `c = sqrt(gamma p / rho)`.
pub fn max_wavespeed(u: &ConservedMoments, gamma: f64) -> Result<f64> {
    let (rho, vel, p) = primitive(u, gamma)?;
    let c = libm::sqrt(gamma * p / rho);
    Ok((0..u.dim()).map(|a| libm::fabs(vel[a])).fold(0.0, f64::max) + c)
}

/// `phi(chi) = (|chi| + chi) / (1 + chi)`; zero for `chi <= 0` (including
/// `chi = -1`).
#[inline]
pub fn vanleer_limiter(chi: f64) -> f64 {
    if chi <= 0.0 || !chi.is_finite() {
        if chi == f64::INFINITY {
            return 2.0;
        }
        return 0.0;
    }
    2.0 * chi / (1.0 + chi)
}

/// Rusanov flux `(F_l + F_r)/2 - alpha (U_r - U_l)/2`.
pub fn rusanov_flux(
    left: &ConservedMoments,
    right: &ConservedMoments,
    alpha: f64,
    axis: usize,
    gamma: f64,
) -> Result<ConservedMoments> {
    let fl = euler_flux(left, axis, gamma)?;
    let fr = euler_flux(right, axis, gamma)?;
    Ok(rusanov_from(&fl, &fr, left, right, alpha))
}

#[inline]
fn rusanov_from(
    fl: &ConservedMoments,
    fr: &ConservedMoments,
    ul: &ConservedMoments,
    ur: &ConservedMoments,
    alpha: f64,
) -> ConservedMoments {
    let mut out = *fl;
    let q = ul.dim() + 2;
    let o = out.as_mut_slice();
    for i in 0..q {
        o[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * alpha * (ur[i] - ul[i]);
    }
    out
}

/// Ratio of consecutive split-flux differences; an exactly zero denominator
/// gives zero.
#[inline]
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// MUSCL interface flux `psi_{j+1/2}` from the four-cell stencil
/// `(U_{j-1}, U_j, U_{j+1}, U_{j+2})` with the Van Leer limiter.
pub fn muscl_flux(
    stencil: [&ConservedMoments; 4],
    alpha: f64,
    axis: usize,
    gamma: f64,
) -> Result<ConservedMoments> {
    muscl_flux_with(stencil, alpha, axis, gamma, vanleer_limiter)
}

/// [`muscl_flux`] with an arbitrary limiter.
pub fn muscl_flux_with(
    stencil: [&ConservedMoments; 4],
    alpha: f64,
    axis: usize,
    gamma: f64,
    limiter: impl Fn(f64) -> f64,
) -> Result<ConservedMoments> {
    let mut fluxes = [ConservedMoments::zero(stencil[0].dim()); 4];
    for (f, u) in fluxes.iter_mut().zip(stencil) {
        *f = euler_flux(u, axis, gamma)?;
    }
    Ok(muscl_from(&fluxes, stencil, alpha, &limiter))
}

#[inline]
fn muscl_from(
    f: &[ConservedMoments; 4],
    u: [&ConservedMoments; 4],
    alpha: f64,
    limiter: &impl Fn(f64) -> f64,
) -> ConservedMoments {
    let mut out = rusanov_from(&f[1], &f[2], u[1], u[2], alpha);
    let q = u[0].dim() + 2;
    let o = out.as_mut_slice();
    for i in 0..q {
        // split fluxes F + alpha U and F - alpha U on the four cells
        let p: [f64; 4] = core::array::from_fn(|c| f[c][i] + alpha * u[c][i]);
        let m: [f64; 4] = core::array::from_fn(|c| f[c][i] - alpha * u[c][i]);
        // sigma+_j, centered on cell j = stencil[1]
        let dp = p[2] - p[1];
        let sigma_plus = dp * limiter(ratio(p[1] - p[0], dp));
        // sigma-_{j+1}, centered on cell j+1 = stencil[2]
        let dm = m[3] - m[2];
        let sigma_minus = dm * limiter(ratio(m[2] - m[1], dm));
        o[i] += 0.25 * (sigma_plus - sigma_minus);
    }
    out
}

/// `dt = factor dx / alpha_max`.
pub fn euler_timestep(state: &EulerState, dx: f64, factor: f64) -> Result<f64> {
    if !(factor > 0.0) {
        return Err(Error::InvalidParameter("CFL factor must be positive"));
    }
    let mut amax = 0.0_f64;
    for (j, c) in state.moments.cells().iter().enumerate() {
        amax = amax.max(max_wavespeed(c, state.gamma).map_err(|e| e.at_cell(j))?);
    }
    if amax == 0.0 {
        return Err(Error::ZeroWaveSpeed);
    }
    Ok(factor * dx / amax)
}

/// Per-cell flux data along one axis, cached for a line with two ghost
/// layers on each side.
struct LineCell {
    u: ConservedMoments,
    f: ConservedMoments,
    speed: f64,
}

/// One forward-Euler finite-volume step of size `dt`.
pub fn euler_step(
    state: &EulerState,
    grid: &SpatialGrid,
    dt: f64,
    scheme: EulerScheme,
) -> Result<EulerState> {
    match scheme {
        EulerScheme::Upwind => euler_step_with(state, grid, dt, None::<fn(f64) -> f64>),
        EulerScheme::Muscl => euler_step_with(state, grid, dt, Some(vanleer_limiter)),
    }
}

/// MUSCL step with a custom limiter, or a Rusanov step when `limiter` is `None`.
pub fn euler_step_with(
    state: &EulerState,
    grid: &SpatialGrid,
    dt: f64,
    limiter: Option<impl Fn(f64) -> f64>,
) -> Result<EulerState> {
    let cells = state.moments.cells();
    if cells.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: cells.len(),
        });
    }
    let dim = grid.dim();
    let gamma = state.gamma;
    let ratio_dt = dt / grid.spacing();
    let mut update: Vec<ConservedMoments> = alloc::vec![ConservedMoments::zero(dim); cells.len()];
    let mut line: Vec<LineCell> = Vec::new();
    let mut fluxes: Vec<ConservedMoments> = Vec::new();

    for axis in 0..dim {
        let len = grid.counts()[axis];
        let stride = grid.stride(axis);
        let bc = grid.boundary(axis);
        let lines = grid.len() / len;
        for l in 0..lines {
            // first cell of line l: decompose l over the remaining axes
            let base = if dim == 1 {
                0
            } else if axis == 0 {
                l
            } else {
                l * len
            };
            line.clear();
            for p in -2..(len as i64 + 2) {
                let j = base + bc.resolve(p, len) * stride;
                let u = cells[j];
                let (rho, vel, pr) = primitive(&u, gamma).map_err(|e| e.at_cell(j))?;
                let c = libm::sqrt(gamma * pr / rho);
                line.push(LineCell {
                    u,
                    f: flux_unchecked(&u, &vel, pr, axis),
                    speed: libm::fabs(vel[axis]) + c,
                });
            }
            fluxes.clear();
            // interface i + 1/2 for i = -1..len-1 lives between padded cells i+2 and i+3
            for i in 0..=len {
                let (a, b) = (i + 1, i + 2);
                let alpha = line[a].speed.max(line[b].speed);
                let psi = match &limiter {
                    None => rusanov_from(&line[a].f, &line[b].f, &line[a].u, &line[b].u, alpha),
                    Some(phi) => {
                        let f = [line[a - 1].f, line[a].f, line[b].f, line[b + 1].f];
                        let u = [&line[a - 1].u, &line[a].u, &line[b].u, &line[b + 1].u];
                        muscl_from(&f, u, alpha, phi)
                    }
                };
                fluxes.push(psi);
            }
            for i in 0..len {
                let j = base + i * stride;
                let d = update[j].as_mut_slice();
                for (q, v) in d.iter_mut().enumerate() {
                    *v -= ratio_dt * (fluxes[i + 1][q] - fluxes[i][q]);
                }
            }
        }
    }
    let next: Vec<ConservedMoments> = cells.iter().zip(update).map(|(u, d)| *u + d).collect();
    Ok(EulerState {
        moments: MomentField::new(next),
        gamma,
    })
}

/// Stand-alone Euler solver.
#[derive(Debug, Clone)]
pub struct EulerSolver {
    space: SpatialGrid,
    state: EulerState,
    scheme: EulerScheme,
    time: f64,
}

impl EulerSolver {
    pub fn new(
        space: SpatialGrid,
        initial: MomentField,
        gamma: f64,
        scheme: EulerScheme,
    ) -> Result<Self> {
        if initial.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: initial.len(),
            });
        }
        Ok(EulerSolver {
            space,
            state: EulerState::new(initial, gamma),
            scheme,
            time: 0.0,
        })
    }

    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.state = euler_step(&self.state, &self.space, dt, self.scheme)?;
        self.time += dt;
        Ok(())
    }

    pub fn timestep(&self, factor: f64) -> Result<f64> {
        euler_timestep(&self.state, self.space.spacing(), factor)
    }

    pub fn moments(&self) -> &MomentField {
        &self.state.moments
    }

    pub fn state(&self) -> &EulerState {
        &self.state
    }

    pub fn space(&self) -> &SpatialGrid {
        &self.space
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}
