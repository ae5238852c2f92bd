use core::f64::consts::PI;

use super::{ConservedMoments, VelocityGrid};
use crate::error::{Error, Result};

/// `rho / (2 pi theta)^{d/2} exp(-|u - v|^2 / (2 theta))`.
pub fn maxwellian(state: &ConservedMoments, v: &[f64]) -> Result<f64> {
    let state = state.validated()?;
    let dim = state.dim();
    if v.len() < dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    let theta = state.temperature();
    let u = state.velocity();
    let dist2: f64 = (0..dim).map(|a| (u[a] - v[a]) * (u[a] - v[a])).sum();
    let norm = state.density() / libm::pow(2.0 * PI * theta, 0.5 * dim as f64);
    Ok(norm * libm::exp(-dist2 / (2.0 * theta)))
}

/// Maxwellian sampled at every lattice node, written into `out`.
pub fn discrete_maxwellian(
    state: &ConservedMoments,
    grid: &VelocityGrid,
    out: &mut [f64],
) -> Result<()> {
    let state = state.validated()?;
    if out.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: out.len(),
        });
    }
    let dim = grid.dim();
    let theta = state.temperature();
    let u = state.velocity();
    let norm = state.density() / libm::pow(2.0 * PI * theta, 0.5 * dim as f64);
    let inv = -0.5 / theta;
    for (o, v) in out.iter_mut().zip(grid.nodes()) {
        let mut d2 = 0.0;
        for a in 0..dim {
            d2 += (u[a] - v[a]) * (u[a] - v[a]);
        }
        *o = norm * libm::exp(d2 * inv);
    }
    Ok(())
}
