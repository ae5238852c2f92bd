use alloc::vec;
use alloc::vec::Vec;

use super::{discrete_maxwellian, CollisionInvariants, ConservedMoments, VelocityGrid};
use crate::error::{Error, Result};
use crate::linalg;
use crate::MAX_MOMENTS;

/// Constraint matrix `C` (column `k` is `dv^d m_k`) together with the
/// precomputed correction matrix `D = C^T (C C^T)^{-1}`.
///
/// The closest vector (in the discrete L2 norm) to `f~` whose moments are `U`
/// is `f~ + D (U - C f~)`.
#[derive(Debug, Clone)]
pub struct ConservationOperator {
    dim: usize,
    nodes: usize,
    cell_volume: f64,
    invariants: CollisionInvariants,
    /// `N x (d+2)`, row-major.
    correction: Vec<f64>,
}

impl ConservationOperator {
    pub fn new(grid: &VelocityGrid) -> Result<Self> {
        Self::from_invariants(CollisionInvariants::new(grid), grid.cell_volume())
    }

    /// Builds the operator from arbitrary invariants and quadrature weight.
    pub fn from_invariants(invariants: CollisionInvariants, cell_volume: f64) -> Result<Self> {
        let dim = invariants.dim();
        let n = invariants.len();
        let q = dim + 2;
        if n < q {
            return Err(Error::SingularConstraints);
        }
        if !(cell_volume > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature weight must be positive",
            ));
        }
        // Gram matrix G = sum_k m_k m_k^T, so C C^T = w^2 G.
        let mut gram = vec![0.0; q * q];
        for k in 0..n {
            let m = invariants.get(k);
            for r in 0..q {
                for c in 0..q {
                    gram[r * q + c] += m[r] * m[c];
                }
            }
        }
        let gram_inv = linalg::invert(&gram, q, 1e-13).ok_or(Error::SingularConstraints)?;
        // D = C^T (C C^T)^{-1} = M G^{-1} / w.
        let mut correction = vec![0.0; n * q];
        for k in 0..n {
            let m = invariants.get(k);
            for c in 0..q {
                let mut s = 0.0;
                for r in 0..q {
                    s += m[r] * gram_inv[r * q + c];
                }
                correction[k * q + c] = s / cell_volume;
            }
        }
        Ok(ConservationOperator {
            dim,
            nodes: n,
            cell_volume,
            invariants,
            correction,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of velocity nodes `N`.
    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn invariants(&self) -> &CollisionInvariants {
        &self.invariants
    }

    /// Entry `C[i][k] = dv^d m_k[i]`.
    pub fn constraint(&self, i: usize, k: usize) -> f64 {
        self.cell_volume * self.invariants.get(k)[i]
    }

    /// Row `k` of `D`, a `(d+2)`-slice.
    pub fn correction_row(&self, k: usize) -> &[f64] {
        let q = self.dim + 2;
        &self.correction[k * q..(k + 1) * q]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nodes {
            return Err(Error::LengthMismatch {
                expected: self.nodes,
                got: len,
            });
        }
        Ok(())
    }

    /// `C f`, the discrete moments of one velocity vector.
    pub fn moments(&self, f: &[f64]) -> Result<ConservedMoments> {
        self.check_len(f.len())?;
        let q = self.dim + 2;
        let mut acc = [0.0; MAX_MOMENTS];
        for (k, fk) in f.iter().enumerate() {
            let m = self.invariants.get(k);
            for i in 0..q {
                acc[i] += m[i] * fk;
            }
        }
        Ok(ConservedMoments::from_slice(self.dim, &acc[..q]).scaled(self.cell_volume))
    }

    /// Replaces `f` by `f + D (target - C f)`.
    pub fn correct_in_place(&self, f: &mut [f64], target: &ConservedMoments) -> Result<()> {
        self.check_len(f.len())?;
        let residual = *target - self.moments(f)?;
        let q = self.dim + 2;
        let r = residual.as_slice();
        for (k, fk) in f.iter_mut().enumerate() {
            let d = &self.correction[k * q..(k + 1) * q];
            let mut s = 0.0;
            for i in 0..q {
                s += d[i] * r[i];
            }
            *fk += s;
        }
        Ok(())
    }

    /// L2-closest vector to `f_tilde` whose discrete moments equal `target`.
    pub fn correct(&self, f_tilde: &[f64], target: &ConservedMoments) -> Result<Vec<f64>> {
        let mut f = f_tilde.to_vec();
        self.correct_in_place(&mut f, target)?;
        Ok(f)
    }

    /// Moments of every cell of a velocity-major field (`values[k * cells + j]`).
    pub fn field_moments(&self, values: &[f64], cells: usize) -> Result<Vec<ConservedMoments>> {
        self.check_len(values.len() / cells.max(1))?;
        if values.len() != self.nodes * cells {
            return Err(Error::LengthMismatch {
                expected: self.nodes * cells,
                got: values.len(),
            });
        }
        let q = self.dim + 2;
        let mut acc = vec![[0.0; MAX_MOMENTS]; cells];
        for k in 0..self.nodes {
            let m = self.invariants.get(k);
            let row = &values[k * cells..(k + 1) * cells];
            for (a, f) in acc.iter_mut().zip(row) {
                for i in 0..q {
                    a[i] += m[i] * f;
                }
            }
        }
        Ok(acc
            .into_iter()
            .map(|a| ConservedMoments::from_slice(self.dim, &a[..q]).scaled(self.cell_volume))
            .collect())
    }

    /// Applies the correction cell by cell to a velocity-major field.
    pub fn correct_field(&self, values: &mut [f64], targets: &[ConservedMoments]) -> Result<()> {
        let cells = targets.len();
        let current = self.field_moments(values, cells)?;
        let q = self.dim + 2;
        let residuals: Vec<[f64; MAX_MOMENTS]> = targets
            .iter()
            .zip(&current)
            .map(|(t, c)| {
                let mut r = [0.0; MAX_MOMENTS];
                r[..q].copy_from_slice((*t - *c).as_slice());
                r
            })
            .collect();
        for k in 0..self.nodes {
            let d = &self.correction[k * q..(k + 1) * q];
            let row = &mut values[k * cells..(k + 1) * cells];
            for (f, r) in row.iter_mut().zip(&residuals) {
                let mut s = 0.0;
                for i in 0..q {
                    s += d[i] * r[i];
                }
                *f += s;
            }
        }
        Ok(())
    }

    /// Moment-matched discrete Maxwellians for every cell, written
    /// velocity-major into `out` (`out[k * cells + j]`).
    pub fn equilibrium_field(
        &self,
        grid: &VelocityGrid,
        states: &[ConservedMoments],
        out: &mut [f64],
    ) -> Result<()> {
        let cells = states.len();
        if out.len() != self.nodes * cells {
            return Err(Error::LengthMismatch {
                expected: self.nodes * cells,
                got: out.len(),
            });
        }
        let dim = self.dim;
        // Per-cell Maxwellian parameters, then one contiguous pass per node.
        let mut params = Vec::with_capacity(cells);
        for (j, s) in states.iter().enumerate() {
            let s = s.validated().map_err(|e| e.at_cell(j))?;
            let theta = s.temperature();
            let norm =
                s.density() / libm::pow(2.0 * core::f64::consts::PI * theta, 0.5 * dim as f64);
            params.push((norm, s.velocity(), -0.5 / theta));
        }
        for (k, v) in grid.nodes().iter().enumerate() {
            let row = &mut out[k * cells..(k + 1) * cells];
            for (o, (norm, u, inv)) in row.iter_mut().zip(&params) {
                let mut d2 = 0.0;
                for a in 0..dim {
                    d2 += (u[a] - v[a]) * (u[a] - v[a]);
                }
                *o = norm * libm::exp(d2 * inv);
            }
        }
        self.correct_field(out, states)
    }
}

/// Discrete Maxwellian at every node, corrected so its moments equal `state`.
pub fn projected_equilibrium(
    state: &ConservedMoments,
    grid: &VelocityGrid,
    op: &ConservationOperator,
) -> Result<Vec<f64>> {
    let mut f = vec![0.0; grid.len()];
    discrete_maxwellian(state, grid, &mut f)?;
    op.correct_in_place(&mut f, state)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dvm::discrete_moments;

    fn three_node() -> (VelocityGrid, ConservationOperator) {
        let g = VelocityGrid::new(1, &[3], &[(-1.0, 1.0)]).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        (g, op)
    }

    fn rel_residual(op: &ConservationOperator, f: &[f64], target: &ConservedMoments) -> f64 {
        let got = op.moments(f).unwrap();
        (got - *target).max_abs() / target.max_abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constraint_times_correction_is_identity() {
        let (_, op) = three_node();
        assert_eq!(op.len(), 3);
        // C C^T for nodes {-1, 0, 1}, dv = 1 assembled by definition
        let mut cct = [[0.0; 3]; 3];
        for (r, row) in cct.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = (0..3)
                    .map(|k| op.constraint(r, k) * op.constraint(c, k))
                    .sum();
            }
        }
        assert_eq!(cct, [[3.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, 0.5]]);
        for r in 0..3 {
            for c in 0..3 {
                let cd: f64 = (0..3)
                    .map(|k| op.constraint(r, k) * op.correction_row(k)[c])
                    .sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!((cd - expected).abs() < 1e-12, "C D[{r}][{c}] = {cd}");
            }
        }
    }

    #[test]
    fn large_grid_identity() {
        let g = VelocityGrid::symmetric(2, 20, 15.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let cd: f64 = (0..g.len())
                    .map(|k| op.constraint(r, k) * op.correction_row(k)[c])
                    .sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!((cd - expected).abs() < 1e-12, "C D[{r}][{c}] = {cd}");
            }
        }
    }

    #[test]
    fn degenerate_grid_rejected() {
        let g = VelocityGrid::new(1, &[2], &[(0.0, 1.0)]).unwrap();
        assert!(matches!(
            ConservationOperator::new(&g),
            Err(Error::SingularConstraints)
        ));
        let same = CollisionInvariants::from_nodes(1, &[[0.5, 0.0]; 5]);
        assert!(matches!(
            ConservationOperator::from_invariants(same, 1.0),
            Err(Error::SingularConstraints)
        ));
    }

    #[test]
    fn already_conservative_is_unchanged() {
        let (g, op) = three_node();
        let f = [1.0, 2.0, 1.0];
        let u = discrete_moments(&f, &g).unwrap();
        assert_eq!(op.correct(&f, &u).unwrap(), f.to_vec());
    }

    #[test]
    fn zero_input_gives_correction_times_target() {
        let (_, op) = three_node();
        let u = ConservedMoments::from_slice(1, &[4.0, 0.5, 1.5]);
        let f = op.correct(&[0.0; 3], &u).unwrap();
        for (k, fk) in f.iter().enumerate() {
            let d = op.correction_row(k);
            let expected: f64 = (0..3).map(|i| d[i] * u[i]).sum();
            assert_eq!(*fk, expected);
        }
    }

    #[test]
    fn three_node_target() {
        let (_, op) = three_node();
        let u = ConservedMoments::from_slice(1, &[4.0, 0.0, 1.0]);
        let f = op.correct(&[1.0, 1.0, 1.0], &u).unwrap();
        assert!(rel_residual(&op, &f, &u) < 1e-12);
        // N = d + 2: the constraint set is a single point, {1, 2, 1}.
        for (a, b) in f.iter().zip([1.0, 2.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_bounds_need_almost_no_correction() {
        let g = VelocityGrid::symmetric(1, 100, 15.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        let u = ConservedMoments::from_primitive(1.0, &[0.0], 1.0);
        let mut raw = vec![0.0; g.len()];
        discrete_maxwellian(&u, &g, &mut raw).unwrap();
        let eq = projected_equilibrium(&u, &g, &op).unwrap();
        let diff = raw
            .iter()
            .zip(&eq)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-10, "{diff}");
        assert!(rel_residual(&op, &eq, &u) < 1e-12);
    }

    #[test]
    fn narrow_bounds_are_fixed_by_projection() {
        let g = VelocityGrid::symmetric(1, 21, 2.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        let u = ConservedMoments::from_primitive(1.0, &[0.0], 1.0);
        let mut raw = vec![0.0; g.len()];
        discrete_maxwellian(&u, &g, &mut raw).unwrap();
        assert!(rel_residual(&op, &raw, &u) > 1e-3);
        let eq = projected_equilibrium(&u, &g, &op).unwrap();
        assert!(rel_residual(&op, &eq, &u) < 1e-12);
    }

    #[test]
    fn displaced_state_may_lose_positivity() {
        let g = VelocityGrid::symmetric(1, 21, 4.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        let u = ConservedMoments::from_primitive(1.0, &[3.0], 1.0);
        let eq = projected_equilibrium(&u, &g, &op).unwrap();
        assert!(rel_residual(&op, &eq, &u) < 1e-12);
        assert!(eq.iter().any(|x| *x < 0.0));
    }

    #[test]
    fn batched_routes_match_per_cell_routes() {
        let g = VelocityGrid::symmetric(2, 6, 4.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        let states = [
            ConservedMoments::from_primitive(1.0, &[0.1, 0.2], 1.0),
            ConservedMoments::from_primitive(0.3, &[-0.5, 0.0], 2.0),
            ConservedMoments::from_primitive(2.0, &[0.0, 0.7], 0.6),
        ];
        let n = g.len();
        let mut field = vec![0.0; n * states.len()];
        op.equilibrium_field(&g, &states, &mut field).unwrap();
        for (j, s) in states.iter().enumerate() {
            let single = projected_equilibrium(s, &g, &op).unwrap();
            for k in 0..n {
                assert_eq!(field[k * states.len() + j], single[k]);
            }
        }
        let moments = op.field_moments(&field, states.len()).unwrap();
        for (m, s) in moments.iter().zip(&states) {
            assert!((*m - *s).max_abs() < 1e-12 * s.max_abs());
        }
    }

    #[test]
    fn equilibrium_field_reports_bad_cell() {
        let g = VelocityGrid::symmetric(1, 8, 4.0).unwrap();
        let op = ConservationOperator::new(&g).unwrap();
        let states = [
            ConservedMoments::from_primitive(1.0, &[0.0], 1.0),
            ConservedMoments::from_primitive(1.0, &[0.0], -1.0),
        ];
        let mut out = vec![0.0; 16];
        let err = op.equilibrium_field(&g, &states, &mut out).unwrap_err();
        assert!(matches!(err, Error::InvalidState { cell: Some(1), .. }));
    }
}
