//! Dense solves for the tiny (d+2)x(d+2) systems used by the projection.

use alloc::vec::Vec;

/// Inverts the `n x n` row-major matrix `a` by Gauss-Jordan elimination with
/// partial pivoting. Returns `None` when a pivot falls below `rel_tol` times
/// the largest entry of `a`.
pub(crate) fn invert(a: &[f64], n: usize, rel_tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(libm::fabs(*x)));
    if scale == 0.0 {
        return None;
    }
    let mut m = a.to_vec();
    let mut inv = alloc::vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                libm::fabs(m[r * n + col])
                    .partial_cmp(&libm::fabs(m[s * n + col]))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        let pivot = m[pivot_row * n + col];
        if !(libm::fabs(pivot) > rel_tol * scale) {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
                inv.swap(col * n + c, pivot_row * n + c);
            }
        }
        let p = 1.0 / m[col * n + col];
        for c in 0..n {
            m[col * n + c] *= p;
            inv[col * n + c] *= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * n + col];
            if factor == 0.0 {
                continue;
            }
            for c in 0..n {
                m[r * n + c] -= factor * m[col * n + c];
                inv[r * n + c] -= factor * inv[col * n + c];
            }
        }
    }
    Some(inv)
}
