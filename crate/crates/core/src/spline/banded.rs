use crate::error::{invalid, Result};

/// Solve `A x = rhs` for a symmetric positive definite pentadiagonal `A`
/// given by its main diagonal `d0`, first superdiagonal `d1` and second
/// superdiagonal `d2`, via an `LDLᵀ` factorization in `O(n)`.
pub fn solve_pentadiagonal_spd(
    d0: &[f64],
    d1: &[f64],
    d2: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = d0.len();
    if rhs.len() != n || d1.len() != n.saturating_sub(1) || d2.len() != n.saturating_sub(2) {
        return Err(invalid("bands", "inconsistent band lengths"));
    }
    // L has unit diagonal and subdiagonals l1 (i, i−1) and l2 (i, i−2).
    let mut diag = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    for i in 0..n {
        if i >= 2 {
            l2[i] = d2[i - 2] / diag[i - 2];
        }
        if i >= 1 {
            let mut v = d1[i - 1];
            if i >= 2 {
                v -= l2[i] * diag[i - 2] * l1[i - 1];
            }
            l1[i] = v / diag[i - 1];
        }
        let mut v = d0[i];
        if i >= 1 {
            v -= l1[i] * l1[i] * diag[i - 1];
        }
        if i >= 2 {
            v -= l2[i] * l2[i] * diag[i - 2];
        }
        if !(v > 0.0) {
            return Err(invalid("matrix", "not positive definite"));
        }
        diag[i] = v;
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        if i >= 1 {
            y[i] -= l1[i] * y[i - 1];
        }
        if i >= 2 {
            y[i] -= l2[i] * y[i - 2];
        }
    }
    for (yi, di) in y.iter_mut().zip(&diag) {
        *yi /= di;
    }
    for i in (0..n).rev() {
        if i + 1 < n {
            y[i] -= l1[i + 1] * y[i + 1];
        }
        if i + 2 < n {
            y[i] -= l2[i + 2] * y[i + 2];
        }
    }
    Ok(y)
}
