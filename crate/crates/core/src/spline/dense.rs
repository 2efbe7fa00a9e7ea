//! Dense reference route for the smoothing-spline normal equations.
//!
//! Builds `K = Q R⁻¹ Qᵀ` explicitly and solves `(W + α K) g = W z` with a
//! dense LU factorization. Cubic in the knot count; meant for cross-checks.

use nalgebra::{DMatrix, DVector};

use super::{build_penalty, merge_duplicates, validate_points, WeightedPoint};
use crate::error::{invalid, Result};

/// Knot values of the smoothing spline, solved densely.
pub fn fit_values_dense(points: &[WeightedPoint], lambda: f64, n_total: usize) -> Result<Vec<f64>> {
    validate_points(points, lambda, n_total)?;
    let merged = merge_duplicates(points);
    let m = merged.len();
    let z: Vec<f64> = merged.iter().map(|p| p.z).collect();
    if m < 3 {
        return Ok(z);
    }
    let knots: Vec<f64> = merged.iter().map(|p| p.t).collect();
    let pen = build_penalty(&knots)?;
    let q = DMatrix::from_fn(m, m - 2, |i, j| pen.q_dense()[i][j]);
    let r = DMatrix::from_fn(m - 2, m - 2, |i, j| pen.r_dense()[i][j]);
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| invalid("R", "singular penalty matrix"))?;
    let k = &q * r_inv * q.transpose();
    let alpha = n_total as f64 * lambda;
    let w = DMatrix::from_diagonal(&DVector::from_iterator(m, merged.iter().map(|p| p.w)));
    let a = &w + k * alpha;
    let rhs = &w * DVector::from_vec(z);
    let g = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| invalid("system", "singular normal equations"))?;
    Ok(g.iter().copied().collect())
}
