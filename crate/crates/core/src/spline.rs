//! Natural cubic smoothing splines.
//!
//! A fit minimizes
//!
//! ```text
//! (1/n_total) Σ_i w_i |z_i − g(t_i)|² + λ ∫(g″)²
//! ```
//!
//! over twice-differentiable `g`. The minimizer is the natural cubic spline
//! with knots at the distinct abscissae, and its knot values `g` and
//! interior second derivatives `γ` satisfy `Qᵀg = Rγ` with the banded
//! matrices of [`PenaltyMatrices`]. Writing `α = n_total·λ` and `W` for the
//! diagonal of aggregated weights, the Reinsch system is
//!
//! ```text
//! (R + α QᵀW⁻¹Q) γ = Qᵀz,    g = z − α W⁻¹Qγ
//! ```
//!
//! which is symmetric positive definite and pentadiagonal, so a fit costs
//! `O(m)` in the number of knots.

use crate::energy::{pointwise_cost, Observation2D};
use crate::error::{Error, Result};
use crate::lloyd::ClusterModel;
use crate::rng::StreamRng;
use crate::trajectory::{simpson, Penalized, Trajectory};

mod banded;
pub mod dense;

pub use banded::solve_pentadiagonal_spd;

/// Default node count for [`l2_distance`].
pub const DEFAULT_L2_NODES: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub t: f64,
    pub z: f64,
    pub w: f64,
}

impl WeightedPoint {
    pub fn new(t: f64, z: f64, w: f64) -> Self {
        Self { t, z, w }
    }
}

/// The second-difference matrix `Q` (m × (m−2)) and the tridiagonal
/// `R` ((m−2) × (m−2)) of a knot sequence, stored by band.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrices {
    /// Column `j` of `Q` holds `q[j] = [Q[j][j], Q[j+1][j], Q[j+2][j]]`.
    q: Vec<[f64; 3]>,
    r_diag: Vec<f64>,
    r_off: Vec<f64>,
}

impl PenaltyMatrices {
    pub fn interior(&self) -> usize {
        self.r_diag.len()
    }

    /// The three nonzeros of column `j`, at rows `j`, `j+1`, `j+2`.
    pub fn q_column(&self, j: usize) -> [f64; 3] {
        self.q[j]
    }

    pub fn r_diagonal(&self) -> &[f64] {
        &self.r_diag
    }

    pub fn r_off_diagonal(&self) -> &[f64] {
        &self.r_off
    }

    /// Dense `Q` as rows.
    pub fn q_dense(&self) -> Vec<Vec<f64>> {
        let cols = self.interior();
        let mut out = vec![vec![0.0; cols]; cols + 2];
        for (j, col) in self.q.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                out[j + r][j] = *v;
            }
        }
        out
    }

    /// Dense `R` as rows.
    pub fn r_dense(&self) -> Vec<Vec<f64>> {
        let n = self.interior();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            out[i][i] = self.r_diag[i];
            if i + 1 < n {
                out[i][i + 1] = self.r_off[i];
                out[i + 1][i] = self.r_off[i];
            }
        }
        out
    }

    /// `γᵀRγ`.
    pub fn r_quadratic_form(&self, gamma: &[f64]) -> f64 {
        let diag: f64 = gamma.iter().zip(&self.r_diag).map(|(g, r)| r * g * g).sum();
        let off: f64 = gamma
            .windows(2)
            .zip(&self.r_off)
            .map(|(g, r)| r * g[0] * g[1])
            .sum();
        diag + 2.0 * off
    }

    /// `Qᵀv` for a knot-length vector `v`.
    pub fn qt_mul(&self, v: &[f64]) -> Vec<f64> {
        self.q
            .iter()
            .enumerate()
            .map(|(j, c)| c[0] * v[j] + c[1] * v[j + 1] + c[2] * v[j + 2])
            .collect()
    }

    /// `Qγ` for an interior-length vector `γ`.
    pub fn q_mul(&self, gamma: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; gamma.len() + 2];
        for (j, (c, g)) in self.q.iter().zip(gamma).enumerate() {
            out[j] += c[0] * g;
            out[j + 1] += c[1] * g;
            out[j + 2] += c[2] * g;
        }
        out
    }
}

fn check_knots(knots: &[f64], needed: usize) -> Result<()> {
    if knots.len() < needed {
        return Err(Error::TooFewKnots {
            needed,
            got: knots.len(),
        });
    }
    if let Some(i) = knots.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::KnotsNotIncreasing(i + 1));
    }
    Ok(())
}

/// Band matrices `Q`, `R` for strictly increasing knots (at least three).
pub fn build_penalty(knots: &[f64]) -> Result<PenaltyMatrices> {
    check_knots(knots, 3)?;
    let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
    let interior = knots.len() - 2;
    let q = (0..interior)
        .map(|j| {
            let (a, b) = (1.0 / h[j], 1.0 / h[j + 1]);
            [a, -(a + b), b]
        })
        .collect();
    let r_diag = (0..interior).map(|j| (h[j] + h[j + 1]) / 3.0).collect();
    let r_off = (1..interior).map(|j| h[j] / 6.0).collect();
    Ok(PenaltyMatrices { q, r_diag, r_off })
}

/// A natural cubic spline in value / second-derivative form.
///
/// Outside the knot range the spline continues linearly with the end slope.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCenter {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// `γ` at the interior knots; zero at both ends.
    second_derivs: Vec<f64>,
    lambda_eff: f64,
}

impl SplineCenter {
    /// Assemble a spline from its parts. `second_derivs` holds the interior
    /// values only.
    pub fn from_parts(
        knots: Vec<f64>,
        values: Vec<f64>,
        second_derivs: Vec<f64>,
        lambda_eff: f64,
    ) -> Result<Self> {
        check_knots(&knots, 1)?;
        if values.len() != knots.len() {
            return Err(crate::error::invalid("values", "length differs from knots"));
        }
        if second_derivs.len() != knots.len().saturating_sub(2) {
            return Err(crate::error::invalid(
                "second_derivs",
                "length must be knots − 2",
            ));
        }
        Ok(Self {
            knots,
            values,
            second_derivs,
            lambda_eff,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn second_derivs(&self) -> &[f64] {
        &self.second_derivs
    }

    /// `n_total · λ`, the penalty weight against the raw weighted residual sum.
    pub fn lambda_eff(&self) -> f64 {
        self.lambda_eff
    }

    /// `γ` at knot `i`, including the natural zero ends.
    fn gamma(&self, i: usize) -> f64 {
        if i == 0 || i + 1 >= self.knots.len() {
            0.0
        } else {
            self.second_derivs[i - 1]
        }
    }

    /// Interval `[t_i, t_{i+1}]` containing `t` (clamped to the knot range).
    fn interval(&self, t: f64) -> usize {
        let m = self.knots.len();
        self.knots.partition_point(|&k| k <= t).clamp(1, m - 1) - 1
    }

    fn end_slopes(&self) -> (f64, f64) {
        let m = self.knots.len();
        if m == 1 {
            return (0.0, 0.0);
        }
        let h0 = self.knots[1] - self.knots[0];
        let left = (self.values[1] - self.values[0]) / h0 - h0 * self.gamma(1) / 6.0;
        let hl = self.knots[m - 1] - self.knots[m - 2];
        let right = (self.values[m - 1] - self.values[m - 2]) / hl + hl * self.gamma(m - 2) / 6.0;
        (left, right)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let m = self.knots.len();
        if m == 1 {
            return self.values[0];
        }
        let (first, last) = (self.knots[0], self.knots[m - 1]);
        if t < first {
            return self.values[0] + self.end_slopes().0 * (t - first);
        }
        if t > last {
            return self.values[m - 1] + self.end_slopes().1 * (t - last);
        }
        let i = self.interval(t);
        let (tl, tr) = (self.knots[i], self.knots[i + 1]);
        let h = tr - tl;
        let (a, b) = (t - tl, tr - t);
        let linear = a / h * self.values[i + 1] + b / h * self.values[i];
        linear - a * b / 6.0 * ((1.0 + a / h) * self.gamma(i + 1) + (1.0 + b / h) * self.gamma(i))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let m = self.knots.len();
        if m == 1 {
            return 0.0;
        }
        if t < self.knots[0] {
            return self.end_slopes().0;
        }
        if t > self.knots[m - 1] {
            return self.end_slopes().1;
        }
        let i = self.interval(t);
        let (tl, tr) = (self.knots[i], self.knots[i + 1]);
        let h = tr - tl;
        let (a, b) = (t - tl, tr - t);
        let (gl, gr) = (self.gamma(i), self.gamma(i + 1));
        (self.values[i + 1] - self.values[i]) / h
            + ((3.0 * a * a / h - h) * gr - (3.0 * b * b / h - h) * gl) / 6.0
    }

    /// Piecewise-linear second derivative (zero outside the knot range).
    pub fn second_derivative(&self, t: f64) -> f64 {
        let m = self.knots.len();
        if m < 3 || t < self.knots[0] || t > self.knots[m - 1] {
            return 0.0;
        }
        let i = self.interval(t);
        let (tl, tr) = (self.knots[i], self.knots[i + 1]);
        ((t - tl) * self.gamma(i + 1) + (tr - t) * self.gamma(i)) / (tr - tl)
    }

    /// `∫(g″)² = γᵀRγ`.
    pub fn bending_energy(&self) -> f64 {
        if self.knots.len() < 3 {
            return 0.0;
        }
        build_penalty(&self.knots)
            .expect("knots validated at construction")
            .r_quadratic_form(&self.second_derivs)
    }
}

impl Trajectory for SplineCenter {
    fn eval(&self, t: f64) -> f64 {
        self.evaluate(t)
    }
}

impl Penalized for SplineCenter {
    fn bending_energy(&self) -> f64 {
        SplineCenter::bending_energy(self)
    }
}

/// Abscissae closer than this fraction of the data range are tied.
pub const TIE_TOLERANCE: f64 = 1e-6;

/// Sort by abscissa and merge tied abscissae into one knot carrying the
/// summed weight and the weighted means of `t` and `z`. Points are tied when
/// they lie within [`TIE_TOLERANCE`] times the data range of the first point
/// of their group; without this, nearly coincident knots make the banded
/// system numerically singular.
pub(crate) fn merge_duplicates(points: &[WeightedPoint]) -> Vec<WeightedPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let tol = match (sorted.first(), sorted.last()) {
        (Some(a), Some(b)) => TIE_TOLERANCE * (b.t - a.t),
        _ => return sorted,
    };
    let mut merged: Vec<WeightedPoint> = Vec::with_capacity(sorted.len());
    let mut anchor = f64::NEG_INFINITY;
    for p in sorted {
        match merged.last_mut() {
            Some(last) if p.t - anchor <= tol => {
                let w = last.w + p.w;
                last.t = if last.t == p.t {
                    p.t
                } else {
                    (last.w * last.t + p.w * p.t) / w
                };
                last.z = (last.w * last.z + p.w * p.z) / w;
                last.w = w;
            }
            _ => {
                anchor = p.t;
                merged.push(p);
            }
        }
    }
    merged
}

fn validate_points(points: &[WeightedPoint], lambda: f64, n_total: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(crate::error::invalid("lambda", "must be finite and >= 0"));
    }
    if n_total == 0 {
        return Err(crate::error::invalid("n_total", "must be positive"));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.w > 0.0) || !p.t.is_finite() || !p.z.is_finite())
    {
        return Err(crate::error::invalid(
            "points",
            format!("need finite t, z and positive weight, got {p:?}"),
        ));
    }
    Ok(())
}

/// Fit the smoothing spline of `points` with penalty `λ`, normalizing the
/// residual by `n_total` (the size of the whole dataset, not the cluster).
pub fn fit_smoothing_spline(
    points: &[WeightedPoint],
    lambda: f64,
    n_total: usize,
) -> Result<SplineCenter> {
    validate_points(points, lambda, n_total)?;
    let merged = merge_duplicates(points);
    let alpha = n_total as f64 * lambda;
    let knots: Vec<f64> = merged.iter().map(|p| p.t).collect();
    let z: Vec<f64> = merged.iter().map(|p| p.z).collect();
    if merged.len() < 3 {
        // Constants and lines carry no penalty, so the fit interpolates the
        // (merged) data.
        return SplineCenter::from_parts(knots, z, Vec::new(), alpha);
    }
    let pen = build_penalty(&knots)?;
    let inv_w: Vec<f64> = merged.iter().map(|p| 1.0 / p.w).collect();
    let m2 = pen.interior();

    // R + α QᵀW⁻¹Q, by band.
    let mut d0 = pen.r_diag.clone();
    let mut d1 = vec![0.0; m2.saturating_sub(1)];
    let mut d2 = vec![0.0; m2.saturating_sub(2)];
    for j in 0..m2 {
        let c = pen.q[j];
        d0[j] += alpha
            * (c[0] * c[0] * inv_w[j] + c[1] * c[1] * inv_w[j + 1] + c[2] * c[2] * inv_w[j + 2]);
        if j + 1 < m2 {
            let n = pen.q[j + 1];
            d1[j] =
                pen.r_off[j] + alpha * (c[1] * n[0] * inv_w[j + 1] + c[2] * n[1] * inv_w[j + 2]);
        }
        if j + 2 < m2 {
            d2[j] = alpha * c[2] * pen.q[j + 2][0] * inv_w[j + 2];
        }
    }
    let gamma = solve_pentadiagonal_spd(&d0, &d1, &d2, &pen.qt_mul(&z))?;
    let qg = pen.q_mul(&gamma);
    let values = z
        .iter()
        .zip(&qg)
        .zip(&inv_w)
        .map(|((zi, qi), iw)| zi - alpha * iw * qi)
        .collect();
    SplineCenter::from_parts(knots, values, gamma, alpha)
}

/// The fitting objective `(1/n_total) Σ w (z − g(t))² + λ ∫(g″)²` of a spline.
pub fn smoothing_objective(
    spline: &SplineCenter,
    points: &[WeightedPoint],
    lambda: f64,
    n_total: usize,
) -> f64 {
    let rss: f64 = points
        .iter()
        .map(|p| p.w * (p.z - spline.evaluate(p.t)).powi(2))
        .sum();
    rss / n_total as f64 + lambda * spline.bending_energy()
}

/// `‖a − b‖_{L²[start, end]}` by composite Simpson on `nodes` nodes.
pub fn l2_distance<A, B>(a: &A, b: &B, start: f64, end: f64, nodes: usize) -> Result<f64>
where
    A: Trajectory + ?Sized,
    B: Trajectory + ?Sized,
{
    let sq = simpson(
        |t| {
            let d = a.eval(t) - b.eval(t);
            d * d
        },
        start,
        end,
        nodes,
    )?;
    Ok(sq.max(0.0).sqrt())
}

/// The association problem: `(t, z)` data, smoothing-spline centers,
/// squared-residual cost and penalty `λ ∫(μ″)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineModel {
    pub lambda: f64,
}

impl ClusterModel for SplineModel {
    type Obs = Observation2D;
    type Center = SplineCenter;

    fn cost(&self, obs: &Observation2D, center: &SplineCenter) -> f64 {
        pointwise_cost(obs, center)
    }

    fn fit(
        &self,
        members: &[&Observation2D],
        n_total: usize,
        _previous: Option<&SplineCenter>,
        _rng: &mut StreamRng,
    ) -> Result<SplineCenter> {
        let points: Vec<WeightedPoint> = members
            .iter()
            .map(|o| WeightedPoint::new(o.t, o.z, 1.0))
            .collect();
        fit_smoothing_spline(&points, self.lambda, n_total)
    }

    fn penalty(&self, center: &SplineCenter) -> f64 {
        self.lambda * center.bending_energy()
    }
}
