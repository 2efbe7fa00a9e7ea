//! Test-only oracles, independent of the library's solution paths.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use funkmeans::WeightedPoint;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Second derivatives of the natural cubic interpolant of `(x, y)` from the
/// textbook tridiagonal system, solved with the Thomas algorithm.
pub fn natural_second_derivs(x: &[f64], y: &[f64]) -> Vec<f64> {
    let m = x.len();
    let mut out = vec![0.0; m];
    if m < 3 {
        return out;
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let n = m - 2;
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        sub[i] = h[i];
        diag[i] = 2.0 * (h[i] + h[i + 1]);
        sup[i] = h[i + 1];
        rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
    }
    for i in 1..n {
        let f = sub[i] / diag[i - 1];
        diag[i] -= f * sup[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    let mut sol = vec![0.0; n];
    sol[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        sol[i] = (rhs[i] - sup[i] * sol[i + 1]) / diag[i];
    }
    out[1..m - 1].copy_from_slice(&sol);
    out
}

/// Evaluate the natural cubic interpolant with knot values `y` and second
/// derivatives `m2`, extrapolating linearly.
pub fn natural_eval(x: &[f64], y: &[f64], m2: &[f64], t: f64) -> f64 {
    let n = x.len();
    if n == 1 {
        return y[0];
    }
    let slope = |i: usize, at_left: bool| {
        let h = x[i + 1] - x[i];
        let base = (y[i + 1] - y[i]) / h;
        if at_left {
            base - h * (2.0 * m2[i] + m2[i + 1]) / 6.0
        } else {
            base + h * (m2[i] + 2.0 * m2[i + 1]) / 6.0
        }
    };
    if t <= x[0] {
        return y[0] + slope(0, true) * (t - x[0]);
    }
    if t >= x[n - 1] {
        return y[n - 1] + slope(n - 2, false) * (t - x[n - 1]);
    }
    let i = x.partition_point(|&k| k <= t) - 1;
    let h = x[i + 1] - x[i];
    let a = (x[i + 1] - t) / h;
    let b = (t - x[i]) / h;
    a * y[i] + b * y[i + 1] + ((a * a * a - a) * m2[i] + (b * b * b - b) * m2[i + 1]) * h * h / 6.0
}

/// `Ω_ab = ∫ N_a″ N_b″` for the cardinal natural splines on `x`. Second
/// derivatives are piecewise linear, so each interval contributes exactly
/// `h/6 (2 f_l g_l + f_l g_r + f_r g_l + 2 f_r g_r)`.
pub fn bending_gram(x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let basis: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            let mut e = vec![0.0; m];
            e[a] = 1.0;
            natural_second_derivs(x, &e)
        })
        .collect();
    DMatrix::from_fn(m, m, |a, b| {
        (0..m.saturating_sub(1))
            .map(|i| {
                let h = x[i + 1] - x[i];
                let (fl, fr) = (basis[a][i], basis[a][i + 1]);
                let (gl, gr) = (basis[b][i], basis[b][i + 1]);
                h / 6.0 * (2.0 * fl * gl + fl * gr + fr * gl + 2.0 * fr * gr)
            })
            .sum()
    })
}

/// Merge exactly equal abscissae; returns sorted `(t, z, w)`.
pub fn merge_exact(points: &[WeightedPoint]) -> Vec<(f64, f64, f64)> {
    let mut p: Vec<(f64, f64, f64)> = points.iter().map(|p| (p.t, p.z, p.w)).collect();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (t, z, w) in p {
        match out.last_mut() {
            Some(last) if last.0 == t => {
                let s = last.2 + w;
                last.1 = (last.1 * last.2 + z * w) / s;
                last.2 = s;
            }
            _ => out.push((t, z, w)),
        }
    }
    out
}

/// Dense oracle fit: knots, fitted values and `∫(g″)²` of the minimizer of
/// `(1/n_total) Σ w (z − g(t))² + λ ∫(g″)²` over natural cubic splines,
/// from `(W + n_total λ Ω) g = W z`.
pub struct OracleFit {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub second: Vec<f64>,
    pub bending: f64,
}

impl OracleFit {
    pub fn eval(&self, t: f64) -> f64 {
        natural_eval(&self.knots, &self.values, &self.second, t)
    }
}

pub fn dense_fit(points: &[WeightedPoint], lambda: f64, n_total: usize) -> OracleFit {
    let merged = merge_exact(points);
    let knots: Vec<f64> = merged.iter().map(|p| p.0).collect();
    let m = knots.len();
    let omega = bending_gram(&knots);
    let alpha = n_total as f64 * lambda;
    let mut a = omega.clone() * alpha;
    let mut rhs = DVector::zeros(m);
    for (i, p) in merged.iter().enumerate() {
        a[(i, i)] += p.2;
        rhs[i] = p.2 * p.1;
    }
    let g = a.lu().solve(&rhs).expect("oracle system is nonsingular");
    let bending = (g.transpose() * &omega * &g)[(0, 0)];
    let values: Vec<f64> = g.iter().copied().collect();
    let second = natural_second_derivs(&knots, &values);
    OracleFit {
        knots,
        values,
        second,
        bending,
    }
}

/// `(1/n_total) Σ w (z − g(t))² + λ ∫(g″)²` for knot values `g` on the merged
/// abscissae of `points`.
pub fn oracle_objective(points: &[WeightedPoint], g: &[f64], lambda: f64, n_total: usize) -> f64 {
    let merged = merge_exact(points);
    let knots: Vec<f64> = merged.iter().map(|p| p.0).collect();
    let m2 = natural_second_derivs(&knots, g);
    let rss: f64 = points
        .iter()
        .map(|p| p.w * (p.z - natural_eval(&knots, g, &m2, p.t)).powi(2))
        .sum();
    let pen: f64 = knots
        .windows(2)
        .zip(m2.windows(2))
        .map(|(x, m)| (x[1] - x[0]) / 3.0 * (m[0] * m[0] + m[0] * m[1] + m[1] * m[1]))
        .sum();
    rss / n_total as f64 + lambda * pen
}

/// Random instance with `m` distinct abscissae in `[0, 10]`, spaced at
/// least 0.05 apart, and weights in `[0.5, 2]`.
pub fn random_points(rng: &mut impl Rng, m: usize) -> Vec<WeightedPoint> {
    let mut t: Vec<f64> = Vec::with_capacity(m);
    while t.len() < m {
        let c = rng.random_range(0.0..10.0);
        if t.iter().all(|x: &f64| (x - c).abs() > 0.05) {
            t.push(c);
        }
    }
    t.into_iter()
        .map(|t| {
            WeightedPoint::new(
                t,
                rng.random_range(-5.0..5.0) + 0.3 * t,
                rng.random_range(0.5..2.0),
            )
        })
        .collect()
}

/// Composite Simpson on `nodes` equally spaced nodes (odd).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes % 2 == 1 && nodes >= 3);
    let h = (b - a) / (nodes - 1) as f64;
    let mut s = f(a) + f(b);
    for i in 1..nodes - 1 {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `∫(g″)²` by Simpson on every knot interval separately; `g″` is linear on
/// each interval, so the rule is exact up to rounding.
pub fn piecewise_simpson_bending(knots: &[f64], second: impl Fn(f64) -> f64) -> f64 {
    knots
        .windows(2)
        .map(|w| simpson(|t| second(t).powi(2), w[0], w[1], 5))
        .sum()
}

/// Minimum of `f_n` over all 2-cluster partitions of a tiny spline instance,
/// using the dense oracle for each cluster.
pub fn exhaustive_two_cluster_min(data: &[(f64, f64)], lambda: f64) -> f64 {
    let n = data.len();
    assert!(n <= 16);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let mut total = 0.0;
        for j in 0..2 {
            let pts: Vec<WeightedPoint> = data
                .iter()
                .enumerate()
                .filter(|(i, _)| ((mask >> i) & 1) as usize == j)
                .map(|(_, &(t, z))| WeightedPoint::new(t, z, 1.0))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let fit = dense_fit(&pts, lambda, n);
            total += oracle_objective(&pts, &fit.values, lambda, n);
        }
        best = best.min(total);
    }
    best
}
