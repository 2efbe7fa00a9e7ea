mod common;

use approx::assert_relative_eq;
use funkmeans::spline::{build_penalty, dense::fit_values_dense, smoothing_objective};
use funkmeans::{fit_smoothing_spline, WeightedPoint};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

#[test]
fn banded_fit_matches_the_dense_oracle() {
    let mut rng = rng(10);
    for case in 0..60 {
        let m = rng.random_range(3..=12);
        let points = random_points(&mut rng, m);
        let lambda = [1e-3, 1.0, 1e3][case % 3];
        let fit = fit_smoothing_spline(&points, lambda, m).unwrap();
        let oracle = dense_fit(&points, lambda, m);
        assert!(rel_err(fit.values(), &oracle.values) < 1e-8, "case {case}");
        // The library's dense route agrees as well.
        let dense = fit_values_dense(&points, lambda, m).unwrap();
        assert!(rel_err(&dense, &oracle.values) < 1e-8, "case {case}");
    }
}

#[test]
fn evaluation_matches_the_oracle_between_knots() {
    let mut rng = rng(11);
    for _ in 0..20 {
        let points = random_points(&mut rng, 8);
        let fit = fit_smoothing_spline(&points, 0.5, 8).unwrap();
        let oracle = dense_fit(&points, 0.5, 8);
        for i in 0..=120 {
            let t = -1.0 + i as f64 * 0.1;
            assert_relative_eq!(
                fit.evaluate(t),
                oracle.eval(t),
                epsilon = 1e-8,
                max_relative = 1e-8
            );
        }
    }
}

#[test]
fn perturbing_the_fit_never_lowers_the_objective() {
    let mut rng = rng(12);
    for case in 0..25 {
        let m = rng.random_range(3..=12);
        let points = random_points(&mut rng, m);
        let lambda = [1e-3, 1.0, 1e3][case % 3];
        let fit = fit_smoothing_spline(&points, lambda, m).unwrap();
        let base = oracle_objective(&points, fit.values(), lambda, m);
        for _ in 0..100 {
            let dir: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            let g: Vec<f64> = fit
                .values()
                .iter()
                .zip(&dir)
                .map(|(v, d)| v + 1e-3 * d / norm)
                .collect();
            assert!(oracle_objective(&points, &g, lambda, m) >= base - 1e-12);
        }
    }
}

#[test]
fn bending_energy_is_the_quadrature_of_the_second_derivative() {
    let mut rng = rng(13);
    for _ in 0..25 {
        let m = rng.random_range(3..=12);
        let points = random_points(&mut rng, m);
        let fit = fit_smoothing_spline(&points, rng.random_range(1e-3..10.0), m).unwrap();
        let quad = piecewise_simpson_bending(fit.knots(), |t| fit.second_derivative(t));
        assert_relative_eq!(fit.bending_energy(), quad, max_relative = 1e-10);
    }
    // Interpolant of (0,0), (1,1), (2,0): γ = −3, energy 6.
    let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)].map(|(t, z)| WeightedPoint::new(t, z, 1.0));
    let fit = fit_smoothing_spline(&pts, 0.0, 3).unwrap();
    let quad = piecewise_simpson_bending(fit.knots(), |t| fit.second_derivative(t));
    assert_relative_eq!(fit.bending_energy(), quad, max_relative = 1e-10);
    assert_relative_eq!(fit.bending_energy(), 6.0, max_relative = 1e-12);
}

#[test]
fn penalty_quadratic_form_matches_the_gram_matrix() {
    let mut rng = rng(14);
    for _ in 0..20 {
        let points = random_points(&mut rng, 9);
        let fit = fit_smoothing_spline(&points, 0.2, 9).unwrap();
        let g = nalgebra::DVector::from_column_slice(fit.values());
        let gram = (g.transpose() * bending_gram(fit.knots()) * &g)[(0, 0)];
        let pen = build_penalty(fit.knots()).unwrap();
        assert_relative_eq!(
            pen.r_quadratic_form(fit.second_derivs()),
            gram,
            max_relative = 1e-9
        );
    }
}

#[test]
fn huge_penalty_gives_the_least_squares_line() {
    let mut rng = rng(15);
    for _ in 0..10 {
        // Abscissae in [0, 1].
        let pts: Vec<WeightedPoint> = random_points(&mut rng, 5)
            .into_iter()
            .map(|p| WeightedPoint::new(p.t / 10.0, p.z, 1.0))
            .collect();
        let n = pts.len() as f64;
        let (mt, mz) = (
            pts.iter().map(|p| p.t).sum::<f64>() / n,
            pts.iter().map(|p| p.z).sum::<f64>() / n,
        );
        let sxy: f64 = pts.iter().map(|p| (p.t - mt) * (p.z - mz)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.t - mt).powi(2)).sum();
        let slope = sxy / sxx;
        let fit = fit_smoothing_spline(&pts, 1e6, 5).unwrap();
        for (t, v) in fit.knots().iter().zip(fit.values()) {
            assert!((v - (mz + slope * (t - mt))).abs() < 1e-6);
        }
    }
}

#[test]
fn tiny_penalty_interpolates() {
    let mut rng = rng(16);
    for _ in 0..10 {
        let pts = random_points(&mut rng, 5);
        let fit = fit_smoothing_spline(&pts, 1e-12, 5).unwrap();
        for p in &pts {
            assert!((fit.evaluate(p.t) - p.z).abs() < 1e-6);
        }
    }
}

#[test]
fn cubic_interpolant_matches_the_textbook_construction() {
    let x = [0.0, 1.0, 2.0, 3.0];
    let y = x.map(|t: f64| t.powi(3));
    let pts: Vec<WeightedPoint> = x
        .iter()
        .zip(&y)
        .map(|(&t, &z)| WeightedPoint::new(t, z, 1.0))
        .collect();
    let fit = fit_smoothing_spline(&pts, 0.0, 4).unwrap();
    let m2 = natural_second_derivs(&x, &y);
    let expect = natural_eval(&x, &y, &m2, 1.5);
    assert!((fit.evaluate(1.5) - expect).abs() < 1e-12);
    // Natural end conditions make it differ from t³ itself.
    assert!((expect - 3.375).abs() > 1e-3);
}

#[test]
fn small_fits_and_line_evaluation() {
    let one = fit_smoothing_spline(&[WeightedPoint::new(2.0, 5.0, 1.0)], 3.0, 1).unwrap();
    assert_eq!(one.evaluate(-7.0), 5.0);
    assert_eq!(one.bending_energy(), 0.0);
    let line = fit_smoothing_spline(
        &[
            WeightedPoint::new(0.0, 0.0, 1.0),
            WeightedPoint::new(1.0, 1.0, 1.0),
        ],
        100.0,
        2,
    )
    .unwrap();
    assert_eq!(line.evaluate(0.5), 0.5);
    assert_eq!(line.evaluate(3.0), 3.0);
    assert_eq!(line.bending_energy(), 0.0);
}

#[test]
fn duplicates_fit_like_their_weighted_mean() {
    let pts = vec![
        WeightedPoint::new(0.0, 1.0, 1.0),
        WeightedPoint::new(1.0, 2.0, 1.0),
        WeightedPoint::new(1.0, 4.0, 1.0),
        WeightedPoint::new(2.5, 0.0, 1.0),
        WeightedPoint::new(4.0, 1.0, 1.0),
    ];
    let merged = vec![
        WeightedPoint::new(0.0, 1.0, 1.0),
        WeightedPoint::new(1.0, 3.0, 2.0),
        WeightedPoint::new(2.5, 0.0, 1.0),
        WeightedPoint::new(4.0, 1.0, 1.0),
    ];
    let a = fit_smoothing_spline(&pts, 0.1, 5).unwrap();
    let b = fit_smoothing_spline(&merged, 0.1, 5).unwrap();
    assert_eq!(a.knots(), b.knots());
    assert!(rel_err(a.values(), b.values()) < 1e-14);
    let oracle = dense_fit(&pts, 0.1, 5);
    assert!(rel_err(a.values(), &oracle.values) < 1e-8);
}

#[test]
fn penalty_and_residual_are_monotone_in_lambda() {
    let mut rng = rng(17);
    let pts = random_points(&mut rng, 10);
    let mut last: Option<(f64, f64)> = None;
    for e in -6..=6 {
        let lambda = 10f64.powi(e);
        let fit = fit_smoothing_spline(&pts, lambda, 10).unwrap();
        let rss: f64 = pts
            .iter()
            .map(|p| p.w * (p.z - fit.evaluate(p.t)).powi(2))
            .sum();
        let bend = fit.bending_energy();
        if let Some((b0, r0)) = last {
            assert!(bend <= b0 * (1.0 + 1e-9) + 1e-12, "λ = {lambda}");
            assert!(rss >= r0 * (1.0 - 1e-9) - 1e-12, "λ = {lambda}");
        }
        last = Some((bend, rss));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_line_shifts_the_fit_by_that_line(
        seed in any::<u64>(),
        a in -50.0..50.0f64,
        b in -10.0..10.0f64,
        lambda in 1e-3..1e2f64,
    ) {
        let pts = random_points(&mut common::rng(seed), 8);
        let shifted: Vec<WeightedPoint> = pts
            .iter()
            .map(|p| WeightedPoint::new(p.t, p.z + a + b * p.t, p.w))
            .collect();
        let f = fit_smoothing_spline(&pts, lambda, 8).unwrap();
        let g = fit_smoothing_spline(&shifted, lambda, 8).unwrap();
        for t in [-1.0, 0.0, 2.5, 5.0, 7.7, 10.0, 11.0] {
            prop_assert!((g.evaluate(t) - f.evaluate(t) - (a + b * t)).abs() < 1e-9 * (1.0 + a.abs() + b.abs() * 11.0));
        }
        prop_assert!((g.bending_energy() - f.bending_energy()).abs() <= 1e-9 * (1.0 + f.bending_energy()));
    }

    #[test]
    fn objective_at_the_fit_is_below_the_oracle_objective_of_any_spline(
        seed in any::<u64>(),
        lambda in 1e-3..1e3f64,
    ) {
        let mut r = common::rng(seed);
        let pts = random_points(&mut r, 7);
        let fit = fit_smoothing_spline(&pts, lambda, 7).unwrap();
        let at_fit = smoothing_objective(&fit, &pts, lambda, 7);
        prop_assert!((at_fit - oracle_objective(&pts, fit.values(), lambda, 7)).abs() < 1e-9 * (1.0 + at_fit));
        let other: Vec<f64> = (0..7).map(|_| r.random_range(-5.0..5.0)).collect();
        prop_assert!(oracle_objective(&pts, &other, lambda, 7) >= at_fit - 1e-12);
    }

    #[test]
    fn extrapolation_is_linear(seed in any::<u64>()) {
        let pts = random_points(&mut common::rng(seed), 6);
        let fit = fit_smoothing_spline(&pts, 0.3, 6).unwrap();
        let last = *fit.knots().last().unwrap();
        let first = fit.knots()[0];
        prop_assert_eq!(fit.second_derivative(last + 3.0), 0.0);
        let d = fit.derivative(last);
        prop_assert!((fit.evaluate(last + 2.0) - fit.evaluate(last) - 2.0 * d).abs() < 1e-9);
        let d0 = fit.derivative(first);
        prop_assert!((fit.evaluate(first - 1.5) - fit.evaluate(first) + 1.5 * d0).abs() < 1e-9);
    }
}
