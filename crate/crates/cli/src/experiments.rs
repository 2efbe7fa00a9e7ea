//! Typed experiment plans. Building a plan parses and validates every
//! parameter; running it does the work and returns a table.

use funkmeans::assoc::{
    adaptive_trial_count, crossing_sweep, monte_carlo_suite, AssocConfig, CrossingConfig, GenModel,
    TruncatedNormal,
};
use funkmeans::fourier::{empirical_penalty_mc, expected_penalty, PeriodicProblem};
use funkmeans::spline::{dense::fit_values_dense, smoothing_objective};
use funkmeans::stats::Summary;
use funkmeans::tracking::{
    generate_pulses, reference_tracks, subsample_experiment, SensorNet, SubsampleConfig,
};
use funkmeans::trajectory::simpson;
use funkmeans::{fit_smoothing_spline, rng, WeightedPoint};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::CliError;

/// A CSV table: header and rows of already formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone)]
pub enum Plan {
    Assoc {
        config: AssocConfig,
        sizes: Vec<usize>,
        trials: usize,
    },
    Crossing {
        config: CrossingConfig,
        grid: Vec<f64>,
        trials: usize,
        adaptive: Option<(usize, usize)>,
    },
    Fourier {
        problems: Vec<PeriodicProblem>,
        trials: usize,
    },
    Tracking {
        net: SensorNet,
        config: SubsampleConfig,
    },
    SplineCheck {
        instances: usize,
        max_points: usize,
        lambdas: Vec<f64>,
        perturbations: usize,
    },
}

fn invalid(e: funkmeans::Error) -> CliError {
    CliError::Invalid(e)
}

/// `start, start + step, …` up to `stop`, rounded to nine decimals so the
/// grid prints cleanly.
pub fn window_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

impl Plan {
    pub fn build(c: &ExperimentConfig) -> Result<Self, CliError> {
        match c.command.name {
            "assoc" => {
                let sizes: Vec<usize> = c.get_list("n")?;
                c.require("n", sizes.iter().all(|&n| n > 0), "sizes must be positive")?;
                let trials: usize = c.get("trials")?;
                c.require("trials", trials > 0, "must be at least 1")?;
                let starts: usize = c.get("starts")?;
                c.require("starts", starts > 0, "must be at least 1")?;
                let lambda: f64 = c.get("lambda")?;
                c.require(
                    "lambda",
                    lambda >= 0.0 && lambda.is_finite(),
                    "must be finite and >= 0",
                )?;
                let max_iter: usize = c.get("max_iter")?;
                c.require("max_iter", max_iter > 0, "must be at least 1")?;
                let eta_nodes: usize = c.get("eta_nodes")?;
                c.require(
                    "eta_nodes",
                    eta_nodes >= 3 && !eta_nodes.is_multiple_of(2),
                    "must be odd and >= 3",
                )?;
                let t_max: f64 = c.get("t_max")?;
                c.require(
                    "t_max",
                    t_max > 0.0 && t_max.is_finite(),
                    "must be positive",
                )?;
                let noise = TruncatedNormal::new(c.get("noise_variance")?, c.get("noise_bound")?)
                    .map_err(invalid)?;
                let config = AssocConfig {
                    lambda,
                    starts,
                    max_iter,
                    eta_nodes,
                    ..AssocConfig::new(GenModel::three_tracks_with(t_max, noise))
                };
                Ok(Plan::Assoc {
                    config,
                    sizes,
                    trials,
                })
            }
            "crossing" => {
                let n: usize = c.get("n")?;
                c.require("n", n >= 2, "must be at least 2")?;
                let trials: usize = c.get("trials")?;
                c.require("trials", trials > 0, "must be at least 1")?;
                let target: usize = c.get("adaptive_target")?;
                let cap: usize = c.get("adaptive_max")?;
                c.require("adaptive_max", target == 0 || cap > 0, "must be at least 1")?;
                let starts: usize = c.get("starts")?;
                c.require("starts", starts > 0, "must be at least 1")?;
                let lambda: f64 = c.get("lambda")?;
                c.require(
                    "lambda",
                    lambda >= 0.0 && lambda.is_finite(),
                    "must be finite and >= 0",
                )?;
                let max_iter: usize = c.get("max_iter")?;
                c.require("max_iter", max_iter > 0, "must be at least 1")?;
                let t_max: f64 = c.get("t_max")?;
                c.require(
                    "t_max",
                    t_max > 0.0 && t_max.is_finite(),
                    "must be positive",
                )?;
                let noise = TruncatedNormal::new(c.get("noise_variance")?, c.get("noise_bound")?)
                    .map_err(invalid)?;
                let config = CrossingConfig {
                    n,
                    lambda,
                    starts,
                    max_iter,
                    ..CrossingConfig::new(GenModel::crossing_tracks_with(t_max, noise))
                };
                let (lo, hi, step): (f64, f64, f64) = (
                    c.get("t_fit_min")?,
                    c.get("t_fit_max")?,
                    c.get("t_fit_step")?,
                );
                c.require(
                    "t_fit_step",
                    step > 0.0 && step.is_finite(),
                    "must be positive",
                )?;
                c.require(
                    "t_fit_max",
                    hi >= lo && hi <= t_max,
                    "must lie in [t_fit_min, t_max]",
                )?;
                let crossing = config.crossing_time().unwrap_or(f64::INFINITY);
                c.require(
                    "t_fit_min",
                    lo > crossing,
                    &format!("must exceed the crossing time {crossing}"),
                )?;
                Ok(Plan::Crossing {
                    config,
                    grid: window_grid(lo, hi, step),
                    trials,
                    adaptive: (target > 0).then_some((target, cap)),
                })
            }
            "fourier" => {
                let sizes: Vec<usize> = c.get_list("n")?;
                let lambdas: Vec<f64> = c.get_list("lambda")?;
                let ps: Vec<f64> = c.get_list("p")?;
                let sigma2: f64 = c.get("sigma2")?;
                let trials: usize = c.get("trials")?;
                c.require("trials", trials >= 2, "must be at least 2")?;
                let signal = c.raw("signal");
                c.require(
                    "signal",
                    matches!(signal, "zero" | "cosine"),
                    "must be `zero` or `cosine`",
                )?;
                let mut problems = Vec::new();
                for &n in &sizes {
                    for &lambda in &lambdas {
                        for &p in &ps {
                            let problem = if signal == "zero" {
                                PeriodicProblem::noise_only(n, lambda, p, sigma2)
                            } else {
                                PeriodicProblem::cosine(n, lambda, p, sigma2)
                            };
                            problems.push(problem.map_err(invalid)?);
                        }
                    }
                }
                Ok(Plan::Fourier { problems, trials })
            }
            "tracking" => {
                let net = SensorNet {
                    sigma: c.get("sigma")?,
                    nu: c.get("nu")?,
                    c: c.get("c")?,
                    tau: c.get("tau")?,
                    alpha: c.get("alpha")?,
                    beta: c.get("beta")?,
                    ..SensorNet::three_sensors(c.get("t_max")?)
                };
                net.validate().map_err(invalid)?;
                let fractions: Vec<f64> = c.get_list("fractions")?;
                c.require(
                    "fractions",
                    fractions.iter().all(|f| *f > 0.0 && *f <= 1.0),
                    "must lie in (0, 1]",
                )?;
                let config = SubsampleConfig {
                    fractions,
                    trials: c.get("trials")?,
                    starts: c.get("starts")?,
                    fit_starts: c.get("fit_starts")?,
                    max_iter: c.get("max_iter")?,
                    eta_nodes: c.get("eta_nodes")?,
                };
                c.require("trials", config.trials > 0, "must be at least 1")?;
                c.require("starts", config.starts > 0, "must be at least 1")?;
                c.require("fit_starts", config.fit_starts > 0, "must be at least 1")?;
                c.require("max_iter", config.max_iter > 0, "must be at least 1")?;
                c.require(
                    "eta_nodes",
                    config.eta_nodes >= 3 && !config.eta_nodes.is_multiple_of(2),
                    "must be odd and >= 3",
                )?;
                Ok(Plan::Tracking { net, config })
            }
            "spline-check" => {
                let instances: usize = c.get("instances")?;
                c.require("instances", instances > 0, "must be at least 1")?;
                let max_points: usize = c.get("max_points")?;
                c.require(
                    "max_points",
                    (3..=200).contains(&max_points),
                    "must lie in 3..=200",
                )?;
                let lambdas: Vec<f64> = c.get_list("lambda")?;
                c.require(
                    "lambda",
                    lambdas.iter().all(|l| *l > 0.0 && l.is_finite()),
                    "must be positive",
                )?;
                Ok(Plan::SplineCheck {
                    instances,
                    max_points,
                    lambdas,
                    perturbations: c.get("perturbations")?,
                })
            }
            other => unreachable!("unknown command {other}"),
        }
    }

    pub fn run(&self, seed: u64) -> Result<Table, funkmeans::Error> {
        match self {
            Plan::Assoc {
                config,
                sizes,
                trials,
            } => run_assoc(config, sizes, *trials, seed),
            Plan::Crossing {
                config,
                grid,
                trials,
                adaptive,
            } => {
                let trials = match adaptive {
                    Some((target, cap)) => adaptive_trial_count(
                        config,
                        *grid.last().expect("non-empty grid"),
                        *target,
                        *cap,
                        seed,
                    )?,
                    None => *trials,
                };
                let rows = crossing_sweep(config, grid, trials, seed)?
                    .into_iter()
                    .map(|cell| {
                        vec![
                            num(cell.t_fit),
                            cell.trials.to_string(),
                            num(cell.mean_delta_e),
                            num(cell.sd_delta_e),
                            num(cell.crossing_rate),
                        ]
                    })
                    .collect();
                Ok(Table {
                    header: vec![
                        "t_fit",
                        "trials",
                        "mean_delta_e",
                        "sd_delta_e",
                        "crossing_rate_pct",
                    ],
                    rows,
                })
            }
            Plan::Fourier { problems, trials } => {
                let rows = problems
                    .iter()
                    .enumerate()
                    .map(|(cell, problem)| {
                        let est = empirical_penalty_mc(
                            problem,
                            *trials,
                            rng::derive(seed, &[cell as u64]),
                        )?;
                        Ok(vec![
                            problem.n.to_string(),
                            num(problem.lambda),
                            num(problem.p),
                            num(expected_penalty(problem)?),
                            num(est.value),
                            num(est.std_error),
                            trials.to_string(),
                        ])
                    })
                    .collect::<Result<_, funkmeans::Error>>()?;
                Ok(Table {
                    header: vec![
                        "n",
                        "lambda",
                        "p",
                        "S_closed",
                        "S_mc_mean",
                        "S_mc_se",
                        "trials",
                    ],
                    rows,
                })
            }
            Plan::Tracking { net, config } => {
                let truth = reference_tracks();
                let (data, labels) = generate_pulses(&truth, net, &mut rng::stream(seed, &[0]))?;
                let rows = subsample_experiment(
                    &data,
                    &labels,
                    &truth,
                    net,
                    config,
                    rng::derive(seed, &[1]),
                )?
                .into_iter()
                .map(|r| {
                    vec![
                        num(r.fraction),
                        r.trial.to_string(),
                        num(r.eta),
                        num(r.accuracy),
                        r.iterations.to_string(),
                        num(r.energy),
                        r.converged.to_string(),
                    ]
                })
                .collect();
                Ok(Table {
                    header: vec![
                        "fraction",
                        "trial",
                        "eta",
                        "accuracy_pct",
                        "iterations",
                        "energy",
                        "converged",
                    ],
                    rows,
                })
            }
            Plan::SplineCheck {
                instances,
                max_points,
                lambdas,
                perturbations,
            } => {
                let rows = (0..*instances)
                    .map(|i| {
                        let lambda = lambdas[i % lambdas.len()];
                        spline_check_row(i, *max_points, lambda, *perturbations, seed)
                    })
                    .collect::<Result<_, funkmeans::Error>>()?;
                Ok(Table {
                    header: vec![
                        "instance",
                        "m",
                        "lambda",
                        "max_rel_err",
                        "penalty_rel_err",
                        "objective",
                        "min_perturbed_objective",
                        "pass",
                    ],
                    rows,
                })
            }
        }
    }
}

fn run_assoc(
    config: &AssocConfig,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Table, funkmeans::Error> {
    let cells = monte_carlo_suite(config, sizes, trials, seed)?;
    let mut rows = Vec::new();
    for cell in &cells {
        let below: Vec<f64> = cell
            .trials
            .iter()
            .map(|s| {
                if s.energy <= s.truth_energy {
                    100.0
                } else {
                    0.0
                }
            })
            .collect();
        for (name, s) in [
            ("eta", cell.eta()),
            ("energy", cell.energy()),
            ("truth_energy", cell.truth_energy()),
            ("accuracy_pct", cell.accuracy()),
            ("iterations", cell.iterations()),
            ("below_truth_pct", Summary::of(&below)),
        ] {
            rows.push(vec![
                cell.n.to_string(),
                name.to_string(),
                num(s.q05),
                num(s.q25),
                num(s.median),
                num(s.q75),
                num(s.q95),
                num(s.mean),
                num(s.sd),
            ]);
        }
    }
    Ok(Table {
        header: vec![
            "n",
            "statistic",
            "q05",
            "q25",
            "median",
            "q75",
            "q95",
            "mean",
            "sd",
        ],
        rows,
    })
}

/// Random points with abscissae in `[0, 10]` at least 0.05 apart.
fn random_instance(rng: &mut impl Rng, m: usize) -> Vec<WeightedPoint> {
    let mut t: Vec<f64> = Vec::with_capacity(m);
    while t.len() < m {
        let c = rng.random_range(0.0..10.0);
        if t.iter().all(|x| (x - c).abs() > 0.05) {
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

fn spline_check_row(
    instance: usize,
    max_points: usize,
    lambda: f64,
    perturbations: usize,
    seed: u64,
) -> Result<Vec<String>, funkmeans::Error> {
    let mut rng = rng::stream(seed, &[instance as u64]);
    let m = rng.random_range(3..=max_points);
    let points = random_instance(&mut rng, m);
    let fit = fit_smoothing_spline(&points, lambda, m)?;
    let dense = fit_values_dense(&points, lambda, m)?;
    let scale = dense.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let max_rel_err = fit
        .values()
        .iter()
        .zip(&dense)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / scale;
    let mut quad = 0.0;
    for w in fit.knots().windows(2) {
        quad += simpson(|t| fit.second_derivative(t).powi(2), w[0], w[1], 5)?;
    }
    let bending = fit.bending_energy();
    let penalty_rel_err = if quad == 0.0 {
        bending.abs()
    } else {
        (bending - quad).abs() / quad
    };
    let objective = smoothing_objective(&fit, &points, lambda, m);
    let mut min_perturbed = f64::INFINITY;
    for _ in 0..perturbations {
        let dir: Vec<f64> = (0..fit.knots().len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let moved: Vec<WeightedPoint> = fit
            .knots()
            .iter()
            .zip(fit.values())
            .zip(&dir)
            .map(|((&t, &v), d)| WeightedPoint::new(t, v + 1e-3 * d / norm, 1.0))
            .collect();
        let other = fit_smoothing_spline(&moved, 0.0, m)?;
        min_perturbed = min_perturbed.min(smoothing_objective(&other, &points, lambda, m));
    }
    let pass = max_rel_err < 1e-8 && penalty_rel_err < 1e-10 && min_perturbed >= objective - 1e-12;
    Ok(vec![
        instance.to_string(),
        m.to_string(),
        num(lambda),
        num(max_rel_err),
        num(penalty_rel_err),
        num(objective),
        num(min_perturbed),
        pass.to_string(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_grid_is_clean() {
        let g = window_grid(9.6, 11.0, 0.1);
        assert_eq!(g.len(), 15);
        assert_eq!(g[1], 9.7);
        assert_eq!(g[14], 11.0);
        assert_eq!(num(g[3]), "9.9");
        assert_eq!(window_grid(1.0, 1.0, 0.5), vec![1.0]);
    }
}
