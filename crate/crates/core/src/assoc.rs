//! Smoothing-data association experiments.
//!
//! Observations are drawn from a mixture of `k` polynomial trajectories on
//! `[0, T]` with bounded (truncated Gaussian) noise, then clustered with the
//! smoothing-spline k-means. This module holds the generative model, the
//! recovery metrics (trajectory error η and association accuracy), the
//! Monte Carlo suite over dataset sizes and the crossing-tracks study.

use itertools::Itertools;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::energy::{kmeans_energy, Observation2D, Partition};
use crate::error::{invalid, Error, Result};
use crate::lloyd::{lloyd_run, multistart, EmptyClusterPolicy, LloydConfig};
use crate::par;
use crate::rng;
use crate::spline::{
    fit_smoothing_spline, l2_distance, SplineCenter, SplineModel, WeightedPoint, DEFAULT_L2_NODES,
};
use crate::stats::{mean_sd, Summary};
use crate::trajectory::{Polynomial, Trajectory, WindowedPolynomial};

/// `N(0, variance)` conditioned on `|ε| ≤ bound`. An infinite bound means
/// no truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    pub variance: f64,
    pub bound: f64,
}

impl TruncatedNormal {
    pub fn new(variance: f64, bound: f64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(invalid("noise_variance", "must be finite and >= 0"));
        }
        if !(bound > 0.0) {
            return Err(invalid("noise_bound", "must be positive"));
        }
        Ok(Self { variance, bound })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_truncated_normal(self.variance, self.bound, rng)
    }
}

/// One draw by rejection from `N(0, variance)` restricted to `[−bound, bound]`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(variance: f64, bound: f64, rng: &mut R) -> f64 {
    if variance == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite positive sd");
    loop {
        let e = normal.sample(rng);
        if e.abs() <= bound {
            return e;
        }
    }
}

/// Mixture of polynomial trajectories observed with additive noise at
/// uniformly distributed times.
#[derive(Debug, Clone, PartialEq)]
pub struct GenModel {
    pub t_max: f64,
    pub trajectories: Vec<Polynomial>,
    pub weights: Vec<f64>,
    pub noise: TruncatedNormal,
}

impl GenModel {
    /// Equally weighted mixture.
    pub fn new(t_max: f64, trajectories: Vec<Polynomial>, noise: TruncatedNormal) -> Result<Self> {
        let k = trajectories.len();
        Self::with_weights(t_max, trajectories, vec![1.0 / k as f64; k], noise)
    }

    pub fn with_weights(
        t_max: f64,
        trajectories: Vec<Polynomial>,
        weights: Vec<f64>,
        noise: TruncatedNormal,
    ) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(invalid("trajectories", "need at least one"));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(invalid("t_max", "must be positive and finite"));
        }
        if weights.len() != trajectories.len() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(invalid("weights", "one positive weight per trajectory"));
        }
        if (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("weights", "must sum to one"));
        }
        Ok(Self {
            t_max,
            trajectories,
            weights,
            noise,
        })
    }

    /// Three tracks on `[0, 10]`: `−15 − 2t + 0.2t²`, `5 + t` and `40`,
    /// with noise of variance 5 truncated at ±100.
    pub fn three_tracks() -> Self {
        Self::three_tracks_with(
            10.0,
            TruncatedNormal {
                variance: 5.0,
                bound: 100.0,
            },
        )
    }

    pub fn three_tracks_with(t_max: f64, noise: TruncatedNormal) -> Self {
        Self::new(
            t_max,
            vec![
                Polynomial::new(vec![-15.0, -2.0, 0.2]),
                Polynomial::new(vec![5.0, 1.0]),
                Polynomial::constant(40.0),
            ],
            noise,
        )
        .expect("valid built-in model")
    }

    /// Two crossing tracks on `[0, 11]`: `−20 + t²` and `20 + 4t`, with
    /// untruncated noise of variance 5.
    pub fn crossing_tracks() -> Self {
        Self::crossing_tracks_with(
            11.0,
            TruncatedNormal {
                variance: 5.0,
                bound: f64::INFINITY,
            },
        )
    }

    pub fn crossing_tracks_with(t_max: f64, noise: TruncatedNormal) -> Self {
        Self::new(
            t_max,
            vec![
                Polynomial::new(vec![-20.0, 0.0, 1.0]),
                Polynomial::new(vec![20.0, 4.0]),
            ],
            noise,
        )
        .expect("valid built-in model")
    }

    pub fn k(&self) -> usize {
        self.trajectories.len()
    }

    fn draw_label<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (j, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return j;
            }
        }
        self.k() - 1
    }

    /// One observation from trajectory `j`.
    pub fn sample_from<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> Observation2D {
        let t = rng.random_range(0.0..=self.t_max);
        let z = self.trajectories[j].eval(t) + self.noise.sample(rng);
        Observation2D::new(t, z)
    }

    /// One labeled observation from the mixture.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> (Observation2D, usize) {
        let j = self.draw_label(rng);
        (self.sample_from(j, rng), j)
    }

    /// The true trajectories projected onto spline centers: trajectory `j`
    /// is interpolated by a natural cubic spline at the times of the
    /// observations carrying label `j` (a constant if there are none).
    pub fn projected_truth(
        &self,
        data: &[Observation2D],
        labels: &[usize],
    ) -> Result<Vec<SplineCenter>> {
        (0..self.k())
            .map(|j| {
                let mut pts: Vec<WeightedPoint> = data
                    .iter()
                    .zip(labels)
                    .filter(|(_, &l)| l == j)
                    .map(|(o, _)| WeightedPoint::new(o.t, self.trajectories[j].eval(o.t), 1.0))
                    .collect();
                if pts.is_empty() {
                    pts.push(WeightedPoint::new(0.0, self.trajectories[j].eval(0.0), 1.0));
                }
                fit_smoothing_spline(&pts, 0.0, data.len().max(1))
            })
            .collect()
    }

    /// The true trajectories, with bending energy measured over `[0, T]`.
    pub fn truth_centers(&self) -> Vec<WindowedPolynomial> {
        self.trajectories
            .iter()
            .map(|p| WindowedPolynomial {
                poly: p.clone(),
                start: 0.0,
                end: self.t_max,
            })
            .collect()
    }
}

/// `n` labeled observations from the mixture.
pub fn sample_dataset<R: Rng + ?Sized>(
    model: &GenModel,
    n: usize,
    rng: &mut R,
) -> (Vec<Observation2D>, Vec<usize>) {
    (0..n).map(|_| model.sample_one(rng)).unzip()
}

/// Exactly `per_track` observations from each trajectory, track by track.
pub fn sample_dataset_balanced<R: Rng + ?Sized>(
    model: &GenModel,
    per_track: usize,
    rng: &mut R,
) -> (Vec<Observation2D>, Vec<usize>) {
    (0..model.k())
        .flat_map(|j| (0..per_track).map(move |_| j))
        .map(|j| (model.sample_from(j, rng), j))
        .unzip()
}

/// `η = (1/k) √(Σ_j ‖μ_{π(j)} − x^j‖²_{L²[0,T]})`, minimized over label
/// permutations `π`.
pub fn eta_metric<C: Trajectory>(centers: &[C], model: &GenModel, nodes: usize) -> Result<f64> {
    let k = model.k();
    if centers.len() != k {
        return Err(Error::CenterCount {
            expected: k,
            got: centers.len(),
        });
    }
    // Pairwise squared distances, then the cheapest matching.
    let mut d2 = vec![vec![0.0; k]; k];
    for (a, c) in centers.iter().enumerate() {
        for (b, x) in model.trajectories.iter().enumerate() {
            d2[a][b] = l2_distance(c, x, 0.0, model.t_max, nodes)?.powi(2);
        }
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| perm.iter().enumerate().map(|(b, &a)| d2[a][b]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(best.sqrt() / k as f64)
}

/// Percentage of matching labels, maximized over relabelings of `estimate`.
pub fn association_accuracy(estimate: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::PartitionLength {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if estimate.is_empty() {
        return Err(Error::EmptyData);
    }
    // Contingency table, then the best permutation of its columns.
    let mut table = vec![vec![0usize; k]; k];
    for (&e, &t) in estimate.iter().zip(truth) {
        if e >= k || t >= k {
            return Err(Error::LabelOutOfRange {
                index: 0,
                label: e.max(t),
                k,
            });
        }
        table[e][t] += 1;
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(e, &t)| table[e][t])
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0);
    Ok(100.0 * best as f64 / estimate.len() as f64)
}

/// Fixed settings of an association experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocConfig {
    pub model: GenModel,
    pub lambda: f64,
    pub starts: usize,
    pub max_iter: usize,
    pub eta_nodes: usize,
}

impl AssocConfig {
    pub fn new(model: GenModel) -> Self {
        Self {
            model,
            lambda: 1.0,
            starts: 10,
            max_iter: 100,
            eta_nodes: DEFAULT_L2_NODES,
        }
    }

    fn lloyd(&self, seed: u64) -> LloydConfig {
        LloydConfig {
            k: self.model.k(),
            max_iter: self.max_iter,
            empty_cluster_policy: EmptyClusterPolicy::ReseedFarthest,
            seed,
        }
    }
}

/// Outcome of one association trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub eta: f64,
    /// Minimum energy found, `θ̂_n`.
    pub energy: f64,
    pub accuracy: f64,
    pub iterations: usize,
    /// `f_n` at the generating trajectories.
    pub truth_energy: f64,
}

/// Simulate `n` observations and cluster them with multistart k-means.
pub fn run_trial(config: &AssocConfig, n: usize, seed: u64) -> Result<TrialStats> {
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let mut rng = rng::stream(seed, &[0]);
    let (data, labels) = sample_dataset(&config.model, n, &mut rng);
    let model = SplineModel {
        lambda: config.lambda,
    };
    let fit = multistart(&model, &data, &config.lloyd(seed), config.starts)?;
    let truth = config.model.projected_truth(&data, &labels)?;
    let truth_energy = kmeans_energy(&data, &truth, config.lambda)?.total;
    Ok(TrialStats {
        eta: eta_metric(&fit.centers, &config.model, config.eta_nodes)?,
        energy: fit.energy.total,
        accuracy: association_accuracy(fit.partition.labels(), &labels, config.model.k())?,
        iterations: fit.iterations,
        truth_energy,
    })
}

/// All trials of one dataset size.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCell {
    pub n: usize,
    pub trials: Vec<TrialStats>,
}

impl SuiteCell {
    pub fn eta(&self) -> Summary {
        Summary::of(&self.collect(|s| s.eta))
    }

    pub fn energy(&self) -> Summary {
        Summary::of(&self.collect(|s| s.energy))
    }

    pub fn accuracy(&self) -> Summary {
        Summary::of(&self.collect(|s| s.accuracy))
    }

    pub fn iterations(&self) -> Summary {
        Summary::of(&self.collect(|s| s.iterations as f64))
    }

    pub fn truth_energy(&self) -> Summary {
        Summary::of(&self.collect(|s| s.truth_energy))
    }

    /// Fraction of trials whose minimum is at or below the truth's energy.
    pub fn below_truth_fraction(&self) -> f64 {
        let hits = self
            .trials
            .iter()
            .filter(|s| s.energy <= s.truth_energy)
            .count();
        hits as f64 / self.trials.len() as f64
    }

    fn collect(&self, f: impl Fn(&TrialStats) -> f64) -> Vec<f64> {
        self.trials.iter().map(f).collect()
    }
}

/// `trials` independent trials for each dataset size in `grid`. Trial `i`
/// of cell `c` is seeded with `(master_seed, c, i)`.
pub fn monte_carlo_suite(
    config: &AssocConfig,
    grid: &[usize],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SuiteCell>> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    grid.iter()
        .enumerate()
        .map(|(c, &n)| {
            let stats = par::map_range(trials, |i| {
                run_trial(config, n, rng::derive(master_seed, &[c as u64, i as u64]))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            Ok(SuiteCell { n, trials: stats })
        })
        .collect()
}

/// Settings of the crossing-tracks study.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingConfig {
    pub model: GenModel,
    /// Total observations over `[0, model.t_max]`, split evenly per track.
    pub n: usize,
    pub lambda: f64,
    /// Lloyd runs from random partitions whose best result decides which
    /// hypothesis was found.
    pub starts: usize,
    pub max_iter: usize,
}

impl CrossingConfig {
    pub fn new(model: GenModel) -> Self {
        Self {
            model,
            n: 220,
            lambda: 1.0,
            starts: 1,
            max_iter: 100,
        }
    }

    /// First time in `[0, T]` at which the first two trajectories meet.
    pub fn crossing_time(&self) -> Option<f64> {
        let t = &self.model.trajectories;
        t.first()?
            .sub(t.get(1)?)
            .first_root_in(0.0, self.model.t_max)
    }
}

/// Outcome of one crossing trial at one observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOutcome {
    /// `E_c = f_n(μ_c)/T` from the true association.
    pub e_crossing: f64,
    /// `E_nc = f_n(μ_nc)/T` from the association swapped after the crossing.
    pub e_non_crossing: f64,
    pub delta_e: f64,
    /// Whether the multistart solution sides with the crossing hypothesis.
    pub found_crossing: bool,
}

/// Generate data on `[0, T_max]`, keep `t ≤ t_fit`, and compare the
/// crossing and non-crossing local minima.
pub fn crossing_trial(config: &CrossingConfig, t_fit: f64, seed: u64) -> Result<CrossingOutcome> {
    if config.model.k() != 2 {
        return Err(invalid(
            "model",
            "crossing study needs exactly two trajectories",
        ));
    }
    let t_cross = config
        .crossing_time()
        .ok_or_else(|| invalid("model", "trajectories do not cross"))?;
    if !(t_fit > t_cross) {
        return Err(invalid("t_fit", "must lie after the crossing"));
    }
    let mut rng = rng::stream(seed, &[0]);
    let (all, all_labels) = sample_dataset_balanced(&config.model, config.n / 2, &mut rng);
    let (data, crossing): (Vec<Observation2D>, Vec<usize>) = all
        .into_iter()
        .zip(all_labels)
        .filter(|(o, _)| o.t <= t_fit)
        .unzip();
    let non_crossing: Vec<usize> = data
        .iter()
        .zip(&crossing)
        .map(|(o, &l)| if o.t > t_cross { 1 - l } else { l })
        .collect();

    let model = SplineModel {
        lambda: config.lambda,
    };
    let lloyd = LloydConfig {
        k: 2,
        max_iter: config.max_iter,
        empty_cluster_policy: EmptyClusterPolicy::ReseedFarthest,
        seed,
    };
    let e_c = lloyd_run(&model, &data, &lloyd, Partition::new(crossing.clone(), 2)?)?
        .energy
        .total
        / t_fit;
    let e_nc = lloyd_run(
        &model,
        &data,
        &lloyd,
        Partition::new(non_crossing.clone(), 2)?,
    )?
    .energy
    .total
        / t_fit;
    let best = multistart(&model, &data, &lloyd, config.starts)?;
    let acc_c = association_accuracy(best.partition.labels(), &crossing, 2)?;
    let acc_nc = association_accuracy(best.partition.labels(), &non_crossing, 2)?;
    Ok(CrossingOutcome {
        e_crossing: e_c,
        e_non_crossing: e_nc,
        delta_e: e_c - e_nc,
        found_crossing: acc_c > acc_nc,
    })
}

/// Aggregate over trials at one window `t_fit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingCell {
    pub t_fit: f64,
    pub trials: usize,
    pub mean_delta_e: f64,
    pub sd_delta_e: f64,
    /// Percentage of trials whose multistart solution crossed.
    pub crossing_rate: f64,
}

/// Crossing trials over a grid of windows. Trial `i` uses the same dataset
/// (seed `(master_seed, i)`) at every window, so the windows differ only in
/// how much of it is kept.
pub fn crossing_sweep(
    config: &CrossingConfig,
    t_grid: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<CrossingCell>> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    t_grid
        .iter()
        .map(|&t_fit| {
            let outcomes = par::map_range(trials, |i| {
                crossing_trial(config, t_fit, rng::derive(master_seed, &[i as u64]))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let deltas: Vec<f64> = outcomes.iter().map(|o| o.delta_e).collect();
            let (mean, sd) = mean_sd(&deltas);
            let hits = outcomes.iter().filter(|o| o.found_crossing).count();
            Ok(CrossingCell {
                t_fit,
                trials,
                mean_delta_e: mean,
                sd_delta_e: sd,
                crossing_rate: 100.0 * hits as f64 / trials as f64,
            })
        })
        .collect()
}

/// Pre-run used to size a crossing study: run trials until at least
/// `target` crossing and `target` non-crossing outputs have been seen (or
/// `max_trials` is reached), then return `10 (N_c + N_nc)`.
pub fn adaptive_trial_count(
    config: &CrossingConfig,
    t_fit: f64,
    target: usize,
    max_trials: usize,
    master_seed: u64,
) -> Result<usize> {
    let (mut n_c, mut n_nc) = (0usize, 0usize);
    let mut i = 0u64;
    while n_c.min(n_nc) < target && (i as usize) < max_trials {
        let out = crossing_trial(config, t_fit, rng::derive(master_seed, &[u64::MAX, i]))?;
        if out.found_crossing {
            n_c += 1;
        } else {
            n_nc += 1;
        }
        i += 1;
    }
    Ok(10 * (n_c + n_nc))
}
