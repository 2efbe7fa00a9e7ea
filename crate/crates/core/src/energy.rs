//! The k-means energy, its pointwise cost and the assignment step.
//!
//! For data `ξ_i = (t_i, z_i)` and centers `μ_1..μ_k` the energy is
//!
//! ```text
//! f_n(μ) = (1/n) Σ_i min_j |z_i − μ_j(t_i)|² + λ Σ_j ∫(μ_j″)²
//! ```
//!
//! The generic helpers ([`assign_by`], [`energy_by`]) take any cost
//! function and are shared with the tracking instantiation.

use crate::error::{Error, Result};
use crate::par;
use crate::rng::{self, StreamRng};
use crate::trajectory::{Penalized, Trajectory};

/// A `(time, value)` observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation2D {
    pub t: f64,
    pub z: f64,
}

impl Observation2D {
    pub fn new(t: f64, z: f64) -> Self {
        Self { t, z }
    }
}

/// Assignment of each observation to one of `k` clusters (0-based labels).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::NoCenters);
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::LabelOutOfRange { index, label, k });
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Indices of the observations in cluster `j`, ascending.
    pub fn members(&self, j: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == j).then_some(i))
            .collect()
    }

    pub(crate) fn set(&mut self, index: usize, label: usize) {
        debug_assert!(label < self.k);
        self.labels[index] = label;
    }

    /// Apply a relabeling `j ↦ perm[j]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self {
            labels: self.labels.iter().map(|&l| perm[l]).collect(),
            k: self.k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    /// Mean minimum cost over observations.
    pub data_term: f64,
    /// `λ Σ_j r(μ_j)`.
    pub reg_term: f64,
}

impl EnergyReport {
    pub fn new(data_term: f64, reg_term: f64) -> Self {
        Self {
            total: data_term + reg_term,
            data_term,
            reg_term,
        }
    }
}

/// `|z − μ(t)|²`.
pub fn pointwise_cost<C: Trajectory + ?Sized>(obs: &Observation2D, center: &C) -> f64 {
    let r = obs.z - center.eval(obs.t);
    r * r
}

/// Index and value of the cheapest center; ties go to the lowest index.
pub fn argmin_cost<O, C, F>(obs: &O, centers: &[C], cost: &F) -> (usize, f64)
where
    F: Fn(&O, &C) -> f64,
{
    let mut best = (0, cost(obs, &centers[0]));
    for (j, c) in centers.iter().enumerate().skip(1) {
        let v = cost(obs, c);
        if v < best.1 {
            best = (j, v);
        }
    }
    best
}

/// Assign each observation to its cheapest center under `cost`.
pub fn assign_by<O, C, F>(data: &[O], centers: &[C], cost: F) -> Result<Partition>
where
    O: Sync,
    C: Sync,
    F: Fn(&O, &C) -> f64 + Sync + Send,
{
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    let labels = par::map_slice(data, |o| argmin_cost(o, centers, &cost).0);
    Partition::new(labels, centers.len())
}

/// [`assign_by`] with the squared-residual cost.
pub fn assign_partition<C: Trajectory + Sync>(
    data: &[Observation2D],
    centers: &[C],
) -> Result<Partition> {
    assign_by(data, centers, |o, c| pointwise_cost(o, c))
}

/// Mean minimum cost plus a precomputed regularization term.
pub fn energy_by<O, C, F>(data: &[O], centers: &[C], cost: F, reg_term: f64) -> Result<EnergyReport>
where
    O: Sync,
    C: Sync,
    F: Fn(&O, &C) -> f64 + Sync + Send,
{
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    let mins = par::map_slice(data, |o| argmin_cost(o, centers, &cost).1);
    let data_term = mins.iter().sum::<f64>() / data.len() as f64;
    Ok(EnergyReport::new(data_term, reg_term))
}

/// The k-means energy `f_n` of spline-like centers.
pub fn kmeans_energy<C: Penalized + Sync>(
    data: &[Observation2D],
    centers: &[C],
    lambda: f64,
) -> Result<EnergyReport> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(crate::error::invalid("lambda", "must be finite and >= 0"));
    }
    let reg = lambda * centers.iter().map(Penalized::bending_energy).sum::<f64>();
    energy_by(data, centers, |o, c| pointwise_cost(o, c), reg)
}

/// A Monte Carlo estimate with the standard error of its random part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

const MC_BATCH: usize = 4096;

/// Monte Carlo estimate of the limit energy
/// `f_∞(μ) = E[min_j |z − μ_j(t)|²] + λ Σ_j ∫(μ_j″)²`,
/// drawing `n_mc` observations from `sample`.
///
/// Draws are made in fixed-size batches, batch `b` using stream `(seed, b)`.
pub fn limit_energy_mc<C, S>(
    centers: &[C],
    lambda: f64,
    n_mc: usize,
    seed: u64,
    sample: S,
) -> Result<McEstimate>
where
    C: Penalized + Sync,
    S: Fn(&mut StreamRng) -> Observation2D + Sync + Send,
{
    if n_mc < 2 {
        return Err(crate::error::invalid("n_mc", "need at least two draws"));
    }
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    let batches = n_mc.div_ceil(MC_BATCH);
    let cost = |o: &Observation2D, c: &C| pointwise_cost(o, c);
    let sums = par::map_range(batches, |b| {
        let mut rng = rng::stream(seed, &[b as u64]);
        let len = MC_BATCH.min(n_mc - b * MC_BATCH);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..len {
            let v = argmin_cost(&sample(&mut rng), centers, &cost).1;
            s += v;
            s2 += v * v;
        }
        (s, s2)
    });
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let n = n_mc as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    let reg = lambda * centers.iter().map(Penalized::bending_energy).sum::<f64>();
    Ok(McEstimate {
        value: mean + reg,
        std_error: (var / n).sqrt(),
    })
}
