//! Alternating-minimization k-means engine.
//!
//! Starting from a partition, the engine refits every cluster's center
//! independently, reassigns each observation to its cheapest center, and
//! stops once the partition no longer changes. The engine is generic over a
//! [`ClusterModel`], which supplies the cost, the per-cluster fit and the
//! per-center penalty.

use rand::Rng;

use crate::energy::{assign_by, energy_by, EnergyReport, Partition};
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::rng::{self, StreamRng};

/// Cost, center fit and penalty for one k-means instantiation.
pub trait ClusterModel: Sync {
    type Obs: Sync;
    type Center: Clone + Send + Sync;

    fn cost(&self, obs: &Self::Obs, center: &Self::Center) -> f64;

    /// Minimize `(1/n_total) Σ cost + penalty` over the members of one
    /// cluster. `previous` is that cluster's center from the last iteration,
    /// if any; iterative fitters should never return something worse.
    fn fit(
        &self,
        members: &[&Self::Obs],
        n_total: usize,
        previous: Option<&Self::Center>,
        rng: &mut StreamRng,
    ) -> Result<Self::Center>;

    /// Regularization `λ r(μ)` of one center.
    fn penalty(&self, _center: &Self::Center) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyClusterPolicy {
    /// Move the worst-fitted observation (from a cluster with at least two
    /// members) into the empty cluster.
    #[default]
    ReseedFarthest,
    DropError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LloydConfig {
    pub k: usize,
    pub max_iter: usize,
    pub empty_cluster_policy: EmptyClusterPolicy,
    pub seed: u64,
}

impl LloydConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            max_iter: 100,
            empty_cluster_policy: EmptyClusterPolicy::default(),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k", "must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }

    /// Seed of the `start`-th multistart run.
    pub fn start_seed(&self, start: usize) -> u64 {
        rng::derive(self.seed, &[start as u64])
    }
}

#[derive(Debug, Clone)]
pub struct FitResult<C> {
    pub centers: Vec<C>,
    pub partition: Partition,
    pub energy: EnergyReport,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every half-step: `f(μ^r, φ^r)` then `f(μ^r, φ^{r+1})`.
    pub energy_trace: Vec<f64>,
}

/// Uniformly random partition of `n` observations into `k` clusters.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    let mut rng = rng::stream(seed, &[INIT_STREAM]);
    Partition::new((0..n).map(|_| rng.random_range(0..k)).collect(), k)
}

const INIT_STREAM: u64 = 0x1417;
const FIT_STREAM: u64 = 0xF17;

fn partition_energy<M: ClusterModel>(
    model: &M,
    data: &[M::Obs],
    centers: &[M::Center],
    partition: &Partition,
) -> f64 {
    let data_term = partition
        .labels()
        .iter()
        .zip(data)
        .map(|(&j, o)| model.cost(o, &centers[j]))
        .sum::<f64>()
        / data.len() as f64;
    data_term + centers.iter().map(|c| model.penalty(c)).sum::<f64>()
}

fn fit_cluster<M: ClusterModel>(
    model: &M,
    data: &[M::Obs],
    partition: &Partition,
    j: usize,
    previous: Option<&M::Center>,
    seed: u64,
    iteration: usize,
) -> Result<M::Center> {
    let members: Vec<&M::Obs> = partition.members(j).into_iter().map(|i| &data[i]).collect();
    let mut rng = rng::stream(seed, &[FIT_STREAM, iteration as u64, j as u64]);
    model.fit(&members, data.len(), previous, &mut rng)
}

/// Refit all centers for `partition`, filling empty clusters per policy.
fn refit<M: ClusterModel>(
    model: &M,
    data: &[M::Obs],
    partition: &mut Partition,
    previous: Option<&[M::Center]>,
    config: &LloydConfig,
    iteration: usize,
) -> Result<Vec<M::Center>> {
    let k = config.k;
    let mut sizes = partition.cluster_sizes();
    if let Some(j) = sizes.iter().position(|&s| s == 0) {
        if config.empty_cluster_policy == EmptyClusterPolicy::DropError {
            return Err(Error::EmptyCluster(j));
        }
    }
    let mut centers: Vec<Option<M::Center>> = par::map_range(k, |j| {
        if sizes[j] == 0 {
            return Ok(None);
        }
        let prev = previous.map(|p| &p[j]);
        fit_cluster(model, data, partition, j, prev, config.seed, iteration).map(Some)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let mut donor: Option<(usize, f64)> = None;
        for (i, (&j, o)) in partition.labels().iter().zip(data).enumerate() {
            if sizes[j] < 2 {
                continue;
            }
            let c = model.cost(o, centers[j].as_ref().expect("non-empty cluster is fitted"));
            if donor.is_none_or(|(_, best)| c > best) {
                donor = Some((i, c));
            }
        }
        let (i, _) = donor.ok_or(Error::EmptyCluster(empty))?;
        let from = partition.labels()[i];
        partition.set(i, empty);
        sizes[from] -= 1;
        sizes[empty] += 1;
        for j in [from, empty] {
            let prev = previous.map(|p| &p[j]);
            centers[j] = Some(fit_cluster(
                model,
                data,
                partition,
                j,
                prev,
                config.seed,
                iteration,
            )?);
        }
    }
    Ok(centers
        .into_iter()
        .map(|c| c.expect("all clusters fitted"))
        .collect())
}

/// Run the alternating minimization from `initial` until the partition is a
/// fixed point or `config.max_iter` refits have been made.
pub fn lloyd_run<M: ClusterModel>(
    model: &M,
    data: &[M::Obs],
    config: &LloydConfig,
    initial: Partition,
) -> Result<FitResult<M::Center>> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if initial.len() != data.len() {
        return Err(Error::PartitionLength {
            expected: data.len(),
            got: initial.len(),
        });
    }
    if initial.k() != config.k {
        return Err(invalid("initial_partition", "cluster count differs from k"));
    }
    if data.len() < config.k {
        return Err(invalid("k", "more clusters than observations"));
    }

    let cost = |o: &M::Obs, c: &M::Center| model.cost(o, c);
    let mut partition = initial;
    let mut previous: Option<Vec<M::Center>> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        iterations += 1;
        let centers = refit(
            model,
            data,
            &mut partition,
            previous.as_deref(),
            config,
            iterations,
        )?;
        trace.push(partition_energy(model, data, &centers, &partition));
        let next = assign_by(data, &centers, cost)?;
        trace.push(partition_energy(model, data, &centers, &next));
        if next == partition {
            converged = true;
        }
        if converged || iterations >= config.max_iter {
            let reg = centers.iter().map(|c| model.penalty(c)).sum();
            let energy = energy_by(data, &centers, cost, reg)?;
            return Ok(FitResult {
                centers,
                partition: next,
                energy,
                iterations,
                converged,
                energy_trace: trace,
            });
        }
        partition = next;
        previous = Some(centers);
    }
}

/// Best of `n_starts` runs from uniformly random initial partitions.
///
/// Start `s` uses seed [`LloydConfig::start_seed`]`(s)` both for its initial
/// partition and for the run itself. Ties in energy go to the earliest start.
pub fn multistart<M: ClusterModel>(
    model: &M,
    data: &[M::Obs],
    config: &LloydConfig,
    n_starts: usize,
) -> Result<FitResult<M::Center>> {
    if n_starts == 0 {
        return Err(invalid("n_starts", "must be at least 1"));
    }
    config.validate()?;
    let runs = par::map_range(n_starts, |s| {
        let seed = config.start_seed(s);
        let init = random_partition(data.len(), config.k, seed)?;
        lloyd_run(model, data, &LloydConfig { seed, ..*config }, init)
    });
    let mut best: Option<FitResult<M::Center>> = None;
    for run in runs {
        let run = run?;
        if best
            .as_ref()
            .is_none_or(|b| run.energy.total < b.energy.total)
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}
