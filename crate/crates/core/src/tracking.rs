//! Passive tracking of pulse-emitting targets.
//!
//! Each target moves on a straight line and emits one pulse per frame of
//! length `τ`, at a constant offset `o` into the frame. Every sensor records
//! the time of arrival and the log-amplitude of every pulse, without knowing
//! which target sent it. Cluster centers are the finite-dimensional tracks
//! `(x₀, v, o)`; a center predicts, for sensor `p` and frame `m`,
//!
//! ```text
//! ψ = ( |x₀ + mτv − z_p|/c + o + mτ,  log(α / (|x₀ + mτv − z_p|² + β)) )
//! ```
//!
//! and the cost of an observation is its squared residual against `ψ`
//! weighted by `diag(1/σ², 1/ν²)`. Per-cluster fits are nonlinear least
//! squares, solved with Levenberg–Marquardt on a finite-difference Jacobian.

use itertools::Itertools;
use nalgebra::{SMatrix, SVector};
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::lloyd::{multistart, ClusterModel, EmptyClusterPolicy, LloydConfig};
use crate::rng::{self, StreamRng};
use crate::stats::Summary;
use crate::trajectory::simpson;
use crate::{assoc, par};

pub type Point = [f64; 2];

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Known sensor geometry and signal constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorNet {
    pub sensors: Vec<Point>,
    /// Signal speed.
    pub c: f64,
    /// Frame period.
    pub tau: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Time-of-arrival noise standard deviation.
    pub sigma: f64,
    /// Log-amplitude noise standard deviation.
    pub nu: f64,
    /// Observation horizon.
    pub t_max: f64,
}

impl SensorNet {
    /// Three sensors at `(−10,−10)`, `(10,−10)`, `(0,10)`; `c = 100`,
    /// `τ = 1`, `α = 10⁸`, `β = 5`, `σ = 0.03`, `ν = 0.05`.
    pub fn three_sensors(t_max: f64) -> Self {
        Self {
            sensors: vec![[-10.0, -10.0], [10.0, -10.0], [0.0, 10.0]],
            c: 100.0,
            tau: 1.0,
            alpha: 1e8,
            beta: 5.0,
            sigma: 0.03,
            nu: 0.05,
            t_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors.is_empty() {
            return Err(invalid("sensors", "need at least one sensor"));
        }
        for (name, v) in [
            ("c", self.c),
            ("tau", self.tau),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("sigma", self.sigma),
            ("nu", self.nu),
            ("t_max", self.t_max),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// A straight track with an emission offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackParams {
    pub x0: Point,
    pub v: Point,
    /// Emission offset within a frame. Fits leave it unconstrained; see
    /// [`TrackParams::wrapped_offset`] for the value in `[0, τ)`.
    pub o: f64,
}

impl TrackParams {
    pub fn new(x0: Point, v: Point, o: f64) -> Self {
        Self { x0, v, o }
    }

    pub fn position(&self, t: f64) -> Point {
        [self.x0[0] + self.v[0] * t, self.x0[1] + self.v[1] * t]
    }

    pub fn wrapped_offset(&self, tau: f64) -> f64 {
        self.o.rem_euclid(tau)
    }

    /// The center whose frame-start positions `x₀ + mτv` coincide with this
    /// track's positions at the emission times `mτ + o`.
    pub fn frame_aligned(&self) -> Self {
        Self {
            x0: self.position(self.o),
            ..*self
        }
    }

    fn to_vector(self) -> SVector<f64, 5> {
        SVector::from([self.x0[0], self.x0[1], self.v[0], self.v[1], self.o])
    }

    fn from_vector(p: &SVector<f64, 5>) -> Self {
        Self::new([p[0], p[1]], [p[2], p[3]], p[4])
    }
}

/// Time of arrival, log-amplitude and receiving sensor of one pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseObservation {
    pub t: f64,
    pub a: f64,
    pub sensor: usize,
}

/// `max{m ∈ ℕ : mτ ≤ t}`.
pub fn emission_index(t: f64, tau: f64) -> u64 {
    let mut m = (t / tau).floor().max(0.0) as u64;
    if m > 0 && m as f64 * tau > t {
        m -= 1;
    }
    while (m + 1) as f64 * tau <= t {
        m += 1;
    }
    m
}

/// The predicted `(time of arrival, log-amplitude)` at sensor `p` of the
/// pulse emitted in frame `m`.
pub fn predict_pulse(params: &TrackParams, net: &SensorNet, p: usize, m: u64) -> (f64, f64) {
    let frame = m as f64 * net.tau;
    let r = dist(params.position(frame), net.sensors[p]);
    (
        r / net.c + params.o + frame,
        (net.alpha / (r * r + net.beta)).ln(),
    )
}

fn residuals(obs: &PulseObservation, params: &TrackParams, net: &SensorNet) -> (f64, f64) {
    let m = emission_index(obs.t, net.tau);
    let (t, a) = predict_pulse(params, net, obs.sensor, m);
    ((obs.t - t) / net.sigma, (obs.a - a) / net.nu)
}

/// `(t − ψ₁)²/σ² + (a − ψ₂)²/ν²`.
pub fn pulse_cost(obs: &PulseObservation, params: &TrackParams, net: &SensorNet) -> f64 {
    let (rt, ra) = residuals(obs, params, net);
    rt * rt + ra * ra
}

/// Simulate every pulse of every target. Returns observations and the
/// index of the emitting target; pulses arriving after the horizon are
/// dropped.
pub fn generate_pulses<R: Rng + ?Sized>(
    tracks: &[TrackParams],
    net: &SensorNet,
    rng: &mut R,
) -> Result<(Vec<PulseObservation>, Vec<usize>)> {
    net.validate()?;
    let time_noise = Normal::new(0.0, net.sigma).expect("positive sigma");
    let amp_noise = Normal::new(0.0, net.nu).expect("positive nu");
    let mut out = Vec::new();
    let mut labels = Vec::new();
    let frames = (net.t_max / net.tau).floor() as u64 + 1;
    for m in 0..frames {
        for (j, track) in tracks.iter().enumerate() {
            let emitted = m as f64 * net.tau + track.o;
            if emitted > net.t_max {
                continue;
            }
            let pos = track.position(emitted);
            for (p, &z) in net.sensors.iter().enumerate() {
                let r = dist(pos, z);
                let t = emitted + r / net.c + time_noise.sample(rng);
                let a = (net.alpha / (r * r + net.beta)).ln() + amp_noise.sample(rng);
                if (0.0..=net.t_max).contains(&t) {
                    out.push(PulseObservation { t, a, sensor: p });
                    labels.push(j);
                }
            }
        }
    }
    Ok((out, labels))
}

/// Generate pulses with zero noise (useful for checks).
pub fn noiseless_pulses(tracks: &[TrackParams], net: &SensorNet) -> Vec<PulseObservation> {
    let mut out = Vec::new();
    let frames = (net.t_max / net.tau).floor() as u64 + 1;
    for m in 0..frames {
        for track in tracks {
            let emitted = m as f64 * net.tau + track.o;
            if emitted > net.t_max {
                continue;
            }
            let pos = track.position(emitted);
            for (p, &z) in net.sensors.iter().enumerate() {
                let r = dist(pos, z);
                let t = emitted + r / net.c;
                if t <= net.t_max {
                    out.push(PulseObservation {
                        t,
                        a: (net.alpha / (r * r + net.beta)).ln(),
                        sensor: p,
                    });
                }
            }
        }
    }
    out
}

/// Levenberg–Marquardt settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmSettings {
    pub max_iter: usize,
    /// Stop once an accepted step lowers the objective by less than this
    /// fraction.
    pub rel_tol: f64,
    pub initial_damping: f64,
}

impl Default for LmSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            rel_tol: 1e-13,
            initial_damping: 1e-3,
        }
    }
}

/// Result of a track fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackFit {
    pub params: TrackParams,
    /// `Σ pulse_cost` at `params`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    obs: Vec<(&'a PulseObservation, u64)>,
    net: &'a SensorNet,
}

impl<'a> Problem<'a> {
    fn new(cluster: &[&'a PulseObservation], net: &'a SensorNet) -> Self {
        let obs = cluster
            .iter()
            .map(|o| (*o, emission_index(o.t, net.tau)))
            .collect();
        Self { obs, net }
    }

    fn residuals_into(&self, p: &SVector<f64, 5>, out: &mut Vec<f64>) {
        out.clear();
        let params = TrackParams::from_vector(p);
        for (o, m) in &self.obs {
            let (t, a) = predict_pulse(&params, self.net, o.sensor, *m);
            out.push((o.t - t) / self.net.sigma);
            out.push((o.a - a) / self.net.nu);
        }
    }

    fn objective(&self, p: &SVector<f64, 5>, scratch: &mut Vec<f64>) -> f64 {
        self.residuals_into(p, scratch);
        scratch.iter().map(|r| r * r).sum()
    }

    fn step(k: usize, p: &SVector<f64, 5>) -> f64 {
        // Velocities are small next to positions and offsets.
        let scale = if k == 2 || k == 3 { 1e-2 } else { 1.0 };
        1e-6 * p[k].abs().max(scale)
    }

    /// Central-difference normal equations `(JᵀJ, Jᵀr)` at `p`.
    fn normal_equations(
        &self,
        p: &SVector<f64, 5>,
        r: &[f64],
    ) -> (SMatrix<f64, 5, 5>, SVector<f64, 5>) {
        let rows = r.len();
        let mut jac = vec![[0.0; 5]; rows];
        let (mut plus, mut minus) = (Vec::with_capacity(rows), Vec::with_capacity(rows));
        for k in 0..5 {
            let h = Self::step(k, p);
            let mut pp = *p;
            pp[k] += h;
            let mut pm = *p;
            pm[k] -= h;
            self.residuals_into(&pp, &mut plus);
            self.residuals_into(&pm, &mut minus);
            let width = pp[k] - pm[k];
            for (row, (a, b)) in jac.iter_mut().zip(plus.iter().zip(&minus)) {
                row[k] = (a - b) / width;
            }
        }
        let mut jtj = SMatrix::<f64, 5, 5>::zeros();
        let mut jtr = SVector::<f64, 5>::zeros();
        for (row, ri) in jac.iter().zip(r) {
            for a in 0..5 {
                jtr[a] += row[a] * ri;
                for b in a..5 {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        for a in 0..5 {
            for b in 0..a {
                jtj[(a, b)] = jtj[(b, a)];
            }
        }
        (jtj, jtr)
    }
}

/// Levenberg–Marquardt from `start`; the objective never increases.
fn levenberg_marquardt(problem: &Problem, start: TrackParams, settings: &LmSettings) -> TrackFit {
    let mut p = start.to_vector();
    let mut r = Vec::new();
    let mut scratch = Vec::new();
    let mut f = problem.objective(&p, &mut r);
    let mut damping = settings.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iter && !converged {
        iterations += 1;
        if f == 0.0 {
            converged = true;
            break;
        }
        problem.residuals_into(&p, &mut r);
        let (jtj, jtr) = problem.normal_equations(&p, &r);
        let max_diag = (0..5).map(|i| jtj[(i, i)]).fold(0.0, f64::max);
        let floor = 1e-15 * max_diag.max(f64::MIN_POSITIVE);
        let mut accepted = false;
        while damping < 1e16 {
            let mut a = jtj;
            for i in 0..5 {
                a[(i, i)] += damping * jtj[(i, i)].max(floor);
            }
            let Some(delta) = a.cholesky().map(|c| c.solve(&(-jtr))) else {
                damping *= 4.0;
                continue;
            };
            let candidate = p + delta;
            let fc = problem.objective(&candidate, &mut scratch);
            if fc < f {
                let gain = (f - fc) / f;
                p = candidate;
                f = fc;
                damping = (damping / 3.0).max(1e-12);
                accepted = true;
                if gain < settings.rel_tol {
                    converged = true;
                }
                break;
            }
            damping *= 4.0;
        }
        if !accepted {
            // No descent direction survives rounding: a stationary point.
            converged = true;
        }
    }
    TrackFit {
        params: TrackParams::from_vector(&p),
        objective: f,
        iterations,
        converged,
    }
}

/// Central-difference gradient of `Σ pulse_cost` at `params`.
pub fn objective_gradient(
    cluster: &[&PulseObservation],
    params: &TrackParams,
    net: &SensorNet,
) -> [f64; 5] {
    let problem = Problem::new(cluster, net);
    let p = params.to_vector();
    let mut r = Vec::new();
    problem.residuals_into(&p, &mut r);
    let (_, jtr) = problem.normal_equations(&p, &r);
    std::array::from_fn(|k| 2.0 * jtr[k])
}

/// `Σ pulse_cost` over a cluster.
pub fn track_objective(
    cluster: &[&PulseObservation],
    params: &TrackParams,
    net: &SensorNet,
) -> f64 {
    cluster.iter().map(|o| pulse_cost(o, params, net)).sum()
}

/// Solve the two-dimensional trilateration from ranges to at least three
/// sensors by linear least squares on the differenced circle equations.
fn trilaterate(anchors: &[(Point, f64)]) -> Option<Point> {
    let (z0, d0) = anchors[0];
    let mut ata = [[0.0; 2]; 2];
    let mut atb = [0.0; 2];
    for &(z, d) in &anchors[1..] {
        let row = [2.0 * (z[0] - z0[0]), 2.0 * (z[1] - z0[1])];
        let b = (z[0] * z[0] + z[1] * z[1]) - (z0[0] * z0[0] + z0[1] * z0[1]) - d * d + d0 * d0;
        for i in 0..2 {
            atb[i] += row[i] * b;
            for j in 0..2 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    if det.abs() < 1e-12 {
        return None;
    }
    Some([
        (ata[1][1] * atb[0] - ata[0][1] * atb[1]) / det,
        (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det,
    ])
}

/// A data-driven starting point: pick a random frame, turn the amplitudes
/// seen there into ranges, trilaterate, and read the offset off the arrival
/// times. Velocity starts at zero.
fn initial_guess(
    cluster: &[&PulseObservation],
    net: &SensorNet,
    rng: &mut StreamRng,
) -> TrackParams {
    let pick = cluster[rng.random_range(0..cluster.len())];
    let m = emission_index(pick.t, net.tau);
    let mut in_frame: Vec<&PulseObservation> = cluster
        .iter()
        .copied()
        .filter(|o| emission_index(o.t, net.tau) == m)
        .collect();
    // One pulse per sensor, chosen at random when several are present.
    for i in (1..in_frame.len()).rev() {
        in_frame.swap(i, rng.random_range(0..=i));
    }
    let mut per_sensor: Vec<(usize, &PulseObservation)> = Vec::new();
    for o in in_frame {
        if per_sensor.iter().all(|(s, _)| *s != o.sensor) {
            per_sensor.push((o.sensor, o));
        }
    }
    let range = |a: f64| (net.alpha * (-a).exp() - net.beta).max(0.0).sqrt();
    let anchors: Vec<(Point, f64)> = per_sensor
        .iter()
        .map(|(s, o)| (net.sensors[*s], range(o.a)))
        .collect();
    let pos = (anchors.len() >= 3)
        .then(|| trilaterate(&anchors))
        .flatten()
        .unwrap_or_else(|| {
            let (z, d) = anchors
                .iter()
                .copied()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least one pulse");
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            [z[0] + d * angle.cos(), z[1] + d * angle.sin()]
        });
    let frame = m as f64 * net.tau;
    let o = per_sensor
        .iter()
        .map(|(s, o)| o.t - frame - dist(pos, net.sensors[*s]) / net.c)
        .sum::<f64>()
        / per_sensor.len() as f64;
    TrackParams::new(pos, [0.0, 0.0], o)
}

/// Fit a track to one cluster: Levenberg–Marquardt from `previous` (if any)
/// and from `n_starts` data-driven initial guesses, keeping the best.
pub fn fit_track(
    cluster: &[&PulseObservation],
    net: &SensorNet,
    n_starts: usize,
    previous: Option<&TrackParams>,
    settings: &LmSettings,
    rng: &mut StreamRng,
) -> Result<TrackFit> {
    if cluster.is_empty() {
        return Err(Error::EmptyData);
    }
    let problem = Problem::new(cluster, net);
    let mut starts: Vec<TrackParams> = previous.copied().into_iter().collect();
    starts.extend((0..n_starts).map(|_| initial_guess(cluster, net, rng)));
    if starts.is_empty() {
        return Err(invalid(
            "n_starts",
            "need a previous center or at least one start",
        ));
    }
    let best = starts
        .into_iter()
        .map(|s| levenberg_marquardt(&problem, s, settings))
        .reduce(|best, fit| {
            if fit.objective < best.objective {
                fit
            } else {
                best
            }
        })
        .expect("non-empty starts");
    Ok(best)
}

/// Fit a track from one given starting point.
pub fn fit_track_from(
    cluster: &[&PulseObservation],
    net: &SensorNet,
    start: TrackParams,
    settings: &LmSettings,
) -> Result<TrackFit> {
    if cluster.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(levenberg_marquardt(
        &Problem::new(cluster, net),
        start,
        settings,
    ))
}

/// The tracking instantiation of the k-means engine. No regularization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackModel {
    pub net: SensorNet,
    pub fit_starts: usize,
    pub lm: LmSettings,
}

impl TrackModel {
    pub fn new(net: SensorNet) -> Self {
        Self {
            net,
            fit_starts: 5,
            lm: LmSettings::default(),
        }
    }
}

impl ClusterModel for TrackModel {
    type Obs = PulseObservation;
    type Center = TrackParams;

    fn cost(&self, obs: &PulseObservation, center: &TrackParams) -> f64 {
        pulse_cost(obs, center, &self.net)
    }

    fn fit(
        &self,
        members: &[&PulseObservation],
        _n_total: usize,
        previous: Option<&TrackParams>,
        rng: &mut StreamRng,
    ) -> Result<TrackParams> {
        fit_track(members, &self.net, self.fit_starts, previous, &self.lm, rng).map(|f| f.params)
    }
}

/// `η = (1/k) √(Σ_j ∫₀ᵀ |x̂_{π(j)}(t) − x_j(t)|² dt)` minimized over label
/// permutations. Offsets are ignored.
pub fn tracking_eta(
    fitted: &[TrackParams],
    truth: &[TrackParams],
    t_max: f64,
    nodes: usize,
) -> Result<f64> {
    let k = truth.len();
    if fitted.len() != k {
        return Err(Error::CenterCount {
            expected: k,
            got: fitted.len(),
        });
    }
    let mut d2 = vec![vec![0.0; k]; k];
    for (a, f) in fitted.iter().enumerate() {
        for (b, x) in truth.iter().enumerate() {
            d2[a][b] = simpson(
                |t| {
                    let (p, q) = (f.position(t), x.position(t));
                    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
                },
                0.0,
                t_max,
                nodes,
            )?;
        }
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| perm.iter().enumerate().map(|(b, &a)| d2[a][b]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(best.max(0.0).sqrt() / k as f64)
}

/// The two straight tracks of the reference scenario:
/// `x₁(t) = (√2 t/400)(1,1) + (0,5)`, `o₁ = 0.3` and
/// `x₂(t) = (6,7) − (t/125)(1,0)`, `o₂ = 0.6`.
pub fn reference_tracks() -> Vec<TrackParams> {
    let s = 2f64.sqrt() / 400.0;
    vec![
        TrackParams::new([0.0, 5.0], [s, s], 0.3),
        TrackParams::new([6.0, 7.0], [-1.0 / 125.0, 0.0], 0.6),
    ]
}

/// Settings of the subsampling study.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleConfig {
    pub fractions: Vec<f64>,
    pub trials: usize,
    /// Lloyd multistarts per trial.
    pub starts: usize,
    pub fit_starts: usize,
    pub max_iter: usize,
    pub eta_nodes: usize,
}

impl Default for SubsampleConfig {
    fn default() -> Self {
        Self {
            fractions: (3..=10).map(|i| i as f64 / 10.0).collect(),
            trials: 20,
            starts: 5,
            fit_starts: 5,
            max_iter: 100,
            eta_nodes: 2001,
        }
    }
}

/// One subsampling trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleRow {
    pub fraction: f64,
    pub trial: usize,
    pub n_s: usize,
    pub eta: f64,
    pub accuracy: f64,
    pub iterations: usize,
    pub energy: f64,
    pub converged: bool,
}

/// For each fraction, draw `trials` subsamples of the dataset without
/// replacement and cluster them. Trial `i` at fraction index `f` uses seed
/// `(seed, f, i)`.
pub fn subsample_experiment(
    data: &[PulseObservation],
    labels: &[usize],
    truth: &[TrackParams],
    net: &SensorNet,
    config: &SubsampleConfig,
    seed: u64,
) -> Result<Vec<SubsampleRow>> {
    net.validate()?;
    let k = truth.len();
    if data.len() != labels.len() {
        return Err(Error::PartitionLength {
            expected: data.len(),
            got: labels.len(),
        });
    }
    if config.trials == 0 || config.starts == 0 {
        return Err(invalid("trials", "trials and starts must be at least 1"));
    }
    if let Some(f) = config.fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(invalid("fractions", format!("{f} is outside (0, 1]")));
    }
    let model = TrackModel {
        fit_starts: config.fit_starts,
        ..TrackModel::new(net.clone())
    };
    let jobs: Vec<(usize, usize)> = (0..config.fractions.len())
        .cartesian_product(0..config.trials)
        .collect();
    par::map_slice(&jobs, |&(fi, trial)| {
        let fraction = config.fractions[fi];
        let trial_seed = rng::derive(seed, &[fi as u64, trial as u64]);
        let n_s = ((fraction * data.len() as f64).round() as usize).clamp(k.max(1), data.len());
        let mut rng = rng::stream(trial_seed, &[0]);
        let mut picks = index::sample(&mut rng, data.len(), n_s).into_vec();
        picks.sort_unstable();
        let sub: Vec<PulseObservation> = picks.iter().map(|&i| data[i]).collect();
        let sub_labels: Vec<usize> = picks.iter().map(|&i| labels[i]).collect();
        let lloyd = LloydConfig {
            k,
            max_iter: config.max_iter,
            empty_cluster_policy: EmptyClusterPolicy::ReseedFarthest,
            seed: trial_seed,
        };
        let fit = multistart(&model, &sub, &lloyd, config.starts)?;
        Ok(SubsampleRow {
            fraction,
            trial,
            n_s,
            eta: tracking_eta(&fit.centers, truth, net.t_max, config.eta_nodes)?,
            accuracy: assoc::association_accuracy(fit.partition.labels(), &sub_labels, k)?,
            iterations: fit.iterations,
            energy: fit.energy.total,
            converged: fit.converged,
        })
    })
    .into_iter()
    .collect()
}

/// Quantiles of one column of the subsampling table at one fraction.
pub fn summarize_fraction(
    rows: &[SubsampleRow],
    fraction: f64,
    column: impl Fn(&SubsampleRow) -> f64,
) -> Option<Summary> {
    let values: Vec<f64> = rows
        .iter()
        .filter(|r| r.fraction == fraction)
        .map(column)
        .collect();
    (!values.is_empty()).then(|| Summary::of(&values))
}
