//! Generalized k-means clustering where cluster centers live in a different
//! space than the observations.
//!
//! Two instantiations share one alternating-minimization engine ([`lloyd`]):
//!
//! * smoothing-data association, where each center is a natural cubic
//!   smoothing spline fitted to `(time, value)` observations ([`spline`],
//!   [`assoc`]);
//! * passive pulse tracking, where each center is a straight-line track with
//!   a per-frame emission offset, observed through time-of-arrival and
//!   log-amplitude at fixed sensors ([`tracking`]).
//!
//! The [`fourier`] module solves the periodic regularized least-squares toy
//! problem in closed form and checks how the expected bending energy of the
//! minimizer scales with the regularization exponent.
//!
//! With the default `parallel` feature, Monte Carlo trials, multistarts,
//! per-cluster refits and assignment sweeps run on rayon. Results do not
//! depend on the thread count: every parallel map collects in index order
//! and every random stream is derived from `(master seed, path)`.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assoc;
pub mod energy;
pub mod error;
pub mod fourier;
pub mod lloyd;
pub mod par;
pub mod rng;
pub mod spline;
pub mod stats;
pub mod tracking;
pub mod trajectory;

pub use energy::{
    assign_by, assign_partition, kmeans_energy, limit_energy_mc, pointwise_cost, EnergyReport,
    McEstimate, Observation2D, Partition,
};
pub use error::{Error, Result};
pub use lloyd::{lloyd_run, multistart, ClusterModel, EmptyClusterPolicy, FitResult, LloydConfig};
pub use spline::{fit_smoothing_spline, l2_distance, SplineCenter, SplineModel, WeightedPoint};
pub use trajectory::{Penalized, Polynomial, Trajectory};
