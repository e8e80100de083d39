//! # infoclust
//!
//! Information geometry of sampled dynamical systems.
//!
//! A time-dependent probability distribution `p(t)` on the simplex carries a
//! Fisher information `g_tt = Σ ṗ²/p` that measures how fast the system moves.
//! When `p` is only known through multinomial samples of size `n` taken every
//! `dt`, the natural finite-difference estimator of `g_tt` is biased by
//! `2N/(n·dt²)`. Clustering the `N+1` degrees of freedom into `ℓ` groups reduces
//! the bias to `2(ℓ−1)/(n·dt²)` at the price of an information loss `Δg_tt`
//! that vanishes exactly when the clustering is a sufficient statistic.
//!
//! Modules:
//!
//! - [`simplex`]: distributions, the Shahshahani distance, KL divergence, Fisher information
//! - [`dynamics`]: the multi-variant SIR generator (RK4) and its induced probabilities
//! - [`rng`]: counter-based splittable random streams
//! - [`sampling`]: multinomial time-series sampling, sampled estimators, Monte Carlo driver
//! - [`clustering`]: clustering maps, information loss, sufficiency, K-means, elbow rule
//! - [`theory`]: closed-form bias and variance predictions
//! - [`filtering`]: Gaussian pre-filtering of sampled series
//! - [`experiments`]: config-driven experiment runner used by the `infoclust` binary
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example <name>`.

#![forbid(unsafe_code)]

pub mod clustering;
pub mod csvfmt;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod filtering;
pub mod rng;
pub mod sampling;
pub mod simplex;
pub mod theory;

pub use clustering::Clustering;
pub use dynamics::{SirParams, Trajectory};
pub use error::{Error, Result};
pub use rng::CounterRng;
pub use sampling::{MonteCarloEstimate, ProbabilitySeries, SampleGrid, SampledTrajectory};
pub use simplex::{Distribution, TangentVector};
