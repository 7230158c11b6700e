//! Data-dependent distances between hyperplanes fit to a common point set.
//!
//! A hyperplane is embedded as its vector of signed distances to the points
//! of a base set `Q`; the distance between two hyperplanes is the Euclidean
//! distance of their embeddings scaled by `1/sqrt(n)`. The crate provides
//! that distance and its unsigned/Frobenius variants, metric-ball membership
//! through a polynomial lifting, sensitivity (= leverage) sampling and
//! online row sampling for approximating the distance on large sets, an
//! extension to piecewise-linear curves with means of oriented lines, and
//! the downstream analyses built on top: clustering, kernel density
//! estimates, and the sampled Siegel estimator distribution on uncertain
//! data.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod sensitivity;
pub mod streaming;
#[cfg(test)]
pub(crate) mod testutil;
pub mod trajectories;

pub use error::{Error, Result};
pub use geometry::{EmbeddingVector, Hyperplane, PointSet};
