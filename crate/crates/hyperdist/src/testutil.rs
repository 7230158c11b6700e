//! Random instance generators shared across the crate's tests.

use nalgebra::DMatrix;
use rand::Rng;

use crate::geometry::{Hyperplane, PointSet};

/// A random full-rank point set with coordinates in (-5, 5).
pub fn random_point_set(rng: &mut impl Rng, n: usize, d: usize) -> PointSet {
    loop {
        let m = DMatrix::from_fn(n, d, |_, _| rng.gen_range(-5.0..5.0));
        let q = PointSet::new(m).unwrap();
        if q.is_full_rank() {
            return q;
        }
    }
}

/// A random full-rank point set whose design matrix has condition number at
/// most `max_cond`. Stochastic maximization oracles need the extremal
/// direction to be reachable, which badly conditioned instances deny any
/// sampler.
pub fn random_conditioned_point_set(
    rng: &mut impl Rng,
    n: usize,
    d: usize,
    max_cond: f64,
) -> PointSet {
    loop {
        let m = DMatrix::from_fn(n, d, |_, _| rng.gen_range(-5.0..5.0));
        let q = PointSet::new(m).unwrap();
        if !q.is_full_rank() {
            continue;
        }
        let sv = q.homogeneous().singular_values();
        if sv.min() * max_cond >= sv.max() {
            return q;
        }
    }
}

/// A random hyperplane with coefficients drawn from (-1, 1).
pub fn random_plane(rng: &mut impl Rng, d: usize, oriented: bool) -> Hyperplane {
    loop {
        let raw: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Ok(h) = Hyperplane::new(&raw, oriented) {
            return h;
        }
    }
}
