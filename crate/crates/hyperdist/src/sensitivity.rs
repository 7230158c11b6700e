//! Sensitivity scores, their identity with leverage scores, and
//! sensitivity-sampled coresets for estimating the hyperplane distance.
//!
//! For the squared-linear function family over a full-rank point set, the
//! sensitivity of a point equals its design-matrix leverage score divided by
//! the point's measure. Coresets drawn proportionally to sensitivity carry
//! weights `(d+1)/(N * sigma)`, which makes the weighted distance over the
//! coreset an unbiased estimator of the squared full distance.

use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, PointSet};
use crate::rng::derive_rng;

/// The n×(d+1) matrix whose i-th row is `(q_i, 1)`. Its last column is all
/// ones by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    m: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(q: &PointSet) -> Self {
        Self { m: q.homogeneous() }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn nrows(&self) -> usize {
        self.m.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.m.ncols()
    }

    /// Leverage score of every row: `tau_i = a_i^T (A^T A)^+ a_i`.
    pub fn leverage_scores(&self) -> Vec<f64> {
        matrix_row_leverage(&self.m)
    }
}

/// Row leverage scores of an arbitrary real matrix via a rank-revealing SVD.
///
/// Each score lies in `[0, 1]` and they sum to `rank(A)`; rank deficiency is
/// handled by the pseudoinverse (singular values at or below
/// `max(n, m) * eps * sigma_max` are treated as zero).
pub fn matrix_row_leverage(a: &DMatrix<f64>) -> Vec<f64> {
    let (n, m) = a.shape();
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("svd was requested with u");
    let smax = svd.singular_values.max();
    if smax <= 0.0 {
        return vec![0.0; n];
    }
    let tol = n.max(m) as f64 * f64::EPSILON * smax;
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > tol).collect();
    (0..n)
        .map(|i| {
            // Fixed summation order inside each row keeps results identical
            // no matter how rows are distributed across threads.
            keep.iter().map(|&k| u[(i, k)] * u[(i, k)]).sum()
        })
        .collect()
}

/// Sensitivity of every point for the squared-linear family: the leverage
/// score of the measure-scaled design-matrix row divided by the point's
/// measure. The measure comes from the stored weights (uniform `1/n` by
/// default, explicit weights normalized to sum to one).
///
/// The scores satisfy `sum_i sigma_i * p_i = d + 1` and each upper-bounds how
/// large any squared linear function at that point can be relative to its
/// mean over `Q`.
pub fn sensitivities(q: &PointSet) -> Result<Vec<f64>> {
    if !q.is_full_rank() {
        return Err(Error::NotFullRank);
    }
    let p = q.measure();
    let mut a = q.homogeneous();
    for i in 0..q.n() {
        let s = p[i].sqrt();
        for j in 0..a.ncols() {
            a[(i, j)] *= s;
        }
    }
    let tau = matrix_row_leverage(&a);
    Ok(tau.iter().zip(p.iter()).map(|(t, pi)| t / pi).collect())
}

/// A weighted subsample of a point set, drawn by sensitivity sampling.
///
/// Index `j` carries weight `(d+1) / (N * sigma(x_j))`, so the weighted
/// distance over the coreset estimates the full distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Coreset {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl Coreset {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Sample size `ceil(func_dim / (delta * eps^2))` for a target dimension of
/// the function family. The squared-linear family over R^d has dimension
/// `d + 1`, which matches the total sensitivity; passing `d` gives the
/// slightly smaller ambient-dimension sizing.
pub fn recommended_sample_size(func_dim: usize, eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::BadParameter("eps must lie in (0, 1)".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter("delta must lie in (0, 1)".into()));
    }
    Ok((func_dim as f64 / (delta * eps * eps)).ceil() as usize)
}

/// Draw `n_samples` iid points proportional to sensitivity, with the matching
/// coreset weights. Deterministic for a fixed seed.
pub fn sensitivity_sample(q: &PointSet, n_samples: usize, seed: u64) -> Result<Coreset> {
    if n_samples == 0 {
        return Err(Error::BadParameter("coreset size must be at least 1".into()));
    }
    let sigma = sensitivities(q)?;
    let p = q.measure();
    // Pr(x_i) = sigma_i p_i / (d+1); WeightedIndex normalizes the common factor.
    let masses: Vec<f64> = sigma.iter().zip(p.iter()).map(|(s, pi)| s * pi).collect();
    let picker = WeightedIndex::new(&masses)
        .map_err(|e| Error::BadParameter(format!("bad sampling weights: {e}")))?;
    let mut rng = derive_rng(seed, 0);
    let dplus1 = (q.dim() + 1) as f64;
    let indices: Vec<usize> = (0..n_samples).map(|_| picker.sample(&mut rng)).collect();
    let weights: Vec<f64> =
        indices.iter().map(|&j| dplus1 / (n_samples as f64 * sigma[j])).collect();
    Ok(Coreset { indices, weights })
}

/// Estimate `dist(Q, h1, h2)` from a coreset of `Q`.
///
/// Computes `(sum_j w_j (v_j(h1) - v_j(h2))^2)^(1/2)` over the sampled
/// points. The square is an unbiased estimator of the squared full distance,
/// and a coreset that happens to contain all of `Q` with uniform sensitivities
/// reproduces `dist` exactly.
pub fn estimate_dist(
    q: &PointSet,
    coreset: &Coreset,
    h1: &Hyperplane,
    h2: &Hyperplane,
) -> Result<f64> {
    if h1.dim() != q.dim() || h2.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            actual: if h1.dim() != q.dim() { h1.dim() } else { h2.dim() },
        });
    }
    if h1.oriented() != h2.oriented() {
        return Err(Error::OrientationMismatch);
    }
    if coreset.indices.len() != coreset.weights.len() {
        return Err(Error::InvalidData("coreset indices and weights differ in length".into()));
    }
    let du = h1.coeffs() - h2.coeffs();
    let pts = q.coords();
    let d = q.dim();
    let mut acc = 0.0;
    for (&idx, &w) in coreset.indices.iter().zip(coreset.weights.iter()) {
        if idx >= q.n() {
            return Err(Error::InvalidData(format!("coreset index {idx} out of range")));
        }
        let mut dv = du[d];
        for j in 0..d {
            dv += du[j] * pts[(idx, j)];
        }
        acc += w * dv * dv;
    }
    Ok(acc.sqrt())
}
