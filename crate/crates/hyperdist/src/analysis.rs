//! Downstream analysis on top of the hyperplane distance: k-center and
//! k-means clustering, kernel density estimation over regressors, the Siegel
//! repeated-median line, and the sampled Siegel distribution on uncertain
//! points.

use nalgebra::DVector;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, PointSet};
use crate::rng::derive_rng;

/// Farthest-point traversal output.
#[derive(Debug, Clone, PartialEq)]
pub struct KCenterResult {
    pub centers: Vec<usize>,
    pub assignment: Vec<usize>,
    /// Coverage radius after 1, 2, ..., k centers; nonincreasing. The drop
    /// pattern is the "elbow" signal for picking k; judging it is left to
    /// the caller.
    pub radii: Vec<f64>,
}

/// Gonzalez k-center: farthest-point traversal starting from item 0.
///
/// Only needs the distance to be a metric; the final radius is at most twice
/// the optimal k-center radius.
pub fn gonzalez_k_center<T>(
    items: &[T],
    dist: impl Fn(&T, &T) -> f64,
    k: usize,
) -> Result<KCenterResult> {
    if k == 0 || k > items.len() {
        return Err(Error::BadK { k, n: items.len() });
    }
    let n = items.len();
    let mut centers = vec![0usize];
    let mut nearest = vec![0usize; n];
    let mut dist_to_set: Vec<f64> = (0..n).map(|i| dist(&items[i], &items[0])).collect();
    let mut radii = Vec::with_capacity(k);

    for _ in 1..k {
        let (far, far_d) = argmax(&dist_to_set);
        radii.push(far_d);
        let c = centers.len();
        centers.push(far);
        for i in 0..n {
            let d = dist(&items[i], &items[far]);
            if d < dist_to_set[i] {
                dist_to_set[i] = d;
                nearest[i] = c;
            }
        }
    }
    radii.push(argmax(&dist_to_set).1);
    Ok(KCenterResult { centers, assignment: nearest, radii })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Lloyd's algorithm output.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centers: Vec<DVector<f64>>,
    pub assignment: Vec<usize>,
    /// Final within-cluster sum of squares.
    pub wcss: f64,
    /// WCSS after the initial assignment and after each Lloyd iteration;
    /// nonincreasing.
    pub wcss_history: Vec<f64>,
}

/// Lloyd's k-means with k-means++ seeding, iterated to an assignment
/// fixpoint or 100 iterations. Deterministic for a fixed seed.
pub fn lloyds_k_means(vectors: &[DVector<f64>], k: usize, seed: u64) -> Result<KMeansResult> {
    if k == 0 || k > vectors.len() {
        return Err(Error::BadK { k, n: vectors.len() });
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, actual: 0 });
    }
    let n = vectors.len();
    let mut rng = derive_rng(seed, 0);

    // k-means++ seeding.
    let mut centers: Vec<DVector<f64>> = Vec::with_capacity(k);
    centers.push(vectors[rng.gen_range(0..n)].clone());
    let mut d2: Vec<f64> = vectors.iter().map(|v| (v - &centers[0]).norm_squared()).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            WeightedIndex::new(&d2)
                .map_err(|e| Error::BadParameter(format!("k-means++ weights: {e}")))?
                .sample(&mut rng)
        } else {
            rng.gen_range(0..n)
        };
        centers.push(vectors[next].clone());
        for (i, v) in vectors.iter().enumerate() {
            d2[i] = d2[i].min((v - centers.last().unwrap()).norm_squared());
        }
    }

    let assign = |centers: &[DVector<f64>]| -> (Vec<usize>, f64) {
        let mut labels = vec![0usize; n];
        let mut wcss = 0.0;
        for (i, v) in vectors.iter().enumerate() {
            let mut best = (0usize, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = (v - center).norm_squared();
                if d < best.1 {
                    best = (c, d);
                }
            }
            labels[i] = best.0;
            wcss += best.1;
        }
        (labels, wcss)
    };

    let (mut labels, mut wcss) = assign(&centers);
    let mut history = vec![wcss];
    for _ in 0..100 {
        // Recompute means; empty clusters keep their previous center.
        let mut sums = vec![DVector::<f64>::zeros(dim); k];
        let mut counts = vec![0usize; k];
        for (i, v) in vectors.iter().enumerate() {
            sums[labels[i]] += v;
            counts[labels[i]] += 1;
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = &sums[c] / counts[c] as f64;
            }
        }
        let (new_labels, new_wcss) = assign(&centers);
        history.push(new_wcss);
        let converged = new_labels == labels;
        labels = new_labels;
        wcss = new_wcss;
        if converged {
            break;
        }
    }
    Ok(KMeansResult { centers, assignment: labels, wcss, wcss_history: history })
}

/// Kernel density estimate over a set of hyperplanes at `query`, with the
/// Gaussian-like kernel `exp(-dist^2)` and normalization constant 1.
pub fn kde(q: &PointSet, hyperplanes: &[Hyperplane], query: &Hyperplane) -> Result<f64> {
    if hyperplanes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut acc = 0.0;
    for h in hyperplanes {
        let d = crate::metrics::dist(q, query, h)?;
        acc += (-d * d).exp();
    }
    Ok(acc / hyperplanes.len() as f64)
}

/// Sample size `ceil((d^2 + ln(1/delta)) / eps^2)` under which a random
/// subsample preserves the KDE within `eps` at any query.
pub fn kde_sample_size(eps: f64, delta: f64, d: usize) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter("eps and delta must lie in (0, 1)".into()));
    }
    Ok((((d * d) as f64 + (1.0 / delta).ln()) / (eps * eps)).ceil() as usize)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

/// Siegel repeated-median line fit `y = a x + b`.
///
/// The slope is the median over points of the median pairwise slope to every
/// other point (pairs with equal x are skipped; a point whose partners are
/// all vertical contributes no slope); the intercept is the median of
/// `y_i - a x_i`. Medians of even counts average the two middle values.
pub fn siegel_estimator(points: &[[f64; 2]]) -> Result<Hyperplane> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, actual: points.len() });
    }
    let n = points.len();
    let mut slope_medians = Vec::with_capacity(n);
    for i in 0..n {
        let mut slopes = Vec::with_capacity(n - 1);
        for j in 0..n {
            if j == i || points[j][0] == points[i][0] {
                continue;
            }
            slopes.push((points[j][1] - points[i][1]) / (points[j][0] - points[i][0]));
        }
        if !slopes.is_empty() {
            slope_medians.push(median(&mut slopes));
        }
    }
    if slope_medians.is_empty() {
        return Err(Error::DegenerateX);
    }
    let a = median(&mut slope_medians);
    let mut intercepts: Vec<f64> = points.iter().map(|p| p[1] - a * p[0]).collect();
    let b = median(&mut intercepts);
    Hyperplane::new(&[a, -1.0, b], false)
}

/// An uncertain planar point set: each point has a nonempty list of
/// candidate locations.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainPointSet {
    locations: Vec<Vec<[f64; 2]>>,
}

impl UncertainPointSet {
    pub fn new(locations: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        if locations.is_empty() {
            return Err(Error::EmptyInput);
        }
        if locations.iter().any(|l| l.is_empty()) {
            return Err(Error::InvalidData("every uncertain point needs at least one location".into()));
        }
        if locations.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidData("locations must be finite".into()));
        }
        Ok(Self { locations })
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    pub fn locations(&self) -> &[Vec<[f64; 2]>] {
        &self.locations
    }

    /// All candidate locations pooled together; the natural base set for the
    /// distance used to compare sampled estimators.
    pub fn all_locations(&self) -> Result<PointSet> {
        let flat: Vec<[f64; 2]> = self.locations.iter().flatten().copied().collect();
        PointSet::from_xy(&flat)
    }
}

/// A multiset of fitted lines, one per sampled traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSample {
    lines: Vec<Hyperplane>,
}

impl EstimatorSample {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> &[Hyperplane] {
        &self.lines
    }
}

/// Sample count `ceil(4/eps^2 * ln(2/delta))` for the distribution
/// approximation guarantee (the constant is a default; the asymptotic form
/// carries none).
pub fn distribution_sample_count(eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter("eps and delta must lie in (0, 1)".into()));
    }
    Ok((4.0 / (eps * eps) * (2.0 / delta).ln()).ceil() as usize)
}

/// Approximate the distribution of the Siegel estimator over traversals of
/// an uncertain point set: `n_samples` independent traversals, each picking
/// one location per point uniformly, each fitted by [`siegel_estimator`].
///
/// Traversals whose draw has all-equal x are redrawn up to 100 times before
/// the error surfaces. Deterministic for a fixed seed; traversals run in
/// parallel on per-task derived generators, output ordered by traversal
/// index.
pub fn uncertain_siegel_distribution(
    p: &UncertainPointSet,
    n_samples: usize,
    seed: u64,
) -> Result<EstimatorSample> {
    if n_samples == 0 {
        return Err(Error::BadParameter("sample count must be at least 1".into()));
    }
    let lines = (0..n_samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = derive_rng(seed, t as u64);
            let mut traversal = vec![[0.0, 0.0]; p.n()];
            for _attempt in 0..100 {
                for (i, locs) in p.locations().iter().enumerate() {
                    traversal[i] = locs[rng.gen_range(0..locs.len())];
                }
                match siegel_estimator(&traversal) {
                    Ok(line) => return Ok(line),
                    Err(Error::DegenerateX) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::DegenerateX)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimatorSample { lines })
}

/// Fraction of the sampled estimators inside the closed distance ball around
/// `z` of radius `r`. Pass `f64::INFINITY` to count everything.
pub fn empirical_ball_probability(
    sample: &EstimatorSample,
    q: &PointSet,
    z: &Hyperplane,
    r: f64,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut hits = 0usize;
    for line in sample.lines() {
        if crate::metrics::dist(q, z, line)? <= r {
            hits += 1;
        }
    }
    Ok(hits as f64 / sample.len() as f64)
}

/// Distance between the model fit on the full data and a model fit on a
/// coreset — the fine-grained coreset quality measure.
pub fn coreset_quality(q: &PointSet, h_star: &Hyperplane, h_hat: &Hyperplane) -> Result<f64> {
    crate::metrics::dist(q, h_star, h_hat)
}
