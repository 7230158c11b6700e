//! Online row sampling over the design-matrix stream.
//!
//! Rows arrive one at a time and are kept with probability proportional to
//! their ridge leverage against the sketch accumulated so far; accepted rows
//! are rescaled by `1 / sqrt(p)` so the sketch Gram matrix spectrally
//! approximates the full one. Distance estimates come with two-sided interval
//! bounds, and several independent sketches can be combined by the median
//! trick to amplify the per-run success probability.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Hyperplane;
use crate::rng::derive_rng;

/// Default number of independent runs for the median trick.
pub const DEFAULT_MEDIAN_RUNS: usize = 9;

/// A streamed, rescaled row subset of a design matrix.
///
/// Single-writer state machine: offers must be serialized, reads between
/// offers are safe. Independent sketches may run fully in parallel.
#[derive(Debug, Clone)]
pub struct Sketch {
    dim: usize,
    eps: f64,
    delta: f64,
    lambda: f64,
    oversampling: f64,
    rows: Vec<DVector<f64>>,
    gram: DMatrix<f64>,
    accepted: usize,
    seen: usize,
    rng: ChaCha8Rng,
}

impl Sketch {
    /// Empty sketch for rows of length `dim`, with `lambda = delta / eps` and
    /// the oversampling constant `c = 8 ln(dim / eps^2)` taken verbatim from
    /// the sampling rule. `dim` is the full row dimension (d+1 for a design
    /// matrix over points in R^d).
    pub fn new(dim: usize, eps: f64, delta: f64, seed: u64) -> Result<Self> {
        let c = 8.0 * (dim as f64 / (eps * eps)).ln();
        Self::with_options(dim, eps, delta, seed, 0, c)
    }

    /// Sketch for run `task` of a median-trick ensemble: same master seed,
    /// independent generator stream per run.
    pub fn new_run(dim: usize, eps: f64, delta: f64, seed: u64, task: u64) -> Result<Self> {
        let c = 8.0 * (dim as f64 / (eps * eps)).ln();
        Self::with_options(dim, eps, delta, seed, task, c)
    }

    /// Same as [`Sketch::new`] but with an explicit oversampling constant.
    pub fn with_oversampling(
        dim: usize,
        eps: f64,
        delta: f64,
        seed: u64,
        oversampling: f64,
    ) -> Result<Self> {
        Self::with_options(dim, eps, delta, seed, 0, oversampling)
    }

    /// Fully parameterized constructor.
    pub fn with_options(
        dim: usize,
        eps: f64,
        delta: f64,
        seed: u64,
        task: u64,
        oversampling: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadParameter("row dimension must be at least 1".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::BadParameter("eps must lie in (0, 1)".into()));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::BadParameter("delta must be positive".into()));
        }
        if oversampling.is_nan() || oversampling <= 0.0 {
            return Err(Error::BadParameter("oversampling constant must be positive".into()));
        }
        Ok(Self {
            dim,
            eps,
            delta,
            lambda: delta / eps,
            oversampling,
            rows: Vec::new(),
            gram: DMatrix::zeros(dim, dim),
            accepted: 0,
            seen: 0,
            rng: derive_rng(seed, task),
        })
    }

    /// Rebuild a sketch from previously accepted (already rescaled) rows,
    /// e.g. read back from a sketch file. The generator state is not
    /// restored; the result is only good for evaluation, not for continued
    /// streaming.
    pub fn from_rows(
        dim: usize,
        eps: f64,
        delta: f64,
        rows: Vec<Vec<f64>>,
        seen: usize,
    ) -> Result<Self> {
        let mut sketch = Self::with_oversampling(
            dim,
            eps,
            delta,
            0,
            8.0 * (dim as f64 / (eps * eps)).ln(),
        )?;
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: row.len() });
            }
            let v = DVector::from_vec(row);
            sketch.gram.ger(1.0, &v, &v, 1.0);
            sketch.rows.push(v);
        }
        sketch.accepted = sketch.rows.len();
        sketch.seen = seen;
        Ok(sketch)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn oversampling(&self) -> f64 {
        self.oversampling
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted
    }

    pub fn seen_count(&self) -> usize {
        self.seen
    }

    /// Accepted rows, already rescaled by `1/sqrt(p)`.
    pub fn rows(&self) -> &[DVector<f64>] {
        &self.rows
    }

    /// The running Gram matrix of the rescaled rows.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Recompute the Gram matrix from the stored rows; the incrementally
    /// maintained one must match within rounding.
    pub fn recomputed_gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.dim, self.dim);
        for row in &self.rows {
            g.ger(1.0, row, row, 1.0);
        }
        g
    }

    /// Acceptance probability the sketch would use for `row` right now:
    /// `min(c (1+eps) row^T (G + lambda I)^-1 row, 1)`.
    pub fn acceptance_probability(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: row.len() });
        }
        let a = DVector::from_row_slice(row);
        let mut reg = self.gram.clone();
        for i in 0..self.dim {
            reg[(i, i)] += self.lambda;
        }
        let chol = nalgebra::Cholesky::new(reg)
            .ok_or_else(|| Error::BadParameter("regularized Gram matrix not positive definite".into()))?;
        let solved = chol.solve(&a);
        let quad = a.dot(&solved).max(0.0);
        Ok((self.oversampling * (1.0 + self.eps) * quad).min(1.0))
    }

    /// Offer the next stream row. Returns whether it was accepted.
    pub fn offer(&mut self, row: &[f64]) -> Result<bool> {
        let p = self.acceptance_probability(row)?;
        // One uniform draw per offer keeps replay deterministic even when
        // p saturates at 1.
        let accept = self.rng.gen::<f64>() < p;
        if accept {
            let scaled = DVector::from_row_slice(row) / p.sqrt();
            self.gram.ger(1.0, &scaled, &scaled, 1.0);
            self.rows.push(scaled);
            self.accepted += 1;
        }
        self.seen += 1;
        Ok(accept)
    }

    /// `|| A~ u ||^2` for the coefficient difference of two hyperplanes.
    pub fn sq_norm(&self, h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
        let u = coefficient_difference(self.dim, h1, h2)?;
        Ok((&self.gram * &u).dot(&u).max(0.0))
    }

    /// Two-sided interval for the true distance over the full stream of
    /// length `n`, assuming both hyperplanes pass within `origin_bound` of
    /// the origin. With `D' = 4 (1 + origin_bound^2)`:
    ///
    /// `lower = max(0, ||A~u||^2/n - D' delta/n)^(1/2) / (1+eps)` and
    /// `upper = (||A~u||^2/n + D' delta/n)^(1/2) / (1-eps)`.
    pub fn bounds(
        &self,
        n: usize,
        h1: &Hyperplane,
        h2: &Hyperplane,
        origin_bound: f64,
    ) -> Result<(f64, f64)> {
        if self.eps >= 1.0 {
            return Err(Error::BadParameter("eps must be below 1".into()));
        }
        if origin_bound.is_nan() || origin_bound < 0.0 {
            return Err(Error::BadParameter("origin bound must be nonnegative".into()));
        }
        if n == 0 {
            return Err(Error::BadParameter("stream length must be positive".into()));
        }
        let nf = n as f64;
        let dprime = 4.0 * (1.0 + origin_bound * origin_bound);
        let base = self.sq_norm(h1, h2)? / nf;
        let slack = dprime * self.delta / nf;
        let lower = (base - slack).max(0.0).sqrt() / (1.0 + self.eps);
        let upper = (base + slack).sqrt() / (1.0 - self.eps);
        Ok((lower, upper))
    }
}

fn coefficient_difference(dim: usize, h1: &Hyperplane, h2: &Hyperplane) -> Result<DVector<f64>> {
    if h1.coeffs().len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: h1.coeffs().len() });
    }
    if h2.coeffs().len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: h2.coeffs().len() });
    }
    if h1.oriented() != h2.oriented() {
        return Err(Error::OrientationMismatch);
    }
    Ok(h1.coeffs() - h2.coeffs())
}

/// Median of `|| A~_i u ||^2` across independent sketches (average of the two
/// middle values for an even count). Running several sketches and taking the
/// median amplifies the per-run success probability of the interval bound.
pub fn median_estimate(sketches: &[Sketch], h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
    if sketches.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = sketches[0].dim();
    let mut values = Vec::with_capacity(sketches.len());
    for s in sketches {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: s.dim() });
        }
        values.push(s.sq_norm(h1, h2)?);
    }
    values.sort_unstable_by(f64::total_cmp);
    let k = values.len();
    Ok(if k % 2 == 1 { values[k / 2] } else { (values[k / 2 - 1] + values[k / 2]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PointSet;
    use crate::metrics::dist;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn feed(sketch: &mut Sketch, rows: &[Vec<f64>]) {
        for r in rows {
            sketch.offer(r).unwrap();
        }
    }

    fn random_rows(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect()
    }

    #[test]
    fn new_sketch_shape() {
        let s = Sketch::new(3, 0.5, 0.5, 7).unwrap();
        assert_eq!(s.lambda(), 1.0);
        assert_eq!(s.accepted_count(), 0);
        assert_eq!(s.seen_count(), 0);
        assert!(s.rows().is_empty());
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(Sketch::new(3, 0.0, 0.5, 7).is_err());
        assert!(Sketch::new(3, 1.0, 0.5, 7).is_err());
        assert!(Sketch::new(3, 0.5, 0.0, 7).is_err());
        assert!(Sketch::new(0, 0.5, 0.5, 7).is_err());
    }

    #[test]
    fn determinism_per_seed() {
        let mut rng = crate::rng::derive_rng(31, 0);
        let rows = random_rows(&mut rng, 100, 4);
        let mut a = Sketch::new(4, 0.4, 0.2, 9).unwrap();
        let mut b = Sketch::new(4, 0.4, 0.2, 9).unwrap();
        feed(&mut a, &rows);
        feed(&mut b, &rows);
        assert_eq!(a.accepted_count(), b.accepted_count());
        for (x, y) in a.rows().iter().zip(b.rows().iter()) {
            assert_eq!(x.as_slice(), y.as_slice());
        }
    }

    #[test]
    fn first_row_probability() {
        let s = Sketch::new(3, 0.5, 0.5, 7).unwrap();
        // Empty sketch: p = min(c (1+eps) ||a||^2 / lambda, 1).
        let c = s.oversampling();
        let small = [1e-4, 0.0, 0.0];
        let expect = c * 1.5 * 1e-8 / s.lambda();
        assert_abs_diff_eq!(s.acceptance_probability(&small).unwrap(), expect, epsilon = 1e-12);

        let big = [10.0, 0.0, 0.0];
        assert_eq!(s.acceptance_probability(&big).unwrap(), 1.0);
    }

    #[test]
    fn zero_row_never_accepted() {
        let mut s = Sketch::new(3, 0.5, 0.5, 7).unwrap();
        for _ in 0..50 {
            assert!(!s.offer(&[0.0, 0.0, 0.0]).unwrap());
        }
        assert_eq!(s.accepted_count(), 0);
        assert_eq!(s.seen_count(), 50);
    }

    #[test]
    fn probabilities_stay_in_unit_interval_and_shrink() {
        let mut rng = crate::rng::derive_rng(37, 0);
        let mut s = Sketch::new(4, 0.3, 0.2, 11).unwrap();
        let probe: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut last = s.acceptance_probability(&probe).unwrap();
        assert!((0.0..=1.0).contains(&last));
        for r in random_rows(&mut rng, 200, 4) {
            s.offer(&r).unwrap();
            let p = s.acceptance_probability(&probe).unwrap();
            assert!((0.0..=1.0).contains(&p));
            // Quadratic-form monotonicity: a growing Gram matrix can only
            // shrink a fixed row's probability.
            assert!(p <= last + 1e-12, "p grew from {last} to {p}");
            last = p;
        }
    }

    #[test]
    fn incremental_gram_matches_recomputed() {
        let mut rng = crate::rng::derive_rng(41, 0);
        let mut s = Sketch::new(5, 0.3, 0.2, 13).unwrap();
        feed(&mut s, &random_rows(&mut rng, 300, 5));
        let diff = (s.gram() - s.recomputed_gram()).norm();
        assert!(diff <= 1e-9 * (1.0 + s.gram().norm()));
    }

    #[test]
    fn bounds_when_hyperplanes_equal() {
        let mut rng = crate::rng::derive_rng(43, 0);
        let mut s = Sketch::new(3, 0.25, 0.1, 17).unwrap();
        feed(&mut s, &random_rows(&mut rng, 100, 3));
        let h = Hyperplane::new(&[0.6, 0.8, -0.3], false).unwrap();
        let (lo, hi) = s.bounds(100, &h, &h, 1.0).unwrap();
        assert_eq!(lo, 0.0);
        let dprime = 4.0 * 2.0;
        let expect = (dprime * 0.1 / 100.0_f64).sqrt() / 0.75;
        assert_abs_diff_eq!(hi, expect, epsilon = 1e-12);
    }

    #[test]
    fn bounds_collapse_as_delta_vanishes() {
        // Rebuild the same accepted rows with a tiny delta: the interval
        // approaches (1/(1+eps), 1/(1-eps)) * ||A~u|| / sqrt(n).
        let mut rng = crate::rng::derive_rng(47, 0);
        let rows = random_rows(&mut rng, 50, 3);
        let mut s = Sketch::new(3, 0.25, 0.1, 19).unwrap();
        feed(&mut s, &rows);
        let stored: Vec<Vec<f64>> = s.rows().iter().map(|r| r.as_slice().to_vec()).collect();
        let tiny = Sketch::from_rows(3, 0.25, 1e-15, stored, 50).unwrap();
        let h1 = Hyperplane::new(&[1.0, 0.0, 0.0], false).unwrap();
        let h2 = Hyperplane::new(&[0.0, 1.0, -1.0], false).unwrap();
        let base = (tiny.sq_norm(&h1, &h2).unwrap() / 50.0).sqrt();
        let (lo, hi) = tiny.bounds(50, &h1, &h2, 1.0).unwrap();
        assert_abs_diff_eq!(lo, base / 1.25, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, base / 0.75, epsilon = 1e-9);
    }

    #[test]
    fn interval_contains_true_distance_often() {
        let mut hits = 0;
        let mut total = 0;
        for seed in 0..30 {
            let mut rng = crate::rng::derive_rng(1000 + seed, 0);
            let n = 400;
            let pts: Vec<[f64; 2]> =
                (0..n).map(|_| [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
            let q = PointSet::from_xy(&pts).unwrap();
            let mut s = Sketch::new(3, 0.25, 0.1, seed).unwrap();
            for p in &pts {
                s.offer(&[p[0], p[1], 1.0]).unwrap();
            }
            for _ in 0..10 {
                let h1 = crate::testutil::random_plane(&mut rng, 2, false);
                let h2 = crate::testutil::random_plane(&mut rng, 2, false);
                if h1.offset().abs() > 1.0 || h2.offset().abs() > 1.0 {
                    continue;
                }
                let d = dist(&q, &h1, &h2).unwrap();
                let (lo, hi) = s.bounds(n, &h1, &h2, 1.0).unwrap();
                total += 1;
                if lo <= d && d <= hi {
                    hits += 1;
                }
            }
        }
        assert!(hits as f64 >= 0.85 * total as f64, "{hits}/{total} inside interval");
    }

    #[test]
    fn median_of_three() {
        let mut sketches = Vec::new();
        for seed in 0..3 {
            let mut rng = crate::rng::derive_rng(60 + seed, 0);
            let mut s = Sketch::new(3, 0.3, 0.2, seed).unwrap();
            feed(&mut s, &random_rows(&mut rng, 80, 3));
            sketches.push(s);
        }
        let h1 = Hyperplane::new(&[1.0, 0.0, 0.5], false).unwrap();
        let h2 = Hyperplane::new(&[0.0, 1.0, 0.0], false).unwrap();
        let mut vals: Vec<f64> =
            sketches.iter().map(|s| s.sq_norm(&h1, &h2).unwrap()).collect();
        vals.sort_unstable_by(f64::total_cmp);
        let med = median_estimate(&sketches, &h1, &h2).unwrap();
        assert_eq!(med, vals[1]);

        let single = median_estimate(&sketches[..1], &h1, &h2).unwrap();
        assert_eq!(single, sketches[0].sq_norm(&h1, &h2).unwrap());

        assert_eq!(median_estimate(&[], &h1, &h2), Err(Error::EmptyInput));
    }

    #[test]
    fn median_even_count_averages_middles() {
        let mut sketches = Vec::new();
        for seed in 0..4 {
            let mut rng = crate::rng::derive_rng(80 + seed, 0);
            let mut s = Sketch::new(3, 0.3, 0.2, seed).unwrap();
            feed(&mut s, &random_rows(&mut rng, 60, 3));
            sketches.push(s);
        }
        let h1 = Hyperplane::new(&[1.0, 0.0, 0.5], false).unwrap();
        let h2 = Hyperplane::new(&[0.0, 1.0, 0.0], false).unwrap();
        let mut vals: Vec<f64> =
            sketches.iter().map(|s| s.sq_norm(&h1, &h2).unwrap()).collect();
        vals.sort_unstable_by(f64::total_cmp);
        let med = median_estimate(&sketches, &h1, &h2).unwrap();
        assert_abs_diff_eq!(med, (vals[1] + vals[2]) / 2.0, epsilon = 1e-15);
    }
}
