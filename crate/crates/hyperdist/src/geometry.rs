//! Point sets, canonical hyperplane coefficients, and signed-distance
//! embeddings — the substrate every distance in this crate is built on.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Entries with absolute value at or below this count as zero when the
/// canonical sign rule looks for the first nonzero coefficient. Applied after
/// normal normalization so near-zero leading coefficients cannot flip-flop
/// the sign.
pub const SIGN_TOL: f64 = 1e-12;

/// A finite point set `Q` in `R^d` with optional per-point weights.
///
/// An unweighted set behaves exactly as if every point carried weight `1/n`,
/// so weighted and unweighted code paths share one implementation.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: DMatrix<f64>,
    weights: Option<DVector<f64>>,
}

impl PointSet {
    /// Wrap an n×d coordinate matrix (one point per row) with uniform
    /// weights.
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::InvalidData(
                "point set needs at least one point and one coordinate".into(),
            ));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidData("point coordinates must be finite".into()));
        }
        Ok(Self { points, weights: None })
    }

    /// Wrap an n×d coordinate matrix with explicit positive weights.
    pub fn with_weights(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        let mut set = Self::new(points)?;
        if weights.len() != set.n() {
            return Err(Error::DimensionMismatch { expected: set.n(), actual: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::NonpositiveWeight);
        }
        set.weights = Some(DVector::from_vec(weights));
        Ok(set)
    }

    /// Build from a slice of equally long coordinate rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidData("rows have inconsistent lengths".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(rows.len(), d, &flat))
    }

    /// Build a planar point set.
    pub fn from_xy(points: &[[f64; 2]]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let flat: Vec<f64> = points.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(points.len(), 2, &flat))
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.points.row(i).iter().copied().collect()
    }

    /// Weight of point `i`; `1/n` when no explicit weights were given.
    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0 / self.n() as f64,
        }
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    /// Probability measure over the points: explicit weights normalized to
    /// sum to one, or the uniform `1/n`.
    pub fn measure(&self) -> DVector<f64> {
        match &self.weights {
            Some(w) => w / w.sum(),
            None => DVector::from_element(self.n(), 1.0 / self.n() as f64),
        }
    }

    /// The n×(d+1) matrix whose i-th row is `(q_i, 1)`.
    pub(crate) fn homogeneous(&self) -> DMatrix<f64> {
        let (n, d) = (self.n(), self.dim());
        let mut m = DMatrix::from_element(n, d + 1, 1.0);
        m.view_mut((0, 0), (n, d)).copy_from(&self.points);
        m
    }

    /// True iff the rows `(q_i, 1)` span all of `R^{d+1}`, judged by the
    /// smallest singular value against `max(n, d+1) * eps * sigma_max`.
    ///
    /// This is the condition under which the signed-distance embedding is
    /// injective and [`crate::metrics::dist`] is a true metric rather than a
    /// pseudo-metric.
    pub fn is_full_rank(&self) -> bool {
        let a = self.homogeneous();
        let (n, m) = a.shape();
        if n < m {
            return false;
        }
        let sv = a.singular_values();
        let smax = sv.max();
        if smax <= 0.0 {
            return false;
        }
        let tol = n.max(m) as f64 * f64::EPSILON * smax;
        sv.min() > tol
    }

    /// Signed distances from every point to `h`, as one vector.
    pub(crate) fn signed_distances(&self, h: &Hyperplane) -> Result<DVector<f64>> {
        if h.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: h.dim() });
        }
        let normal = h.coeffs.rows(0, self.dim());
        let mut v = &self.points * normal;
        v.add_scalar_mut(h.offset());
        Ok(v)
    }

    /// Map `h` to the vector of signed distances scaled by `1/sqrt(n)`.
    ///
    /// The Euclidean distance between two embeddings of the same point set is
    /// exactly [`crate::metrics::dist`] of the two hyperplanes.
    pub fn embed(&self, h: &Hyperplane) -> Result<EmbeddingVector> {
        let mut values = self.signed_distances(h)?;
        values /= (self.n() as f64).sqrt();
        Ok(EmbeddingVector { values, source_n: self.n() })
    }

    /// Apply `x -> rotation * x + shift` to every point.
    pub fn rigid_transform(&self, rotation: &DMatrix<f64>, shift: &[f64]) -> Result<PointSet> {
        let d = self.dim();
        if rotation.nrows() != d || rotation.ncols() != d || shift.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rotation.nrows() });
        }
        let mut pts = &self.points * rotation.transpose();
        for mut row in pts.row_iter_mut() {
            for (j, s) in shift.iter().enumerate() {
                row[j] += s;
            }
        }
        Ok(Self { points: pts, weights: self.weights.clone() })
    }
}

/// A hyperplane `{x : u_1 x_1 + ... + u_d x_d + u_{d+1} = 0}` stored as a
/// coefficient vector with unit normal.
///
/// Non-oriented hyperplanes are kept canonical (first nonzero entry positive)
/// so every hyperplane has exactly one representation. Oriented hyperplanes
/// keep their sign: `u` and `-u` denote different oriented objects even
/// though they cover the same point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    coeffs: DVector<f64>,
    oriented: bool,
}

impl Hyperplane {
    /// Canonicalize a raw coefficient slice of length d+1.
    pub fn new(raw: &[f64], oriented: bool) -> Result<Self> {
        Self::from_vector(DVector::from_row_slice(raw), oriented)
    }

    /// Canonicalize a raw coefficient vector of length d+1.
    pub fn from_vector(raw: DVector<f64>, oriented: bool) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::InvalidData(
                "a hyperplane needs at least two coefficients".into(),
            ));
        }
        if raw.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidData("hyperplane coefficients must be finite".into()));
        }
        let d = raw.len() - 1;
        let norm = raw.rows(0, d).norm();
        if norm <= SIGN_TOL {
            return Err(Error::DegenerateNormal);
        }
        let mut coeffs = raw;
        // Skip the rescale when the normal is already unit length. This makes
        // canonicalization exactly idempotent while keeping the unit-norm
        // invariant within its 1e-12 tolerance.
        if (norm - 1.0).abs() > SIGN_TOL {
            coeffs /= norm;
        }
        if !oriented {
            // The rule is applied over all d+1 entries; for a valid
            // hyperplane the first nonzero one always sits in the normal.
            if let Some(first) = coeffs.iter().find(|x| x.abs() > SIGN_TOL) {
                if *first < 0.0 {
                    coeffs.neg_mut();
                }
            }
        }
        Ok(Self { coeffs, oriented })
    }

    /// Ambient dimension d.
    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// The unit normal (first d coefficients).
    pub fn normal(&self) -> DVector<f64> {
        self.coeffs.rows(0, self.dim()).into_owned()
    }

    /// The offset coefficient u_{d+1}.
    pub fn offset(&self) -> f64 {
        self.coeffs[self.dim()]
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    /// The same point set with the opposite orientation.
    pub fn flipped(&self) -> Hyperplane {
        Hyperplane { coeffs: -&self.coeffs, oriented: self.oriented }
    }

    /// Signed distance from `point` to its closest point on the hyperplane:
    /// the dot product with the unit normal plus the offset. The absolute
    /// value is the Euclidean point-to-hyperplane distance; the sign tells
    /// the side.
    pub fn signed_distance(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: point.len() });
        }
        let mut acc = 0.0;
        for (u, x) in self.coeffs.iter().zip(point.iter()) {
            acc += u * x;
        }
        Ok(acc + self.offset())
    }

    /// Slope/intercept form `y = a x + b` for lines in the plane; `None` for
    /// vertical lines or higher-dimensional hyperplanes.
    pub fn slope_intercept(&self) -> Option<(f64, f64)> {
        if self.dim() != 2 || self.coeffs[1].abs() <= SIGN_TOL {
            return None;
        }
        Some((-self.coeffs[0] / self.coeffs[1], -self.coeffs[2] / self.coeffs[1]))
    }

    /// Co-transform the hyperplane with `x -> rotation * x + shift`.
    ///
    /// Oriented hyperplanes keep the transported sign, which is what makes
    /// the oriented distance invariant under rigid motions of the whole
    /// configuration. Non-oriented results are re-canonicalized.
    pub fn rigid_transform(&self, rotation: &DMatrix<f64>, shift: &[f64]) -> Result<Hyperplane> {
        let d = self.dim();
        if rotation.nrows() != d || rotation.ncols() != d || shift.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: rotation.nrows() });
        }
        let normal = rotation * self.coeffs.rows(0, d);
        let offset = self.offset() - normal.dot(&DVector::from_row_slice(shift));
        let mut raw = DVector::zeros(d + 1);
        raw.rows_mut(0, d).copy_from(&normal);
        raw[d] = offset;
        Hyperplane::from_vector(raw, self.oriented)
    }
}

/// The image of a hyperplane under the signed-distance embedding of a point
/// set: `v_Q(h) / sqrt(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: DVector<f64>,
    source_n: usize,
}

impl EmbeddingVector {
    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.len() == 0
    }

    /// Number of points in the generating set; always equals `len`.
    pub fn source_n(&self) -> usize {
        self.source_n
    }

    /// Euclidean distance between two embeddings of the same point set.
    pub fn distance_to(&self, other: &EmbeddingVector) -> Result<f64> {
        if self.source_n != other.source_n {
            return Err(Error::DimensionMismatch { expected: self.source_n, actual: other.source_n });
        }
        Ok((&self.values - &other.values).norm())
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn canonicalize_is_scale_invariant(
            u1 in -5.0_f64..5.0,
            u2 in -5.0_f64..5.0,
            u3 in -5.0_f64..5.0,
            c in prop::sample::select(vec![-3.0_f64, -0.7, 0.2, 1.0, 42.0]),
        ) {
            prop_assume!((u1 * u1 + u2 * u2).sqrt() > 1e-6);
            let base = Hyperplane::new(&[u1, u2, u3], false).unwrap();
            let scaled = Hyperplane::new(&[c * u1, c * u2, c * u3], false).unwrap();
            let diff = (base.coeffs() - scaled.coeffs()).norm();
            prop_assert!(diff <= 1e-12, "diff = {diff}");
        }

        #[test]
        fn canonical_invariants_hold(
            raw in prop::collection::vec(-10.0_f64..10.0, 2..=6),
        ) {
            let d = raw.len() - 1;
            let norm: f64 = raw[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-6);
            let h = Hyperplane::new(&raw, false).unwrap();
            let unit: f64 = h.coeffs().rows(0, d).norm();
            prop_assert!((unit - 1.0).abs() <= 1e-12);
            let first = h.coeffs().iter().find(|x| x.abs() > SIGN_TOL).copied().unwrap();
            prop_assert!(first > 0.0);
        }
    }
}
