//! The data-dependent distance between hyperplanes and its variants.
//!
//! Two regressors are compared by how differently they sit relative to a
//! common point set: each hyperplane maps to its vector of signed distances
//! to the points, and [`dist`] is the Euclidean distance of those vectors
//! scaled by `1/sqrt(n)`. On a full-rank point set this is a metric; on a
//! degenerate one it is only a pseudo-metric. `PointSet::is_full_rank` is the
//! diagnostic for that status — distance evaluation itself never requires
//! full rank.
//!
//! The unsigned and Frobenius variants follow their definitions verbatim:
//! the unsigned variant keeps the `1/n` weighting, the Frobenius variant is
//! unnormalized, so the two scale differently by design.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, PointSet};

fn check_pair(q: &PointSet, h1: &Hyperplane, h2: &Hyperplane) -> Result<()> {
    if h1.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), actual: h1.dim() });
    }
    if h2.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), actual: h2.dim() });
    }
    if h1.oriented() != h2.oriented() {
        return Err(Error::OrientationMismatch);
    }
    Ok(())
}

/// `d_Q(h1, h2)`: the norm of the difference of the signed-distance
/// embeddings, scaled by `1/sqrt(n)`.
///
/// For parallel hyperplanes this reduces to the absolute offset difference.
pub fn dist(q: &PointSet, h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
    check_pair(q, h1, h2)?;
    let dv = q.signed_distances(h1)? - q.signed_distances(h2)?;
    Ok((dv.norm_squared() / q.n() as f64).sqrt())
}

/// Weighted form `d_{Q,W}`: `(sum_i w_i (v_i(h1) - v_i(h2))^2)^(1/2)` with
/// the stored per-point weights. Uniform weights `1/n` recover [`dist`]
/// exactly.
pub fn dist_weighted(q: &PointSet, h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
    check_pair(q, h1, h2)?;
    let dv = q.signed_distances(h1)? - q.signed_distances(h2)?;
    let mut acc = 0.0;
    for (i, x) in dv.iter().enumerate() {
        acc += q.weight(i) * x * x;
    }
    Ok(acc.sqrt())
}

/// Unsigned variant: the embedding uses `|v_i|` instead of `v_i`.
///
/// A metric only under a stronger condition on `Q` (five points with no
/// three collinear in the plane; `2d+1` points in general position in R^d).
pub fn dist_unsigned(q: &PointSet, h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
    check_pair(q, h1, h2)?;
    let v1 = q.signed_distances(h1)?;
    let v2 = q.signed_distances(h2)?;
    let mut acc = 0.0;
    for (a, b) in v1.iter().zip(v2.iter()) {
        let diff = a.abs() - b.abs();
        acc += diff * diff;
    }
    Ok((acc / q.n() as f64).sqrt())
}

/// Frobenius variant: `|| V_{Q,h1} - V_{Q,h2} ||_F` over the matrices of
/// point-to-hyperplane projection vectors. No `1/sqrt(n)` factor appears in
/// its definition, so it scales with `sqrt(n)` where [`dist`] does not.
pub fn dist_frobenius(q: &PointSet, h1: &Hyperplane, h2: &Hyperplane) -> Result<f64> {
    check_pair(q, h1, h2)?;
    let p1 = ProjectionMatrix::new(q, h1)?;
    let p2 = ProjectionMatrix::new(q, h2)?;
    Ok((p1.rows() - p2.rows()).norm())
}

/// The n×d matrix whose i-th row is the vector from `q_i` to its closest
/// point on a hyperplane. Every row is parallel to the hyperplane normal.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    rows: nalgebra::DMatrix<f64>,
}

impl ProjectionMatrix {
    pub fn new(q: &PointSet, h: &Hyperplane) -> Result<Self> {
        let v = q.signed_distances(h)?;
        let normal = h.normal();
        let mut rows = nalgebra::DMatrix::zeros(q.n(), q.dim());
        for i in 0..q.n() {
            for j in 0..q.dim() {
                rows[(i, j)] = -v[i] * normal[j];
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &nalgebra::DMatrix<f64> {
        &self.rows
    }

    /// The projection of `q_i` onto the hyperplane.
    pub fn closest_point(&self, q: &PointSet, i: usize) -> Vec<f64> {
        (0..q.dim()).map(|j| q.coords()[(i, j)] + self.rows[(i, j)]).collect()
    }
}

/// A metric ball of [`dist`] rewritten as a single linear inequality in the
/// lifted variables `y_j = u_j`, `y_{j,j'} = u_j u_{j'}`.
///
/// The coefficients depend only on the point set, the center and the radius;
/// evaluating the linear form on a query hyperplane gives
/// `n * (dist(Q, center, h)^2 - r^2)`, so membership in the closed ball is
/// the sign of one linear functional in dimension `(d^2 + 5d + 4) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedBall {
    ambient_dim: usize,
    n: usize,
    radius: f64,
    a0: f64,
    linear: DVector<f64>,
    quad: Vec<f64>, // a_{j,j'} packed over j <= j', row-major
}

/// Build the lifted form of the closed ball around `center` with radius `r`.
pub fn lift_ball(q: &PointSet, center: &Hyperplane, radius: f64) -> Result<LiftedBall> {
    if center.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), actual: center.dim() });
    }
    if center.oriented() {
        return Err(Error::OrientationMismatch);
    }
    if radius.is_nan() || radius < 0.0 {
        return Err(Error::BadParameter("radius must be nonnegative".into()));
    }
    if !q.is_full_rank() {
        return Err(Error::NotFullRank);
    }

    let (n, d) = (q.n(), q.dim());
    let nf = n as f64;
    let w = q.signed_distances(center)?;
    let pts = q.coords();

    let a0 = w.norm_squared() - nf * radius * radius;

    let mut linear = DVector::zeros(d + 1);
    for j in 0..d {
        let mut s = 0.0;
        for i in 0..n {
            s += pts[(i, j)] * w[i];
        }
        linear[j] = -2.0 * s;
    }
    linear[d] = -2.0 * w.sum();

    let mut quad = Vec::with_capacity((d + 1) * (d + 2) / 2);
    for j in 0..=d {
        for jp in j..=d {
            let coeff = if j == d && jp == d {
                nf
            } else if jp == d {
                2.0 * pts.column(j).sum()
            } else if j == jp {
                pts.column(j).iter().map(|x| x * x).sum()
            } else {
                2.0 * pts.column(j).iter().zip(pts.column(jp).iter()).map(|(a, b)| a * b).sum::<f64>()
            };
            quad.push(coeff);
        }
    }

    Ok(LiftedBall { ambient_dim: d, n, radius, a0, linear, quad })
}

impl LiftedBall {
    /// Dimension of the lifted space: `(d^2 + 5d + 4) / 2`.
    pub fn lifted_dimension(&self) -> usize {
        let d = self.ambient_dim;
        (d * d + 5 * d + 4) / 2
    }

    /// Number of stored coefficients, `lifted_dimension() + 1` (the constant
    /// term included).
    pub fn coefficient_count(&self) -> usize {
        self.lifted_dimension() + 1
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Evaluate the lifted linear form on `h`; equals
    /// `n * (dist(Q, center, h)^2 - r^2)` up to rounding.
    pub fn evaluate(&self, h: &Hyperplane) -> Result<f64> {
        if h.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, actual: h.dim() });
        }
        if h.oriented() {
            return Err(Error::OrientationMismatch);
        }
        let u = h.coeffs();
        let mut val = self.a0;
        for j in 0..=self.ambient_dim {
            val += self.linear[j] * u[j];
        }
        let mut idx = 0;
        for j in 0..=self.ambient_dim {
            for jp in j..=self.ambient_dim {
                val += self.quad[idx] * u[j] * u[jp];
                idx += 1;
            }
        }
        Ok(val)
    }

    /// Slack of the membership test, scaled so it corresponds to a 1e-9 band
    /// around the ball boundary in distance units.
    pub fn boundary_tolerance(&self) -> f64 {
        1e-9 * self.n as f64 * (1.0 + 2.0 * self.radius)
    }

    /// Closed-ball membership: true iff the lifted form is nonpositive
    /// within the boundary tolerance. Agrees with `dist(Q, center, h) <= r`
    /// outside a 1e-9 band around the boundary.
    pub fn contains(&self, h: &Hyperplane) -> Result<bool> {
        Ok(self.evaluate(h)? <= self.boundary_tolerance())
    }
}
