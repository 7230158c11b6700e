//! Piecewise-linear curves in the plane: the (k+2)-line representation, the
//! curve distance and its flattened embedding, simplification to a fixed
//! segment count, and means of oriented lines and curves.
//!
//! A curve with k segments maps to k support lines plus two perpendicularcap
//! lines through its endpoints; the mapping is invertible, so the
//! root-sum-square of per-line distances is a metric on curves whenever the
//! underlying point-set distance is one. All lines carry an orientation
//! (travel direction rotated +90 degrees gives the normal), which keeps the
//! distance invariant under rigid motions and makes line means well defined.

use nalgebra::{DVector, Matrix2, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, PointSet};

/// Minimum squared length for a curve segment and minimum |cross product|
/// for two unit directions to count as distinct lines.
const GEOM_TOL: f64 = 1e-12;

/// A curve of `k >= 1` ordered line segments in the plane, stored as its
/// k+1 vertices. Consecutive vertices must be distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveK {
    vertices: Vec<[f64; 2]>,
}

impl CurveK {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewPoints { needed: 2, actual: vertices.len() });
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidData("curve vertices must be finite".into()));
        }
        for w in vertices.windows(2) {
            let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
            if (dx * dx + dy * dy).sqrt() <= GEOM_TOL {
                return Err(Error::InvalidData("zero-length curve segment".into()));
            }
        }
        Ok(Self { vertices })
    }

    /// Number of segments.
    pub fn k(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Unit travel direction of segment `j`.
    fn direction(&self, j: usize) -> [f64; 2] {
        let (a, b) = (self.vertices[j], self.vertices[j + 1]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = (dx * dx + dy * dy).sqrt();
        [dx / len, dy / len]
    }
}

/// The ordered k+2 oriented lines representing a curve: one support line per
/// segment, capped by perpendiculars through the first and last vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LineRepresentation {
    lines: Vec<Hyperplane>,
}

impl LineRepresentation {
    pub fn new(lines: Vec<Hyperplane>) -> Result<Self> {
        if lines.len() < 3 {
            return Err(Error::TooFewPoints { needed: 3, actual: lines.len() });
        }
        for l in &lines {
            if l.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, actual: l.dim() });
            }
            if !l.oriented() {
                return Err(Error::OrientationMismatch);
            }
        }
        let k = lines.len() - 2;
        let dot = |a: &Hyperplane, b: &Hyperplane| {
            a.coeffs()[0] * b.coeffs()[0] + a.coeffs()[1] * b.coeffs()[1]
        };
        if dot(&lines[0], &lines[1]).abs() > 1e-9 {
            return Err(Error::InvalidData("first cap line is not perpendicular".into()));
        }
        if dot(&lines[k + 1], &lines[k]).abs() > 1e-9 {
            return Err(Error::InvalidData("last cap line is not perpendicular".into()));
        }
        // Consecutive support lines must intersect to recover a vertex.
        for i in 1..k {
            let cross = lines[i].coeffs()[0] * lines[i + 1].coeffs()[1]
                - lines[i].coeffs()[1] * lines[i + 1].coeffs()[0];
            if cross.abs() <= GEOM_TOL {
                return Err(Error::ParallelLines { index: i });
            }
        }
        Ok(Self { lines })
    }

    pub fn lines(&self) -> &[Hyperplane] {
        &self.lines
    }

    /// Number of segments of the represented curve.
    pub fn k(&self) -> usize {
        self.lines.len() - 2
    }
}

fn oriented_line_through(normal: [f64; 2], point: [f64; 2]) -> Result<Hyperplane> {
    Hyperplane::new(
        &[normal[0], normal[1], -(normal[0] * point[0] + normal[1] * point[1])],
        true,
    )
}

/// Map a curve to its k+2 oriented lines. The normal of each support line is
/// the travel direction rotated +90 degrees; the caps take the travel
/// direction itself as normal, through the first and last vertex.
pub fn curve_to_lines(curve: &CurveK) -> Result<LineRepresentation> {
    let k = curve.k();
    let dirs: Vec<[f64; 2]> = (0..k).map(|j| curve.direction(j)).collect();
    for j in 0..k.saturating_sub(1) {
        let cross = dirs[j][0] * dirs[j + 1][1] - dirs[j][1] * dirs[j + 1][0];
        if cross.abs() <= GEOM_TOL {
            return Err(Error::DegenerateTurn { segment: j });
        }
    }
    let verts = curve.vertices();
    let mut lines = Vec::with_capacity(k + 2);
    lines.push(oriented_line_through(dirs[0], verts[0])?);
    for j in 0..k {
        lines.push(oriented_line_through([-dirs[j][1], dirs[j][0]], verts[j])?);
    }
    lines.push(oriented_line_through(dirs[k - 1], verts[k])?);
    LineRepresentation::new(lines)
}

fn intersect(l1: &Hyperplane, l2: &Hyperplane) -> Option<[f64; 2]> {
    let (a1, b1, c1) = (l1.coeffs()[0], l1.coeffs()[1], l1.coeffs()[2]);
    let (a2, b2, c2) = (l2.coeffs()[0], l2.coeffs()[1], l2.coeffs()[2]);
    let det = a1 * b2 - a2 * b1;
    if det.abs() <= GEOM_TOL {
        return None;
    }
    Some([(b1 * c2 - b2 * c1) / det, (a2 * c1 - a1 * c2) / det])
}

/// Recover the curve from its line representation: vertex `i` is the
/// intersection of lines `i` and `i+1`. Inverse of [`curve_to_lines`].
pub fn lines_to_curve(rep: &LineRepresentation) -> Result<CurveK> {
    let lines = rep.lines();
    let k = rep.k();
    let mut verts = Vec::with_capacity(k + 1);
    for i in 0..=k {
        verts.push(intersect(&lines[i], &lines[i + 1]).ok_or(Error::ParallelLines { index: i })?);
    }
    CurveK::new(verts)
}

/// Curve distance: root-sum-square of the per-line hyperplane distances over
/// the k+2 line representations. A metric on k-segment curves when `Q` is
/// full rank.
pub fn dist_curves(q: &PointSet, c1: &CurveK, c2: &CurveK) -> Result<f64> {
    if c1.k() != c2.k() {
        return Err(Error::MismatchedK { left: c1.k(), right: c2.k() });
    }
    let r1 = curve_to_lines(c1)?;
    let r2 = curve_to_lines(c2)?;
    let mut acc = 0.0;
    for (l1, l2) in r1.lines().iter().zip(r2.lines().iter()) {
        let d = crate::metrics::dist(q, l1, l2)?;
        acc += d * d;
    }
    Ok(acc.sqrt())
}

/// Flatten a curve to the concatenation of its k+2 per-line embeddings. The
/// Euclidean distance between two flattened curves equals [`dist_curves`].
pub fn curve_embed(q: &PointSet, curve: &CurveK) -> Result<DVector<f64>> {
    let rep = curve_to_lines(curve)?;
    let n = q.n();
    let mut out = DVector::zeros((curve.k() + 2) * n);
    for (j, line) in rep.lines().iter().enumerate() {
        let e = q.embed(line)?;
        out.rows_mut(j * n, n).copy_from(e.values());
    }
    Ok(out)
}

fn chord_deviation(p: &[f64; 2], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let len = (bx * bx + by * by).sqrt();
    if len <= GEOM_TOL {
        let (dx, dy) = (p[0] - a[0], p[1] - a[1]);
        return (dx * dx + dy * dy).sqrt();
    }
    ((bx * (a[1] - p[1]) - (a[0] - p[0]) * by) / len).abs()
}

/// Simplify a polyline to exactly `k` segments.
///
/// Vertices are ranked by recursive max-deviation (the order Douglas-Peucker
/// would select them); the endpoints plus the k-1 most important interior
/// vertices are kept, in original order. Consecutive duplicate input points
/// are dropped first.
pub fn simplify_to_k(polyline: &[[f64; 2]], k: usize) -> Result<CurveK> {
    if k == 0 {
        return Err(Error::BadParameter("segment count must be at least 1".into()));
    }
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(polyline.len());
    for p in polyline {
        let dup = pts.last().is_some_and(|q: &[f64; 2]| {
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            (dx * dx + dy * dy).sqrt() <= GEOM_TOL
        });
        if !dup {
            pts.push(*p);
        }
    }
    let m = pts.len();
    if m < k + 1 {
        return Err(Error::TooFewPoints { needed: k + 1, actual: m });
    }
    if m == k + 1 {
        return CurveK::new(pts);
    }

    let mut importance = vec![0.0_f64; m];
    let mut stack = vec![(0usize, m - 1)];
    while let Some((a, b)) = stack.pop() {
        if b <= a + 1 {
            continue;
        }
        let mut best = a + 1;
        let mut best_dev = -1.0;
        for i in a + 1..b {
            let dev = chord_deviation(&pts[i], &pts[a], &pts[b]);
            if dev > best_dev {
                best_dev = dev;
                best = i;
            }
        }
        importance[best] = best_dev;
        stack.push((a, best));
        stack.push((best, b));
    }

    let mut interior: Vec<usize> = (1..m - 1).collect();
    interior.sort_by(|&i, &j| {
        importance[j].partial_cmp(&importance[i]).expect("finite deviations").then(i.cmp(&j))
    });
    let mut keep: Vec<usize> = interior[..k - 1].to_vec();
    keep.push(0);
    keep.push(m - 1);
    keep.sort_unstable();
    CurveK::new(keep.into_iter().map(|i| pts[i]).collect())
}

/// Real roots of `x^4 + c3 x^3 + c2 x^2 + c1 x + c0`, via the eigenvalues of
/// the companion matrix, sharpened by guarded Newton steps.
fn quartic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let eval = |x: f64| (((x + c3) * x + c2) * x + c1) * x + c0;
    let deriv = |x: f64| ((4.0 * x + 3.0 * c3) * x + 2.0 * c2) * x + c1;
    let comp = Matrix4::new(
        0.0, 0.0, 0.0, -c0, //
        1.0, 0.0, 0.0, -c1, //
        0.0, 1.0, 0.0, -c2, //
        0.0, 0.0, 1.0, -c3,
    );
    let eig = comp.complex_eigenvalues();
    let mut roots = Vec::with_capacity(4);
    for z in eig.iter() {
        if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) {
            let mut r = z.re;
            for _ in 0..3 {
                let f = eval(r);
                let fp = deriv(r);
                if fp == 0.0 {
                    break;
                }
                let next = r - f / fp;
                if !next.is_finite() || eval(next).abs() > f.abs() {
                    break;
                }
                r = next;
            }
            roots.push(r);
        }
    }
    roots
}

/// Minimize `e1 a^2 + e2 b^2 + e3 a + e4 b` on the unit circle.
///
/// Stationary points satisfy `a = -e3 / (2 e1 + 2 lambda)`,
/// `b = -e4 / (2 e2 + 2 lambda)`; eliminating (a, b) against the constraint
/// leaves a quartic in `2 lambda`. Candidates from its real roots, from the
/// `lambda = -e1 / -e2` branches (these arise when e3 or e4 vanishes), and
/// from the axis points are compared by objective value.
fn minimize_on_circle(e1: f64, e2: f64, e3: f64, e4: f64) -> (f64, f64) {
    let scale = 1.0_f64.max(e1.abs()).max(e2.abs()).max(e3.abs()).max(e4.abs());
    let (e1, e2, e3, e4) = (e1 / scale, e2 / scale, e3 / scale, e4 / scale);

    let mut candidates: Vec<(f64, f64)> =
        vec![(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
    let a1 = 2.0 * e1;
    let a2 = 2.0 * e2;
    let tiny = 1e-12 * (1.0 + a1.abs() + a2.abs());

    let s = a1 + a2;
    let pr = a1 * a2;
    let c3 = 2.0 * s;
    let c2 = s * s + 2.0 * pr - e3 * e3 - e4 * e4;
    let c1 = 2.0 * s * pr - 2.0 * (e3 * e3 * a2 + e4 * e4 * a1);
    let c0 = pr * pr - e3 * e3 * a2 * a2 - e4 * e4 * a1 * a1;
    for p in quartic_real_roots(c3, c2, c1, c0) {
        let d1 = a1 + p;
        let d2 = a2 + p;
        if d1.abs() > tiny && d2.abs() > tiny {
            let (ta, tb) = (-e3 / d1, -e4 / d2);
            let norm = (ta * ta + tb * tb).sqrt();
            if norm > 1e-9 {
                candidates.push((ta / norm, tb / norm));
            }
        }
    }
    if (a2 - a1).abs() > tiny {
        let tb = -e4 / (a2 - a1);
        if tb.abs() <= 1.0 {
            let ta = (1.0 - tb * tb).sqrt();
            candidates.push((ta, tb));
            candidates.push((-ta, tb));
        }
        let ta = -e3 / (a1 - a2);
        if ta.abs() <= 1.0 {
            let tb = (1.0 - ta * ta).sqrt();
            candidates.push((ta, tb));
            candidates.push((ta, -tb));
        }
    }

    let objective = |a: f64, b: f64| e1 * a * a + e2 * b * b + e3 * a + e4 * b;
    let residual = |a: f64, b: f64| {
        let ga = 2.0 * e1 * a + e3;
        let gb = 2.0 * e2 * b + e4;
        let lam = -(a * ga + b * gb) / (2.0 * (a * a + b * b));
        ((ga + 2.0 * lam * a).powi(2) + (gb + 2.0 * lam * b).powi(2)).sqrt()
    };

    let mut best = candidates[0];
    let mut best_obj = objective(best.0, best.1);
    let mut best_res = residual(best.0, best.1);
    for &(ta, tb) in &candidates[1..] {
        let obj = objective(ta, tb);
        let res = residual(ta, tb);
        let window = 1e-12 * (1.0 + best_obj.abs());
        if obj < best_obj - window || (obj <= best_obj + window && res < best_res) {
            best = (ta, tb);
            best_obj = obj;
            best_res = res;
        }
    }
    best
}

/// Mean of oriented lines: the oriented line minimizing the sum of squared
/// distances to the inputs.
///
/// The unconstrained offset is eliminated in closed form, the remaining
/// circle-constrained quadratic is rotated into diagonal coordinates by a
/// 2x2 eigendecomposition, and the Lagrangian stationarity system is solved
/// through the quartic it reduces to. All real candidates are evaluated and
/// the global minimizer returned.
pub fn mean_oriented_lines(lines: &[Hyperplane], q: &PointSet) -> Result<Hyperplane> {
    if lines.is_empty() {
        return Err(Error::EmptyInput);
    }
    if q.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: q.dim() });
    }
    for l in lines {
        if l.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: l.dim() });
        }
        if !l.oriented() {
            return Err(Error::OrientationMismatch);
        }
    }
    let n = q.n() as f64;
    let m = lines.len() as f64;
    let pts = q.coords();

    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..q.n() {
        let (x, y) = (pts[(i, 0)], pts[(i, 1)]);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let (mut sd, mut sxd, mut syd) = (0.0, 0.0, 0.0);
    for l in lines {
        let v = q.signed_distances(l)?;
        for i in 0..q.n() {
            sd += v[i];
            sxd += pts[(i, 0)] * v[i];
            syd += pts[(i, 1)] * v[i];
        }
    }

    let alpha1 = m * sxx - m / n * sx * sx;
    let alpha2 = m * syy - m / n * sy * sy;
    let alpha3 = 2.0 * m * sxy - 2.0 * m * sx * sy / n;
    let alpha4 = 2.0 * sd * sx / n - 2.0 * sxd;
    let alpha5 = 2.0 * sd * sy / n - 2.0 * syd;

    let eig = SymmetricEigen::new(Matrix2::new(alpha1, alpha3 / 2.0, alpha3 / 2.0, alpha2));
    let (e1, e2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let p = eig.eigenvectors;
    let e3 = alpha4 * p[(0, 0)] + alpha5 * p[(1, 0)];
    let e4 = alpha4 * p[(0, 1)] + alpha5 * p[(1, 1)];

    let (ta, tb) = minimize_on_circle(e1, e2, e3, e4);
    let a = p[(0, 0)] * ta + p[(0, 1)] * tb;
    let b = p[(1, 0)] * ta + p[(1, 1)] * tb;
    let c = (sd - m * sx * a - m * sy * b) / (m * n);
    Hyperplane::new(&[a, b, c], true)
}

/// Default coreset size `ceil(2 (k+2) / (delta * eps^2))` for estimating the
/// curve distance by sensitivity sampling: one squared-distance term per
/// line of the representation instead of the single term of the hyperplane
/// case.
pub fn curve_sample_size(k: usize, eps: f64, delta: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParameter("eps and delta must lie in (0, 1)".into()));
    }
    Ok((2.0 * (k + 2) as f64 / (delta * eps * eps)).ceil() as usize)
}

/// Estimate the curve distance from a sensitivity-sampling coreset of `Q`:
/// the root-sum-square of the per-line coreset estimates over the two line
/// representations.
pub fn estimate_dist_curves(
    q: &PointSet,
    coreset: &crate::sensitivity::Coreset,
    c1: &CurveK,
    c2: &CurveK,
) -> Result<f64> {
    if c1.k() != c2.k() {
        return Err(Error::MismatchedK { left: c1.k(), right: c2.k() });
    }
    let r1 = curve_to_lines(c1)?;
    let r2 = curve_to_lines(c2)?;
    let mut acc = 0.0;
    for (l1, l2) in r1.lines().iter().zip(r2.lines().iter()) {
        let d = crate::sensitivity::estimate_dist(q, coreset, l1, l2)?;
        acc += d * d;
    }
    Ok(acc.sqrt())
}

/// Sum of squared oriented distances from `candidate` to every line in `lines`.
pub fn oriented_mean_objective(
    q: &PointSet,
    lines: &[Hyperplane],
    candidate: &Hyperplane,
) -> Result<f64> {
    let mut acc = 0.0;
    for l in lines {
        let d = crate::metrics::dist(q, candidate, l)?;
        acc += d * d;
    }
    Ok(acc)
}

fn perpendicular_cap(support: &Hyperplane, point: [f64; 2]) -> Result<Hyperplane> {
    let (a, b) = (support.coeffs()[0], support.coeffs()[1]);
    let v = support.signed_distance(&point)?;
    let proj = [point[0] - v * a, point[1] - v * b];
    // Travel direction of the support line is its normal rotated -90 degrees.
    oriented_line_through([b, -a], proj)
}

/// Mean curve: per-index means of the support lines, with cap lines rebuilt
/// perpendicular to the mean first/last support line through the projected
/// centroid of the corresponding endpoints.
pub fn mean_curve(curves: &[CurveK], q: &PointSet) -> Result<CurveK> {
    if curves.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = curves[0].k();
    for c in curves {
        if c.k() != k {
            return Err(Error::MismatchedK { left: k, right: c.k() });
        }
    }
    let reps: Vec<LineRepresentation> =
        curves.iter().map(curve_to_lines).collect::<Result<Vec<_>>>()?;

    let mut support_means = Vec::with_capacity(k);
    for idx in 1..=k {
        let group: Vec<Hyperplane> = reps.iter().map(|r| r.lines()[idx].clone()).collect();
        support_means.push(mean_oriented_lines(&group, q)?);
    }

    let m = curves.len() as f64;
    let mut first = [0.0, 0.0];
    let mut last = [0.0, 0.0];
    for c in curves {
        first[0] += c.vertices()[0][0] / m;
        first[1] += c.vertices()[0][1] / m;
        last[0] += c.vertices()[k][0] / m;
        last[1] += c.vertices()[k][1] / m;
    }

    let mut lines = Vec::with_capacity(k + 2);
    lines.push(perpendicular_cap(&support_means[0], first)?);
    lines.extend(support_means.iter().cloned());
    lines.push(perpendicular_cap(&support_means[k - 1], last)?);
    lines_to_curve(&LineRepresentation::new(lines)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn curve(verts: &[[f64; 2]]) -> CurveK {
        CurveK::new(verts.to_vec()).unwrap()
    }

    fn base_points() -> PointSet {
        PointSet::from_xy(&[[0.0, 0.0], [3.0, 1.0], [1.0, 2.0], [-1.0, 1.5], [2.0, -1.0]]).unwrap()
    }

    pub(crate) fn random_curve(rng: &mut impl Rng, k: usize) -> CurveK {
        loop {
            let mut verts = vec![[rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]];
            let mut theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut ok = true;
            for _ in 0..k {
                let turn: f64 = rng.gen_range(-2.2..2.2);
                if turn.sin().abs() < 1e-3 {
                    ok = false;
                    break;
                }
                theta += turn;
                let len = rng.gen_range(0.5..2.0);
                let cur = *verts.last().unwrap();
                verts.push([cur[0] + len * theta.cos(), cur[1] + len * theta.sin()]);
            }
            if !ok {
                continue;
            }
            if let Ok(c) = CurveK::new(verts) {
                if curve_to_lines(&c).is_ok() {
                    return c;
                }
            }
        }
    }

    #[test]
    fn axis_aligned_representation() {
        let rep = curve_to_lines(&curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])).unwrap();
        let coeffs: Vec<Vec<f64>> =
            rep.lines().iter().map(|l| l.coeffs().iter().copied().collect()).collect();
        assert_eq!(coeffs[0], vec![1.0, 0.0, 0.0]); // x = 0
        assert_eq!(coeffs[1], vec![0.0, 1.0, 0.0]); // y = 0
        assert_eq!(coeffs[2], vec![-1.0, 0.0, 1.0]); // x = 1, oriented
        assert_eq!(coeffs[3], vec![0.0, 1.0, -1.0]); // y = 1
    }

    #[test]
    fn single_segment_representation() {
        let rep = curve_to_lines(&curve(&[[0.0, 0.0], [2.0, 0.0]])).unwrap();
        let coeffs: Vec<Vec<f64>> =
            rep.lines().iter().map(|l| l.coeffs().iter().copied().collect()).collect();
        assert_eq!(coeffs[0], vec![1.0, 0.0, 0.0]); // x = 0
        assert_eq!(coeffs[1], vec![0.0, 1.0, 0.0]); // y = 0
        assert_eq!(coeffs[2], vec![1.0, 0.0, -2.0]); // x = 2
    }

    #[test]
    fn collinear_segments_rejected() {
        let c = curve(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(curve_to_lines(&c).err(), Some(Error::DegenerateTurn { segment: 0 }));
        // Doubling back along the same support line is just as unrecoverable.
        let back = curve(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]);
        assert_eq!(curve_to_lines(&back).err(), Some(Error::DegenerateTurn { segment: 0 }));
    }

    #[test]
    fn parallel_interior_lines_rejected() {
        let l0 = Hyperplane::new(&[1.0, 0.0, 0.0], true).unwrap();
        let l1 = Hyperplane::new(&[0.0, 1.0, 0.0], true).unwrap();
        let l2 = Hyperplane::new(&[0.0, 1.0, -1.0], true).unwrap();
        let l3 = Hyperplane::new(&[1.0, 0.0, -1.0], true).unwrap();
        assert_eq!(
            LineRepresentation::new(vec![l0, l1, l2, l3]).err(),
            Some(Error::ParallelLines { index: 1 })
        );
    }

    #[test]
    fn round_trip_axis_aligned() {
        let c = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let back = lines_to_curve(&curve_to_lines(&c).unwrap()).unwrap();
        for (a, b) in c.vertices().iter().zip(back.vertices().iter()) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-12);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn round_trip_random_curves() {
        let mut rng = derive_rng(51, 0);
        for _ in 0..500 {
            let k = rng.gen_range(1..=6);
            let c = random_curve(&mut rng, k);
            let back = lines_to_curve(&curve_to_lines(&c).unwrap()).unwrap();
            for (a, b) in c.vertices().iter().zip(back.vertices().iter()) {
                assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-9);
                assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn curve_distance_identity_and_symmetry() {
        let q = base_points();
        let mut rng = derive_rng(53, 0);
        let c1 = random_curve(&mut rng, 3);
        let c2 = random_curve(&mut rng, 3);
        assert_eq!(dist_curves(&q, &c1, &c1).unwrap(), 0.0);
        assert_eq!(dist_curves(&q, &c1, &c2).unwrap(), dist_curves(&q, &c2, &c1).unwrap());

        let c3 = random_curve(&mut rng, 4);
        assert_eq!(dist_curves(&q, &c1, &c3), Err(Error::MismatchedK { left: 3, right: 4 }));
    }

    #[test]
    fn vertical_translation_of_horizontal_segment() {
        // Only the support line moves; both caps are vertical and unchanged.
        let q = base_points();
        let t = 0.75;
        let c1 = curve(&[[0.0, 0.0], [2.0, 0.0]]);
        let c2 = curve(&[[0.0, t], [2.0, t]]);
        assert_abs_diff_eq!(dist_curves(&q, &c1, &c2).unwrap(), t, epsilon = 1e-12);
    }

    #[test]
    fn embedding_is_isometric() {
        let q = base_points();
        let mut rng = derive_rng(57, 0);
        for _ in 0..50 {
            let k = rng.gen_range(1..=5);
            let c1 = random_curve(&mut rng, k);
            let c2 = random_curve(&mut rng, k);
            let d = dist_curves(&q, &c1, &c2).unwrap();
            let e = (curve_embed(&q, &c1).unwrap() - curve_embed(&q, &c2).unwrap()).norm();
            assert!((d - e).abs() <= 1e-12 * (1.0 + d), "embed {e} vs dist {d}");
        }
    }

    #[test]
    fn embedding_dimension() {
        let mut rng = derive_rng(59, 0);
        let pts: Vec<[f64; 2]> =
            (0..50).map(|_| [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)]).collect();
        let q = PointSet::from_xy(&pts).unwrap();
        let c = random_curve(&mut rng, 10);
        assert_eq!(curve_embed(&q, &c).unwrap().len(), 600);

        let single = PointSet::from_xy(&[[1.0, 2.0]]).unwrap();
        let seg = random_curve(&mut rng, 1);
        assert_eq!(curve_embed(&single, &seg).unwrap().len(), 3);
    }

    #[test]
    fn simplify_identity_when_exact() {
        let verts = [[0.0, 0.0], [1.0, 0.5], [2.0, -0.25], [3.0, 1.0]];
        let c = simplify_to_k(&verts, 3).unwrap();
        assert_eq!(c.vertices(), &verts);
    }

    #[test]
    fn simplify_collinear_keeps_endpoints() {
        let verts: Vec<[f64; 2]> = (0..8).map(|i| [i as f64, 2.0 * i as f64]).collect();
        let c = simplify_to_k(&verts, 1).unwrap();
        assert_eq!(c.vertices(), &[[0.0, 0.0], [7.0, 14.0]]);
    }

    #[test]
    fn simplify_keeps_dominant_corner() {
        let verts = [
            [0.0, 0.0],
            [1.0, 0.05],
            [2.0, -0.04],
            [3.0, 2.5], // dominant corner
            [4.0, 0.03],
            [5.0, 0.0],
        ];
        let c = simplify_to_k(&verts, 2).unwrap();
        assert_eq!(c.vertices(), &[[0.0, 0.0], [3.0, 2.5], [5.0, 0.0]]);

        // Brute force: among all single interior picks, [3.0, 2.5] minimizes
        // the max deviation of dropped vertices to the simplified polyline.
        let mut best = (f64::INFINITY, 0usize);
        for pick in 1..verts.len() - 1 {
            let mut worst = 0.0_f64;
            for (i, v) in verts.iter().enumerate() {
                if i == 0 || i == pick || i == verts.len() - 1 {
                    continue;
                }
                let dev = if i < pick {
                    chord_deviation(v, &verts[0], &verts[pick])
                } else {
                    chord_deviation(v, &verts[pick], &verts[verts.len() - 1])
                };
                worst = worst.max(dev);
            }
            if worst < best.0 {
                best = (worst, pick);
            }
        }
        assert_eq!(best.1, 3);
    }

    #[test]
    fn simplify_too_few_points() {
        let verts = [[0.0, 0.0], [1.0, 1.0], [1.0, 1.0]];
        assert_eq!(
            simplify_to_k(&verts, 2).err(),
            Some(Error::TooFewPoints { needed: 3, actual: 2 })
        );
    }

    #[test]
    fn mean_of_identical_lines_is_that_line() {
        let q = base_points();
        let l = Hyperplane::new(&[0.6, -0.8, 0.7], true).unwrap();
        let mean = mean_oriented_lines(&vec![l.clone(); 4], &q).unwrap();
        assert!((mean.coeffs() - l.coeffs()).norm() < 1e-9);

        let single = mean_oriented_lines(std::slice::from_ref(&l), &q).unwrap();
        assert!((single.coeffs() - l.coeffs()).norm() < 1e-9);
    }

    #[test]
    fn mean_of_two_parallel_lines_is_midline() {
        let q = base_points();
        let l1 = Hyperplane::new(&[0.0, 1.0, 0.0], true).unwrap(); // y = 0
        let l2 = Hyperplane::new(&[0.0, 1.0, -2.0], true).unwrap(); // y = 2
        let mean = mean_oriented_lines(&[l1, l2], &q).unwrap();
        assert_abs_diff_eq!(mean.coeffs()[0], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean.coeffs()[1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(mean.coeffs()[2], -1.0, epsilon = 1e-9);
    }

    #[test]
    fn mean_beats_grid_oracle() {
        let mut rng = derive_rng(61, 0);
        for _ in 0..25 {
            let npts = rng.gen_range(3..=12);
            let pts: Vec<[f64; 2]> = (0..npts)
                .map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
                .collect();
            let q = PointSet::from_xy(&pts).unwrap();
            let m = rng.gen_range(1..=6);
            let lines: Vec<Hyperplane> = (0..m)
                .map(|_| {
                    let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    Hyperplane::new(
                        &[theta.cos(), theta.sin(), rng.gen_range(-2.0..2.0)],
                        true,
                    )
                    .unwrap()
                })
                .collect();
            let mean = mean_oriented_lines(&lines, &q).unwrap();
            let obj = oriented_mean_objective(&q, &lines, &mean).unwrap();

            let mut grid_best = f64::INFINITY;
            for ai in 0..90 {
                let theta = ai as f64 / 90.0 * std::f64::consts::TAU;
                for ci in 0..100 {
                    let c = -3.0 + 6.0 * ci as f64 / 99.0;
                    let cand =
                        Hyperplane::new(&[theta.cos(), theta.sin(), c], true).unwrap();
                    let v = oriented_mean_objective(&q, &lines, &cand).unwrap();
                    grid_best = grid_best.min(v);
                }
            }
            assert!(obj <= grid_best + 1e-6, "objective {obj} vs grid {grid_best}");
            for l in &lines {
                let at_input = oriented_mean_objective(&q, &lines, l).unwrap();
                assert!(obj <= at_input + 1e-9);
            }
        }
    }

    #[test]
    fn mean_requires_oriented_input() {
        let q = base_points();
        let l = Hyperplane::new(&[0.0, 1.0, 0.0], false).unwrap();
        assert_eq!(mean_oriented_lines(&[l], &q).err(), Some(Error::OrientationMismatch));
        assert_eq!(
            mean_oriented_lines(&[], &q).err(),
            Some(Error::EmptyInput)
        );
    }

    #[test]
    fn mean_curve_of_copies_is_identity() {
        let q = base_points();
        let mut rng = derive_rng(67, 0);
        let c = random_curve(&mut rng, 3);
        let mean = mean_curve(&vec![c.clone(); 3], &q).unwrap();
        for (a, b) in c.vertices().iter().zip(mean.vertices().iter()) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-8);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-8);
        }

        let single = mean_curve(std::slice::from_ref(&c), &q).unwrap();
        for (a, b) in c.vertices().iter().zip(single.vertices().iter()) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-8);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-8);
        }
    }

    #[test]
    fn mean_curve_of_two_translates_is_midway() {
        let q = base_points();
        let mut rng = derive_rng(71, 0);
        let c = random_curve(&mut rng, 3);
        let shift = [0.0, 1.5];
        let shifted = CurveK::new(
            c.vertices().iter().map(|v| [v[0] + shift[0], v[1] + shift[1]]).collect(),
        )
        .unwrap();
        let mean = mean_curve(&[c.clone(), shifted], &q).unwrap();
        for (a, b) in c.vertices().iter().zip(mean.vertices().iter()) {
            assert_abs_diff_eq!(a[0] + shift[0] / 2.0, b[0], epsilon = 1e-7);
            assert_abs_diff_eq!(a[1] + shift[1] / 2.0, b[1], epsilon = 1e-7);
        }
    }

    #[test]
    fn oriented_distance_rigid_invariance_for_curve_lines() {
        let mut rng = derive_rng(73, 0);
        let q = base_points();
        let c1 = random_curve(&mut rng, 3);
        let c2 = random_curve(&mut rng, 3);
        let before = dist_curves(&q, &c1, &c2).unwrap();

        let theta: f64 = 1.1;
        let rot = nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let shift = [0.4, -2.0];
        let transform = |c: &CurveK| {
            CurveK::new(
                c.vertices()
                    .iter()
                    .map(|v| {
                        [
                            rot[(0, 0)] * v[0] + rot[(0, 1)] * v[1] + shift[0],
                            rot[(1, 0)] * v[0] + rot[(1, 1)] * v[1] + shift[1],
                        ]
                    })
                    .collect(),
            )
            .unwrap()
        };
        let q2 = q.rigid_transform(&rot, &shift).unwrap();
        let after = dist_curves(&q2, &transform(&c1), &transform(&c2)).unwrap();
        assert_abs_diff_eq!(before, after, epsilon = 1e-9);
    }

    #[test]
    fn curve_estimate_tracks_exact_distance() {
        // Empirical check of the curve sampling size: with
        // N = 2(k+2)/(delta eps^2) coreset draws the relative error stays
        // within eps on the vast majority of (pair, seed) trials.
        let mut rng = derive_rng(83, 0);
        let q = PointSet::new(nalgebra::DMatrix::from_fn(2000, 2, |_, _| {
            rng.gen_range(-5.0..5.0)
        }))
        .unwrap();
        let (eps, delta) = (0.25, 0.1);
        let k = 3;
        let n_sample = curve_sample_size(k, eps, delta).unwrap();
        assert_eq!(n_sample, 1600);

        let mut good = 0;
        let mut total = 0;
        for seed in 0..10 {
            let coreset = crate::sensitivity::sensitivity_sample(&q, n_sample, seed).unwrap();
            for _ in 0..10 {
                let c1 = random_curve(&mut rng, k);
                let c2 = random_curve(&mut rng, k);
                let exact = dist_curves(&q, &c1, &c2).unwrap();
                let est = estimate_dist_curves(&q, &coreset, &c1, &c2).unwrap();
                total += 1;
                if (est - exact).abs() <= eps * exact {
                    good += 1;
                }
            }
        }
        assert!(good * 10 >= total * 9, "only {good}/{total} within tolerance");

        let mismatched = random_curve(&mut rng, k + 1);
        let coreset = crate::sensitivity::sensitivity_sample(&q, 16, 0).unwrap();
        assert_eq!(
            estimate_dist_curves(&q, &coreset, &random_curve(&mut rng, k), &mismatched).err(),
            Some(Error::MismatchedK { left: k, right: k + 1 })
        );
    }

    #[test]
    fn curve_triangle_inequality() {
        let q = base_points();
        let mut rng = derive_rng(79, 0);
        for _ in 0..100 {
            let k = rng.gen_range(1..=4);
            let a = random_curve(&mut rng, k);
            let b = random_curve(&mut rng, k);
            let c = random_curve(&mut rng, k);
            let ab = dist_curves(&q, &a, &b).unwrap();
            let ac = dist_curves(&q, &a, &c).unwrap();
            let cb = dist_curves(&q, &c, &b).unwrap();
            assert!(ab <= ac + cb + 1e-9);
        }
    }
}
