//! Closed convex regions in the `(R1, R2)` rate plane.
//!
//! A [`RatePolytope`] stores a halfplane list `a1*R1 + a2*R2 <= c` (the
//! nonnegativity of both rates is implicit) together with the counter-
//! clockwise list of extreme points of the intersection. Regions are closed;
//! the empty region is a first-class value with no vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex/halfplane satisfaction tolerance in bits.
pub const TOL_GEO: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatePolytope {
    /// `(a1, a2, c)` meaning `a1*R1 + a2*R2 <= c`; `R1 >= 0` and `R2 >= 0`
    /// are implicit.
    pub halfplanes: Vec<(f64, f64, f64)>,
    /// Extreme points in counter-clockwise order; empty region has none.
    pub vertices: Vec<(f64, f64)>,
}

impl RatePolytope {
    pub fn empty() -> Self {
        RatePolytope { halfplanes: Vec::new(), vertices: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Intersects halfplanes with the nonnegative quadrant and enumerates the
    /// extreme points. Errors when the region is unbounded.
    pub fn from_halfplanes(halfplanes: Vec<(f64, f64, f64)>) -> Result<Self> {
        // Quick infeasibility screen: the origin must satisfy every row.
        if halfplanes.iter().any(|&(_, _, c)| c < -TOL_GEO) {
            return Ok(RatePolytope::empty());
        }
        let mut rows: Vec<(f64, f64, f64)> = halfplanes.clone();
        rows.push((-1.0, 0.0, 0.0));
        rows.push((0.0, -1.0, 0.0));

        // Boundedness: both coordinates must have finite maxima.
        let lp_rows: Vec<Vec<f64>> = halfplanes.iter().map(|&(a1, a2, _)| vec![a1, a2]).collect();
        let lp_rhs: Vec<f64> = halfplanes.iter().map(|&(_, _, c)| c).collect();
        for obj in [[1.0, 0.0], [0.0, 1.0]] {
            match crate::simplex::maximize(&obj, &lp_rows, &lp_rhs) {
                crate::simplex::LpOutcome::Unbounded => return Err(Error::UnboundedRegion),
                crate::simplex::LpOutcome::Infeasible => return Ok(RatePolytope::empty()),
                crate::simplex::LpOutcome::Optimal(_) => {}
            }
        }

        let mut candidates: Vec<(f64, f64)> = Vec::new();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a1, b1, c1) = rows[i];
                let (a2, b2, c2) = rows[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if rows
                    .iter()
                    .all(|&(a, b, c)| a * x + b * y <= c + TOL_GEO)
                {
                    candidates.push((x.max(0.0), y.max(0.0)));
                }
            }
        }
        if candidates.is_empty() {
            return Ok(RatePolytope::empty());
        }
        let vertices = convex_hull(&candidates);
        Ok(RatePolytope { halfplanes, vertices })
    }

    /// Rebuilds a polytope as the convex hull of a vertex cloud, deriving a
    /// minimal halfplane list from the hull edges.
    pub fn from_vertices(points: &[(f64, f64)]) -> Self {
        if points.is_empty() {
            return RatePolytope::empty();
        }
        let vertices = convex_hull(points);
        let halfplanes = halfplanes_of_hull(&vertices);
        RatePolytope { halfplanes, vertices }
    }

    /// True iff the point satisfies every halfplane and nonnegativity within
    /// `tol`.
    pub fn contains_point(&self, p: (f64, f64), tol: f64) -> bool {
        if p.0 < -tol || p.1 < -tol {
            return false;
        }
        self.halfplanes
            .iter()
            .all(|&(a1, a2, c)| a1 * p.0 + a2 * p.1 <= c + tol)
    }

    /// True iff every vertex of `inner` satisfies every halfplane of `self`.
    /// The empty region is contained in everything.
    pub fn contains(&self, inner: &RatePolytope, tol: f64) -> bool {
        if inner.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        inner.vertices.iter().all(|&v| self.contains_point(v, tol))
    }

    /// Largest violation (in bits) of `self`'s halfplanes over `inner`'s
    /// vertices, with the offending vertex and halfplane.
    pub fn worst_violation(&self, inner: &RatePolytope) -> Option<((f64, f64), (f64, f64, f64), f64)> {
        let mut worst: Option<((f64, f64), (f64, f64, f64), f64)> = None;
        for &v in &inner.vertices {
            let mut planes = self.halfplanes.clone();
            planes.push((-1.0, 0.0, 0.0));
            planes.push((0.0, -1.0, 0.0));
            for &(a1, a2, c) in &planes {
                let slack = a1 * v.0 + a2 * v.1 - c;
                if slack > worst.as_ref().map_or(0.0, |w| w.2) {
                    worst = Some((v, (a1, a2, c), slack));
                }
            }
        }
        worst
    }

    /// Euclidean distance from a point to this region (0 inside).
    pub fn distance_to_point(&self, p: (f64, f64)) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        if self.contains_point(p, 0.0) {
            return 0.0;
        }
        match self.vertices.len() {
            1 => dist(p, self.vertices[0]),
            _ => {
                let mut best = f64::INFINITY;
                let k = self.vertices.len();
                for i in 0..k {
                    let a = self.vertices[i];
                    let b = self.vertices[(i + 1) % k];
                    best = best.min(segment_distance(p, a, b));
                    if k == 2 {
                        break;
                    }
                }
                best
            }
        }
    }

    /// Symmetric Hausdorff distance between two regions; infinite when
    /// exactly one is empty, zero when both are.
    pub fn hausdorff(&self, other: &RatePolytope) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => f64::INFINITY,
            (false, false) => {
                let d1 = self
                    .vertices
                    .iter()
                    .map(|&v| other.distance_to_point(v))
                    .fold(0.0f64, f64::max);
                let d2 = other
                    .vertices
                    .iter()
                    .map(|&v| self.distance_to_point(v))
                    .fold(0.0f64, f64::max);
                d1.max(d2)
            }
        }
    }

    /// Checks the stored vertices against a fresh enumeration from the stored
    /// halfplanes; used as a structural self-test.
    pub fn recheck(&self) -> Result<bool> {
        let fresh = RatePolytope::from_halfplanes(self.halfplanes.clone())?;
        Ok(vertex_sets_match(&self.vertices, &fresh.vertices, TOL_GEO))
    }
}

/// Convex hull of the union of polytopes. Sound inner approximation of the
/// union's convex hull; the true region union over all distributions is
/// already convex, so no time-sharing variable is modeled.
pub fn union_hull(polys: &[RatePolytope]) -> RatePolytope {
    let points: Vec<(f64, f64)> = polys.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    RatePolytope::from_vertices(&points)
}

pub fn vertex_sets_match(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.iter().all(|&p| b.iter().any(|&q| dist(p, q) <= tol))
        && b.iter().all(|&p| a.iter().any(|&q| dist(p, q) <= tol))
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let ab = (b.0 - a.0, b.1 - a.1);
    let len2 = ab.0 * ab.0 + ab.1 * ab.1;
    if len2 < 1e-24 {
        return dist(p, a);
    }
    let t = (((p.0 - a.0) * ab.0 + (p.1 - a.1) * ab.1) / len2).clamp(0.0, 1.0);
    dist(p, (a.0 + t * ab.0, a.1 + t * ab.1))
}

/// Monotone-chain hull in counter-clockwise order. Collinear interior points
/// are dropped; a segment keeps its two endpoints, a point collapses to one.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| dist(*a, *b) < 1e-9);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.is_empty() {
        // All points collinear; keep the extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

/// Outward halfplanes of a hull (including degenerate segments and points).
fn halfplanes_of_hull(vertices: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    match vertices.len() {
        0 => Vec::new(),
        1 => {
            let (x, y) = vertices[0];
            vec![(1.0, 0.0, x), (-1.0, 0.0, -x), (0.0, 1.0, y), (0.0, -1.0, -y)]
        }
        2 => {
            let (a, b) = (vertices[0], vertices[1]);
            let d = (b.0 - a.0, b.1 - a.1);
            let n = (d.1, -d.0);
            vec![
                (n.0, n.1, n.0 * a.0 + n.1 * a.1),
                (-n.0, -n.1, -(n.0 * a.0 + n.1 * a.1)),
                (d.0, d.1, d.0 * b.0 + d.1 * b.1),
                (-d.0, -d.1, -(d.0 * a.0 + d.1 * a.1)),
            ]
        }
        k => {
            let mut planes = Vec::with_capacity(k);
            for i in 0..k {
                let a = vertices[i];
                let b = vertices[(i + 1) % k];
                let d = (b.0 - a.0, b.1 - a.1);
                // CCW polygon: outward normal is (dy, -dx).
                let n = (d.1, -d.0);
                planes.push((n.0, n.1, n.0 * a.0 + n.1 * a.1));
            }
            planes
        }
    }
}
