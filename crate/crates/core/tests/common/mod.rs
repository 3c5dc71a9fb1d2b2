//! Shared oracles for the integration and acceptance suites. Everything here
//! is deliberately independent of the implementation paths it checks: vertex
//! enumeration goes through exhaustive hyperplane intersection with its own
//! Gaussian solver, and hulls through gift wrapping rather than the library's
//! monotone chain.

/// A system `rows * x <= rhs` over `x >= 0` in `dim` variables.
pub struct DenseSystem {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

/// Solves `a x = b` for a small square system; `None` when singular.
fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[pivot][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        let p = m[col][col];
        for i in 0..n {
            if i != col && m[i][col].abs() > 0.0 {
                let f = m[i][col] / p;
                for j in col..n {
                    m[i][j] -= f * m[col][j];
                }
                v[i] -= f * v[col];
            }
        }
    }
    Some((0..n).map(|i| v[i] / m[i][i]).collect())
}

/// All vertices of the polytope by exhaustive hyperplane-subset enumeration
/// (constraint rows plus the coordinate planes).
pub fn enumerate_vertices(sys: &DenseSystem) -> Vec<Vec<f64>> {
    let d = sys.dim;
    // Hyperplanes: every row as an equality, plus x_i = 0.
    let mut planes: Vec<(Vec<f64>, f64)> = sys
        .rows
        .iter()
        .zip(&sys.rhs)
        .map(|(r, &b)| (r.clone(), b))
        .collect();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        planes.push((e, 0.0));
    }
    let k = planes.len();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut combo = vec![0usize; d];
    fn rec(
        planes: &[(Vec<f64>, f64)],
        sys: &DenseSystem,
        combo: &mut Vec<usize>,
        depth: usize,
        start: usize,
        k: usize,
        verts: &mut Vec<Vec<f64>>,
    ) {
        let d = sys.dim;
        if depth == d {
            let a: Vec<Vec<f64>> = combo.iter().map(|&i| planes[i].0.clone()).collect();
            let b: Vec<f64> = combo.iter().map(|&i| planes[i].1).collect();
            if let Some(x) = solve_square(&a, &b) {
                let feasible = x.iter().all(|&v| v >= -1e-9)
                    && sys.rows.iter().zip(&sys.rhs).all(|(r, &c)| {
                        r.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= c + 1e-9
                    });
                if feasible {
                    verts.push(x);
                }
            }
            return;
        }
        for i in start..k {
            combo[depth] = i;
            rec(planes, sys, combo, depth + 1, i + 1, k, verts);
        }
    }
    rec(&planes, sys, &mut combo, 0, 0, k, &mut verts);
    verts
}

/// Gift-wrapping hull of a 2-D cloud, counter-clockwise; collinear clouds
/// reduce to their extreme segment, single points to themselves. Coordinates
/// within `1e-10` of zero are snapped first so that solver noise on the axes
/// does not manufacture spurious extreme points.
pub fn jarvis_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let snap = |v: f64| if v.abs() < 1e-10 { 0.0 } else { v };
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &p in points {
        let p = (snap(p.0), snap(p.1));
        if !pts.iter().any(|&q| dist2(p, q) < 1e-18) {
            pts.push(p);
        }
    }
    if pts.len() <= 2 {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    // Collinearity screen over the whole cloud.
    let p0 = pts[0];
    let far = *pts
        .iter()
        .max_by(|a, b| dist2(p0, **a).partial_cmp(&dist2(p0, **b)).unwrap())
        .unwrap();
    if pts.iter().all(|&p| cross(p0, far, p).abs() < 1e-10) {
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return vec![sorted[0], sorted[sorted.len() - 1]];
    }
    let start = *pts
        .iter()
        .min_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap())
        .unwrap();
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut next = pts[0];
        if dist2(next, current) < 1e-18 {
            next = pts[1];
        }
        for &cand in &pts {
            if dist2(cand, current) < 1e-18 {
                continue;
            }
            let c = cross(current, next, cand);
            if c > 1e-10 || (c.abs() <= 1e-10 && dist2(current, cand) > dist2(current, next)) {
                next = cand;
            }
        }
        if dist2(next, start) < 1e-18 || hull.len() > pts.len() {
            break;
        }
        hull.push(next);
        current = next;
    }
    hull
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Bidirectional nearest-vertex matching within `tol`.
pub fn vertex_sets_match(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.iter().all(|&p| b.iter().any(|&q| dist2(p, q).sqrt() <= tol))
        && b.iter().all(|&p| a.iter().any(|&q| dist2(p, q).sqrt() <= tol))
}

/// Seeded random bounded system in `dim` dimensions: per-axis boxes plus a
/// handful of random rows with small-integer coefficients.
pub fn random_system(seed: u64, dim: usize) -> DenseSystem {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..dim {
        let mut r = vec![0.0; dim];
        r[i] = 1.0;
        rows.push(r);
        rhs.push(rng.gen_range(0.5..2.0));
    }
    let extra = rng.gen_range(2..=6);
    for _ in 0..extra {
        let mut r: Vec<f64> = (0..dim)
            .map(|_| [-1.0, 0.0, 1.0, 1.0, 2.0][rng.gen_range(0..5)])
            .collect();
        if r.iter().all(|&c| c <= 0.0) {
            r[rng.gen_range(0..dim)] = 1.0;
        }
        rows.push(r);
        rhs.push(rng.gen_range(0.2..3.0));
    }
    DenseSystem { dim, rows, rhs }
}
