//! Simplex-free membership predicates for polytope hulls.
//!
//! The bisection gauge oracle must not share code with the simplex path it
//! cross-checks, so membership here goes through explicit geometry: interval
//! tests in dimension one, half-plane tests against a gift-wrapped hull in
//! dimension two, half-space tests against brute-force enumerated facets in
//! dimension three, and a small self-contained elimination-based feasibility
//! routine above that.

use crate::error::{Error, Result};

/// Half-space `normal . x <= offset`.
#[derive(Debug, Clone)]
pub(crate) struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

/// Gift wrapping. Returns hull vertices in counterclockwise order; errors on
/// inputs without two-dimensional extent.
pub(crate) fn gift_wrap_2d(points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if points.len() < 3 {
        return Err(Error::PreconditionFailed("hull needs three points".into()));
    }
    let start = (0..points.len())
        .min_by(|&i, &j| {
            let (a, b) = (&points[i], &points[j]);
            (a[0], a[1]).partial_cmp(&(b[0], b[1])).expect("finite coords")
        })
        .expect("nonempty");
    let mut hull: Vec<usize> = vec![start];
    let mut current = start;
    loop {
        let mut candidate = (current + 1) % points.len();
        for i in 0..points.len() {
            if i == current {
                continue;
            }
            let turn = cross2(&points[current], &points[candidate], &points[i]);
            // Prefer the most counterclockwise point; on collinear ties take
            // the farther one so collinear interior points are skipped.
            if turn < 0.0
                || (turn == 0.0
                    && dist2(&points[current], &points[i])
                        > dist2(&points[current], &points[candidate]))
            {
                candidate = i;
            }
        }
        current = candidate;
        if current == start {
            break;
        }
        hull.push(current);
        if hull.len() > points.len() {
            return Err(Error::PreconditionFailed("degenerate hull walk".into()));
        }
    }
    if hull.len() < 3 {
        return Err(Error::PreconditionFailed("points are collinear".into()));
    }
    Ok(hull.into_iter().map(|i| points[i].clone()).collect())
}

/// Outward half-planes of the counterclockwise hull of `points`.
pub(crate) fn halfplanes_2d(points: &[Vec<f64>]) -> Result<Vec<HalfSpace>> {
    let hull = gift_wrap_2d(points)?;
    let mut planes = Vec::with_capacity(hull.len());
    for (k, p) in hull.iter().enumerate() {
        let q = &hull[(k + 1) % hull.len()];
        // For a counterclockwise edge p -> q the outward normal is (dy, -dx).
        let normal = vec![q[1] - p[1], -(q[0] - p[0])];
        let offset = normal[0] * p[0] + normal[1] * p[1];
        planes.push(HalfSpace { normal, offset });
    }
    Ok(planes)
}

/// Supporting half-spaces of a three-dimensional hull, found by testing
/// every vertex triple. Quadratic in facets but fine at desk scale.
pub(crate) fn facets_3d(points: &[Vec<f64>]) -> Result<Vec<HalfSpace>> {
    let n = points.len();
    if n < 4 {
        return Err(Error::PreconditionFailed("hull needs four points".into()));
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let mut planes: Vec<HalfSpace> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let normal = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let norm = (normal[0] * normal[0] + normal[1] * normal[1]
                    + normal[2] * normal[2])
                    .sqrt();
                if norm <= 1e-12 * scale * scale {
                    continue;
                }
                let offset = normal[0] * a[0] + normal[1] * a[1] + normal[2] * a[2];
                let side_tol = 1e-9 * norm * scale;
                let mut above = false;
                let mut below = false;
                for p in points {
                    let d = normal[0] * p[0] + normal[1] * p[1] + normal[2] * p[2] - offset;
                    above |= d > side_tol;
                    below |= d < -side_tol;
                }
                if above && below {
                    continue;
                }
                let (normal, offset) = if above {
                    (vec![-normal[0], -normal[1], -normal[2]], -offset)
                } else {
                    (normal.to_vec(), offset)
                };
                // Deduplicate parallel supporting planes from coplanar triples.
                let dup = planes.iter().any(|hs| {
                    let dot = hs.normal.iter().zip(&normal).map(|(x, y)| x * y).sum::<f64>();
                    let hs_norm = hs.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
                    dot > (1.0 - 1e-9) * hs_norm * norm
                        && (hs.offset / hs_norm - offset / norm).abs() < 1e-9 * scale
                });
                if !dup {
                    planes.push(HalfSpace { normal, offset });
                }
            }
        }
    }
    if planes.is_empty() {
        return Err(Error::PreconditionFailed("points are coplanar".into()));
    }
    Ok(planes)
}

pub(crate) fn satisfies(planes: &[HalfSpace], x: &[f64], tol: f64) -> bool {
    planes.iter().all(|hs| {
        let norm = hs.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d: f64 = hs.normal.iter().zip(x).map(|(n, v)| n * v).sum();
        d <= hs.offset + tol * norm.max(1.0)
    })
}

/// Convex-combination feasibility by direct tableau elimination, written
/// independently of the simplex module. Answers whether `x` is a convex
/// combination of `vertices`.
pub(crate) fn convex_combination_feasible(vertices: &[Vec<f64>], x: &[f64], tol: f64) -> bool {
    let dim = x.len();
    let m = dim + 1; // coordinates plus the weight-sum row
    let n = vertices.len();
    // Rows: [V; 1] mu = [x; 1], artificial start basis, minimize artificials.
    let mut t = vec![vec![0.0f64; n + m + 1]; m];
    for r in 0..m {
        let rhs = if r < dim { x[r] } else { 1.0 };
        let flip = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (c, v) in vertices.iter().enumerate() {
            t[r][c] = flip * if r < dim { v[r] } else { 1.0 };
        }
        t[r][n + r] = 1.0;
        t[r][n + m] = flip * rhs;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut price = vec![0.0f64; n + m];
    for j in 0..n {
        price[j] = -(0..m).map(|r| t[r][j]).sum::<f64>();
    }
    let mut steps = 0;
    let cap = 20 * (n + m);
    loop {
        let Some(enter) = (0..n).find(|&j| price[j] < -1e-11 && !basis.contains(&j)) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..m {
            if t[r][enter] > 1e-11 {
                let ratio = t[r][n + m] / t[r][enter];
                if ratio < best - 1e-11
                    || (ratio < best + 1e-11
                        && leave.is_some_and(|l: usize| basis[r] < basis[l]))
                {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(leave) = leave else { break };
        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != leave {
                let f = t[r][enter];
                if f != 0.0 {
                    for c in 0..=(n + m) {
                        t[r][c] -= f * t[leave][c];
                    }
                }
            }
        }
        let f = price[enter];
        for c in 0..(n + m) {
            price[c] -= f * t[leave][c];
        }
        basis[leave] = enter;
        steps += 1;
        if steps > cap {
            break;
        }
    }
    let residual: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, &bj)| bj >= n)
        .map(|(r, _)| t[r][n + m])
        .sum();
    residual <= tol
}

/// Membership of `x` in the convex hull of `vertices`, dispatched on
/// dimension. `tol` is absolute slack on supporting-plane tests.
pub(crate) fn hull_member_oracle(vertices: &[Vec<f64>], x: &[f64], tol: f64) -> Result<bool> {
    match x.len() {
        0 => Err(Error::PreconditionFailed("zero-dimensional ambient space".into())),
        1 => {
            let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(x[0] >= lo - tol && x[0] <= hi + tol)
        }
        2 => Ok(satisfies(&halfplanes_2d(vertices)?, x, tol)),
        3 => Ok(satisfies(&facets_3d(vertices)?, x, tol)),
        _ => Ok(convex_combination_feasible(vertices, x, tol)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![0.0, 0.0],  // interior point, must be ignored
            vec![1.0, 0.0],  // edge midpoint, must be ignored
        ]
    }

    #[test]
    fn gift_wrap_drops_interior_and_edge_points() {
        let hull = gift_wrap_2d(&square()).unwrap();
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn halfplane_membership_matches_the_square() {
        let planes = halfplanes_2d(&square()).unwrap();
        assert!(satisfies(&planes, &[0.3, -0.9], 1e-9));
        assert!(satisfies(&planes, &[1.0, 1.0], 1e-9));
        assert!(!satisfies(&planes, &[1.1, 0.0], 1e-9));
        assert!(!satisfies(&planes, &[0.0, -1.0 - 1e-6], 1e-9));
    }

    #[test]
    fn collinear_points_are_rejected() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(gift_wrap_2d(&pts).is_err());
    }

    fn octahedron() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ]
    }

    #[test]
    fn octahedron_facet_membership_is_the_l1_ball() {
        let facets = facets_3d(&octahedron()).unwrap();
        assert_eq!(facets.len(), 8);
        assert!(satisfies(&facets, &[0.3, 0.3, 0.3], 1e-9));
        assert!(satisfies(&facets, &[1.0, 0.0, 0.0], 1e-9));
        assert!(!satisfies(&facets, &[0.5, 0.5, 0.2], 1e-9));
    }

    #[test]
    fn elimination_feasibility_agrees_in_dimension_four() {
        // Cross polytope vertices in R^4: membership is the unit l1 ball.
        let mut verts = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; 4];
                v[i] = s;
                verts.push(v);
            }
        }
        assert!(convex_combination_feasible(&verts, &[0.2, 0.2, -0.2, 0.2], 1e-9));
        assert!(convex_combination_feasible(&verts, &[1.0, 0.0, 0.0, 0.0], 1e-9));
        assert!(!convex_combination_feasible(&verts, &[0.5, 0.5, 0.5, -0.4], 1e-9));
    }

    #[test]
    fn interval_membership_in_dimension_one() {
        let verts = vec![vec![-2.0], vec![0.5]];
        assert!(hull_member_oracle(&verts, &[0.5], 1e-9).unwrap());
        assert!(hull_member_oracle(&verts, &[-1.0], 1e-9).unwrap());
        assert!(!hull_member_oracle(&verts, &[0.6], 1e-9).unwrap());
    }
}
