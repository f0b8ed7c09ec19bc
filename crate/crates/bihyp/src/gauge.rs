//! Minkowski gauges of convex bodies, componentwise over the idempotents.
//!
//! The gauge of a set at a point is the smallest nonnegative scaling of the
//! set that captures the point. For product sets it factors into four real
//! gauges, each computed by the method native to the part: norm balls in
//! closed form, polytope hulls by linear programming. A separate bisection
//! routine recomputes the same values through membership queries only —
//! the two routes share no arithmetic, which is what makes their agreement
//! meaningful as a cross-check, so neither may be expressed via the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::linear::ComponentNorm;
use crate::lp;
use crate::seminorm::Seminorm;
use crate::sets::{H2Set, PredicateRule, RealConvexBody};
use crate::{Bih, HVec};

/// How a gauge value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeMethod {
    /// Linear program over the vertex weights (hull parts involved).
    Lp,
    /// Norm-quotient closed form (all parts are balls).
    ClosedForm,
    /// Membership-only bisection; the independent cross-check route.
    Bisection,
}

/// Componentwise gauge value of a product set at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeResult {
    /// The four component gauges reassembled as a nonnegative ring element.
    pub value: Bih,
    pub per_component: [f64; 4],
    pub method: GaugeMethod,
}

impl GaugeResult {
    fn assemble(per_component: [f64; 4], method: GaugeMethod) -> Result<Self> {
        let value = Bih::new(per_component)
            .map_err(|_| Error::NumericalStall(0))?;
        Ok(GaugeResult { value, per_component, method })
    }
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Residual tolerance for gauge linear programs, scaled to the target.
fn lp_feas_tol(x: &[f64]) -> f64 {
    1e-9 * (1.0 + l1(x))
}

/// Gauge of a hull at `x` without any interior check: the least total
/// weight of a nonnegative vertex combination reaching `x`.
fn hull_gauge_value(vertices: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let dim = vertices[0].len();
    if x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x.len() });
    }
    if x.iter().all(|v| v.abs() == 0.0) {
        return Ok(0.0);
    }
    let rows: Vec<Vec<f64>> =
        (0..dim).map(|r| vertices.iter().map(|v| v[r]).collect()).collect();
    let costs = vec![1.0; vertices.len()];
    let outcome = lp::solve_standard(&rows, x, &costs, lp_feas_tol(x))?;
    Ok(outcome.objective.max(0.0))
}

/// Verifies that the origin is interior to the hull by reaching every
/// signed coordinate direction with a finite-weight vertex combination.
/// Feasibility in all `2 * dim` directions traps a small cross-polytope
/// around the origin inside the hull.
pub fn hull_origin_interior(vertices: &[Vec<f64>]) -> Result<()> {
    let dim = vertices[0].len();
    for k in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[k] = s;
            match hull_gauge_value(vertices, &e) {
                Ok(_) => {}
                Err(Error::LpInfeasible) => return Err(Error::OriginNotInterior),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

/// Gauge of one real convex body at a real point.
///
/// Balls evaluate in closed form; hulls run the weight-minimizing linear
/// program after certifying that the origin is interior (the gauge is
/// otherwise allowed to be infinite and the program meaningless).
pub fn real_gauge(body: &RealConvexBody, x: &[f64]) -> Result<f64> {
    match body {
        RealConvexBody::NormBall { p, r, .. } => Ok(p.eval(x) / r),
        RealConvexBody::PolytopeHull(vertices) => {
            hull_origin_interior(vertices)?;
            hull_gauge_value(vertices, x)
        }
    }
}

/// Componentwise gauge of a product set, reassembled as a ring element.
///
/// Because scaling acts componentwise, the gauge of the product at `x` is
/// exactly the vector of part gauges at the components of `x`; projecting
/// `x` onto an idempotent therefore projects the gauge onto the same one.
pub fn h2_gauge(set: &H2Set, x: &HVec) -> Result<GaugeResult> {
    let H2Set::Product { dim, parts } = set else {
        return Err(Error::UnsupportedSet(
            "the gauge evaluator needs a product set".into(),
        ));
    };
    if x.dim() != *dim {
        return Err(Error::DimensionMismatch { expected: *dim, found: x.dim() });
    }
    let mut any_hull = false;
    for part in parts {
        if let RealConvexBody::PolytopeHull(vertices) = part {
            any_hull = true;
            hull_origin_interior(vertices)?;
        }
    }
    let mut per = [0.0f64; 4];
    for i in 0..4 {
        per[i] = match &parts[i] {
            RealConvexBody::NormBall { p, r, .. } => p.eval(x.comp(i)?) / r,
            RealConvexBody::PolytopeHull(vertices) => hull_gauge_value(vertices, x.comp(i)?)?,
        };
    }
    let method = if any_hull { GaugeMethod::Lp } else { GaugeMethod::ClosedForm };
    GaugeResult::assemble(per, method)
}

/// Membership test used by the bisection route. Balls answer through the
/// norm inequality, hulls through combinatorial geometry — never through
/// the simplex code the direct route relies on.
fn bisection_member(part: &RealConvexBody, point: &[f64]) -> Result<bool> {
    match part {
        RealConvexBody::NormBall { p, r, .. } => Ok(p.eval(point) <= *r),
        RealConvexBody::PolytopeHull(vertices) => {
            let scale = 1.0 + l1(point);
            geometry::hull_member_oracle(vertices, point, 1e-12 * scale)
        }
    }
}

fn bisect_component(part: &RealConvexBody, x: &[f64], tol: f64) -> Result<f64> {
    if x.iter().all(|v| v.abs() <= 1e-300) {
        return Ok(0.0);
    }
    let member_at = |t: f64| -> Result<bool> {
        let scaled: Vec<f64> = x.iter().map(|v| v / t).collect();
        bisection_member(part, &scaled)
    };
    // Bracket upward: find a scale that certainly captures the point.
    let mut hi = 1.0f64;
    let mut bracketed = member_at(hi)?;
    let mut doublings = 0usize;
    while !bracketed {
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::NumericalStall(doublings));
        }
        bracketed = member_at(hi)?;
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        if hi - lo <= tol * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || mid == lo || mid == hi {
            break;
        }
        if member_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gauge of a product set by pure membership bisection, to tolerance `tol`
/// per component. Kept free of linear programming and closed forms so it
/// can serve as an independent oracle for [`h2_gauge`].
pub fn gauge_bisection(set: &H2Set, x: &HVec, tol: f64) -> Result<GaugeResult> {
    let H2Set::Product { dim, parts } = set else {
        return Err(Error::UnsupportedSet(
            "the bisection gauge needs a product set".into(),
        ));
    };
    if x.dim() != *dim {
        return Err(Error::DimensionMismatch { expected: *dim, found: x.dim() });
    }
    let mut per = [0.0f64; 4];
    for i in 0..4 {
        per[i] = bisect_component(&parts[i], x.comp(i)?, tol)?;
    }
    GaugeResult::assemble(per, GaugeMethod::Bisection)
}

/// The level-one set of a seminorm: `{x : p(x) < 1}` when `strict`, else
/// `{x : p(x) <= 1}` componentwise.
pub fn unit_set(p: &Seminorm, dim: usize, strict: bool) -> H2Set {
    H2Set::predicate(
        dim,
        PredicateRule::SeminormLevel {
            seminorms: vec![p.clone()],
            epsilon: Bih::one(),
            strict,
        },
    )
}

/// Convenience: the unit ball of a componentwise norm as a product set,
/// which is the representation the gauge evaluator can certify against.
pub fn norm_unit_product(dim: usize, norms: [ComponentNorm; 4], closed: bool) -> Result<H2Set> {
    let parts: [RealConvexBody; 4] =
        [
            RealConvexBody::ball(norms[0], 1.0, closed)?,
            RealConvexBody::ball(norms[1], 1.0, closed)?,
            RealConvexBody::ball(norms[2], 1.0, closed)?,
            RealConvexBody::ball(norms[3], 1.0, closed)?,
        ];
    H2Set::product_with_dim(dim, parts)
}
