//! Subsets of the module and their convexity, balancedness and absorbency.
//!
//! Two families of sets are representable. A [`H2Set::Product`] glues four
//! real convex bodies along the idempotents; membership, scaling and
//! decomposition all factor through the parts, which is what makes several
//! checks certifiable without sampling. A [`H2Set::LambdaPredicate`] is cut
//! out by a rule on idempotent coordinates and is only ever checked by
//! sampling; this is the representation for sets that are not products,
//! including the two standard counterexamples (the coordinate-sum ball that
//! fails convexity and decomposition, and the small modulus ball with an
//! extra isolated point that absorbs without being projection-stable).
//!
//! Checkers try distinguished points and degenerate scalars before any
//! random draw, so the classic failure witnesses come out deterministically.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Bihyperbolic;
use crate::check::{
    random_unit_interval, random_unit_modulus, sign_patterns, stream_rng, streams,
    zero_one_patterns, CheckReport, Witness,
};
use crate::error::{Error, Result};
use crate::linear::{ComponentNorm, HVector};
use crate::lp;
use crate::seminorm::Seminorm;
use crate::tol;
use crate::{Bih, HVec};

/// Shared knobs for randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub trials: u64,
    pub seed: u64,
    /// Boundary tolerance for membership tests.
    pub tol: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { trials: 1000, seed: 0, tol: tol::MEMBERSHIP }
    }
}

/// Convex body in one real component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyRepr", into = "BodyRepr")]
pub enum RealConvexBody {
    /// Convex hull of finitely many points; closed by construction.
    PolytopeHull(Vec<Vec<f64>>),
    /// Norm ball of radius `r`, closed or open.
    NormBall { p: ComponentNorm, r: f64, closed: bool },
}

#[derive(Serialize, Deserialize)]
enum BodyRepr {
    #[serde(rename = "hull")]
    Hull(Vec<Vec<f64>>),
    #[serde(rename = "ball")]
    Ball { p: ComponentNorm, r: f64, closed: bool },
}

impl TryFrom<BodyRepr> for RealConvexBody {
    type Error = Error;
    fn try_from(repr: BodyRepr) -> Result<Self> {
        match repr {
            BodyRepr::Hull(vertices) => {
                let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
                if dim == 0 {
                    return Err(Error::InvalidInput("hull needs at least one vertex".into()));
                }
                for v in &vertices {
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
                    }
                    if v.iter().any(|c| !c.is_finite()) {
                        return Err(Error::InvalidInput("non-finite vertex".into()));
                    }
                }
                Ok(RealConvexBody::PolytopeHull(vertices))
            }
            BodyRepr::Ball { p, r, closed } => {
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::InvalidInput("ball radius must be positive".into()));
                }
                Ok(RealConvexBody::NormBall { p, r, closed })
            }
        }
    }
}

impl From<RealConvexBody> for BodyRepr {
    fn from(b: RealConvexBody) -> Self {
        match b {
            RealConvexBody::PolytopeHull(v) => BodyRepr::Hull(v),
            RealConvexBody::NormBall { p, r, closed } => BodyRepr::Ball { p, r, closed },
        }
    }
}

impl RealConvexBody {
    pub fn hull(vertices: Vec<Vec<f64>>) -> Result<Self> {
        BodyRepr::Hull(vertices).try_into()
    }

    pub fn ball(p: ComponentNorm, r: f64, closed: bool) -> Result<Self> {
        BodyRepr::Ball { p, r, closed }.try_into()
    }

    pub fn dim(&self) -> usize {
        match self {
            RealConvexBody::PolytopeHull(v) => v[0].len(),
            RealConvexBody::NormBall { .. } => 0, // any; fixed by the product
        }
    }

    /// Membership with boundary tolerance: closed bodies accept up to
    /// `bound + tol`, open balls require clearance below `bound - tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        match self {
            RealConvexBody::NormBall { p, r, closed } => {
                let n = p.eval(x);
                Ok(if *closed { n <= r + tol } else { n < r - tol })
            }
            RealConvexBody::PolytopeHull(vertices) => {
                let dim = vertices[0].len();
                if x.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: x.len() });
                }
                // mu >= 0 with V mu = x and total weight one.
                let mut rows: Vec<Vec<f64>> =
                    (0..dim).map(|r| vertices.iter().map(|v| v[r]).collect()).collect();
                rows.push(vec![1.0; vertices.len()]);
                let mut rhs: Vec<f64> = x.to_vec();
                rhs.push(1.0);
                let scale = 1.0 + x.iter().map(|v| v.abs()).sum::<f64>();
                lp::feasible(&rows, &rhs, tol * scale)
            }
        }
    }

    /// The image of the body under real scaling. Scaling by zero collapses
    /// to the one-point hull at the origin.
    pub fn scale(&self, factor: f64, dim_hint: usize) -> Self {
        if factor == 0.0 {
            return RealConvexBody::PolytopeHull(vec![vec![0.0; dim_hint]]);
        }
        match self {
            RealConvexBody::PolytopeHull(v) => RealConvexBody::PolytopeHull(
                v.iter().map(|p| p.iter().map(|c| c * factor).collect()).collect(),
            ),
            RealConvexBody::NormBall { p, r, closed } => RealConvexBody::NormBall {
                p: *p,
                r: r * factor.abs(),
                closed: *closed,
            },
        }
    }

    /// Member sampler, exact by construction.
    pub fn sample(&self, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            RealConvexBody::PolytopeHull(vertices) => {
                // Flat Dirichlet weights over the vertices.
                let weights: Vec<f64> =
                    vertices.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln().max(1e-300)).collect();
                let total: f64 = weights.iter().sum();
                let mut point = vec![0.0; vertices[0].len()];
                for (w, v) in weights.iter().zip(vertices) {
                    for (acc, c) in point.iter_mut().zip(v) {
                        *acc += (w / total) * c;
                    }
                }
                point
            }
            RealConvexBody::NormBall { p, r, closed } => {
                let clear = if *closed { 1.0 } else { 1.0 - 1e-6 };
                match p {
                    ComponentNorm::PInf => {
                        (0..dim).map(|_| rng.gen_range(-1.0..=1.0) * r * clear).collect()
                    }
                    ComponentNorm::P1 => {
                        let gammas: Vec<f64> =
                            (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln().max(1e-300)).collect();
                        let total: f64 = gammas.iter().sum();
                        let radial = rng.gen::<f64>().powf(1.0 / dim as f64) * r * clear;
                        gammas
                            .iter()
                            .map(|g| {
                                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                                sign * radial * g / total
                            })
                            .collect()
                    }
                    ComponentNorm::P2 => {
                        let mut dir: Vec<f64> = (0..dim)
                            .map(|_| {
                                // Box-Muller, cosine branch.
                                let u1: f64 = (1.0 - rng.gen::<f64>()).max(1e-300);
                                let u2: f64 = rng.gen();
                                (-2.0 * u1.ln()).sqrt()
                                    * (2.0 * std::f64::consts::PI * u2).cos()
                            })
                            .collect();
                        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
                        let radial = rng.gen::<f64>().powf(1.0 / dim as f64) * r * clear;
                        for v in dir.iter_mut() {
                            *v *= radial / norm;
                        }
                        dir
                    }
                }
            }
        }
    }

    /// Boundary-touching and structural points, used ahead of random draws.
    pub fn distinguished(&self, dim: usize) -> Vec<Vec<f64>> {
        match self {
            RealConvexBody::PolytopeHull(vertices) => {
                let mut pts = vertices.clone();
                let mut centroid = vec![0.0; vertices[0].len()];
                for v in vertices {
                    for (acc, c) in centroid.iter_mut().zip(v) {
                        *acc += c / vertices.len() as f64;
                    }
                }
                pts.push(centroid);
                pts
            }
            RealConvexBody::NormBall { r, closed, .. } => {
                let reach = if *closed { *r } else { r * (1.0 - 1e-6) };
                let mut pts = vec![vec![0.0; dim]];
                for k in 0..dim {
                    for s in [1.0, -1.0] {
                        let mut v = vec![0.0; dim];
                        v[k] = s * reach;
                        pts.push(v);
                    }
                }
                pts
            }
        }
    }

    /// Half-width of a coordinate box containing the body.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            RealConvexBody::PolytopeHull(v) => v
                .iter()
                .flat_map(|p| p.iter())
                .fold(0.0f64, |m, c| m.max(c.abs())),
            RealConvexBody::NormBall { r, .. } => *r,
        }
    }

    /// Closed under negation, within tolerance.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        match self {
            RealConvexBody::NormBall { .. } => true,
            RealConvexBody::PolytopeHull(vertices) => vertices.iter().all(|v| {
                vertices.iter().any(|u| {
                    u.iter().zip(v).all(|(a, b)| (a + b).abs() <= tol)
                })
            }),
        }
    }

    pub fn contains_origin(&self, dim: usize, tol: f64) -> Result<bool> {
        self.contains(&vec![0.0; dim], tol)
    }
}

/// Membership rule on idempotent coordinates, for sets that are not
/// products of real bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PredicateRule {
    /// Every entry satisfies `|l1| + |l2| + |l3| + |l4| < c`.
    AbsSumLt { c: f64 },
    /// Every entry has modulus strictly below `c` in all coordinates, or
    /// the element is exactly the ring unit. The union point is what breaks
    /// projection stability while absorbency survives.
    ModulusLtUnionOne { c: f64 },
    /// All listed seminorms stay below `epsilon` (strictly, or up to the
    /// boundary). Unit sets of gauges and metric neighborhoods land here.
    SeminormLevel { seminorms: Vec<Seminorm>, epsilon: Bih, strict: bool },
}

fn default_dim() -> usize {
    1
}

/// Subset of the rank-`n` module.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetRepr", into = "SetRepr")]
pub enum H2Set {
    /// Componentwise product of four real bodies of equal dimension.
    Product { dim: usize, parts: [RealConvexBody; 4] },
    /// Set cut out by a coordinate rule.
    LambdaPredicate { dim: usize, rule: PredicateRule },
}

#[derive(Serialize, Deserialize)]
enum SetRepr {
    #[serde(rename = "product")]
    Product(ProductRepr),
    #[serde(rename = "lambda_predicate")]
    LambdaPredicate {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(flatten)]
        rule: PredicateRule,
    },
}

/// Products serialize with an explicit dimension; a bare four-part array is
/// accepted on input when at least one polytope part fixes the dimension.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProductRepr {
    WithDim { dim: usize, parts: [RealConvexBody; 4] },
    Bare([RealConvexBody; 4]),
}

impl TryFrom<SetRepr> for H2Set {
    type Error = Error;
    fn try_from(repr: SetRepr) -> Result<Self> {
        match repr {
            SetRepr::Product(ProductRepr::WithDim { dim, parts }) => {
                H2Set::product_with_dim(dim, parts)
            }
            SetRepr::Product(ProductRepr::Bare(parts)) => H2Set::product(parts),
            SetRepr::LambdaPredicate { dim, rule } => {
                if dim == 0 {
                    return Err(Error::InvalidInput("predicate set needs dim >= 1".into()));
                }
                Ok(H2Set::LambdaPredicate { dim, rule })
            }
        }
    }
}

impl From<H2Set> for SetRepr {
    fn from(s: H2Set) -> Self {
        match s {
            H2Set::Product { dim, parts } => {
                SetRepr::Product(ProductRepr::WithDim { dim, parts })
            }
            H2Set::LambdaPredicate { dim, rule } => SetRepr::LambdaPredicate { dim, rule },
        }
    }
}

impl H2Set {
    /// Builds a product set, inferring the dimension from hull parts.
    /// Ball-only products need [`H2Set::product_with_dim`].
    pub fn product(parts: [RealConvexBody; 4]) -> Result<Self> {
        let dims: Vec<usize> = parts.iter().map(|p| p.dim()).filter(|d| *d > 0).collect();
        let dim = dims.first().copied().ok_or_else(|| {
            Error::InvalidInput("all-ball product needs an explicit dimension".into())
        })?;
        if dims.iter().any(|d| *d != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: *dims.iter().find(|d| **d != dim).unwrap() });
        }
        Ok(H2Set::Product { dim, parts })
    }

    pub fn product_with_dim(dim: usize, parts: [RealConvexBody; 4]) -> Result<Self> {
        for p in &parts {
            let d = p.dim();
            if d != 0 && d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        if dim == 0 {
            return Err(Error::InvalidInput("product needs dim >= 1".into()));
        }
        Ok(H2Set::Product { dim, parts })
    }

    pub fn predicate(dim: usize, rule: PredicateRule) -> Self {
        H2Set::LambdaPredicate { dim, rule }
    }

    pub fn dim(&self) -> usize {
        match self {
            H2Set::Product { dim, .. } | H2Set::LambdaPredicate { dim, .. } => *dim,
        }
    }

    fn expect_dim(&self, x: &HVec) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.dim() });
        }
        Ok(())
    }

    /// Membership with boundary tolerance `tol`.
    pub fn contains(&self, x: &HVec, tol: f64) -> Result<bool> {
        self.expect_dim(x)?;
        match self {
            H2Set::Product { parts, .. } => {
                for (i, part) in parts.iter().enumerate() {
                    if !part.contains(x.comp(i)?, tol)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            H2Set::LambdaPredicate { rule, .. } => rule.holds(x, tol),
        }
    }

    /// The pointwise scaled set `{lambda v : v in S}`. Only products scale
    /// representably; predicate sets report [`Error::UnsupportedSet`].
    pub fn scale(&self, lambda: Bih) -> Result<H2Set> {
        match self {
            H2Set::Product { dim, parts } => {
                let l = lambda.components();
                let scaled: [RealConvexBody; 4] =
                    std::array::from_fn(|i| parts[i].scale(l[i], *dim));
                Ok(H2Set::Product { dim: *dim, parts: scaled })
            }
            H2Set::LambdaPredicate { .. } => Err(Error::UnsupportedSet(
                "scaling a predicate set has no closed representation".into(),
            )),
        }
    }

    /// Membership of the `i`-th idempotent slice: whether the `i`-th
    /// component of `x` belongs to the projection of the set.
    pub fn slice_member(&self, i: usize, x: &HVec, tol: f64) -> Result<bool> {
        if i >= 4 {
            return Err(Error::BadIndex(i));
        }
        self.expect_dim(x)?;
        match self {
            H2Set::Product { parts, .. } => parts[i].contains(x.comp(i)?, tol),
            // For predicate sets the slice is probed through the projection
            // itself; exact for the rules above.
            H2Set::LambdaPredicate { .. } => self.contains(&x.project(i)?, tol),
        }
    }

    /// Half-width of a coordinate box that covers the set (or, for
    /// unbounded predicate sets, its interesting region).
    pub fn default_box(&self) -> f64 {
        match self {
            H2Set::Product { parts, .. } => parts
                .iter()
                .map(RealConvexBody::bounding_radius)
                .fold(1.0f64, f64::max),
            H2Set::LambdaPredicate { rule, .. } => match rule {
                PredicateRule::AbsSumLt { c } => c.max(1.0),
                PredicateRule::ModulusLtUnionOne { c } => c.max(1.5),
                PredicateRule::SeminormLevel { epsilon, .. } => {
                    (2.0 * epsilon.sup_abs()).max(2.0)
                }
            },
        }
    }

    /// Uniform draw from the ambient coordinate box of half-width `h`.
    pub fn sample_ambient(&self, rng: &mut ChaCha8Rng, h: f64) -> HVec {
        crate::check::random_box_vector(rng, self.dim(), h)
    }

    /// Draws a member: direct for products, rejection in a box for
    /// predicate sets.
    pub fn sample_member(&self, rng: &mut ChaCha8Rng, box_halfwidth: Option<f64>) -> Result<HVec> {
        match self {
            H2Set::Product { dim, parts } => {
                let comps = std::array::from_fn(|i| parts[i].sample(*dim, rng));
                Ok(HVector::new(comps).expect("part samplers produce finite points"))
            }
            H2Set::LambdaPredicate { .. } => {
                let h0 = box_halfwidth.unwrap_or_else(|| self.default_box());
                // The box shrinks every 1024 misses: when the set is much
                // smaller than its nominal bounding box (tight seminorm
                // levels), rejection at full width would be hopeless.
                for attempt in 0..4096u32 {
                    let h = h0 * 0.5f64.powi((attempt / 1024) as i32);
                    let candidate = self.sample_ambient(rng, h);
                    if self.contains(&candidate, tol::MEMBERSHIP)? {
                        return Ok(candidate);
                    }
                }
                Err(Error::SamplingFailure(format!(
                    "no member found in boxes of half-width {h0} down to {}",
                    h0 / 8.0
                )))
            }
        }
    }

    /// Members tried before random sampling: boundary touchers, structural
    /// vertices, isolated points.
    pub fn distinguished_members(&self) -> Vec<HVec> {
        let dim = self.dim();
        match self {
            H2Set::Product { parts, .. } => {
                let lists: [Vec<Vec<f64>>; 4] = std::array::from_fn(|i| parts[i].distinguished(dim));
                let len = lists.iter().map(Vec::len).max().unwrap_or(0);
                (0..len)
                    .map(|t| {
                        let comps = std::array::from_fn(|i| lists[i][t % lists[i].len()].clone());
                        HVector::new(comps).expect("finite distinguished point")
                    })
                    .collect()
            }
            H2Set::LambdaPredicate { rule, .. } => {
                let ones = HVec::from_real_vec(&vec![1.0; dim]);
                match rule {
                    PredicateRule::AbsSumLt { c } => {
                        let mut pts = vec![HVec::zeros(dim)];
                        for i in 0..4 {
                            pts.push(ones.scale(Bihyperbolic::idempotent(i) * (0.75 * c)));
                        }
                        pts.push(ones.scale_real(c / 8.0));
                        pts
                    }
                    PredicateRule::ModulusLtUnionOne { c } => {
                        let mut pts = vec![ones.clone(), HVec::zeros(dim)];
                        for i in 0..4 {
                            pts.push(ones.scale(Bihyperbolic::idempotent(i) * (0.5 * c)));
                        }
                        pts
                    }
                    PredicateRule::SeminormLevel { .. } => vec![HVec::zeros(dim)],
                }
            }
        }
    }

    /// Ambient probe points, members or not, that make good witnesses.
    pub fn distinguished_probes(&self) -> Vec<HVec> {
        let dim = self.dim();
        let ones = HVec::from_real_vec(&vec![1.0; dim]);
        let mut pts = self.distinguished_members();
        pts.push(ones.clone());
        if let H2Set::LambdaPredicate { rule, .. } = self {
            match rule {
                // 3c/8 on the diagonal: every slice passes, the whole fails.
                PredicateRule::AbsSumLt { c } => pts.insert(0, ones.scale_real(0.375 * c)),
                PredicateRule::ModulusLtUnionOne { .. } => {
                    for i in 0..4 {
                        pts.push(ones.scale(Bihyperbolic::idempotent(i)));
                    }
                }
                PredicateRule::SeminormLevel { .. } => {}
            }
        }
        pts
    }
}

impl PredicateRule {
    fn holds(&self, x: &HVec, tol: f64) -> Result<bool> {
        match self {
            PredicateRule::AbsSumLt { c } => {
                for entry in x.entries() {
                    let sum: f64 = entry.modulus().components().iter().sum();
                    if !(sum < c - tol) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            PredicateRule::ModulusLtUnionOne { c } => {
                let strict_ball = x.entries().iter().all(|e| {
                    e.modulus().components().iter().all(|v| *v < c - tol)
                });
                if strict_ball {
                    return Ok(true);
                }
                let is_unit = x.entries().iter().all(|e| {
                    e.components().iter().all(|v| (v - 1.0).abs() <= tol)
                });
                Ok(is_unit)
            }
            PredicateRule::SeminormLevel { seminorms, epsilon, strict } => {
                for p in seminorms {
                    let value = p.eval(x)?;
                    let ok = value
                        .components()
                        .iter()
                        .zip(epsilon.components().iter())
                        .all(|(v, e)| if *strict { *v < e - tol } else { *v <= e + tol });
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn combination(x: &HVec, y: &HVec, lambda: Bih) -> HVec {
    let complement = Bih::one() - lambda;
    x.scale(lambda).add(&y.scale(complement)).expect("dims agree")
}

/// Pool of members for sampling-based checks: distinguished points that
/// verify as members, topped up with random members.
fn member_pool(
    set: &H2Set,
    cfg: &CheckConfig,
    stream: u64,
    want: usize,
) -> Result<Vec<HVec>> {
    let mut pool = Vec::new();
    for p in set.distinguished_members() {
        if set.contains(&p, cfg.tol)? {
            pool.push(p);
        }
    }
    let mut trial = 0u64;
    while pool.len() < want {
        let mut rng = stream_rng(cfg.seed, stream, 1_000_000 + trial);
        pool.push(set.sample_member(&mut rng, None)?);
        trial += 1;
    }
    Ok(pool)
}

/// Convexity under ring-interval combinations: for `lambda` between zero
/// and one and members `x`, `y`, the point `lambda x + (1 - lambda) y` must
/// stay inside. Products of convex bodies are certified structurally.
pub fn check_h2_convex(set: &H2Set, cfg: &CheckConfig) -> Result<CheckReport> {
    if matches!(set, H2Set::Product { .. }) {
        return Ok(CheckReport::certified(cfg.seed));
    }
    let pool = member_pool(set, cfg, streams::CONVEX, 4)?;
    let mut trials = 0u64;

    let head = &pool[..pool.len().min(6)];
    for lambda in zero_one_patterns() {
        for x in head {
            for y in head {
                trials += 1;
                let point = combination(x, y, lambda);
                if !set.contains(&point, cfg.tol)? {
                    let witness =
                        Witness::Combination { lambda, x: x.clone(), y: y.clone(), point };
                    return Ok(CheckReport::fail(trials, cfg.seed, witness));
                }
            }
        }
    }

    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::CONVEX, t);
        let x = set.sample_member(&mut rng, None)?;
        let y = set.sample_member(&mut rng, None)?;
        let lambda = random_unit_interval(&mut rng);
        trials += 1;
        let point = combination(&x, &y, lambda);
        if !set.contains(&point, cfg.tol)? {
            return Ok(CheckReport::fail(trials, cfg.seed, Witness::Combination { lambda, x, y, point }));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Balancedness: scaling a member by any scalar of modulus at most one must
/// stay inside. Products of origin-symmetric bodies are certified.
pub fn check_balanced(set: &H2Set, cfg: &CheckConfig) -> Result<CheckReport> {
    if let H2Set::Product { parts, .. } = set {
        if parts.iter().all(|p| p.is_symmetric(cfg.tol)) {
            return Ok(CheckReport::certified(cfg.seed));
        }
    }
    let pool = member_pool(set, cfg, streams::BALANCED, 3)?;
    let mut trials = 0u64;

    let head = &pool[..pool.len().min(4)];
    for lambda in sign_patterns() {
        for x in head {
            trials += 1;
            let image = x.scale(lambda);
            if !set.contains(&image, cfg.tol)? {
                return Ok(CheckReport::fail(
                    trials,
                    cfg.seed,
                    Witness::Scaling { lambda, x: x.clone(), image },
                ));
            }
        }
    }

    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::BALANCED, t);
        let x = set.sample_member(&mut rng, None)?;
        let lambda = random_unit_modulus(&mut rng);
        trials += 1;
        let image = x.scale(lambda);
        if !set.contains(&image, cfg.tol)? {
            return Ok(CheckReport::fail(trials, cfg.seed, Witness::Scaling { lambda, x, image }));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Absorbency on the given probes: for each probe `x` the check searches
/// `epsilon = 2^-k`, `k <= 60`, such that every sampled scalar between zero
/// and `epsilon` keeps `t x` inside the set.
pub fn check_absorbing(set: &H2Set, probes: &[HVec], cfg: &CheckConfig) -> Result<CheckReport> {
    if probes.is_empty() {
        return Err(Error::PreconditionFailed("absorbency needs at least one probe".into()));
    }
    let per_level = 16usize.max((cfg.trials / 64) as usize);
    let mut trials = 0u64;
    for (pi, probe) in probes.iter().enumerate() {
        set.expect_dim(probe)?;
        let mut last_fail: Option<(f64, Bih, HVec)> = None;
        let mut absorbed = false;
        for k in 0..=60u32 {
            let eps = 0.5f64.powi(k as i32);
            let mut scalars: Vec<Bih> =
                zero_one_patterns().into_iter().map(|l| l * eps).collect();
            let mut rng = stream_rng(cfg.seed, streams::ABSORB, (pi * 61 + k as usize) as u64);
            for _ in 0..per_level {
                scalars.push(random_unit_interval(&mut rng) * eps);
            }
            let mut level_ok = true;
            for t in scalars {
                trials += 1;
                let image = probe.scale(t);
                if !set.contains(&image, cfg.tol)? {
                    last_fail = Some((eps, t, image));
                    level_ok = false;
                    break;
                }
            }
            if level_ok {
                absorbed = true;
                break;
            }
        }
        if !absorbed {
            let (epsilon, scalar, image) = last_fail.expect("failed level recorded");
            return Ok(CheckReport::fail(
                trials,
                cfg.seed,
                Witness::Absorbing { probe: probe.clone(), epsilon, scalar, image },
            ));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Agreement between whole-set membership and the conjunction of slice
/// memberships. Products satisfy this by construction; predicate sets are
/// probed, distinguished points first.
pub fn check_decomposition(set: &H2Set, cfg: &CheckConfig) -> Result<CheckReport> {
    if matches!(set, H2Set::Product { .. }) {
        return Ok(CheckReport::certified(cfg.seed));
    }
    let mut trials = 0u64;
    let probe = |z: HVec, trials: &mut u64| -> Result<Option<CheckReport>> {
        *trials += 1;
        let whole = set.contains(&z, cfg.tol)?;
        let mut slices = true;
        for i in 0..4 {
            slices &= set.slice_member(i, &z, cfg.tol)?;
        }
        if whole != slices {
            return Ok(Some(CheckReport::fail(
                *trials,
                cfg.seed,
                Witness::Decomposition { x: z, member: whole },
            )));
        }
        Ok(None)
    };

    for z in set.distinguished_probes() {
        if let Some(report) = probe(z, &mut trials)? {
            return Ok(report);
        }
    }
    let h = 1.5 * set.default_box();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::DECOMP, t);
        let z = if t % 2 == 0 {
            set.sample_ambient(&mut rng, h)
        } else {
            set.sample_member(&mut rng, None)?
        };
        if let Some(report) = probe(z, &mut trials)? {
            return Ok(report);
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Stability under idempotent projections: `e_i x` stays in the set for
/// every member `x`. Absorbing sets may fail this; balanced sets may not.
pub fn check_idempotent_stability(set: &H2Set, cfg: &CheckConfig) -> Result<CheckReport> {
    if let H2Set::Product { dim, parts } = set {
        let mut all_zero = true;
        for p in parts {
            all_zero &= p.contains_origin(*dim, cfg.tol)?;
        }
        if all_zero {
            return Ok(CheckReport::certified(cfg.seed));
        }
    }
    let mut trials = 0u64;
    let test = |x: HVec, trials: &mut u64| -> Result<Option<CheckReport>> {
        for i in 0..4 {
            *trials += 1;
            let image = x.project(i)?;
            if !set.contains(&image, cfg.tol)? {
                return Ok(Some(CheckReport::fail(
                    *trials,
                    cfg.seed,
                    Witness::Scaling { lambda: Bihyperbolic::idempotent(i), x, image },
                )));
            }
        }
        Ok(None)
    };

    for x in set.distinguished_members() {
        if set.contains(&x, cfg.tol)? {
            if let Some(report) = test(x, &mut trials)? {
                return Ok(report);
            }
        }
    }
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::STABILITY, t);
        let x = set.sample_member(&mut rng, None)?;
        if let Some(report) = test(x, &mut trials)? {
            return Ok(report);
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// For a product set containing the origin, sums of idempotent slices over
/// the given distinct indices must stay inside.
pub fn minkowski_sum_subset_check(
    set: &H2Set,
    indices: &[usize],
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    if !(2..=3).contains(&indices.len()) {
        return Err(Error::PreconditionFailed("expected two or three indices".into()));
    }
    for (k, &i) in indices.iter().enumerate() {
        if i >= 4 {
            return Err(Error::BadIndex(i));
        }
        if indices[..k].contains(&i) {
            return Err(Error::PreconditionFailed("indices must be distinct".into()));
        }
    }
    if !matches!(set, H2Set::Product { .. }) {
        return Err(Error::UnsupportedSet("slice sums need a product set".into()));
    }
    let zero = HVec::zeros(set.dim());
    if !set.contains(&zero, cfg.tol)? {
        return Err(Error::PreconditionFailed("origin not in the set".into()));
    }

    let mut trials = 0u64;
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::MINKOWSKI, t);
        let mut point = zero.clone();
        for &i in indices {
            let sample = set.sample_member(&mut rng, None)?;
            point = point.add(&sample.project(i)?)?;
        }
        trials += 1;
        if !set.contains(&point, cfg.tol)? {
            return Ok(CheckReport::fail(
                trials,
                cfg.seed,
                Witness::PairSum { point, indices: indices.to_vec() },
            ));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Replays a set-shaped witness against the instance. Returns true when the
/// recorded violation still violates.
pub fn recheck_set_witness(set: &H2Set, witness: &Witness, tol: f64) -> Result<bool> {
    let close = |a: &HVec, b: &HVec| -> bool {
        a.sub(b).map(|d| d.sup_abs() <= 1e-9 * (1.0 + a.sup_abs())).unwrap_or(false)
    };
    match witness {
        Witness::Combination { lambda, x, y, point } => {
            let in_interval = Bih::zero().le(*lambda) && lambda.le(Bih::one());
            Ok(in_interval
                && set.contains(x, tol)?
                && set.contains(y, tol)?
                && close(&combination(x, y, *lambda), point)
                && !set.contains(point, tol)?)
        }
        Witness::Scaling { lambda, x, image } => {
            let modulus_ok = lambda.modulus().le(Bih::one() + Bih::from_real(1e-12));
            Ok(modulus_ok
                && set.contains(x, tol)?
                && close(&x.scale(*lambda), image)
                && !set.contains(image, tol)?)
        }
        Witness::Decomposition { x, member } => {
            let whole = set.contains(x, tol)?;
            let mut slices = true;
            for i in 0..4 {
                slices &= set.slice_member(i, x, tol)?;
            }
            Ok(whole == *member && slices != *member)
        }
        Witness::Absorbing { probe, epsilon, scalar, image } => {
            let bounded = Bih::zero().le(*scalar)
                && scalar.le(Bih::from_real(epsilon * (1.0 + 1e-12)));
            Ok(bounded && close(&probe.scale(*scalar), image) && !set.contains(image, tol)?)
        }
        Witness::PairSum { point, indices } => {
            let mut slices_ok = true;
            for &i in indices {
                slices_ok &= set.slice_member(i, point, tol)?;
            }
            Ok(slices_ok && !set.contains(point, tol)?)
        }
        Witness::SetEquality { point, left_member, right_member } => {
            // The left set is the instance; the right side is property
            // specific and rechecked by the property runner.
            let m = set.contains(point, tol)?;
            Ok(m == *left_member && left_member != right_member)
        }
        _ => Err(Error::BadInstance("witness does not belong to a set property".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::ComponentNorm::{P2, PInf};

    fn ball(r: f64, closed: bool) -> RealConvexBody {
        RealConvexBody::ball(P2, r, closed).unwrap()
    }

    fn unit_product(dim: usize) -> H2Set {
        H2Set::product_with_dim(dim, [ball(1.0, true), ball(1.0, true), ball(1.0, true), ball(1.0, true)])
            .unwrap()
    }

    fn abs_sum_set() -> H2Set {
        H2Set::predicate(1, PredicateRule::AbsSumLt { c: 2.0 })
    }

    fn union_set() -> H2Set {
        H2Set::predicate(1, PredicateRule::ModulusLtUnionOne { c: 0.5 })
    }

    fn diag(t: f64) -> HVec {
        HVec::from_real_vec(&[t])
    }

    #[test]
    fn product_membership_is_componentwise() {
        let s = unit_product(2);
        let inside = HVec::from_real_vec(&[0.5, 0.5]);
        let outside = HVector::new([
            vec![0.5, 0.5],
            vec![0.9, 0.9],
            vec![0.0, 0.0],
            vec![0.0, 0.0],
        ])
        .unwrap();
        assert!(s.contains(&inside, 1e-9).unwrap());
        assert!(!s.contains(&outside, 1e-9).unwrap());
    }

    #[test]
    fn abs_sum_counterexample_slices_disagree_with_whole() {
        let s = abs_sum_set();
        let three_quarters = diag(0.75);
        assert!(!s.contains(&three_quarters, 1e-9).unwrap());
        for i in 0..4 {
            assert!(s.contains(&three_quarters.project(i).unwrap(), 1e-9).unwrap());
            assert!(s.slice_member(i, &three_quarters, 1e-9).unwrap());
        }
        let report = check_decomposition(&s, &CheckConfig::default()).unwrap();
        assert_eq!(report.verdict, crate::check::Verdict::Fail);
        let witness = report.witness.expect("fail carries witness");
        assert!(recheck_set_witness(&s, &witness, 1e-9).unwrap());
        match &witness {
            Witness::Decomposition { x, member } => {
                assert!(!member);
                assert_eq!(x.entry(0).unwrap().components(), [0.75; 4]);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn abs_sum_counterexample_fails_convexity_on_idempotent_weights() {
        let s = abs_sum_set();
        let report = check_h2_convex(&s, &CheckConfig::default()).unwrap();
        assert_eq!(report.verdict, crate::check::Verdict::Fail);
        let Some(Witness::Combination { lambda, point, .. }) = report.witness.clone() else {
            panic!("expected combination witness");
        };
        assert!(recheck_set_witness(&s, report.witness.as_ref().unwrap(), 1e-9).unwrap());
        // The first failing degenerate weight is e1 with the two boundary
        // members supported on e1 and e2.
        assert_eq!(lambda, Bih::idempotent(0));
        let expected = Bih::idempotent(0) * 1.5 + Bih::idempotent(1) * 1.5;
        assert_eq!(point.entry(0).unwrap(), expected);
    }

    #[test]
    fn union_set_absorbs_but_is_not_projection_stable() {
        let s = union_set();
        let mut probes = vec![diag(1.0)];
        for i in 0..4 {
            probes.push(diag(1.0).scale(Bihyperbolic::idempotent(i)));
        }
        let cfg = CheckConfig::default();
        let absorb = check_absorbing(&s, &probes, &cfg).unwrap();
        assert_eq!(absorb.verdict, crate::check::Verdict::SampledPass);

        let stability = check_idempotent_stability(&s, &cfg).unwrap();
        assert_eq!(stability.verdict, crate::check::Verdict::Fail);
        let witness = stability.witness.expect("witness");
        assert!(recheck_set_witness(&s, &witness, 1e-9).unwrap());
        match &witness {
            Witness::Scaling { lambda, x, .. } => {
                assert_eq!(*lambda, Bih::idempotent(0));
                assert_eq!(x.entry(0).unwrap(), Bih::one());
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn products_certify_convexity_and_decomposition() {
        let s = unit_product(2);
        let cfg = CheckConfig::default();
        assert_eq!(check_h2_convex(&s, &cfg).unwrap().verdict, crate::check::Verdict::CertifiedPass);
        assert_eq!(check_decomposition(&s, &cfg).unwrap().verdict, crate::check::Verdict::CertifiedPass);
        assert_eq!(check_balanced(&s, &cfg).unwrap().verdict, crate::check::Verdict::CertifiedPass);
    }

    #[test]
    fn asymmetric_hull_fails_balance_at_lambda_zero() {
        let hull = RealConvexBody::hull(vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let s = H2Set::product_with_dim(2, [hull, ball(1.0, true), ball(1.0, true), ball(1.0, true)])
            .unwrap();
        let cfg = CheckConfig { trials: 64, ..CheckConfig::default() };
        let report = check_balanced(&s, &cfg).unwrap();
        assert_eq!(report.verdict, crate::check::Verdict::Fail);
        let Some(Witness::Scaling { lambda, image, .. }) = report.witness.clone() else {
            panic!("expected scaling witness");
        };
        assert_eq!(lambda, -Bih::one());
        assert!(recheck_set_witness(&s, report.witness.as_ref().unwrap(), 1e-9).unwrap());
        let _ = image;
    }

    #[test]
    fn product_without_origin_fails_absorbency() {
        let hull = RealConvexBody::hull(vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let s = H2Set::product_with_dim(2, [hull, ball(1.0, true), ball(1.0, true), ball(1.0, true)])
            .unwrap();
        let probes = vec![HVec::from_real_vec(&[1.2, 0.3])];
        let cfg = CheckConfig { trials: 64, ..CheckConfig::default() };
        let report = check_absorbing(&s, &probes, &cfg).unwrap();
        assert_eq!(report.verdict, crate::check::Verdict::Fail);
        assert!(recheck_set_witness(&s, report.witness.as_ref().unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn pair_sums_stay_inside_products_containing_zero() {
        let s = unit_product(2);
        let cfg = CheckConfig { trials: 200, ..CheckConfig::default() };
        for pair in [[0usize, 1], [1, 3]] {
            let report = minkowski_sum_subset_check(&s, &pair, &cfg).unwrap();
            assert_eq!(report.verdict, crate::check::Verdict::SampledPass);
        }
        let report = minkowski_sum_subset_check(&s, &[0, 2, 3], &cfg).unwrap();
        assert_eq!(report.verdict, crate::check::Verdict::SampledPass);
    }

    #[test]
    fn pair_sum_preconditions_are_enforced() {
        let s = unit_product(2);
        let cfg = CheckConfig::default();
        assert!(matches!(
            minkowski_sum_subset_check(&s, &[0], &cfg),
            Err(Error::PreconditionFailed(_))
        ));
        assert!(matches!(
            minkowski_sum_subset_check(&s, &[0, 4], &cfg),
            Err(Error::BadIndex(4))
        ));
        let hull = RealConvexBody::hull(vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let shifted =
            H2Set::product_with_dim(2, [hull, ball(1.0, true), ball(1.0, true), ball(1.0, true)])
                .unwrap();
        assert!(matches!(
            minkowski_sum_subset_check(&shifted, &[0, 1], &cfg),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn scaling_products_scales_parts() {
        let s = unit_product(2);
        let lambda = Bihyperbolic::from_parts([2.0, 0.0, -1.0, 0.5]);
        let scaled = s.scale(lambda).unwrap();
        let H2Set::Product { parts, .. } = &scaled else { panic!() };
        assert_eq!(parts[0], ball(2.0, true));
        assert_eq!(parts[1], RealConvexBody::PolytopeHull(vec![vec![0.0, 0.0]]));
        assert_eq!(parts[2], ball(1.0, true));
        assert_eq!(parts[3], ball(0.5, true));
        assert!(matches!(abs_sum_set().scale(lambda), Err(Error::UnsupportedSet(_))));
    }

    #[test]
    fn set_json_round_trip_matches_wire_format() {
        let s = abs_sum_set();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"lambda_predicate":{"dim":1,"rule":"abs_sum_lt","c":2.0}}"#);
        let back: H2Set = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let no_dim: H2Set = serde_json::from_str(r#"{"lambda_predicate":{"rule":"abs_sum_lt","c":2.0}}"#).unwrap();
        assert_eq!(no_dim, s);

        let p = H2Set::product_with_dim(1, [
            RealConvexBody::hull(vec![vec![-1.0], vec![1.0]]).unwrap(),
            ball(1.0, true),
            ball(1.0, false),
            RealConvexBody::ball(PInf, 2.0, true).unwrap(),
        ])
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"product":{"dim":1,"parts":["#), "{text}");
        let back: H2Set = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);

        // Bare four-part arrays still parse when a hull part pins the dim.
        let bare: H2Set = serde_json::from_str(
            r#"{"product":[{"hull":[[-1.0],[1.0]]},{"ball":{"p":2,"r":1.0,"closed":true}},{"ball":{"p":2,"r":1.0,"closed":false}},{"ball":{"p":"inf","r":2.0,"closed":true}}]}"#,
        )
        .unwrap();
        assert_eq!(bare, p);

        // Ball-only products round-trip through the explicit dimension.
        let balls = H2Set::product_with_dim(2, [
            ball(3.0, true),
            ball(3.0, true),
            ball(3.0, true),
            ball(3.0, true),
        ])
        .unwrap();
        let text = serde_json::to_string(&balls).unwrap();
        let back: H2Set = serde_json::from_str(&text).unwrap();
        assert_eq!(back, balls);
    }

    #[test]
    fn samplers_produce_members() {
        let sets = [unit_product(2), abs_sum_set(), union_set()];
        for (si, s) in sets.iter().enumerate() {
            for t in 0..200 {
                let mut rng = stream_rng(42, 99, (si * 1000 + t) as u64);
                let x = s.sample_member(&mut rng, None).unwrap();
                assert!(s.contains(&x, 1e-9).unwrap(), "sampler left the set {si}");
            }
        }
    }

    #[test]
    fn open_ball_excludes_its_boundary() {
        let b = ball(1.0, false);
        assert!(b.contains(&[0.5, 0.0], 1e-9).unwrap());
        assert!(!b.contains(&[1.0, 0.0], 1e-9).unwrap());
        let c = ball(1.0, true);
        assert!(c.contains(&[1.0, 0.0], 1e-9).unwrap());
    }

    #[test]
    fn hull_membership_matches_geometry() {
        let h = RealConvexBody::hull(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ])
        .unwrap();
        assert!(h.contains(&[0.2, -0.7], 1e-9).unwrap());
        assert!(h.contains(&[1.0, 1.0], 1e-9).unwrap());
        assert!(!h.contains(&[1.2, 0.0], 1e-9).unwrap());
    }
}
