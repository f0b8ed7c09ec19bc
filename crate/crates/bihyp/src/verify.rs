//! Registry of named properties with expected verdicts and a suite runner.
//!
//! Every row binds a stable identifier to a claim, a default instance and
//! the verdict the claim predicts. The two classical counterexamples are
//! first-class rows whose expected verdict is `Fail`; the suite is healthy
//! when every row matches its expectation, so an expected failure exits
//! cleanly and an unexpected pass does not. Failing reports embed a witness
//! and are replayed from that witness alone before being trusted.
//!
//! Reports are byte-deterministic for a fixed `(seed, trials, instance)`:
//! wall-clock time is tracked on the struct but deliberately left out of
//! the serialized form.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::{stream_rng, streams, zero_one_patterns, CheckReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::gauge::{self, GaugeMethod};
use crate::linear::{CanonicalNorm, ComponentNorm};
use crate::metric::{
    bounded_check, check_metric_axioms, recheck_metric_witness, H2Metric, Neighborhood,
};
use crate::seminorm::{
    check_seminorm_axioms, check_sup_dominance, is_separated, kernel_check, recheck_law_witness,
    Seminorm,
};
use crate::sets::{
    check_absorbing, check_balanced, check_decomposition, check_h2_convex,
    check_idempotent_stability, minkowski_sum_subset_check, recheck_set_witness, CheckConfig,
    H2Set, PredicateRule, RealConvexBody,
};
use crate::tol;
use crate::{Bih, HVec};

/// Instance descriptor for a registered property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instance {
    Set { set: H2Set },
    SetWithLambda { set: H2Set, lambda: Bih },
    SetWithIndices { set: H2Set, indices: Vec<usize> },
    SeminormDim { seminorm: Seminorm, dim: usize },
    SeminormKernel { seminorm: Seminorm, killed: Vec<usize>, dim: usize },
    FamilyDim { family: Vec<Seminorm>, dim: usize },
    MetricDim { metric: H2Metric, dim: usize },
    SetWithNeighborhood { set: H2Set, neighborhood: Neighborhood },
    GaugeOracle { dims: Vec<usize>, pairs: u64 },
}

/// A property to verify: a registered id plus optional overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySpec {
    pub id: String,
    /// `None` runs the registry's default instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_trials() -> u64 {
    1000
}

fn default_tol() -> f64 {
    tol::MEMBERSHIP
}

impl PropertySpec {
    pub fn new(id: impl Into<String>) -> Self {
        PropertySpec {
            id: id.into(),
            instance: None,
            trials: default_trials(),
            seed: 0,
            tol: default_tol(),
        }
    }
}

/// Outcome of verifying one property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub claim: String,
    pub expected: Verdict,
    pub instance: Instance,
    pub report: CheckReport,
    /// Verdict matches the registry expectation, and any failure witness
    /// survived an independent replay.
    pub as_expected: bool,
    /// On failure: whether the embedded witness re-verified from its own
    /// data, without rerunning the search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_reverified: Option<bool>,
    /// Wall-clock milliseconds; excluded from serialization so that report
    /// bytes depend only on `(seed, trials, instance)`.
    #[serde(skip)]
    pub wall_ms: f64,
}

/// One registry row: identifier, human-readable claim, expected verdict and
/// the default instance the claim is tested on.
#[derive(Debug, Clone, Serialize)]
pub struct RegistryRow {
    pub id: &'static str,
    pub claim: &'static str,
    pub expected: Verdict,
    pub instance: Instance,
}

fn ball(p: ComponentNorm, r: f64, closed: bool) -> RealConvexBody {
    RealConvexBody::ball(p, r, closed).expect("positive radius")
}

fn square_hull() -> RealConvexBody {
    RealConvexBody::hull(vec![
        vec![1.0, 1.0],
        vec![-1.0, 1.0],
        vec![-1.0, -1.0],
        vec![1.0, -1.0],
    ])
    .expect("finite vertices")
}

fn unit_ball_product(dim: usize) -> H2Set {
    H2Set::product_with_dim(
        dim,
        [
            ball(ComponentNorm::P2, 1.0, true),
            ball(ComponentNorm::P2, 1.0, true),
            ball(ComponentNorm::P2, 1.0, true),
            ball(ComponentNorm::P2, 1.0, true),
        ],
    )
    .expect("consistent dims")
}

/// Symmetric product mixing a polytope with three distinct balls.
fn square_product() -> H2Set {
    H2Set::product_with_dim(
        2,
        [
            square_hull(),
            ball(ComponentNorm::P2, 1.0, true),
            ball(ComponentNorm::P1, 1.5, true),
            ball(ComponentNorm::PInf, 1.0, true),
        ],
    )
    .expect("consistent dims")
}

fn abs_sum_counterexample() -> H2Set {
    H2Set::predicate(1, PredicateRule::AbsSumLt { c: 2.0 })
}

fn union_counterexample() -> H2Set {
    H2Set::predicate(1, PredicateRule::ModulusLtUnionOne { c: 0.5 })
}

fn radius_three_product() -> H2Set {
    H2Set::product_with_dim(
        2,
        [
            ball(ComponentNorm::P2, 3.0, true),
            ball(ComponentNorm::P2, 3.0, true),
            ball(ComponentNorm::P2, 3.0, true),
            ball(ComponentNorm::P2, 3.0, true),
        ],
    )
    .expect("consistent dims")
}

fn canonical_neighborhood() -> Neighborhood {
    Neighborhood::new(
        HVec::zeros(2),
        Bih::one(),
        vec![Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P2))],
    )
    .expect("positive radius")
}

fn mixed_ball_product(closed: bool) -> H2Set {
    H2Set::product_with_dim(
        2,
        [
            ball(ComponentNorm::P2, 1.0, closed),
            ball(ComponentNorm::P1, 2.0, closed),
            ball(ComponentNorm::PInf, 0.5, closed),
            ball(ComponentNorm::P2, 1.5, closed),
        ],
    )
    .expect("consistent dims")
}

fn coordinate_family() -> Vec<Seminorm> {
    vec![
        Seminorm::coordinate(vec![0], CanonicalNorm::uniform(ComponentNorm::P2)).expect("valid"),
        Seminorm::coordinate(vec![1], CanonicalNorm::uniform(ComponentNorm::P2)).expect("valid"),
        Seminorm::coordinate(vec![2], CanonicalNorm::uniform(ComponentNorm::P1)).expect("valid"),
        Seminorm::coordinate(vec![3], CanonicalNorm::uniform(ComponentNorm::PInf)).expect("valid"),
    ]
}

/// The full registry, in suite execution order.
pub fn registry() -> Vec<RegistryRow> {
    vec![
        RegistryRow {
            id: "T1.scaling",
            claim: "scaling a balanced product by a unit-modulus scalar leaves membership unchanged",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithLambda { set: square_product(), lambda: Bih::j1() },
        },
        RegistryRow {
            id: "T1.modulus",
            claim: "scaling by an invertible scalar matches scaling by its modulus",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithLambda {
                set: square_product(),
                lambda: Bih::new([2.0, -0.5, 1.0, 3.0]).expect("finite"),
            },
        },
        RegistryRow {
            id: "T2.projection-stability",
            claim: "a product containing the origin absorbs its idempotent projections",
            expected: Verdict::CertifiedPass,
            instance: Instance::Set { set: unit_ball_product(2) },
        },
        RegistryRow {
            id: "T2.absorbing-stability-fail",
            claim: "the small-modulus ball with an extra unit point absorbs yet fails projection stability",
            expected: Verdict::Fail,
            instance: Instance::Set { set: union_counterexample() },
        },
        RegistryRow {
            id: "T4.product-decomposition",
            claim: "membership in a product equals the conjunction of its slice memberships",
            expected: Verdict::CertifiedPass,
            instance: Instance::Set { set: unit_ball_product(2) },
        },
        RegistryRow {
            id: "T4.decomposition",
            claim: "the open coordinate-sum ball disagrees with the product of its slices",
            expected: Verdict::Fail,
            instance: Instance::Set { set: abs_sum_counterexample() },
        },
        RegistryRow {
            id: "T5.convexity",
            claim: "products of convex bodies are closed under ring-interval combinations",
            expected: Verdict::CertifiedPass,
            instance: Instance::Set { set: unit_ball_product(2) },
        },
        RegistryRow {
            id: "T5-convexity-fail",
            claim: "the open coordinate-sum ball is not closed under idempotent-weighted combinations",
            expected: Verdict::Fail,
            instance: Instance::Set { set: abs_sum_counterexample() },
        },
        RegistryRow {
            id: "T8.pair-sum",
            claim: "sums of two idempotent slices stay inside a product containing zero",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithIndices { set: unit_ball_product(2), indices: vec![0, 1] },
        },
        RegistryRow {
            id: "T8.triple-sum",
            claim: "sums of three idempotent slices stay inside a product containing zero",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithIndices {
                set: unit_ball_product(2),
                indices: vec![0, 1, 2],
            },
        },
        RegistryRow {
            id: "T12.seminorm-laws",
            claim: "the componentwise norm obeys positivity, homogeneity, subadditivity and the reverse triangle inequality",
            expected: Verdict::SampledPass,
            instance: Instance::SeminormDim {
                seminorm: Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P2)),
                dim: 2,
            },
        },
        RegistryRow {
            id: "T12.kernel",
            claim: "a coordinate seminorm vanishes exactly on the killed components, which form a submodule",
            expected: Verdict::SampledPass,
            instance: Instance::SeminormKernel {
                seminorm: Seminorm::coordinate(
                    vec![0, 2],
                    CanonicalNorm::uniform(ComponentNorm::P2),
                )
                .expect("valid"),
                killed: vec![1, 3],
                dim: 2,
            },
        },
        RegistryRow {
            id: "T14.unit-sets",
            claim: "open and closed unit sets of a seminorm are convex, balanced and absorbing",
            expected: Verdict::SampledPass,
            instance: Instance::SeminormDim {
                seminorm: Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P2)),
                dim: 2,
            },
        },
        RegistryRow {
            id: "T15.gauge-seminorm",
            claim: "the gauge of a symmetric product satisfies the seminorm laws",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: square_product() },
        },
        RegistryRow {
            id: "T15.componentwise",
            claim: "the gauge of a product assembles componentwise and commutes with idempotent projection",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: square_product() },
        },
        RegistryRow {
            id: "gauge.oracle",
            claim: "the linear-programming gauge agrees with the membership-bisection oracle",
            expected: Verdict::SampledPass,
            instance: Instance::GaugeOracle { dims: vec![2, 3], pairs: 500 },
        },
        RegistryRow {
            id: "gauge.bounded-norm",
            claim: "the gauge of a bounded symmetric product vanishes only at zero",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithNeighborhood {
                set: radius_three_product(),
                neighborhood: canonical_neighborhood(),
            },
        },
        RegistryRow {
            id: "sandwich.closed",
            claim: "a closed-ball product coincides with the closed unit set of its gauge away from the boundary band",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: mixed_ball_product(true) },
        },
        RegistryRow {
            id: "sandwich.open",
            claim: "an open-ball product coincides with the open unit set of its gauge away from the boundary band",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: mixed_ball_product(false) },
        },
        RegistryRow {
            id: "sandwich.chain",
            claim: "the open gauge set sits inside the body, which sits inside the closed gauge set",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: square_product() },
        },
        RegistryRow {
            id: "SupLemma.monotone",
            claim: "prefix suprema of a seminorm family grow monotonically and inherit separation",
            expected: Verdict::SampledPass,
            instance: Instance::FamilyDim { family: coordinate_family(), dim: 2 },
        },
        RegistryRow {
            id: "absorb.union-example",
            claim: "the small-modulus ball with the extra unit point absorbs all sixteen coordinate-pattern probes",
            expected: Verdict::SampledPass,
            instance: Instance::Set { set: union_counterexample() },
        },
        RegistryRow {
            id: "M.metric-axioms",
            claim: "the family metric is a translation-invariant metric bounded by one",
            expected: Verdict::SampledPass,
            instance: Instance::MetricDim {
                metric: H2Metric::new(vec![
                    Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P1)),
                    Seminorm::coordinate(vec![0, 1], CanonicalNorm::uniform(ComponentNorm::P2))
                        .expect("valid"),
                ])
                .expect("nonempty"),
                dim: 2,
            },
        },
        RegistryRow {
            id: "M.metric-identity-fail",
            claim: "a non-separating family collapses distinct points to distance zero",
            expected: Verdict::Fail,
            instance: Instance::MetricDim {
                metric: H2Metric::new(vec![Seminorm::coordinate(
                    vec![0],
                    CanonicalNorm::uniform(ComponentNorm::P2),
                )
                .expect("valid")])
                .expect("nonempty"),
                dim: 2,
            },
        },
        RegistryRow {
            id: "M.bounded",
            claim: "a ball product is bounded for the canonical seminorm neighborhood",
            expected: Verdict::SampledPass,
            instance: Instance::SetWithNeighborhood {
                set: radius_three_product(),
                neighborhood: canonical_neighborhood(),
            },
        },
    ]
}

fn registry_row(id: &str) -> Result<RegistryRow> {
    registry()
        .into_iter()
        .find(|row| row.id == id)
        .ok_or_else(|| Error::UnknownProperty(id.to_string()))
}

fn bad_instance(id: &str, wanted: &str) -> Error {
    Error::BadInstance(format!("{id} expects a `{wanted}` instance"))
}

/// Probes built from the sixteen 0/1 coordinate patterns on the diagonal.
fn pattern_probes(dim: usize) -> Vec<HVec> {
    let ones = HVec::from_real_vec(&vec![1.0; dim]);
    zero_one_patterns().into_iter().map(|l| ones.scale(l)).collect()
}

/// Sampled membership agreement between two sets.
fn set_equality(
    left: &H2Set,
    right: &H2Set,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch { expected: left.dim(), found: right.dim() });
    }
    let mut trials = 0u64;
    let compare = |z: &HVec, trials: &mut u64| -> Result<Option<CheckReport>> {
        *trials += 1;
        let l = left.contains(z, cfg.tol)?;
        let r = right.contains(z, cfg.tol)?;
        if l != r {
            return Ok(Some(CheckReport::fail(
                *trials,
                cfg.seed,
                Witness::SetEquality { point: z.clone(), left_member: l, right_member: r },
            )));
        }
        Ok(None)
    };
    let mut probes = left.distinguished_probes();
    probes.extend(right.distinguished_probes());
    for z in &probes {
        if let Some(report) = compare(z, &mut trials)? {
            return Ok(report);
        }
    }
    let h = 1.5 * left.default_box().max(right.default_box());
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::SCALING_EQ, t);
        let z = match t % 3 {
            0 => left.sample_ambient(&mut rng, h),
            1 => left.sample_member(&mut rng, None)?,
            _ => right.sample_member(&mut rng, None)?,
        };
        if let Some(report) = compare(&z, &mut trials)? {
            return Ok(report);
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Deterministically generated random body for the oracle row.
fn oracle_body(rng: &mut ChaCha8Rng, dim: usize) -> RealConvexBody {
    let norms = [ComponentNorm::P1, ComponentNorm::P2, ComponentNorm::PInf];
    if rng.gen_bool(0.5) {
        let p = norms[rng.gen_range(0..3)];
        let r = rng.gen_range(0.5..=2.5);
        return ball(p, r, rng.gen_bool(0.5));
    }
    for _ in 0..8 {
        let extra = rng.gen_range(0..=2usize);
        let m = dim + 1 + extra;
        let mut vertices = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let v: Vec<f64> = (0..dim)
                .map(|_| {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * rng.gen_range(0.4..=2.0)
                })
                .collect();
            let mirrored: Vec<f64> = v.iter().map(|c| -c).collect();
            vertices.push(v);
            vertices.push(mirrored);
        }
        if gauge::hull_origin_interior(&vertices).is_ok() {
            return RealConvexBody::PolytopeHull(vertices);
        }
    }
    ball(ComponentNorm::P2, 1.0, true)
}

fn oracle_pair(seed: u64, trial: u64, dims: &[usize]) -> (H2Set, HVec) {
    let mut rng = stream_rng(seed, streams::GAUGE, trial);
    let dim = dims[(trial as usize) % dims.len()];
    let parts: [RealConvexBody; 4] = std::array::from_fn(|_| oracle_body(&mut rng, dim));
    let set = H2Set::product_with_dim(dim, parts).expect("generated parts share the dim");
    let x = crate::check::random_box_vector(&mut rng, dim, 3.0);
    (set, x)
}

fn oracle_disagreement(set: &H2Set, x: &HVec) -> Result<Option<(Bih, Bih)>> {
    let direct = gauge::h2_gauge(set, x)?;
    let oracle = gauge::gauge_bisection(set, x, 1e-9)?;
    debug_assert_eq!(oracle.method, GaugeMethod::Bisection);
    for i in 0..4 {
        let gap = (direct.per_component[i] - oracle.per_component[i]).abs();
        if gap > tol::GAUGE_ORACLE * (1.0 + direct.per_component[i].abs()) {
            return Ok(Some((direct.value, oracle.value)));
        }
    }
    Ok(None)
}

fn slack_scale(values: &[Bih]) -> f64 {
    let m = values.iter().map(|v| v.sup_abs()).fold(1.0f64, f64::max);
    tol::CHECK_SLACK * (1.0 + m)
}

/// Componentwise-assembly and projection laws of the product gauge.
fn componentwise_gauge_check(set: &H2Set, cfg: &CheckConfig) -> Result<CheckReport> {
    let H2Set::Product { parts, .. } = set else {
        return Err(Error::BadInstance("componentwise gauge needs a product set".into()));
    };
    let h = 1.5 * set.default_box();
    let mut trials = 0u64;
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::GAUGE, 700_000 + t);
        let x = crate::check::random_box_vector(&mut rng, set.dim(), h);
        let direct = gauge::h2_gauge(set, &x)?;
        let mut assembled = [0.0f64; 4];
        for i in 0..4 {
            assembled[i] = gauge::real_gauge(&parts[i], x.comp(i)?)?;
        }
        let assembled_value = Bih::new(assembled)?;
        trials += 1;
        if (direct.value - assembled_value).sup_abs()
            > slack_scale(&[direct.value, assembled_value])
        {
            let witness = Witness::Law {
                law: "componentwise".to_string(),
                x,
                y: None,
                z: None,
                lambda: None,
                lhs: direct.value,
                rhs: assembled_value,
            };
            return Ok(CheckReport::fail(trials, cfg.seed, witness));
        }

        let i = (t % 4) as usize;
        let proj = x.project(i)?;
        let projected = gauge::h2_gauge(set, &proj)?.value;
        let expected = Bih::idempotent(i) * direct.value;
        trials += 1;
        if (projected - expected).sup_abs() > slack_scale(&[projected, expected]) {
            let witness = Witness::Law {
                law: "projection".to_string(),
                x: proj,
                y: None,
                z: None,
                lambda: Some(Bih::idempotent(i)),
                lhs: projected,
                rhs: expected,
            };
            return Ok(CheckReport::fail(trials, cfg.seed, witness));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

const SANDWICH_LAWS: [&str; 3] = ["closed", "open", "chain"];

/// Membership equivalence between a ball/polytope product and the level
/// sets of its own gauge, skipping a thin band around the unit level.
fn sandwich_check(set: &H2Set, mode: &str, cfg: &CheckConfig) -> Result<CheckReport> {
    if !SANDWICH_LAWS.contains(&mode) {
        return Err(Error::UnknownProperty(format!("sandwich mode {mode}")));
    }
    let h = 1.5 * set.default_box();
    let mut trials = 0u64;
    let examine = |z: &HVec, trials: &mut u64| -> Result<Option<CheckReport>> {
        *trials += 1;
        let q = gauge::h2_gauge(set, z)?.per_component;
        if q.iter().any(|v| (v - 1.0).abs() < tol::SANDWICH_MARGIN) {
            return Ok(None); // boundary band: both sides legitimately fuzzy
        }
        let member = set.contains(z, cfg.tol)?;
        let (left, right) = match mode {
            "closed" => (member, q.iter().all(|v| *v <= 1.0)),
            "open" => (member, q.iter().all(|v| *v < 1.0)),
            _ => {
                let strictly_inside = q.iter().all(|v| *v < 1.0);
                let weakly_inside = q.iter().all(|v| *v <= 1.0);
                // The chain demands: strictly inside implies member, and
                // member implies weakly inside.
                if strictly_inside && !member {
                    (member, true)
                } else if member && !weakly_inside {
                    (member, false)
                } else {
                    return Ok(None);
                }
            }
        };
        if left != right {
            return Ok(Some(CheckReport::fail(
                *trials,
                cfg.seed,
                Witness::SetEquality { point: z.clone(), left_member: left, right_member: right },
            )));
        }
        Ok(None)
    };

    for z in set.distinguished_probes() {
        if let Some(report) = examine(&z, &mut trials)? {
            return Ok(report);
        }
    }
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::SANDWICH, t);
        let z = if t % 2 == 0 {
            set.sample_ambient(&mut rng, h)
        } else {
            set.sample_member(&mut rng, None)?
        };
        if let Some(report) = examine(&z, &mut trials)? {
            return Ok(report);
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

fn sup_lemma_check(family: &[Seminorm], dim: usize, cfg: &CheckConfig) -> Result<CheckReport> {
    if family.len() < 2 {
        return Err(Error::BadInstance("the supremum lemma needs at least two members".into()));
    }
    let mut trials = 0u64;
    let per_prefix = (cfg.trials / (family.len() as u64 - 1)).max(8);
    for m in 1..family.len() {
        let shorter = Seminorm::sup_family(family[..m].to_vec())?;
        let longer = Seminorm::sup_family(family[..m + 1].to_vec())?;
        for t in 0..per_prefix {
            let mut rng = stream_rng(cfg.seed, streams::SEMINORM, 2_000_000 + (m as u64) * per_prefix + t);
            let x = crate::check::random_box_vector(&mut rng, dim, 2.0);
            let a = shorter.eval(&x)?;
            let b = longer.eval(&x)?;
            trials += 1;
            let slack = slack_scale(&[a, b]);
            if a
                .components()
                .iter()
                .zip(b.components().iter())
                .any(|(s, l)| *s > l + slack)
            {
                let witness = Witness::Law {
                    law: format!("monotone#{m}"),
                    x,
                    y: None,
                    z: None,
                    lambda: None,
                    lhs: a,
                    rhs: b,
                };
                return Ok(CheckReport::fail(trials, cfg.seed, witness));
            }
        }
    }

    let family_sep = is_separated(family, dim, cfg)?;
    trials += family_sep.trials;
    if family_sep.verdict.passed() {
        let sup = Seminorm::sup_family(family.to_vec())?;
        let sup_sep = is_separated(&[sup], dim, cfg)?;
        trials += sup_sep.trials;
        if let Some(witness) = sup_sep.witness {
            return Ok(CheckReport::fail(trials, cfg.seed, witness));
        }
    }

    let dominance = check_sup_dominance(family, dim, cfg)?;
    trials += dominance.trials;
    if let Some(witness) = dominance.witness {
        return Ok(CheckReport::fail(trials, cfg.seed, witness));
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

fn bounded_norm_check(
    set: &H2Set,
    neighborhood: &Neighborhood,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let bounded = bounded_check(set, neighborhood, cfg)?;
    let mut trials = bounded.report.trials;
    if let Some(witness) = bounded.report.witness {
        return Ok(CheckReport::fail(trials, cfg.seed, witness));
    }
    let h = 1.5 * set.default_box();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::GAUGE, 800_000 + t);
        let x = crate::check::random_box_vector(&mut rng, set.dim(), h);
        let q = gauge::h2_gauge(set, &x)?.value;
        trials += 1;
        if q.sup_abs() <= tol::NORM_KERNEL && x.sup_abs() > tol::NORM_KERNEL {
            let witness = Witness::Law {
                law: "norm-kernel".to_string(),
                x,
                y: None,
                z: None,
                lambda: None,
                lhs: q,
                rhs: Bih::zero(),
            };
            return Ok(CheckReport::fail(trials, cfg.seed, witness));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

fn unit_modulus(lambda: Bih) -> bool {
    (lambda.modulus() - Bih::one()).sup_abs() <= 1e-9
}

fn dispatch(id: &str, instance: &Instance, cfg: &CheckConfig) -> Result<CheckReport> {
    match id {
        "T1.scaling" => {
            let Instance::SetWithLambda { set, lambda } = instance else {
                return Err(bad_instance(id, "set_with_lambda"));
            };
            if !unit_modulus(*lambda) {
                return Err(Error::BadInstance(
                    "T1.scaling needs a scalar of modulus one".into(),
                ));
            }
            let scaled = set.scale(*lambda)?;
            set_equality(&scaled, set, cfg)
        }
        "T1.modulus" => {
            let Instance::SetWithLambda { set, lambda } = instance else {
                return Err(bad_instance(id, "set_with_lambda"));
            };
            if lambda.is_in_null_cone(tol::NULL_CONE) {
                return Err(Error::BadInstance(
                    "T1.modulus needs an invertible scalar".into(),
                ));
            }
            let by_lambda = set.scale(*lambda)?;
            let by_modulus = set.scale(lambda.modulus())?;
            set_equality(&by_lambda, &by_modulus, cfg)
        }
        "T2.projection-stability" | "T2.absorbing-stability-fail" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            check_idempotent_stability(set, cfg)
        }
        "T4.product-decomposition" | "T4.decomposition" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            check_decomposition(set, cfg)
        }
        "T5.convexity" | "T5-convexity-fail" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            check_h2_convex(set, cfg)
        }
        "T8.pair-sum" | "T8.triple-sum" => {
            let Instance::SetWithIndices { set, indices } = instance else {
                return Err(bad_instance(id, "set_with_indices"));
            };
            minkowski_sum_subset_check(set, indices, cfg)
        }
        "T12.seminorm-laws" => {
            let Instance::SeminormDim { seminorm, dim } = instance else {
                return Err(bad_instance(id, "seminorm_dim"));
            };
            check_seminorm_axioms(seminorm, *dim, cfg)
        }
        "T12.kernel" => {
            let Instance::SeminormKernel { seminorm, killed, dim } = instance else {
                return Err(bad_instance(id, "seminorm_kernel"));
            };
            let axioms = check_seminorm_axioms(seminorm, *dim, cfg)?;
            if !axioms.verdict.passed() {
                return Ok(axioms);
            }
            let kernel = kernel_check(seminorm, killed, *dim, cfg)?;
            let trials = axioms.trials + kernel.trials;
            Ok(match kernel.witness {
                Some(w) => CheckReport::fail(trials, cfg.seed, w),
                None => CheckReport::sampled(trials, cfg.seed),
            })
        }
        "T14.unit-sets" => {
            let Instance::SeminormDim { seminorm, dim } = instance else {
                return Err(bad_instance(id, "seminorm_dim"));
            };
            let probes = pattern_probes(*dim);
            let mut trials = 0u64;
            for strict in [true, false] {
                let level = gauge::unit_set(seminorm, *dim, strict);
                for report in [
                    check_h2_convex(&level, cfg)?,
                    check_balanced(&level, cfg)?,
                    check_absorbing(&level, &probes, cfg)?,
                ] {
                    trials += report.trials;
                    if let Some(witness) = report.witness {
                        return Ok(CheckReport::fail(trials, cfg.seed, witness));
                    }
                }
            }
            Ok(CheckReport::sampled(trials, cfg.seed))
        }
        "T15.gauge-seminorm" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            let p = Seminorm::gauge_of(set.clone())?;
            check_seminorm_axioms(&p, set.dim(), cfg)
        }
        "T15.componentwise" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            componentwise_gauge_check(set, cfg)
        }
        "gauge.oracle" => {
            let Instance::GaugeOracle { dims, pairs } = instance else {
                return Err(bad_instance(id, "gauge_oracle"));
            };
            if dims.is_empty() || dims.iter().any(|d| *d == 0) {
                return Err(Error::BadInstance("oracle dims must be positive".into()));
            }
            let mut trials = 0u64;
            for t in 0..*pairs {
                let (set, x) = oracle_pair(cfg.seed, t, dims);
                trials += 1;
                if let Some((lhs, rhs)) = oracle_disagreement(&set, &x)? {
                    let witness = Witness::Law {
                        law: format!("oracle#{t}"),
                        x,
                        y: None,
                        z: None,
                        lambda: None,
                        lhs,
                        rhs,
                    };
                    return Ok(CheckReport::fail(trials, cfg.seed, witness));
                }
            }
            Ok(CheckReport::sampled(trials, cfg.seed))
        }
        "gauge.bounded-norm" => {
            let Instance::SetWithNeighborhood { set, neighborhood } = instance else {
                return Err(bad_instance(id, "set_with_neighborhood"));
            };
            bounded_norm_check(set, neighborhood, cfg)
        }
        "sandwich.closed" | "sandwich.open" | "sandwich.chain" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            let mode = id.rsplit('.').next().expect("sandwich ids have a mode suffix");
            sandwich_check(set, mode, cfg)
        }
        "SupLemma.monotone" => {
            let Instance::FamilyDim { family, dim } = instance else {
                return Err(bad_instance(id, "family_dim"));
            };
            sup_lemma_check(family, *dim, cfg)
        }
        "absorb.union-example" => {
            let Instance::Set { set } = instance else {
                return Err(bad_instance(id, "set"));
            };
            check_absorbing(set, &pattern_probes(set.dim()), cfg)
        }
        "M.metric-axioms" | "M.metric-identity-fail" => {
            let Instance::MetricDim { metric, dim } = instance else {
                return Err(bad_instance(id, "metric_dim"));
            };
            if metric.family().is_empty() {
                return Err(Error::BadInstance("metric needs a nonempty family".into()));
            }
            check_metric_axioms(metric, *dim, cfg)
        }
        "M.bounded" => {
            let Instance::SetWithNeighborhood { set, neighborhood } = instance else {
                return Err(bad_instance(id, "set_with_neighborhood"));
            };
            Ok(bounded_check(set, neighborhood, cfg)?.report)
        }
        other => Err(Error::UnknownProperty(other.to_string())),
    }
}

fn unbounded_recheck(
    set: &H2Set,
    neighborhood: &Neighborhood,
    witness: &Witness,
    tol_membership: f64,
) -> Result<bool> {
    let Witness::Unbounded { point, lambda } = witness else {
        return Ok(false);
    };
    if !set.contains(point, tol_membership)? {
        return Ok(false);
    }
    let eps = neighborhood.epsilon.components();
    for p in &neighborhood.seminorms {
        let value = p.eval(point)?;
        if value
            .components()
            .iter()
            .zip(eps.iter())
            .any(|(v, e)| *v >= lambda * e)
        {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Replays a failure witness against the instance it was found on.
fn recheck(id: &str, instance: &Instance, witness: &Witness, cfg: &CheckConfig) -> Result<bool> {
    match id {
        "T1.scaling" | "T1.modulus" => {
            let Instance::SetWithLambda { set, lambda } = instance else {
                return Ok(false);
            };
            let Witness::SetEquality { point, left_member, right_member } = witness else {
                return Ok(false);
            };
            let (left, right) = if id == "T1.scaling" {
                (set.scale(*lambda)?, set.clone())
            } else {
                (set.scale(*lambda)?, set.scale(lambda.modulus())?)
            };
            Ok(left.contains(point, cfg.tol)? == *left_member
                && right.contains(point, cfg.tol)? == *right_member
                && left_member != right_member)
        }
        "T2.projection-stability"
        | "T2.absorbing-stability-fail"
        | "T4.product-decomposition"
        | "T4.decomposition"
        | "T5.convexity"
        | "T5-convexity-fail"
        | "absorb.union-example" => {
            let Instance::Set { set } = instance else {
                return Ok(false);
            };
            recheck_set_witness(set, witness, cfg.tol)
        }
        "T8.pair-sum" | "T8.triple-sum" => {
            let Instance::SetWithIndices { set, .. } = instance else {
                return Ok(false);
            };
            recheck_set_witness(set, witness, cfg.tol)
        }
        "T12.seminorm-laws" => {
            let Instance::SeminormDim { seminorm, .. } = instance else {
                return Ok(false);
            };
            recheck_law_witness(seminorm, witness)
        }
        "T12.kernel" => {
            let Instance::SeminormKernel { seminorm, .. } = instance else {
                return Ok(false);
            };
            recheck_law_witness(seminorm, witness)
        }
        "T14.unit-sets" => {
            let Instance::SeminormDim { seminorm, dim } = instance else {
                return Ok(false);
            };
            // The witness may have come from either level set; it is valid
            // if it replays on one of them.
            for strict in [true, false] {
                let level = gauge::unit_set(seminorm, *dim, strict);
                if recheck_set_witness(&level, witness, cfg.tol)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        "T15.gauge-seminorm" => {
            let Instance::Set { set } = instance else {
                return Ok(false);
            };
            let p = Seminorm::gauge_of(set.clone())?;
            recheck_law_witness(&p, witness)
        }
        "T15.componentwise" => {
            let (Instance::Set { set }, Witness::Law { law, x, lhs, rhs, .. }) =
                (instance, witness)
            else {
                return Ok(false);
            };
            let H2Set::Product { parts, .. } = set else { return Ok(false) };
            match law.as_str() {
                "componentwise" => {
                    let direct = gauge::h2_gauge(set, x)?.value;
                    let mut assembled = [0.0f64; 4];
                    for i in 0..4 {
                        assembled[i] = gauge::real_gauge(&parts[i], x.comp(i)?)?;
                    }
                    let assembled = Bih::new(assembled)?;
                    Ok((direct - *lhs).sup_abs() <= slack_scale(&[direct])
                        && (assembled - *rhs).sup_abs() <= slack_scale(&[assembled])
                        && (direct - assembled).sup_abs() > slack_scale(&[direct, assembled]))
                }
                "projection" => {
                    let projected = gauge::h2_gauge(set, x)?.value;
                    Ok((projected - *lhs).sup_abs() <= slack_scale(&[projected])
                        && (projected - *rhs).sup_abs() > slack_scale(&[projected, *rhs]))
                }
                _ => Ok(false),
            }
        }
        "gauge.oracle" => {
            let Instance::GaugeOracle { dims, .. } = instance else {
                return Ok(false);
            };
            let Witness::Law { law, x, .. } = witness else {
                return Ok(false);
            };
            let Some(trial) = law.strip_prefix("oracle#").and_then(|t| t.parse::<u64>().ok())
            else {
                return Ok(false);
            };
            let (set, generated_x) = oracle_pair(cfg.seed, trial, dims);
            if generated_x != *x {
                return Ok(false);
            }
            Ok(oracle_disagreement(&set, x)?.is_some())
        }
        "gauge.bounded-norm" => {
            let Instance::SetWithNeighborhood { set, neighborhood } = instance else {
                return Ok(false);
            };
            match witness {
                Witness::Unbounded { .. } => {
                    unbounded_recheck(set, neighborhood, witness, cfg.tol)
                }
                Witness::Law { law, x, .. } if law == "norm-kernel" => {
                    let q = gauge::h2_gauge(set, x)?.value;
                    Ok(q.sup_abs() <= tol::NORM_KERNEL && x.sup_abs() > tol::NORM_KERNEL)
                }
                _ => Ok(false),
            }
        }
        "sandwich.closed" | "sandwich.open" | "sandwich.chain" => {
            let Instance::Set { set } = instance else {
                return Ok(false);
            };
            let Witness::SetEquality { point, left_member, right_member } = witness else {
                return Ok(false);
            };
            let q = gauge::h2_gauge(set, point)?.per_component;
            if q.iter().any(|v| (v - 1.0).abs() < tol::SANDWICH_MARGIN) {
                return Ok(false);
            }
            let member = set.contains(point, cfg.tol)?;
            let gauge_side = match id {
                "sandwich.closed" => q.iter().all(|v| *v <= 1.0),
                "sandwich.open" => q.iter().all(|v| *v < 1.0),
                _ => {
                    // Chain violations recorded the implication that broke.
                    return Ok(member == *left_member && left_member != right_member);
                }
            };
            Ok(member == *left_member
                && gauge_side == *right_member
                && left_member != right_member)
        }
        "SupLemma.monotone" => {
            let Instance::FamilyDim { family, dim } = instance else {
                return Ok(false);
            };
            match witness {
                Witness::Law { law, x, lhs, rhs, .. } if law.starts_with("monotone#") => {
                    let Some(m) =
                        law.strip_prefix("monotone#").and_then(|m| m.parse::<usize>().ok())
                    else {
                        return Ok(false);
                    };
                    if m == 0 || m >= family.len() {
                        return Ok(false);
                    }
                    let shorter = Seminorm::sup_family(family[..m].to_vec())?;
                    let longer = Seminorm::sup_family(family[..m + 1].to_vec())?;
                    let a = shorter.eval(x)?;
                    let b = longer.eval(x)?;
                    let slack = slack_scale(&[a, b]);
                    Ok((a - *lhs).sup_abs() <= slack
                        && (b - *rhs).sup_abs() <= slack
                        && a.components()
                            .iter()
                            .zip(b.components().iter())
                            .any(|(s, l)| *s > l + slack))
                }
                Witness::Law { law, x, lhs, .. } if law == "dominance" => {
                    let sup = Seminorm::sup_family(family.to_vec())?;
                    let sup_value = sup.eval(x)?;
                    let slack = slack_scale(&[*lhs, sup_value]);
                    Ok(family.iter().try_fold(false, |acc, p| {
                        Ok::<bool, Error>(
                            acc | p
                                .eval(x)?
                                .components()
                                .iter()
                                .zip(sup_value.components().iter())
                                .any(|(m, s)| *m > s + slack),
                        )
                    })?)
                }
                Witness::Separation { probe } => {
                    if probe.sup_abs() <= cfg.tol {
                        return Ok(false);
                    }
                    let sup = Seminorm::sup_family(family.to_vec())?;
                    let sup_vanishes = sup.eval(probe)?.sup_abs() <= tol::NORM_KERNEL;
                    let _ = dim;
                    Ok(sup_vanishes)
                }
                _ => Ok(false),
            }
        }
        "M.metric-axioms" | "M.metric-identity-fail" => {
            let Instance::MetricDim { metric, dim } = instance else {
                return Ok(false);
            };
            recheck_metric_witness(metric, *dim, witness)
        }
        "M.bounded" => {
            let Instance::SetWithNeighborhood { set, neighborhood } = instance else {
                return Ok(false);
            };
            unbounded_recheck(set, neighborhood, witness, cfg.tol)
        }
        _ => Err(Error::UnknownProperty(id.to_string())),
    }
}

/// Verifies one property: resolves the instance, runs the owning check and,
/// on failure, replays the witness.
pub fn verify(spec: &PropertySpec) -> Result<VerifyReport> {
    let row = registry_row(&spec.id)?;
    let instance = spec.instance.clone().unwrap_or_else(|| row.instance.clone());
    let cfg = CheckConfig { trials: spec.trials, seed: spec.seed, tol: spec.tol };
    let start = Instant::now();
    let report = dispatch(&spec.id, &instance, &cfg)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let witness_reverified = match &report.witness {
        Some(w) => Some(recheck(&spec.id, &instance, w, &cfg).unwrap_or(false)),
        None => None,
    };
    let as_expected =
        report.verdict == row.expected && witness_reverified.unwrap_or(true);
    Ok(VerifyReport {
        id: spec.id.clone(),
        claim: row.claim.to_string(),
        expected: row.expected,
        instance,
        report,
        as_expected,
        witness_reverified,
        wall_ms,
    })
}

/// Suite-level configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Subset of registry ids to run; `None` runs everything.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<String>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, trials: default_trials(), tol: default_tol(), ids: None }
    }
}

/// All per-property reports plus the roll-up used for the exit status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub reports: Vec<VerifyReport>,
    /// True iff every property matched its expected verdict.
    pub all_expected: bool,
}

/// Runs the registry (or a subset) in a fixed order.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if let Some(ids) = &config.ids {
        if ids.is_empty() {
            return Err(Error::ConfigError("the property list is empty".into()));
        }
        for id in ids {
            registry_row(id)?;
        }
    }
    let mut reports = Vec::new();
    for row in registry() {
        if let Some(ids) = &config.ids {
            if !ids.iter().any(|id| id == row.id) {
                continue;
            }
        }
        let spec = PropertySpec {
            id: row.id.to_string(),
            instance: None,
            trials: config.trials,
            seed: config.seed,
            tol: config.tol,
        };
        reports.push(verify(&spec)?);
    }
    let all_expected = reports.iter().all(|r| r.as_expected);
    Ok(SuiteReport { reports, all_expected })
}

/// Reads a JSON suite configuration from disk and runs it.
pub fn run_suite_from_path(path: &str) -> Result<SuiteReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read {path}: {e}")))?;
    if text.trim().is_empty() {
        return Err(Error::ConfigError(format!("{path} is empty")));
    }
    let config: SuiteConfig = serde_json::from_str(&text)
        .map_err(|e| Error::ConfigError(format!("cannot parse {path}: {e}")))?;
    run_suite(&config)
}
