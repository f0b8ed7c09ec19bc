//! The translation-invariant metric induced by a seminorm family.
//!
//! A countable family `p_1, p_2, ...` induces
//! `d(x, y) = sum 2^{-n} q_n / (1 + q_n)` with `q_n = p_n(x - y)`, summed
//! over the family up to a truncation depth. The value is a ring element
//! strictly below one in every component; it is a metric exactly when the
//! family separates points, and the checker reports the separating failure
//! as a replayable witness when it is not.

use serde::{Deserialize, Serialize};

use crate::check::{random_box_vector, stream_rng, streams, CheckReport, Witness};
use crate::error::{Error, Result};
use crate::seminorm::Seminorm;
use crate::sets::{CheckConfig, H2Set, PredicateRule};
use crate::tol;
use crate::{Bih, HVec};

/// Default series truncation depth; the ignored tail is below `2^-40`.
pub const DEFAULT_TRUNCATION: usize = 40;

/// Metric induced by a finite (prefix of a) seminorm family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Metric {
    family: Vec<Seminorm>,
    truncation: usize,
}

impl H2Metric {
    pub fn new(family: Vec<Seminorm>) -> Result<Self> {
        Self::with_truncation(family, DEFAULT_TRUNCATION)
    }

    pub fn with_truncation(family: Vec<Seminorm>, truncation: usize) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::EmptySet);
        }
        if truncation == 0 {
            return Err(Error::ConfigError("truncation depth must be at least one".into()));
        }
        Ok(H2Metric { family, truncation })
    }

    pub fn family(&self) -> &[Seminorm] {
        &self.family
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Distance between two points: the weighted series over the family,
    /// truncated at the configured depth. Always strictly below one in
    /// every component; exactly zero at equal inputs.
    pub fn eval(&self, x: &HVec, y: &HVec) -> Result<Bih> {
        let diff = x.sub(y)?;
        let depth = self.truncation.min(self.family.len());
        let mut total = Bih::zero();
        for n in 1..=depth {
            let q = self.family[n - 1].eval(&diff)?;
            // q is nonnegative, so 1 + q is invertible componentwise.
            let damped = q * (Bih::one() + q).inverse()?;
            total = total + damped * 0.5f64.powi(n as i32);
        }
        Ok(total)
    }
}

/// Open seminorm neighborhood `{x : p(x - center) < epsilon, all p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub center: HVec,
    pub epsilon: Bih,
    pub seminorms: Vec<Seminorm>,
}

impl Neighborhood {
    pub fn new(center: HVec, epsilon: Bih, seminorms: Vec<Seminorm>) -> Result<Self> {
        if !Bih::zero().lt(epsilon) {
            return Err(Error::InvalidInput(
                "neighborhood radius must be strictly positive in every component".into(),
            ));
        }
        if seminorms.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Neighborhood { center, epsilon, seminorms })
    }

    /// Strict componentwise membership, with the usual boundary tolerance.
    pub fn contains(&self, x: &HVec, tol: f64) -> Result<bool> {
        let diff = x.sub(&self.center)?;
        for p in &self.seminorms {
            let value = p.eval(&diff)?;
            let inside = value
                .components()
                .iter()
                .zip(self.epsilon.components().iter())
                .all(|(v, e)| *v < e - tol);
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The neighborhood as a predicate set. Only origin-centered
    /// neighborhoods have this representation.
    pub fn as_set(&self, dim: usize) -> Result<H2Set> {
        if !self.center.is_zero(0.0) {
            return Err(Error::UnsupportedSet(
                "only origin-centered neighborhoods convert to sets".into(),
            ));
        }
        Ok(H2Set::predicate(
            dim,
            PredicateRule::SeminormLevel {
                seminorms: self.seminorms.clone(),
                epsilon: self.epsilon,
                strict: true,
            },
        ))
    }
}

fn slack_for(values: &[Bih]) -> f64 {
    let scale = values.iter().map(|v| v.sup_abs()).fold(1.0f64, f64::max);
    tol::CHECK_SLACK * (1.0 + scale)
}

fn metric_law_violation(
    metric: &H2Metric,
    law: &str,
    x: &HVec,
    y: &HVec,
    z: &HVec,
) -> Result<Option<Witness>> {
    let make = |lhs: Bih, rhs: Bih| Witness::Law {
        law: law.to_string(),
        x: x.clone(),
        y: Some(y.clone()),
        z: Some(z.clone()),
        lambda: None,
        lhs,
        rhs,
    };
    match law {
        "identity" => {
            let lhs = metric.eval(x, x)?;
            if lhs.sup_abs() > slack_for(&[lhs]) {
                return Ok(Some(make(lhs, Bih::zero())));
            }
        }
        "symmetry" => {
            let lhs = metric.eval(x, y)?;
            let rhs = metric.eval(y, x)?;
            if (lhs - rhs).sup_abs() > slack_for(&[lhs, rhs]) {
                return Ok(Some(make(lhs, rhs)));
            }
        }
        "triangle" => {
            let lhs = metric.eval(x, z)?;
            let rhs = metric.eval(x, y)? + metric.eval(y, z)?;
            let slack = slack_for(&[lhs, rhs]);
            if lhs
                .components()
                .iter()
                .zip(rhs.components().iter())
                .any(|(l, r)| *l > r + slack)
            {
                return Ok(Some(make(lhs, rhs)));
            }
        }
        // z plays the role of the common translation.
        "translation_invariance" => {
            let lhs = metric.eval(&x.add(z)?, &y.add(z)?)?;
            let rhs = metric.eval(x, y)?;
            if (lhs - rhs).sup_abs() > slack_for(&[lhs, rhs]) {
                return Ok(Some(make(lhs, rhs)));
            }
        }
        "bounded_by_one" => {
            let lhs = metric.eval(x, y)?;
            if lhs.components().iter().any(|v| !(*v < 1.0)) {
                return Ok(Some(make(lhs, Bih::one())));
            }
        }
        other => return Err(Error::UnknownProperty(format!("metric law {other}"))),
    }
    Ok(None)
}

const METRIC_LAWS: [&str; 5] =
    ["identity", "symmetry", "triangle", "translation_invariance", "bounded_by_one"];

/// Nonzero probes on which a non-separating family might vanish entirely.
fn separation_probes(dim: usize, cfg: &CheckConfig) -> Vec<HVec> {
    let ones = HVec::from_real_vec(&vec![1.0; dim]);
    let mut probes = vec![ones.clone()];
    for i in 0..4 {
        probes.push(ones.project(i).expect("index in range"));
    }
    for t in 0..cfg.trials.min(256) {
        let mut rng = stream_rng(cfg.seed, streams::METRIC, 500_000 + t);
        let x = random_box_vector(&mut rng, dim, 2.0);
        probes.push(x.project((t % 4) as usize).expect("index in range"));
        probes.push(x);
    }
    probes
}

/// Checks the metric laws and, first of all, that the family actually
/// separates points — a vanishing nonzero probe is reported as the witness,
/// since it collapses the distance between distinct points to zero.
pub fn check_metric_axioms(
    metric: &H2Metric,
    dim: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let mut trials = 0u64;

    let separating = metric.family().iter().any(Seminorm::contains_canonical);
    if !separating {
        let zero = HVec::zeros(dim);
        for probe in separation_probes(dim, cfg) {
            if probe.sup_abs() <= tol::MEMBERSHIP {
                continue;
            }
            trials += 1;
            let d = metric.eval(&zero, &probe)?;
            if d.sup_abs() <= tol::NORM_KERNEL {
                return Ok(CheckReport::fail(trials, cfg.seed, Witness::Separation { probe }));
            }
        }
    }

    let ones = HVec::from_real_vec(&vec![1.0; dim]);
    let mut curated: Vec<HVec> = vec![HVec::zeros(dim), ones.clone(), ones.neg()];
    for i in 0..4 {
        curated.push(ones.project(i)?);
    }
    for (i, x) in curated.iter().enumerate() {
        let y = &curated[(i + 1) % curated.len()];
        let z = &curated[(i + 2) % curated.len()];
        for law in METRIC_LAWS {
            trials += 1;
            if let Some(w) = metric_law_violation(metric, law, x, y, z)? {
                return Ok(CheckReport::fail(trials, cfg.seed, w));
            }
        }
    }

    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::METRIC, t);
        let h = 2.0 * (1.0 + (t % 3) as f64);
        let x = random_box_vector(&mut rng, dim, h);
        let y = random_box_vector(&mut rng, dim, h);
        let z = random_box_vector(&mut rng, dim, h);
        for law in METRIC_LAWS {
            trials += 1;
            if let Some(w) = metric_law_violation(metric, law, &x, &y, &z)? {
                return Ok(CheckReport::fail(trials, cfg.seed, w));
            }
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Replays a metric witness: recorded sides must reproduce and still violate.
pub fn recheck_metric_witness(
    metric: &H2Metric,
    dim: usize,
    witness: &Witness,
) -> Result<bool> {
    match witness {
        Witness::Separation { probe } => {
            if probe.sup_abs() <= tol::MEMBERSHIP {
                return Ok(false);
            }
            let d = metric.eval(&HVec::zeros(dim), probe)?;
            Ok(d.sup_abs() <= tol::NORM_KERNEL)
        }
        Witness::Law { law, x, y, z, lhs, rhs, .. } => {
            let y = y.as_ref().ok_or_else(|| Error::BadInstance("law needs y".into()))?;
            let z = z.as_ref().ok_or_else(|| Error::BadInstance("law needs z".into()))?;
            match metric_law_violation(metric, law, x, y, z)? {
                Some(Witness::Law { lhs: l2, rhs: r2, .. }) => {
                    let scale = 1.0 + lhs.sup_abs().max(rhs.sup_abs());
                    Ok((l2 - *lhs).sup_abs() <= 1e-9 * scale
                        && (r2 - *rhs).sup_abs() <= 1e-9 * scale)
                }
                _ => Ok(false),
            }
        }
        _ => Err(Error::BadInstance("witness does not belong to a metric property".into())),
    }
}

/// Result of a boundedness search: the verdict plus, on success, the
/// smallest power-of-two inflation of the neighborhood that swallowed
/// every probed member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedReport {
    pub report: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

const BOUNDED_CAP: u32 = 40;

/// Directions in which the set provably extends to infinity: nonzero
/// points on which every seminorm defining the set vanishes exactly, so
/// that arbitrary real multiples stay members.
fn escape_directions(set: &H2Set, cfg: &CheckConfig) -> Result<Vec<HVec>> {
    let H2Set::LambdaPredicate { dim, rule: PredicateRule::SeminormLevel { seminorms, .. } } = set
    else {
        return Ok(Vec::new());
    };
    let mut found = Vec::new();
    for probe in separation_probes(*dim, cfg) {
        if probe.sup_abs() <= tol::MEMBERSHIP {
            continue;
        }
        let mut vanishes = true;
        for p in seminorms {
            if p.eval(&probe)?.sup_abs() != 0.0 {
                vanishes = false;
                break;
            }
        }
        if vanishes {
            found.push(probe);
        }
    }
    Ok(found)
}

/// Whether the set is bounded with respect to the (origin-centered)
/// neighborhood: searches for `lambda = 2^k` with `S` inside `lambda V`.
///
/// Members are probed through the neighborhood's seminorms; directions in
/// which the set provably extends to infinity are tested against the
/// neighborhood first, so unbounded strips fail deterministically instead
/// of exhausting the scale cap.
pub fn bounded_check(
    set: &H2Set,
    neighborhood: &Neighborhood,
    cfg: &CheckConfig,
) -> Result<BoundedReport> {
    if !neighborhood.center.is_zero(0.0) {
        return Err(Error::PreconditionFailed(
            "boundedness is probed against an origin-centered neighborhood".into(),
        ));
    }
    let eps = neighborhood.epsilon.components();
    let inside_scaled = |x: &HVec, lambda: f64| -> Result<bool> {
        for p in &neighborhood.seminorms {
            let value = p.eval(x)?;
            let ok = value
                .components()
                .iter()
                .zip(eps.iter())
                .all(|(v, e)| *v < lambda * e);
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let mut trials = 0u64;

    // Provably unbounded directions: if the neighborhood sees one, no
    // finite inflation contains the set.
    for dir in escape_directions(set, cfg)? {
        trials += 1;
        let mut seen = false;
        for p in &neighborhood.seminorms {
            if p.eval(&dir)?.sup_abs() > tol::NORM_KERNEL {
                seen = true;
                break;
            }
        }
        if seen {
            let lambda = 2.0f64.powi(BOUNDED_CAP as i32);
            let eps_max = eps.iter().fold(0.0f64, |m, e| m.max(*e));
            let value = Bih::sup_h2(
                &neighborhood
                    .seminorms
                    .iter()
                    .map(|p| p.eval(&dir))
                    .collect::<Result<Vec<_>>>()?,
            )?;
            let scale = 4.0 * lambda * eps_max / value.sup_abs().max(1e-300);
            let point = dir.scale_real(scale);
            let witness = Witness::Unbounded { point, lambda };
            return Ok(BoundedReport {
                report: CheckReport::fail(trials, cfg.seed, witness),
                lambda: None,
            });
        }
    }

    let distinguished: Vec<HVec> = {
        let mut pts = Vec::new();
        for p in set.distinguished_members() {
            if set.contains(&p, cfg.tol)? {
                pts.push(p);
            }
        }
        pts
    };
    let per_level = 16usize.max((cfg.trials / 8) as usize);

    let mut deepest: Option<(HVec, f64)> = None;
    for k in 0..=BOUNDED_CAP {
        let lambda = 2.0f64.powi(k as i32);
        let mut level_ok = true;
        for x in &distinguished {
            trials += 1;
            if !inside_scaled(x, lambda)? {
                deepest = Some((x.clone(), lambda));
                level_ok = false;
                break;
            }
        }
        if level_ok {
            for t in 0..per_level {
                let mut rng =
                    stream_rng(cfg.seed, streams::BOUNDED, (k as u64) * 100_000 + t as u64);
                let x = set.sample_member(&mut rng, None)?;
                trials += 1;
                if !inside_scaled(&x, lambda)? {
                    deepest = Some((x, lambda));
                    level_ok = false;
                    break;
                }
            }
        }
        if level_ok {
            return Ok(BoundedReport {
                report: CheckReport::sampled(trials, cfg.seed),
                lambda: Some(lambda),
            });
        }
    }
    let (point, lambda) = deepest.expect("a failing level was recorded");
    Ok(BoundedReport {
        report: CheckReport::fail(trials, cfg.seed, Witness::Unbounded { point, lambda }),
        lambda: None,
    })
}
