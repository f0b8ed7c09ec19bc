//! Ring-valued seminorms on the module and their law checkers.
//!
//! A seminorm here takes values in the nonnegative cone of the ring, not in
//! the reals: absolute homogeneity reads `p(lambda x) = |lambda| p(x)` with
//! the componentwise modulus, and subadditivity is a componentwise
//! inequality. Four constructions cover the toolkit: the canonical
//! componentwise norm, coordinate seminorms that kill a subset of
//! idempotent components (giving nontrivial kernels), gauges of symmetric
//! product sets, and finite suprema of other seminorms.

use serde::{Deserialize, Serialize};

use crate::algebra::Bihyperbolic;
use crate::check::{
    random_box_vector, random_unit_modulus, sign_patterns, stream_rng, streams, CheckReport,
    Witness,
};
use crate::error::{Error, Result};
use crate::linear::CanonicalNorm;
use crate::sets::{CheckConfig, H2Set};
use crate::tol;
use crate::{Bih, HVec};

/// A seminorm on the rank-`n` module with values in the nonnegative cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seminorm {
    /// The componentwise norm; a genuine norm (trivial kernel).
    Canonical { norm: CanonicalNorm },
    /// Applies `base` after projecting onto the kept idempotent
    /// components; vanishes exactly on the killed ones.
    Coordinate { kept: Vec<usize>, base: CanonicalNorm },
    /// Minkowski gauge of a symmetric product set.
    Gauge { set: H2Set },
    /// Componentwise supremum of finitely many seminorms.
    Sup { members: Vec<Seminorm> },
}

impl Seminorm {
    pub fn canonical(norm: CanonicalNorm) -> Self {
        Seminorm::Canonical { norm }
    }

    /// Seminorm that sees only the listed idempotent components.
    pub fn coordinate(kept: Vec<usize>, base: CanonicalNorm) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::InvalidInput("coordinate seminorm keeps nothing".into()));
        }
        for (n, &i) in kept.iter().enumerate() {
            if i >= 4 {
                return Err(Error::BadIndex(i));
            }
            if kept[..n].contains(&i) {
                return Err(Error::InvalidInput("repeated component index".into()));
            }
        }
        Ok(Seminorm::Coordinate { kept, base })
    }

    /// Gauge seminorm of a product set. Homogeneity under the modulus
    /// requires every part to be symmetric about the origin.
    pub fn gauge_of(set: H2Set) -> Result<Self> {
        let H2Set::Product { dim, parts } = &set else {
            return Err(Error::UnsupportedSet("gauge seminorms need a product set".into()));
        };
        for part in parts {
            if !part.is_symmetric(tol::MEMBERSHIP) {
                return Err(Error::InvalidInput(
                    "gauge seminorms need origin-symmetric parts".into(),
                ));
            }
            if !part.contains_origin(*dim, tol::MEMBERSHIP)? {
                return Err(Error::InvalidInput("gauge seminorms need the origin".into()));
            }
        }
        Ok(Seminorm::Gauge { set })
    }

    pub fn sup_family(members: Vec<Seminorm>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Seminorm::Sup { members })
    }

    /// Evaluates the seminorm; the result lies in the nonnegative cone.
    pub fn eval(&self, x: &HVec) -> Result<Bih> {
        match self {
            Seminorm::Canonical { norm } => Ok(norm.eval(x)),
            Seminorm::Coordinate { kept, base } => {
                let mut masked = HVec::zeros(x.dim());
                for &i in kept {
                    masked = masked.add(&x.project(i)?)?;
                }
                Ok(base.eval(&masked))
            }
            Seminorm::Gauge { set } => Ok(crate::gauge::h2_gauge(set, x)?.value),
            Seminorm::Sup { members } => {
                let mut values = Vec::with_capacity(members.len());
                for p in members {
                    values.push(p.eval(x)?);
                }
                Bihyperbolic::sup_h2(&values)
            }
        }
    }

    /// Whether the construction contains a full canonical norm, which makes
    /// it (and any family containing it) separating by construction.
    pub fn contains_canonical(&self) -> bool {
        match self {
            Seminorm::Canonical { .. } => true,
            Seminorm::Coordinate { kept, .. } => (0..4).all(|i| kept.contains(&i)),
            Seminorm::Gauge { .. } => false,
            Seminorm::Sup { members } => members.iter().any(Seminorm::contains_canonical),
        }
    }
}

fn slack_for(values: &[Bih]) -> f64 {
    let scale = values.iter().map(|v| v.sup_abs()).fold(1.0f64, f64::max);
    tol::CHECK_SLACK * (1.0 + scale)
}

/// One law evaluation; `None` means the law held on these inputs.
fn law_violation(
    eval: &dyn Fn(&HVec) -> Result<Bih>,
    law: &str,
    x: &HVec,
    y: Option<&HVec>,
    lambda: Option<Bih>,
) -> Result<Option<Witness>> {
    let make = |lhs: Bih, rhs: Bih| Witness::Law {
        law: law.to_string(),
        x: x.clone(),
        y: y.cloned(),
        z: None,
        lambda,
        lhs,
        rhs,
    };
    match law {
        "zero_at_zero" => {
            let lhs = eval(x)?;
            if lhs.sup_abs() > slack_for(&[lhs]) {
                return Ok(Some(make(lhs, Bih::zero())));
            }
        }
        "nonnegative" => {
            let lhs = eval(x)?;
            let slack = slack_for(&[lhs]);
            if lhs.components().iter().any(|v| *v < -slack) {
                return Ok(Some(make(lhs, Bih::zero())));
            }
        }
        "homogeneity" => {
            let lambda = lambda.expect("homogeneity carries a scalar");
            let lhs = eval(&x.scale(lambda))?;
            let rhs = lambda.modulus() * eval(x)?;
            if (lhs - rhs).sup_abs() > slack_for(&[lhs, rhs]) {
                return Ok(Some(make(lhs, rhs)));
            }
        }
        "subadditive" => {
            let y = y.expect("subadditivity needs two points");
            let lhs = eval(&x.add(y)?)?;
            let rhs = eval(x)? + eval(y)?;
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
        "reverse_triangle" => {
            let y = y.expect("reverse triangle needs two points");
            let lhs = (eval(x)? - eval(y)?).modulus();
            let rhs = eval(&x.sub(y)?)?;
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
        other => return Err(Error::UnknownProperty(format!("seminorm law {other}"))),
    }
    Ok(None)
}

/// Core of the axioms check, over a bare evaluation map so that maps which
/// are not seminorms at all can be fed through the same machinery.
pub fn check_axioms_fn(
    eval: &dyn Fn(&HVec) -> Result<Bih>,
    dim: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let mut trials = 0u64;
    let ones = HVec::from_real_vec(&vec![1.0; dim]);

    // Curated points and scalars first: sign patterns cover zero, the units,
    // the idempotents and the rest of the null cone.
    let mut curated: Vec<HVec> = vec![HVec::zeros(dim), ones.clone(), ones.neg()];
    for i in 0..4 {
        curated.push(ones.project(i)?);
    }
    if let Some(report) = run_law(eval, "zero_at_zero", &HVec::zeros(dim), None, None, cfg, &mut trials)? {
        return Ok(report);
    }
    for (xi, x) in curated.iter().enumerate() {
        let y = &curated[(xi + 1) % curated.len()];
        for lambda in [Bih::idempotent(0), -Bih::one(), Bih::j1()] {
            for law in ["nonnegative", "homogeneity", "subadditive", "reverse_triangle"] {
                if let Some(report) =
                    run_law(eval, law, x, Some(y), Some(lambda), cfg, &mut trials)?
                {
                    return Ok(report);
                }
            }
        }
    }

    let patterns = sign_patterns();
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::SEMINORM, t);
        let x = random_box_vector(&mut rng, dim, 2.0);
        let y = random_box_vector(&mut rng, dim, 2.0);
        let lambda = if (t as usize) < patterns.len() {
            patterns[t as usize]
        } else {
            random_unit_modulus(&mut rng) * 2.0
        };
        for law in ["nonnegative", "homogeneity", "subadditive", "reverse_triangle"] {
            if let Some(report) = run_law(eval, law, &x, Some(&y), Some(lambda), cfg, &mut trials)? {
                return Ok(report);
            }
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

fn run_law(
    eval: &dyn Fn(&HVec) -> Result<Bih>,
    law: &str,
    x: &HVec,
    y: Option<&HVec>,
    lambda: Option<Bih>,
    cfg: &CheckConfig,
    trials: &mut u64,
) -> Result<Option<CheckReport>> {
    *trials += 1;
    Ok(law_violation(eval, law, x, y, lambda)?
        .map(|w| CheckReport::fail(*trials, cfg.seed, w)))
}

/// Checks the seminorm laws on random and degenerate inputs.
pub fn check_seminorm_axioms(p: &Seminorm, dim: usize, cfg: &CheckConfig) -> Result<CheckReport> {
    check_axioms_fn(&|x| p.eval(x), dim, cfg)
}

/// Verifies that the seminorm vanishes on everything supported on the
/// `killed` idempotent components.
pub fn kernel_check(
    p: &Seminorm,
    killed: &[usize],
    dim: usize,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    for &i in killed {
        if i >= 4 {
            return Err(Error::BadIndex(i));
        }
    }
    let mut trials = 0u64;
    let to_kernel = |x: &HVec| -> Result<HVec> {
        let mut masked = HVec::zeros(x.dim());
        for &i in killed {
            masked = masked.add(&x.project(i)?)?;
        }
        Ok(masked)
    };
    let ones = HVec::from_real_vec(&vec![1.0; dim]);
    let mut probes = vec![to_kernel(&ones)?];
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::KERNEL, t);
        probes.push(to_kernel(&random_box_vector(&mut rng, dim, 2.0))?);
    }
    for z in probes {
        trials += 1;
        let value = p.eval(&z)?;
        if value.sup_abs() > tol::NORM_KERNEL {
            let witness = Witness::Law {
                law: "kernel".to_string(),
                x: z,
                y: None,
                z: None,
                lambda: None,
                lhs: value,
                rhs: Bih::zero(),
            };
            return Ok(CheckReport::fail(trials, cfg.seed, witness));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Searches for a nonzero point on which every seminorm of the family
/// vanishes. Families containing a full canonical norm are certified
/// separating without sampling.
pub fn is_separated(family: &[Seminorm], dim: usize, cfg: &CheckConfig) -> Result<CheckReport> {
    if family.is_empty() {
        return Err(Error::EmptySet);
    }
    if family.iter().any(Seminorm::contains_canonical) {
        return Ok(CheckReport::certified(cfg.seed));
    }
    let ones = HVec::from_real_vec(&vec![1.0; dim]);
    let mut probes = vec![ones.clone()];
    for i in 0..4 {
        probes.push(ones.project(i)?);
    }
    for k in 0..dim {
        let mut axis = vec![0.0; dim];
        axis[k] = 1.0;
        let axis = HVec::from_real_vec(&axis);
        probes.push(axis.clone());
        for i in 0..4 {
            probes.push(axis.project(i)?);
        }
    }
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::SEPARATED, t);
        let x = random_box_vector(&mut rng, dim, 2.0);
        probes.push(x.project((t % 4) as usize)?);
        probes.push(x);
    }

    let mut trials = 0u64;
    for probe in probes {
        if probe.sup_abs() <= tol::MEMBERSHIP {
            continue;
        }
        trials += 1;
        let mut all_zero = true;
        for p in family {
            if p.eval(&probe)?.sup_abs() > tol::NORM_KERNEL {
                all_zero = false;
                break;
            }
        }
        if all_zero {
            return Ok(CheckReport::fail(trials, cfg.seed, Witness::Separation { probe }));
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// The supremum seminorm dominates each member, componentwise.
pub fn check_sup_dominance(family: &[Seminorm], dim: usize, cfg: &CheckConfig) -> Result<CheckReport> {
    let sup = Seminorm::sup_family(family.to_vec())?;
    let mut trials = 0u64;
    for t in 0..cfg.trials {
        let mut rng = stream_rng(cfg.seed, streams::SEMINORM, 1_000_000 + t);
        let x = random_box_vector(&mut rng, dim, 2.0);
        let sup_value = sup.eval(&x)?;
        for p in family {
            trials += 1;
            let member = p.eval(&x)?;
            let slack = slack_for(&[member, sup_value]);
            let dominated = member
                .components()
                .iter()
                .zip(sup_value.components().iter())
                .all(|(m, s)| *m <= s + slack);
            if !dominated {
                let witness = Witness::Law {
                    law: "dominance".to_string(),
                    x,
                    y: None,
                    z: None,
                    lambda: None,
                    lhs: member,
                    rhs: sup_value,
                };
                return Ok(CheckReport::fail(trials, cfg.seed, witness));
            }
        }
    }
    Ok(CheckReport::sampled(trials, cfg.seed))
}

/// Replays a law-shaped witness against a seminorm: the recorded sides
/// must reproduce and the law must still be violated.
pub fn recheck_law_witness(p: &Seminorm, witness: &Witness) -> Result<bool> {
    recheck_law_fn(&|x| p.eval(x), witness)
}

pub(crate) fn recheck_law_fn(
    eval: &dyn Fn(&HVec) -> Result<Bih>,
    witness: &Witness,
) -> Result<bool> {
    let Witness::Law { law, x, y, lambda, lhs, rhs, .. } = witness else {
        return Err(Error::BadInstance("witness does not record a law".into()));
    };
    if law == "kernel" || law == "dominance" {
        // Construction-specific laws: reproduce the recorded left side only.
        let fresh = eval(x)?;
        return Ok((fresh - *lhs).sup_abs() <= 1e-9 * (1.0 + lhs.sup_abs())
            && fresh.sup_abs() > tol::NORM_KERNEL);
    }
    let fresh = law_violation(eval, law, x, y.as_ref(), *lambda)?;
    match fresh {
        Some(Witness::Law { lhs: l2, rhs: r2, .. }) => {
            let scale = 1.0 + lhs.sup_abs().max(rhs.sup_abs());
            Ok((l2 - *lhs).sup_abs() <= 1e-9 * scale && (r2 - *rhs).sup_abs() <= 1e-9 * scale)
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::Verdict;
    use crate::linear::ComponentNorm::{P1, P2, PInf};
    use crate::sets::RealConvexBody;
    use crate::HVector;

    fn cfg(trials: u64) -> CheckConfig {
        CheckConfig { trials, ..CheckConfig::default() }
    }

    #[test]
    fn canonical_norm_passes_the_axioms() {
        let p = Seminorm::canonical(CanonicalNorm::uniform(P2));
        let report = check_seminorm_axioms(&p, 3, &cfg(150)).unwrap();
        assert_eq!(report.verdict, Verdict::SampledPass);
    }

    #[test]
    fn coordinate_seminorm_kills_exactly_the_dropped_components() {
        let p = Seminorm::coordinate(vec![0, 2], CanonicalNorm::uniform(P1)).unwrap();
        let report = check_seminorm_axioms(&p, 2, &cfg(150)).unwrap();
        assert_eq!(report.verdict, Verdict::SampledPass);

        let kernel = kernel_check(&p, &[1, 3], 2, &cfg(100)).unwrap();
        assert_eq!(kernel.verdict, Verdict::SampledPass);

        // Killing a kept component must be caught.
        let bad = kernel_check(&p, &[0], 2, &cfg(100)).unwrap();
        assert_eq!(bad.verdict, Verdict::Fail);
        assert!(recheck_law_witness(&p, bad.witness.as_ref().unwrap()).unwrap());

        let x = HVector::new([
            vec![1.0, 2.0],
            vec![5.0, 5.0],
            vec![0.5, 0.5],
            vec![-3.0, 1.0],
        ])
        .unwrap();
        let v = p.eval(&x).unwrap();
        assert_eq!(v.components()[1], 0.0);
        assert_eq!(v.components()[3], 0.0);
        assert!((v.components()[0] - 3.0).abs() < 1e-12);
        assert!((v.components()[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_of_a_symmetric_product_is_a_seminorm() {
        let square = RealConvexBody::hull(vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ])
        .unwrap();
        let set = H2Set::product_with_dim(
            2,
            [
                square,
                RealConvexBody::ball(P2, 2.0, true).unwrap(),
                RealConvexBody::ball(P1, 1.0, true).unwrap(),
                RealConvexBody::ball(PInf, 0.5, false).unwrap(),
            ],
        )
        .unwrap();
        let p = Seminorm::gauge_of(set).unwrap();
        let report = check_seminorm_axioms(&p, 2, &cfg(60)).unwrap();
        assert_eq!(report.verdict, Verdict::SampledPass, "witness: {:?}", report.witness);
    }

    #[test]
    fn asymmetric_products_are_rejected_as_gauge_seminorms() {
        let shifted = RealConvexBody::hull(vec![vec![1.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let ball = RealConvexBody::ball(P2, 1.0, true).unwrap();
        let set = H2Set::product_with_dim(2, [shifted, ball.clone(), ball.clone(), ball]).unwrap();
        assert!(matches!(Seminorm::gauge_of(set), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sup_family_dominates_and_satisfies_the_axioms() {
        let family = vec![
            Seminorm::coordinate(vec![0], CanonicalNorm::uniform(P2)).unwrap(),
            Seminorm::coordinate(vec![1, 2, 3], CanonicalNorm::uniform(P1)).unwrap(),
        ];
        let sup = Seminorm::sup_family(family.clone()).unwrap();
        let axioms = check_seminorm_axioms(&sup, 2, &cfg(120)).unwrap();
        assert_eq!(axioms.verdict, Verdict::SampledPass);
        let dom = check_sup_dominance(&family, 2, &cfg(120)).unwrap();
        assert_eq!(dom.verdict, Verdict::SampledPass);
        assert!(matches!(Seminorm::sup_family(vec![]), Err(Error::EmptySet)));
    }

    #[test]
    fn the_identity_map_is_not_a_seminorm() {
        let eval = |x: &HVec| x.entry(0);
        let report = check_axioms_fn(&eval, 1, &cfg(50)).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let witness = report.witness.unwrap();
        assert!(recheck_law_fn(&eval, &witness).unwrap());
        // First curated violation: |p(0) - p(1)| exceeds p(0 - 1) = -1.
        let Witness::Law { law, .. } = &witness else { panic!() };
        assert_eq!(law, "reverse_triangle");
    }

    #[test]
    fn separation_distinguishes_full_and_partial_families() {
        let full = vec![Seminorm::canonical(CanonicalNorm::uniform(P2))];
        let report = is_separated(&full, 2, &cfg(50)).unwrap();
        assert_eq!(report.verdict, Verdict::CertifiedPass);

        let partial = vec![Seminorm::coordinate(vec![0], CanonicalNorm::uniform(P2)).unwrap()];
        let report = is_separated(&partial, 2, &cfg(50)).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        let Some(Witness::Separation { probe }) = report.witness else { panic!() };
        // First vanishing probe: the ones vector projected onto the second
        // idempotent component.
        let ones = HVec::from_real_vec(&[1.0, 1.0]);
        assert_eq!(probe, ones.project(1).unwrap());

        let split = vec![
            Seminorm::coordinate(vec![0, 1], CanonicalNorm::uniform(P2)).unwrap(),
            Seminorm::coordinate(vec![2, 3], CanonicalNorm::uniform(P1)).unwrap(),
        ];
        let report = is_separated(&split, 2, &cfg(50)).unwrap();
        assert_eq!(report.verdict, Verdict::SampledPass);
    }

    #[test]
    fn seminorm_json_is_tagged_by_construction() {
        let p = Seminorm::coordinate(vec![0, 2], CanonicalNorm::uniform(P1)).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with(r#"{"coordinate":"#), "{text}");
        let back: Seminorm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);

        let sup = Seminorm::sup_family(vec![p]).unwrap();
        let text = serde_json::to_string(&sup).unwrap();
        assert!(text.starts_with(r#"{"sup":"#), "{text}");
        let back: Seminorm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sup);
    }
}
