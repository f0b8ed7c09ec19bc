//! Acceptance gate for the toolkit: nine criteria, one test per criterion.
//!
//! Each test prints a `[PASS] n. ...` line once its criterion holds (visible
//! with `cargo test -- --nocapture`); a failing criterion fails its test.
//! Budgets are asserted where the criterion includes one.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bihyp::gauge::h2_gauge;
use bihyp::sets::{check_absorbing, check_idempotent_stability};
use bihyp::{
    run_suite, verify, Bih, CanonicalCoords, CheckConfig, ComponentNorm, H2Set, HVec, Instance,
    PredicateRule, PropertySpec, RealConvexBody, SuiteConfig, Verdict, VerifyReport, Witness,
};

fn from_quad(q: [f64; 4]) -> Bih {
    Bih::from_canonical(CanonicalCoords::new(q[0], q[1], q[2], q[3])).expect("finite")
}

fn j_table_product(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [x1, y1, z1, w1] = a;
    let [x2, y2, z2, w2] = b;
    [
        x1 * x2 + y1 * y2 + z1 * z2 + w1 * w2,
        x1 * y2 + y1 * x2 + z1 * w2 + w1 * z2,
        x1 * z2 + z1 * x2 + y1 * w2 + w1 * y2,
        x1 * w2 + w1 * x2 + y1 * z2 + z1 * y2,
    ]
}

fn random_quad(rng: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| rng.gen_range(-50.0..=50.0))
}

fn run_property(id: &str, trials: u64) -> VerifyReport {
    let mut spec = PropertySpec::new(id);
    spec.trials = trials;
    verify(&spec).expect("registered property")
}

#[test]
fn criterion_1_ring_and_coordinate_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for _ in 0..10_000 {
        let a = random_quad(&mut rng);
        let b = random_quad(&mut rng);

        let ring_a = from_quad(a);
        let back = ring_a.to_canonical();
        let round_trip = [back.x - a[0], back.y - a[1], back.z - a[2], back.w - a[3]];
        let scale_a = 1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for err in round_trip {
            assert!(err.abs() <= 1e-14 * scale_a, "round-trip error {err}");
        }

        let direct = j_table_product(a, b);
        let via_ring = (ring_a * from_quad(b)).to_canonical();
        let got = [via_ring.x, via_ring.y, via_ring.z, via_ring.w];
        let scale = 1.0 + direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..4 {
            assert!(
                (got[i] - direct[i]).abs() <= 1e-12 * scale,
                "multiplication mismatch in component {i}: {} vs {}",
                got[i],
                direct[i]
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() <= 1.0, "took {elapsed:?}, budget 1s");
    println!(
        "[PASS] 1. ring round-trip <= 1e-14 and unit-table multiplication <= 1e-12 over 10^4 quadruples in {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_2_modulus_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let a = from_quad(random_quad(&mut rng));
        let b = from_quad(random_quad(&mut rng));

        let lhs = (a * b).modulus();
        let rhs = a.modulus() * b.modulus();
        let scale = 1.0 + lhs.sup_abs().max(rhs.sup_abs());
        assert!(
            (lhs - rhs).sup_abs() <= 1e-12 * scale,
            "multiplicativity violated"
        );

        let sum_mod = (a + b).modulus();
        let mod_sum = a.modulus() + b.modulus();
        assert!(
            sum_mod.le(mod_sum),
            "triangle inequality violated: {sum_mod:?} vs {mod_sum:?}"
        );
    }
    println!("[PASS] 2. modulus is multiplicative (<= 1e-12) and exactly subadditive over 10^4 trials");
}

#[test]
fn criterion_3_first_counterexample() {
    let set = H2Set::predicate(1, PredicateRule::AbsSumLt { c: 2.0 });
    let ones = HVec::from_real_vec(&[1.0]);
    for i in 0..4 {
        let slice = ones.scale(Bih::idempotent(i) * Bih::from_real(0.75));
        assert!(
            set.contains(&slice, 1e-9).expect("well-formed"),
            "three-quarters of idempotent {i} must belong"
        );
    }
    let diagonal = ones.scale_real(0.75);
    assert!(
        !set.contains(&diagonal, 1e-9).expect("well-formed"),
        "three-quarters of the unit must not belong"
    );

    for id in ["T4.decomposition", "T5-convexity-fail"] {
        let report = run_property(id, 1000);
        assert_eq!(report.report.verdict, Verdict::Fail, "{id}");
        assert_eq!(
            report.witness_reverified,
            Some(true),
            "{id}: witness must replay from its own data"
        );
        assert!(report.as_expected, "{id}");
    }
    println!("[PASS] 3. first counterexample: slices belong, the diagonal does not; both failure properties replay their witnesses");
}

#[test]
fn criterion_4_second_counterexample() {
    let set = H2Set::predicate(1, PredicateRule::ModulusLtUnionOne { c: 0.5 });
    let cfg = CheckConfig::default();
    let ones = HVec::from_real_vec(&[1.0]);

    // All sixteen 0/1 coordinate patterns of the unit, as absorbency probes.
    let mut probes = Vec::with_capacity(16);
    for mask in 0..16u32 {
        let lambda = Bih::new(std::array::from_fn(|i| f64::from(mask >> i & 1)))
            .expect("finite");
        probes.push(ones.scale(lambda));
    }
    assert_eq!(probes.len(), 16);
    let absorbing = check_absorbing(&set, &probes, &cfg).expect("well-formed");
    assert!(
        absorbing.verdict.passed(),
        "the union set must absorb all sixteen probes: {:?}",
        absorbing.witness
    );

    let stability = check_idempotent_stability(&set, &cfg).expect("well-formed");
    assert_eq!(stability.verdict, Verdict::Fail);
    let Some(Witness::Scaling { lambda, x, image }) = stability.witness else {
        panic!("stability failure must carry a scaling witness");
    };
    let lam = lambda.components();
    assert_eq!(
        lam.iter().filter(|v| **v == 1.0).count(),
        1,
        "witness scalar must be a single idempotent, got {lam:?}"
    );
    assert_eq!(lam.iter().filter(|v| **v == 0.0).count(), 3);
    assert_eq!(x, ones, "witness point must be the ring unit");
    assert!(!set.contains(&image, 1e-9).expect("well-formed"));
    println!("[PASS] 4. second counterexample: absorbs 16 unit patterns, projection stability fails at an idempotent times the unit");
}

#[test]
fn criterion_5_theorem_suite_green() {
    let start = Instant::now();
    let suite = run_suite(&SuiteConfig::default()).expect("suite runs");
    let elapsed = start.elapsed();
    assert_eq!(suite.reports.len(), 25);
    for report in &suite.reports {
        assert!(
            report.as_expected,
            "{} returned {:?}, expected {:?}",
            report.id, report.report.verdict, report.expected
        );
    }
    assert!(suite.all_expected);
    assert!(
        elapsed.as_secs_f64() <= 60.0,
        "suite took {elapsed:?}, budget 60s"
    );
    println!(
        "[PASS] 5. all 25 registered properties match their expected verdicts in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_6_gauge_oracle_agreement() {
    let report = run_property("gauge.oracle", 1000);
    assert_eq!(report.report.verdict, Verdict::SampledPass, "{:?}", report.report.witness);
    assert_eq!(report.report.trials, 500, "oracle row runs 500 pairs");

    // Closed-form agreement on ball products, absolute tolerance 1e-12.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let dim = rng.gen_range(2..=3usize);
        let norms = [ComponentNorm::P1, ComponentNorm::P2, ComponentNorm::PInf];
        let mut radii = [0.0f64; 4];
        let parts: [RealConvexBody; 4] = std::array::from_fn(|i| {
            radii[i] = rng.gen_range(0.5..=2.5);
            RealConvexBody::ball(norms[rng.gen_range(0..3)], radii[i], true).expect("radius")
        });
        let chosen: [ComponentNorm; 4] = std::array::from_fn(|i| match &parts[i] {
            RealConvexBody::NormBall { p, .. } => *p,
            RealConvexBody::PolytopeHull(_) => unreachable!(),
        });
        let set = H2Set::product_with_dim(dim, parts).expect("consistent dims");
        let comps: [Vec<f64>; 4] =
            std::array::from_fn(|_| (0..dim).map(|_| rng.gen_range(-3.0..=3.0)).collect());
        let x = HVec::new(comps.clone()).expect("finite");
        let gauge = h2_gauge(&set, &x).expect("gauge");
        for i in 0..4 {
            let norm_value = match chosen[i] {
                ComponentNorm::P1 => comps[i].iter().map(|v| v.abs()).sum::<f64>(),
                ComponentNorm::P2 => comps[i].iter().map(|v| v * v).sum::<f64>().sqrt(),
                ComponentNorm::PInf => comps[i].iter().fold(0.0f64, |m, v| m.max(v.abs())),
            };
            let expected = norm_value / radii[i];
            assert!(
                (gauge.per_component[i] - expected).abs() <= 1e-12 * (1.0 + expected),
                "closed form off in component {i}"
            );
        }
    }
    println!("[PASS] 6. LP and bisection gauges agree to 1e-6 on 500 random pairs; ball closed form agrees to 1e-12");
}

#[test]
fn criterion_7_sandwich_instantiation() {
    for id in ["sandwich.closed", "sandwich.open"] {
        let report = run_property(id, 1000);
        assert_eq!(
            report.report.verdict,
            Verdict::SampledPass,
            "{id}: {:?}",
            report.report.witness
        );
        assert!(report.report.trials >= 1000, "{id} must see 10^3 samples");
    }
    println!("[PASS] 7. closed and open ball products match the closed and open gauge level sets outside the 1e-7 band");
}

#[test]
fn criterion_8_norm_from_gauge() {
    let report = run_property("gauge.bounded-norm", 1000);
    assert_eq!(
        report.report.verdict,
        Verdict::SampledPass,
        "{:?}",
        report.report.witness
    );
    assert!(report.report.trials >= 1000);
    println!("[PASS] 8. the gauge of a bounded symmetric product vanishes only within 1e-7 of zero on 10^3 samples");
}

#[test]
fn criterion_9_suite_determinism() {
    let config = SuiteConfig::default();
    let first = run_suite(&config).expect("suite runs");
    let second = run_suite(&config).expect("suite runs");
    let a = serde_json::to_string(&first).expect("serializable");
    let b = serde_json::to_string(&second).expect("serializable");
    assert_eq!(a, b, "suite reports must be byte-identical across reruns");
    assert!(!a.contains("wall_ms"));

    // Instances embedded in the reports parse back to the same suite input.
    for report in &first.reports {
        let text = serde_json::to_string(&report.instance).expect("serializable");
        let back: Instance = serde_json::from_str(&text).expect("instances round-trip");
        assert_eq!(back, report.instance, "{}", report.id);
    }
    println!("[PASS] 9. two full-suite runs with the same seed produce byte-identical JSON; instances round-trip");
}
