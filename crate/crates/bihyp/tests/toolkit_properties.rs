//! Cross-module laws: gauges against norms, metrics against their family,
//! and unit-set membership against the defining inequality.

use bihyp::gauge::{gauge_bisection, h2_gauge, unit_set};
use bihyp::metric::H2Metric;
use bihyp::{Bih, CanonicalNorm, ComponentNorm, H2Set, HVec, RealConvexBody, Seminorm};
use proptest::prelude::*;

fn ball_product(dim: usize, r: f64) -> H2Set {
    let part = || RealConvexBody::ball(ComponentNorm::P2, r, true).expect("positive radius");
    H2Set::product_with_dim(dim, [part(), part(), part(), part()]).expect("consistent dims")
}

fn vector(dim: usize, rows: &[[f64; 4]]) -> HVec {
    let mut comps: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(dim));
    for row in rows.iter().take(dim) {
        for i in 0..4 {
            comps[i].push(row[i]);
        }
    }
    HVec::new(comps).expect("finite")
}

fn rows() -> impl Strategy<Value = (usize, Vec<[f64; 4]>)> {
    (1usize..4).prop_flat_map(|dim| {
        (
            Just(dim),
            prop::collection::vec(prop::array::uniform4(-3.0f64..3.0), dim),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauges_are_positively_homogeneous((dim, data) in rows(), t in 0.1f64..4.0) {
        let set = ball_product(dim, 1.5);
        let x = vector(dim, &data);
        let base = h2_gauge(&set, &x).expect("gauge");
        let scaled = h2_gauge(&set, &x.scale_real(t)).expect("gauge");
        for i in 0..4 {
            let expected = t * base.per_component[i];
            prop_assert!((scaled.per_component[i] - expected).abs() <= 1e-9 * (1.0 + expected));
        }
    }

    #[test]
    fn gauge_routes_agree_on_ball_products((dim, data) in rows(), r in 0.5f64..2.5) {
        let set = ball_product(dim, r);
        let x = vector(dim, &data);
        let direct = h2_gauge(&set, &x).expect("gauge");
        let oracle = gauge_bisection(&set, &x, 1e-9).expect("bisection");
        for i in 0..4 {
            prop_assert!(
                (direct.per_component[i] - oracle.per_component[i]).abs()
                    <= 1e-6 * (1.0 + direct.per_component[i])
            );
        }
    }

    #[test]
    fn metric_triangle_inequality_holds(
        (dim, a) in rows(),
        b in prop::collection::vec(prop::array::uniform4(-3.0f64..3.0), 3),
        c in prop::collection::vec(prop::array::uniform4(-3.0f64..3.0), 3),
    ) {
        let metric = H2Metric::new(vec![
            Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P2)),
            Seminorm::coordinate(vec![0, 1], CanonicalNorm::uniform(ComponentNorm::P1))
                .expect("valid"),
        ])
        .expect("nonempty");
        let x = vector(dim, &a);
        let y = vector(dim, &b);
        let z = vector(dim, &c);
        let direct = metric.eval(&x, &z).expect("metric");
        let detour = metric.eval(&x, &y).expect("metric") + metric.eval(&y, &z).expect("metric");
        let slack = Bih::from_real(1e-9 * (1.0 + detour.sup_abs()));
        prop_assert!(direct.le(detour + slack));
    }

    #[test]
    fn unit_set_membership_matches_the_norm_inequality((dim, data) in rows()) {
        let p = Seminorm::canonical(CanonicalNorm::uniform(ComponentNorm::P2));
        let closed = unit_set(&p, dim, false);
        let open = unit_set(&p, dim, true);
        let x = vector(dim, &data);
        let value = p.eval(&x).expect("norm").components();
        let boundary = value.iter().any(|v| (v - 1.0).abs() <= 1e-7);
        if !boundary {
            let inside = value.iter().all(|v| *v < 1.0);
            prop_assert_eq!(closed.contains(&x, 1e-9).expect("membership"), inside);
            prop_assert_eq!(open.contains(&x, 1e-9).expect("membership"), inside);
        }
    }
}
