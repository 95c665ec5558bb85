use std::f64::consts::PI;

use pinnlab_core::diagnostics::{error_norms, norm_h1, norm_h2, norm_l2};
use pinnlab_core::energies::PointSet;
use pinnlab_core::operators::AnalyticField;
use proptest::prelude::*;

fn field(m: f64, n: f64, a: f64) -> AnalyticField {
    AnalyticField::combine(
        a,
        AnalyticField::sine_product(2, vec![m, n]),
        1.0,
        AnalyticField::constant(2, 0.5),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_absolutely_homogeneous(m in 1.0..4.0f64, n in 1.0..4.0f64, alpha in -5.0..5.0f64) {
        let quad = PointSet::trapezoid_square(21).unwrap();
        let u = field(m, n, 1.0);
        let scaled = AnalyticField::combine(alpha, u.clone(), 0.0, AnalyticField::zero(2));
        for norm in [norm_l2, norm_h1, norm_h2] {
            let (a, b) = (norm(&scaled, &quad).unwrap(), norm(&u, &quad).unwrap());
            prop_assert!((a - alpha.abs() * b).abs() <= 1e-12 * (1.0 + a));
        }
    }

    #[test]
    fn norms_satisfy_the_triangle_inequality(
        m in 1.0..4.0f64, n in 1.0..4.0f64, p in 1.0..4.0f64, q in 1.0..4.0f64, a in -3.0..3.0f64,
    ) {
        let quad = PointSet::trapezoid_square(21).unwrap();
        let (u, v) = (field(m, n, a), field(p, q, -1.0));
        let sum = AnalyticField::combine(1.0, u.clone(), 1.0, v.clone());
        for norm in [norm_l2, norm_h1, norm_h2] {
            let lhs = norm(&sum, &quad).unwrap();
            let rhs = norm(&u, &quad).unwrap() + norm(&v, &quad).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn error_norms_vanish_on_identical_fields(m in 1.0..4.0f64, n in 1.0..4.0f64) {
        let quad = PointSet::trapezoid_square(11).unwrap();
        let u = field(m, n, 2.0);
        let e = error_norms(&u, &u, &quad).unwrap();
        prop_assert_eq!(e.l2, 0.0);
        prop_assert_eq!(e.h1, 0.0);
    }
}

#[test]
fn sine_closed_forms_under_trapezoid_rule() {
    let quad = PointSet::trapezoid_unit(2001).unwrap();
    let u = AnalyticField::sine_product(1, vec![1.0]);
    let pi2 = PI * PI;
    let cases = [
        (norm_l2(&u, &quad).unwrap(), 0.5f64.sqrt()),
        (norm_h1(&u, &quad).unwrap(), ((1.0 + pi2) / 2.0).sqrt()),
        (norm_h2(&u, &quad).unwrap(), ((1.0 + pi2 + pi2 * pi2) / 2.0).sqrt()),
    ];
    for (got, want) in cases {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}
