use failsafe_core::grid::linspace;
use failsafe_core::preorders::{holds, PreorderKind};
use failsafe_core::{Baseline, Family, GeneratorSpec, SemiParamModel, SystemSpec};
use proptest::prelude::*;

fn generator() -> impl Strategy<Value = GeneratorSpec> {
    prop_oneof![
        Just(GeneratorSpec::independence()),
        (0.1f64..8.0).prop_map(|t| GeneratorSpec::new(Family::Clayton, t).unwrap()),
        (1.0f64..6.0).prop_map(|t| GeneratorSpec::new(Family::Gumbel, t).unwrap()),
        (0.1f64..10.0).prop_map(|t| GeneratorSpec::new(Family::Frank, t).unwrap()),
        (0.0f64..0.95).prop_map(|t| GeneratorSpec::new(Family::AliMikhailHaq, t).unwrap()),
        (0.01f64..1.0).prop_map(|t| GeneratorSpec::new(Family::GumbelBarnett, t).unwrap()),
    ]
}

fn system() -> impl Strategy<Value = SystemSpec> {
    (generator(), prop::collection::vec(0.2f64..5.0, 2..7), 0.5f64..3.0).prop_map(|(g, theta, shape)| {
        SystemSpec::new(SemiParamModel::scale(Baseline::Weibull { scale: 1.0, shape }), theta, g).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn second_smallest_outlives_the_minimum(sys in system(), x in 0.0f64..4.0) {
        let s1 = sys.survival_x1n(x).unwrap();
        let s2 = sys.survival_x2n(x).unwrap();
        prop_assert!(s2 + 1e-12 >= s1, "{s2} < {s1}");
        prop_assert!((0.0..=1.0).contains(&s2));
    }

    #[test]
    fn curves_are_nonincreasing(sys in system()) {
        let c = sys.curve(&linspace(0.0, 5.0, 60)).unwrap();
        prop_assert!((c.values[0] - 1.0).abs() < 1e-12);
        prop_assert!(c.values.windows(2).all(|w| w[1] <= w[0] + 1e-10));
    }

    #[test]
    fn x2n_is_symmetric_in_theta(sys in system(), x in 0.05f64..3.0) {
        let mut rev = sys.theta.clone();
        rev.reverse();
        let flipped = sys.with_theta(rev).unwrap();
        prop_assert!((sys.survival_x2n(x).unwrap() - flipped.survival_x2n(x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn majorization_implies_p_larger(a in prop::collection::vec(0.1f64..10.0, 1..8), mix in 0.0f64..1.0) {
        // averaging toward the mean yields a vector majorized by a
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        let b: Vec<f64> = a.iter().map(|v| mix * v + (1.0 - mix) * mean).collect();
        prop_assert!(holds(PreorderKind::Majorize, &a, &b, 1e-9).unwrap());
        prop_assert!(holds(PreorderKind::PLarger, &a, &b, 1e-9).unwrap());
    }
}
