use proptest::prelude::*;

use gbv_core::inequality::{check_master_inequality, check_wu_estimate, TripleSample};
use gbv_core::seq::{BaseConvex, SchrammFamily, WeightKind, WeightSequence};
use gbv_core::step_fn::StepFunction;
use gbv_core::variation::{
    modulus_profile, schramm_norm, variation_schramm, variation_weighted, EngineConfig,
};

fn weights() -> impl Strategy<Value = WeightSequence> {
    prop_oneof![
        Just(WeightKind::Harmonic),
        Just(WeightKind::Constant { value: 1.0 }),
        (0.05f64..=1.0).prop_map(|alpha| WeightKind::Power { alpha }),
        Just(WeightKind::LogScaled),
    ]
    .prop_map(|k| WeightSequence::new(k).unwrap())
}

fn function(max_m: usize) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(-5.0f64..5.0, 2..=max_m + 1).prop_map(|v| StepFunction::new(v).unwrap())
}

fn descending(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0f64..4.0, n).prop_map(|v| {
        let mut v: Vec<f64> = v.into_iter().map(f64::exp).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    })
}

fn triple() -> impl Strategy<Value = TripleSample> {
    (1usize..=24, 1.0f64..12.0).prop_flat_map(|(n, q)| {
        (descending(n), descending(n), descending(n))
            .prop_map(move |(x, y, z)| TripleSample::new(x, y, z, q).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn prefix_sums_step_by_reciprocals(w in weights(), k in 1u64..5000) {
        let step = w.growth(k + 1) - w.growth(k);
        prop_assert!((step - w.reciprocal(k + 1)).abs() <= 1e-12 * w.growth(k + 1));
        prop_assert!(w.lambda(k) <= w.lambda(k + 1));
    }

    #[test]
    fn partial_inverse_round_trip(w in weights(), k in 1u64..200, x in 0.0f64..10.0) {
        for base in [BaseConvex::Power(1.5), BaseConvex::ExpM1] {
            let fam = SchrammFamily::scaled(base, w.clone()).unwrap();
            let y = fam.partial(k, x);
            let back = fam.partial_inverse(k, y).unwrap();
            prop_assert!((back - x).abs() <= 1e-8 * x.max(1.0));
            prop_assert!(fam.partial_inverse(k + 1, y).unwrap() <= back * (1.0 + 1e-12));
        }
    }

    #[test]
    fn modulus_is_nondecreasing_and_concave(f in function(24)) {
        let nu = modulus_profile(&f, f.m());
        prop_assert_eq!(nu[0], 0.0);
        for w in nu.windows(3) {
            prop_assert!(w[1] <= w[2] + 1e-12);
            prop_assert!(w[2] - w[1] <= w[1] - w[0] + 1e-9);
        }
    }

    #[test]
    fn weighted_variation_is_homogeneous(f in function(10), w in weights(), p in 1.0f64..3.0, c in -4.0f64..4.0) {
        let cfg = EngineConfig::default();
        let v = variation_weighted(&f, &w, p, &cfg).unwrap();
        let vc = variation_weighted(&f.scaled(c), &w, p, &cfg).unwrap();
        prop_assert!(v.lower <= v.value && v.value <= v.upper);
        prop_assert!((vc.value - c.abs() * v.value).abs() <= 1e-9 * (1.0 + v.value * c.abs()));
    }

    #[test]
    fn witness_reproduces_value(f in function(40), w in weights()) {
        let fam = SchrammFamily::scaled(BaseConvex::Power(2.0), w).unwrap();
        let r = variation_schramm(&f, &fam, &EngineConfig::default()).unwrap();
        let mut incs: Vec<f64> = r.witness.iter().map(|&(a, b)| (f.values()[b] - f.values()[a]).abs()).collect();
        incs.sort_by(|a, b| b.total_cmp(a));
        let v: f64 = incs.iter().enumerate().map(|(j, &x)| fam.phi(j as u64 + 1, x)).sum();
        prop_assert!((v - r.value).abs() <= 1e-12 * r.value.max(1e-300));
        prop_assert!(r.lower <= r.value && r.value <= r.upper * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_homogeneous(f in function(8), c in 0.1f64..10.0) {
        let fam = SchrammFamily::scaled(BaseConvex::Power(2.0), WeightSequence::harmonic().unwrap()).unwrap();
        let cfg = EngineConfig::default();
        let a = schramm_norm(&f, &fam, f.values()[0], &cfg).unwrap();
        let b = schramm_norm(&f.scaled(c), &fam, c * f.values()[0], &cfg).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-8 * (c * a).max(1e-12));
    }

    #[test]
    fn master_inequality_holds(s in triple()) {
        prop_assert!(check_master_inequality(&s).ok);
    }

    #[test]
    fn wu_estimate_holds(x in (1usize..40).prop_flat_map(descending), q in 1.0f64..6.0, w in weights()) {
        let fam = SchrammFamily::scaled(BaseConvex::Power(2.0), w).unwrap();
        let c = check_wu_estimate(&x, &fam, q).unwrap();
        prop_assert!(c.ok, "{c:?}");
    }

    #[test]
    fn csv_and_json_round_trip(f in function(30)) {
        prop_assert_eq!(&StepFunction::parse_csv(&f.to_csv()).unwrap(), &f);
        prop_assert_eq!(&StepFunction::parse_json(&f.to_json()).unwrap(), &f);
    }
}
