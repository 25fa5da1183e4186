use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gbv_core::inequality::{
    check_master_exact, check_master_inequality, check_weighted_comparison, check_wu_estimate, exact_sample,
    extremal_closed_form, extremal_profile, monotone_vector, run_suite, SuiteConfig, SuiteKind, TripleSample,
};
use gbv_core::seq::{BaseConvex, SchrammFamily, WeightSequence};

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

#[test]
fn block_shape_attains_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for q in [1.0, 2.0, 3.0] {
        for n in 1..=8 {
            let y = monotone_vector(&mut rng, n, 1.0);
            let z: Vec<f64> = y.iter().map(|v| 0.7 * v.powf(q)).collect();
            let (_, k) = extremal_closed_form(&y, &z, q);
            let mass: f64 = y[..k].iter().sum();
            let x: Vec<f64> = (0..n).map(|j| if j < k { 1.0 / mass } else { 1e-300 }).collect();
            let c = check_master_inequality(&TripleSample::new(x, y, z, q).unwrap());
            let r = c.lhs / c.rhs;
            assert!((0.98..=1.0 + 1e-12).contains(&r), "q={q} n={n}: {r}");
        }
    }
}

#[test]
fn exact_equality_on_rational_block() {
    // y = z = (1, 1), q = 2, x = (1, 0+): the k = 1 block.
    let one = || rat(1.0);
    let x = [one(), rat(0.0)];
    let c = check_master_exact(&x, &[one(), one()], &[one(), one()], 2).unwrap();
    assert_eq!(c.lhs_pow, one());
    assert_eq!(c.rhs_pow, one());
}

#[test]
fn exact_and_float_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..200 {
        let n = 1 + i % 8;
        let q = [1.0, 2.0, 3.0, 10.0][i % 4];
        let s = TripleSample::new(
            monotone_vector(&mut rng, n, 2.0),
            monotone_vector(&mut rng, n, 2.0),
            monotone_vector(&mut rng, n, 2.0),
            q,
        )
        .unwrap();
        let float = check_master_inequality(&s);
        let (x, y, z, qi) = exact_sample(&s).unwrap();
        let exact = check_master_exact(&x, &y, &z, qi).unwrap();
        assert!(exact.ok && float.ok);
        let lhs = float.lhs.powf(q);
        let want = exact.lhs_pow.clone();
        let got = rat(lhs);
        let rel = ((got - want.clone()) / want).to_f64().unwrap();
        assert!(rel.abs() < 1e-12);
    }
    assert!(exact_sample(&TripleSample::new(vec![1.0], vec![1.0], vec![1.0], 1.5).unwrap()).is_none());
}

#[test]
fn extremal_grid_never_exceeds_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for q in [1.0, 1.5, 2.0] {
        let y = monotone_vector(&mut rng, 4, 1.5);
        let z = monotone_vector(&mut rng, 4, 1.5);
        let coarse = extremal_profile(&y, &z, q, 10).unwrap();
        let fine = extremal_profile(&y, &z, q, 20).unwrap();
        assert!(coarse.grid_max <= coarse.closed_form * (1.0 + 1e-12));
        assert!(fine.gap() <= coarse.gap() + 1e-15);
        assert_eq!(fine.argmax_block, Some(fine.closed_k));
        // compositions of D into 4 parts
        assert_eq!(coarse.points, 286);
    }
}

#[test]
fn constant_sequence_reduces_to_last_prefix() {
    let h: WeightSequence = WeightSequence::harmonic().unwrap();
    let one: WeightSequence = WeightSequence::constant(1.0).unwrap();
    let c = 5.0 / (1.0 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2);
    let r = check_weighted_comparison(&[2.0; 5], &h, &one, c).unwrap();
    assert!((r.lhs - r.rhs).abs() < 1e-12);
}

#[test]
fn wu_on_inverse_profile() {
    for base in [BaseConvex::Power(2.0), BaseConvex::ExpM1] {
        let fam = SchrammFamily::scaled(base, WeightSequence::harmonic().unwrap()).unwrap();
        let x: Vec<f64> = (1..=64).map(|j| fam.partial_inverse(j, 1.0).unwrap()).collect();
        let c = check_wu_estimate(&x, &fam, 2.0).unwrap();
        assert!(c.ok);
        assert!(c.ratio > 0.0 && c.ratio <= 16.0);
    }
}

#[test]
fn suite_config_json() {
    let cfg = SuiteConfig::defaults(SuiteKind::Master);
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<SuiteConfig>(&text).unwrap(), cfg);
    let bad = SuiteConfig {
        qs: vec![0.5],
        ..cfg
    };
    assert!(run_suite(&bad).is_err());
}
