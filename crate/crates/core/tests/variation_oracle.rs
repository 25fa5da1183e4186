//! Exact engine results against brute-force enumeration of every
//! nonoverlapping interval collection.

use gbv_core::seq::{BaseConvex, DeltaLadder, GaugePair, PowerTerm, QLadder, SchrammFamily, SchrammSpec, WeightKind, WeightSequence};
use gbv_core::step_fn::StepFunction;
use gbv_core::variation::{
    modulus_of_variation, variation_gauged, variation_schramm, variation_unweighted_q, variation_weighted,
    EngineConfig, Mode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Calls `visit` with the increments of every collection of intervals of at
/// least `min_len` cells and at most `max_count` members.
fn enumerate(values: &[f64], min_len: usize, max_count: usize, visit: &mut dyn FnMut(&[f64])) {
    fn rec(values: &[f64], pos: usize, min_len: usize, left: usize, cur: &mut Vec<f64>, visit: &mut dyn FnMut(&[f64])) {
        visit(cur);
        if left == 0 {
            return;
        }
        let m = values.len() - 1;
        for a in pos..m {
            for b in a + min_len..=m {
                cur.push((values[b] - values[a]).abs());
                rec(values, b, min_len, left - 1, cur, visit);
                cur.pop();
            }
        }
    }
    rec(values, 0, min_len, max_count, &mut Vec::new(), visit);
}

fn brute(values: &[f64], min_len: usize, max_count: usize, gain: &dyn Fn(usize, f64) -> f64) -> f64 {
    let mut best = 0.0f64;
    enumerate(values, min_len, max_count, &mut |incs| {
        let mut xs = incs.to_vec();
        xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let v: f64 = xs.iter().enumerate().map(|(j, &x)| gain(j + 1, x)).sum();
        best = best.max(v);
    });
    best
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

fn random_function(rng: &mut ChaCha8Rng, m: usize) -> StepFunction {
    let discrete = rng.gen_bool(0.5);
    let values = (0..=m)
        .map(|_| {
            if discrete {
                rng.gen_range(0..4) as f64
            } else {
                rng.gen_range(-2.0..2.0)
            }
        })
        .collect();
    StepFunction::new(values).unwrap()
}

#[test]
fn engine_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = EngineConfig::default();
    let harmonic = WeightSequence::harmonic().unwrap();
    let sqrt = WeightSequence::new(WeightKind::Power { alpha: 0.5 }).unwrap();
    let explicit = SchrammFamily::new(SchrammSpec::Explicit {
        terms: vec![
            PowerTerm { coef: 1.0, exponent: 2.0 },
            PowerTerm { coef: 0.6, exponent: 2.0 },
            PowerTerm { coef: 0.5, exponent: 2.0 },
            PowerTerm { coef: 0.2, exponent: 2.0 },
        ],
    })
    .unwrap();
    let expm1 = SchrammFamily::scaled(BaseConvex::ExpM1, harmonic.clone()).unwrap();
    let gauge = GaugePair::new(QLadder::Linear { slope: 0.5, intercept: 0.5 }, DeltaLadder::Pow2 { shift: 0 }).unwrap();

    for _ in 0..60 {
        let m = rng.gen_range(2..=8);
        let f = random_function(&mut rng, m);
        let v = f.values();

        for n in 1..=m {
            let got = modulus_of_variation(&f, n).unwrap().value;
            assert!(close(got, brute(v, 1, n, &|_, x| x)), "ν({n}) on {v:?}");
        }

        let got = variation_unweighted_q(&f, 2.0, 3, 2).unwrap().value;
        assert!(close(got, brute(v, 2, 3, &|_, x| x * x).sqrt()), "unweighted on {v:?}");

        for (w, p) in [(&harmonic, 1.0), (&sqrt, 1.5)] {
            let r = variation_weighted(&f, w, p, &cfg).unwrap();
            assert_eq!(r.mode, Mode::ExactOracle);
            let want = brute(v, 1, m, &|j, x| x.powf(p) / w.lambda(j as u64)).powf(1.0 / p);
            assert!(close(r.value, want), "weighted p={p} on {v:?}: {} vs {want}", r.value);
        }

        for fam in [&explicit, &expm1] {
            let r = variation_schramm(&f, fam, &cfg).unwrap();
            let want = brute(v, 1, m, &|j, x| fam.phi(j as u64, x));
            assert!(close(r.value, want), "schramm on {v:?}: {} vs {want}", r.value);
        }

        let r = variation_gauged(&f, &harmonic, &gauge, 3, &cfg).unwrap();
        let want = (1..=3)
            .map(|n| {
                let q = gauge.q_n(n);
                let min_len = gbv_core::seq::min_cells(m, gauge.delta_n(n));
                brute(v, min_len, m, &|j, x| x.powf(q) / harmonic.lambda(j as u64)).powf(1.0 / q)
            })
            .fold(0.0, f64::max);
        assert!(close(r.value, want), "gauged on {v:?}: {} vs {want}", r.value);
    }
}

#[test]
fn sixteen_cell_grids_stay_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = EngineConfig::default();
    let harmonic = WeightSequence::harmonic().unwrap();
    let start = std::time::Instant::now();
    for _ in 0..5 {
        let values: Vec<f64> = (0..=16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = StepFunction::new(values).unwrap();
        let r = variation_weighted(&f, &harmonic, 1.0, &cfg).unwrap();
        assert_eq!(r.mode, Mode::ExactOracle);
    }
    assert!(start.elapsed().as_secs() < 60);
}
