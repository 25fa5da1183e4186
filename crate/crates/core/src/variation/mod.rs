//! Variation functionals of grid functions.
//!
//! Every functional is a supremum of `Σ_j gain(j, |f(I_j)|)` over
//! nonoverlapping interval collections, with increments matched to ranks in
//! descending order. When the gain does not depend on the rank the supremum
//! is an exact dynamic program. Otherwise a branch-and-bound search gives
//! the exact value on small grids (after merging runs of equal samples), and
//! larger grids get a certified `[lower, upper]` bracket with a witness for
//! `lower`.

mod bounds;
mod dp;
mod gains;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seq::{min_cells, GaugePair, SchrammFamily, WeightSequence};
use crate::step_fn::StepFunction;

use gains::{is_rank_independent, PowerWeighted, RankedGains, SchrammGains};
use search::{branch_and_bound, Incumbent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactDp,
    ExactOracle,
    Bounds,
}

impl Mode {
    pub fn is_exact(self) -> bool {
        self != Mode::Bounds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationResult<T = f64> {
    pub value: T,
    pub mode: Mode,
    pub lower: T,
    pub upper: T,
    /// Grid index pairs of a collection achieving `lower`.
    pub witness: Vec<(usize, usize)>,
    /// Level attaining the supremum of a gauged variation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level: Option<usize>,
}

impl<T: Real> VariationResult<T> {
    fn zero(mode: Mode) -> Self {
        Self {
            value: T::zero(),
            mode,
            lower: T::zero(),
            upper: T::zero(),
            witness: Vec::new(),
            level: None,
        }
    }

    fn map(mut self, g: impl Fn(T) -> T) -> Self {
        self.value = g(self.value);
        self.lower = g(self.lower);
        self.upper = g(self.upper);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Largest grid (after merging equal runs) searched exactly.
    pub oracle_cap: usize,
    /// Largest interval count tabulated by the count-limited programs used
    /// for bounds.
    pub dp_count_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            oracle_cap: 16,
            dp_count_cap: 128,
        }
    }
}

fn root<T: Real>(x: T, p: T) -> T {
    if p == T::one() || x <= T::zero() {
        x.max(T::zero())
    } else {
        x.powf(p.recip())
    }
}

/// Supremum of the raw sum over collections of at most `max_count`
/// intervals of at least `min_len` cells.
fn solve<T: Real, G: RankedGains<T>>(
    values: &[T],
    min_len: usize,
    max_count: usize,
    gains: &G,
    cfg: &EngineConfig,
) -> VariationResult<T> {
    let m = values.len() - 1;
    let max_count = max_count.min(m / min_len.max(1));
    let layers = gains.layers(max_count);
    let rank_free = max_count == 0 || is_rank_independent(&layers, max_count);
    if max_count == 0 {
        return VariationResult::zero(Mode::ExactDp);
    }

    if rank_free {
        let l = layers[0];
        let h = |x: T| gains.profile(l.profile, x);
        let pairs = if max_count >= m / min_len {
            let best = dp::unlimited(values, min_len, &h);
            dp::reconstruct_unlimited(&best, values, min_len, &h)
        } else {
            let table = dp::count_limited(values, min_len, max_count, &h);
            dp::reconstruct_limited(&table, values, min_len, max_count, &h)
        };
        return finish(values, gains, pairs, Mode::ExactDp, None);
    }

    // equal neighbouring samples never carry an increment, so with no length
    // constraint the search can run on the merged grid
    let (work, starts) = if min_len == 1 {
        let mut vals = vec![values[0]];
        let mut starts = vec![0];
        for (i, &v) in values.iter().enumerate().skip(1) {
            if v != *vals.last().expect("nonempty") {
                vals.push(v);
                starts.push(i);
            }
        }
        (vals, Some(starts))
    } else {
        (values.to_vec(), None)
    };
    let mw = work.len() - 1;
    if mw == 0 {
        return VariationResult::zero(Mode::ExactOracle);
    }
    let count = max_count.min(mw / min_len);
    let remap = |pairs: Vec<(usize, usize)>| match &starts {
        Some(s) => pairs.into_iter().map(|(a, b)| (s[a], s[b])).collect(),
        None => pairs,
    };

    let start = bounds::lower(&work, min_len, count, cfg.dp_count_cap, gains);
    if mw <= cfg.oracle_cap {
        let best = branch_and_bound(&work, min_len, count, gains, start);
        return finish(values, gains, remap(best.pairs), Mode::ExactOracle, None);
    }
    let up = bounds::upper(&work, min_len, count, cfg.dp_count_cap, gains);
    let Incumbent { pairs, .. } = start;
    finish(values, gains, remap(pairs), Mode::Bounds, Some(up))
}

fn finish<T: Real, G: RankedGains<T>>(
    values: &[T],
    gains: &G,
    pairs: Vec<(usize, usize)>,
    mode: Mode,
    upper: Option<T>,
) -> VariationResult<T> {
    let incs: Vec<T> = pairs
        .iter()
        .map(|&(a, b)| (values[b] - values[a]).abs())
        .collect();
    let value = gains.evaluate(&incs);
    VariationResult {
        value,
        mode,
        lower: value,
        upper: upper.map_or(value, |u| u.max(value)),
        witness: pairs,
        level: None,
    }
}

/// `ν_f(n)`: the largest total increment over at most `n` intervals.
pub fn modulus_of_variation<T: Real>(f: &StepFunction<T>, n: usize) -> Result<VariationResult<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("the modulus of variation needs n >= 1".into()));
    }
    let id = |x: T| x;
    let table = dp::count_limited(f.values(), 1, n.min(f.m()), &id);
    let pairs = dp::reconstruct_limited(&table, f.values(), 1, n, &id);
    let value = pairs.iter().map(|&(a, b)| f.increment_unchecked(a, b)).sum();
    Ok(VariationResult {
        value,
        mode: Mode::ExactDp,
        lower: value,
        upper: value,
        witness: pairs,
        level: None,
    })
}

/// `ν_f(0), ν_f(1), ..., ν_f(n_max)` from one table.
pub fn modulus_profile<T: Real>(f: &StepFunction<T>, n_max: usize) -> Vec<T> {
    let k = n_max.min(f.m());
    let mut prof = dp::count_limited(f.values(), 1, k, &|x: T| x).profile();
    let last = *prof.last().expect("nonempty");
    prof.resize(n_max + 1, last);
    prof
}

/// `(Σ |f(I_j)|^q)^{1/q}` over at most `s_max` intervals of at least
/// `min_len` cells.
pub fn variation_unweighted_q<T: Real>(
    f: &StepFunction<T>,
    q: T,
    s_max: usize,
    min_len: usize,
) -> Result<VariationResult<T>> {
    check_exponent(q)?;
    if min_len == 0 {
        return Err(Error::InvalidInput("min_len must be at least one cell".into()));
    }
    if min_len > f.m() {
        return Ok(VariationResult::zero(Mode::ExactDp));
    }
    let ones = WeightSequence::<T>::constant(1.0)?;
    let g = PowerWeighted {
        weights: &ones,
        power: q,
    };
    let r = solve(f.values(), min_len, s_max, &g, &EngineConfig::default());
    Ok(r.map(|x| root(x, q)))
}

/// `sup (Σ_j |f(I_j)|^p / λ_j)^{1/p}`.
pub fn variation_weighted<T: Real>(
    f: &StepFunction<T>,
    weights: &WeightSequence<T>,
    p: T,
    cfg: &EngineConfig,
) -> Result<VariationResult<T>> {
    check_exponent(p)?;
    let g = PowerWeighted { weights, power: p };
    let r = solve(f.values(), 1, f.m(), &g, cfg);
    Ok(r.map(|x| root(x, p)))
}

/// `sup Σ_j φ_j(|f(I_j)|)`.
pub fn variation_schramm<T: Real>(
    f: &StepFunction<T>,
    family: &SchrammFamily<T>,
    cfg: &EngineConfig,
) -> Result<VariationResult<T>> {
    let g = SchrammGains { family };
    Ok(solve(f.values(), 1, f.m(), &g, cfg))
}

/// `sup_{n <= n_cap} sup (Σ_j |f(I_j)|^{q_n} / λ_j)^{1/q_n}` over collections
/// whose intervals have at least `⌈m/δ_n⌉` cells.
pub fn variation_gauged<T: Real>(
    f: &StepFunction<T>,
    weights: &WeightSequence<T>,
    gauge: &GaugePair,
    n_cap: usize,
    cfg: &EngineConfig,
) -> Result<VariationResult<T>> {
    if n_cap == 0 || n_cap > gauge.n_max {
        return Err(Error::InvalidGauge(format!(
            "n_cap = {n_cap} must lie in 1..={}",
            gauge.n_max
        )));
    }
    let levels = gauged_levels(f, weights, gauge, n_cap, cfg)?;
    let mut best = levels[0].clone();
    for r in &levels[1..] {
        if r.value > best.value {
            best = r.clone();
        }
    }
    best.lower = levels.iter().map(|r| r.lower).fold(T::zero(), T::max);
    best.upper = levels.iter().map(|r| r.upper).fold(T::zero(), T::max);
    best.mode = levels.iter().map(|r| r.mode).max().expect("nonempty");
    Ok(best)
}

/// Per-level constrained suprema `n = 1..=n_cap`, each tagged with its level.
pub fn gauged_levels<T: Real>(
    f: &StepFunction<T>,
    weights: &WeightSequence<T>,
    gauge: &GaugePair,
    n_cap: usize,
    cfg: &EngineConfig,
) -> Result<Vec<VariationResult<T>>> {
    (1..=n_cap)
        .into_par_iter()
        .map(|n| {
            let q = T::lit(gauge.q_n(n));
            check_exponent(q)?;
            let min_len = min_cells(f.m(), gauge.delta_n(n));
            let mut r = if min_len > f.m() {
                VariationResult::zero(Mode::ExactDp)
            } else {
                let g = PowerWeighted { weights, power: q };
                solve(f.values(), min_len, f.m(), &g, cfg).map(|x| root(x, q))
            };
            r.level = Some(n);
            Ok(r)
        })
        .collect()
}

/// `|f(a)| + inf{c > 0 : V_Φ(f/c) <= 1}` by bisection on `c`.
pub fn schramm_norm<T: Real>(
    f: &StepFunction<T>,
    family: &SchrammFamily<T>,
    f_a: T,
    cfg: &EngineConfig,
) -> Result<T> {
    if f.jump_count() == 0 {
        return Ok(f_a.abs());
    }
    let v = |c: T| -> Result<T> { Ok(variation_schramm(&f.scaled(c.recip()), family, cfg)?.value) };
    let scale = f
        .values()
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let (mut lo, mut hi) = (scale, scale);
    let mut steps = 0;
    while v(hi)? > T::one() {
        lo = hi;
        hi = hi + hi;
        steps += 1;
        if steps > 200 || !hi.is_finite() {
            return Err(Error::Bracket(format!(
                "V(f/c) stays above 1 up to c = {hi}"
            )));
        }
    }
    while lo == hi || v(lo)? <= T::one() {
        hi = lo;
        lo = lo * T::lit(0.5);
        steps += 1;
        if steps > 400 || lo <= T::min_positive_value() {
            return Err(Error::Bracket(format!("V(f/c) stays below 1 down to c = {lo}")));
        }
    }
    // lo: V > 1, hi: V <= 1
    for _ in 0..200 {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if v(mid)? <= T::one() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(f_a.abs() + hi)
}

fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p.is_finite() && p >= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("exponent must be finite and >= 1, got {p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{BaseConvex, DeltaLadder, QLadder, WeightKind};

    fn alt() -> StepFunction {
        StepFunction::new(vec![0.0, 1.0, 0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn modulus_examples() {
        let f = alt();
        let r = modulus_of_variation(&f, 2).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.witness, vec![(0, 1), (1, 2)]);
        assert_eq!(modulus_of_variation(&f, 7).unwrap().value, 4.0);
        let c = StepFunction::new(vec![1.5; 6]).unwrap();
        assert_eq!(modulus_of_variation(&c, 3).unwrap().value, 0.0);
        assert_eq!(modulus_profile(&f, 6), vec![0.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0]);
    }

    #[test]
    fn unweighted_examples() {
        let f = alt();
        assert_eq!(variation_unweighted_q(&f, 1.0, 4, 1).unwrap().value, 4.0);
        let r = variation_unweighted_q(&f, 2.0, 4, 2).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(variation_unweighted_q(&f, 2.0, 4, 5).unwrap().value, 0.0);
    }

    #[test]
    fn weighted_and_schramm_examples() {
        let cfg = EngineConfig::default();
        let h = WeightSequence::harmonic().unwrap();
        let r = variation_weighted(&alt(), &h, 1.0, &cfg).unwrap();
        assert!((r.value - 25.0 / 12.0).abs() < 1e-12);
        assert_eq!(r.mode, Mode::ExactOracle);
        assert_eq!(r.witness, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);

        let jump = StepFunction::new(vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        assert_eq!(variation_weighted(&jump, &h, 1.0, &cfg).unwrap().value, 2.0);

        let fam = SchrammFamily::scaled(BaseConvex::Power(2.0), h.clone()).unwrap();
        let r = variation_schramm(&alt(), &fam, &cfg).unwrap();
        assert!((r.value - 25.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn gauged_example() {
        let cfg = EngineConfig::default();
        let w = WeightSequence::constant(1.0).unwrap();
        let g = GaugePair::linear_pow2();
        let r = variation_gauged(&alt(), &w, &g, 3, &cfg).unwrap();
        // level 1 needs 2 cells: best single increment 1; level 2 takes all
        // four unit jumps with q = 2
        assert_eq!(r.value, 2.0);
        assert_eq!(r.level, Some(2));
        assert_eq!(r.mode, Mode::ExactDp);
    }

    #[test]
    fn norm_of_single_jump() {
        let cfg = EngineConfig::default();
        let h = WeightSequence::harmonic().unwrap();
        let fam = SchrammFamily::scaled(BaseConvex::Power(1.0), h).unwrap();
        let f = StepFunction::new(vec![0.0, 0.0, 3.0]).unwrap();
        let c: f64 = schramm_norm(&f, &fam, 0.0, &cfg).unwrap();
        assert!((c - 3.0).abs() < 1e-12);
        let z = StepFunction::zeros(4).unwrap();
        assert_eq!(schramm_norm(&z, &fam, 0.0, &cfg).unwrap(), 0.0);
        let c2: f64 = schramm_norm(&f.scaled(2.0), &fam, 0.0, &cfg).unwrap();
        assert!((c2 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_bracket_the_value_on_large_grids() {
        let vals: Vec<f64> = (0..=40).map(|i| ((i * 7919) % 13) as f64 * 0.1).collect();
        let f = StepFunction::new(vals).unwrap();
        let h = WeightSequence::harmonic().unwrap();
        let small = EngineConfig {
            oracle_cap: 4,
            ..EngineConfig::default()
        };
        let r = variation_weighted(&f, &h, 1.0, &small).unwrap();
        assert_eq!(r.mode, Mode::Bounds);
        assert!(r.lower <= r.upper);
        let g = GaugePair::new(QLadder::Constant { q: 1.0 }, DeltaLadder::Pow2 { shift: 0 }).unwrap();
        let w = WeightSequence::new(WeightKind::Power { alpha: 0.5 }).unwrap();
        let r = variation_gauged(&f, &w, &g, 4, &small).unwrap();
        assert!(r.lower <= r.upper);
    }
}
