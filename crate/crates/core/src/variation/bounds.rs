//! Heuristic witnesses and layer upper bounds for rank-dependent objectives.

use super::dp::{count_limited, reconstruct_limited, spatial_order, unlimited};
use super::gains::RankedGains;
use super::search::Incumbent;
use crate::scalar::Real;

fn increments<T: Real>(values: &[T], pairs: &[(usize, usize)]) -> Vec<T> {
    pairs
        .iter()
        .map(|&(a, b)| (values[b] - values[a]).abs())
        .collect()
}

fn consider<T: Real, G: RankedGains<T>>(
    best: &mut Incumbent<T>,
    values: &[T],
    gains: &G,
    pairs: Vec<(usize, usize)>,
) {
    let v = gains.evaluate(&increments(values, &pairs));
    if v > best.value || (v == best.value && pairs < best.pairs) {
        *best = Incumbent { value: v, pairs };
    }
}

/// Best witness among count-limited optima of the rank-1 and last-rank
/// gains (one per count) and the spatial-order program.
pub(crate) fn lower<T: Real, G: RankedGains<T>>(
    values: &[T],
    min_len: usize,
    max_count: usize,
    count_cap: usize,
    gains: &G,
) -> Incumbent<T> {
    let mut best = Incumbent {
        value: T::zero(),
        pairs: Vec::new(),
    };
    if max_count == 0 {
        return best;
    }
    let k_max = max_count.min(count_cap);
    let mut ranks = vec![1];
    if k_max > 1 {
        ranks.push(k_max);
    }
    for rank in ranks {
        let h = |x: T| gains.gain(rank, x);
        let table = count_limited(values, min_len, k_max, &h);
        for k in 1..=k_max {
            consider(&mut best, values, gains, reconstruct_limited(&table, values, min_len, k, &h));
        }
    }
    let gain = |j: usize, x: T| gains.gain(j, x);
    let spatial = spatial_order(values, min_len, k_max, &gain);
    consider(&mut best, values, gains, spatial);
    best
}

/// `Σ_layers coef · S_profile(rank)`, where `S_profile(r)` is the best
/// profile sum over `r` intervals. Ranks past `count_cap` fall back to the
/// unlimited optimum of the profile.
pub(crate) fn upper<T: Real, G: RankedGains<T>>(
    values: &[T],
    min_len: usize,
    max_count: usize,
    count_cap: usize,
    gains: &G,
) -> T {
    let layers = gains.layers(max_count);
    let k_max = max_count.min(count_cap);
    let mut cache: Vec<(usize, Vec<T>, T)> = Vec::new();
    let mut total = T::zero();
    for l in &layers {
        let idx = match cache.iter().position(|(p, _, _)| *p == l.profile) {
            Some(i) => i,
            None => {
                let h = |x: T| gains.profile(l.profile, x);
                let prof = count_limited(values, min_len, k_max, &h).profile();
                let all = unlimited(values, min_len, &h)[0];
                cache.push((l.profile, prof, all));
                cache.len() - 1
            }
        };
        let (_, prof, all) = &cache[idx];
        let s = if l.rank <= k_max { prof[l.rank] } else { *all };
        total = total + l.coef * s;
    }
    total
}
