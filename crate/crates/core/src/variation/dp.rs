//! Interval-selection dynamic programs on a grid.
//!
//! All programs run right to left over start positions so that the
//! reconstruction, which walks left to right and takes the first optimal
//! choice, yields the lexicographically smallest optimal witness.

use crate::scalar::Real;

#[inline]
fn inc<T: Real>(values: &[T], a: usize, b: usize) -> T {
    (values[b] - values[a]).abs()
}

/// `S[k][pos]`: best sum of `h(increment)` over at most `k` nonoverlapping
/// intervals inside `[pos, m]`, each at least `min_len` cells long.
pub(crate) struct CountTable<T> {
    k_max: usize,
    m: usize,
    cells: Vec<T>,
}

impl<T: Real> CountTable<T> {
    #[inline]
    pub fn get(&self, k: usize, pos: usize) -> T {
        let k = k.min(self.k_max);
        self.cells[pos * (self.k_max + 1) + k]
    }

    /// `ν(k)` for `k = 0..=k_max` over the whole grid.
    pub fn profile(&self) -> Vec<T> {
        (0..=self.k_max).map(|k| self.get(k, 0)).collect()
    }
}

pub(crate) fn count_limited<T: Real>(
    values: &[T],
    min_len: usize,
    k_max: usize,
    h: &impl Fn(T) -> T,
) -> CountTable<T> {
    let m = values.len() - 1;
    let w = k_max + 1;
    let mut cells = vec![T::zero(); (m + 1) * w];
    let mut row = vec![T::zero(); w];
    for pos in (0..m).rev() {
        // skip pos
        row.copy_from_slice(&cells[(pos + 1) * w..(pos + 2) * w]);
        for b in pos + min_len..=m {
            let g = h(inc(values, pos, b));
            if !(g > T::zero()) {
                continue;
            }
            let base = b * w;
            for k in 1..=k_max {
                let cand = g + cells[base + k - 1];
                if cand > row[k] {
                    row[k] = cand;
                }
            }
        }
        cells[pos * w..(pos + 1) * w].copy_from_slice(&row);
    }
    CountTable { k_max, m, cells }
}

pub(crate) fn reconstruct_limited<T: Real>(
    table: &CountTable<T>,
    values: &[T],
    min_len: usize,
    k: usize,
    h: &impl Fn(T) -> T,
) -> Vec<(usize, usize)> {
    let m = table.m;
    let mut out = Vec::new();
    let (mut pos, mut k) = (0, k.min(table.k_max));
    while pos < m && k > 0 {
        let target = table.get(k, pos);
        if !(target > T::zero()) {
            break;
        }
        let mut taken = None;
        for b in pos + min_len..=m {
            let g = h(inc(values, pos, b));
            if g > T::zero() && g + table.get(k - 1, b) == target {
                taken = Some(b);
                break;
            }
        }
        match taken {
            Some(b) => {
                out.push((pos, b));
                pos = b;
                k -= 1;
            }
            None => pos += 1,
        }
    }
    out
}

/// Best sum of `h(increment)` over any number of intervals of at least
/// `min_len` cells, as a suffix table `best[pos]`.
pub(crate) fn unlimited<T: Real>(values: &[T], min_len: usize, h: &impl Fn(T) -> T) -> Vec<T> {
    let m = values.len() - 1;
    let mut best = vec![T::zero(); m + 1];
    for pos in (0..m).rev() {
        let mut cur = best[pos + 1];
        for b in pos + min_len..=m {
            let g = h(inc(values, pos, b));
            if g > T::zero() {
                let cand = g + best[b];
                if cand > cur {
                    cur = cand;
                }
            }
        }
        best[pos] = cur;
    }
    best
}

pub(crate) fn reconstruct_unlimited<T: Real>(
    best: &[T],
    values: &[T],
    min_len: usize,
    h: &impl Fn(T) -> T,
) -> Vec<(usize, usize)> {
    let m = values.len() - 1;
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < m {
        let target = best[pos];
        if !(target > T::zero()) {
            break;
        }
        let mut taken = None;
        for b in pos + min_len..=m {
            let g = h(inc(values, pos, b));
            if g > T::zero() && g + best[b] == target {
                taken = Some(b);
                break;
            }
        }
        match taken {
            Some(b) => {
                out.push((pos, b));
                pos = b;
            }
            None => pos += 1,
        }
    }
    out
}

/// Best value when the `j`-th interval from the left receives rank `j`,
/// over collections of at most `k_max` intervals. Returns a witness; its
/// descending-rank value is at least the spatial value.
pub(crate) fn spatial_order<T: Real>(
    values: &[T],
    min_len: usize,
    k_max: usize,
    gain: &impl Fn(usize, T) -> T,
) -> Vec<(usize, usize)> {
    let m = values.len() - 1;
    if k_max == 0 || m == 0 {
        return Vec::new();
    }
    let w = k_max + 1;
    // t[pos * w + j]: best from pos with j intervals already placed
    let mut t = vec![T::zero(); (m + 1) * w];
    for pos in (0..m).rev() {
        for j in 0..k_max {
            let mut cur = t[(pos + 1) * w + j];
            for b in pos + min_len..=m {
                let x = inc(values, pos, b);
                if !(x > T::zero()) {
                    continue;
                }
                let cand = gain(j + 1, x) + t[b * w + j + 1];
                if cand > cur {
                    cur = cand;
                }
            }
            t[pos * w + j] = cur;
        }
    }
    let mut out = Vec::new();
    let (mut pos, mut j) = (0, 0);
    while pos < m && j < k_max {
        let target = t[pos * w + j];
        if !(target > T::zero()) {
            break;
        }
        let mut taken = None;
        for b in pos + min_len..=m {
            let x = inc(values, pos, b);
            if x > T::zero() && gain(j + 1, x) + t[b * w + j + 1] == target {
                taken = Some(b);
                break;
            }
        }
        match taken {
            Some(b) => {
                out.push((pos, b));
                pos = b;
                j += 1;
            }
            None => pos += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_modulus() {
        let v = [0.0, 1.0, 0.0, 1.0, 0.0];
        let id = |x: f64| x;
        let t = count_limited(&v, 1, 7, &id);
        assert_eq!(t.profile(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 4.0, 4.0, 4.0]);
        assert_eq!(reconstruct_limited(&t, &v, 1, 2, &id), vec![(0, 1), (1, 2)]);
        let best = unlimited(&v, 1, &id);
        assert_eq!(best[0], 4.0);
        assert_eq!(
            reconstruct_unlimited(&best, &v, 1, &id),
            vec![(0, 1), (1, 2), (2, 3), (3, 4)]
        );
    }

    #[test]
    fn min_length_constraint() {
        let v = [0.0, 1.0, 0.0, 1.0, 0.0];
        let sq = |x: f64| x * x;
        let best = unlimited(&v, 2, &sq);
        assert_eq!(best[0], 1.0);
        assert_eq!(reconstruct_unlimited(&best, &v, 2, &sq), vec![(0, 3)]);
        let t = count_limited(&v, 5, 3, &sq);
        assert_eq!(t.get(3, 0), 0.0);
    }

    #[test]
    fn spatial_order_prefers_big_first() {
        // weights 1, 1/2: spatial order puts the small jump first
        let v = [0.0, 1.0, 1.0, 4.0];
        let gain = |j: usize, x: f64| x / j as f64;
        let w = spatial_order(&v, 1, 2, &gain);
        assert_eq!(w, vec![(0, 3)]);
    }
}
