//! Exact branch-and-bound over nonoverlapping interval collections.
//!
//! Collections are explored depth first with intervals appended left to
//! right in ascending `(a, b)` order, which visits collections in
//! lexicographic order. A subtree is cut when the layer bound shows that no
//! completion can beat the incumbent, or can only tie it while being
//! lexicographically larger.

use super::dp::{count_limited, CountTable};
use super::gains::{Layer, RankedGains};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub(crate) struct Incumbent<T> {
    pub value: T,
    pub pairs: Vec<(usize, usize)>,
}

struct Search<'a, T: Real, G: RankedGains<T>> {
    gains: &'a G,
    max_count: usize,
    layers: Vec<Layer<T>>,
    // table index per layer
    layer_table: Vec<usize>,
    tables: Vec<(usize, CountTable<T>)>,
    children: Vec<Vec<(usize, T)>>,
    rel: T,
    best: Incumbent<T>,
    pairs: Vec<(usize, usize)>,
    sorted: Vec<T>,
    prefix_buf: Vec<T>,
    nodes: u64,
}

pub(crate) fn slack<T: Real>() -> T {
    (T::epsilon() * T::lit(512.0)).max(T::lit(1e-13))
}

pub(crate) fn branch_and_bound<T: Real, G: RankedGains<T>>(
    values: &[T],
    min_len: usize,
    max_count: usize,
    gains: &G,
    start: Incumbent<T>,
) -> Incumbent<T> {
    let m = values.len() - 1;
    let layers = gains.layers(max_count);
    let mut tables: Vec<(usize, CountTable<T>)> = Vec::new();
    let mut layer_table = Vec::with_capacity(layers.len());
    for l in &layers {
        let idx = match tables.iter().position(|(p, _)| *p == l.profile) {
            Some(i) => i,
            None => {
                let h = |x: T| gains.profile(l.profile, x);
                tables.push((l.profile, count_limited(values, min_len, max_count, &h)));
                tables.len() - 1
            }
        };
        layer_table.push(idx);
    }
    let children = (0..=m)
        .map(|a| {
            (a + min_len..=m)
                .filter_map(|b| {
                    let x = (values[b] - values[a]).abs();
                    (x > T::zero()).then_some((b, x))
                })
                .collect()
        })
        .collect();
    let mut s = Search {
        gains,
        max_count,
        layers,
        layer_table,
        tables,
        children,
        rel: slack(),
        best: start,
        pairs: Vec::new(),
        sorted: Vec::new(),
        prefix_buf: Vec::new(),
        nodes: 0,
    };
    s.dfs(0, m);
    log::trace!("branch and bound visited {} nodes", s.nodes);
    s.best
}

impl<T: Real, G: RankedGains<T>> Search<'_, T, G> {
    fn dfs(&mut self, pos: usize, m: usize) {
        self.nodes += 1;
        let v = self.gains.evaluate_sorted(&self.sorted);
        if v > self.best.value || (v == self.best.value && self.pairs < self.best.pairs) {
            self.best = Incumbent {
                value: v,
                pairs: self.pairs.clone(),
            };
        }
        if self.pairs.len() >= self.max_count || pos >= m {
            return;
        }
        let ub = self.upper_bound(pos);
        let inc = self.best.value;
        let lex_greater = self.pairs.as_slice() > self.best.pairs.as_slice();
        if lex_greater {
            if ub <= inc + self.rel * inc.abs() {
                return;
            }
        } else if ub * (T::one() + self.rel) < inc {
            return;
        }
        for a in pos..m {
            for ci in 0..self.children[a].len() {
                let (b, x) = self.children[a][ci];
                let at = self.sorted.partition_point(|&y| y >= x);
                self.sorted.insert(at, x);
                self.pairs.push((a, b));
                self.dfs(b, m);
                self.pairs.pop();
                self.sorted.remove(at);
            }
        }
    }

    /// Upper bound on every completion of the current collection using
    /// intervals inside `[pos, m]`.
    fn upper_bound(&mut self, pos: usize) -> T {
        let remaining = self.max_count - self.pairs.len();
        let mut total = T::zero();
        for (li, layer) in self.layers.iter().enumerate() {
            let (profile, table) = &self.tables[self.layer_table[li]];
            // prefix sums of the profile over the chosen increments
            self.prefix_buf.clear();
            self.prefix_buf.push(T::zero());
            let mut acc = T::zero();
            for &x in self.sorted.iter().take(layer.rank) {
                acc = acc + self.gains.profile(*profile, x);
                self.prefix_buf.push(acc);
            }
            let mut best = T::zero();
            for (a, &head) in self.prefix_buf.iter().enumerate() {
                let rest = (layer.rank - a).min(remaining);
                let cand = head + table.get(rest, pos);
                if cand > best {
                    best = cand;
                }
            }
            total = total + layer.coef * best;
        }
        total
    }
}
