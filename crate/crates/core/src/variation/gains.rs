//! Rank-dependent gains.
//!
//! Every functional handled by the engine has the form
//! `Σ_j gain(j, x_(j))`, where `x_(1) >= x_(2) >= ...` are the increments of
//! a collection in descending order and `gain(j, ·)` is nonincreasing in the
//! rank `j`. Such an objective splits into layers
//!
//! ```text
//! Σ_j gain(j, x_(j)) = Σ_layers coef · (sum of profile(x) over the top `rank` increments)
//! ```
//!
//! with nonnegative coefficients and nondecreasing profiles. The layer form
//! drives both the exact dynamic program (a single layer at the full rank is
//! rank-independent) and the upper bounds.

use crate::scalar::Real;
use crate::seq::{SchrammFamily, WeightSequence};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Layer<T> {
    pub rank: usize,
    pub coef: T,
    pub profile: usize,
}

pub(crate) trait RankedGains<T: Real>: Sync {
    /// Gain of increment `x` placed at 1-based `rank`.
    fn gain(&self, rank: usize, x: T) -> T;

    /// Nondecreasing profile with `profile(0) = 0`.
    fn profile(&self, id: usize, x: T) -> T;

    /// Layer decomposition valid for collections of at most `max_rank`
    /// intervals.
    fn layers(&self, max_rank: usize) -> Vec<Layer<T>>;

    /// Value of a collection under the descending rank assignment.
    fn evaluate(&self, increments: &[T]) -> T {
        let mut xs = increments.to_vec();
        xs.sort_by(|a, b| b.partial_cmp(a).expect("finite increments"));
        let mut acc = T::zero();
        for (j, &x) in xs.iter().enumerate() {
            acc = acc + self.gain(j + 1, x);
        }
        acc
    }

    /// Value of a collection whose increments are already sorted descending.
    fn evaluate_sorted(&self, sorted: &[T]) -> T {
        let mut acc = T::zero();
        for (j, &x) in sorted.iter().enumerate() {
            acc = acc + self.gain(j + 1, x);
        }
        acc
    }
}

/// `x^p / λ_j`.
pub(crate) struct PowerWeighted<'a, T: Real> {
    pub weights: &'a WeightSequence<T>,
    pub power: T,
}

impl<T: Real> PowerWeighted<'_, T> {
    fn pow(&self, x: T) -> T {
        if self.power == T::one() {
            x
        } else {
            x.powf(self.power)
        }
    }
}

/// Separable layers `Σ_i (w_i - w_{i+1}) T_i + w_J T_J` for weights `w_j`.
fn separable_layers<T: Real>(max_rank: usize, w: impl Fn(u64) -> T) -> Vec<Layer<T>> {
    let mut out = Vec::new();
    if max_rank == 0 {
        return out;
    }
    let mut cur = w(1);
    for i in 1..max_rank {
        let next = w(i as u64 + 1);
        let c = cur - next;
        if c > T::zero() {
            out.push(Layer {
                rank: i,
                coef: c,
                profile: 0,
            });
        }
        cur = next;
    }
    out.push(Layer {
        rank: max_rank,
        coef: cur,
        profile: 0,
    });
    out
}

impl<T: Real> RankedGains<T> for PowerWeighted<'_, T> {
    fn gain(&self, rank: usize, x: T) -> T {
        self.pow(x) * self.weights.reciprocal(rank as u64)
    }

    fn profile(&self, _id: usize, x: T) -> T {
        self.pow(x)
    }

    fn layers(&self, max_rank: usize) -> Vec<Layer<T>> {
        if self.weights.is_constant() {
            if max_rank == 0 {
                return Vec::new();
            }
            return vec![Layer {
                rank: max_rank,
                coef: self.weights.reciprocal(1),
                profile: 0,
            }];
        }
        separable_layers(max_rank, |j| self.weights.reciprocal(j))
    }
}

/// `φ_j(x)` of a Schramm family.
pub(crate) struct SchrammGains<'a, T: Real> {
    pub family: &'a SchrammFamily<T>,
}

impl<T: Real> RankedGains<T> for SchrammGains<'_, T> {
    fn gain(&self, rank: usize, x: T) -> T {
        self.family.phi(rank as u64, x)
    }

    fn profile(&self, id: usize, x: T) -> T {
        match self.family.explicit_len() {
            None => self.family.separable().expect("scaled").0.eval(x),
            Some(len) => {
                // ids 0..len-1 are φ_i - φ_{i+1}; id len-1 is φ_len
                let j = id as u64 + 1;
                if id + 1 < len {
                    self.family.phi(j, x) - self.family.phi(j + 1, x)
                } else {
                    self.family.phi(len as u64, x)
                }
            }
        }
    }

    fn layers(&self, max_rank: usize) -> Vec<Layer<T>> {
        if max_rank == 0 {
            return Vec::new();
        }
        match self.family.separable() {
            Some((_, w)) => {
                if w.is_constant() {
                    vec![Layer {
                        rank: max_rank,
                        coef: w.reciprocal(1),
                        profile: 0,
                    }]
                } else {
                    separable_layers(max_rank, |j| w.reciprocal(j))
                }
            }
            None => {
                let len = self.family.explicit_len().expect("explicit");
                let mut out: Vec<Layer<T>> = (1..len)
                    .map(|i| Layer {
                        rank: i.min(max_rank),
                        coef: T::one(),
                        profile: i - 1,
                    })
                    .collect();
                out.push(Layer {
                    rank: max_rank,
                    coef: T::one(),
                    profile: len - 1,
                });
                out
            }
        }
    }
}

/// True when the objective does not depend on ranks at all.
pub(crate) fn is_rank_independent<T: Real>(layers: &[Layer<T>], max_rank: usize) -> bool {
    layers.len() == 1 && layers[0].rank == max_rank
}
