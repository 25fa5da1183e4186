use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: usize = 64;

/// Largest scale value; `2^n` ladders saturate here so that `k <= δ_n`
/// always fits in a `u64`.
pub const DELTA_CEILING: u64 = 1 << 62;

fn one() -> f64 {
    1.0
}

fn zero() -> f64 {
    0.0
}

/// Exponent ladder `1 <= q_n ↑ q <= ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QLadder {
    /// `q_n = q`.
    Constant { q: f64 },
    /// `q_n = intercept + slope·n`, limit `∞`.
    Linear {
        #[serde(default = "one")]
        slope: f64,
        #[serde(default = "zero")]
        intercept: f64,
    },
    /// `q_n = limit - gap/n`, limit `limit`.
    Approach { limit: f64, gap: f64 },
    /// Listed values, extended by the last one.
    Explicit { values: Vec<f64> },
}

/// Scale ladder `2 <= δ_n ↑ ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeltaLadder {
    /// `δ_n = 2^(n + shift)`.
    Pow2 {
        #[serde(default)]
        shift: u32,
    },
    /// `δ_n = scale·n`.
    Linear { scale: u64 },
    /// Listed values, extended by doubling the last one.
    Explicit { values: Vec<u64> },
}

/// Limit of the exponent ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QLimit {
    Finite(f64),
    Infinite,
}

/// The pair of ladders `(q_n, δ_n)` defining the constrained variation,
/// truncated at `n_max` levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugePair {
    pub q: QLadder,
    pub delta: DeltaLadder,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

impl GaugePair {
    pub fn new(q: QLadder, delta: DeltaLadder) -> Result<Self> {
        let g = Self {
            q,
            delta,
            n_max: DEFAULT_N_MAX,
        };
        g.validate()?;
        Ok(g)
    }

    /// `q_n = n`, `δ_n = 2^n`.
    pub fn linear_pow2() -> Self {
        Self::new(
            QLadder::Linear {
                slope: 1.0,
                intercept: 0.0,
            },
            DeltaLadder::Pow2 { shift: 0 },
        )
        .expect("valid default ladder")
    }

    pub fn constant_pow2(q: f64) -> Result<Self> {
        Self::new(QLadder::Constant { q }, DeltaLadder::Pow2 { shift: 0 })
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        self.n_max = n_max;
        self.validate()?;
        Ok(self)
    }

    /// `q_n` for `n >= 1`.
    pub fn q_n(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        let nf = n as f64;
        match &self.q {
            QLadder::Constant { q } => *q,
            QLadder::Linear { slope, intercept } => intercept + slope * nf,
            QLadder::Approach { limit, gap } => limit - gap / nf,
            QLadder::Explicit { values } => values[n.min(values.len()) - 1],
        }
    }

    /// `δ_n` for `n >= 1`.
    pub fn delta_n(&self, n: usize) -> u64 {
        debug_assert!(n >= 1);
        match &self.delta {
            DeltaLadder::Pow2 { shift } => {
                let e = n as u64 + *shift as u64;
                if e >= 62 {
                    DELTA_CEILING
                } else {
                    1u64 << e
                }
            }
            DeltaLadder::Linear { scale } => scale.saturating_mul(n as u64).min(DELTA_CEILING),
            DeltaLadder::Explicit { values } => {
                if n <= values.len() {
                    values[n - 1].min(DELTA_CEILING)
                } else {
                    let extra = (n - values.len()) as u32;
                    let last = values[values.len() - 1];
                    if extra >= 62 {
                        DELTA_CEILING
                    } else {
                        last.saturating_mul(1u64 << extra).min(DELTA_CEILING)
                    }
                }
            }
        }
    }

    pub fn q_limit(&self) -> QLimit {
        match &self.q {
            QLadder::Constant { q } => QLimit::Finite(*q),
            QLadder::Linear { .. } => QLimit::Infinite,
            QLadder::Approach { limit, .. } => QLimit::Finite(*limit),
            QLadder::Explicit { values } => QLimit::Finite(values[values.len() - 1]),
        }
    }

    /// Checks `1 <= q_n <= q_{n+1}` and `2 <= δ_n <= δ_{n+1}` for `n < n_max`.
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidGauge("n_max must be positive".into()));
        }
        match &self.q {
            QLadder::Explicit { values } if values.is_empty() => {
                return Err(Error::InvalidGauge("explicit q ladder is empty".into()))
            }
            QLadder::Linear { slope, .. } if !(*slope > 0.0) => {
                return Err(Error::InvalidGauge("linear q ladder needs a positive slope".into()))
            }
            QLadder::Approach { gap, .. } if *gap < 0.0 => {
                return Err(Error::InvalidGauge("approach ladder needs gap >= 0".into()))
            }
            _ => {}
        }
        match &self.delta {
            DeltaLadder::Explicit { values } if values.is_empty() => {
                return Err(Error::InvalidGauge("explicit δ ladder is empty".into()))
            }
            _ => {}
        }
        let mut prev_q = 1.0;
        let mut prev_d = 2;
        for n in 1..=self.n_max {
            let q = self.q_n(n);
            if !(q.is_finite() && q >= prev_q) {
                return Err(Error::InvalidGauge(format!(
                    "q_{n} = {q} breaks 1 <= q_n <= q_(n+1)"
                )));
            }
            let d = self.delta_n(n);
            if d < prev_d {
                return Err(Error::InvalidGauge(format!(
                    "δ_{n} = {d} breaks 2 <= δ_n <= δ_(n+1)"
                )));
            }
            prev_q = q;
            prev_d = d;
        }
        Ok(())
    }
}

/// Smallest number of grid cells `⌈m/δ⌉` an interval needs to have length at
/// least `1/δ` on a grid of resolution `m`.
pub fn min_cells(m: usize, delta: u64) -> usize {
    let m = m as u64;
    m.div_ceil(delta).max(1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_ladders() {
        let g = GaugePair::linear_pow2();
        assert_eq!(g.q_n(3), 3.0);
        assert_eq!(g.delta_n(5), 32);
        assert_eq!(g.delta_n(64), DELTA_CEILING);
        assert_eq!(g.q_limit(), QLimit::Infinite);
        g.validate().unwrap();
    }

    #[test]
    fn approach_ladder() {
        let g = GaugePair::new(
            QLadder::Approach {
                limit: 2.0,
                gap: 1.0,
            },
            DeltaLadder::Pow2 { shift: 0 },
        )
        .unwrap();
        assert_eq!(g.q_n(1), 1.0);
        assert_eq!(g.q_n(4), 1.75);
        assert_eq!(g.q_limit(), QLimit::Finite(2.0));
    }

    #[test]
    fn rejects_bad_ladders() {
        assert!(GaugePair::constant_pow2(0.5).is_err());
        assert!(GaugePair::new(
            QLadder::Explicit {
                values: vec![2.0, 1.5]
            },
            DeltaLadder::Pow2 { shift: 0 }
        )
        .is_err());
        assert!(GaugePair::new(
            QLadder::Constant { q: 1.0 },
            DeltaLadder::Explicit { values: vec![1] }
        )
        .is_err());
        assert!(GaugePair::new(
            QLadder::Constant { q: 1.0 },
            DeltaLadder::Explicit {
                values: vec![8, 4]
            }
        )
        .is_err());
    }

    #[test]
    fn explicit_delta_extends_by_doubling() {
        let g = GaugePair::new(
            QLadder::Constant { q: 1.0 },
            DeltaLadder::Explicit {
                values: vec![8, 16, 256],
            },
        )
        .unwrap();
        assert_eq!(g.delta_n(3), 256);
        assert_eq!(g.delta_n(5), 1024);
    }

    #[test]
    fn min_cells_rounds_up() {
        assert_eq!(min_cells(8, 4), 2);
        assert_eq!(min_cells(10, 4), 3);
        assert_eq!(min_cells(4, 8), 1);
    }

    #[test]
    fn json_round_trip() {
        let g = GaugePair::linear_pow2();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<GaugePair>(&s).unwrap(), g);
        let g: GaugePair =
            serde_json::from_str(r#"{"q": {"kind": "linear"}, "delta": {"kind": "pow2"}}"#).unwrap();
        assert_eq!(g.n_max, DEFAULT_N_MAX);
    }
}
