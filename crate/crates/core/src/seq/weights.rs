use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

pub const DEFAULT_K_MAX: usize = 1_000_000;

fn one() -> f64 {
    1.0
}

/// Closed list of Waterman sequence shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// `λ_j = value` for every `j`.
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `λ_j = j`.
    Harmonic,
    /// `λ_j = j^alpha` with `0 < alpha <= 1`.
    Power { alpha: f64 },
    /// `λ_j = j / ln(j + 1)`.
    LogScaled,
    /// User list, extended past its end by repeating the last value.
    Explicit { values: Vec<f64> },
}

/// A sequence spec as it appears in config files:
/// `{"kind": "power", "alpha": 0.5, "k_max": 1000000}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    #[serde(flatten)]
    pub kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
}

impl WeightSpec {
    pub fn new(kind: WeightKind) -> Self {
        Self { kind, k_max: None }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = Some(k_max);
        self
    }

    pub fn build<T: Real>(&self) -> Result<WeightSequence<T>> {
        WeightSequence::with_horizon(self.kind.clone(), self.k_max.unwrap_or(DEFAULT_K_MAX))
    }
}

impl From<WeightKind> for WeightSpec {
    fn from(kind: WeightKind) -> Self {
        Self::new(kind)
    }
}

/// How the divergence of `Σ 1/λ_j` is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divergence {
    Analytic,
    AssertedByUser,
}

/// A Waterman sequence `{λ_j}` together with its growth function
/// `Λ(k) = Σ_{j≤k} 1/λ_j`, cached up to the horizon `k_max`.
///
/// Past the horizon, [`WeightSequence::growth`] continues the sum exactly
/// (constant and explicit kinds) or with an Euler-Maclaurin tail anchored at
/// the last cached value (harmonic, power and log-scaled kinds).
#[derive(Clone, Debug)]
pub struct WeightSequence<T: Real = f64> {
    kind: WeightKind,
    k_max: usize,
    // prefix[k] = Λ(k), prefix[0] = 0
    prefix: Vec<T>,
}

impl<T: Real> WeightSequence<T> {
    pub fn new(kind: WeightKind) -> Result<Self> {
        Self::with_horizon(kind, DEFAULT_K_MAX)
    }

    pub fn with_horizon(kind: WeightKind, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidSequence("horizon k_max must be positive".into()));
        }
        validate_kind(&kind)?;
        let k_max = match &kind {
            WeightKind::Explicit { values } => k_max.max(values.len()),
            _ => k_max,
        };
        let mut seq = Self {
            kind,
            k_max,
            prefix: Vec::new(),
        };
        let mut acc = CompensatedSum::new();
        let mut prefix = Vec::with_capacity(k_max + 1);
        prefix.push(T::zero());
        for j in 1..=k_max as u64 {
            acc.add(seq.reciprocal(j));
            prefix.push(acc.value());
        }
        seq.prefix = prefix;
        Ok(seq)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(WeightKind::Constant { value })
    }

    pub fn harmonic() -> Result<Self> {
        Self::new(WeightKind::Harmonic)
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn spec(&self) -> WeightSpec {
        WeightSpec {
            kind: self.kind.clone(),
            k_max: Some(self.k_max),
        }
    }

    pub fn divergence(&self) -> Divergence {
        match self.kind {
            WeightKind::Explicit { .. } => Divergence::AssertedByUser,
            _ => Divergence::Analytic,
        }
    }

    /// True when every `λ_j` is the same number.
    pub fn is_constant(&self) -> bool {
        match &self.kind {
            WeightKind::Constant { .. } => true,
            WeightKind::Explicit { values } => values.windows(2).all(|w| w[0] == w[1]),
            _ => false,
        }
    }

    /// `λ_j` for `j >= 1`.
    pub fn lambda(&self, j: u64) -> T {
        debug_assert!(j >= 1);
        let jf = T::from_u64_lossy(j);
        match &self.kind {
            WeightKind::Constant { value } => T::lit(*value),
            WeightKind::Harmonic => jf,
            WeightKind::Power { alpha } => jf.powf(T::lit(*alpha)),
            WeightKind::LogScaled => jf / (jf + T::one()).ln(),
            WeightKind::Explicit { values } => {
                let idx = (j as usize).min(values.len()) - 1;
                T::lit(values[idx])
            }
        }
    }

    /// `1/λ_j` for `j >= 1`.
    pub fn reciprocal(&self, j: u64) -> T {
        let jf = T::from_u64_lossy(j);
        match &self.kind {
            WeightKind::Harmonic => jf.recip(),
            WeightKind::Power { alpha } => jf.powf(-T::lit(*alpha)),
            WeightKind::LogScaled => (jf + T::one()).ln() / jf,
            _ => self.lambda(j).recip(),
        }
    }

    /// `Λ(k)` for `1 <= k <= k_max`, read from the cache.
    pub fn prefix_sum(&self, k: usize) -> Result<T> {
        if k == 0 || k > self.k_max {
            return Err(Error::Horizon {
                k: k as u64,
                k_max: self.k_max,
            });
        }
        Ok(self.prefix[k])
    }

    /// True when `Λ(k)` is served from the cache.
    pub fn is_cached(&self, k: u64) -> bool {
        k >= 1 && k <= self.k_max as u64
    }

    /// `Λ(k)` for any `k >= 1`; `Λ(0) = 0`.
    pub fn growth(&self, k: u64) -> T {
        if k <= self.k_max as u64 {
            return self.prefix[k as usize];
        }
        self.prefix[self.k_max] + self.tail(self.k_max as u64, k)
    }

    /// `Σ_{j=from+1}^{to} 1/λ_j` for `to > from >= k_max`.
    fn tail(&self, from: u64, to: u64) -> T {
        let big_k = T::from_u64_lossy(from);
        let k = T::from_u64_lossy(to);
        let half = T::lit(0.5);
        let twelfth = T::lit(1.0 / 12.0);
        match &self.kind {
            WeightKind::Constant { value } => T::from_u64_lossy(to - from) / T::lit(*value),
            WeightKind::Explicit { values } => {
                let last = T::lit(*values.last().expect("validated nonempty"));
                T::from_u64_lossy(to - from) / last
            }
            WeightKind::Harmonic => harmonic_tail(big_k, k),
            WeightKind::Power { alpha } if *alpha == 1.0 => harmonic_tail(big_k, k),
            WeightKind::Power { alpha } => {
                let a = T::lit(*alpha);
                let one = T::one();
                let integral = (k.powf(one - a) - big_k.powf(one - a)) / (one - a);
                let g = |x: T| x.powf(-a);
                let dg = |x: T| -a * x.powf(-a - one);
                integral + half * (g(k) - g(big_k)) + twelfth * (dg(k) - dg(big_k))
            }
            WeightKind::LogScaled => {
                let one = T::one();
                let (lk, lbig) = (k.ln(), big_k.ln());
                let integral = half * (k / big_k).ln() * (lk + lbig)
                    + dilog_neg_recip(k)
                    - dilog_neg_recip(big_k);
                let g = |x: T| (x + one).ln() / x;
                let dg = |x: T| one / (x * (x + one)) - (x + one).ln() / (x * x);
                integral + half * (g(k) - g(big_k)) + twelfth * (dg(k) - dg(big_k))
            }
        }
    }

    /// Scans `λ_j > 0` and `λ_j <= λ_{j+1}` up to `limit` (capped at the
    /// horizon). Returns the first offending index.
    pub fn check_monotone(&self, limit: usize) -> std::result::Result<(), u64> {
        let limit = limit.min(self.k_max) as u64;
        let mut prev = self.lambda(1);
        if !(prev > T::zero()) {
            return Err(1);
        }
        for j in 2..=limit {
            let cur = self.lambda(j);
            if !(cur > T::zero()) || cur < prev {
                return Err(j);
            }
            prev = cur;
        }
        Ok(())
    }
}

fn harmonic_tail<T: Real>(big_k: T, k: T) -> T {
    let half = T::lit(0.5);
    let twelfth = T::lit(1.0 / 12.0);
    let integral = ((k - big_k) / big_k).ln_1p();
    integral + half * (k.recip() - big_k.recip()) - twelfth * ((k * k).recip() - (big_k * big_k).recip())
}

/// `Li₂(-1/x)` for `x >= 2` by its power series.
fn dilog_neg_recip<T: Real>(x: T) -> T {
    let u = -x.recip();
    let mut pow = u;
    let mut sum = T::zero();
    for m in 1..200u32 {
        let mm = T::lit((m * m) as f64);
        let term = pow / mm;
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
        pow = pow * u;
    }
    sum
}

fn validate_kind(kind: &WeightKind) -> Result<()> {
    match kind {
        WeightKind::Constant { value } => {
            if !(value.is_finite() && *value > 0.0) {
                return Err(Error::InvalidSequence(format!(
                    "constant weight must be positive and finite, got {value}"
                )));
            }
        }
        WeightKind::Power { alpha } => {
            if !(*alpha > 0.0 && *alpha <= 1.0) {
                return Err(Error::InvalidSequence(format!(
                    "power weights need 0 < alpha <= 1, got {alpha}"
                )));
            }
        }
        WeightKind::Explicit { values } => {
            if values.is_empty() {
                return Err(Error::InvalidSequence("explicit weight list is empty".into()));
            }
            for (i, v) in values.iter().enumerate() {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(Error::InvalidSequence(format!(
                        "weight λ_{} = {v} is not positive and finite",
                        i + 1
                    )));
                }
                if i > 0 && *v < values[i - 1] {
                    return Err(Error::InvalidSequence(format!(
                        "weights must be nondecreasing: λ_{} = {v} < λ_{} = {}",
                        i + 1,
                        i,
                        values[i - 1]
                    )));
                }
            }
        }
        WeightKind::Harmonic | WeightKind::LogScaled => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: WeightKind) -> WeightSequence<f64> {
        WeightSequence::with_horizon(kind, 1000).unwrap()
    }

    #[test]
    fn prefix_sum_examples() {
        let h = small(WeightKind::Harmonic);
        assert_eq!(h.prefix_sum(1).unwrap(), 1.0);
        assert!((h.prefix_sum(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
        let c = small(WeightKind::Constant { value: 1.0 });
        assert_eq!(c.prefix_sum(7).unwrap(), 7.0);
    }

    #[test]
    fn horizon_error() {
        let h = small(WeightKind::Harmonic);
        assert!(matches!(h.prefix_sum(0), Err(Error::Horizon { .. })));
        assert!(matches!(h.prefix_sum(1001), Err(Error::Horizon { k: 1001, .. })));
    }

    #[test]
    fn explicit_list_extends_by_last_value() {
        let e = small(WeightKind::Explicit {
            values: vec![1.0, 2.0, 4.0],
        });
        assert_eq!(e.lambda(3), 4.0);
        assert_eq!(e.lambda(50), 4.0);
        assert_eq!(e.divergence(), Divergence::AssertedByUser);
        assert!((e.growth(5000) - (1.5 + 4998.0 / 4.0)).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_weights() {
        for kind in [
            WeightKind::Constant { value: 0.0 },
            WeightKind::Power { alpha: 1.5 },
            WeightKind::Power { alpha: 0.0 },
            WeightKind::Explicit { values: vec![] },
            WeightKind::Explicit {
                values: vec![2.0, 1.0],
            },
        ] {
            assert!(WeightSequence::<f64>::with_horizon(kind, 10).is_err());
        }
    }

    #[test]
    fn tail_extension_matches_a_longer_cache() {
        let kinds = [
            WeightKind::Harmonic,
            WeightKind::Power { alpha: 0.5 },
            WeightKind::Power { alpha: 0.9 },
            WeightKind::LogScaled,
            WeightKind::Constant { value: 3.0 },
        ];
        for kind in kinds {
            let short = WeightSequence::<f64>::with_horizon(kind.clone(), 2_000).unwrap();
            let long = WeightSequence::<f64>::with_horizon(kind.clone(), 200_000).unwrap();
            for k in [2_001u64, 5_000, 77_777, 200_000] {
                let a = short.growth(k);
                let b = long.growth(k);
                assert!(
                    ((a - b) / b).abs() < 1e-12,
                    "{kind:?} k={k}: tail {a} vs cached {b}"
                );
            }
        }
    }

    #[test]
    fn monotone_scan() {
        for kind in [
            WeightKind::Harmonic,
            WeightKind::LogScaled,
            WeightKind::Power { alpha: 0.3 },
        ] {
            assert_eq!(small(kind).check_monotone(1000), Ok(()));
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec: WeightSpec =
            serde_json::from_str(r#"{"kind": "power", "alpha": 0.5, "k_max": 1000000}"#).unwrap();
        assert_eq!(spec.kind, WeightKind::Power { alpha: 0.5 });
        assert_eq!(spec.k_max, Some(1_000_000));
        let c: WeightSpec = serde_json::from_str(r#"{"kind": "constant"}"#).unwrap();
        assert_eq!(c.kind, WeightKind::Constant { value: 1.0 });
    }
}
