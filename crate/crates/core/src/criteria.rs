//! Truncated scans of the embedding criteria.
//!
//! Each criterion is a limsup over levels `n` of `a_n = max_{1<=k<=δ_n}
//! kernel(n, k)` where the kernel has the form `A(k)^{1/q_n} · B(k)`. A
//! limsup cannot be read off finitely many terms, so the report carries the
//! running supremum together with the least-squares slope of `ln a_n` over
//! the last half of the levels, and calls the trend diverging when that
//! slope exceeds a tolerance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seq::{BaseConvex, DeltaLadder, GaugePair, QLadder, QLimit, SchrammFamily, WeightSequence};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPolicy {
    /// Every `k <= dense_cap` is scanned.
    pub dense_cap: u64,
    /// Geometric points per power of two past `dense_cap`.
    pub per_binade: u32,
    /// Slope of `ln a_n` per level above which the trend is diverging.
    pub slope_tol: f64,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        Self {
            dense_cap: 1 << 20,
            per_binade: 64,
            slope_tol: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedUpToHorizon,
    DivergingTrend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionKind {
    LambdaGamma,
    CorollaryQ,
    Schramm,
    PhiLambda,
    UnionP,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelValue<T = f64> {
    pub n: usize,
    pub q_n: f64,
    pub delta_n: u64,
    pub a_n: T,
    pub argmax_k: u64,
    pub running_sup: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport<T = f64> {
    pub criterion: CriterionKind,
    pub levels: Vec<LevelValue<T>>,
    pub sup: T,
    pub verdict: Verdict,
    pub slope: f64,
    /// Largest `k` scanned.
    pub horizon: u64,
    /// Some level was scanned on a geometric grid rather than densely.
    pub inexact_scan: bool,
    /// Some prefix sum past the cached horizon came from the analytic tail.
    pub tail_extended: bool,
    /// The scan relied on `Γ(k)/Λ(k)` being nondecreasing instead of
    /// `p <= q_1`.
    pub second_part: bool,
}

impl<T: Real> CriterionReport<T> {
    /// Rows `n,q_n,delta_n,a_n,argmax_k,running_sup` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,q_n,delta_n,a_n,argmax_k,running_sup\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                l.n, l.q_n, l.delta_n, l.a_n, l.argmax_k, l.running_sup
            ));
        }
        out
    }
}

/// Sorted distinct `k` values scanned for levels up to `deltas.last()`.
pub fn scan_points(deltas: &[u64], policy: &ScanPolicy) -> Vec<u64> {
    let top = deltas.iter().copied().max().unwrap_or(1);
    let dense = top.min(policy.dense_cap.max(1));
    let mut pts: Vec<u64> = (1..=dense).collect();
    if top > dense {
        let step = 1.0 / policy.per_binade.max(1) as f64;
        let mut e = (dense as f64).log2();
        let stop = (top as f64).log2();
        while e < stop {
            let k = 2f64.powf(e).round() as u64;
            if k > dense && k < top {
                pts.push(k);
            }
            e += step;
        }
        pts.extend(deltas.iter().copied().filter(|&d| d > dense));
        pts.sort_unstable();
        pts.dedup();
    }
    pts
}

/// Scan of `A(k)^{1/q_n} · B(k)` given `(A, B)` at every scan point.
fn scan<T: Real>(
    criterion: CriterionKind,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
    factors: impl Fn(u64) -> Result<(T, T)> + Sync,
) -> Result<CriterionReport<T>> {
    if n_cap == 0 || n_cap > gauge.n_max {
        return Err(Error::InvalidGauge(format!(
            "n_cap = {n_cap} must lie in 1..={}",
            gauge.n_max
        )));
    }
    let deltas: Vec<u64> = (1..=n_cap).map(|n| gauge.delta_n(n)).collect();
    let pts = scan_points(&deltas, policy);
    let vals: Vec<(T, T)> = pts.par_iter().map(|&k| factors(k)).collect::<Result<_>>()?;

    let raw: Vec<(T, u64)> = (1..=n_cap)
        .into_par_iter()
        .map(|n| {
            let inv_q = T::lit(gauge.q_n(n).recip());
            let d = deltas[n - 1];
            let mut best = (T::neg_infinity(), 1);
            for (&k, &(a, b)) in pts.iter().zip(&vals) {
                if k > d {
                    break;
                }
                let v = a.powf(inv_q) * b;
                if v > best.0 {
                    best = (v, k);
                }
            }
            best
        })
        .collect();

    let mut levels = Vec::with_capacity(n_cap);
    let mut sup = T::neg_infinity();
    for (i, &(a_n, k)) in raw.iter().enumerate() {
        sup = sup.max(a_n);
        levels.push(LevelValue {
            n: i + 1,
            q_n: gauge.q_n(i + 1),
            delta_n: deltas[i],
            a_n,
            argmax_k: k,
            running_sup: sup,
        });
    }
    let slope = trend_slope(&levels);
    let verdict = if slope > policy.slope_tol {
        Verdict::DivergingTrend
    } else {
        Verdict::BoundedUpToHorizon
    };
    let horizon = *pts.last().expect("k = 1 is always scanned");
    Ok(CriterionReport {
        criterion,
        levels,
        sup,
        verdict,
        slope,
        horizon,
        inexact_scan: deltas.iter().any(|&d| d > policy.dense_cap),
        tail_extended: false,
        second_part: false,
    })
}

/// Least-squares slope of `ln a_n` against `n` over the last half of the
/// levels (0 with fewer than two points).
fn trend_slope<T: Real>(levels: &[LevelValue<T>]) -> f64 {
    let tail = &levels[levels.len() / 2..];
    if tail.len() < 2 {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .map(|l| (l.n as f64, l.a_n.as_f64().ln()))
        .collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// First `k` at which `Γ(k)/Λ(k)` decreases, scanning the same points the
/// criterion uses.
fn ratio_drop<T: Real>(
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    pts: &[u64],
) -> Option<u64> {
    let tol = T::lit(1e-12);
    let mut prev = T::zero();
    for &k in pts {
        let r = gamma.growth(k) / lambda.growth(k);
        if r < prev * (T::one() - tol) {
            return Some(k);
        }
        prev = r;
    }
    None
}

fn beyond_cache<T: Real>(w: &WeightSequence<T>, horizon: u64) -> bool {
    horizon > w.k_max() as u64
}

/// `a_n = max_{k<=δ_n} Γ(k)^{1/q_n} Λ(k)^{-1/p}`.
///
/// With `p > q_1` the scan is only meaningful when `Γ(k)/Λ(k)` is
/// nondecreasing; that is checked over the scanned range and a violation is
/// reported with the first offending `k`.
pub fn criterion_lambda_gamma<T: Real>(
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    p: f64,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    lambda_gamma(CriterionKind::LambdaGamma, lambda, gamma, p, gauge, n_cap, policy)
}

fn lambda_gamma<T: Real>(
    kind: CriterionKind,
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    p: f64,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidInput(format!("p must be finite and >= 1, got {p}")));
    }
    let second_part = p > gauge.q_n(1);
    if second_part {
        let deltas: Vec<u64> = (1..=n_cap.clamp(1, gauge.n_max)).map(|n| gauge.delta_n(n)).collect();
        if let Some(k) = ratio_drop(lambda, gamma, &scan_points(&deltas, policy)) {
            return Err(Error::Hypothesis {
                index: k,
                reason: format!(
                    "p = {p} exceeds q_1 = {} and Γ(k)/Λ(k) decreases at k = {k}",
                    gauge.q_n(1)
                ),
            });
        }
    }
    let inv_p = T::lit(-1.0 / p);
    let mut r = scan(kind, gauge, n_cap, policy, |k| {
        Ok((gamma.growth(k), lambda.growth(k).powf(inv_p)))
    })?;
    r.second_part = second_part;
    r.tail_extended = beyond_cache(lambda, r.horizon) || beyond_cache(gamma, r.horizon);
    Ok(r)
}

/// `sup_n Γ(n)^{1/q} Λ(n)^{-1/p}` for `n` up to `horizon`, reported at the
/// checkpoints `n <= 2^e`.
pub fn criterion_corollary_q<T: Real>(
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    p: f64,
    q: f64,
    horizon: u64,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    if !(p >= 1.0 && p <= q && q.is_finite()) {
        return Err(Error::Hypothesis {
            index: 0,
            reason: format!("needs 1 <= p <= q < ∞, got p = {p}, q = {q}"),
        });
    }
    let horizon = horizon.max(2);
    let mut deltas = Vec::new();
    let mut d = 2u64;
    loop {
        deltas.push(d.min(horizon));
        if d >= horizon {
            break;
        }
        d = d.saturating_mul(2);
    }
    let n_cap = deltas.len();
    let gauge = GaugePair {
        q: QLadder::Constant { q },
        delta: DeltaLadder::Explicit { values: deltas },
        n_max: n_cap,
    };
    gauge.validate()?;
    lambda_gamma(CriterionKind::CorollaryQ, lambda, gamma, p, &gauge, n_cap, policy)
}

/// `a_n = max_{k<=δ_n} k^{1/q_n} Φ_k^{-1}(1)` with `Φ_k^{-1}` found by
/// bisection.
pub fn criterion_schramm<T: Real>(
    family: &SchrammFamily<T>,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    let mut r = scan(CriterionKind::Schramm, gauge, n_cap, policy, |k| {
        Ok((T::from_u64_lossy(k), family.partial_inverse(k, T::one())?))
    })?;
    r.tail_extended = family
        .separable()
        .is_some_and(|(_, w)| beyond_cache(w, r.horizon));
    Ok(r)
}

/// `a_n = max_{k<=δ_n} k^{1/q_n} φ^{-1}(1/Λ(k))` in closed form.
///
/// The attaining points and the endpoints of every level are re-evaluated
/// through the bisection route of [`criterion_schramm`] on the family
/// `φ(x)/λ_j`; a relative disagreement above `1e-9` is an error.
pub fn criterion_phi_lambda<T: Real>(
    base: &BaseConvex,
    weights: &WeightSequence<T>,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    let mut r = scan(CriterionKind::PhiLambda, gauge, n_cap, policy, |k| {
        Ok((T::from_u64_lossy(k), base.inverse(weights.growth(k).recip())))
    })?;
    r.tail_extended = beyond_cache(weights, r.horizon);

    let family = SchrammFamily::scaled(base.clone(), weights.clone())?;
    let mut checks: Vec<u64> = vec![1];
    for l in &r.levels {
        checks.push(l.argmax_k);
        checks.push(l.delta_n);
    }
    checks.sort_unstable();
    checks.dedup();
    for k in checks {
        let closed = base.inverse(weights.growth(k).recip());
        let bisected = family.partial_inverse(k, T::one())?;
        let scale = closed.abs().max(bisected.abs()).max(T::min_positive_value());
        if ((closed - bisected) / scale).abs() > T::lit(1e-9) {
            return Err(Error::Consistency(format!(
                "φ^{{-1}}(1/Λ({k})) = {closed} but Φ_k^{{-1}}(1) = {bisected}"
            )));
        }
    }
    Ok(r)
}

/// The Λ = Γ instance of [`criterion_lambda_gamma`] for `p < q`.
pub fn criterion_union_p<T: Real>(
    weights: &WeightSequence<T>,
    p: f64,
    gauge: &GaugePair,
    n_cap: usize,
    policy: &ScanPolicy,
) -> Result<CriterionReport<T>> {
    let below = match gauge.q_limit() {
        QLimit::Finite(q) => p < q,
        QLimit::Infinite => true,
    };
    if !(p >= 1.0 && below) {
        return Err(Error::Hypothesis {
            index: 0,
            reason: format!("needs 1 <= p < q, got p = {p} with q = {:?}", gauge.q_limit()),
        });
    }
    lambda_gamma(CriterionKind::UnionP, weights, weights, p, gauge, n_cap, policy)
}
