//! Numeric and exact checks of the master rearrangement inequality and the
//! comparison estimates built on it, plus seeded randomized suites.
//!
//! The master inequality for positive nonincreasing `x, y, z` and `q ≥ 1`:
//!
//! ```text
//! (Σ x_j^q z_j)^{1/q} ≤ Σ x_j y_j · max_k (Σ_{j≤k} z_j)^{1/q} / Σ_{j≤k} y_j
//! ```

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{csum, Exact, Real};
use crate::seq::{BaseConvex, SchrammFamily, WeightKind, WeightSequence};

/// Relative slack used by every floating point check.
pub const SLACK: f64 = 1e-9;

/// Constant in the Schramm-family power estimate.
pub const WU_CONSTANT: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSample<T: Real = f64> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub z: Vec<T>,
    pub q: T,
}

fn check_positive_nonincreasing<T: Real>(name: &str, v: &[T]) -> Result<()> {
    for (j, &a) in v.iter().enumerate() {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("{name}[{}] = {a} is not positive", j + 1)));
        }
        if j > 0 && a > v[j - 1] {
            return Err(Error::InvalidInput(format!("{name} increases at index {}", j + 1)));
        }
    }
    Ok(())
}

fn check_nonincreasing<T: Real>(name: &str, v: &[T]) -> Result<()> {
    for (j, &a) in v.iter().enumerate() {
        if a < T::zero() || !a.is_finite() {
            return Err(Error::InvalidInput(format!("{name}[{}] = {a} is negative", j + 1)));
        }
        if j > 0 && a > v[j - 1] {
            return Err(Error::InvalidInput(format!("{name} increases at index {}", j + 1)));
        }
    }
    Ok(())
}

impl<T: Real> TripleSample<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, z: Vec<T>, q: T) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() || x.len() != z.len() {
            return Err(Error::InvalidInput(format!(
                "vectors must be nonempty and of equal length, got {}, {}, {}",
                x.len(),
                y.len(),
                z.len()
            )));
        }
        if !(q >= T::one()) || !q.is_finite() {
            return Err(Error::InvalidInput(format!("q = {q} must be finite and at least 1")));
        }
        check_positive_nonincreasing("x", &x)?;
        check_positive_nonincreasing("y", &y)?;
        check_positive_nonincreasing("z", &z)?;
        Ok(Self { x, y, z, q })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// Outcome of a single floating point inequality check `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Check<T = f64> {
    pub lhs: T,
    pub rhs: T,
    pub ok: bool,
}

impl<T: Real> Check<T> {
    fn new(lhs: T, rhs: T) -> Self {
        let ok = lhs <= rhs * (T::one() + T::lit(SLACK));
        Self { lhs, rhs, ok }
    }

    /// `lhs / rhs`, with `0/0` read as 0.
    pub fn ratio(&self) -> T {
        if self.rhs == T::zero() {
            if self.lhs == T::zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// `max_k (Σ_{j≤k} z_j) / (Σ_{j≤k} y_j)^q` and the smallest maximizing `k`.
pub fn extremal_closed_form<T: Real>(y: &[T], z: &[T], q: T) -> (T, usize) {
    let mut sy = T::zero();
    let mut sz = T::zero();
    let mut best = (T::neg_infinity(), 0);
    for k in 0..y.len() {
        sy = sy + y[k];
        sz = sz + z[k];
        let v = sz / sy.powf(q);
        if v > best.0 {
            best = (v, k + 1);
        }
    }
    best
}

pub fn check_master_inequality<T: Real>(s: &TripleSample<T>) -> Check<T> {
    let inv_q = T::one() / s.q;
    let lhs = csum(s.x.iter().zip(&s.z).map(|(&x, &z)| x.powf(s.q) * z)).powf(inv_q);
    let mass = csum(s.x.iter().zip(&s.y).map(|(&x, &y)| x * y));
    let (kernel, _) = extremal_closed_form(&s.y, &s.z, s.q);
    Check::new(lhs, mass * kernel.powf(inv_q))
}

/// Exact comparison of q-th powers for integer `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCheck<E> {
    pub lhs_pow: E,
    pub rhs_pow: E,
    pub ok: bool,
}

pub fn check_master_exact<E: Exact>(x: &[E], y: &[E], z: &[E], q: u32) -> Result<ExactCheck<E>> {
    let n = x.len();
    if n == 0 || y.len() != n || z.len() != n || q == 0 {
        return Err(Error::InvalidInput("exact check needs equal nonempty vectors and q ≥ 1".into()));
    }
    let lhs_pow: E = x.iter().zip(z).map(|(a, c)| a.powu(q) * c.clone()).sum();
    let mass: E = x.iter().zip(y).map(|(a, b)| a.clone() * b.clone()).sum();
    let mut sy = E::zero();
    let mut sz = E::zero();
    let mut kernel: Option<E> = None;
    for k in 0..n {
        sy = sy + y[k].clone();
        sz = sz + z[k].clone();
        let v = sz.clone() / sy.powu(q);
        if kernel.as_ref().map_or(true, |b| v > *b) {
            kernel = Some(v);
        }
    }
    let rhs_pow = mass.powu(q) * kernel.expect("n ≥ 1");
    let ok = lhs_pow <= rhs_pow;
    Ok(ExactCheck { lhs_pow, rhs_pow, ok })
}

/// Converts a float sample to rationals; `None` if `q` is not an integer.
pub fn exact_sample(s: &TripleSample<f64>) -> Option<(Vec<BigRational>, Vec<BigRational>, Vec<BigRational>, u32)> {
    if s.q.fract() != 0.0 || s.q > u32::MAX as f64 {
        return None;
    }
    let conv = |v: &[f64]| v.iter().map(|&a| BigRational::from_f64_exact(a)).collect::<Option<Vec<_>>>();
    Some((conv(&s.x)?, conv(&s.y)?, conv(&s.z)?, s.q as u32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalResult<T = f64> {
    pub closed_form: T,
    pub closed_k: usize,
    pub grid_max: T,
    /// Best grid point, as the vector `x`.
    pub argmax: Vec<T>,
    /// `k` when the best grid point is the block vector on `1..=k`.
    pub argmax_block: Option<usize>,
    pub resolution: usize,
    pub points: u64,
}

impl<T: Real> ExtremalResult<T> {
    pub fn gap(&self) -> T {
        self.closed_form - self.grid_max
    }
}

/// Maximizes `Σ x_j^q z_j` over nonincreasing `x ≥ 0` with `Σ x_j y_j = 1`
/// on a grid. Such `x` are exactly the convex combinations
/// `x = Σ_k θ_k · 1_{j≤k} / Y_k` with `Y_k = Σ_{j≤k} y_j`; the grid takes
/// `θ_k ∈ {0, 1/D, …, 1}`.
pub fn extremal_profile<T: Real>(y: &[T], z: &[T], q: T, resolution: usize) -> Result<ExtremalResult<T>> {
    let n = y.len();
    if n == 0 || z.len() != n {
        return Err(Error::InvalidInput("y and z must be nonempty and of equal length".into()));
    }
    if resolution == 0 {
        return Err(Error::InvalidInput("grid resolution must be positive".into()));
    }
    check_positive_nonincreasing("y", y)?;
    check_positive_nonincreasing("z", z)?;
    let mut prefix = Vec::with_capacity(n);
    let mut acc = T::zero();
    for &v in y {
        acc = acc + v;
        prefix.push(acc);
    }
    let d = T::from_usize_lossy(resolution);

    struct Walk<'a, T> {
        z: &'a [T],
        prefix: &'a [T],
        q: T,
        d: T,
        counts: Vec<usize>,
        best: T,
        best_counts: Vec<usize>,
        points: u64,
    }

    impl<T: Real> Walk<'_, T> {
        fn shape(&self, counts: &[usize]) -> Vec<T> {
            let n = counts.len();
            let mut x = vec![T::zero(); n];
            let mut tail = T::zero();
            for k in (0..n).rev() {
                tail = tail + T::from_usize_lossy(counts[k]) / self.d / self.prefix[k];
                x[k] = tail;
            }
            x
        }

        fn rec(&mut self, k: usize, left: usize) {
            let n = self.counts.len();
            if k + 1 == n {
                self.counts[k] = left;
                self.points += 1;
                let x = self.shape(&self.counts);
                let v = csum(x.iter().zip(self.z).map(|(&a, &c)| a.powf(self.q) * c));
                if v > self.best {
                    self.best = v;
                    self.best_counts = self.counts.clone();
                }
                return;
            }
            for c in (0..=left).rev() {
                self.counts[k] = c;
                self.rec(k + 1, left - c);
            }
        }
    }

    let mut walk = Walk {
        z,
        prefix: &prefix,
        q,
        d,
        counts: vec![0; n],
        best: T::neg_infinity(),
        best_counts: Vec::new(),
        points: 0,
    };
    walk.rec(0, resolution);
    let argmax = walk.shape(&walk.best_counts);
    let argmax_block = {
        let nz: Vec<usize> = (0..n).filter(|&k| walk.best_counts[k] > 0).collect();
        (nz.len() == 1).then(|| nz[0] + 1)
    };
    let (closed_form, closed_k) = extremal_closed_form(y, z, q);
    Ok(ExtremalResult {
        closed_form,
        closed_k,
        grid_max: walk.best,
        argmax,
        argmax_block,
        resolution,
        points: walk.points,
    })
}

/// Smallest `k ≤ len` with `Γ(k) > C·Λ(k)`, if any.
fn prefix_violation<T: Real>(lambda: &WeightSequence<T>, gamma: &WeightSequence<T>, c: T, len: usize) -> Option<u64> {
    (1..=len as u64).find(|&k| gamma.growth(k) > c * lambda.growth(k) * (T::one() + T::lit(SLACK)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonCheck<T = f64> {
    pub lhs: T,
    pub rhs: T,
    /// The same estimate read off the master inequality with `q = 1`.
    pub master: Check<T>,
    pub ok: bool,
}

/// `Σ a_j/γ_j ≤ C Σ a_j/λ_j` for nonincreasing `a ≥ 0`, given
/// `Γ(k) ≤ C Λ(k)` for every `k ≤ len(a)`.
pub fn check_weighted_comparison<T: Real>(
    a: &[T],
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    c: T,
) -> Result<ComparisonCheck<T>> {
    check_nonincreasing("a", a)?;
    if !(c > T::zero()) {
        return Err(Error::InvalidInput(format!("comparison constant {c} must be positive")));
    }
    if let Some(k) = prefix_violation(lambda, gamma, c, a.len()) {
        return Err(Error::Hypothesis {
            index: k,
            reason: format!("Γ({k}) exceeds C·Λ({k}) with C = {c}"),
        });
    }
    let lhs = csum(a.iter().enumerate().map(|(j, &v)| v * gamma.reciprocal(j as u64 + 1)));
    let rhs = c * csum(a.iter().enumerate().map(|(j, &v)| v * lambda.reciprocal(j as u64 + 1)));
    let support = a.iter().take_while(|&&v| v > T::zero()).count();
    let master = if support == 0 {
        Check::new(T::zero(), T::zero())
    } else {
        let x = a[..support].to_vec();
        let y = (1..=support as u64).map(|j| lambda.reciprocal(j)).collect();
        let z = (1..=support as u64).map(|j| gamma.reciprocal(j)).collect();
        check_master_inequality(&TripleSample::new(x, y, z, T::one())?)
    };
    let ok = Check::new(lhs, rhs).ok && master.ok && Check::new(master.rhs, rhs).ok;
    Ok(ComparisonCheck { lhs, rhs, master, ok })
}

/// `Σ_{j≤s} x_j^{q_n}/γ_j ≤ (Σ_{j≤s} x_j^p/λ_j)^{q_n/p} · max_{k≤s} Γ(k) Λ(k)^{-q_n/p}`
/// for `q_n < p`, where `s = len(x)` and `Γ/Λ` is nondecreasing on `1..=s`.
pub fn check_holder_branch<T: Real>(
    x: &[T],
    lambda: &WeightSequence<T>,
    gamma: &WeightSequence<T>,
    p: T,
    q_n: T,
) -> Result<Check<T>> {
    check_nonincreasing("x", x)?;
    if !(q_n >= T::one() && q_n < p) {
        return Err(Error::InvalidInput(format!("need 1 ≤ q_n < p, got q_n = {q_n}, p = {p}")));
    }
    let s = x.len() as u64;
    let mut prev = T::zero();
    for k in 1..=s {
        let r = gamma.growth(k) / lambda.growth(k);
        if r < prev * (T::one() - T::lit(1e-12)) {
            return Err(Error::Hypothesis {
                index: k,
                reason: format!("Γ/Λ decreases at {k}"),
            });
        }
        prev = r;
    }
    let e = q_n / p;
    let lhs = csum(x.iter().enumerate().map(|(j, &v)| v.powf(q_n) * gamma.reciprocal(j as u64 + 1)));
    let base = csum(x.iter().enumerate().map(|(j, &v)| v.powf(p) * lambda.reciprocal(j as u64 + 1)));
    let kernel = (1..=s)
        .map(|k| gamma.growth(k) * lambda.growth(k).powf(-e))
        .fold(T::zero(), T::max);
    Ok(Check::new(lhs, base.powf(e) * kernel))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WuCheck<T = f64> {
    pub lhs: T,
    /// `max_k k^{1/q} Φ_k^{-1}(V)`.
    pub kernel: T,
    pub rhs: T,
    /// `lhs / kernel`.
    pub ratio: T,
    pub ok: bool,
}

/// `(Σ x_j^q)^{1/q} ≤ 16 max_k k^{1/q} Φ_k^{-1}(V)` with `V = Σ φ_j(x_j)`.
pub fn check_wu_estimate<T: Real>(x: &[T], family: &SchrammFamily<T>, q: T) -> Result<WuCheck<T>> {
    check_nonincreasing("x", x)?;
    if !(q >= T::one()) || !q.is_finite() {
        return Err(Error::InvalidInput(format!("q = {q} must be finite and at least 1")));
    }
    let inv_q = T::one() / q;
    let lhs = csum(x.iter().map(|&v| v.powf(q))).powf(inv_q);
    let v = csum(x.iter().enumerate().map(|(j, &a)| family.phi(j as u64 + 1, a)));
    let mut kernel = T::zero();
    for k in 1..=x.len() as u64 {
        let t = T::from_u64_lossy(k).powf(inv_q) * family.partial_inverse(k, v)?;
        kernel = kernel.max(t);
    }
    let rhs = T::lit(WU_CONSTANT) * kernel;
    let ratio = if kernel > T::zero() { lhs / kernel } else { T::zero() };
    Ok(WuCheck {
        lhs,
        kernel,
        rhs,
        ratio,
        ok: lhs <= rhs * (T::one() + T::lit(SLACK)),
    })
}

// ---------------------------------------------------------------------------
// Seeded suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Master,
    Extremal,
    Weighted,
    Holder,
    Wu,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: SuiteKind,
    pub seed: u64,
    /// Samples per group (families per group for the extremal suite).
    pub samples: usize,
    #[serde(default)]
    pub qs: Vec<f64>,
    pub n_max: usize,
    /// Coarse and refined grid resolutions (extremal suite only).
    #[serde(default)]
    pub grids: Vec<usize>,
    /// Largest length with an additional exact-rational check (master suite).
    #[serde(default)]
    pub exact_n_max: usize,
}

impl SuiteConfig {
    pub fn defaults(suite: SuiteKind) -> Self {
        let base = Self {
            suite,
            seed: 7,
            samples: 10_000,
            qs: Vec::new(),
            n_max: 64,
            grids: Vec::new(),
            exact_n_max: 0,
        };
        match suite {
            SuiteKind::Master => Self {
                qs: vec![1.0, 1.5, 2.0, 3.0, 10.0],
                exact_n_max: 8,
                ..base
            },
            SuiteKind::Extremal => Self {
                samples: 20,
                qs: vec![1.0, 2.0],
                n_max: 5,
                grids: vec![40, 80],
                ..base
            },
            SuiteKind::Wu => Self {
                qs: vec![1.0, 1.5, 2.0, 3.0],
                ..base
            },
            SuiteKind::Weighted | SuiteKind::Holder => base,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 || self.n_max == 0 {
            return Err(Error::InvalidInput("samples and n_max must be positive".into()));
        }
        if self.qs.iter().any(|&q| !(q >= 1.0) || !q.is_finite()) {
            return Err(Error::InvalidInput("every q must be finite and at least 1".into()));
        }
        match self.suite {
            SuiteKind::Master | SuiteKind::Extremal | SuiteKind::Wu if self.qs.is_empty() => {
                Err(Error::InvalidInput("this suite needs a nonempty q list".into()))
            }
            SuiteKind::Extremal if self.grids.is_empty() || self.grids.contains(&0) => {
                Err(Error::InvalidInput("extremal suite needs positive grid resolutions".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ExactTally {
    pub checked: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: String,
    pub samples: usize,
    pub failures: usize,
    /// What `worst` measures.
    pub metric: String,
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactTally>,
    /// Per-resolution worst gap (extremal suite).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gaps: Vec<f64>,
    /// Index named by the hypothesis error of a rejected family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected_at: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub groups: Vec<GroupSummary>,
    pub failures: usize,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn stream_rng(seed: u64, group: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((group as u64) << 32) | sample as u64);
    rng
}

/// Sorted (descending) exponentials of uniform samples on `[-spread, spread]`.
pub fn monotone_vector(rng: &mut impl Rng, n: usize, spread: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..=spread).exp()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

struct Outcome {
    failed: bool,
    metric: f64,
    witness: Witness,
    exact: Option<bool>,
}

fn summarize(label: String, metric: &str, outcomes: Vec<Outcome>) -> GroupSummary {
    let samples = outcomes.len();
    let failures = outcomes.iter().filter(|o| o.failed || o.exact == Some(false)).count();
    let mut exact = ExactTally::default();
    let mut worst: Option<&Outcome> = None;
    for o in &outcomes {
        if let Some(ok) = o.exact {
            exact.checked += 1;
            exact.failures += usize::from(!ok);
        }
        if worst.map_or(true, |w| o.metric > w.metric) {
            worst = Some(o);
        }
    }
    GroupSummary {
        label,
        samples,
        failures,
        metric: metric.to_string(),
        worst: worst.map_or(0.0, |w| w.metric),
        witness: worst.map(|w| w.witness.clone()),
        exact: (exact.checked > 0).then_some(exact),
        gaps: Vec::new(),
        rejected_at: None,
    }
}

fn master_group(cfg: &SuiteConfig, g: usize, q: f64) -> GroupSummary {
    let outcomes = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, g, i);
            let n = rng.gen_range(1..=cfg.n_max);
            let s = TripleSample::new(
                monotone_vector(&mut rng, n, 3.0),
                monotone_vector(&mut rng, n, 3.0),
                monotone_vector(&mut rng, n, 3.0),
                q,
            )
            .expect("generated sample is valid");
            let c = check_master_inequality(&s);
            let exact = (n <= cfg.exact_n_max)
                .then(|| exact_sample(&s))
                .flatten()
                .map(|(x, y, z, qi)| check_master_exact(&x, &y, &z, qi).map_or(false, |e| e.ok));
            Outcome {
                failed: !c.ok,
                metric: c.ratio(),
                witness: Witness { index: i, x: s.x, y: s.y, z: s.z, q: Some(q) },
                exact,
            }
        })
        .collect();
    summarize(format!("q={q}"), "lhs/rhs", outcomes)
}

fn extremal_group(cfg: &SuiteConfig, q: f64, n: usize) -> GroupSummary {
    let grid_tol = 0.02;
    let per_family: Vec<(Outcome, Vec<f64>)> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            // Same (y, z) family for every (q, n): prefixes of one draw.
            let mut rng = stream_rng(cfg.seed, 0, i);
            let y = monotone_vector(&mut rng, cfg.n_max, 2.0);
            let z = monotone_vector(&mut rng, cfg.n_max, 2.0);
            let (y, z) = (y[..n].to_vec(), z[..n].to_vec());
            let runs: Vec<ExtremalResult> = cfg
                .grids
                .iter()
                .map(|&d| extremal_profile(&y, &z, q, d).expect("valid family"))
                .collect();
            let gaps: Vec<f64> = runs.iter().map(|r| r.gap() / r.closed_form).collect();
            let above = runs.iter().any(|r| r.grid_max > r.closed_form * (1.0 + grid_tol));
            let tightening = gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            let failed = above || !tightening || gaps.last().map_or(true, |&gap| gap > grid_tol);
            let best = runs.last().expect("nonempty grids");
            let o = Outcome {
                failed,
                metric: gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                witness: Witness { index: i, x: best.argmax.clone(), y, z, q: Some(q) },
                exact: None,
            };
            (o, gaps)
        })
        .collect();
    let mut worst_gaps = vec![f64::NEG_INFINITY; cfg.grids.len()];
    for (_, gaps) in &per_family {
        for (w, &g) in worst_gaps.iter_mut().zip(gaps) {
            *w = w.max(g);
        }
    }
    let mut s = summarize(
        format!("q={q} n={n}"),
        "relative gap (closed form - grid max)",
        per_family.into_iter().map(|(o, _)| o).collect(),
    );
    s.gaps = worst_gaps;
    s
}

fn weighted_group(cfg: &SuiteConfig, g: usize, lambda: &WeightSequence, gamma: &WeightSequence, label: &str) -> GroupSummary {
    let c = (1..=cfg.n_max as u64)
        .map(|k| gamma.growth(k) / lambda.growth(k))
        .fold(0.0, f64::max);
    let outcomes = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, g, i);
            let n = rng.gen_range(1..=cfg.n_max);
            let mut a = monotone_vector(&mut rng, n, 3.0);
            if rng.gen_bool(0.3) {
                let cut = rng.gen_range(0..n);
                a[cut..].iter_mut().for_each(|v| *v = 0.0);
            }
            let r = check_weighted_comparison(&a, lambda, gamma, c);
            let (failed, metric) = match &r {
                Ok(r) => (!r.ok, if r.rhs > 0.0 { r.lhs / r.rhs } else { 0.0 }),
                Err(_) => (true, f64::INFINITY),
            };
            Outcome {
                failed,
                metric,
                witness: Witness { index: i, x: a, y: Vec::new(), z: Vec::new(), q: None },
                exact: None,
            }
        })
        .collect();
    summarize(format!("{label} C={c}"), "lhs/rhs", outcomes)
}

fn holder_group(
    cfg: &SuiteConfig,
    g: usize,
    lambda: &WeightSequence,
    gamma: &WeightSequence,
    p: f64,
    q_n: f64,
    label: &str,
) -> GroupSummary {
    let outcomes = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, g, i);
            let n = rng.gen_range(1..=cfg.n_max);
            let x = monotone_vector(&mut rng, n, 3.0);
            let (failed, metric) = match check_holder_branch(&x, lambda, gamma, p, q_n) {
                Ok(c) => (!c.ok, c.ratio()),
                Err(_) => (true, f64::INFINITY),
            };
            Outcome {
                failed,
                metric,
                witness: Witness { index: i, x, y: Vec::new(), z: Vec::new(), q: Some(q_n) },
                exact: None,
            }
        })
        .collect();
    summarize(format!("{label} p={p} q_n={q_n}"), "lhs/rhs", outcomes)
}

fn wu_group(cfg: &SuiteConfig, g: usize, family: &SchrammFamily, label: &str) -> GroupSummary {
    let qs = &cfg.qs;
    let outcomes = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(cfg.seed, g, i);
            let n = rng.gen_range(1..=cfg.n_max);
            let q = qs[rng.gen_range(0..qs.len())];
            let x = monotone_vector(&mut rng, n, 3.0);
            let (failed, metric) = match check_wu_estimate(&x, family, q) {
                Ok(c) => (!c.ok, c.ratio),
                Err(_) => (true, f64::INFINITY),
            };
            Outcome {
                failed,
                metric,
                witness: Witness { index: i, x, y: Vec::new(), z: Vec::new(), q: Some(q) },
                exact: None,
            }
        })
        .collect();
    summarize(label.to_string(), "lhs / max_k k^(1/q) inverse(k, V)", outcomes)
}

fn weights(kind: WeightKind) -> WeightSequence {
    WeightSequence::new(kind).expect("built-in weights are valid")
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let harmonic = || weights(WeightKind::Harmonic);
    let constant = || weights(WeightKind::Constant { value: 1.0 });
    let sqrt = || weights(WeightKind::Power { alpha: 0.5 });
    let groups = match cfg.suite {
        SuiteKind::Master => cfg.qs.iter().enumerate().map(|(g, &q)| master_group(cfg, g, q)).collect(),
        SuiteKind::Extremal => {
            let mut out = Vec::new();
            for &q in &cfg.qs {
                for n in 1..=cfg.n_max {
                    out.push(extremal_group(cfg, q, n));
                }
            }
            out
        }
        SuiteKind::Weighted => vec![
            weighted_group(cfg, 0, &harmonic(), &constant(), "lambda=harmonic gamma=constant"),
            weighted_group(cfg, 1, &constant(), &harmonic(), "lambda=constant gamma=harmonic"),
        ],
        SuiteKind::Holder => {
            let mut out = vec![
                holder_group(cfg, 0, &harmonic(), &constant(), 2.0, 1.0, "lambda=harmonic gamma=constant"),
                holder_group(cfg, 1, &harmonic(), &harmonic(), 2.0, 1.5, "lambda=gamma=harmonic"),
                holder_group(cfg, 2, &harmonic(), &sqrt(), 3.0, 2.0, "lambda=harmonic gamma=power(0.5)"),
            ];
            for (lambda, gamma, label) in [
                (constant(), harmonic(), "lambda=constant gamma=harmonic"),
                (sqrt(), harmonic(), "lambda=power(0.5) gamma=harmonic"),
            ] {
                let x = vec![1.0; cfg.n_max];
                let rejected_at = match check_holder_branch(&x, &lambda, &gamma, 2.0, 1.0) {
                    Err(Error::Hypothesis { index, .. }) => Some(index),
                    _ => None,
                };
                out.push(GroupSummary {
                    label: format!("{label} (expected rejection)"),
                    samples: 1,
                    failures: usize::from(rejected_at.is_none()),
                    metric: "rejected index".into(),
                    worst: rejected_at.map_or(f64::NAN, |k| k as f64),
                    witness: None,
                    exact: None,
                    gaps: Vec::new(),
                    rejected_at,
                });
            }
            out
        }
        SuiteKind::Wu => {
            let families = [
                (SchrammFamily::scaled(BaseConvex::Power(2.0), harmonic())?, "phi_j(x)=x^2/j"),
                (SchrammFamily::scaled(BaseConvex::Power(1.5), sqrt())?, "phi_j(x)=x^1.5/sqrt(j)"),
                (SchrammFamily::scaled(BaseConvex::ExpM1, harmonic())?, "phi_j(x)=(e^x-1)/j"),
            ];
            families
                .iter()
                .enumerate()
                .map(|(g, (fam, label))| wu_group(cfg, g, fam, label))
                .collect()
        }
    };
    let groups: Vec<GroupSummary> = groups;
    let failures = groups.iter().map(|g| g.failures).sum();
    Ok(SuiteReport {
        config: cfg.clone(),
        groups,
        failures,
    })
}
