//! Plateau-train witnesses for the necessity direction of the embedding
//! theorems.
//!
//! Given a sequence setting whose criterion kernel exceeds `blow_n` at some
//! `r_n <= δ_n` on every level, level `n` of the witness is a train of `t_n`
//! plateaus of width `1/δ_n` and height `h_n` starting at `2^-n`. The source
//! variation of the sum stays below `Σ 2ε_n`, while the `2t_n - 1` cells at
//! level `n` push the target variation to at least
//! `ε_n (ε_n/2)^{1/q_n} blow_n`. Every step of that chain is re-checked
//! numerically here rather than assumed.

use serde::{Deserialize, Serialize};

use crate::criteria::{scan_points, ScanPolicy};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seq::{GaugePair, SchrammFamily, SchrammSpec, WeightKind, WeightSequence, WeightSpec};
use crate::step_fn::{generate_block, StepFunction};
use crate::variation::{gauged_levels, variation_schramm, variation_weighted, EngineConfig, Mode};

/// Finest grid a witness may use.
pub const GRID_CAP: usize = 1 << 22;

/// `scale · ratio^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricLadder {
    pub scale: f64,
    pub ratio: f64,
}

impl GeometricLadder {
    pub fn at(&self, n: usize) -> f64 {
        self.scale * self.ratio.powi(n as i32)
    }
}

/// Per-level constants of the construction: the height factor `ε_n`, the
/// separation `sep_n` that `B_n` must reach, and the violation threshold
/// `blow_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub eps: GeometricLadder,
    pub sep: GeometricLadder,
    pub blow: GeometricLadder,
}

impl Constants {
    /// `(2^-n, 2^{n+2}, 2^{4n})`.
    pub fn standard() -> Self {
        Self {
            eps: GeometricLadder { scale: 1.0, ratio: 0.5 },
            sep: GeometricLadder { scale: 4.0, ratio: 2.0 },
            blow: GeometricLadder { scale: 1.0, ratio: 16.0 },
        }
    }

    /// `(2^-n, 2^{n+2}, 4^n)`, small enough for desk-sized grids.
    pub fn mild() -> Self {
        Self {
            blow: GeometricLadder { scale: 1.0, ratio: 4.0 },
            ..Self::standard()
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Setting {
    /// Source `ΛBV^(p)`, target `ΓBV^(q_n↑q)`.
    Lambda {
        source: WeightSpec,
        target: WeightSpec,
        p: f64,
    },
    /// Source `ΦBV`, target `BV^(q_n↑q)`.
    Schramm { family: SchrammSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionInputs {
    pub setting: Setting,
    pub gauge: GaugePair,
    #[serde(default)]
    pub constants: Constants,
    pub levels: usize,
    #[serde(default)]
    pub policy: ScanPolicy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPlan<T = f64> {
    pub n: usize,
    pub q_n: f64,
    pub delta_n: u64,
    pub eps_n: f64,
    pub sep_n: f64,
    pub blow_n: f64,
    /// `γ_1 Γ(δ_n)` or `δ_n`.
    pub b_n: T,
    /// Smallest scanned index with `kernel(r_n) > blow_n`.
    pub r_n: u64,
    pub kernel_r: T,
    pub s_n: u64,
    pub t_n: u64,
    pub h_n: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec<T = f64> {
    pub inputs: ConstructionInputs,
    pub levels: Vec<LevelPlan<T>>,
    pub grid_m: usize,
}

/// Built sequences of a setting.
enum Built<T: Real> {
    Lambda {
        source: WeightSequence<T>,
        target: WeightSequence<T>,
        p: T,
    },
    Schramm {
        family: SchrammFamily<T>,
    },
}

impl<T: Real> Built<T> {
    fn new(setting: &Setting) -> Result<Self> {
        Ok(match setting {
            Setting::Lambda { source, target, p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::InvalidInput(format!("p must be >= 1, got {p}")));
                }
                Built::Lambda {
                    source: source.build()?,
                    target: target.build()?,
                    p: T::lit(*p),
                }
            }
            Setting::Schramm { family } => Built::Schramm {
                family: family.build()?,
            },
        })
    }

    /// `Φ_k^{-1}(1)` or `Λ(k)^{-1/p}`: the height profile before `ε_n`.
    fn height(&self, k: u64) -> Result<T> {
        match self {
            Built::Lambda { source, p, .. } => Ok(source.growth(k).powf(-p.recip())),
            Built::Schramm { family } => match family.partial_inverse_closed(k, T::one()) {
                Some(x) => Ok(x),
                None => family.partial_inverse(k, T::one()),
            },
        }
    }

    /// `Γ(k)` or `k`.
    fn target_growth(&self, k: u64) -> T {
        match self {
            Built::Lambda { target, .. } => target.growth(k),
            Built::Schramm { .. } => T::from_u64_lossy(k),
        }
    }

    fn kernel(&self, k: u64, q: T) -> Result<T> {
        Ok(self.target_growth(k).powf(q.recip()) * self.height(k)?)
    }

    fn separation(&self, delta: u64) -> T {
        match self {
            Built::Lambda { target, .. } => target.lambda(1) * target.growth(delta),
            Built::Schramm { .. } => T::from_u64_lossy(delta),
        }
    }

    fn target_weights(&self) -> Result<WeightSequence<T>> {
        match self {
            Built::Lambda { target, .. } => Ok(target.clone()),
            Built::Schramm { .. } => WeightSequence::constant(1.0),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Resolves `r_n, s_n, t_n, h_n` for every level and the grid resolution.
pub fn plan_construction<T: Real>(inputs: &ConstructionInputs) -> Result<ConstructionSpec<T>> {
    let built = Built::<T>::new(&inputs.setting)?;
    let n_levels = inputs.levels;
    if n_levels > inputs.gauge.n_max {
        return Err(Error::InvalidGauge(format!(
            "{n_levels} levels exceed the gauge horizon {}",
            inputs.gauge.n_max
        )));
    }
    let c = &inputs.constants;
    let mut levels = Vec::with_capacity(n_levels);
    let mut grid: u64 = 1;
    for n in 1..=n_levels {
        let q_n = inputs.gauge.q_n(n);
        let delta_n = inputs.gauge.delta_n(n);
        let (eps_n, sep_n, blow_n) = (c.eps.at(n), c.sep.at(n), c.blow.at(n));
        if !(eps_n > 0.0 && eps_n <= 0.5f64.powi(n as i32)) {
            return Err(Error::Infeasible {
                level: n,
                reason: format!("ε_n = {eps_n} must lie in (0, 2^-n] to keep levels apart"),
            });
        }
        let b_n = built.separation(delta_n);
        if b_n < T::lit(sep_n) {
            return Err(Error::Infeasible {
                level: n,
                reason: format!("B_n = {b_n} is below the separation sep_n = {sep_n}"),
            });
        }

        let q = T::lit(q_n);
        let blow = T::lit(blow_n);
        let mut found = None;
        for k in scan_points(&[delta_n], &inputs.policy) {
            let v = built.kernel(k, q)?;
            if v > blow {
                found = Some((k, v));
                break;
            }
        }
        let Some((r_n, kernel_r)) = found else {
            return Err(Error::Infeasible {
                level: n,
                reason: format!("kernel never exceeds blow_n = {blow_n} for k <= δ_n = {delta_n}"),
            });
        };

        // greatest s with 2s - 1 <= ε_n B_n
        let s_n = ((T::lit(eps_n) * b_n + T::one()) * T::lit(0.5)).floor().as_f64() as u64;
        if s_n == 0 {
            return Err(Error::Infeasible {
                level: n,
                reason: "ε_n B_n < 1 leaves no plateau".into(),
            });
        }
        let t_n = r_n.min(s_n);
        // the train must stay inside [2^-n, 2^-n+1)
        if (2 * t_n - 1) as f64 / delta_n as f64 > 0.5f64.powi(n as i32) {
            return Err(Error::Infeasible {
                level: n,
                reason: format!("{t_n} plateaus of width 1/{delta_n} overrun [2^-n, 2^-n+1)"),
            });
        }
        let h_n = T::lit(eps_n) * built.height(r_n)?;

        let pow = 1u64 << n.min(62);
        for d in [pow, delta_n] {
            grid = grid / gcd(grid, d) * d;
            if grid > GRID_CAP as u64 {
                return Err(Error::Resolution(format!(
                    "level {n} needs a grid finer than 2^22 cells"
                )));
            }
        }
        levels.push(LevelPlan {
            n,
            q_n,
            delta_n,
            eps_n,
            sep_n,
            blow_n,
            b_n,
            r_n,
            kernel_r,
            s_n,
            t_n,
            h_n,
        });
    }
    Ok(ConstructionSpec {
        inputs: inputs.clone(),
        levels,
        grid_m: grid.max(2) as usize,
    })
}

/// Sum of the level trains on the spec's grid.
pub fn build_witness<T: Real>(spec: &ConstructionSpec<T>) -> Result<StepFunction<T>> {
    let m = spec.grid_m;
    let mut f = StepFunction::zeros(m)?;
    let mut owner = vec![0usize; m + 1];
    for l in &spec.levels {
        let block = generate_block(l.n as u32, l.h_n, l.t_n, l.delta_n, m)?;
        for i in block.support() {
            if owner[i] != 0 {
                return Err(Error::Consistency(format!(
                    "levels {} and {} share sample {i}",
                    owner[i], l.n
                )));
            }
            owner[i] = l.n;
        }
        f = f.add(&block)?;
    }
    Ok(f)
}

/// Largest grid on which certificates are cross-checked by the engine.
pub const CHECK_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate<T = f64> {
    /// `2ε_n` or `2Φ_{r_n}(ε_n Φ_{r_n}^{-1}(1))` per level.
    pub bound_n: Vec<T>,
    /// Source variation of the level train alone, in closed form.
    pub block_n: Vec<T>,
    pub total: T,
    /// Engine value of the source variation when the grid is small enough.
    pub engine_value: Option<T>,
    pub engine_mode: Option<Mode>,
}

/// Certified upper bound on the source variation of the witness.
pub fn certify_membership<T: Real>(
    spec: &ConstructionSpec<T>,
    f: &StepFunction<T>,
    cfg: &EngineConfig,
) -> Result<MembershipCertificate<T>> {
    let built = Built::<T>::new(&spec.inputs.setting)?;
    let two = T::lit(2.0);
    let mut bound_n = Vec::new();
    let mut block_n = Vec::new();
    for l in &spec.levels {
        let jumps = 2 * l.t_n;
        match &built {
            Built::Lambda { source, p, .. } => {
                bound_n.push(two * T::lit(l.eps_n));
                block_n.push((l.h_n.powf(*p) * source.growth(jumps)).powf(p.recip()));
            }
            Built::Schramm { family } => {
                let inner = T::lit(l.eps_n) * built.height(l.r_n)?;
                let b = two * family.partial(l.r_n, inner);
                if b > two * T::lit(l.eps_n) * (T::one() + T::lit(1e-12)) {
                    return Err(Error::ChainFailure {
                        level: l.n,
                        detail: format!("2Φ_r(εΦ_r^-1(1)) = {b} exceeds 2ε_n"),
                    });
                }
                bound_n.push(b);
                block_n.push(family.partial(jumps, l.h_n));
            }
        }
    }
    for (l, (&b, &exact)) in spec.levels.iter().zip(bound_n.iter().zip(&block_n)) {
        if exact > b * (T::one() + T::lit(1e-9)) {
            return Err(Error::ChainFailure {
                level: l.n,
                detail: format!("level train variation {exact} exceeds its bound {b}"),
            });
        }
    }
    let total: T = bound_n.iter().copied().sum();

    let (mut engine_value, mut engine_mode) = (None, None);
    if f.m() <= CHECK_CAP {
        let r = match &built {
            Built::Lambda { source, p, .. } => variation_weighted(f, source, *p, cfg)?,
            Built::Schramm { family } => variation_schramm(f, family, cfg)?,
        };
        // `lower` is realised by a witness, so it can never honestly exceed
        // a valid upper bound
        if r.lower > total * (T::one() + T::lit(1e-9)) {
            return Err(Error::Consistency(format!(
                "source variation {} exceeds the certified bound {total}",
                r.lower
            )));
        }
        engine_value = Some(r.value);
        engine_mode = Some(r.mode);
    }
    Ok(MembershipCertificate {
        bound_n,
        block_n,
        total,
        engine_value,
        engine_mode,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupLevel<T = f64> {
    pub n: usize,
    pub r_n: u64,
    pub s_n: u64,
    pub t_n: u64,
    pub h_n: T,
    /// `(Σ_{j<2t_n} |f(I_j)|^{q_n} / γ_j)^{1/q_n}` over the level cells.
    pub l_n: T,
    /// `Γ(2t_n - 1)` (or `2t_n - 1`) against `(ε_n/2) Γ(r_n)`.
    pub second_step: (T, T),
    /// `ε_n (ε_n/2)^{1/q_n} blow_n`.
    pub chain_target: T,
    /// Engine value of the level-`n` constrained variation when the grid is
    /// small enough.
    pub engine_value: Option<T>,
}

/// Per-level lower bounds on the target variation of the witness.
pub fn certify_blowup<T: Real>(
    spec: &ConstructionSpec<T>,
    f: &StepFunction<T>,
    cfg: &EngineConfig,
) -> Result<Vec<BlowupLevel<T>>> {
    let built = Built::<T>::new(&spec.inputs.setting)?;
    let weights = built.target_weights()?;
    let m = f.m();
    let tol = T::lit(1e-9);
    let engine = if m <= CHECK_CAP && !spec.levels.is_empty() {
        Some(gauged_levels(f, &weights, &spec.inputs.gauge, spec.levels.len(), cfg)?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(spec.levels.len());
    for (i, l) in spec.levels.iter().enumerate() {
        let q = T::lit(l.q_n);
        let eps = T::lit(l.eps_n);
        let half_eps = eps * T::lit(0.5);
        let offset = m >> l.n;
        let cell = m / l.delta_n as usize;
        let count = (2 * l.t_n - 1) as usize;
        let mut incs: Vec<T> = (0..count)
            .map(|j| f.increment(offset + j * cell, offset + (j + 1) * cell))
            .collect::<Result<_>>()?;
        incs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let sum: T = incs
            .iter()
            .enumerate()
            .map(|(j, &x)| x.powf(q) * weights.reciprocal(j as u64 + 1))
            .sum();
        let l_n = sum.powf(q.recip());

        let closed = built.target_growth(count as u64).powf(q.recip()) * l.h_n;
        if (l_n - closed).abs() > tol * closed {
            return Err(Error::Consistency(format!(
                "level {} cells give {l_n}, closed form {closed}",
                l.n
            )));
        }

        let lhs = built.target_growth(count as u64);
        let rhs = half_eps * built.target_growth(l.r_n);
        if lhs < rhs * (T::one() - tol) {
            return Err(Error::ChainFailure {
                level: l.n,
                detail: format!("Γ(2t-1) = {lhs} < (ε/2)Γ(r) = {rhs}"),
            });
        }
        let via_kernel = eps * half_eps.powf(q.recip()) * l.kernel_r;
        if l_n < via_kernel * (T::one() - tol) {
            return Err(Error::ChainFailure {
                level: l.n,
                detail: format!("L_n = {l_n} < ε(ε/2)^(1/q) kernel(r) = {via_kernel}"),
            });
        }
        let chain_target = eps * half_eps.powf(q.recip()) * T::lit(l.blow_n);
        if !(l_n > chain_target * (T::one() - tol)) {
            return Err(Error::ChainFailure {
                level: l.n,
                detail: format!("L_n = {l_n} misses the target {chain_target}"),
            });
        }

        let engine_value = match &engine {
            Some(levels) => {
                let r = &levels[i];
                let ceiling = if r.mode.is_exact() { r.value } else { r.upper };
                if l_n > ceiling * (T::one() + tol) {
                    return Err(Error::Consistency(format!(
                        "L_{} = {l_n} exceeds the engine value {ceiling}",
                        l.n
                    )));
                }
                Some(r.value)
            }
            None => None,
        };
        out.push(BlowupLevel {
            n: l.n,
            r_n: l.r_n,
            s_n: l.s_n,
            t_n: l.t_n,
            h_n: l.h_n,
            l_n,
            second_step: (lhs, rhs),
            chain_target,
            engine_value,
        });
    }
    Ok(out)
}

/// Everything certified about one construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport<T = f64> {
    pub spec: ConstructionSpec<T>,
    pub membership: MembershipCertificate<T>,
    pub blowup: Vec<BlowupLevel<T>>,
}

pub fn certify<T: Real>(inputs: &ConstructionInputs, cfg: &EngineConfig) -> Result<CertificationReport<T>> {
    let spec = plan_construction(inputs)?;
    let f = build_witness(&spec)?;
    let membership = certify_membership(&spec, &f, cfg)?;
    let blowup = certify_blowup(&spec, &f, cfg)?;
    Ok(CertificationReport {
        spec,
        membership,
        blowup,
    })
}

/// Harmonic source with `p = 2` against the constant target `γ_j = 1/12`,
/// `q_n = 1` and `δ = 8, 16, 256, 2048`: violates the criterion with mild
/// constants on grids small enough for the exact engine at two levels.
pub fn mild_lambda_inputs(levels: usize) -> ConstructionInputs {
    use crate::seq::{DeltaLadder, QLadder};
    ConstructionInputs {
        setting: Setting::Lambda {
            source: WeightSpec::new(WeightKind::Harmonic),
            target: WeightSpec::new(WeightKind::Constant { value: 1.0 / 12.0 }),
            p: 2.0,
        },
        gauge: GaugePair::new(
            QLadder::Constant { q: 1.0 },
            DeltaLadder::Explicit {
                values: vec![8, 16, 256, 2048],
            },
        )
        .expect("valid ladder"),
        constants: Constants::mild(),
        levels,
        policy: ScanPolicy::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{BaseConvex, DeltaLadder, QLadder};

    #[test]
    fn flat_kernel_is_infeasible() {
        let inputs = ConstructionInputs {
            setting: Setting::Lambda {
                source: WeightSpec::new(WeightKind::Constant { value: 1.0 }),
                target: WeightSpec::new(WeightKind::Constant { value: 1.0 }),
                p: 1.0,
            },
            gauge: GaugePair::constant_pow2(1.0).unwrap().with_n_max(8).unwrap(),
            constants: Constants {
                blow: GeometricLadder { scale: 1.0, ratio: 2.0 },
                sep: GeometricLadder { scale: 1.0, ratio: 1.0 },
                ..Constants::standard()
            },
            levels: 3,
            policy: ScanPolicy::default(),
        };
        let err = plan_construction::<f64>(&inputs).unwrap_err();
        assert!(matches!(err, Error::Infeasible { level: 1, .. }));
    }

    #[test]
    fn smallest_violating_index() {
        let h: WeightSequence = WeightSequence::harmonic().unwrap();
        let inputs = ConstructionInputs {
            setting: Setting::Lambda {
                source: WeightSpec::new(WeightKind::Harmonic),
                target: WeightSpec::new(WeightKind::Constant { value: 1.0 }),
                p: 1.0,
            },
            gauge: GaugePair::new(QLadder::Constant { q: 1.0 }, DeltaLadder::Pow2 { shift: 10 }).unwrap(),
            constants: Constants::mild(),
            levels: 3,
            policy: ScanPolicy::default(),
        };
        let spec = plan_construction::<f64>(&inputs).unwrap();
        for l in &spec.levels {
            let blow = 4f64.powi(l.n as i32);
            let r = l.r_n;
            assert!(r as f64 / h.growth(r) > blow);
            assert!((r - 1) as f64 / h.growth(r - 1) <= blow);
        }
        // s_1 = ⌊(2^-1 · 2^11 + 1)/2⌋
        assert_eq!(spec.levels[0].s_n, 512);
    }

    #[test]
    fn mild_lambda_levels() {
        let spec = plan_construction::<f64>(&mild_lambda_inputs(4)).unwrap();
        let r: Vec<u64> = spec.levels.iter().map(|l| l.r_n).collect();
        let t: Vec<u64> = spec.levels.iter().map(|l| l.t_n).collect();
        assert_eq!(r, vec![1, 2, 9, 45]);
        assert_eq!(t, vec![1, 2, 9, 45]);
        assert_eq!(spec.grid_m, 2048);
        let two = plan_construction::<f64>(&mild_lambda_inputs(2)).unwrap();
        assert_eq!(two.grid_m, 16);
        let f = build_witness(&two).unwrap();
        let mut incs: Vec<f64> = f.values().windows(2).map(|w| (w[1] - w[0]).abs()).filter(|x| *x > 0.0).collect();
        incs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (h1, h2) = (two.levels[0].h_n, two.levels[1].h_n);
        assert_eq!(incs, vec![h2, h2, h2, h2, h1, h1]);
    }

    #[test]
    fn zero_levels() {
        let spec = plan_construction::<f64>(&mild_lambda_inputs(0)).unwrap();
        let f = build_witness(&spec).unwrap();
        assert_eq!(f.jump_count(), 0);
        let cfg = EngineConfig::default();
        assert_eq!(certify_membership(&spec, &f, &cfg).unwrap().total, 0.0);
        assert!(certify_blowup(&spec, &f, &cfg).unwrap().is_empty());
    }

    #[test]
    fn schramm_toy_is_certified() {
        let inputs = ConstructionInputs {
            setting: Setting::Schramm {
                family: SchrammSpec::Scaled {
                    base: BaseConvex::Power(2.0),
                    weights: WeightSpec::new(WeightKind::Harmonic),
                },
            },
            gauge: GaugePair::new(QLadder::Constant { q: 2.0 }, DeltaLadder::Pow2 { shift: 3 }).unwrap(),
            constants: Constants {
                blow: GeometricLadder { scale: 1.0, ratio: 1.2 },
                ..Constants::standard()
            },
            levels: 2,
            policy: ScanPolicy::default(),
        };
        let rep = certify::<f64>(&inputs, &EngineConfig::default()).unwrap();
        let bound = rep.membership.total;
        assert!(bound <= 2.0 * (0.5 + 0.25));
        assert!(rep.membership.engine_value.unwrap() <= bound);
        assert_eq!(rep.membership.engine_mode, Some(Mode::ExactOracle));
    }
}
