use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use gbv_core::counterexamples::{certify, mild_lambda_inputs, ConstructionInputs};
use gbv_core::criteria::{
    criterion_corollary_q, criterion_lambda_gamma, criterion_phi_lambda, criterion_schramm, criterion_union_p,
    CriterionKind, CriterionReport, ScanPolicy,
};
use gbv_core::inequality::{run_suite, SuiteConfig, SuiteKind};
use gbv_core::seq::{BaseConvex, GaugePair, SchrammSpec, WeightSpec};
use gbv_core::step_fn::{InputFormat, StepFunction};
use gbv_core::variation::{
    gauged_levels, modulus_of_variation, modulus_profile, schramm_norm, variation_gauged, variation_schramm,
    variation_unweighted_q, variation_weighted, EngineConfig,
};

use crate::specs;

/// What a subcommand produced.
pub struct Outcome {
    pub config: Value,
    pub result: Value,
    pub csv: String,
    pub summary: String,
    /// A suite ran but reported failures.
    pub failed: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct EngineArgs {
    /// Largest run-compressed grid searched exactly.
    #[arg(long, default_value_t = 16)]
    pub oracle_cap: usize,
    /// Largest interval count tabulated for bounds.
    #[arg(long, default_value_t = 128)]
    pub dp_count_cap: usize,
}

impl EngineArgs {
    fn config(&self) -> Result<EngineConfig> {
        if self.oracle_cap == 0 || self.dp_count_cap == 0 {
            bail!("caps must be positive");
        }
        Ok(EngineConfig {
            oracle_cap: self.oracle_cap,
            dp_count_cap: self.dp_count_cap,
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    Modulus,
    Unweighted,
    Lambda,
    Schramm,
    Gauged,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileFormat {
    Csv,
    Json,
}

fn load(path: &Path, format: Option<FileFormat>) -> Result<StepFunction> {
    let format = match format {
        Some(FileFormat::Csv) => InputFormat::Csv,
        Some(FileFormat::Json) => InputFormat::Json,
        None => InputFormat::from_path(path)
            .with_context(|| format!("cannot tell the format of {}; pass --input-format", path.display()))?,
    };
    Ok(StepFunction::ingest(path, format)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Args, Debug, Serialize)]
pub struct VariationArgs {
    /// Samples of the function, one per line (CSV) or {"values": [...]} (JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: Option<FileFormat>,
    #[arg(long, value_enum, default_value = "lambda")]
    pub functional: Functional,
    /// Weight sequence, e.g. harmonic, constant:2, power:0.5, log, explicit:1,2,3.
    #[arg(long, default_value = "harmonic")]
    pub weights: String,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Exponent of the unweighted functional.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Interval count for the modulus (defaults to the grid size).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_len: usize,
    /// Base convex function of the Schramm family: power:p or expm1.
    #[arg(long, default_value = "power:2")]
    pub phi: String,
    /// Exponent ladder: constant:q, linear[:slope,intercept], approach:limit,gap, explicit:...
    #[arg(long, default_value = "linear")]
    pub qn: String,
    /// Scale ladder: pow2[:shift], linear:scale, explicit:...
    #[arg(long, default_value = "pow2")]
    pub delta: String,
    #[arg(long, default_value_t = 8)]
    pub ncap: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn variation(a: &VariationArgs) -> Result<Outcome> {
    let f = load(&a.input, a.input_format)?;
    let cfg = a.engine.config()?;
    let weights = specs::weights(&a.weights)?;
    let w = weights.build::<f64>()?;
    let mut config = json!({
        "input": a.input,
        "m": f.m(),
        "functional": a.functional,
        "engine": cfg,
    });
    let mut extra = json!(null);
    let mut csv = String::new();
    let r = match a.functional {
        Functional::Modulus => {
            let n = a.n.unwrap_or(f.m());
            config["n"] = json!(n);
            let profile = modulus_profile(&f, n);
            csv.push_str("n,nu\n");
            for (k, v) in profile.iter().enumerate() {
                csv.push_str(&format!("{k},{v}\n"));
            }
            extra = json!(profile);
            modulus_of_variation(&f, n)?
        }
        Functional::Unweighted => {
            let s_max = a.s_max.unwrap_or(f.m());
            config["q"] = json!(a.q);
            config["s_max"] = json!(s_max);
            config["min_len"] = json!(a.min_len);
            variation_unweighted_q(&f, a.q, s_max, a.min_len)?
        }
        Functional::Lambda => {
            config["weights"] = json!(weights);
            config["p"] = json!(a.p);
            variation_weighted(&f, &w, a.p, &cfg)?
        }
        Functional::Schramm => {
            let family = SchrammSpec::Scaled {
                base: specs::base(&a.phi)?,
                weights: weights.clone(),
            };
            config["family"] = json!(family);
            variation_schramm(&f, &family.build()?, &cfg)?
        }
        Functional::Gauged => {
            let gauge = GaugePair::new(specs::q_ladder(&a.qn)?, specs::delta_ladder(&a.delta)?)?;
            config["weights"] = json!(weights);
            config["gauge"] = json!(gauge);
            config["ncap"] = json!(a.ncap);
            let levels = gauged_levels(&f, &w, &gauge, a.ncap, &cfg)?;
            csv.push_str("level,q_n,delta_n,value,mode\n");
            for l in &levels {
                let n = l.level.unwrap_or(0);
                csv.push_str(&format!(
                    "{n},{},{},{},{}\n",
                    gauge.q_n(n),
                    gauge.delta_n(n),
                    l.value,
                    json!(l.mode).as_str().unwrap_or_default()
                ));
            }
            extra = json!(levels);
            variation_gauged(&f, &w, &gauge, a.ncap, &cfg)?
        }
    };
    if csv.is_empty() {
        csv = format!(
            "value,mode,lower,upper\n{},{},{},{}\n",
            r.value,
            json!(r.mode).as_str().unwrap_or_default(),
            r.lower,
            r.upper
        );
    }
    let summary = format!(
        "variation {}: value {} ({})",
        json!(a.functional).as_str().unwrap_or_default(),
        r.value,
        json!(r.mode).as_str().unwrap_or_default()
    );
    let mut result = json!(r);
    if !extra.is_null() {
        result["detail"] = extra;
    }
    Ok(Outcome {
        config,
        result,
        csv,
        summary,
        failed: false,
    })
}

/// Fully resolved criterion request, as accepted by `--config`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionConfig {
    pub criterion: CriterionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<SchrammSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseConvex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugePair>,
    #[serde(default = "default_ncap")]
    pub n_cap: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub policy: ScanPolicy,
}

fn default_ncap() -> usize {
    20
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionName {
    LambdaGamma,
    CorollaryQ,
    Schramm,
    PhiLambda,
    UnionP,
}

#[derive(Args, Debug, Serialize)]
pub struct CriterionArgs {
    /// JSON file with a full criterion request; flags are ignored when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    pub criterion: Option<CriterionName>,
    /// Source weights (also the weights of Schramm and single-weight criteria).
    #[arg(long, default_value = "harmonic")]
    pub lambda: String,
    /// Target weights.
    #[arg(long, default_value = "constant")]
    pub gamma: String,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Fixed target exponent (corollary-q).
    #[arg(long)]
    pub q: Option<f64>,
    /// Base convex function for the Schramm criteria.
    #[arg(long, default_value = "power:2")]
    pub phi: String,
    #[arg(long, default_value = "linear")]
    pub qn: String,
    #[arg(long, default_value = "pow2")]
    pub delta: String,
    #[arg(long, default_value_t = 20)]
    pub ncap: usize,
    /// Horizon of the corollary-q scan.
    #[arg(long, default_value_t = 1 << 20)]
    pub horizon: u64,
}

impl CriterionArgs {
    fn resolve(&self) -> Result<CriterionConfig> {
        if let Some(path) = &self.config {
            return read_json(path);
        }
        let criterion = match self.criterion.expect("required by clap") {
            CriterionName::LambdaGamma => CriterionKind::LambdaGamma,
            CriterionName::CorollaryQ => CriterionKind::CorollaryQ,
            CriterionName::Schramm => CriterionKind::Schramm,
            CriterionName::PhiLambda => CriterionKind::PhiLambda,
            CriterionName::UnionP => CriterionKind::UnionP,
        };
        let lambda = specs::weights(&self.lambda)?;
        let gauge = GaugePair::new(specs::q_ladder(&self.qn)?, specs::delta_ladder(&self.delta)?)?;
        let mut c = CriterionConfig {
            criterion,
            lambda: None,
            gamma: None,
            family: None,
            base: None,
            p: None,
            q: None,
            gauge: None,
            n_cap: self.ncap,
            horizon: None,
            policy: ScanPolicy::default(),
        };
        match criterion {
            CriterionKind::LambdaGamma => {
                c.lambda = Some(lambda);
                c.gamma = Some(specs::weights(&self.gamma)?);
                c.p = Some(self.p);
                c.gauge = Some(gauge);
            }
            CriterionKind::CorollaryQ => {
                c.lambda = Some(lambda);
                c.gamma = Some(specs::weights(&self.gamma)?);
                c.p = Some(self.p);
                c.q = Some(self.q.context("corollary-q needs --q")?);
                c.horizon = Some(self.horizon);
            }
            CriterionKind::Schramm => {
                c.family = Some(SchrammSpec::Scaled {
                    base: specs::base(&self.phi)?,
                    weights: lambda,
                });
                c.gauge = Some(gauge);
            }
            CriterionKind::PhiLambda => {
                c.base = Some(specs::base(&self.phi)?);
                c.lambda = Some(lambda);
                c.gauge = Some(gauge);
            }
            CriterionKind::UnionP => {
                c.lambda = Some(lambda);
                c.p = Some(self.p);
                c.gauge = Some(gauge);
            }
        }
        Ok(c)
    }
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().with_context(|| format!("criterion config is missing {what}"))
}

pub fn run_criterion(c: &CriterionConfig) -> Result<CriterionReport> {
    let policy = &c.policy;
    let report = match c.criterion {
        CriterionKind::LambdaGamma => criterion_lambda_gamma(
            &need(&c.lambda, "lambda")?.build()?,
            &need(&c.gamma, "gamma")?.build()?,
            need(&c.p, "p")?,
            &need(&c.gauge, "gauge")?,
            c.n_cap,
            policy,
        )?,
        CriterionKind::CorollaryQ => criterion_corollary_q(
            &need(&c.lambda, "lambda")?.build()?,
            &need(&c.gamma, "gamma")?.build()?,
            need(&c.p, "p")?,
            need(&c.q, "q")?,
            need(&c.horizon, "horizon")?,
            policy,
        )?,
        CriterionKind::Schramm => {
            criterion_schramm(&need(&c.family, "family")?.build()?, &need(&c.gauge, "gauge")?, c.n_cap, policy)?
        }
        CriterionKind::PhiLambda => criterion_phi_lambda(
            &need(&c.base, "base")?,
            &need(&c.lambda, "lambda")?.build()?,
            &need(&c.gauge, "gauge")?,
            c.n_cap,
            policy,
        )?,
        CriterionKind::UnionP => criterion_union_p(
            &need(&c.lambda, "lambda")?.build()?,
            need(&c.p, "p")?,
            &need(&c.gauge, "gauge")?,
            c.n_cap,
            policy,
        )?,
    };
    Ok(report)
}

pub fn criterion(a: &CriterionArgs) -> Result<Outcome> {
    let c = a.resolve()?;
    let r = run_criterion(&c)?;
    let summary = format!(
        "criterion {}: {} (sup {} over {} levels, slope {:.4})",
        json!(c.criterion).as_str().unwrap_or_default(),
        json!(r.verdict).as_str().unwrap_or_default(),
        r.sup,
        r.levels.len(),
        r.slope
    );
    Ok(Outcome {
        config: json!(c),
        result: json!(r),
        csv: r.to_csv(),
        summary,
        failed: false,
    })
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    MildLambda,
}

#[derive(Args, Debug, Serialize)]
pub struct CounterexampleArgs {
    /// JSON file with construction inputs.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    pub preset: Option<Preset>,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn counterexample(a: &CounterexampleArgs) -> Result<Outcome> {
    let inputs: ConstructionInputs = match (&a.config, a.preset) {
        (Some(path), _) => read_json(path)?,
        (None, Some(Preset::MildLambda)) => mild_lambda_inputs(a.levels),
        (None, None) => bail!("pass --config or --preset"),
    };
    let cfg = a.engine.config()?;
    let r = certify::<f64>(&inputs, &cfg)?;
    let mut csv = String::from("n,r_n,s_n,t_n,h_n,l_n,chain_target\n");
    for b in &r.blowup {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            b.n, b.r_n, b.s_n, b.t_n, b.h_n, b.l_n, b.chain_target
        ));
    }
    let summary = format!(
        "counterexample: {} levels on m = {}, membership bound {}, blow-up {:?}",
        r.blowup.len(),
        r.spec.grid_m,
        r.membership.total,
        r.blowup.iter().map(|b| b.l_n).collect::<Vec<_>>()
    );
    Ok(Outcome {
        config: json!({ "inputs": inputs, "engine": cfg }),
        result: json!(r),
        csv,
        summary,
        failed: false,
    })
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Master,
    Extremal,
    Weighted,
    Holder,
    Wu,
}

#[derive(Args, Debug, Serialize)]
pub struct InequalityArgs {
    /// JSON suite config; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "config")]
    pub suite: Option<SuiteName>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated exponents.
    #[arg(long)]
    pub qs: Option<String>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

pub fn inequality(a: &InequalityArgs) -> Result<Outcome> {
    let mut cfg: SuiteConfig = match (&a.config, a.suite) {
        (Some(path), _) => read_json(path)?,
        (None, Some(s)) => SuiteConfig::defaults(match s {
            SuiteName::Master => SuiteKind::Master,
            SuiteName::Extremal => SuiteKind::Extremal,
            SuiteName::Weighted => SuiteKind::Weighted,
            SuiteName::Holder => SuiteKind::Holder,
            SuiteName::Wu => SuiteKind::Wu,
        }),
        (None, None) => bail!("pass --config or --suite"),
    };
    if let Some(v) = a.samples {
        cfg.samples = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = &a.qs {
        cfg.qs = specs::q_list(v)?;
    }
    if let Some(v) = a.n_max {
        cfg.n_max = v;
    }
    let r = run_suite(&cfg)?;
    let mut csv = String::from("group,samples,failures,worst\n");
    for g in &r.groups {
        csv.push_str(&format!("\"{}\",{},{},{}\n", g.label, g.samples, g.failures, g.worst));
    }
    let samples: usize = r.groups.iter().map(|g| g.samples).sum();
    let summary = format!(
        "inequality {}: {samples} cases in {} groups, {} failures",
        json!(cfg.suite).as_str().unwrap_or_default(),
        r.groups.len(),
        r.failures
    );
    Ok(Outcome {
        config: json!(cfg),
        result: json!(r),
        csv,
        summary,
        failed: !r.passed(),
    })
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: Option<FileFormat>,
    #[arg(long, default_value = "power:2")]
    pub phi: String,
    #[arg(long, default_value = "harmonic")]
    pub weights: String,
    /// Value at the left endpoint; defaults to the first sample.
    #[arg(long, allow_hyphen_values = true)]
    pub fa: Option<f64>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub fn norm(a: &NormArgs) -> Result<Outcome> {
    let f = load(&a.input, a.input_format)?;
    let cfg = a.engine.config()?;
    let family = SchrammSpec::Scaled {
        base: specs::base(&a.phi)?,
        weights: specs::weights(&a.weights)?,
    };
    let f_a = a.fa.unwrap_or(f.values()[0]);
    let value = schramm_norm(&f, &family.build()?, f_a, &cfg)?;
    Ok(Outcome {
        config: json!({ "input": a.input, "m": f.m(), "family": family, "f_a": f_a, "engine": cfg }),
        result: json!({ "norm": value }),
        csv: format!("norm\n{value}\n"),
        summary: format!("norm: {value}"),
        failed: false,
    })
}
