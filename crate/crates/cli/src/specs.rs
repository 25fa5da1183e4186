//! Inline family specs: `harmonic`, `power:0.5`, `pow2:3`, `explicit:1,2,3`.

use anyhow::{anyhow, bail, Context, Result};
use gbv_core::seq::{BaseConvex, DeltaLadder, QLadder, WeightKind, WeightSpec};

fn split(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((head, rest)) => (head.trim(), Some(rest.trim())),
        None => (spec.trim(), None),
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim().parse().with_context(|| format!("{s:?} is not a number"))
}

fn numbers(s: Option<&str>, what: &str) -> Result<Vec<f64>> {
    let s = s.ok_or_else(|| anyhow!("{what} needs a comma-separated list"))?;
    s.split(',').map(number).collect()
}

fn one_arg(s: Option<&str>, what: &str) -> Result<f64> {
    number(s.ok_or_else(|| anyhow!("{what} needs a parameter"))?)
}

/// `constant[:v] | harmonic | power:α | log | explicit:v1,v2,...`, with an
/// optional `@K` suffix for the cached horizon.
pub fn weights(spec: &str) -> Result<WeightSpec> {
    let (body, k_max) = match spec.split_once('@') {
        Some((b, k)) => (b, Some(k.trim().parse::<usize>().with_context(|| format!("bad horizon in {spec:?}"))?)),
        None => (spec, None),
    };
    let (head, rest) = split(body);
    let kind = match head {
        "constant" => WeightKind::Constant {
            value: rest.map(number).transpose()?.unwrap_or(1.0),
        },
        "harmonic" => WeightKind::Harmonic,
        "power" => WeightKind::Power {
            alpha: one_arg(rest, "power")?,
        },
        "log" | "log-scaled" => WeightKind::LogScaled,
        "explicit" => WeightKind::Explicit {
            values: numbers(rest, "explicit")?,
        },
        _ => bail!("unknown weight sequence {spec:?}"),
    };
    let spec = WeightSpec::new(kind);
    Ok(match k_max {
        Some(k) => spec.with_k_max(k),
        None => spec,
    })
}

/// `power:p | expm1`.
pub fn base(spec: &str) -> Result<BaseConvex> {
    let (head, rest) = split(spec);
    match head {
        "power" => Ok(BaseConvex::Power(one_arg(rest, "power")?)),
        "expm1" | "exp-m1" => Ok(BaseConvex::ExpM1),
        _ => bail!("unknown base function {spec:?}"),
    }
}

/// `constant:q | linear[:slope[,intercept]] | approach:limit,gap | explicit:q1,q2,...`.
pub fn q_ladder(spec: &str) -> Result<QLadder> {
    let (head, rest) = split(spec);
    Ok(match head {
        "constant" => QLadder::Constant {
            q: one_arg(rest, "constant")?,
        },
        "linear" => {
            let v = rest.map(|r| numbers(Some(r), "linear")).transpose()?.unwrap_or_default();
            QLadder::Linear {
                slope: v.first().copied().unwrap_or(1.0),
                intercept: v.get(1).copied().unwrap_or(0.0),
            }
        }
        "approach" => match numbers(rest, "approach")?.as_slice() {
            [limit, gap] => QLadder::Approach { limit: *limit, gap: *gap },
            _ => bail!("approach needs limit,gap"),
        },
        "explicit" => QLadder::Explicit {
            values: numbers(rest, "explicit")?,
        },
        _ => bail!("unknown exponent ladder {spec:?}"),
    })
}

/// `pow2[:shift] | linear:scale | explicit:d1,d2,...`.
pub fn delta_ladder(spec: &str) -> Result<DeltaLadder> {
    let (head, rest) = split(spec);
    let int = |s: &str| s.trim().parse::<u64>().with_context(|| format!("{s:?} is not an integer"));
    Ok(match head {
        "pow2" => DeltaLadder::Pow2 {
            shift: rest.map(int).transpose()?.unwrap_or(0) as u32,
        },
        "linear" => DeltaLadder::Linear {
            scale: int(rest.ok_or_else(|| anyhow!("linear needs a scale"))?)?,
        },
        "explicit" => DeltaLadder::Explicit {
            values: rest
                .ok_or_else(|| anyhow!("explicit needs a list"))?
                .split(',')
                .map(int)
                .collect::<Result<_>>()?,
        },
        _ => bail!("unknown scale ladder {spec:?}"),
    })
}

pub fn q_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',').map(number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_specs() {
        assert_eq!(weights("harmonic").unwrap().kind, WeightKind::Harmonic);
        assert_eq!(weights("power:0.5@100").unwrap().k_max, Some(100));
        assert_eq!(
            weights("explicit:1,2,2").unwrap().kind,
            WeightKind::Explicit { values: vec![1.0, 2.0, 2.0] }
        );
        assert_eq!(base("power:2").unwrap(), BaseConvex::Power(2.0));
        assert_eq!(q_ladder("linear").unwrap(), QLadder::Linear { slope: 1.0, intercept: 0.0 });
        assert_eq!(q_ladder("approach:2,1").unwrap(), QLadder::Approach { limit: 2.0, gap: 1.0 });
        assert_eq!(delta_ladder("pow2:3").unwrap(), DeltaLadder::Pow2 { shift: 3 });
        assert!(weights("bogus").is_err());
        assert!(q_ladder("approach:2").is_err());
    }
}
