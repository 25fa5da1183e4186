//! Functions on `[0, 1]` sampled on a uniform grid `t_i = i/m`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// How the samples are to be read between grid points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    #[default]
    Sampled,
    RightContinuousStep,
}

/// Values `f(t_i)` at `t_i = i/m`, `i = 0..=m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction<T = f64> {
    m: usize,
    values: Vec<T>,
    #[serde(default)]
    interpretation: Interpretation,
}

#[derive(Deserialize)]
struct JsonSamples {
    #[serde(default)]
    m: Option<usize>,
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" | "txt" => Some(InputFormat::Csv),
            "json" => Some(InputFormat::Json),
            _ => None,
        }
    }
}

impl<T: Real> StepFunction<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a step function needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(Self {
            m: values.len() - 1,
            values,
            interpretation: Interpretation::Sampled,
        })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![T::zero(); m + 1])
    }

    pub fn with_interpretation(mut self, interpretation: Interpretation) -> Self {
        self.interpretation = interpretation;
        self
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    /// Grid resolution (number of cells).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `|f(t_b) - f(t_a)|` for `0 <= a < b <= m`.
    pub fn increment(&self, a: usize, b: usize) -> Result<T> {
        if a >= b || b > self.m {
            return Err(Error::IndexOutOfRange { a, b, m: self.m });
        }
        Ok(self.increment_unchecked(a, b))
    }

    #[inline]
    pub(crate) fn increment_unchecked(&self, a: usize, b: usize) -> T {
        (self.values[b] - self.values[a]).abs()
    }

    /// `c·f`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            m: self.m,
            values: self.values.iter().map(|&v| v * c).collect(),
            interpretation: self.interpretation,
        }
    }

    /// Pointwise sum; both functions must share the grid.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::Resolution(format!(
                "cannot add functions on grids {} and {}",
                self.m, other.m
            )));
        }
        Ok(Self {
            m: self.m,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + b)
                .collect(),
            interpretation: self.interpretation,
        })
    }

    /// Indices of nonzero samples.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.m).filter(|&i| !self.values[i].is_zero()).collect()
    }

    /// Merges runs of equal consecutive samples. Returns the compressed
    /// function and, for each compressed index, the first original index of
    /// its run. Variation functionals without a length constraint are
    /// invariant under this map.
    pub fn compress_runs(&self) -> (Vec<T>, Vec<usize>) {
        let mut vals = vec![self.values[0]];
        let mut starts = vec![0];
        for (i, &v) in self.values.iter().enumerate().skip(1) {
            if v != *vals.last().expect("nonempty") {
                vals.push(v);
                starts.push(i);
            }
        }
        (vals, starts)
    }

    /// Number of nonzero consecutive differences.
    pub fn jump_count(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

impl StepFunction<f64> {
    /// Reads samples from a CSV file (one value per line) or a JSON file
    /// (`{"m": int, "values": [...]}`).
    pub fn ingest(path: &Path, format: InputFormat) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match format {
            InputFormat::Csv => Self::parse_csv(&text),
            InputFormat::Json => Self::parse_json(&text),
        }
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(text.as_bytes());
        let mut values = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 1 {
                return Err(Error::Parse(format!(
                    "line {}: expected one value, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let field = &record[0];
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: {field:?} is not a number", line + 1)))?;
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "line {}: non-finite value {field}",
                    line + 1
                )));
            }
            values.push(v);
        }
        Self::new(values)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: JsonSamples = serde_json::from_str(text)?;
        if let Some(m) = raw.m {
            if m + 1 != raw.values.len() {
                return Err(Error::InvalidInput(format!(
                    "m = {m} but {} values were given",
                    raw.values.len()
                )));
            }
        }
        Self::new(raw.values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "m": self.m, "values": self.values }).to_string()
    }
}

/// Nonoverlapping grid intervals `[t_a, t_b]` in spatial order together with
/// their increments. Adjacent intervals may share an endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalCollection<T = f64> {
    pub pairs: Vec<(usize, usize)>,
    pub increments: Vec<T>,
}

impl<T: Real> IntervalCollection<T> {
    pub fn empty() -> Self {
        Self {
            pairs: Vec::new(),
            increments: Vec::new(),
        }
    }

    /// Validates the pairs against `f` and records their increments.
    pub fn new(f: &StepFunction<T>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        check_pairs(&pairs, f.m(), 1)?;
        let increments = pairs
            .iter()
            .map(|&(a, b)| f.increment_unchecked(a, b))
            .collect();
        Ok(Self { pairs, increments })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Shortest interval in grid cells (`None` when empty).
    pub fn min_len(&self) -> Option<usize> {
        self.pairs.iter().map(|&(a, b)| b - a).min()
    }

    /// Increments sorted in descending order.
    pub fn sorted_increments(&self) -> Vec<T> {
        let mut v = self.increments.clone();
        v.sort_by(|a, b| b.partial_cmp(a).expect("finite increments"));
        v
    }
}

/// Checks `0 <= a_j < b_j <= m`, `b_j <= a_{j+1}` and `b_j - a_j >= min_len`.
pub fn check_pairs(pairs: &[(usize, usize)], m: usize, min_len: usize) -> Result<()> {
    let mut prev_end = 0;
    for (i, &(a, b)) in pairs.iter().enumerate() {
        if a >= b || b > m {
            return Err(Error::IndexOutOfRange { a, b, m });
        }
        if a < prev_end {
            return Err(Error::Overlap(i));
        }
        if b - a < min_len {
            return Err(Error::InvalidInput(format!(
                "interval {i} has {} cells, fewer than the required {min_len}",
                b - a
            )));
        }
        prev_end = b;
    }
    Ok(())
}

fn is_multiple(m: usize, d: u64) -> bool {
    d != 0 && (m as u64) % d == 0
}

/// One level of the plateau construction: the function equal to `height` on
/// `[2^-n + (2j-2)/δ, 2^-n + (2j-1)/δ)` for `j = 1..=count` and zero
/// elsewhere, on a grid of resolution `m`.
///
/// Each half-open plateau puts `height` on its left samples and leaves the
/// sample at its right end at zero.
pub fn generate_block<T: Real>(
    level: u32,
    height: T,
    count: u64,
    delta: u64,
    m: usize,
) -> Result<StepFunction<T>> {
    let mut f = StepFunction::zeros(m)?;
    if count == 0 || height.is_zero() {
        return Ok(f);
    }
    if level >= 63 || !is_multiple(m, 1u64 << level) || !is_multiple(m, delta) {
        return Err(Error::Resolution(format!(
            "grid m = {m} is not a common multiple of 2^{level} and δ = {delta}"
        )));
    }
    let offset = m >> level;
    let cell = m / delta as usize;
    let end = offset as u128 + (2 * count as u128 - 1) * cell as u128;
    if end > m as u128 {
        return Err(Error::Resolution(format!(
            "{count} plateaus of width 1/{delta} starting at 2^-{level} leave [0, 1]"
        )));
    }
    for j in 0..count as usize {
        let start = offset + 2 * j * cell;
        for v in &mut f.values[start..start + cell] {
            *v = height;
        }
    }
    Ok(f)
}
