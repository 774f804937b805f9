//! Sweep configuration and its flat TOML file format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::landscape::NoiseModel;
use crate::optimizers::{Algorithm, StartRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    None,
    Normal,
    Geometric,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Normal => "normal",
            NoiseKind::Geometric => "geometric",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseKind::None),
            "normal" | "gaussian" => Ok(NoiseKind::Normal),
            "geometric" | "geo" => Ok(NoiseKind::Geometric),
            other => Err(Error::config(format!(
                "unknown noise `{other}` (expected none, normal or geometric)"
            ))),
        }
    }
}

/// A noise family plus the variance it should have.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub variance: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, variance: f64) -> Self {
        NoiseSpec { kind, variance }
    }

    pub fn model(&self) -> Result<NoiseModel> {
        match self.kind {
            NoiseKind::None => Ok(NoiseModel::None),
            NoiseKind::Normal => NoiseModel::normal(self.variance),
            NoiseKind::Geometric => NoiseModel::geometric_with_variance(self.variance),
        }
    }
}

/// Which popcount a sweep reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    MaxOnesSampled,
    FinalOnes,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::MaxOnesSampled => "max_ones_sampled",
            Statistic::FinalOnes => "final_ones",
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max_ones_sampled" | "max_ones" => Ok(Statistic::MaxOnesSampled),
            "final_ones" => Ok(Statistic::FinalOnes),
            other => Err(Error::config(format!(
                "unknown statistic `{other}` (expected max_ones_sampled or final_ones)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub n_values: Vec<usize>,
    pub repetitions: u64,
    pub budget_rule: Expr,
    pub noise: NoiseSpec,
    pub k_rule: Expr,
    pub master_seed: u64,
    pub statistic: Statistic,
    pub start: StartRule,
    /// Fill `wall_ms`. Off by default so record files are reproducible byte for byte.
    pub record_wall_time: bool,
}

pub const DEFAULT_BUDGET: &str = "n^2";
pub const DEFAULT_K: &str = "sqrt(n)*ln(n)";

impl ExperimentConfig {
    /// All four algorithms, budget `n^2`, `K = sqrt(n) ln n`.
    pub fn new(n_values: Vec<usize>, repetitions: u64, noise: NoiseSpec, master_seed: u64) -> Self {
        ExperimentConfig {
            algorithms: Algorithm::ALL.to_vec(),
            n_values,
            repetitions,
            budget_rule: Expr::parse(DEFAULT_BUDGET).expect("default budget parses"),
            noise,
            k_rule: Expr::parse(DEFAULT_K).expect("default K parses"),
            master_seed,
            statistic: Statistic::default(),
            start: StartRule::default(),
            record_wall_time: false,
        }
    }

    /// Checks everything a sweep needs before any run starts.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::config("no algorithms selected"));
        }
        let mut sorted = self.algorithms.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.algorithms.len() {
            return Err(Error::config("an algorithm is listed twice"));
        }
        if self.n_values.is_empty() {
            return Err(Error::config("n_values is empty"));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::config(format!("n must be >= 2, got {n}")));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        self.noise.model()?;
        for &n in &self.n_values {
            self.budget_rule.eval_count(n)?;
            if self.algorithms.contains(&Algorithm::Cga) {
                self.k_at(n)?;
            }
        }
        Ok(())
    }

    pub fn k_at(&self, n: usize) -> Result<f64> {
        let k = self.k_rule.eval(n)?;
        if k > 0.0 {
            Ok(k)
        } else {
            Err(Error::config(format!(
                "K rule `{}` gives {k} at n={n}",
                self.k_rule
            )))
        }
    }

    /// Parses the flat key-value format. Unknown keys and ill-typed values are
    /// reported with the offending key.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            key: "<document>".into(),
            message: e.to_string(),
        })?;
        let mut cfg =
            ExperimentConfig::new(Vec::new(), 0, NoiseSpec::new(NoiseKind::Normal, 5.0), 0);
        let mut have_n = false;
        let mut have_reps = false;
        for (key, value) in &table {
            let bad = |message: String| Error::Parse {
                key: key.clone(),
                message,
            };
            match key.as_str() {
                "algorithms" => {
                    cfg.algorithms = str_list(value)
                        .ok_or_else(|| bad("expected a list of strings".into()))?
                        .iter()
                        .map(|s| s.parse().map_err(|e: Error| bad(e.to_string())))
                        .collect::<Result<_>>()?;
                }
                "n_values" => {
                    cfg.n_values = value
                        .as_array()
                        .and_then(|a| a.iter().map(as_usize).collect::<Option<Vec<_>>>())
                        .ok_or_else(|| bad("expected a list of positive integers".into()))?;
                    have_n = true;
                }
                "repetitions" => {
                    cfg.repetitions = value
                        .as_integer()
                        .and_then(|v| u64::try_from(v).ok())
                        .ok_or_else(|| bad("expected a non-negative integer".into()))?;
                    have_reps = true;
                }
                "budget" => cfg.budget_rule = parse_str(value, &bad)?,
                "k" => cfg.k_rule = parse_str(value, &bad)?,
                "noise" => cfg.noise.kind = parse_str(value, &bad)?,
                "variance" => {
                    cfg.noise.variance = value
                        .as_float()
                        .or_else(|| value.as_integer().map(|i| i as f64))
                        .ok_or_else(|| bad("expected a number".into()))?;
                }
                "seed" => {
                    // negative values are the two's-complement form of seeds above i64::MAX
                    cfg.master_seed = value
                        .as_integer()
                        .map(|v| v as u64)
                        .ok_or_else(|| bad("expected an integer".into()))?;
                }
                "statistic" => cfg.statistic = parse_str(value, &bad)?,
                "start" => {
                    cfg.start = match value.as_str() {
                        Some("balanced") => StartRule::Balanced,
                        Some("uniform") => StartRule::Uniform,
                        _ => return Err(bad("expected \"balanced\" or \"uniform\"".into())),
                    }
                }
                "record_wall_time" => {
                    cfg.record_wall_time = value
                        .as_bool()
                        .ok_or_else(|| bad("expected true or false".into()))?;
                }
                _ => return Err(bad("unknown key".into())),
            }
        }
        if !have_n {
            return Err(Error::Parse {
                key: "n_values".into(),
                message: "missing".into(),
            });
        }
        if !have_reps {
            return Err(Error::Parse {
                key: "repetitions".into(),
                message: "missing".into(),
            });
        }
        Ok(cfg)
    }

    /// The same flat format [`Self::from_toml_str`] reads.
    pub fn to_toml_string(&self) -> String {
        let mut t = Table::new();
        t.insert(
            "algorithms".into(),
            Value::Array(
                self.algorithms
                    .iter()
                    .map(|a| Value::String(a.name().into()))
                    .collect(),
            ),
        );
        t.insert(
            "n_values".into(),
            Value::Array(
                self.n_values
                    .iter()
                    .map(|&n| Value::Integer(n as i64))
                    .collect(),
            ),
        );
        t.insert(
            "repetitions".into(),
            Value::Integer(self.repetitions as i64),
        );
        t.insert(
            "budget".into(),
            Value::String(self.budget_rule.source().into()),
        );
        t.insert("k".into(), Value::String(self.k_rule.source().into()));
        t.insert("noise".into(), Value::String(self.noise.kind.name().into()));
        t.insert("variance".into(), Value::Float(self.noise.variance));
        // TOML integers are signed; seeds above i64::MAX wrap to negative values
        t.insert("seed".into(), Value::Integer(self.master_seed as i64));
        t.insert(
            "statistic".into(),
            Value::String(self.statistic.name().into()),
        );
        let start = match self.start {
            StartRule::Balanced => "balanced",
            StartRule::Uniform => "uniform",
        };
        t.insert("start".into(), Value::String(start.into()));
        t.insert(
            "record_wall_time".into(),
            Value::Boolean(self.record_wall_time),
        );
        toml::to_string(&t).expect("a flat table serializes")
    }
}

fn str_list(v: &Value) -> Option<Vec<&str>> {
    v.as_array()?.iter().map(Value::as_str).collect()
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_integer().and_then(|i| usize::try_from(i).ok())
}

fn parse_str<T: FromStr<Err = Error>>(v: &Value, bad: &dyn Fn(String) -> Error) -> Result<T> {
    v.as_str()
        .ok_or_else(|| bad("expected a string".into()))?
        .parse()
        .map_err(|e: Error| bad(e.to_string()))
}
