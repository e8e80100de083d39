//! Flat `key = value` experiment configuration.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Lists
//! are comma separated. Unknown keys are rejected so typos surface early.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Every key the runner understands.
pub const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "N",
    "n",
    "dt",
    "t",
    "t0",
    "t_end",
    "fine_step",
    "replications",
    "ell",
    "ell_max",
    "seed",
    "gamma",
    "epsilon",
    "s0",
    "p",
    "half_width",
    "shape",
    "max_iters",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    DistanceMoments,
    ModelTrajectory,
    InfoRateMoments,
    FisherBiasVsN,
    FisherBiasVsT,
    FilteringComparison,
    ElbowScan,
    TheoryVsMc,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::DistanceMoments,
        ExperimentKind::ModelTrajectory,
        ExperimentKind::InfoRateMoments,
        ExperimentKind::FisherBiasVsN,
        ExperimentKind::FisherBiasVsT,
        ExperimentKind::FilteringComparison,
        ExperimentKind::ElbowScan,
        ExperimentKind::TheoryVsMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::DistanceMoments => "distance-moments",
            ExperimentKind::ModelTrajectory => "model-trajectory",
            ExperimentKind::InfoRateMoments => "info-rate-moments",
            ExperimentKind::FisherBiasVsN => "fisher-bias-vs-n",
            ExperimentKind::FisherBiasVsT => "fisher-bias-vs-t",
            ExperimentKind::FilteringComparison => "filtering-comparison",
            ExperimentKind::ElbowScan => "elbow-scan",
            ExperimentKind::TheoryVsMc => "theory-vs-mc",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown experiment '{s}'; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

/// Parsed configuration: the experiment name plus raw values for every other key.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: ExperimentKind,
    entries: BTreeMap<String, (usize, String)>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {line_no}: expected 'key = value', got '{line}'"
                )));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config(format!(
                    "line {line_no}: unknown key '{key}'; known keys: {}",
                    KNOWN_KEYS.join(", ")
                )));
            }
            if value.is_empty() {
                return Err(Error::Config(format!("line {line_no}: key '{key}' has no value")));
            }
            if entries.insert(key.to_string(), (line_no, value.to_string())).is_some() {
                return Err(Error::Config(format!("line {line_no}: key '{key}' is set twice")));
            }
        }
        let (_, name) = entries
            .remove("experiment")
            .ok_or_else(|| Error::Config("missing required key 'experiment'".into()))?;
        Ok(Config {
            experiment: name.parse()?,
            entries,
        })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn parse_value<T: FromStr>(&self, key: &str, line: usize, text: &str) -> Result<T> {
        text.trim().parse().map_err(|_| {
            Error::Config(format!(
                "line {line}: cannot parse '{text}' for key '{key}' as {}",
                std::any::type_name::<T>().rsplit("::").next().unwrap_or("value")
            ))
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, text)) => self.parse_value(key, *line, text).map(Some),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, text)) => text
                .split(',')
                .map(|item| self.parse_value(key, *line, item))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn list_or<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        Ok(self.list(key)?.unwrap_or(default))
    }

    /// Sample sizes: integers, optionally written as `1e4`.
    pub fn sample_sizes(&self, default: Vec<u64>) -> Result<Vec<u64>> {
        let Some(values) = self.list::<f64>("n")? else {
            return Ok(default);
        };
        values
            .into_iter()
            .map(|v| {
                if v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                    Ok(v as u64)
                } else {
                    Err(Error::Config(format!(
                        "sample size n={v} must be a positive integer"
                    )))
                }
            })
            .collect()
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get_or(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Config(format!("'{key}' must be positive and finite, got {v}")))
        }
    }

    pub fn count_at_least(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v = self.get_or(key, default)?;
        if v >= min {
            Ok(v)
        } else {
            Err(Error::Config(format!("'{key}' must be at least {min}, got {v}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_comments() {
        let cfg = Config::parse(
            "# demo\nexperiment = fisher-bias-vs-n\nn = 1e4, 3e4,100000\ndt = 0.25 # spacing\n",
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::FisherBiasVsN);
        assert_eq!(cfg.sample_sizes(vec![]).unwrap(), vec![10_000, 30_000, 100_000]);
        assert_eq!(cfg.get::<f64>("dt").unwrap(), Some(0.25));
        assert_eq!(cfg.get::<f64>("t").unwrap(), None);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, needle) in [
            ("experiment = nope", "unknown experiment"),
            ("dt = 0.1", "missing required key"),
            ("experiment = elbow-scan\ndtt = 1", "unknown key 'dtt'"),
            ("experiment = elbow-scan\nell 3", "expected 'key = value'"),
            ("experiment = elbow-scan\nell = 3\nell = 4", "set twice"),
        ] {
            let err = Config::parse(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err}");
            assert!(!err.contains('\n'));
        }
        let cfg = Config::parse("experiment = elbow-scan\nell = three").unwrap();
        assert!(cfg.get::<usize>("ell").unwrap_err().to_string().contains("line 2"));
        let cfg = Config::parse("experiment = elbow-scan\nn = 2.5").unwrap();
        assert!(cfg.sample_sizes(vec![]).is_err());
    }
}
