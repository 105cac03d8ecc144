//! Run configuration and typed access to experiment parameters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use entinflate::measures::CutPolicy;

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ENTINFLATE_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Num,
    Int,
    /// Comma-separated numbers.
    List,
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: ParamKind,
    pub default: &'static str,
    pub help: &'static str,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub id: String,
    /// `--set key=value` pairs, validated against the experiment's table.
    pub overrides: BTreeMap<String, String>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cut_policy: Option<CutPolicy>,
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(id: impl Into<String>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            id: id.into(),
            overrides: BTreeMap::new(),
            seed: 1,
            out_dir: out_dir.into(),
            cut_policy: None,
            jobs: 1,
        }
    }

    pub fn with_set(mut self, key: &str, value: &str) -> Self {
        self.overrides.insert(key.to_string(), value.to_string());
        self
    }
}

/// Splits `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::Usage(format!("expected key=value, got {s:?}"))),
    }
}

/// Resolved parameters: defaults overlaid with overrides, every value parsed once up front.
#[derive(Clone, Debug)]
pub struct Params {
    values: BTreeMap<&'static str, String>,
}

impl Params {
    pub fn resolve(specs: &[ParamSpec], overrides: &BTreeMap<String, String>) -> Result<Self> {
        let mut values: BTreeMap<&'static str, String> =
            specs.iter().map(|p| (p.key, p.default.to_string())).collect();
        for (k, v) in overrides {
            match specs.iter().find(|p| p.key == k) {
                Some(p) => {
                    values.insert(p.key, v.clone());
                }
                None => {
                    let known: Vec<&str> = specs.iter().map(|p| p.key).collect();
                    return Err(CliError::Usage(format!(
                        "unknown parameter {k:?} (known: {})",
                        known.join(", ")
                    )));
                }
            }
        }
        let params = Self { values };
        for p in specs {
            match p.kind {
                ParamKind::Num => params.f64(p.key).map(drop)?,
                ParamKind::Int => params.usize(p.key).map(drop)?,
                ParamKind::List => params.list(p.key).map(drop)?,
            }
        }
        Ok(params)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("parameter {key} is not declared"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.raw(key);
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::Usage(format!("parameter {key}={v:?} is not a number")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.raw(key);
        v.parse::<usize>()
            .map_err(|_| CliError::Usage(format!("parameter {key}={v:?} is not a non-negative integer")))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.raw(key)
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Usage(format!("parameter {key}: bad list entry {x:?}")))
            })
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&'static str, &str)> {
        self.values.iter().map(|(k, v)| (*k, v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECS: &[ParamSpec] = &[
        ParamSpec { key: "rounds", kind: ParamKind::Int, default: "2", help: "" },
        ParamSpec { key: "zs", kind: ParamKind::List, default: "0.1,0.2", help: "" },
    ];

    fn over(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn overrides_replace_defaults() {
        let p = Params::resolve(SPECS, &over(&[("rounds", "3")])).unwrap();
        assert_eq!(p.usize("rounds").unwrap(), 3);
        assert_eq!(p.list("zs").unwrap(), vec![0.1, 0.2]);
        let p = Params::resolve(SPECS, &over(&[("zs", "0.3")])).unwrap();
        assert_eq!(p.list("zs").unwrap(), vec![0.3]);
    }

    #[test]
    fn unknown_and_malformed_values_are_usage_errors() {
        assert!(matches!(Params::resolve(SPECS, &over(&[("nope", "1")])), Err(CliError::Usage(_))));
        assert!(matches!(Params::resolve(SPECS, &over(&[("rounds", "x")])), Err(CliError::Usage(_))));
        assert!(matches!(Params::resolve(SPECS, &over(&[("zs", "0.1,a")])), Err(CliError::Usage(_))));
    }

    #[test]
    fn assignments_split_on_the_first_equals() {
        assert_eq!(parse_assignment("a=b=c").unwrap(), ("a".into(), "b=c".into()));
        assert!(parse_assignment("=1").is_err());
        assert!(parse_assignment("abc").is_err());
    }
}
