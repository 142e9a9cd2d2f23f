//! Flat `key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment and blank lines are
//! skipped. Keys are case-insensitive and `-` and `_` are interchangeable,
//! so `alpha-over-pi` and `ALPHA_OVER_PI` name the same setting. A value
//! given on the command line always wins over the file, and the file wins
//! over built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Every key any subcommand reads from a config file.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "alpha_over_pi",
    "beta",
    "n",
    "method",
    "schedule",
    "final_schedule",
    "alpha_min",
    "alpha_max",
    "steps",
    "beta_min",
    "beta_max",
    "budget",
    "coarse_alpha",
    "coarse_beta",
    "stages",
    "candidates",
    "m1",
    "m2",
    "alpha_max_over_pi",
    "alpha_points",
    "theta",
    "tau_min",
    "tau_max",
    "samples",
    "u_max",
    "n_points",
    "doublings",
    "decay_threshold",
];

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    source: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingInput { path: path.to_path_buf(), source: e })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let bad = |line: usize, reason: String| CliError::BadInput {
            path: path.to_path_buf(),
            reason: format!("line {line}: {reason}"),
        };
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| bad(i + 1, format!("expected 'key = value', got '{line}'")))?;
            let key = normalize_key(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(bad(i + 1, format!("unknown key '{}'", k.trim())));
            }
            let value = v.trim();
            if value.is_empty() {
                return Err(bad(i + 1, format!("'{key}' has no value")));
            }
            if values.insert(key.clone(), value.to_string()).is_some() {
                return Err(bad(i + 1, format!("'{key}' given twice")));
            }
        }
        Ok(Self { source: Some(path.to_path_buf()), values })
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    /// Comma-separated list.
    pub fn get_list<T>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key).map(|v| v.split(',').map(|item| parse_value(key, item.trim())).collect()).transpose()
    }
}

fn parse_value<T>(key: &str, v: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    v.parse().map_err(|e| CliError::Validation(format!("config value for '{key}' ('{v}'): {e}")))
}

/// Flag, then config file, then default.
pub fn resolve<T>(flag: Option<T>, config: &ConfigFile, key: &str, default: T) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    Ok(match flag {
        Some(v) => v,
        None => config.get(key)?.unwrap_or(default),
    })
}

pub fn resolve_opt<T>(flag: Option<T>, config: &ConfigFile, key: &str) -> CliResult<Option<T>>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.get(key),
    }
}

pub fn resolve_list<T>(flag: Option<Vec<T>>, config: &ConfigFile, key: &str, default: &[T]) -> CliResult<Vec<T>>
where
    T: FromStr + Clone,
    T::Err: Display,
{
    Ok(match flag {
        Some(v) => v,
        None => config.get_list(key)?.unwrap_or_else(|| default.to_vec()),
    })
}
