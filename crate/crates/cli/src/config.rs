//! Flat `key = value` run configuration.
//!
//! Values given on the command line win over the file, which wins over the
//! built-in defaults. Keys are the long flag names (`lambda`, `depth`, `N`).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliResult;

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// CLI value, else the file value, else `default`.
    pub fn pick<T>(&self, cli: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(cli, key)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, cli: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.values.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| format!("config key {key} = {v}: {e}").into()),
            None => Ok(None),
        }
    }
}

pub fn check_lambda(lambda: f64) -> CliResult<f64> {
    if lambda > 0.0 && lambda <= 1.0 {
        Ok(lambda)
    } else {
        Err(format!("lambda must lie in (0, 1], got {lambda}").into())
    }
}

pub fn check_count(name: &str, n: usize) -> CliResult<usize> {
    if n >= 1 {
        Ok(n)
    } else {
        Err(format!("{name} must be at least 1").into())
    }
}
