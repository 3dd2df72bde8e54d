//! Plain `key = value` settings files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys use the long flag
//! names, with `-` and `_` interchangeable.

use std::collections::BTreeMap;
use std::str::FromStr;

/// Parsed settings, keyed by normalized flag name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

/// Keys a settings file may set.
pub const KEYS: [&str; 17] = [
    "problem", "scheme", "k", "levels", "theta", "max_dofs", "rho1", "rho2", "a11", "c11", "d11", "gamma", "tol",
    "out", "seed", "no_timing", "max_iter",
];

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{}`", i + 1, k.trim()));
            }
            if values.insert(key, v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key `{}`", i + 1, k.trim()));
            }
        }
        Ok(ConfigFile { values })
    }

    /// Typed value of `key`, if present.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("config key `{key}`: {e}")))
            .transpose()
    }
}
