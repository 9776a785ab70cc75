//! Flat key = value configuration files. Command-line flags always win;
//! unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(format!("config line {}: empty key", lineno + 1));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    /// Fails on any key outside the scenario's accepted set.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), String> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(format!(
                    "unknown config key `{key}` (accepted: {})",
                    allowed.join(", ")
                ));
            }
        }
        Ok(())
    }

    /// CLI value if given, else the config value, else the default.
    pub fn resolve<T>(&self, cli: Option<T>, key: &str, default: T) -> Result<T, String>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.resolve_opt(cli, key)?.unwrap_or(default))
    }

    /// CLI value if given, else the config value, else `None`.
    pub fn resolve_opt<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, String>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.entries.get(key) {
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| format!("config key `{key}`: cannot parse `{raw}`: {e}")),
            None => Ok(None),
        }
    }
}
