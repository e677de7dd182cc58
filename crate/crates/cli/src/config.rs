//! Flat `key=value` configuration files.
//!
//! Lines are `key=value`; blank lines and lines starting with `#` are
//! ignored. Command-line flags override file values. Each subcommand checks
//! the keys against its own known set, so a typo fails loudly.

use crate::usage;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn empty() -> Self {
        Config::default()
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", lineno + 1))?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    /// Fail on any key outside the command's vocabulary.
    pub fn check_keys(&self, known: &[&str]) -> anyhow::Result<()> {
        for key in self.values.keys() {
            if !known.contains(&key.as_str()) {
                return Err(usage(format!("unknown config key: {key}")));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Parsed value for `key`, or `None` when absent.
    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| usage(format!("invalid value for config key {key}: {raw:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_values_and_comments() {
        let cfg = Config::parse("# run setup\nmethod = mcmc\niterations=110000\n\n").unwrap();
        assert_eq!(cfg.raw("method"), Some("mcmc"));
        assert_eq!(cfg.get::<usize>("iterations").unwrap(), Some(110000));
        assert_eq!(cfg.get::<usize>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines_and_unknown_keys() {
        assert!(Config::parse("just words\n").is_err());
        let cfg = Config::parse("methd=mcmc\n").unwrap();
        let err = cfg.check_keys(&["method"]).unwrap_err();
        assert!(err.to_string().contains("methd"), "{err}");
    }

    #[test]
    fn bad_typed_value_is_a_usage_error() {
        let cfg = Config::parse("iterations=lots\n").unwrap();
        let err = cfg.get::<usize>("iterations").unwrap_err();
        assert!(err.to_string().contains("iterations"));
    }
}
