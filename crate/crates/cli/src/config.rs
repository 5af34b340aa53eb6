//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parsed file; keys are unique, `#` starts a comment.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", no + 1);
            };
            let key = k.trim().replace('-', "_");
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                bail!("config line {}: duplicate key {key:?}", no + 1);
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.entries.keys() {
            if !allowed.contains(&k.as_str()) {
                bail!("unknown config key {k:?}; allowed: {}", allowed.join(", "));
            }
        }
        Ok(())
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("config key {key}: {e}")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_comments_and_dashes() {
        let c = ConfigFile::parse("# study\nn0 = 8\nedge-points=6 # more\n\n").unwrap();
        assert_eq!(c.get::<usize>("n0").unwrap(), Some(8));
        assert_eq!(c.get::<usize>("edge_points").unwrap(), Some(6));
        assert_eq!(c.get::<usize>("levels").unwrap(), None);
        assert!(c.check_keys(&["n0"]).is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(ConfigFile::parse("n0 8").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
        assert!(ConfigFile::parse("n0 = x").unwrap().get::<usize>("n0").is_err());
    }
}
