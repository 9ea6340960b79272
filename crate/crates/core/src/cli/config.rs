use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{invalid, Result};

/// Flat `key = value` settings. Later sources override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => s.set(k.trim(), v.trim()),
                _ => return invalid(format!("line {}: expected key = value, got '{raw}'", no + 1)),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Apply `key=value` command-line overrides.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for o in overrides {
            match o.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => self.set(k.trim(), v.trim()),
                _ => return invalid(format!("override '{o}' is not of the form key=value")),
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .or_else(|_| invalid(format!("cannot parse '{v}' for key '{key}'"))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse().or_else(|_| invalid(format!("cannot parse '{x}' in key '{key}'"))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Reject keys outside `allowed`; a trailing `*` in an allowed entry
    /// matches any numeric suffix (e.g. `lambda*` matches `lambda2`).
    pub fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for key in self.keys() {
            let ok = allowed.iter().any(|a| match a.strip_suffix('*') {
                Some(stem) => key
                    .strip_prefix(stem)
                    .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())),
                None => *a == key,
            });
            if !ok {
                return invalid(format!("unknown setting '{key}' (allowed: {})", allowed.join(", ")));
            }
        }
        Ok(())
    }
}

/// The 1-based index in keys like `lambda3`.
pub fn indexed_key(key: &str, stem: &str) -> Option<usize> {
    key.strip_prefix(stem).and_then(|r| r.parse().ok())
}
