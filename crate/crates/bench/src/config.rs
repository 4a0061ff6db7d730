//! `key = value` files. Blank lines and `#` comments are ignored; a key may
//! appear once. Command-line flags are applied on top by the caller.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{config, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(config(format!("line {}: expected `key = value`", i + 1)));
            };
            let k = k.trim().to_ascii_lowercase();
            if k.is_empty() {
                return Err(config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Reject keys outside `allowed`. A trailing `.` in an allowed entry
    /// admits any key with that prefix.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.keys() {
            let ok = allowed
                .iter()
                .any(|a| if a.ends_with('.') { k.starts_with(a) } else { k == *a });
            if !ok {
                return Err(config(format!("unknown key '{k}'")));
            }
        }
        Ok(())
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_number(v).map_err(|e| config(format!("{key}: {e}")))).transpose()
    }

    pub fn count(&self, key: &str) -> Result<Option<usize>> {
        self.get(key).map(|v| parse_count(v).map_err(|e| config(format!("{key}: {e}")))).transpose()
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.get(key).map(split_list)
    }

    pub fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.list(key)
            .map(|items| {
                items
                    .iter()
                    .map(|s| parse_number(s).map_err(|e| config(format!("{key}: {e}"))))
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(config(format!("{key}: expected true/false, got '{v}'"))),
            })
            .transpose()
    }
}

pub fn split_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// A real number, also accepting `a/b` and `1e5`-style counts.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("bad number '{s}'"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

pub fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v = parse_number(s)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let c = Config::parse("# sweep\nn = 1e5  # desk\nroster=standard\n\nfamilies = weibull, gamma\n").unwrap();
        assert_eq!(c.count("n").unwrap(), Some(100_000));
        assert_eq!(c.get("roster"), Some("standard"));
        assert_eq!(c.list("families").unwrap(), vec!["weibull", "gamma"]);
        assert!(c.check_keys(&["n", "roster", "families"]).is_ok());
        assert!(c.check_keys(&["n", "roster"]).is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("n 5").is_err());
        assert!(Config::parse("n = 1\nn = 2").is_err());
        assert!(Config::parse("n = x").unwrap().count("n").is_err());
        assert!(Config::parse("n = 1.5").unwrap().count("n").is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_number("1/8").unwrap(), 0.125);
        assert!(parse_number("1/0").is_err());
    }
}
