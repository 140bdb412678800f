//! Sectioned `key = value` scenario configuration.
//!
//! ```text
//! # comment
//! seed = 7
//! [grid]
//! bits = 8
//! lo = -10
//! [sweep]
//! steps = 16, 32, 64
//! ```
//!
//! Keys before the first section header are top-level (`kind`, `seed`,
//! `output_dir`). Every other key is addressed as `section.key` and must be
//! declared in the scenario schema.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override => f.write_str("--set"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{origin}: duplicate key `{key}`")]
    Duplicate { key: String, origin: Origin },
    #[error("{origin}: unknown key `{key}`")]
    Unknown { key: String, origin: Origin },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("{origin}: invalid value for `{key}`: {reason}")]
    Invalid {
        key: String,
        origin: Origin,
        reason: String,
    },
    #[error("config declares kind `{declared}` but `{requested}` was requested")]
    KindMismatch { declared: String, requested: String },
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub origin: Origin,
}

/// Keys accepted outside any section.
pub const TOP_LEVEL_KEYS: &[&str] = &["kind", "seed", "output_dir"];

/// Parsed but not yet validated configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, Entry>,
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..i],
            _ => {}
        }
    }
    line
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RawConfig::default();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                let name = name.trim();
                if !valid_ident(name) {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        message: format!("invalid section name `{name}`"),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !valid_ident(key) {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    message: format!("invalid key `{key}`"),
                });
            }
            let full = match &section {
                Some(s) => format!("{s}.{key}"),
                None => key.to_string(),
            };
            cfg.insert(full, value.trim().to_string(), Origin::Line(line_no))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    fn insert(&mut self, key: String, value: String, origin: Origin) -> Result<(), ConfigError> {
        if self.entries.contains_key(&key) {
            return Err(ConfigError::Duplicate { key, origin });
        }
        self.entries.insert(key, Entry { value, origin });
        Ok(())
    }

    /// Applies `section.key=value`, replacing any file value.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Invalid {
                key: assignment.to_string(),
                origin: Origin::Override,
                reason: "expected section.key=value".into(),
            })?;
        let key = key.trim();
        if !key.split('.').all(valid_ident) || key.split('.').count() > 2 {
            return Err(ConfigError::Invalid {
                key: key.to_string(),
                origin: Origin::Override,
                reason: "malformed key".into(),
            });
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                origin: Origin::Override,
            },
        );
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Required,
    Optional,
    Value(&'static str),
}

/// One declared configuration key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeySpec {
    pub key: &'static str,
    pub default: Fallback,
}

pub const fn required(key: &'static str) -> KeySpec {
    KeySpec {
        key,
        default: Fallback::Required,
    }
}

pub const fn optional(key: &'static str) -> KeySpec {
    KeySpec {
        key,
        default: Fallback::Optional,
    }
}

pub const fn with_default(key: &'static str, value: &'static str) -> KeySpec {
    KeySpec {
        key,
        default: Fallback::Value(value),
    }
}

/// Validated parameters: every key is declared, every required key present.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    entries: BTreeMap<String, Entry>,
}

impl Params {
    /// Checks `raw` against `schema`. Unknown keys fail before any defaults
    /// are filled in.
    pub fn resolve(raw: &RawConfig, schema: &[KeySpec]) -> Result<Self, ConfigError> {
        for (key, entry) in &raw.entries {
            let declared = TOP_LEVEL_KEYS.contains(&key.as_str()) || schema.iter().any(|s| s.key == key);
            if !declared {
                return Err(ConfigError::Unknown {
                    key: key.clone(),
                    origin: entry.origin,
                });
            }
        }
        let mut entries = BTreeMap::new();
        for spec in schema {
            match (raw.get(spec.key), spec.default) {
                (Some(e), _) => {
                    entries.insert(spec.key.to_string(), e.clone());
                }
                (None, Fallback::Value(v)) => {
                    entries.insert(
                        spec.key.to_string(),
                        Entry {
                            value: v.to_string(),
                            origin: Origin::Default,
                        },
                    );
                }
                (None, Fallback::Optional) => {}
                (None, Fallback::Required) => {
                    return Err(ConfigError::Missing {
                        key: spec.key.to_string(),
                    })
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &Entry)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e))
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn entry(&self, key: &str) -> Result<&Entry, ConfigError> {
        self.entries.get(key).ok_or_else(|| ConfigError::Missing { key: key.into() })
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: key.into(),
            origin: self.entries.get(key).map_or(Origin::Default, |e| e.origin),
            reason: reason.into(),
        }
    }

    fn parse_with<T>(&self, key: &str, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, ConfigError> {
        let raw = unquote(&self.entry(key)?.value);
        f(raw).ok_or_else(|| self.invalid(key, format!("expected {what}, got `{raw}`")))
    }

    pub fn str(&self, key: &str) -> Result<String, ConfigError> {
        Ok(unquote(&self.entry(key)?.value).to_string())
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.parse_with(key, "a finite number", |s| s.parse::<f64>().ok().filter(|v| v.is_finite()))
    }

    pub fn positive_f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.f64(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, "must be positive"))
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.parse_with(key, "a non-negative integer", |s| s.parse().ok())
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        self.parse_with(key, "a non-negative integer", |s| s.parse().ok())
    }

    pub fn bool(&self, key: &str) -> Result<bool, ConfigError> {
        self.parse_with(key, "true or false", |s| s.parse().ok())
    }

    /// One of `choices`.
    pub fn choice(&self, key: &str, choices: &[&str]) -> Result<String, ConfigError> {
        let v = self.str(key)?;
        if choices.contains(&v.as_str()) {
            Ok(v)
        } else {
            Err(self.invalid(key, format!("expected one of {}, got `{v}`", choices.join(", "))))
        }
    }

    pub fn f64s(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        split_array(&self.entry(key)?.value)
            .into_iter()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.invalid(key, format!("`{s}` is not a finite number")))
            })
            .collect()
    }

    pub fn usizes(&self, key: &str) -> Result<Vec<usize>, ConfigError> {
        split_array(&self.entry(key)?.value)
            .into_iter()
            .map(|s| {
                s.parse::<usize>()
                    .map_err(|_| self.invalid(key, format!("`{s}` is not a non-negative integer")))
            })
            .collect()
    }

    pub fn strs(&self, key: &str) -> Result<Vec<String>, ConfigError> {
        Ok(split_array(&self.entry(key)?.value)
            .into_iter()
            .map(|s| unquote(s).to_string())
            .collect())
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        if self.has(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn opt_f64s(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        if self.has(key) {
            self.f64s(key).map(Some)
        } else {
            Ok(None)
        }
    }

    /// `expected` error for `key`, used by scenario kinds.
    pub fn error(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        self.invalid(key, reason)
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"')
        .and_then(|r| r.strip_suffix('"'))
        .unwrap_or(s)
}

/// Splits on commas outside parentheses; surrounding brackets are optional.
fn split_array(value: &str) -> Vec<&str> {
    let v = value.trim();
    let v = v
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(v);
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in v.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(v[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = v[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &[KeySpec] = &[
        required("run.steps"),
        with_default("run.dt", "0.5"),
        optional("run.x0"),
        with_default("map.name", "rotation(0.5)"),
    ];

    #[test]
    fn parses_sections_and_comments() {
        let raw = RawConfig::parse("seed = 3 # top\n\n[run]\nsteps = 10\nx0 = [1, 2.5]\n# done\n").unwrap();
        assert_eq!(raw.get("seed").unwrap().value, "3");
        assert_eq!(raw.get("run.steps").unwrap().origin, Origin::Line(4));
        let p = Params::resolve(&raw, SCHEMA).unwrap();
        assert_eq!(p.usize("run.steps").unwrap(), 10);
        assert_eq!(p.f64("run.dt").unwrap(), 0.5);
        assert_eq!(p.f64s("run.x0").unwrap(), vec![1.0, 2.5]);
        assert_eq!(p.str("map.name").unwrap(), "rotation(0.5)");
    }

    #[test]
    fn missing_and_unknown_keys() {
        let raw = RawConfig::parse("[run]\ndt = 1\n").unwrap();
        assert_eq!(
            Params::resolve(&raw, SCHEMA).unwrap_err(),
            ConfigError::Missing { key: "run.steps".into() }
        );
        let raw = RawConfig::parse("[run]\nsteps = 1\nstep = 2\n").unwrap();
        assert_eq!(
            Params::resolve(&raw, SCHEMA).unwrap_err(),
            ConfigError::Unknown {
                key: "run.step".into(),
                origin: Origin::Line(3)
            }
        );
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert!(matches!(RawConfig::parse("[run\n"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(RawConfig::parse("a = 1\nnonsense\n"), Err(ConfigError::Syntax { line: 2, .. })));
        assert!(matches!(
            RawConfig::parse("a = 1\na = 2\n"),
            Err(ConfigError::Duplicate { .. })
        ));
    }

    #[test]
    fn overrides_replace_values() {
        let mut raw = RawConfig::parse("[run]\nsteps = 1\n").unwrap();
        raw.set("run.steps=7").unwrap();
        raw.set("map.name = \"catmap\"").unwrap();
        let p = Params::resolve(&raw, SCHEMA).unwrap();
        assert_eq!(p.usize("run.steps").unwrap(), 7);
        assert_eq!(p.str("map.name").unwrap(), "catmap");
        assert!(raw.set("nonsense").is_err());
    }

    #[test]
    fn arrays_respect_parentheses() {
        assert_eq!(split_array("gaussian(0,1,2), basis(3)"), vec!["gaussian(0,1,2)", "basis(3)"]);
        assert_eq!(split_array("[]"), Vec::<&str>::new());
        assert_eq!(split_array("4"), vec!["4"]);
    }

    #[test]
    fn invalid_values_name_the_key() {
        let raw = RawConfig::parse("[run]\nsteps = ten\n").unwrap();
        let p = Params::resolve(&raw, SCHEMA).unwrap();
        let err = p.usize("run.steps").unwrap_err().to_string();
        assert!(err.contains("run.steps") && err.contains("line 2"), "{err}");
    }
}
