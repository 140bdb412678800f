//! Name-keyed registries of interchangeable strategies.
//!
//! Built-in maps, potentials, flows and initial states are selected at
//! runtime through labels such as `rotation(0.5)` or `constant(1,0)`. A
//! [`Registry`] maps the label name to a constructor that receives the
//! parsed argument list.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("malformed label `{0}`")]
    Malformed(String),
    #[error("unknown {kind} `{name}` (known: {known})")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: String,
        got: usize,
    },
    #[error("`{name}`: invalid argument `{arg}`: {reason}")]
    InvalidArgument {
        name: String,
        arg: String,
        reason: String,
    },
}

/// A parsed `name(arg, arg, ...)` label. Arguments are kept as trimmed text;
/// constructors decide how to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub name: String,
    pub args: Vec<String>,
}

impl Label {
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let text = text.trim();
        let malformed = || RegistryError::Malformed(text.to_string());
        let (name, args) = match text.find('(') {
            None => (text, Vec::new()),
            Some(open) => {
                let inner = text[open + 1..].strip_suffix(')').ok_or_else(malformed)?;
                if inner.contains('(') || inner.contains(')') {
                    return Err(malformed());
                }
                let args = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(|a| a.trim().to_string()).collect()
                };
                (&text[..open], args)
            }
        };
        let name = name.trim();
        let valid_name = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !valid_name || args.iter().any(|a| a.is_empty()) {
            return Err(malformed());
        }
        Ok(Self {
            name: name.to_string(),
            args,
        })
    }

    pub fn expect_arity(&self, allowed: &[usize]) -> Result<(), RegistryError> {
        if allowed.contains(&self.args.len()) {
            Ok(())
        } else {
            Err(RegistryError::Arity {
                name: self.name.clone(),
                expected: allowed
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(" or "),
                got: self.args.len(),
            })
        }
    }

    pub fn f64_arg(&self, index: usize) -> Result<f64, RegistryError> {
        let raw = &self.args[index];
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| RegistryError::InvalidArgument {
                name: self.name.clone(),
                arg: raw.clone(),
                reason: "expected a finite number".into(),
            })
    }

    pub fn f64_args(&self) -> Result<Vec<f64>, RegistryError> {
        (0..self.args.len()).map(|i| self.f64_arg(i)).collect()
    }

    pub fn usize_arg(&self, index: usize) -> Result<usize, RegistryError> {
        let raw = &self.args[index];
        raw.parse::<usize>()
            .map_err(|_| RegistryError::InvalidArgument {
                name: self.name.clone(),
                arg: raw.clone(),
                reason: "expected a non-negative integer".into(),
            })
    }

    /// `key=value` style argument, e.g. `hamiltonian(H1=saddle)`.
    pub fn keyed_arg(&self, index: usize, key: &str) -> Result<String, RegistryError> {
        let raw = &self.args[index];
        match raw.split_once('=') {
            Some((k, v)) if k.trim().eq_ignore_ascii_case(key) => Ok(v.trim().to_string()),
            Some(_) => Err(RegistryError::InvalidArgument {
                name: self.name.clone(),
                arg: raw.clone(),
                reason: format!("expected `{key}=...`"),
            }),
            None => Ok(raw.clone()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.name)
        } else {
            write!(f, "{}({})", self.name, self.args.join(","))
        }
    }
}

type Constructor<T> = Box<dyn Fn(&Label) -> Result<Box<T>, RegistryError> + Send + Sync>;

struct Entry<T: ?Sized> {
    usage: &'static str,
    description: &'static str,
    build: Constructor<T>,
}

/// Name → constructor table for one family of strategies.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register<F>(
        &mut self,
        name: &'static str,
        usage: &'static str,
        description: &'static str,
        build: F,
    ) -> &mut Self
    where
        F: Fn(&Label) -> Result<Box<T>, RegistryError> + Send + Sync + 'static,
    {
        self.entries.insert(
            name,
            Entry {
                usage,
                description,
                build: Box::new(build),
            },
        );
        self
    }

    pub fn build(&self, label: &Label) -> Result<Box<T>, RegistryError> {
        let entry = self
            .entries
            .get(label.name.as_str())
            .ok_or_else(|| RegistryError::Unknown {
                kind: self.kind,
                name: label.name.clone(),
                known: self.names().collect::<Vec<_>>().join(", "),
            })?;
        (entry.build)(label)
    }

    pub fn build_str(&self, text: &str) -> Result<Box<T>, RegistryError> {
        self.build(&Label::parse(text)?)
    }

    /// Registered names, alphabetized.
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    /// `(usage, description)` pairs, alphabetized by name.
    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .values()
            .map(|e| (e.usage, e.description))
            .collect()
    }
}
