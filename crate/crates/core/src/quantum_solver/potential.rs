use std::path::Path;

use crate::registry::{Label, Registry, RegistryError};

/// Scalar potential `V(x)` on configuration space.
pub trait Potential: Send + Sync {
    fn name(&self) -> String;

    /// `V(x)` for a particle of the given mass.
    fn value(&self, x: &[f64], mass: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Free;

impl Potential for Free {
    fn name(&self) -> String {
        "free".into()
    }
    fn value(&self, _: &[f64], _: f64) -> f64 {
        0.0
    }
}

/// `½ m ω² |x|²`.
#[derive(Debug, Clone, Copy)]
pub struct Harmonic {
    pub omega: f64,
}

impl Potential for Harmonic {
    fn name(&self) -> String {
        format!("harmonic({})", self.omega)
    }
    fn value(&self, x: &[f64], mass: f64) -> f64 {
        0.5 * mass * self.omega * self.omega * x.iter().map(|v| v * v).sum::<f64>()
    }
}

/// `λ |x|⁴`.
#[derive(Debug, Clone, Copy)]
pub struct Quartic {
    pub lambda: f64,
}

impl Potential for Quartic {
    fn name(&self) -> String {
        format!("quartic({})", self.lambda)
    }
    fn value(&self, x: &[f64], _: f64) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        self.lambda * r2 * r2
    }
}

/// Piecewise-linear 1-D potential from `(x, V)` samples; constant beyond the ends.
#[derive(Debug, Clone)]
pub struct Tabulated {
    label: String,
    xs: Vec<f64>,
    vs: Vec<f64>,
}

impl Tabulated {
    pub fn new(label: impl Into<String>, mut samples: Vec<(f64, f64)>) -> Result<Self, String> {
        if samples.len() < 2 {
            return Err("need at least two samples".into());
        }
        if samples.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err("non-finite sample".into());
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err("duplicate x sample".into());
        }
        Ok(Self {
            label: label.into(),
            xs: samples.iter().map(|s| s.0).collect(),
            vs: samples.iter().map(|s| s.1).collect(),
        })
    }

    /// Parses `x,V` rows; a non-numeric first row is taken as a header.
    pub fn from_csv_str(label: impl Into<String>, text: &str) -> Result<Self, String> {
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [x, v] => x.parse::<f64>().ok().zip(v.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(s) => samples.push(s),
                None if i == 0 => continue,
                None => return Err(format!("line {}: expected `x,V`", i + 1)),
            }
        }
        Self::new(label, samples)
    }

    pub fn from_csv_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_csv_str(format!("tabulated({})", path.display()), &text)
    }
}

impl Potential for Tabulated {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn value(&self, x: &[f64], _: f64) -> f64 {
        let x = x[0];
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.vs[0];
        }
        if x >= self.xs[n - 1] {
            return self.vs[n - 1];
        }
        let i = self.xs.partition_point(|&s| s <= x) - 1;
        let w = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.vs[i] * (1.0 - w) + self.vs[i + 1] * w
    }
}

pub fn potential_registry() -> Registry<dyn Potential> {
    let mut reg: Registry<dyn Potential> = Registry::new("potential");
    reg.register("free", "free", "V = 0", |l: &Label| {
        l.expect_arity(&[0])?;
        Ok(Box::new(Free))
    })
    .register(
        "harmonic",
        "harmonic(omega)",
        "V = m omega^2 |x|^2 / 2",
        |l: &Label| {
            l.expect_arity(&[1])?;
            Ok(Box::new(Harmonic { omega: l.f64_arg(0)? }))
        },
    )
    .register("quartic", "quartic(lambda)", "V = lambda |x|^4", |l: &Label| {
        l.expect_arity(&[1])?;
        Ok(Box::new(Quartic { lambda: l.f64_arg(0)? }))
    })
    .register(
        "tabulated",
        "tabulated(path)",
        "piecewise-linear V from a CSV of x,V rows",
        |l: &Label| {
            l.expect_arity(&[1])?;
            Tabulated::from_csv_file(Path::new(&l.args[0]))
                .map(|t| Box::new(t) as Box<dyn Potential>)
                .map_err(|reason| RegistryError::InvalidArgument {
                    name: l.name.clone(),
                    arg: l.args[0].clone(),
                    reason,
                })
        },
    );
    reg
}
