//! Scenario kinds, selected by name from [`kind_registry`].

mod bch;
mod commutator;
mod dynsys;
mod kernel;
mod liouville;
mod quantum;
mod trotter;

use std::sync::Arc;

use num_complex::Complex64;
use quanputer_core::qreg::GridSpec;
use quanputer_core::{ConvergenceReport, ExpectedOrder, Label, Registry, RegistryError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{with_default, KeySpec, Params};
use crate::{CliError, Result};

/// One file produced by a run, held in memory until the run completes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl OutputFile {
    pub fn text(name: impl Into<String>, contents: String) -> Self {
        Self {
            name: name.into(),
            contents: contents.into_bytes(),
        }
    }
}

/// A pass/fail verdict; any failed check makes the run exit with status 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    pub fn from_report(name: impl Into<String>, report: &ConvergenceReport) -> Self {
        Self::new(name, report.pass, report.summary_line())
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<OutputFile>,
    pub summary: Vec<String>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Per-run state handed to a kind: the single seeded generator.
pub struct RunContext {
    pub seed: u64,
    pub rng: ChaCha8Rng,
}

impl RunContext {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

pub trait ScenarioKind: Send + Sync {
    fn name(&self) -> &'static str;
    /// Every key the kind accepts; anything else is rejected.
    fn schema(&self) -> Vec<KeySpec>;
    fn run(&self, params: &Params, ctx: &mut RunContext) -> Result<Outcome>;
}

pub fn kind_registry() -> Registry<dyn ScenarioKind> {
    fn unit<K: ScenarioKind + Default + 'static>(l: &Label) -> std::result::Result<Box<dyn ScenarioKind>, RegistryError> {
        l.expect_arity(&[0])?;
        Ok(Box::new(K::default()))
    }
    let mut reg: Registry<dyn ScenarioKind> = Registry::new("scenario kind");
    reg.register("dynsys", "dynsys", "extended map trajectory with costate and pairing", unit::<dynsys::Dynsys>)
        .register("quantum", "quantum", "split-operator evolution of a grid wavefunction", unit::<quantum::Quantum>)
        .register("liouville", "liouville", "classical transport by the group-commutator step", unit::<liouville::Liouville>)
        .register("verify-bch", "verify-bch", "order of the group and resolvent commutator identities", unit::<bch::VerifyBch>)
        .register("verify-kernel", "verify-kernel", "Gaussian kinetic kernel against DFT quadrature", unit::<kernel::VerifyKernel>)
        .register(
            "convergence-trotter",
            "convergence-trotter",
            "Trotter error sweep against the dense propagator",
            unit::<trotter::ConvergenceTrotter>,
        )
        .register(
            "convergence-commutator",
            "convergence-commutator",
            "four-factor step sweep against a dense exponential or the characteristics oracle",
            unit::<commutator::ConvergenceCommutator>,
        );
    reg
}

fn grid_schema(axes: &'static str, bits: &'static str, lo: &'static str, hi: &'static str) -> Vec<KeySpec> {
    vec![
        with_default("grid.axes", axes),
        with_default("grid.bits", bits),
        with_default("grid.lo", lo),
        with_default("grid.hi", hi),
        with_default("grid.hbar", "1"),
    ]
}

/// `grid.bits`, `grid.lo` and `grid.hi` may each be a scalar (shared by all
/// axes) or one value per axis.
fn grid_from(p: &Params) -> Result<GridSpec> {
    let axes = p.usize("grid.axes")?;
    if axes == 0 {
        return Err(p.error("grid.axes", "must be positive").into());
    }
    let per_axis = |key: &str, values: Vec<f64>| -> Result<Vec<f64>> {
        match values.len() {
            1 => Ok(vec![values[0]; axes]),
            n if n == axes => Ok(values),
            n => Err(p.error(key, format!("expected 1 or {axes} values, got {n}")).into()),
        }
    };
    let bits = per_axis("grid.bits", p.usizes("grid.bits")?.into_iter().map(|b| b as f64).collect())?;
    let lo = per_axis("grid.lo", p.f64s("grid.lo")?)?;
    let hi = per_axis("grid.hi", p.f64s("grid.hi")?)?;
    let hbar = p.positive_f64("grid.hbar")?;
    let bits: Vec<u32> = bits.iter().map(|&b| b as u32).collect();
    let spacing = (0..axes)
        .map(|i| (hi[i] - lo[i]) / (1u64 << bits[i].min(62)) as f64)
        .collect();
    GridSpec::new(bits, spacing, lo, hbar).map_err(|e| p.error("grid", e.to_string()).into())
}

/// Builds a registry entry named by `key`, reporting bad labels as config errors.
fn build<T: ?Sized>(reg: &Registry<T>, p: &Params, key: &str) -> Result<Box<T>> {
    reg.build_str(&p.str(key)?)
        .map_err(|e| CliError::Config(p.error(key, e.to_string())))
}

fn expected_from(p: &Params, slope_key: &str, tol_key: &str) -> Result<Option<ExpectedOrder>> {
    Ok(match p.opt_f64(slope_key)? {
        Some(slope) => Some(ExpectedOrder {
            slope,
            tolerance: p.positive_f64(tol_key)?,
        }),
        None => None,
    })
}

fn blob_schema(center: &'static str, sigma: &'static str) -> Vec<KeySpec> {
    vec![with_default("state.center", center), with_default("state.sigma", sigma)]
}

/// `exp(−|x − c|²/(2σ²))`, unnormalized.
fn blob_from(p: &Params, dim: usize) -> Result<Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>> {
    let center = p.f64s("state.center")?;
    if center.len() != dim {
        return Err(p
            .error("state.center", format!("expected {dim} coordinates, got {}", center.len()))
            .into());
    }
    let sigma = p.positive_f64("state.sigma")?;
    Ok(Arc::new(move |x: &[f64]| {
        let r2: f64 = x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum();
        Complex64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
    }))
}

fn register_bytes(reg: &quanputer_core::qreg::QuantumRegister) -> Result<(Vec<u8>, Vec<u8>)> {
    let mut csv = Vec::new();
    reg.write_csv(&mut csv)?;
    let mut bin = Vec::new();
    reg.write_binary(&mut bin)?;
    Ok((csv, bin))
}
