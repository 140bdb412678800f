use num_complex::Complex64;

use crate::qreg::{GridSpec, QregError, QuantumRegister};
use crate::registry::{Label, Registry, RegistryError};

/// Recipe for an initial register on a given grid.
pub trait InitialState: Send + Sync {
    fn name(&self) -> String;

    fn prepare(&self, grid: &GridSpec) -> Result<QuantumRegister, QregError>;
}

/// `∏_a exp(−(x_a − x0)²/(4σ²) + i p0 x_a/ħ)`, the same profile on every axis.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub fn amplitude(&self, x: &[f64], hbar: f64) -> Complex64 {
        x.iter()
            .map(|&xa| {
                let d = xa - self.x0;
                Complex64::from_polar((-d * d / (4.0 * self.sigma * self.sigma)).exp(), self.p0 * xa / hbar)
            })
            .product()
    }
}

impl InitialState for Gaussian {
    fn name(&self) -> String {
        format!("gaussian({},{},{})", self.x0, self.p0, self.sigma)
    }
    fn prepare(&self, grid: &GridSpec) -> Result<QuantumRegister, QregError> {
        let hbar = grid.hbar();
        QuantumRegister::from_sampler(grid.clone(), |x| self.amplitude(x, hbar))
    }
}

/// Basis state `|n⟩` by flat index.
#[derive(Debug, Clone, Copy)]
pub struct Basis {
    pub index: usize,
}

impl InitialState for Basis {
    fn name(&self) -> String {
        format!("basis({})", self.index)
    }
    fn prepare(&self, grid: &GridSpec) -> Result<QuantumRegister, QregError> {
        if self.index >= grid.total_points() {
            return Err(QregError::InvalidArgument(format!(
                "basis index {} outside grid of {} points",
                self.index,
                grid.total_points()
            )));
        }
        QuantumRegister::basis(grid.clone(), &grid.unravel(self.index))
    }
}

pub fn state_registry() -> Registry<dyn InitialState> {
    let mut reg: Registry<dyn InitialState> = Registry::new("initial state");
    reg.register(
        "gaussian",
        "gaussian(x0,p0,sigma)",
        "Gaussian wavepacket centred at x0 with mean momentum p0",
        |l: &Label| {
            l.expect_arity(&[3])?;
            let sigma = l.f64_arg(2)?;
            if sigma <= 0.0 {
                return Err(RegistryError::InvalidArgument {
                    name: l.name.clone(),
                    arg: l.args[2].clone(),
                    reason: "sigma must be positive".into(),
                });
            }
            Ok(Box::new(Gaussian {
                x0: l.f64_arg(0)?,
                p0: l.f64_arg(1)?,
                sigma,
            }))
        },
    )
    .register("basis", "basis(n)", "grid basis state |n>", |l: &Label| {
        l.expect_arity(&[1])?;
        Ok(Box::new(Basis { index: l.usize_arg(0)? }))
    });
    reg
}
