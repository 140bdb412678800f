//! Split-operator evolution of `p²/2m + V(x)` on quantum registers.

mod convergence;
mod dense;
mod kernel;
mod potential;
mod split;
mod state;

pub use convergence::{trotter_convergence, ConvergenceMode, TrotterScenario};
pub use dense::{exact_evolve, exact_evolve_with, DenseHamiltonian, DENSE_CAP};
pub use kernel::{kernel_quadrature, kinetic_kernel};
pub use potential::{potential_registry, Free, Harmonic, Potential, Quartic, Tabulated};
pub use split::{records_to_csv, SplitOperator, StepRecord, TrotterPlan};
pub use state::{state_registry, Basis, Gaussian, InitialState};

use num_complex::Complex64;
use thiserror::Error;

use crate::qreg::QregError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Qreg(#[from] QregError),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("register grid does not match the plan grid")]
    GridMismatch,
    #[error("dense oracle limited to {cap} points, got {points}")]
    TooLarge { points: usize, cap: usize },
    #[error("Hamiltonian is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("kernel parameter a = {a} needs Re(a) >= 0 and a != 0")]
    InvalidA { a: Complex64 },
}

pub type Result<T> = std::result::Result<T, SolverError>;
