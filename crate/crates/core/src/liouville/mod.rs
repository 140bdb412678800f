//! Classical transport `∂ψ/∂t = −v·∇ψ` as unitary evolution on a register.
//!
//! With `Ĥ₂ = ½(p̂·v + v·p̂)` and `p̂ = −iħ∇`, `exp(−itĤ₂/ħ)` advects the
//! field along the flow, `ψ(x, t) = ψ₀(Φ_{−t}(x))`, whenever `div v = 0`. The
//! generator is rewritten as `(i/ħ)Σ_k[p̂_k², u_k]` and exponentiated by a
//! four-factor group commutator of diagonal phases.

mod commutator;
mod convergence;
mod flow;
mod generator;
mod oracle;
mod upotential;

pub use commutator::{
    commutator_step, evolve_classical, ClassicalRun, CommutatorPlan, CommutatorStepper, NormRecord, TauSign,
};
pub use convergence::{global_convergence, single_step_convergence, GlobalSweep, StepMeasure};
pub use flow::{
    divergence_report, flow_from_hamiltonian, flow_registry, symplectic_form, DivergenceReport, HamiltonianFlow,
    HamiltonianFlowSpec, TabulatedFlow, DIVERGENCE_TOL,
};
pub use generator::{
    liouville_generator_spectrum_check, GeneratorCheck, Generators, ProbeSet, COMMUTATOR_C, COMMUTATOR_FLOOR,
    GENERATOR_CAP, HERMITICITY_TOL,
};
pub use oracle::{characteristics_oracle, OracleOptions};
pub use upotential::{build_u, UPotential};

use thiserror::Error;

use crate::qreg::QregError;

#[derive(Debug, Error)]
pub enum LiouvilleError {
    #[error(transparent)]
    Qreg(#[from] QregError),
    #[error("flow has dimension {flow} but the grid has {grid} axes")]
    DimensionMismatch { flow: usize, grid: usize },
    #[error("phase-space dimension must be even and positive, got {0}")]
    OddPhaseDim(usize),
    #[error("dense generator limited to {cap} points, got {points}")]
    TooLarge { points: usize, cap: usize },
    #[error("register grid does not match the operator grid")]
    GridMismatch,
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("characteristic ending at {point:?} left the safety box (relative amplitude {amplitude:e})")]
    LeftSafetyBox { point: Vec<f64>, amplitude: f64 },
}

pub type Result<T> = std::result::Result<T, LiouvilleError>;
