//! Grid-discretized quantum registers.

mod ancilla;
mod grid;
mod io;
mod register;

pub use ancilla::{phase_via_ancilla, AncillaReport, MAX_FRAC_BITS};
pub use grid::{GridSpec, MAX_BITS_PER_AXIS};
pub use io::{BINARY_MAGIC, BINARY_VERSION};
pub use register::{
    apply_coupled_phase, tensor_product, FnPhase, Observables, PhaseFunction, QuantumRegister,
    Representation, DEFAULT_JOINT_CAP,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QregError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("all samples vanish; cannot normalize")]
    ZeroState,
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("operation requires {expected:?} representation")]
    RepresentationMismatch { expected: Representation },
    #[error("axis {axis} out of range for {axes}-axis register")]
    AxisOutOfRange { axis: usize, axes: usize },
    #[error("phase function arity {got}, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("joint state needs {requested} amplitudes, cap is {cap}")]
    MemoryCap { requested: u128, cap: usize },
    #[error("ancilla not returned to |0>: residual weight {residual:e}")]
    AncillaNotUncomputed { residual: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed register dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QregError>;
