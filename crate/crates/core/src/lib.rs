//! Quanputer simulation core.
//!
//! Reversible discrete dynamical systems and their linear costate extension,
//! grid-discretized quantum registers, split-operator (Trotter) evolution of
//! Schrödinger problems, and classical transport problems solved as unitary
//! Liouville evolution through a four-exponential group-commutator step.
//!
//! Every numerical scheme in this crate ships with an independent oracle
//! (dense eigendecomposition, characteristics backtracing, dense matrix
//! exponentials) and reports its accuracy through [`ConvergenceReport`].

pub mod convergence;
pub mod dynsys;
pub mod field;
pub mod linalg;
pub mod liouville;
pub mod opverify;
pub mod qreg;
pub mod quantum_solver;
pub mod registry;

pub use convergence::{fit_order, format_f64, ConvergenceReport, ExpectedOrder, OrderFit};
pub use registry::{Label, Registry, RegistryError};

pub use num_complex::Complex64;
