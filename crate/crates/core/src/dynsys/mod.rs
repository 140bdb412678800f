//! Time-reversible discrete dynamical systems and their linear costate
//! extension.
//!
//! A regular map `s(k+1) = φ(s(k))` is extended by a costate `l(k)` that
//! evolves linearly, `lₙ(k+1) = lₘ(k) (M⁻¹)ₘₙ(s(k+1))` with `M = ∂φ/∂s`.
//! The costate is driven by the state and the pair is equivalent to the
//! original system. The continuum limit of the same construction lives in
//! [`continuum`].

mod continuum;
mod maps;
mod trajectory;

pub use continuum::{
    hamiltonian_drift, integrate_continuum, ContinuumExtension, ContinuumSample,
    JACOBIAN_CONSISTENCY_TOL,
};
pub use maps::{map_registry, Cubic1d, DiscreteMap, FnMap, LinearMap, Quadratic1d};
pub use trajectory::{run_extended, ExtendedTrajectory};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::field::central_difference_jacobian;

#[derive(Debug, Error)]
pub enum DynsysError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("irregular map (det = {det:e}): no inverse exists at this point")]
    Irregular { det: f64 },
    #[error("map has no inverse and Newton fallback is disabled")]
    NoInverse,
    #[error("Newton inversion did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("irregular map at step {step}; trajectory truncated")]
    IrregularAt {
        step: usize,
        partial: Box<ExtendedTrajectory>,
    },
    #[error("analytic flow Jacobian disagrees with finite differences (max error {max_error:e})")]
    InconsistentJacobian { max_error: f64 },
    #[error("invalid time step: {0}")]
    InvalidStep(String),
}

pub type Result<T> = std::result::Result<T, DynsysError>;

/// Central-difference step used when a map has no analytic Jacobian.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// `M[(n, m)] = ∂φₙ/∂sₘ` at one point, with the regularity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    pub entries: DMatrix<f64>,
    pub eval_point: Vec<f64>,
    /// Zero for non-square Jacobians.
    pub det: f64,
    /// `‖M‖∞ ‖M⁻¹‖∞`, infinite when irregular.
    pub condition_estimate: f64,
    pub regular: bool,
}

impl JacobianMatrix {
    pub fn new(entries: DMatrix<f64>, eval_point: Vec<f64>) -> Self {
        if !entries.is_square() {
            return Self {
                entries,
                eval_point,
                det: 0.0,
                condition_estimate: f64::INFINITY,
                regular: false,
            };
        }
        let dim = entries.nrows() as i32;
        let det = entries.determinant();
        let norm = inf_norm(&entries);
        let regular = det.is_finite() && det.abs() > 1e-12 * norm.powi(dim);
        let condition_estimate = if regular {
            entries
                .clone()
                .try_inverse()
                .map(|inv| norm * inf_norm(&inv))
                .unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        Self {
            entries,
            eval_point,
            det,
            condition_estimate,
            regular,
        }
    }

    fn require_regular(&self) -> Result<()> {
        if self.regular {
            Ok(())
        } else {
            Err(DynsysError::Irregular { det: self.det })
        }
    }
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(DynsysError::DimensionMismatch { expected, got })
    }
}

pub fn step_forward(map: &dyn DiscreteMap, s: &[f64]) -> Result<Vec<f64>> {
    check_dim(map.input_dim(), s.len())?;
    Ok(map.forward(s))
}

/// Analytic Jacobian when the map has one, else central differences with step `h`.
pub fn jacobian_at(map: &dyn DiscreteMap, s: &[f64], h: f64) -> JacobianMatrix {
    let entries = map
        .jacobian(s)
        .unwrap_or_else(|| central_difference_jacobian(|x| map.forward(x), s, h));
    JacobianMatrix::new(entries, s.to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Permit Newton iteration when the map has no analytic inverse.
    pub allow_newton: bool,
    pub max_iterations: usize,
    /// Relative residual tolerance: `‖φ(s) − s_next‖ ≤ tol · (1 + ‖s_next‖)`.
    pub tolerance: f64,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            allow_newton: true,
            max_iterations: 50,
            tolerance: 1e-12,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

/// Recovers `s` with `φ(s) = s_next`.
pub fn step_backward(
    map: &dyn DiscreteMap,
    s_next: &[f64],
    opts: &NewtonOptions,
) -> Result<Vec<f64>> {
    check_dim(map.output_dim(), s_next.len())?;
    if map.input_dim() != map.output_dim() {
        return Err(DynsysError::Irregular { det: 0.0 });
    }
    if let Some(s) = map.inverse(s_next) {
        return Ok(s);
    }
    if !opts.allow_newton {
        return Err(DynsysError::NoInverse);
    }

    let target = DVector::from_column_slice(s_next);
    let tol = opts.tolerance * (1.0 + norm(s_next));
    let residual_of = |s: &DVector<f64>| DVector::from_vec(map.forward(s.as_slice())) - &target;
    let newton_update = |s: &DVector<f64>, r: &DVector<f64>| -> Result<DVector<f64>> {
        let jac = jacobian_at(map, s.as_slice(), opts.fd_step);
        jac.require_regular()?;
        jac.entries
            .lu()
            .solve(r)
            .ok_or(DynsysError::Irregular { det: jac.det })
    };

    let mut s = target.clone();
    let mut r = residual_of(&s);
    for _ in 0..opts.max_iterations {
        if r.norm() <= tol {
            // One polishing step; keep it only if it helps.
            if let Ok(delta) = newton_update(&s, &r) {
                let polished = &s - delta;
                if residual_of(&polished).norm() <= r.norm() {
                    s = polished;
                }
            }
            return Ok(s.as_slice().to_vec());
        }
        let delta = newton_update(&s, &r)?;
        s -= delta;
        r = residual_of(&s);
    }
    if r.norm() <= tol {
        return Ok(s.as_slice().to_vec());
    }
    Err(DynsysError::NoConvergence {
        iterations: opts.max_iterations,
        residual: r.norm(),
    })
}

/// `l′ₙ = lₘ (M⁻¹)ₘₙ` with `M` evaluated at `s_next`, i.e. `l′ = M⁻ᵀ l`.
pub fn costate_step(map: &dyn DiscreteMap, s_next: &[f64], l: &[f64]) -> Result<Vec<f64>> {
    check_dim(map.output_dim(), s_next.len())?;
    check_dim(map.output_dim(), l.len())?;
    if map.input_dim() != map.output_dim() {
        return Err(DynsysError::Irregular { det: 0.0 });
    }
    let jac = jacobian_at(map, s_next, DEFAULT_FD_STEP);
    jac.require_regular()?;
    let rhs = DVector::from_column_slice(l);
    let det = jac.det;
    let solved = jac
        .entries
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or(DynsysError::Irregular { det })?;
    Ok(solved.as_slice().to_vec())
}

/// `H = Σₙ lₙ φₙ(s)`.
pub fn discrete_hamiltonian(map: &dyn DiscreteMap, s: &[f64], l: &[f64]) -> Result<f64> {
    let image = step_forward(map, s)?;
    check_dim(image.len(), l.len())?;
    Ok(image.iter().zip(l).map(|(a, b)| a * b).sum())
}
