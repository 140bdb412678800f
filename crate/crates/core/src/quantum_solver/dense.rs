use num_complex::Complex64;

use super::{Potential, Result, SolverError};
use crate::linalg::{circulant, circulant_coefficients, hermiticity_defect, max_abs, CMatrix, CVector, HermitianPropagator};
use crate::qreg::{GridSpec, QuantumRegister};

/// Largest grid the dense oracle accepts.
pub const DENSE_CAP: usize = 4096;

const HERMITICITY_TOL: f64 = 1e-12;

/// Dense position-basis `p²/2m + V(x)` on a single-axis grid.
///
/// The kinetic block is the circulant built by summing `p_j²/2m` against the
/// DFT kernel directly, so it never touches the FFT path the solver uses.
pub struct DenseHamiltonian {
    pub matrix: CMatrix,
    pub grid: GridSpec,
}

impl DenseHamiltonian {
    pub fn new(grid: &GridSpec, potential: &dyn Potential, mass: f64) -> Result<Self> {
        if grid.axes() != 1 {
            return Err(SolverError::InvalidPlan("dense oracle needs a single-axis grid".into()));
        }
        let n = grid.points(0);
        if n > DENSE_CAP {
            return Err(SolverError::TooLarge { points: n, cap: DENSE_CAP });
        }
        let coeffs = circulant_coefficients(&grid.momenta(0), |p| p * p / (2.0 * mass));
        let mut matrix = circulant(&coeffs);
        for i in 0..n {
            matrix[(i, i)] += Complex64::new(potential.value(&[grid.position(0, i)], mass), 0.0);
        }
        Self::from_matrix(grid.clone(), matrix)
    }

    pub fn from_matrix(grid: GridSpec, matrix: CMatrix) -> Result<Self> {
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOL * max_abs(&matrix).max(1.0) {
            return Err(SolverError::NotHermitian { defect });
        }
        Ok(Self { matrix, grid })
    }

    pub fn propagator(&self) -> HermitianPropagator {
        HermitianPropagator::new(&self.matrix)
    }

    /// `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn energy(&self, reg: &QuantumRegister) -> Result<f64> {
        if reg.grid() != &self.grid {
            return Err(SolverError::GridMismatch);
        }
        let reg = reg.clone().into_position();
        let v = CVector::from_column_slice(reg.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re / reg.norm_sqr())
    }
}

/// `exp(−i t H/ħ) ψ` through an eigendecomposition of `H`.
pub fn exact_evolve(reg: &QuantumRegister, h: &DenseHamiltonian, t: f64) -> Result<QuantumRegister> {
    exact_evolve_with(reg, &h.propagator(), &h.grid, t)
}

/// [`exact_evolve`] with a reusable eigendecomposition.
pub fn exact_evolve_with(
    reg: &QuantumRegister,
    prop: &HermitianPropagator,
    grid: &GridSpec,
    t: f64,
) -> Result<QuantumRegister> {
    if reg.grid() != grid {
        return Err(SolverError::GridMismatch);
    }
    let reg = reg.clone().into_position();
    let out = prop.apply(reg.amplitudes(), t, grid.hbar());
    Ok(QuantumRegister::from_amplitudes(grid.clone(), out)?)
}
