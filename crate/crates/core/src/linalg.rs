//! Dense complex linear algebra shared by the oracles.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `m − m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// First-row coefficients `c[d] = (1/N) Σ_j f(p_j) e^{2πi j d / N}` of the
/// circulant matrix `F† diag(f(p)) F`, evaluated by direct summation.
///
/// `momenta[j]` must be the momentum of DFT bin `j`. The direct sum keeps
/// dense operators independent of the FFT code path they are used to check.
pub fn circulant_coefficients(momenta: &[f64], f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let n = momenta.len();
    let weights: Vec<f64> = momenta.iter().map(|&p| f(p)).collect();
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect();
    (0..n)
        .map(|d| {
            let sum: Complex64 = weights
                .iter()
                .enumerate()
                .map(|(j, w)| roots[(j * d) % n] * *w)
                .sum();
            sum / n as f64
        })
        .collect()
}

/// Dense circulant `M[r][c] = coeffs[(r − c) mod N]`.
pub fn circulant(coeffs: &[Complex64]) -> CMatrix {
    let n = coeffs.len();
    CMatrix::from_fn(n, n, |r, c| coeffs[(r + n - c) % n])
}

/// Eigendecomposition of a Hermitian matrix, reused to apply
/// `exp(−i t H / ħ)` for many `t`.
#[derive(Debug, Clone)]
pub struct HermitianPropagator {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianPropagator {
    pub fn new(h: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(h.clone());
        Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }

    /// `exp(−i t H / ħ) ψ`.
    pub fn apply(&self, psi: &[Complex64], t: f64, hbar: f64) -> Vec<Complex64> {
        let q = &self.eigenvectors;
        let v = CVector::from_column_slice(psi);
        let mut coeffs = q.adjoint() * v;
        for (c, &lambda) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= Complex64::from_polar(1.0, -lambda * t / hbar);
        }
        (q * coeffs).iter().copied().collect()
    }

    /// Dense `exp(−i t H / ħ)`.
    pub fn unitary(&self, t: f64, hbar: f64) -> CMatrix {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t / hbar);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
        scaled * q.adjoint()
    }
}

/// `‖a − b‖₂` for complex vectors given as slices.
pub fn l2_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
