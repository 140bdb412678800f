//! Dense checks of the group- and resolvent-commutator identities and of the
//! plane-wave overlap convention.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

pub use crate::convergence::fit_order;
use crate::convergence::{ConvergenceReport, ExpectedOrder};
use crate::linalg::{commutator, spectral_norm, CMatrix};

pub const MAX_PAIR_SIZE: usize = 64;
pub const MAX_PAIR_NORM: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("matrices must be square, equal-sized and at most {MAX_PAIR_SIZE}x{MAX_PAIR_SIZE}")]
    Shape,
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("spectral norm {0} exceeds {MAX_PAIR_NORM}")]
    NormTooLarge(f64),
    #[error("1 + eps*{which} is singular at eps = {eps}")]
    Singular { which: &'static str, eps: f64 },
    #[error("eps must be finite and non-negative, got {0}")]
    InvalidEps(f64),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPair {
    pub a: CMatrix,
    pub b: CMatrix,
    pub seed: Option<u64>,
}

impl MatrixPair {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || a.shape() != b.shape() || n == 0 || n > MAX_PAIR_SIZE {
            return Err(VerifyError::Shape);
        }
        if a.iter().chain(b.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(VerifyError::NonFinite);
        }
        for m in [&a, &b] {
            let norm = spectral_norm(m);
            if norm > MAX_PAIR_NORM {
                return Err(VerifyError::NormTooLarge(norm));
            }
        }
        Ok(Self { a, b, seed: None })
    }

    /// Two `n×n` Hermitian matrices `(G + G†)/2` with standard-normal complex
    /// entries from a ChaCha stream, rescaled if needed to spectral norm ≤ 10.
    pub fn random_hermitian(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let g = CMatrix::from_fn(n, n, |_, _| {
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
            let norm = spectral_norm(&h);
            if norm > MAX_PAIR_NORM {
                h * Complex64::new(MAX_PAIR_NORM / norm, 0.0)
            } else {
                h
            }
        };
        let a = draw();
        let b = draw();
        let mut pair = Self::new(a, b)?;
        pair.seed = Some(seed);
        Ok(pair)
    }

    /// Two real diagonal matrices with standard-normal entries; they commute.
    pub fn random_diagonal(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut diag = || {
            let d: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
                .collect();
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
        };
        let a = diag();
        let b = diag();
        let mut pair = Self::new(a, b)?;
        pair.seed = Some(seed);
        Ok(pair)
    }

    /// `(iA, iB)`: skew-Hermitian exponents, so every exponential is unitary.
    pub fn skew(&self) -> Self {
        let i = Complex64::new(0.0, 1.0);
        Self {
            a: &self.a * i,
            b: &self.b * i,
            seed: self.seed,
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(VerifyError::InvalidEps(eps))
    }
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * Complex64::new(s, 0.0)
}

/// `‖e^{εA}e^{εB}e^{−εA}e^{−εB} − e^{ε²[A,B]}‖₂`.
pub fn group_commutator_defect(pair: &MatrixPair, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let (a, b) = (&pair.a, &pair.b);
    let product = scaled(a, eps).exp() * scaled(b, eps).exp() * scaled(a, -eps).exp() * scaled(b, -eps).exp();
    let target = scaled(&commutator(a, b), eps * eps).exp();
    Ok(spectral_norm(&(product - target)))
}

fn inverse(m: CMatrix, which: &'static str, eps: f64) -> Result<CMatrix> {
    let sv = m.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if !(lo > 1e-14 * hi) {
        return Err(VerifyError::Singular { which, eps });
    }
    m.try_inverse().ok_or(VerifyError::Singular { which, eps })
}

/// `‖(1+εA)(1+εB)(1+εA)⁻¹(1+εB)⁻¹ − (1 + ε²[A,B])‖₂`.
pub fn resolvent_commutator_defect(pair: &MatrixPair, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let (a, b) = (&pair.a, &pair.b);
    let id = CMatrix::identity(a.nrows(), a.ncols());
    let fa = &id + scaled(a, eps);
    let fb = &id + scaled(b, eps);
    let product = &fa * &fb * inverse(fa.clone(), "A", eps)? * inverse(fb.clone(), "B", eps)?;
    let target = &id + scaled(&commutator(a, b), eps * eps);
    Ok(spectral_norm(&(product - target)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Group,
    Resolvent,
}

impl Identity {
    pub fn name(self) -> &'static str {
        match self {
            Identity::Group => "group-commutator",
            Identity::Resolvent => "resolvent-commutator",
        }
    }

    pub fn defect(self, pair: &MatrixPair, eps: f64) -> Result<f64> {
        match self {
            Identity::Group => group_commutator_defect(pair, eps),
            Identity::Resolvent => resolvent_commutator_defect(pair, eps),
        }
    }
}

/// `0.1 · 2^{−j}` for `j = 0..points`.
pub fn dyadic_eps(points: usize) -> Vec<f64> {
    (0..points).map(|j| 0.1 * 0.5f64.powi(j as i32)).collect()
}

/// Defects over an ε sweep with a fitted order.
pub fn identity_sweep(
    identity: Identity,
    pair: &MatrixPair,
    eps: &[f64],
    expected: Option<ExpectedOrder>,
) -> Result<ConvergenceReport> {
    let points = eps
        .par_iter()
        .map(|&e| Ok((e, identity.defect(pair, e)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::new("eps", points, expected))
}

/// `⟨p|x⟩ = (2πħ)^{-1/2} e^{−ipx/ħ}`.
pub fn momentum_state_overlap(x: f64, p: f64, hbar: f64) -> Complex64 {
    Complex64::from_polar((2.0 * PI * hbar).powf(-0.5), -p * x / hbar)
}

/// Largest deviation of `Σ_j ⟨xₙ|p_j⟩⟨p_j|x_m⟩ Δp` from `δₙₘ/Δx`, scaled by `Δx`,
/// on an `n`-point axis.
pub fn discrete_completeness_defect(grid: &crate::qreg::GridSpec) -> f64 {
    let hbar = grid.hbar();
    let xs = grid.positions(0);
    let ps = grid.momenta(0);
    let dx = grid.spacing(0);
    let dp = 2.0 * PI * hbar / (xs.len() as f64 * dx);
    let mut worst: f64 = 0.0;
    for (n, &xn) in xs.iter().enumerate() {
        for (m, &xm) in xs.iter().enumerate() {
            let sum: Complex64 = ps
                .iter()
                .map(|&p| momentum_state_overlap(xn, p, hbar).conj() * momentum_state_overlap(xm, p, hbar))
                .sum::<Complex64>()
                * dp;
            let target = if n == m { 1.0 / dx } else { 0.0 };
            worst = worst.max((sum - target).norm() * dx);
        }
    }
    worst
}
