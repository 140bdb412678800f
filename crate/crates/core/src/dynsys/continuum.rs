use std::sync::Arc;

use super::{DynsysError, Result};
use crate::field::{central_difference_jacobian, VectorField, FD_STEP};

/// Continuum limit of the extended system: `ẋ = v(x)`, `ṗₙ = −(∂vₘ/∂xₙ) pₘ`,
/// generated by `H(x, p) = Σₙ vₙ(x) pₙ`.
#[derive(Clone)]
pub struct ContinuumExtension {
    pub flow: Arc<dyn VectorField>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub hamiltonian: f64,
}

impl ContinuumExtension {
    pub fn new(flow: Arc<dyn VectorField>) -> Self {
        Self { flow }
    }

    pub fn hamiltonian(&self, x: &[f64], p: &[f64]) -> f64 {
        self.flow.velocity(x).iter().zip(p).map(|(v, p)| v * p).sum()
    }

    /// Max entrywise gap between the analytic flow Jacobian and central
    /// differences at `x`, relative to `max(1, max|J|)`. Zero when the flow
    /// has no analytic Jacobian.
    pub fn jacobian_mismatch(&self, x: &[f64]) -> f64 {
        let Some(analytic) = self.flow.jacobian(x) else {
            return 0.0;
        };
        let fd = central_difference_jacobian(|y| self.flow.velocity(y), x, FD_STEP);
        let scale = analytic.amax().max(1.0);
        (analytic - fd).amax() / scale
    }

    /// `(ẋ, ṗ)` at `(x, p)`.
    fn rhs(&self, x: &[f64], p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let jac = self.flow.jacobian_or_fd(x);
        let dim = x.len();
        let pdot = (0..dim)
            .map(|n| -(0..dim).map(|m| jac[(m, n)] * p[m]).sum::<f64>())
            .collect();
        (self.flow.velocity(x), pdot)
    }
}

/// Relative tolerance on [`ContinuumExtension::jacobian_mismatch`].
pub const JACOBIAN_CONSISTENCY_TOL: f64 = 1e-6;

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

/// Classical fixed-step RK4 on the joint `(x, p)` system. The final step is
/// shortened if `dt` does not divide `t_final`. Returns one sample per step,
/// including `t = 0`.
pub fn integrate_continuum(
    ext: &ContinuumExtension,
    x0: &[f64],
    p0: &[f64],
    t_final: f64,
    dt: f64,
) -> Result<Vec<ContinuumSample>> {
    let dim = ext.flow.dim();
    for v in [x0, p0] {
        if v.len() != dim {
            return Err(DynsysError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(DynsysError::InvalidStep(format!("dt={dt}, t_final={t_final}")));
    }
    let mismatch = ext.jacobian_mismatch(x0);
    if mismatch > JACOBIAN_CONSISTENCY_TOL {
        return Err(DynsysError::InconsistentJacobian { max_error: mismatch });
    }

    let steps = ((t_final / dt) - 1e-9).ceil().max(0.0) as usize;
    let mut x = x0.to_vec();
    let mut p = p0.to_vec();
    let mut t = 0.0;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(ContinuumSample {
        t,
        hamiltonian: ext.hamiltonian(&x, &p),
        x: x.clone(),
        p: p.clone(),
    });
    for step in 0..steps {
        let h = if step + 1 == steps { t_final - t } else { dt };
        let (k1x, k1p) = ext.rhs(&x, &p);
        let (k2x, k2p) = ext.rhs(&axpy(h / 2.0, &k1x, &x), &axpy(h / 2.0, &k1p, &p));
        let (k3x, k3p) = ext.rhs(&axpy(h / 2.0, &k2x, &x), &axpy(h / 2.0, &k2p, &p));
        let (k4x, k4p) = ext.rhs(&axpy(h, &k3x, &x), &axpy(h, &k3p, &p));
        for i in 0..dim {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            p[i] += h / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
        }
        t = if step + 1 == steps { t_final } else { t + h };
        samples.push(ContinuumSample {
            t,
            hamiltonian: ext.hamiltonian(&x, &p),
            x: x.clone(),
            p: p.clone(),
        });
    }
    Ok(samples)
}

/// Largest `|H(t) − H(0)|` along the samples.
pub fn hamiltonian_drift(samples: &[ContinuumSample]) -> f64 {
    let h0 = samples.first().map_or(0.0, |s| s.hamiltonian);
    samples
        .iter()
        .map(|s| (s.hamiltonian - h0).abs())
        .fold(0.0, f64::max)
}
