use num_complex::Complex64;
use rayon::prelude::*;

use super::{LiouvilleError, Result};
use crate::field::VectorField;
use crate::qreg::{GridSpec, QuantumRegister};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// RK4 substeps over `[0, t]`.
    pub substeps: usize,
    /// Safety-box inset as a fraction of the box width per side.
    pub margin: f64,
    /// Exits only count for samples above `floor · max |ψ₀|`.
    pub floor: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            substeps: 1024,
            margin: 0.1,
            floor: 1e-4,
        }
    }
}

fn rk4_backward(flow: &dyn VectorField, x: &mut [f64], h: f64) {
    let d = x.len();
    let mut y = vec![0.0; d];
    let k1 = flow.velocity(x);
    for i in 0..d {
        y[i] = x[i] - 0.5 * h * k1[i];
    }
    let k2 = flow.velocity(&y);
    for i in 0..d {
        y[i] = x[i] - 0.5 * h * k2[i];
    }
    let k3 = flow.velocity(&y);
    for i in 0..d {
        y[i] = x[i] - h * k3[i];
    }
    let k4 = flow.velocity(&y);
    for i in 0..d {
        x[i] -= h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// `ψ(x, t) = ψ₀(Φ_{−t}(x))` sampled on `grid`, each point backtraced by RK4.
pub fn characteristics_oracle<S>(
    flow: &dyn VectorField,
    sampler: S,
    grid: &GridSpec,
    t: f64,
    opts: &OracleOptions,
) -> Result<QuantumRegister>
where
    S: Fn(&[f64]) -> Complex64 + Sync,
{
    if flow.dim() != grid.axes() {
        return Err(LiouvilleError::DimensionMismatch {
            flow: flow.dim(),
            grid: grid.axes(),
        });
    }
    if opts.substeps == 0 {
        return Err(LiouvilleError::InvalidPlan("oracle needs at least one substep".into()));
    }
    let d = grid.axes();
    let safe: Vec<(f64, f64)> = (0..d)
        .map(|k| {
            let lo = grid.origin(k);
            let len = grid.length(k);
            (lo + opts.margin * len, lo + (1.0 - opts.margin) * len)
        })
        .collect();
    let inside = |x: &[f64]| x.iter().zip(&safe).all(|(v, (lo, hi))| v >= lo && v <= hi);
    let h = t / opts.substeps as f64;

    let traced: Vec<(Complex64, bool, Vec<f64>)> = (0..grid.total_points())
        .into_par_iter()
        .map(|flat| {
            let mut x = grid.coordinates(flat);
            let mut left = !inside(&x);
            if t != 0.0 {
                for _ in 0..opts.substeps {
                    rk4_backward(flow, &mut x, h);
                    left |= !inside(&x);
                }
            }
            (sampler(&x), left, x)
        })
        .collect();

    let peak = traced.iter().map(|(a, _, _)| a.norm()).fold(0.0, f64::max);
    if let Some((a, _, x)) = traced.iter().find(|(a, left, _)| *left && a.norm() > opts.floor * peak) {
        return Err(LiouvilleError::LeftSafetyBox {
            point: x.clone(),
            amplitude: a.norm() / peak,
        });
    }
    let weight = grid.cell_volume().sqrt();
    let amps = traced.into_iter().map(|(a, _, _)| a * weight).collect();
    Ok(QuantumRegister::from_amplitudes(grid.clone(), amps)?)
}
