use super::{LiouvilleError, Result};
use crate::field::VectorField;
use crate::qreg::GridSpec;

/// `u_k(x) = ½ ∫ v_k ds` along axis `k` from the left grid edge, one full-grid
/// array per axis. `∂u_k/∂x_k = v_k/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UPotential {
    pub grid: GridSpec,
    pub values: Vec<Vec<f64>>,
    /// Axis coordinate at which every `u_k` vanishes.
    pub lower_limit: Vec<f64>,
    /// `v_k` samples the antiderivatives were built from.
    pub velocity: Vec<Vec<f64>>,
}

/// Cumulative trapezoid of the flow components on `grid`.
pub fn build_u(flow: &dyn VectorField, grid: &GridSpec) -> Result<UPotential> {
    if flow.dim() != grid.axes() {
        return Err(LiouvilleError::DimensionMismatch {
            flow: flow.dim(),
            grid: grid.axes(),
        });
    }
    let total = grid.total_points();
    let axes = grid.axes();
    let mut velocity = vec![vec![0.0; total]; axes];
    for flat in 0..total {
        let v = flow.velocity(&grid.coordinates(flat));
        for k in 0..axes {
            velocity[k][flat] = v[k];
        }
    }
    let strides = grid.strides();
    let mut values = vec![vec![0.0; total]; axes];
    for k in 0..axes {
        let n = grid.points(k);
        let stride = strides[k];
        let half_dx = 0.5 * grid.spacing(k);
        for flat in 0..total {
            if (flat / stride) % n != 0 {
                continue;
            }
            let mut acc = 0.0;
            for i in 1..n {
                let cur = flat + i * stride;
                acc += half_dx * (velocity[k][cur - stride] + velocity[k][cur]);
                values[k][cur] = 0.5 * acc;
            }
        }
    }
    Ok(UPotential {
        lower_limit: (0..axes).map(|k| grid.origin(k)).collect(),
        grid: grid.clone(),
        values,
        velocity,
    })
}

impl UPotential {
    /// Largest `|D_k u_k − v_k/2|` over interior points, `D_k` the central difference.
    pub fn derivative_error(&self) -> f64 {
        let grid = &self.grid;
        let strides = grid.strides();
        let mut worst: f64 = 0.0;
        for k in 0..grid.axes() {
            let n = grid.points(k);
            let stride = strides[k];
            let dx = grid.spacing(k);
            for flat in 0..grid.total_points() {
                let i = (flat / stride) % n;
                if i == 0 || i + 1 == n {
                    continue;
                }
                let d = (self.values[k][flat + stride] - self.values[k][flat - stride]) / (2.0 * dx);
                worst = worst.max((d - 0.5 * self.velocity[k][flat]).abs());
            }
        }
        worst
    }
}
