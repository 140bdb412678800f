use std::f64::consts::PI;

use super::{QregError, Result};

/// Periodic grid carrying a register: axis `a` has `2^{bits[a]}` points
/// `x_n = origin[a] + n·spacing[a]`, wrapped with period `N·Δx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    bits: Vec<u32>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    hbar: f64,
}

/// Per-axis bit limit; keeps `2^bits` comfortably inside `usize`.
pub const MAX_BITS_PER_AXIS: u32 = 30;

impl GridSpec {
    pub fn new(bits: Vec<u32>, spacing: Vec<f64>, origin: Vec<f64>, hbar: f64) -> Result<Self> {
        let invalid = |msg: String| Err(QregError::InvalidGrid(msg));
        if bits.is_empty() {
            return invalid("at least one axis is required".into());
        }
        if spacing.len() != bits.len() || origin.len() != bits.len() {
            return invalid(format!(
                "{} axes but {} spacings and {} origins",
                bits.len(),
                spacing.len(),
                origin.len()
            ));
        }
        if let Some(b) = bits.iter().find(|&&b| b == 0 || b > MAX_BITS_PER_AXIS) {
            return invalid(format!("bits per axis must be in 1..={MAX_BITS_PER_AXIS}, got {b}"));
        }
        if bits.iter().sum::<u32>() > 40 {
            return invalid("total register size exceeds 2^40 points".into());
        }
        if spacing.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return invalid("spacing must be positive and finite".into());
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return invalid("origin must be finite".into());
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return invalid(format!("hbar must be positive, got {hbar}"));
        }
        Ok(Self {
            bits,
            spacing,
            origin,
            hbar,
        })
    }

    /// `axes` identical axes covering `[lo, hi)` with `2^bits` points each.
    pub fn uniform_box(axes: usize, bits: u32, lo: f64, hi: f64, hbar: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(QregError::InvalidGrid(format!("empty box [{lo}, {hi})")));
        }
        let n = 2f64.powi(bits as i32);
        Self::new(
            vec![bits; axes],
            vec![(hi - lo) / n; axes],
            vec![lo; axes],
            hbar,
        )
    }

    pub fn axes(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self, axis: usize) -> u32 {
        self.bits[axis]
    }

    pub fn points(&self, axis: usize) -> usize {
        1usize << self.bits[axis]
    }

    pub fn total_points(&self) -> usize {
        1usize << self.bits.iter().sum::<u32>()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Period `N·Δx` of the axis.
    pub fn length(&self, axis: usize) -> f64 {
        self.points(axis) as f64 * self.spacing[axis]
    }

    /// `∏ Δx_a`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn position(&self, axis: usize, n: usize) -> f64 {
        self.origin[axis] + n as f64 * self.spacing[axis]
    }

    /// Momentum of DFT bin `j`, in the wrapped (signed) ordering:
    /// `p_j = 2πħ j′ / (N Δx)` with `j′ = j` below `N/2` and `j − N` otherwise.
    pub fn momentum(&self, axis: usize, j: usize) -> f64 {
        let n = self.points(axis);
        let signed = if j < n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        };
        2.0 * PI * self.hbar * signed / (n as f64 * self.spacing[axis])
    }

    pub fn positions(&self, axis: usize) -> Vec<f64> {
        (0..self.points(axis)).map(|n| self.position(axis, n)).collect()
    }

    pub fn momenta(&self, axis: usize) -> Vec<f64> {
        (0..self.points(axis)).map(|j| self.momentum(axis, j)).collect()
    }

    /// Row-major strides; the last axis is contiguous.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.axes()];
        for a in (0..self.axes().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.points(a + 1);
        }
        strides
    }

    /// Flat index → per-axis indices.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes()];
        for a in (0..self.axes()).rev() {
            let n = self.points(a);
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn ravel(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(self.strides())
            .map(|(i, s)| i * s)
            .sum()
    }

    /// Coordinates of the grid point with flat index `flat`.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .iter()
            .enumerate()
            .map(|(a, &n)| self.position(a, n))
            .collect()
    }

    /// Concatenates the axes of several grids (tensor product order).
    pub fn product(grids: &[&GridSpec]) -> Result<Self> {
        let first = grids
            .first()
            .ok_or_else(|| QregError::InvalidGrid("empty product".into()))?;
        if grids.iter().any(|g| g.hbar != first.hbar) {
            return Err(QregError::GridMismatch("registers use different hbar".into()));
        }
        Self::new(
            grids.iter().flat_map(|g| g.bits.clone()).collect(),
            grids.iter().flat_map(|g| g.spacing.clone()).collect(),
            grids.iter().flat_map(|g| g.origin.clone()).collect(),
            first.hbar,
        )
    }
}
