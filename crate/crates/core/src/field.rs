//! Velocity fields `ẋ = v(x)` shared by the continuum costate extension and
//! the Liouville transport solver.

use nalgebra::DMatrix;

/// A smooth velocity field on ℝᵈ.
pub trait VectorField: Send + Sync {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn velocity(&self, x: &[f64]) -> Vec<f64>;

    /// Analytic Jacobian `J[(m, n)] = ∂v_m/∂x_n`, when known.
    fn jacobian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn divergence(&self, x: &[f64]) -> f64 {
        match self.jacobian(x) {
            Some(j) => j.trace(),
            None => central_difference_jacobian(|y| self.velocity(y), x, FD_STEP).trace(),
        }
    }

    /// Analytic Jacobian if available, else central differences.
    fn jacobian_or_fd(&self, x: &[f64]) -> DMatrix<f64> {
        self.jacobian(x)
            .unwrap_or_else(|| central_difference_jacobian(|y| self.velocity(y), x, FD_STEP))
    }
}

pub const FD_STEP: f64 = 1e-5;

/// `J[(m, n)] ≈ (f_m(x + h eₙ) − f_m(x − h eₙ)) / 2h`. Output dimension is
/// taken from `f(x)`, so non-square Jacobians are supported.
pub fn central_difference_jacobian<F>(f: F, x: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let rows = f(x).len();
    let mut jac = DMatrix::zeros(rows, x.len());
    let mut probe = x.to_vec();
    for n in 0..x.len() {
        let orig = probe[n];
        probe[n] = orig + h;
        let plus = f(&probe);
        probe[n] = orig - h;
        let minus = f(&probe);
        probe[n] = orig;
        for m in 0..rows {
            jac[(m, n)] = (plus[m] - minus[m]) / (2.0 * h);
        }
    }
    jac
}

/// `v(x) = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantField {
    pub c: Vec<f64>,
}

impl VectorField for ConstantField {
    fn name(&self) -> String {
        let parts: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
        format!("constant({})", parts.join(","))
    }
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn velocity(&self, _x: &[f64]) -> Vec<f64> {
        self.c.clone()
    }
    fn jacobian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(self.c.len(), self.c.len()))
    }
}

/// `v(x) = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField {
    pub label: String,
    pub matrix: DMatrix<f64>,
}

impl LinearField {
    /// Harmonic phase flow `v(x₁, x₂) = (x₂, −x₁)`, a clockwise rotation.
    pub fn rotation() -> Self {
        Self {
            label: "rotation".into(),
            matrix: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        }
    }

    /// `v(x₁, x₂) = (x₁, 0)`, divergence 1 everywhere.
    pub fn stretch() -> Self {
        Self {
            label: "stretch".into(),
            matrix: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
        }
    }
}

impl VectorField for LinearField {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn velocity(&self, x: &[f64]) -> Vec<f64> {
        (0..self.matrix.nrows())
            .map(|m| (0..x.len()).map(|n| self.matrix[(m, n)] * x[n]).sum())
            .collect()
    }
    fn jacobian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }
}

/// A field defined by closures, with an optional analytic Jacobian.
pub struct FnField<V, J = fn(&[f64]) -> DMatrix<f64>> {
    pub label: String,
    pub dim: usize,
    pub velocity: V,
    pub jacobian: Option<J>,
}

impl<V> FnField<V>
where
    V: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(label: impl Into<String>, dim: usize, velocity: V) -> Self {
        Self {
            label: label.into(),
            dim,
            velocity,
            jacobian: None,
        }
    }
}

impl<V, J> FnField<V, J>
where
    V: Fn(&[f64]) -> Vec<f64> + Send + Sync,
    J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync,
{
    pub fn with_jacobian(label: impl Into<String>, dim: usize, velocity: V, jacobian: J) -> Self {
        Self {
            label: label.into(),
            dim,
            velocity,
            jacobian: Some(jacobian),
        }
    }
}

impl<V, J> VectorField for FnField<V, J>
where
    V: Fn(&[f64]) -> Vec<f64> + Send + Sync,
    J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync,
{
    fn name(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn velocity(&self, x: &[f64]) -> Vec<f64> {
        (self.velocity)(x)
    }
    fn jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}
