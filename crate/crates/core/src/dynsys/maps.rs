//! Built-in discrete maps and their registry.

use nalgebra::DMatrix;

use crate::registry::{Label, Registry, RegistryError};

/// A discrete dynamical system `s(k+1) = φ(s(k))`.
///
/// `inverse` and `jacobian` are optional; callers fall back to Newton
/// iteration and central differences respectively.
pub trait DiscreteMap: Send + Sync {
    fn name(&self) -> String;

    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize {
        self.input_dim()
    }

    fn forward(&self, s: &[f64]) -> Vec<f64>;

    /// Analytic `φ⁻¹(s_next)`, if this map provides one.
    fn inverse(&self, _s_next: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Analytic `M[(n, m)] = ∂φₙ/∂sₘ`, if this map provides one.
    fn jacobian(&self, _s: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

/// `φ(s) = A s`, optionally with a closed-form inverse matrix.
#[derive(Debug, Clone)]
pub struct LinearMap {
    pub label: String,
    pub matrix: DMatrix<f64>,
    pub inverse_matrix: Option<DMatrix<f64>>,
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        Self {
            label: "identity".into(),
            matrix: DMatrix::identity(dim, dim),
            inverse_matrix: Some(DMatrix::identity(dim, dim)),
        }
    }

    /// Counter-clockwise planar rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let m = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        Self {
            label: format!("rotation({theta})"),
            inverse_matrix: Some(m.transpose()),
            matrix: m,
        }
    }

    /// Arnold's cat map `φ(x, y) = (2x + y, x + y)` on the plane (no modular wrap).
    pub fn catmap() -> Self {
        Self {
            label: "catmap".into(),
            matrix: DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]),
            inverse_matrix: Some(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0])),
        }
    }

    /// `φ(s₁, s₂) = (s₁ + s₂)`: the dimension drops, so the map is never regular.
    pub fn collapse() -> Self {
        Self {
            label: "collapse".into(),
            matrix: DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            inverse_matrix: None,
        }
    }
}

fn mat_vec(m: &DMatrix<f64>, s: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * s[c]).sum())
        .collect()
}

impl DiscreteMap for LinearMap {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn input_dim(&self) -> usize {
        self.matrix.ncols()
    }
    fn output_dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn forward(&self, s: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, s)
    }
    fn inverse(&self, s_next: &[f64]) -> Option<Vec<f64>> {
        self.inverse_matrix.as_ref().map(|inv| mat_vec(inv, s_next))
    }
    fn jacobian(&self, _s: &[f64]) -> Option<DMatrix<f64>> {
        Some(self.matrix.clone())
    }
}

/// `φ(s) = s²`: singular at the origin.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quadratic1d;

impl DiscreteMap for Quadratic1d {
    fn name(&self) -> String {
        "quadratic1d".into()
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn forward(&self, s: &[f64]) -> Vec<f64> {
        vec![s[0] * s[0]]
    }
    fn jacobian(&self, s: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, 2.0 * s[0]))
    }
}

/// `φ(s) = s + s³`: strictly increasing, so globally invertible, but with no
/// closed-form inverse provided. Inversion goes through Newton iteration.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cubic1d;

impl DiscreteMap for Cubic1d {
    fn name(&self) -> String {
        "cubic1d".into()
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn forward(&self, s: &[f64]) -> Vec<f64> {
        vec![s[0] + s[0].powi(3)]
    }
    fn jacobian(&self, s: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, 1.0 + 3.0 * s[0] * s[0]))
    }
}

/// Wraps closures as a map; nothing analytic beyond `forward` unless supplied.
pub struct FnMap<F> {
    pub label: String,
    pub dim: usize,
    pub forward: F,
}

impl<F> DiscreteMap for FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn name(&self) -> String {
        self.label.clone()
    }
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn output_dim(&self) -> usize {
        (self.forward)(&vec![0.0; self.dim]).len()
    }
    fn forward(&self, s: &[f64]) -> Vec<f64> {
        (self.forward)(s)
    }
}

/// Maps selectable by label: `identity`, `identity(dim)`, `rotation(theta)`,
/// `catmap`, `quadratic1d`, `cubic1d`, `collapse`.
pub fn map_registry() -> Registry<dyn DiscreteMap> {
    let mut reg: Registry<dyn DiscreteMap> = Registry::new("map");
    reg.register(
        "identity",
        "identity[(dim)]",
        "identity map, default dimension 2",
        |l: &Label| {
            l.expect_arity(&[0, 1])?;
            let dim = if l.args.is_empty() { 2 } else { l.usize_arg(0)? };
            if dim == 0 {
                return Err(RegistryError::InvalidArgument {
                    name: l.name.clone(),
                    arg: "0".into(),
                    reason: "dimension must be positive".into(),
                });
            }
            Ok(Box::new(LinearMap::identity(dim)))
        },
    )
    .register(
        "rotation",
        "rotation(theta)",
        "planar rotation by theta radians",
        |l: &Label| {
            l.expect_arity(&[1])?;
            Ok(Box::new(LinearMap::rotation(l.f64_arg(0)?)))
        },
    )
    .register(
        "catmap",
        "catmap",
        "linear cat map (2x+y, x+y)",
        |l: &Label| {
            l.expect_arity(&[0])?;
            Ok(Box::new(LinearMap::catmap()))
        },
    )
    .register(
        "quadratic1d",
        "quadratic1d",
        "s -> s^2, singular at 0",
        |l: &Label| {
            l.expect_arity(&[0])?;
            Ok(Box::new(Quadratic1d))
        },
    )
    .register(
        "cubic1d",
        "cubic1d",
        "s -> s + s^3, inverted by Newton iteration",
        |l: &Label| {
            l.expect_arity(&[0])?;
            Ok(Box::new(Cubic1d))
        },
    )
    .register(
        "collapse",
        "collapse",
        "(s1, s2) -> (s1 + s2), dimension 2 -> 1",
        |l: &Label| {
            l.expect_arity(&[0])?;
            Ok(Box::new(LinearMap::collapse()))
        },
    );
    reg
}
