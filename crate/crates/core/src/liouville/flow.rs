use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{LiouvilleError, Result};
use crate::field::{ConstantField, LinearField, VectorField, FD_STEP};
use crate::qreg::GridSpec;
use crate::registry::{Label, Registry, RegistryError};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Hamiltonian `H₁` on a `2M`-dimensional phase space ordered `(q₁..q_M, p₁..p_M)`.
#[derive(Clone)]
pub struct HamiltonianFlowSpec {
    pub label: String,
    pub phase_dim: usize,
    pub h1: ScalarFn,
    /// Analytic `∇H₁`; central differences when absent.
    pub gradient: Option<GradientFn>,
}

impl HamiltonianFlowSpec {
    pub fn new(label: impl Into<String>, phase_dim: usize, h1: ScalarFn) -> Self {
        Self {
            label: label.into(),
            phase_dim,
            h1,
            gradient: None,
        }
    }

    pub fn with_gradient(mut self, gradient: GradientFn) -> Self {
        self.gradient = Some(gradient);
        self
    }

    /// `½ Σ x²`.
    pub fn harmonic(phase_dim: usize) -> Self {
        Self::new("hamiltonian(H1=harmonic)", phase_dim, Arc::new(|x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>()))
            .with_gradient(Arc::new(|x: &[f64]| x.to_vec()))
    }

    /// `Σ q_i p_i`, a hyperbolic fixed point.
    pub fn saddle(phase_dim: usize) -> Self {
        let m = phase_dim / 2;
        Self::new(
            "hamiltonian(H1=saddle)",
            phase_dim,
            Arc::new(move |x: &[f64]| (0..m).map(|i| x[i] * x[i + m]).sum()),
        )
        .with_gradient(Arc::new(move |x: &[f64]| {
            let mut g = vec![0.0; 2 * m];
            for i in 0..m {
                g[i] = x[i + m];
                g[i + m] = x[i];
            }
            g
        }))
    }
}

/// `ε = [[0, I], [−I, 0]]` for phase dimension `2M`.
pub fn symplectic_form(phase_dim: usize) -> DMatrix<f64> {
    let m = phase_dim / 2;
    DMatrix::from_fn(phase_dim, phase_dim, |r, c| {
        if r < m && c == r + m {
            1.0
        } else if r >= m && c + m == r {
            -1.0
        } else {
            0.0
        }
    })
}

/// Flow `v = ε ∇H₁`.
pub struct HamiltonianFlow {
    spec: HamiltonianFlowSpec,
}

impl HamiltonianFlow {
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        if let Some(g) = &self.spec.gradient {
            return g(x);
        }
        let mut probe = x.to_vec();
        (0..x.len())
            .map(|i| {
                probe[i] = x[i] + FD_STEP;
                let hi = (self.spec.h1)(&probe);
                probe[i] = x[i] - FD_STEP;
                let lo = (self.spec.h1)(&probe);
                probe[i] = x[i];
                (hi - lo) / (2.0 * FD_STEP)
            })
            .collect()
    }

    pub fn hamiltonian(&self, x: &[f64]) -> f64 {
        (self.spec.h1)(x)
    }
}

impl VectorField for HamiltonianFlow {
    fn name(&self) -> String {
        self.spec.label.clone()
    }
    fn dim(&self) -> usize {
        self.spec.phase_dim
    }
    fn velocity(&self, x: &[f64]) -> Vec<f64> {
        let g = self.gradient(x);
        let m = self.spec.phase_dim / 2;
        let mut v = vec![0.0; 2 * m];
        for i in 0..m {
            v[i] = g[i + m];
            v[i + m] = -g[i];
        }
        v
    }
}

pub fn flow_from_hamiltonian(spec: HamiltonianFlowSpec) -> Result<HamiltonianFlow> {
    if spec.phase_dim == 0 || spec.phase_dim % 2 != 0 {
        return Err(LiouvilleError::OddPhaseDim(spec.phase_dim));
    }
    Ok(HamiltonianFlow { spec })
}

/// Velocity samples on a regular grid, multilinearly interpolated and
/// clamped to the sampled box.
#[derive(Debug, Clone)]
pub struct TabulatedFlow {
    label: String,
    axes: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

impl TabulatedFlow {
    /// Rows `x_0..x_{d-1},v_0..v_{d-1}` covering every node of a regular grid
    /// once, in any order. A non-numeric first row is a header.
    pub fn from_csv_str(label: impl Into<String>, text: &str) -> std::result::Result<Self, String> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|f| f.trim().parse::<f64>()).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if i == 0 => continue,
                Err(_) => return Err(format!("line {}: non-numeric field", i + 1)),
            }
        }
        let width = rows.first().ok_or("no samples")?.len();
        if width < 2 || width % 2 != 0 || rows.iter().any(|r| r.len() != width) {
            return Err("rows must hold x_0..x_{d-1},v_0..v_{d-1} with a consistent d".into());
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err("non-finite sample".into());
        }
        let d = width / 2;
        let axes: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                let mut xs: Vec<f64> = rows.iter().map(|r| r[a]).collect();
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                xs
            })
            .collect();
        if axes.iter().any(|xs| xs.len() < 2) {
            return Err("each axis needs at least two distinct coordinates".into());
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if total != rows.len() {
            return Err(format!("{} rows do not form a full {total}-node grid", rows.len()));
        }
        let mut values = vec![Vec::new(); total];
        for r in &rows {
            let mut flat = 0;
            for (a, xs) in axes.iter().enumerate() {
                let i = xs.binary_search_by(|x| x.total_cmp(&r[a])).expect("coordinate present");
                flat = flat * xs.len() + i;
            }
            if !values[flat].is_empty() {
                return Err("duplicate grid node".into());
            }
            values[flat] = r[d..].to_vec();
        }
        Ok(Self {
            label: label.into(),
            axes,
            values,
        })
    }

    pub fn from_csv_file(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_csv_str(format!("tabulated({})", path.display()), &text)
    }
}

impl VectorField for TabulatedFlow {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.axes.len()
    }
    fn velocity(&self, x: &[f64]) -> Vec<f64> {
        let d = self.axes.len();
        let cells: Vec<(usize, f64)> = self
            .axes
            .iter()
            .zip(x)
            .map(|(xs, &xi)| {
                let xi = xi.clamp(xs[0], xs[xs.len() - 1]);
                let i = (xs.partition_point(|&s| s <= xi).max(1) - 1).min(xs.len() - 2);
                (i, (xi - xs[i]) / (xs[i + 1] - xs[i]))
            })
            .collect();
        let mut v = vec![0.0; d];
        for corner in 0..(1usize << d) {
            let mut weight = 1.0;
            let mut flat = 0;
            for (a, &(i, w)) in cells.iter().enumerate() {
                let upper = corner >> (d - 1 - a) & 1 == 1;
                weight *= if upper { w } else { 1.0 - w };
                flat = flat * self.axes[a].len() + i + upper as usize;
            }
            if weight != 0.0 {
                for (vk, sample) in v.iter_mut().zip(&self.values[flat]) {
                    *vk += weight * sample;
                }
            }
        }
        v
    }
}

pub fn flow_registry() -> Registry<dyn VectorField> {
    let mut reg: Registry<dyn VectorField> = Registry::new("flow");
    reg.register(
        "constant",
        "constant(c1,...,cd)",
        "uniform velocity c",
        |l: &Label| {
            if l.args.is_empty() {
                return Err(RegistryError::Arity {
                    name: l.name.clone(),
                    expected: "at least 1".into(),
                    got: 0,
                });
            }
            Ok(Box::new(ConstantField { c: l.f64_args()? }))
        },
    )
    .register("rotation", "rotation", "v = (x2, -x1), period 2 pi", |l: &Label| {
        l.expect_arity(&[0])?;
        Ok(Box::new(LinearField::rotation()))
    })
    .register("stretch", "stretch", "compressible v = (x1, 0)", |l: &Label| {
        l.expect_arity(&[0])?;
        Ok(Box::new(LinearField::stretch()))
    })
    .register(
        "hamiltonian",
        "hamiltonian(H1=harmonic|saddle)",
        "planar Hamiltonian flow v = eps grad H1",
        |l: &Label| {
            l.expect_arity(&[1])?;
            let spec = match l.keyed_arg(0, "H1")?.as_str() {
                "harmonic" => HamiltonianFlowSpec::harmonic(2),
                "saddle" => HamiltonianFlowSpec::saddle(2),
                other => {
                    return Err(RegistryError::InvalidArgument {
                        name: l.name.clone(),
                        arg: other.into(),
                        reason: "expected harmonic or saddle".into(),
                    })
                }
            };
            Ok(Box::new(flow_from_hamiltonian(spec).expect("even phase dimension")))
        },
    )
    .register(
        "tabulated",
        "tabulated(path)",
        "multilinear flow from a CSV of x_0..,v_0.. grid rows",
        |l: &Label| {
            l.expect_arity(&[1])?;
            TabulatedFlow::from_csv_file(Path::new(&l.args[0]))
                .map(|t| Box::new(t) as Box<dyn VectorField>)
                .map_err(|reason| RegistryError::InvalidArgument {
                    name: l.name.clone(),
                    arg: l.args[0].clone(),
                    reason,
                })
        },
    );
    reg
}

/// Grid divergence summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    pub max_divergence: f64,
    pub max_speed: f64,
    /// `max |div v| ≤ 1e-8 · max |v|` over the grid.
    pub divergence_free: bool,
}

pub const DIVERGENCE_TOL: f64 = 1e-8;

pub fn divergence_report(flow: &dyn VectorField, grid: &GridSpec) -> Result<DivergenceReport> {
    if flow.dim() != grid.axes() {
        return Err(LiouvilleError::DimensionMismatch {
            flow: flow.dim(),
            grid: grid.axes(),
        });
    }
    let mut max_divergence: f64 = 0.0;
    let mut max_speed: f64 = 0.0;
    for flat in 0..grid.total_points() {
        let x = grid.coordinates(flat);
        max_divergence = max_divergence.max(flow.divergence(&x).abs());
        let speed = flow.velocity(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
        max_speed = max_speed.max(speed);
    }
    Ok(DivergenceReport {
        max_divergence,
        max_speed,
        divergence_free: max_divergence <= DIVERGENCE_TOL * max_speed,
    })
}
