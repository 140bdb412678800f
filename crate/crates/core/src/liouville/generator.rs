use num_complex::Complex64;

use super::{build_u, divergence_report, DivergenceReport, LiouvilleError, Result, UPotential};
use crate::field::VectorField;
use crate::linalg::{circulant_coefficients, CMatrix};
use crate::qreg::GridSpec;

/// Largest grid the dense-generator checks accept.
pub const GENERATOR_CAP: usize = 4096;

/// Hermiticity gate on the relative Frobenius defect.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Floor of the commutator-identity tolerance `max(floor, C·Δx²)`.
pub const COMMUTATOR_FLOOR: f64 = 1e-8;

/// Default `C` in `max(1e-8, C·Δx²)`.
pub const COMMUTATOR_C: f64 = 1.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-axis circulant coefficients of `p̂_k` and `p̂_k²`, built by direct
/// summation against the DFT kernel.
pub(crate) struct AxisOperators {
    pub momentum: Vec<Vec<Complex64>>,
    pub momentum_sq: Vec<Vec<Complex64>>,
}

impl AxisOperators {
    pub fn new(grid: &GridSpec) -> Self {
        Self {
            momentum: (0..grid.axes()).map(|k| circulant_coefficients(&grid.momenta(k), |p| p)).collect(),
            momentum_sq: (0..grid.axes())
                .map(|k| circulant_coefficients(&grid.momenta(k), |p| p * p))
                .collect(),
        }
    }
}

/// Calls `f(n, m, d)` for every ordered pair of flat indices `n ≠ m` that
/// differ only along `axis`, with `d = (n_k − m_k) mod N_k`.
fn for_each_line_pair(grid: &GridSpec, axis: usize, mut f: impl FnMut(usize, usize, usize)) {
    let n_k = grid.points(axis);
    let stride = grid.strides()[axis];
    for n in 0..grid.total_points() {
        let i = (n / stride) % n_k;
        let base = n - i * stride;
        for j in 0..n_k {
            if j != i {
                f(n, base + j * stride, (i + n_k - j) % n_k);
            }
        }
    }
}

/// `y = C_k x` with `C_k` the circulant `coeffs` acting along `axis`.
pub(crate) fn apply_line_circulant(grid: &GridSpec, axis: usize, coeffs: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let mut y: Vec<Complex64> = x.iter().map(|v| v * coeffs[0]).collect();
    for_each_line_pair(grid, axis, |n, m, d| y[n] += coeffs[d] * x[m]);
    y
}

fn scale(v: &[f64], x: &[Complex64]) -> Vec<Complex64> {
    v.iter().zip(x).map(|(a, b)| b * *a).collect()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn diff_norm(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn relative(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Matrix-free forms of the transport generators on one grid.
pub struct Generators {
    grid: GridSpec,
    ops: AxisOperators,
    u: UPotential,
}

impl Generators {
    pub fn new(flow: &dyn VectorField, grid: &GridSpec) -> Result<Self> {
        Ok(Self {
            grid: grid.clone(),
            ops: AxisOperators::new(grid),
            u: build_u(flow, grid)?,
        })
    }

    pub fn u(&self) -> &UPotential {
        &self.u
    }

    /// `Σ_k v_k p̂_k ψ`: the unsymmetrized generator, Hermitian iff div v = 0.
    pub fn apply_transport(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        for k in 0..self.grid.axes() {
            let p = apply_line_circulant(&self.grid, k, &self.ops.momentum[k], psi);
            for (o, t) in out.iter_mut().zip(scale(&self.u.velocity[k], &p)) {
                *o += t;
            }
        }
        out
    }

    /// Adjoint of [`apply_transport`](Self::apply_transport): `Σ_k p̂_k v_k ψ`.
    pub fn apply_transport_adjoint(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        for k in 0..self.grid.axes() {
            let vp = scale(&self.u.velocity[k], psi);
            for (o, t) in out.iter_mut().zip(apply_line_circulant(&self.grid, k, &self.ops.momentum[k], &vp)) {
                *o += t;
            }
        }
        out
    }

    /// `½ Σ_k (p̂_k v_k + v_k p̂_k) ψ`.
    pub fn apply_symmetric(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.apply_transport(psi)
            .iter()
            .zip(self.apply_transport_adjoint(psi))
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// `(i/ħ) Σ_k [p̂_k², u_k] ψ`.
    pub fn apply_commutator_form(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let i_over_hbar = Complex64::new(0.0, 1.0 / self.grid.hbar());
        let mut out = vec![ZERO; psi.len()];
        for k in 0..self.grid.axes() {
            let u = &self.u.values[k];
            let p2u = apply_line_circulant(&self.grid, k, &self.ops.momentum_sq[k], &scale(u, psi));
            let up2 = scale(u, &apply_line_circulant(&self.grid, k, &self.ops.momentum_sq[k], psi));
            for ((o, a), b) in out.iter_mut().zip(p2u).zip(up2) {
                *o += i_over_hbar * (a - b);
            }
        }
        out
    }

    /// Dense `Σ_k [p̂_k², u_k]` (anti-Hermitian).
    pub fn dense_commutator(&self) -> Result<CMatrix> {
        let total = self.grid.total_points();
        if total > GENERATOR_CAP {
            return Err(LiouvilleError::TooLarge { points: total, cap: GENERATOR_CAP });
        }
        let mut g = CMatrix::zeros(total, total);
        for k in 0..self.grid.axes() {
            let (q, u) = (&self.ops.momentum_sq[k], &self.u.values[k]);
            for_each_line_pair(&self.grid, k, |n, m, d| g[(n, m)] += q[d] * (u[m] - u[n]));
        }
        Ok(g)
    }

    /// `(‖M − M†‖_F / ‖M‖_F, ‖M‖_F)` for `M = Σ_k v_k p̂_k`.
    fn transport_hermiticity(&self) -> (f64, f64) {
        let total = self.grid.total_points();
        let mut diag = vec![ZERO; total];
        let mut defect_sq = 0.0;
        let mut norm_sq = 0.0;
        for k in 0..self.grid.axes() {
            let (c, v) = (&self.ops.momentum[k], &self.u.velocity[k]);
            for (n, d) in diag.iter_mut().enumerate() {
                *d += c[0] * v[n];
            }
            for_each_line_pair(&self.grid, k, |n, m, d| {
                norm_sq += (c[d] * v[n]).norm_sqr();
                defect_sq += (c[d] * (v[n] - v[m])).norm_sqr();
            });
        }
        norm_sq += diag.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // diagonal entries c_k[0] v_k(n) are real, so they drop out of M − M†
        (relative(defect_sq.sqrt(), norm_sq.sqrt()), norm_sq.sqrt())
    }

    /// `‖A − B‖_F / ‖A‖_F` with `A = ½Σ(p̂v + vp̂)` and `B = (i/ħ)Σ[p̂², u]`.
    fn commutator_identity_full(&self) -> f64 {
        let total = self.grid.total_points();
        let i_over_hbar = Complex64::new(0.0, 1.0 / self.grid.hbar());
        let mut diag = vec![ZERO; total];
        let mut diff_sq = 0.0;
        let mut norm_sq = 0.0;
        for k in 0..self.grid.axes() {
            let (c, q) = (&self.ops.momentum[k], &self.ops.momentum_sq[k]);
            let (v, u) = (&self.u.velocity[k], &self.u.values[k]);
            for (n, d) in diag.iter_mut().enumerate() {
                *d += c[0] * v[n];
            }
            for_each_line_pair(&self.grid, k, |n, m, d| {
                let a = 0.5 * c[d] * (v[m] + v[n]);
                let b = i_over_hbar * q[d] * (u[m] - u[n]);
                norm_sq += a.norm_sqr();
                diff_sq += (a - b).norm_sqr();
            });
        }
        let diag_sq: f64 = diag.iter().map(|z| z.norm_sqr()).sum();
        relative((diff_sq + diag_sq).sqrt(), (norm_sq + diag_sq).sqrt())
    }
}

/// Gaussian probe states well inside the grid box.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub sigma: f64,
    pub centers: Vec<Vec<f64>>,
}

impl ProbeSet {
    /// Centres from `{−2.5, 0, 3}` per axis kept at least `4σ` plus 10% of the
    /// box width away from the edges; the box centre if none fit.
    pub fn default_for(grid: &GridSpec) -> Self {
        let sigma = 0.5;
        let ok = |k: usize, c: f64| {
            let lo = grid.origin(k);
            let hi = lo + grid.length(k);
            let margin = 4.0 * sigma + 0.1 * grid.length(k);
            c - margin >= lo && c + margin <= hi
        };
        let mut centers: Vec<Vec<f64>> = vec![vec![]];
        for k in 0..grid.axes() {
            centers = centers
                .into_iter()
                .flat_map(|c| {
                    [-2.5, 0.0, 3.0].into_iter().filter(move |&x| ok(k, x)).map(move |x| {
                        let mut c = c.clone();
                        c.push(x);
                        c
                    })
                })
                .collect();
        }
        if centers.is_empty() {
            centers.push((0..grid.axes()).map(|k| grid.origin(k) + 0.5 * grid.length(k)).collect());
        }
        Self { sigma, centers }
    }

    pub fn states(&self, grid: &GridSpec) -> Vec<Vec<Complex64>> {
        self.centers
            .iter()
            .map(|c| {
                (0..grid.total_points())
                    .map(|n| {
                        let x = grid.coordinates(n);
                        let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                        Complex64::new((-r2 / (4.0 * self.sigma * self.sigma)).exp(), 0.0)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Result of [`liouville_generator_spectrum_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorCheck {
    pub points: usize,
    pub divergence: DivergenceReport,
    /// `‖M‖_F` for `M = Σ_k v_k p̂_k`.
    pub transport_norm: f64,
    /// Relative Frobenius Hermiticity defect of `M`.
    pub hermiticity_defect: f64,
    /// `(Σ‖(M − M†)φ‖² / Σ‖Mφ‖²)^{1/2}` pooled over interior probes `φ`.
    pub hermiticity_defect_probe: f64,
    pub hermitian: bool,
    /// Relative Frobenius difference of the two generator forms.
    pub commutator_defect: f64,
    /// Pooled relative difference of the two forms applied to interior probes.
    pub commutator_defect_probe: f64,
    pub commutator_tolerance: f64,
    pub commutator_identity_holds: bool,
}

/// Hermiticity of the transport generator and equality of its symmetric and
/// commutator forms on `grid`. Matrices are streamed, never stored.
pub fn liouville_generator_spectrum_check(
    flow: &dyn VectorField,
    grid: &GridSpec,
    probes: &ProbeSet,
) -> Result<GeneratorCheck> {
    let total = grid.total_points();
    if total > GENERATOR_CAP {
        return Err(LiouvilleError::TooLarge { points: total, cap: GENERATOR_CAP });
    }
    let divergence = divergence_report(flow, grid)?;
    let gens = Generators::new(flow, grid)?;
    let (hermiticity_defect, transport_norm) = gens.transport_hermiticity();
    let commutator_defect = gens.commutator_identity_full();

    let (mut herm_num, mut herm_den, mut comm_num, mut comm_den) = (0.0, 0.0, 0.0, 0.0);
    for phi in probes.states(grid) {
        let m = gens.apply_transport(&phi);
        let mt = gens.apply_transport_adjoint(&phi);
        herm_num += diff_norm(&m, &mt).powi(2);
        herm_den += norm(&m).powi(2);
        let a = gens.apply_symmetric(&phi);
        let b = gens.apply_commutator_form(&phi);
        comm_num += diff_norm(&a, &b).powi(2);
        comm_den += norm(&a).powi(2);
    }
    let herm_probe = relative(herm_num.sqrt(), herm_den.sqrt());
    let comm_probe = relative(comm_num.sqrt(), comm_den.sqrt());
    let dx_max = (0..grid.axes()).map(|k| grid.spacing(k)).fold(0.0, f64::max);
    let commutator_tolerance = COMMUTATOR_FLOOR.max(COMMUTATOR_C * dx_max * dx_max);
    Ok(GeneratorCheck {
        points: total,
        divergence,
        transport_norm,
        hermiticity_defect,
        hermiticity_defect_probe: herm_probe,
        hermitian: hermiticity_defect <= HERMITICITY_TOL,
        commutator_defect,
        commutator_defect_probe: comm_probe,
        commutator_tolerance,
        commutator_identity_holds: comm_probe <= commutator_tolerance,
    })
}
