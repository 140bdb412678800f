use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{GridSpec, QregError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// Real phase `F(n₁, n₂, ...)` over grid indices, applied as `e^{iF}`.
pub trait PhaseFunction: Send + Sync {
    /// Number of register axes the phase couples.
    fn arity(&self) -> usize;

    fn phase(&self, index: &[usize]) -> f64;
}

/// Closure-backed [`PhaseFunction`].
pub struct FnPhase<F> {
    arity: usize,
    f: F,
}

impl<F> FnPhase<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<F> PhaseFunction for FnPhase<F>
where
    F: Fn(&[usize]) -> f64 + Send + Sync,
{
    fn arity(&self) -> usize {
        self.arity
    }
    fn phase(&self, index: &[usize]) -> f64 {
        (self.f)(index)
    }
}

struct AxisFft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `e^{−i p_j x⁰ / ħ}`: moves the DFT kernel from grid indices to the
    /// physical `e^{−i p x / ħ}` with a nonzero origin.
    origin_phase: Vec<Complex64>,
    scale: f64,
}

struct FftCache {
    axes: Vec<AxisFft>,
}

impl FftCache {
    fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let axes = (0..grid.axes())
            .map(|a| {
                let n = grid.points(a);
                let x0 = grid.origin(a);
                AxisFft {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                    origin_phase: grid
                        .momenta(a)
                        .iter()
                        .map(|p| Complex64::from_polar(1.0, -p * x0 / grid.hbar()))
                        .collect(),
                    scale: 1.0 / (n as f64).sqrt(),
                }
            })
            .collect();
        Self { axes }
    }
}

/// Normalized amplitudes `aₙ = ψ(xₙ) (∏Δx)^{1/2}` over a periodic grid.
///
/// Flat index `n` is the row-major (last axis fastest) binary encoding of the
/// grid point. Each axis is independently in position or momentum
/// representation; the momentum transform is the unitary DFT with kernel
/// `e^{−i p x/ħ}/√N`.
#[derive(Clone)]
pub struct QuantumRegister {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
    representation: Vec<Representation>,
    ffts: Arc<FftCache>,
}

impl fmt::Debug for QuantumRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantumRegister")
            .field("grid", &self.grid)
            .field("representation", &self.representation)
            .field("len", &self.amplitudes.len())
            .finish()
    }
}

/// Norm and first moments of a register.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub norm: f64,
    pub mean_position: Vec<f64>,
    pub mean_momentum: Vec<f64>,
}

impl QuantumRegister {
    /// Samples `sampler` on the grid and normalizes.
    pub fn from_sampler<F>(grid: GridSpec, sampler: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let weight = grid.cell_volume().sqrt();
        let amplitudes = (0..grid.total_points())
            .map(|flat| sampler(&grid.coordinates(flat)) * weight)
            .collect();
        Self::from_amplitudes(grid, amplitudes)
    }

    /// Wraps raw position-space amplitudes, normalizing them.
    pub fn from_amplitudes(grid: GridSpec, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.total_points() {
            return Err(QregError::GridMismatch(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.total_points()
            )));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(QregError::NonFinite);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QregError::ZeroState);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        let ffts = Arc::new(FftCache::new(&grid));
        Ok(Self {
            representation: vec![Representation::Position; grid.axes()],
            grid,
            amplitudes,
            ffts,
        })
    }

    /// Basis state `|n₁, n₂, ...⟩`.
    pub fn basis(grid: GridSpec, index: &[usize]) -> Result<Self> {
        if index.len() != grid.axes() || index.iter().enumerate().any(|(a, &i)| i >= grid.points(a)) {
            return Err(QregError::GridMismatch(format!("basis index {index:?} outside grid")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); grid.total_points()];
        amps[grid.ravel(index)] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(grid, amps)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn representation(&self, axis: usize) -> Representation {
        self.representation[axis]
    }

    pub fn is_position(&self) -> bool {
        self.representation.iter().all(|r| *r == Representation::Position)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn require_position(&self) -> Result<()> {
        if self.is_position() {
            Ok(())
        } else {
            Err(QregError::RepresentationMismatch {
                expected: Representation::Position,
            })
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.grid.axes() {
            Ok(())
        } else {
            Err(QregError::AxisOutOfRange {
                axis,
                axes: self.grid.axes(),
            })
        }
    }

    /// `|n⟩ → e^{iF(n)}|n⟩` on a single-axis register.
    pub fn apply_diagonal_phase(&mut self, f: &dyn PhaseFunction) -> Result<()> {
        if f.arity() != 1 {
            return Err(QregError::ArityMismatch {
                expected: 1,
                got: f.arity(),
            });
        }
        self.apply_coupled_phase(f)
    }

    /// `|n₁, n₂, ...⟩ → e^{iF(n₁, n₂, ...)}|n₁, n₂, ...⟩` over every axis.
    pub fn apply_coupled_phase(&mut self, f: &dyn PhaseFunction) -> Result<()> {
        if f.arity() != self.grid.axes() {
            return Err(QregError::ArityMismatch {
                expected: self.grid.axes(),
                got: f.arity(),
            });
        }
        self.require_position()?;
        for (flat, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, f.phase(&self.grid.unravel(flat)));
        }
        Ok(())
    }

    /// Arity-one phase acting on one axis of a multi-axis register.
    pub fn apply_axis_phase(&mut self, axis: usize, f: &dyn PhaseFunction) -> Result<()> {
        self.check_axis(axis)?;
        if f.arity() != 1 {
            return Err(QregError::ArityMismatch {
                expected: 1,
                got: f.arity(),
            });
        }
        if self.representation[axis] != Representation::Position {
            return Err(QregError::RepresentationMismatch {
                expected: Representation::Position,
            });
        }
        let factors: Vec<Complex64> = (0..self.grid.points(axis))
            .map(|n| Complex64::from_polar(1.0, f.phase(&[n])))
            .collect();
        self.apply_axis_factors(axis, Representation::Position, &factors)
    }

    /// Multiplies every amplitude by a precomputed full-grid factor.
    /// All axes must be in position representation.
    pub fn apply_position_factors(&mut self, factors: &[Complex64]) -> Result<()> {
        self.require_position()?;
        if factors.len() != self.amplitudes.len() {
            return Err(QregError::GridMismatch("factor length".into()));
        }
        for (a, f) in self.amplitudes.iter_mut().zip(factors) {
            *a *= f;
        }
        Ok(())
    }

    /// Multiplies by `factors[i]` where `i` is the index along `axis`, which
    /// must currently be in representation `rep`.
    pub fn apply_axis_factors(
        &mut self,
        axis: usize,
        rep: Representation,
        factors: &[Complex64],
    ) -> Result<()> {
        self.check_axis(axis)?;
        if self.representation[axis] != rep {
            return Err(QregError::RepresentationMismatch { expected: rep });
        }
        let n = self.grid.points(axis);
        if factors.len() != n {
            return Err(QregError::GridMismatch("factor length".into()));
        }
        let stride = self.grid.strides()[axis];
        for (flat, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= factors[(flat / stride) % n];
        }
        Ok(())
    }

    /// Applies `op` to every 1-D lane along `axis`.
    fn for_each_lane(&mut self, axis: usize, mut op: impl FnMut(&mut [Complex64])) {
        let n = self.grid.points(axis);
        let stride = self.grid.strides()[axis];
        if stride == 1 {
            for lane in self.amplitudes.chunks_exact_mut(n) {
                op(lane);
            }
            return;
        }
        let block = n * stride;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for outer in (0..self.amplitudes.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = self.amplitudes[base + j * stride];
                }
                op(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    self.amplitudes[base + j * stride] = *b;
                }
            }
        }
    }

    /// Unitary DFT along `axis` into momentum representation.
    pub fn to_momentum(&mut self, axis: usize) -> Result<()> {
        self.check_axis(axis)?;
        if self.representation[axis] != Representation::Position {
            return Err(QregError::RepresentationMismatch {
                expected: Representation::Position,
            });
        }
        let ffts = Arc::clone(&self.ffts);
        let plan = &ffts.axes[axis];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.forward.get_inplace_scratch_len()];
        self.for_each_lane(axis, |lane| {
            plan.forward.process_with_scratch(lane, &mut scratch);
            for (z, ph) in lane.iter_mut().zip(&plan.origin_phase) {
                *z *= ph * plan.scale;
            }
        });
        self.representation[axis] = Representation::Momentum;
        Ok(())
    }

    /// Inverse of [`to_momentum`](Self::to_momentum).
    pub fn to_position(&mut self, axis: usize) -> Result<()> {
        self.check_axis(axis)?;
        if self.representation[axis] != Representation::Momentum {
            return Err(QregError::RepresentationMismatch {
                expected: Representation::Momentum,
            });
        }
        let ffts = Arc::clone(&self.ffts);
        let plan = &ffts.axes[axis];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.inverse.get_inplace_scratch_len()];
        self.for_each_lane(axis, |lane| {
            for (z, ph) in lane.iter_mut().zip(&plan.origin_phase) {
                *z *= ph.conj() * plan.scale;
            }
            plan.inverse.process_with_scratch(lane, &mut scratch);
        });
        self.representation[axis] = Representation::Position;
        Ok(())
    }

    /// Brings every axis back to position representation.
    pub fn into_position(mut self) -> Self {
        for axis in 0..self.grid.axes() {
            if self.representation[axis] == Representation::Momentum {
                self.to_position(axis).expect("axis in momentum representation");
            }
        }
        self
    }

    /// `⟨self|other⟩`, both brought to position representation.
    pub fn inner(&self, other: &QuantumRegister) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(QregError::GridMismatch("inner product across different grids".into()));
        }
        if self.representation == other.representation {
            return Ok(self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum());
        }
        self.clone().into_position().inner(&other.clone().into_position())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &QuantumRegister) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `‖self − other‖₂` in position representation.
    pub fn distance(&self, other: &QuantumRegister) -> Result<f64> {
        if self.grid != other.grid {
            return Err(QregError::GridMismatch("distance across different grids".into()));
        }
        let a = self.clone().into_position();
        let b = other.clone().into_position();
        Ok(crate::linalg::l2_distance(&a.amplitudes, &b.amplitudes))
    }

    /// `⟨x_axis⟩` by a direct weighted sum over the grid.
    pub fn mean_position(&self, axis: usize) -> Result<f64> {
        self.check_axis(axis)?;
        let reg = self.clone().into_position();
        let n = self.grid.points(axis);
        let stride = self.grid.strides()[axis];
        let norm = reg.norm_sqr();
        Ok(reg
            .amplitudes
            .iter()
            .enumerate()
            .map(|(flat, a)| a.norm_sqr() * self.grid.position(axis, (flat / stride) % n))
            .sum::<f64>()
            / norm)
    }

    /// `⟨p_axis⟩` from the momentum-space weights.
    pub fn mean_momentum(&self, axis: usize) -> Result<f64> {
        self.check_axis(axis)?;
        let mut reg = self.clone().into_position();
        reg.to_momentum(axis)?;
        let n = self.grid.points(axis);
        let stride = self.grid.strides()[axis];
        let norm = reg.norm_sqr();
        Ok(reg
            .amplitudes
            .iter()
            .enumerate()
            .map(|(flat, a)| a.norm_sqr() * self.grid.momentum(axis, (flat / stride) % n))
            .sum::<f64>()
            / norm)
    }

    pub fn observables(&self) -> Observables {
        let axes = 0..self.grid.axes();
        Observables {
            norm: self.norm_sqr(),
            mean_position: axes
                .clone()
                .map(|a| self.mean_position(a).expect("axis in range"))
                .collect(),
            mean_momentum: axes
                .map(|a| self.mean_momentum(a).expect("axis in range"))
                .collect(),
        }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }
}

/// Default cap on joint multi-register state size, in complex amplitudes.
pub const DEFAULT_JOINT_CAP: usize = 1 << 26;

/// Joint register `|ψ₁⟩ ⊗ |ψ₂⟩ ⊗ ...`, axes concatenated in order.
pub fn tensor_product(regs: &[&QuantumRegister], cap: usize) -> Result<QuantumRegister> {
    if regs.iter().any(|r| !r.is_position()) {
        return Err(QregError::RepresentationMismatch {
            expected: Representation::Position,
        });
    }
    let grids: Vec<&GridSpec> = regs.iter().map(|r| &r.grid).collect();
    let total: u128 = grids.iter().map(|g| g.total_points() as u128).product();
    if total > cap as u128 {
        return Err(QregError::MemoryCap {
            requested: total,
            cap,
        });
    }
    let grid = GridSpec::product(&grids)?;
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for reg in regs {
        let mut next = Vec::with_capacity(amps.len() * reg.amplitudes.len());
        for a in &amps {
            next.extend(reg.amplitudes.iter().map(|b| a * b));
        }
        amps = next;
    }
    QuantumRegister::from_amplitudes(grid, amps)
}

/// Joint register of `regs` with the coupling phase `F` applied.
pub fn apply_coupled_phase(
    regs: &[&QuantumRegister],
    f: &dyn PhaseFunction,
    cap: usize,
) -> Result<QuantumRegister> {
    if f.arity() != regs.iter().map(|r| r.grid.axes()).sum::<usize>() {
        return Err(QregError::ArityMismatch {
            expected: regs.iter().map(|r| r.grid.axes()).sum(),
            got: f.arity(),
        });
    }
    let mut joint = tensor_product(regs, cap)?;
    joint.apply_coupled_phase(f)?;
    Ok(joint)
}
