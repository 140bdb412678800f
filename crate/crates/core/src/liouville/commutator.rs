use num_complex::Complex64;

use super::{build_u, divergence_report, DivergenceReport, LiouvilleError, Result, UPotential};
use crate::field::VectorField;
use crate::qreg::{GridSpec, QuantumRegister, Representation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauSign {
    #[default]
    Plus,
    Minus,
}

/// `N` four-factor steps of size `τ = ±(t/(ħ²N))^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorPlan {
    pub t_total: f64,
    pub steps: usize,
    pub sign: TauSign,
    pub hbar: f64,
}

impl CommutatorPlan {
    pub fn new(t_total: f64, steps: usize, sign: TauSign, hbar: f64) -> Result<Self> {
        if steps == 0 {
            return Err(LiouvilleError::InvalidPlan("steps must be positive".into()));
        }
        if !(t_total >= 0.0 && t_total.is_finite()) {
            return Err(LiouvilleError::InvalidPlan("t_total must be finite and non-negative".into()));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(LiouvilleError::InvalidPlan("hbar must be positive".into()));
        }
        Ok(Self {
            t_total,
            steps,
            sign,
            hbar,
        })
    }

    pub fn tau(&self) -> f64 {
        let magnitude = (self.t_total / (self.hbar * self.hbar * self.steps as f64)).sqrt();
        match self.sign {
            TauSign::Plus => magnitude,
            TauSign::Minus => -magnitude,
        }
    }

    /// Plan for a single step of the given signed `τ`.
    pub fn single_step(tau: f64, hbar: f64) -> Result<Self> {
        let sign = if tau < 0.0 { TauSign::Minus } else { TauSign::Plus };
        Self::new(tau * tau * hbar * hbar, 1, sign, hbar)
    }
}

/// Phase tables for `∏_k e^{iτu_k} e^{iτp̂_k²} e^{−iτu_k} e^{−iτp̂_k²}`.
pub struct CommutatorStepper {
    grid: GridSpec,
    u_plus: Vec<Vec<Complex64>>,
    u_minus: Vec<Vec<Complex64>>,
    p_plus: Vec<Vec<Complex64>>,
    p_minus: Vec<Vec<Complex64>>,
}

impl CommutatorStepper {
    pub fn new(u: &UPotential, tau: f64) -> Self {
        let grid = u.grid.clone();
        let phases = |values: &[f64], s: f64| -> Vec<Complex64> {
            values.iter().map(|v| Complex64::from_polar(1.0, s * tau * v)).collect()
        };
        let momenta_sq: Vec<Vec<f64>> = (0..grid.axes())
            .map(|k| grid.momenta(k).iter().map(|p| p * p).collect())
            .collect();
        Self {
            u_plus: u.values.iter().map(|v| phases(v, 1.0)).collect(),
            u_minus: u.values.iter().map(|v| phases(v, -1.0)).collect(),
            p_plus: momenta_sq.iter().map(|v| phases(v, 1.0)).collect(),
            p_minus: momenta_sq.iter().map(|v| phases(v, -1.0)).collect(),
            grid,
        }
    }

    fn momentum_phase(&self, reg: &mut QuantumRegister, axis: usize, factors: &[Complex64]) -> Result<()> {
        reg.to_momentum(axis)?;
        reg.apply_axis_factors(axis, Representation::Momentum, factors)?;
        reg.to_position(axis)?;
        Ok(())
    }

    /// One step. Within each axis `e^{−iτp̂²}` acts first and `e^{iτu}` last,
    /// so the product approximates `exp(τ²[p̂², u])`.
    pub fn step(&self, reg: &mut QuantumRegister) -> Result<()> {
        if reg.grid() != &self.grid {
            return Err(LiouvilleError::GridMismatch);
        }
        for k in 0..self.grid.axes() {
            self.momentum_phase(reg, k, &self.p_minus[k])?;
            reg.apply_position_factors(&self.u_minus[k])?;
            self.momentum_phase(reg, k, &self.p_plus[k])?;
            reg.apply_position_factors(&self.u_plus[k])?;
        }
        Ok(())
    }
}

/// One four-factor step with `u` built from `flow`.
pub fn commutator_step(reg: &mut QuantumRegister, u: &UPotential, plan: &CommutatorPlan) -> Result<()> {
    CommutatorStepper::new(u, plan.tau()).step(reg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRecord {
    pub step: usize,
    pub time: f64,
    pub norm: f64,
}

/// Outcome of [`evolve_classical`].
#[derive(Debug, Clone)]
pub struct ClassicalRun {
    pub register: QuantumRegister,
    pub records: Vec<NormRecord>,
    pub divergence: DivergenceReport,
    /// Conditions outside the scheme's intended regime.
    pub warnings: Vec<String>,
}

/// Transport `∂ψ/∂t = −v·∇ψ` by `N` commutator steps.
pub fn evolve_classical(reg: &QuantumRegister, flow: &dyn VectorField, plan: &CommutatorPlan) -> Result<ClassicalRun> {
    let grid = reg.grid();
    if (grid.hbar() - plan.hbar).abs() > 0.0 {
        return Err(LiouvilleError::InvalidPlan(format!(
            "plan hbar {} differs from grid hbar {}",
            plan.hbar,
            grid.hbar()
        )));
    }
    let divergence = divergence_report(flow, grid)?;
    let mut warnings = Vec::new();
    if grid.axes() == 1 {
        warnings.push("one-dimensional flow: the construction is intended for d >= 2".to_string());
    }
    if !divergence.divergence_free {
        warnings.push(format!(
            "compressible flow (max |div v| = {:e}): unitary evolution cannot reproduce the exact semigroup",
            divergence.max_divergence
        ));
    }
    for w in &warnings {
        log::warn!("{}: {w}", flow.name());
    }
    let u = build_u(flow, grid)?;
    let stepper = CommutatorStepper::new(&u, plan.tau());
    let mut psi = reg.clone().into_position();
    let dt = plan.t_total / plan.steps as f64;
    let mut records = vec![NormRecord {
        step: 0,
        time: 0.0,
        norm: psi.norm_sqr(),
    }];
    for step in 1..=plan.steps {
        stepper.step(&mut psi)?;
        records.push(NormRecord {
            step,
            time: step as f64 * dt,
            norm: psi.norm_sqr(),
        });
    }
    Ok(ClassicalRun {
        register: psi,
        records,
        divergence,
        warnings,
    })
}
