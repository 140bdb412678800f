use std::sync::Arc;

use num_complex::Complex64;

use super::{Potential, Result, SolverError};
use crate::qreg::{GridSpec, QuantumRegister, Representation};

/// First-order splitting of `exp(−i t (p²/2m + V)/ħ)` into `steps` factors.
#[derive(Clone)]
pub struct TrotterPlan {
    pub t_total: f64,
    pub steps: usize,
    pub mass: f64,
    pub potential: Arc<dyn Potential>,
}

impl TrotterPlan {
    pub fn new(t_total: f64, steps: usize, mass: f64, potential: Arc<dyn Potential>) -> Result<Self> {
        if steps == 0 {
            return Err(SolverError::InvalidPlan("steps must be positive".into()));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(SolverError::InvalidPlan("mass must be positive".into()));
        }
        if !t_total.is_finite() {
            return Err(SolverError::InvalidPlan("t_total must be finite".into()));
        }
        Ok(Self {
            t_total,
            steps,
            mass,
            potential,
        })
    }

    pub fn tau(&self) -> f64 {
        self.t_total / self.steps as f64
    }

    /// `θ = iτ/ħ`.
    pub fn theta(&self, hbar: f64) -> Complex64 {
        Complex64::new(0.0, self.tau() / hbar)
    }
}

/// One row of the per-step evolution log.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub norm: f64,
    pub energy: f64,
    pub x_mean: Vec<f64>,
    pub p_mean: Vec<f64>,
}

/// Split-operator propagator with its phase factors precomputed for one grid.
pub struct SplitOperator {
    plan: TrotterPlan,
    grid: GridSpec,
    potential_phase: Vec<Complex64>,
    kinetic_phase: Vec<Vec<Complex64>>,
    potential_values: Vec<f64>,
}

impl SplitOperator {
    pub fn new(plan: TrotterPlan, grid: GridSpec) -> Self {
        let hbar = grid.hbar();
        let tau = plan.tau();
        let potential_values: Vec<f64> = (0..grid.total_points())
            .map(|n| plan.potential.value(&grid.coordinates(n), plan.mass))
            .collect();
        let potential_phase = potential_values
            .iter()
            .map(|v| Complex64::from_polar(1.0, -tau * v / hbar))
            .collect();
        let kinetic_phase = (0..grid.axes())
            .map(|a| {
                grid.momenta(a)
                    .iter()
                    .map(|p| Complex64::from_polar(1.0, -tau * p * p / (2.0 * plan.mass * hbar)))
                    .collect()
            })
            .collect();
        Self {
            plan,
            grid,
            potential_phase,
            kinetic_phase,
            potential_values,
        }
    }

    pub fn plan(&self) -> &TrotterPlan {
        &self.plan
    }

    fn check(&self, reg: &QuantumRegister) -> Result<()> {
        if reg.grid() != &self.grid {
            return Err(SolverError::GridMismatch);
        }
        Ok(())
    }

    /// `ψ ← U_T U_V ψ`: potential phase, then the kinetic phase in momentum space.
    pub fn trotter_step(&self, reg: &mut QuantumRegister) -> Result<()> {
        self.check(reg)?;
        reg.apply_position_factors(&self.potential_phase)?;
        for (axis, factors) in self.kinetic_phase.iter().enumerate() {
            reg.to_momentum(axis)?;
            reg.apply_axis_factors(axis, Representation::Momentum, factors)?;
            reg.to_position(axis)?;
        }
        Ok(())
    }

    /// `⟨p²/2m⟩ + ⟨V⟩`.
    pub fn energy(&self, reg: &QuantumRegister) -> Result<f64> {
        self.check(reg)?;
        let norm = reg.norm_sqr();
        let potential: f64 = reg
            .amplitudes()
            .iter()
            .zip(&self.potential_values)
            .map(|(a, v)| a.norm_sqr() * v)
            .sum();
        let mut kinetic = 0.0;
        for axis in 0..self.grid.axes() {
            let mut m = reg.clone();
            m.to_momentum(axis)?;
            let n = self.grid.points(axis);
            let stride = self.grid.strides()[axis];
            let ps = self.grid.momenta(axis);
            kinetic += m
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(flat, a)| a.norm_sqr() * ps[(flat / stride) % n].powi(2))
                .sum::<f64>()
                / (2.0 * self.plan.mass);
        }
        Ok((kinetic + potential) / norm)
    }

    fn record(&self, step: usize, reg: &QuantumRegister) -> Result<StepRecord> {
        let obs = reg.observables();
        Ok(StepRecord {
            step,
            time: step as f64 * self.plan.tau(),
            norm: obs.norm,
            energy: self.energy(reg)?,
            x_mean: obs.mean_position,
            p_mean: obs.mean_momentum,
        })
    }

    /// Applies all `steps` factors. With `record`, logs step 0 and every step after.
    pub fn evolve(&self, reg: &mut QuantumRegister, record: bool) -> Result<Vec<StepRecord>> {
        self.check(reg)?;
        let mut log = Vec::new();
        if record {
            log.push(self.record(0, reg)?);
        }
        for step in 1..=self.plan.steps {
            self.trotter_step(reg)?;
            if record {
                log.push(self.record(step, reg)?);
            }
        }
        Ok(log)
    }
}

/// `step,time,norm,energy,x_mean,p_mean` rows; extra axes get `_a` suffixes.
pub fn records_to_csv(records: &[StepRecord]) -> String {
    use crate::format_f64 as f;
    let axes = records.first().map_or(1, |r| r.x_mean.len());
    let cols = |prefix: &str| -> Vec<String> {
        if axes == 1 {
            vec![prefix.to_string()]
        } else {
            (0..axes).map(|a| format!("{prefix}_{a}")).collect()
        }
    };
    let mut out = format!(
        "step,time,norm,energy,{},{}\n",
        cols("x_mean").join(","),
        cols("p_mean").join(",")
    );
    for r in records {
        let xs: Vec<String> = r.x_mean.iter().map(|v| f(*v)).collect();
        let ps: Vec<String> = r.p_mean.iter().map(|v| f(*v)).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.step,
            f(r.time),
            f(r.norm),
            f(r.energy),
            xs.join(","),
            ps.join(",")
        ));
    }
    out
}
