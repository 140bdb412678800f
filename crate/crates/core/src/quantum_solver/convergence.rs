use std::sync::Arc;

use rayon::prelude::*;

use super::{exact_evolve_with, DenseHamiltonian, Potential, Result, SplitOperator, TrotterPlan};
use crate::convergence::{ConvergenceReport, ExpectedOrder};
use crate::qreg::{GridSpec, QuantumRegister};

/// Problem evolvable by both the split operator and the dense oracle.
#[derive(Clone)]
pub struct TrotterScenario {
    pub grid: GridSpec,
    pub potential: Arc<dyn Potential>,
    pub mass: f64,
    pub t_total: f64,
    pub initial: QuantumRegister,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Full evolution to `t_total` in `N` steps; error against `N`.
    Global,
    /// One step of size `τ = t_total/N`; error against `τ`.
    Local,
}

/// `‖ψ_split − ψ_exact‖₂` for each step count, with a fitted log-log slope.
pub fn trotter_convergence(
    scenario: &TrotterScenario,
    step_counts: &[usize],
    mode: ConvergenceMode,
    expected: Option<ExpectedOrder>,
) -> Result<ConvergenceReport> {
    let h = DenseHamiltonian::new(&scenario.grid, scenario.potential.as_ref(), scenario.mass)?;
    let prop = h.propagator();
    let points = step_counts
        .par_iter()
        .map(|&n| {
            let plan = TrotterPlan::new(scenario.t_total, n, scenario.mass, Arc::clone(&scenario.potential))?;
            let tau = plan.tau();
            let split = SplitOperator::new(plan, scenario.grid.clone());
            let mut psi = scenario.initial.clone();
            let (t, param) = match mode {
                ConvergenceMode::Global => {
                    split.evolve(&mut psi, false)?;
                    (scenario.t_total, n as f64)
                }
                ConvergenceMode::Local => {
                    split.trotter_step(&mut psi)?;
                    (tau, tau)
                }
            };
            let exact = exact_evolve_with(&scenario.initial, &prop, &scenario.grid, t)?;
            Ok((param, psi.distance(&exact)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let parameter = match mode {
        ConvergenceMode::Global => "N",
        ConvergenceMode::Local => "tau",
    };
    Ok(ConvergenceReport::new(parameter, points, expected))
}
