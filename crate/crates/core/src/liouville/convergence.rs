use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    build_u, characteristics_oracle, CommutatorPlan, CommutatorStepper, Generators, OracleOptions, Result, TauSign,
    evolve_classical,
};
use crate::convergence::{ConvergenceReport, ExpectedOrder};
use crate::field::VectorField;
use crate::linalg::{spectral_norm, CMatrix, HermitianPropagator};
use crate::qreg::{GridSpec, QuantumRegister};

/// How a single four-factor step is compared with `exp(τ²Σ[p̂², u])`.
#[derive(Debug, Clone)]
pub enum StepMeasure {
    /// `‖Sψ − Eψ‖₂` on one state.
    State(QuantumRegister),
    /// Spectral norm `‖S − E‖₂` of the full step matrices.
    Operator,
}

/// Single-step defect of the four-factor product against a dense exponential,
/// one point per signed `τ`.
pub fn single_step_convergence(
    flow: &dyn VectorField,
    grid: &GridSpec,
    taus: &[f64],
    measure: &StepMeasure,
    expected: Option<ExpectedOrder>,
) -> Result<ConvergenceReport> {
    let gens = Generators::new(flow, grid)?;
    let g = gens.dense_commutator()?;
    let h = &g * Complex64::new(0.0, 1.0);
    let prop = HermitianPropagator::new(&h);
    let u = build_u(flow, grid)?;
    let total = grid.total_points();
    let points = taus
        .par_iter()
        .map(|&tau| {
            let stepper = CommutatorStepper::new(&u, tau);
            let err = match measure {
                StepMeasure::State(psi0) => {
                    let psi0 = psi0.clone().into_position();
                    let mut psi = psi0.clone();
                    stepper.step(&mut psi)?;
                    let exact = prop.apply(psi0.amplitudes(), tau * tau, 1.0);
                    crate::linalg::l2_distance(psi.amplitudes(), &exact)
                }
                StepMeasure::Operator => {
                    let exact = prop.unitary(tau * tau, 1.0);
                    let mut step = CMatrix::zeros(total, total);
                    for col in 0..total {
                        let mut e = QuantumRegister::basis(grid.clone(), &grid.unravel(col))?;
                        stepper.step(&mut e)?;
                        step.set_column(col, &crate::linalg::CVector::from_column_slice(e.amplitudes()));
                    }
                    spectral_norm(&(step - exact))
                }
            };
            Ok((tau.abs(), err))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::new("tau", points, expected))
}

/// Global sweep against the characteristics oracle.
#[derive(Debug, Clone)]
pub struct GlobalSweep {
    pub report: ConvergenceReport,
    /// `|⟨ψ_N|ψ_oracle⟩|²` per step count.
    pub fidelities: Vec<(usize, f64)>,
}

impl GlobalSweep {
    /// Fidelity nondecreasing in `N` up to `slack`.
    pub fn fidelity_monotone(&self, slack: f64) -> bool {
        self.fidelities.windows(2).all(|w| w[1].1 + slack >= w[0].1)
    }
}

/// `evolve_classical` to time `t` for each step count, compared with the oracle.
#[allow(clippy::too_many_arguments)]
pub fn global_convergence<S>(
    flow: &dyn VectorField,
    sampler: S,
    grid: &GridSpec,
    t: f64,
    step_counts: &[usize],
    sign: TauSign,
    oracle: &OracleOptions,
    expected: Option<ExpectedOrder>,
) -> Result<GlobalSweep>
where
    S: Fn(&[f64]) -> Complex64 + Sync,
{
    let psi0 = QuantumRegister::from_sampler(grid.clone(), &sampler)?;
    let exact = characteristics_oracle(flow, &sampler, grid, t, oracle)?;
    let results = step_counts
        .par_iter()
        .map(|&n| {
            let plan = CommutatorPlan::new(t, n, sign, grid.hbar())?;
            let run = evolve_classical(&psi0, flow, &plan)?;
            Ok((n, run.register.distance(&exact)?, run.register.fidelity(&exact)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalSweep {
        report: ConvergenceReport::new(
            "N",
            results.iter().map(|(n, e, _)| (*n as f64, *e)).collect(),
            expected,
        ),
        fidelities: results.iter().map(|(n, _, f)| (*n, *f)).collect(),
    })
}
