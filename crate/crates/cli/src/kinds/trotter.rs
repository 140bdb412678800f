use std::sync::Arc;

use quanputer_core::quantum_solver::{potential_registry, state_registry, trotter_convergence, ConvergenceMode, TrotterScenario};

use super::{build, expected_from, grid_from, grid_schema, Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{optional, with_default, KeySpec, Params};
use crate::Result;

/// Global mode sweeps the step count `N` to a fixed time; local mode takes one
/// step of `τ = t_total/N` for each `N`.
#[derive(Debug, Default)]
pub struct ConvergenceTrotter;

impl ScenarioKind for ConvergenceTrotter {
    fn name(&self) -> &'static str {
        "convergence-trotter"
    }

    fn schema(&self) -> Vec<KeySpec> {
        let mut s = grid_schema("1", "8", "-10", "10");
        s.extend([
            with_default("potential.name", "harmonic(1)"),
            with_default("state.name", "gaussian(1,0,0.7071067811865476)"),
            with_default("sweep.mode", "global"),
            with_default("sweep.t_total", "1"),
            with_default("sweep.steps", "16, 32, 64, 128, 256"),
            with_default("sweep.mass", "1"),
            optional("sweep.expected_slope"),
            with_default("sweep.tolerance", "0.15"),
        ]);
        s
    }

    fn run(&self, p: &Params, _ctx: &mut RunContext) -> Result<Outcome> {
        let grid = grid_from(p)?;
        let potential: Arc<_> = build(&potential_registry(), p, "potential.name")?.into();
        let state = build(&state_registry(), p, "state.name")?;
        let mode = match p.choice("sweep.mode", &["global", "local"])?.as_str() {
            "local" => ConvergenceMode::Local,
            _ => ConvergenceMode::Global,
        };
        let steps = p.usizes("sweep.steps")?;
        if steps.len() < 3 || steps.contains(&0) {
            return Err(p.error("sweep.steps", "need at least 3 positive step counts").into());
        }
        let expected = expected_from(p, "sweep.expected_slope", "sweep.tolerance")?;
        let scenario = TrotterScenario {
            initial: state.prepare(&grid)?,
            grid,
            potential,
            mass: p.positive_f64("sweep.mass")?,
            t_total: p.f64("sweep.t_total")?,
        };
        let report = trotter_convergence(&scenario, &steps, mode, expected)?;

        let mut out = Outcome::default();
        out.summary.push(format!(
            "{} in {}, {} sweep over {:?}",
            state.name(),
            scenario.potential.name(),
            p.str("sweep.mode")?,
            steps
        ));
        out.summary.push(report.summary_line());
        if expected.is_some() {
            out.checks.push(Check::from_report("trotter order", &report));
        }
        out.files.push(OutputFile::text("convergence.csv", report.to_csv()));
        Ok(out)
    }
}
