use std::sync::Arc;

use quanputer_core::quantum_solver::{potential_registry, records_to_csv, state_registry, SplitOperator, TrotterPlan};

use super::{build, grid_from, grid_schema, register_bytes, Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{optional, required, with_default, KeySpec, Params};
use crate::Result;

#[derive(Debug, Default)]
pub struct Quantum;

impl ScenarioKind for Quantum {
    fn name(&self) -> &'static str {
        "quantum"
    }

    fn schema(&self) -> Vec<KeySpec> {
        let mut s = grid_schema("1", "8", "-10", "10");
        s.extend([
            with_default("potential.name", "free"),
            with_default("state.name", "gaussian(0,0,1)"),
            required("evolution.t_total"),
            required("evolution.steps"),
            with_default("evolution.mass", "1"),
            optional("check.norm_tolerance"),
        ]);
        s
    }

    fn run(&self, p: &Params, _ctx: &mut RunContext) -> Result<Outcome> {
        let grid = grid_from(p)?;
        let potential: Arc<_> = build(&potential_registry(), p, "potential.name")?.into();
        let state = build(&state_registry(), p, "state.name")?;
        let t_total = p.f64("evolution.t_total")?;
        let steps = p.usize("evolution.steps")?;
        let mass = p.positive_f64("evolution.mass")?;

        let plan = TrotterPlan::new(t_total, steps, mass, potential)?;
        let split = SplitOperator::new(plan, grid.clone());
        let mut psi = state.prepare(&grid)?;
        let records = split.evolve(&mut psi, true)?;

        let norm_dev = records.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
        let e0 = records.first().map_or(0.0, |r| r.energy);
        let energy_drift = records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);

        let mut out = Outcome::default();
        out.summary.push(format!(
            "{} in {} on {} points, t = {t_total}, {steps} steps",
            state.name(),
            split.plan().potential.name(),
            grid.total_points()
        ));
        out.summary.push(format!("max |norm - 1| {norm_dev:.3e}, max energy drift {energy_drift:.3e}"));
        if let Some(tol) = p.opt_f64("check.norm_tolerance")? {
            out.checks.push(Check::new(
                "norm conservation",
                norm_dev <= tol,
                format!("max |norm - 1| {norm_dev:.3e} (tolerance {tol:e})"),
            ));
        }
        let (csv, bin) = register_bytes(&psi)?;
        out.files.push(OutputFile::text("steps.csv", records_to_csv(&records)));
        out.files.push(OutputFile {
            name: "final_state.csv".into(),
            contents: csv,
        });
        out.files.push(OutputFile {
            name: "final_state.qreg".into(),
            contents: bin,
        });
        Ok(out)
    }
}
