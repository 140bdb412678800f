use std::fmt::Write as _;

use quanputer_core::format_f64;
use quanputer_core::liouville::{characteristics_oracle, evolve_classical, flow_registry, CommutatorPlan, OracleOptions, TauSign};
use quanputer_core::qreg::QuantumRegister;

use super::{blob_from, blob_schema, build, grid_from, grid_schema, register_bytes, Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{optional, required, with_default, KeySpec, Params};
use crate::Result;

#[derive(Debug, Default)]
pub struct Liouville;

pub(super) fn sign_from(p: &Params, key: &str) -> Result<TauSign> {
    Ok(match p.choice(key, &["plus", "minus"])?.as_str() {
        "minus" => TauSign::Minus,
        _ => TauSign::Plus,
    })
}

pub(super) fn oracle_schema() -> Vec<KeySpec> {
    vec![
        with_default("oracle.substeps", "1024"),
        with_default("oracle.margin", "0.1"),
        with_default("oracle.floor", "1e-4"),
    ]
}

pub(super) fn oracle_from(p: &Params) -> Result<OracleOptions> {
    Ok(OracleOptions {
        substeps: p.usize("oracle.substeps")?,
        margin: p.f64("oracle.margin")?,
        floor: p.f64("oracle.floor")?,
    })
}

impl ScenarioKind for Liouville {
    fn name(&self) -> &'static str {
        "liouville"
    }

    fn schema(&self) -> Vec<KeySpec> {
        let mut s = grid_schema("2", "6", "-8", "8");
        s.push(required("flow.name"));
        s.extend(blob_schema("0, 0", "0.7071067811865476"));
        s.extend([
            required("evolution.t_total"),
            required("evolution.steps"),
            with_default("evolution.sign", "plus"),
            with_default("oracle.compare", "true"),
            optional("check.min_fidelity"),
        ]);
        s.extend(oracle_schema());
        s
    }

    fn run(&self, p: &Params, _ctx: &mut RunContext) -> Result<Outcome> {
        let grid = grid_from(p)?;
        let flow = build(&flow_registry(), p, "flow.name")?;
        let sampler = blob_from(p, grid.axes())?;
        let t_total = p.f64("evolution.t_total")?;
        let plan = CommutatorPlan::new(t_total, p.usize("evolution.steps")?, sign_from(p, "evolution.sign")?, grid.hbar())?;

        let psi0 = QuantumRegister::from_sampler(grid.clone(), |x| sampler(x))?;
        let run = evolve_classical(&psi0, flow.as_ref(), &plan)?;

        let mut out = Outcome::default();
        out.warnings.extend(run.warnings.iter().cloned());
        out.summary.push(format!(
            "flow {} on {} points, t = {t_total}, {} steps, tau = {}",
            flow.name(),
            grid.total_points(),
            plan.steps,
            format_f64(plan.tau())
        ));
        out.summary.push(format!(
            "max |div v| {:.3e}, max speed {:.3e}",
            run.divergence.max_divergence, run.divergence.max_speed
        ));

        if p.bool("oracle.compare")? {
            let exact = characteristics_oracle(flow.as_ref(), |x: &[f64]| sampler(x), &grid, t_total, &oracle_from(p)?)?;
            let fidelity = run.register.fidelity(&exact)?;
            let distance = run.register.distance(&exact)?;
            out.summary.push(format!("oracle fidelity {fidelity:.6}, L2 distance {distance:.3e}"));
            if let Some(min) = p.opt_f64("check.min_fidelity")? {
                out.checks.push(Check::new(
                    "oracle fidelity",
                    fidelity >= min,
                    format!("{fidelity:.6} (minimum {min})"),
                ));
            }
        }

        let mut norms = String::from("step,time,norm\n");
        for r in &run.records {
            let _ = writeln!(norms, "{},{},{}", r.step, format_f64(r.time), format_f64(r.norm));
        }
        let (csv, bin) = register_bytes(&run.register)?;
        out.files.push(OutputFile::text("norms.csv", norms));
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
