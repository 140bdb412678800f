use std::fmt::Write as _;

use quanputer_core::format_f64;
use quanputer_core::liouville::{flow_registry, global_convergence, single_step_convergence, StepMeasure};
use quanputer_core::qreg::QuantumRegister;

use super::liouville::{oracle_from, oracle_schema, sign_from};
use super::{blob_from, blob_schema, build, expected_from, grid_from, grid_schema, Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{optional, required, with_default, KeySpec, Params};
use crate::Result;

/// `single` mode compares one four-factor step with the dense exponential over
/// a list of `τ`; `global` mode evolves to `t_total` for each step count and
/// compares with the characteristics oracle.
#[derive(Debug, Default)]
pub struct ConvergenceCommutator;

impl ScenarioKind for ConvergenceCommutator {
    fn name(&self) -> &'static str {
        "convergence-commutator"
    }

    fn schema(&self) -> Vec<KeySpec> {
        let mut s = grid_schema("2", "6", "-8", "8");
        s.push(required("flow.name"));
        s.extend(blob_schema("0, 0", "0.7071067811865476"));
        s.extend([
            with_default("sweep.mode", "single"),
            with_default("sweep.taus", "0.02, 0.01, 0.005, 0.0025"),
            with_default("sweep.measure", "state"),
            with_default("sweep.t_total", "1"),
            with_default("sweep.steps", "16, 64, 256"),
            with_default("sweep.sign", "plus"),
            optional("sweep.expected_slope"),
            with_default("sweep.tolerance", "0.3"),
            optional("check.min_fidelity"),
            with_default("check.monotone", "false"),
        ]);
        s.extend(oracle_schema());
        s
    }

    fn run(&self, p: &Params, _ctx: &mut RunContext) -> Result<Outcome> {
        let grid = grid_from(p)?;
        let flow = build(&flow_registry(), p, "flow.name")?;
        let sampler = blob_from(p, grid.axes())?;
        let expected = expected_from(p, "sweep.expected_slope", "sweep.tolerance")?;
        let mode = p.choice("sweep.mode", &["single", "global"])?;

        let mut out = Outcome::default();
        let report = if mode == "single" {
            let taus = p.f64s("sweep.taus")?;
            if taus.len() < 3 || taus.contains(&0.0) {
                return Err(p.error("sweep.taus", "need at least 3 nonzero values").into());
            }
            let measure = match p.choice("sweep.measure", &["state", "operator"])?.as_str() {
                "operator" => StepMeasure::Operator,
                _ => StepMeasure::State(QuantumRegister::from_sampler(grid.clone(), |x| sampler(x))?),
            };
            out.summary.push(format!(
                "single four-factor step, flow {} on {} points, {} measure",
                flow.name(),
                grid.total_points(),
                p.str("sweep.measure")?
            ));
            single_step_convergence(flow.as_ref(), &grid, &taus, &measure, expected)?
        } else {
            let steps = p.usizes("sweep.steps")?;
            if steps.len() < 3 || steps.contains(&0) {
                return Err(p.error("sweep.steps", "need at least 3 positive step counts").into());
            }
            let t_total = p.f64("sweep.t_total")?;
            let sweep = global_convergence(
                flow.as_ref(),
                |x: &[f64]| sampler(x),
                &grid,
                t_total,
                &steps,
                sign_from(p, "sweep.sign")?,
                &oracle_from(p)?,
                expected,
            )?;
            out.summary.push(format!(
                "global transport to t = {t_total}, flow {} on {} points",
                flow.name(),
                grid.total_points()
            ));
            let mut csv = String::from("steps,fidelity\n");
            for (n, f) in &sweep.fidelities {
                let _ = writeln!(csv, "{n},{}", format_f64(*f));
            }
            out.files.push(OutputFile::text("fidelity.csv", csv));
            let last = sweep.fidelities.last().map_or(0.0, |f| f.1);
            out.summary.push(format!("final fidelity {last:.6}"));
            if let Some(min) = p.opt_f64("check.min_fidelity")? {
                out.checks.push(Check::new("final fidelity", last >= min, format!("{last:.6} (minimum {min})")));
            }
            if p.bool("check.monotone")? {
                out.checks.push(Check::new(
                    "fidelity monotone in N",
                    sweep.fidelity_monotone(0.0),
                    format!("{:?}", sweep.fidelities.iter().map(|f| format!("{:.6}", f.1)).collect::<Vec<_>>()),
                ));
            }
            sweep.report
        };
        out.summary.push(report.summary_line());
        if expected.is_some() {
            out.checks.push(Check::from_report("commutator order", &report));
        }
        out.files.push(OutputFile::text("convergence.csv", report.to_csv()));
        Ok(out)
    }
}
