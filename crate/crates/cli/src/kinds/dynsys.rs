use quanputer_core::dynsys::{map_registry, run_extended, step_backward, NewtonOptions};
use quanputer_core::format_f64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{build, Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{optional, required, with_default, KeySpec, Params};
use crate::Result;

/// Runs the extended map, then checks the trajectory backwards step by step.
#[derive(Debug, Default)]
pub struct Dynsys;

impl ScenarioKind for Dynsys {
    fn name(&self) -> &'static str {
        "dynsys"
    }

    fn schema(&self) -> Vec<KeySpec> {
        vec![
            required("map.name"),
            required("run.steps"),
            optional("run.s0"),
            optional("run.l0"),
            optional("run.tangent0"),
            with_default("run.track_pairing", "true"),
            with_default("check.reversal_tolerance", "1e-12"),
            optional("check.pairing_tolerance"),
        ]
    }

    fn run(&self, p: &Params, ctx: &mut RunContext) -> Result<Outcome> {
        let map = build(&map_registry(), p, "map.name")?;
        let dim = map.input_dim();
        let steps = p.usize("run.steps")?;
        let mut vector = |key: &str| -> Result<Vec<f64>> {
            if p.has(key) {
                let v = p.f64s(key)?;
                if v.len() != dim {
                    return Err(p.error(key, format!("expected {dim} values, got {}", v.len())).into());
                }
                Ok(v)
            } else {
                Ok((0..dim).map(|_| ctx.rng.sample(StandardNormal)).collect())
            }
        };
        let s0 = vector("run.s0")?;
        let l0 = vector("run.l0")?;
        let tangent = if p.bool("run.track_pairing")? {
            Some(vector("run.tangent0")?)
        } else {
            None
        };

        let traj = run_extended(map.as_ref(), &s0, &l0, steps, tangent.as_deref())?;

        let opts = NewtonOptions::default();
        let mut reversal = 0.0f64;
        for k in 0..steps {
            let back = step_backward(map.as_ref(), &traj.states[k + 1], &opts)?;
            let s = &traj.states[k];
            let err = back.iter().zip(s).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale = 1.0 + s.iter().map(|v| v * v).sum::<f64>().sqrt();
            reversal = reversal.max(err / scale);
        }

        let mut out = Outcome::default();
        out.summary.push(format!("map {} dim {dim}, {steps} steps", map.name()));
        out.summary.push(format!("initial state {:?}", s0.iter().map(|v| format_f64(*v)).collect::<Vec<_>>()));
        let rev_tol = p.positive_f64("check.reversal_tolerance")?;
        out.checks.push(Check::new(
            "reversal round trip",
            reversal <= rev_tol,
            format!("max relative error {reversal:.3e} (tolerance {rev_tol:e})"),
        ));
        if let (Some(abs), Some(rel)) = (traj.pairing_drift(), traj.relative_pairing_drift()) {
            out.summary.push(format!("pairing drift {abs:.3e}, relative to conditioning {rel:.3e}"));
            if let Some(tol) = p.opt_f64("check.pairing_tolerance")? {
                out.checks.push(Check::new(
                    "pairing conservation",
                    rel <= tol,
                    format!("relative drift {rel:.3e} (tolerance {tol:e})"),
                ));
            }
        }
        out.files.push(OutputFile::text("trajectory.csv", traj.to_csv()));
        Ok(out)
    }
}
