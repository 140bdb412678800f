use quanputer_core::opverify::{dyadic_eps, identity_sweep, Identity, MatrixPair};
use quanputer_core::ExpectedOrder;

use super::{Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{with_default, KeySpec, Params};
use crate::Result;

/// Random Hermitian pairs use seeds `seed, seed + 1, ...`.
#[derive(Debug, Default)]
pub struct VerifyBch;

impl ScenarioKind for VerifyBch {
    fn name(&self) -> &'static str {
        "verify-bch"
    }

    fn schema(&self) -> Vec<KeySpec> {
        vec![
            with_default("verify.size", "4"),
            with_default("verify.pairs", "1"),
            with_default("verify.eps_points", "5"),
            with_default("verify.identities", "group, resolvent"),
            with_default("verify.expected_slope", "3"),
            with_default("verify.tolerance", "0.2"),
            with_default("verify.commuting_tolerance", "1e-12"),
        ]
    }

    fn run(&self, p: &Params, ctx: &mut RunContext) -> Result<Outcome> {
        let size = p.usize("verify.size")?;
        let pairs = p.usize("verify.pairs")?;
        let eps_points = p.usize("verify.eps_points")?;
        if eps_points < 3 {
            return Err(p.error("verify.eps_points", "a slope fit needs at least 3 points").into());
        }
        let identities = p
            .strs("verify.identities")?
            .iter()
            .map(|name| match name.as_str() {
                "group" => Ok(Identity::Group),
                "resolvent" => Ok(Identity::Resolvent),
                other => Err(p.error("verify.identities", format!("unknown identity `{other}`"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let expected = ExpectedOrder {
            slope: p.f64("verify.expected_slope")?,
            tolerance: p.positive_f64("verify.tolerance")?,
        };
        let commuting_tol = p.positive_f64("verify.commuting_tolerance")?;
        let eps = dyadic_eps(eps_points);

        let mut out = Outcome::default();
        out.summary.push(format!("{pairs} random {size}x{size} Hermitian pair(s), eps sweep of {eps_points}"));
        for i in 0..pairs {
            let seed = ctx.seed.wrapping_add(i as u64);
            let pair = MatrixPair::random_hermitian(size, seed)?;
            let diag = MatrixPair::random_diagonal(size, seed)?;
            for &id in &identities {
                let report = identity_sweep(id, &pair, &eps, Some(expected))?;
                out.checks.push(Check::from_report(format!("{} seed {seed}", id.name()), &report));
                out.files.push(OutputFile::text(format!("{}_seed{seed}.csv", id.name()), report.to_csv()));

                let commuting = eps
                    .iter()
                    .map(|&e| id.defect(&diag, e))
                    .collect::<std::result::Result<Vec<_>, _>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                out.checks.push(Check::new(
                    format!("{} commuting seed {seed}", id.name()),
                    commuting <= commuting_tol,
                    format!("max defect {commuting:.3e} (tolerance {commuting_tol:e})"),
                ));
            }
        }
        Ok(out)
    }
}
