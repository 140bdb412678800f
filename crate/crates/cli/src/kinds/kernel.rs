use std::fmt::Write as _;

use num_complex::Complex64;
use quanputer_core::format_f64;
use quanputer_core::quantum_solver::{kernel_quadrature, kinetic_kernel};

use super::{Check, Outcome, OutputFile, RunContext, ScenarioKind};
use crate::config::{with_default, KeySpec, Params};
use crate::Result;

/// Compares the closed-form kernel `⟨x′|e^{−ap̂²}|x⟩` with a DFT Riemann sum,
/// once for real `a` and once for imaginary `a` under damping `ε`. The
/// damped case is repeated for `ε·2^j`, `j < eps_points`.
#[derive(Debug, Default)]
pub struct VerifyKernel;

struct Case {
    label: String,
    bits: u32,
    dx: f64,
    a: Complex64,
    epsilon: f64,
}

impl ScenarioKind for VerifyKernel {
    fn name(&self) -> &'static str {
        "verify-kernel"
    }

    fn schema(&self) -> Vec<KeySpec> {
        vec![
            with_default("kernel.hbar", "1"),
            with_default("kernel.max_offset", "250"),
            with_default("kernel.tolerance", "1e-6"),
            with_default("kernel.real_a", "0.5"),
            with_default("kernel.real_bits", "12"),
            with_default("kernel.real_dx", "0.01"),
            with_default("kernel.imag_a", "0.005"),
            with_default("kernel.imag_bits", "18"),
            with_default("kernel.imag_dx", "4e-4"),
            with_default("kernel.epsilon", "1e-6"),
            with_default("kernel.eps_points", "1"),
        ]
    }

    fn run(&self, p: &Params, _ctx: &mut RunContext) -> Result<Outcome> {
        let hbar = p.positive_f64("kernel.hbar")?;
        let max_offset = p.usize("kernel.max_offset")?;
        let tol = p.positive_f64("kernel.tolerance")?;
        let bits = |key: &str| -> Result<u32> {
            let b = p.usize(key)?;
            if (1..=24).contains(&b) {
                Ok(b as u32)
            } else {
                Err(p.error(key, "must be in 1..=24").into())
            }
        };
        let mut cases = vec![Case {
            label: "real".into(),
            bits: bits("kernel.real_bits")?,
            dx: p.positive_f64("kernel.real_dx")?,
            a: Complex64::new(p.positive_f64("kernel.real_a")?, 0.0),
            epsilon: 0.0,
        }];
        let eps0 = p.positive_f64("kernel.epsilon")?;
        for j in 0..p.usize("kernel.eps_points")? {
            cases.push(Case {
                label: "imaginary".into(),
                bits: bits("kernel.imag_bits")?,
                dx: p.positive_f64("kernel.imag_dx")?,
                a: Complex64::new(0.0, p.f64("kernel.imag_a")?),
                epsilon: eps0 * 2f64.powi(j as i32),
            });
        }

        let mut out = Outcome::default();
        let mut csv = String::from("case,epsilon,offset,x,analytic_re,analytic_im,quadrature_re,quadrature_im\n");
        let mut footer = String::new();
        for case in &cases {
            let n = 1usize << case.bits;
            if 2 * max_offset >= n {
                return Err(p.error("kernel.max_offset", format!("must be below {} for {} points", n / 2, n)).into());
            }
            let a = case.a + case.epsilon;
            let q = kernel_quadrature(n, case.dx, case.a, case.epsilon, hbar);
            let peak = kinetic_kernel(&[0.0], &[0.0], a, hbar)?.norm();
            let mut worst = 0.0f64;
            for d in -(max_offset as i64)..=(max_offset as i64) {
                let x = d as f64 * case.dx;
                let k = kinetic_kernel(&[x], &[0.0], a, hbar)?;
                let qd = q[d.rem_euclid(n as i64) as usize];
                worst = worst.max((qd - k).norm() / peak);
                let _ = writeln!(
                    csv,
                    "{},{},{d},{},{},{},{},{}",
                    case.label,
                    format_f64(case.epsilon),
                    format_f64(x),
                    format_f64(k.re),
                    format_f64(k.im),
                    format_f64(qd.re),
                    format_f64(qd.im)
                );
            }
            let _ = writeln!(
                footer,
                "# case={} a_re={} a_im={} epsilon={} points={n} max_error_rel_peak={}",
                case.label,
                format_f64(case.a.re),
                format_f64(case.a.im),
                format_f64(case.epsilon),
                format_f64(worst)
            );
            out.checks.push(Check::new(
                format!("kernel {} eps {:e}", case.label, case.epsilon),
                worst <= tol,
                format!("max error relative to peak {worst:.3e} (tolerance {tol:e})"),
            ));
        }
        csv.push_str(&footer);
        out.files.push(OutputFile::text("kernel.csv", csv));
        Ok(out)
    }
}
