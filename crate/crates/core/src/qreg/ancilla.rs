use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{PhaseFunction, QregError, QuantumRegister, Representation, Result};

/// Largest fixed-point width; beyond the f64 mantissa extra bits carry no information.
pub const MAX_FRAC_BITS: u32 = 52;

const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AncillaReport {
    pub frac_bits: u32,
    /// Total weight left on nonzero ancilla values after uncomputation.
    pub residual: f64,
    /// Largest `|e^{iF(n)} − e^{iF̃(n)}|` between exact and quantized phases.
    pub max_phase_error: f64,
}

/// Fixed-point encoding of `F/2π mod 1` with `bits` fractional bits.
fn encode(phase: f64, bits: u32) -> u64 {
    let scale = (1u64 << bits) as f64;
    let frac = (phase / TAU).rem_euclid(1.0);
    ((frac * scale).round() as u64) & ((1u64 << bits) - 1)
}

/// Applies `e^{iF(n)}` through an explicit ancilla register.
///
/// Each basis state is carried as `(n, ancilla)` pairs: attach a zeroed
/// ancilla, add the fixed-point value of `F(n)`, kick a phase per ancilla
/// bit, subtract `F(n)` again and confirm the ancilla is back at zero.
pub fn phase_via_ancilla(
    reg: &QuantumRegister,
    f: &dyn PhaseFunction,
    frac_bits: u32,
) -> Result<(QuantumRegister, AncillaReport)> {
    if !(1..=MAX_FRAC_BITS).contains(&frac_bits) {
        return Err(QregError::InvalidArgument(format!(
            "frac_bits must be in 1..={MAX_FRAC_BITS}, got {frac_bits}"
        )));
    }
    if f.arity() != reg.grid().axes() {
        return Err(QregError::ArityMismatch {
            expected: reg.grid().axes(),
            got: f.arity(),
        });
    }
    if !reg.is_position() {
        return Err(QregError::RepresentationMismatch {
            expected: Representation::Position,
        });
    }
    let grid = reg.grid().clone();
    let mask = (1u64 << frac_bits) - 1;

    let mut joint: Vec<(usize, u64, Complex64)> = reg
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, a)| (n, 0u64, *a))
        .collect();

    for (n, anc, _) in &mut joint {
        *anc = (*anc + encode(f.phase(&grid.unravel(*n)), frac_bits)) & mask;
    }

    let kicks: Vec<Complex64> = (0..frac_bits)
        .map(|q| Complex64::from_polar(1.0, TAU * (2f64).powi(q as i32 - frac_bits as i32)))
        .collect();
    for (_, anc, amp) in &mut joint {
        for (q, kick) in kicks.iter().enumerate() {
            if *anc >> q & 1 == 1 {
                *amp *= kick;
            }
        }
    }

    for (n, anc, _) in &mut joint {
        *anc = anc.wrapping_sub(encode(f.phase(&grid.unravel(*n)), frac_bits)) & mask;
    }

    let residual: f64 = joint
        .iter()
        .filter(|(_, anc, _)| *anc != 0)
        .map(|(_, _, a)| a.norm_sqr())
        .sum();
    if residual > RESIDUAL_TOL {
        return Err(QregError::AncillaNotUncomputed { residual });
    }

    let mut out = reg.clone();
    let mut max_phase_error = 0.0f64;
    for ((n, anc, amp), slot) in joint.into_iter().zip(out.amplitudes_mut()) {
        if anc != 0 {
            *slot = Complex64::new(0.0, 0.0);
            continue;
        }
        *slot = amp;
        let phase = f.phase(&grid.unravel(n));
        let quantized = TAU * encode(phase, frac_bits) as f64 / (1u64 << frac_bits) as f64;
        max_phase_error = max_phase_error
            .max((Complex64::from_polar(1.0, phase) - Complex64::from_polar(1.0, quantized)).norm());
    }
    Ok((
        out,
        AncillaReport {
            frac_bits,
            residual,
            max_phase_error,
        },
    ))
}
