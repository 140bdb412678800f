use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Result, SolverError};

/// `⟨x_next| e^{−a p̂²} |x_prev⟩ = (A/(2πħ))^D exp(−|x_next − x_prev|²/(4aħ²))`
/// with `A = √(π/a)` on the principal branch, `D` the coordinate count.
pub fn kinetic_kernel(x_next: &[f64], x_prev: &[f64], a: Complex64, hbar: f64) -> Result<Complex64> {
    if x_next.len() != x_prev.len() || x_next.is_empty() {
        return Err(SolverError::InvalidPlan("kernel endpoints differ in dimension".into()));
    }
    if a.re < 0.0 || a == Complex64::new(0.0, 0.0) || !(a.re.is_finite() && a.im.is_finite()) {
        return Err(SolverError::InvalidA { a });
    }
    let d = x_next.len() as i32;
    let r2: f64 = x_next.iter().zip(x_prev).map(|(u, v)| (u - v) * (u - v)).sum();
    let big_a = (Complex64::new(PI, 0.0) / a).sqrt();
    Ok((big_a / (2.0 * PI * hbar)).powi(d) * (-r2 / (4.0 * a * hbar * hbar)).exp())
}

/// Riemann-sum evaluation of `(2πħ)^{-1} ∫ dp e^{ipΔ/ħ} e^{−(a+ε)p²}` on the
/// momentum grid of an `n`-point axis with spacing `dx`, for all displacements
/// `Δ = d·dx`. Entry `d` holds displacement `d·dx` (wrapped, as the DFT sees it).
pub fn kernel_quadrature(n: usize, dx: f64, a: Complex64, epsilon: f64, hbar: f64) -> Vec<Complex64> {
    let dp = 2.0 * PI * hbar / (n as f64 * dx);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let jj = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let p = jj * dp;
            (-(a + epsilon) * p * p).exp()
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = dp / (2.0 * PI * hbar);
    buf.iter().map(|z| z * scale).collect()
}
