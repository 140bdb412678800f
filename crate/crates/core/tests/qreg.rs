use std::f64::consts::{PI, TAU};
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use quanputer_core::qreg::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid1(bits: u32, lo: f64, hi: f64) -> GridSpec {
    GridSpec::uniform_box(1, bits, lo, hi, 1.0).unwrap()
}

fn gaussian(x0: f64, p0: f64, sigma: f64) -> impl Fn(&[f64]) -> Complex64 {
    move |x: &[f64]| {
        let d = x[0] - x0;
        Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), p0 * x[0])
    }
}

/// `⟨p⟩` by an explicit O(N²) DFT sum, independent of the FFT path.
fn momentum_by_direct_sum(reg: &QuantumRegister) -> f64 {
    let g = reg.grid();
    let n = g.points(0);
    let xs = g.positions(0);
    let ps = g.momenta(0);
    let mut num = 0.0;
    let mut den = 0.0;
    for &p in &ps {
        let b: Complex64 = reg
            .amplitudes()
            .iter()
            .zip(&xs)
            .map(|(a, x)| a * Complex64::from_polar(1.0, -p * x / g.hbar()))
            .sum::<Complex64>()
            / (n as f64).sqrt();
        num += p * b.norm_sqr();
        den += b.norm_sqr();
    }
    num / den
}

struct Const(f64);
impl PhaseFunction for Const {
    fn arity(&self) -> usize {
        1
    }
    fn phase(&self, _: &[usize]) -> f64 {
        self.0
    }
}

#[test]
fn delta_sampler_gives_basis_state() {
    let g = grid1(4, 0.0, 16.0);
    let reg = QuantumRegister::from_sampler(g.clone(), |x| c(if x[0] == 0.0 { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let basis = QuantumRegister::basis(g, &[0]).unwrap();
    assert_eq!(reg.amplitudes(), basis.amplitudes());
}

#[test]
fn constant_sampler_is_uniform() {
    let reg = QuantumRegister::from_sampler(grid1(5, -1.0, 1.0), |_| c(3.0, 0.0)).unwrap();
    for a in reg.amplitudes() {
        assert!((a - c(1.0 / 32f64.sqrt(), 0.0)).norm() < 1e-15);
    }
}

#[test]
fn zero_sampler_is_rejected() {
    let err = QuantumRegister::from_sampler(grid1(3, 0.0, 1.0), |_| c(0.0, 0.0)).unwrap_err();
    assert!(matches!(err, QregError::ZeroState));
}

#[test]
fn gaussian_position_expectation() {
    let g = grid1(8, -10.0, 10.0);
    let dx = g.spacing(0);
    let reg = QuantumRegister::from_sampler(g, gaussian(1.3, 0.0, 1.0)).unwrap();
    assert!((reg.mean_position(0).unwrap() - 1.3).abs() < dx);
    assert!((reg.norm_sqr() - 1.0).abs() < 1e-12);
}

#[test]
fn sampling_weight_matches_l2_norm() {
    let g = grid1(9, -12.0, 12.0);
    let reg = QuantumRegister::from_sampler(g.clone(), gaussian(0.0, 0.0, 1.0)).unwrap();
    // normalized Gaussian density: |ψ|² integrates to 1 with amplitude (2πσ²)^{-1/4}
    let amp = (TAU).powf(-0.25);
    let mid = g.points(0) / 2;
    let expected = amp * (-(g.position(0, mid).powi(2)) / 4.0).exp() * g.spacing(0).sqrt();
    assert!((reg.amplitudes()[mid].re - expected).abs() < 1e-12);
}

#[test]
fn zero_phase_is_identity_and_pi_is_global_sign() {
    let reg = QuantumRegister::from_sampler(grid1(6, -5.0, 5.0), gaussian(0.5, 1.0, 0.8)).unwrap();
    let mut same = reg.clone();
    same.apply_diagonal_phase(&Const(0.0)).unwrap();
    assert_eq!(same.amplitudes(), reg.amplitudes());

    let mut flipped = reg.clone();
    flipped.apply_diagonal_phase(&Const(PI)).unwrap();
    for (a, b) in flipped.amplitudes().iter().zip(reg.amplitudes()) {
        assert!((a + b).norm() < 1e-15);
    }
    assert!((flipped.fidelity(&reg).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn linear_phase_shifts_momentum() {
    let g = grid1(8, -10.0, 10.0);
    let reg = QuantumRegister::from_sampler(g.clone(), gaussian(0.0, 0.0, 1.0)).unwrap();
    let p0 = 2.0;
    let xs = g.positions(0);
    let mut kicked = reg.clone();
    kicked
        .apply_diagonal_phase(&FnPhase::new(1, move |n: &[usize]| p0 * xs[n[0]]))
        .unwrap();
    let before = momentum_by_direct_sum(&reg);
    let after = momentum_by_direct_sum(&kicked);
    assert!((after - before - p0).abs() < 1e-8);
    assert!((kicked.mean_momentum(0).unwrap() - after).abs() < 1e-10);
}

#[test]
fn phase_on_momentum_register_is_rejected() {
    let mut reg = QuantumRegister::basis(grid1(3, 0.0, 1.0), &[1]).unwrap();
    reg.to_momentum(0).unwrap();
    assert!(matches!(
        reg.apply_diagonal_phase(&Const(1.0)),
        Err(QregError::RepresentationMismatch { .. })
    ));
    assert!(matches!(reg.to_momentum(0), Err(QregError::RepresentationMismatch { .. })));
}

#[test]
fn impulse_transforms_to_uniform() {
    let mut reg = QuantumRegister::basis(grid1(5, 0.0, 1.0), &[0]).unwrap();
    reg.to_momentum(0).unwrap();
    let u = 1.0 / 32f64.sqrt();
    for a in reg.amplitudes() {
        assert!((a.norm() - u).abs() < 1e-15);
    }
}

#[test]
fn plane_wave_becomes_single_spike() {
    let g = GridSpec::uniform_box(1, 6, -3.0, 5.0, 0.7).unwrap();
    for j in [0usize, 5, 31, 32, 50] {
        let p = g.momentum(0, j);
        let hbar = g.hbar();
        let mut reg = QuantumRegister::from_sampler(g.clone(), move |x| Complex64::from_polar(1.0, p * x[0] / hbar)).unwrap();
        reg.to_momentum(0).unwrap();
        for (i, a) in reg.amplitudes().iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.norm() - want).abs() < 1e-12, "j={j} i={i} |a|={}", a.norm());
        }
        // nonzero origin is absorbed, so the spike carries no residual phase
        assert!((reg.amplitudes()[j] - reg.amplitudes()[j].norm()).norm() < 1e-12);
    }
}

#[test]
fn separable_coupled_phase_matches_single_register() {
    let g = grid1(4, -2.0, 2.0);
    let r1 = QuantumRegister::from_sampler(g.clone(), gaussian(0.3, 0.5, 0.6)).unwrap();
    let r2 = QuantumRegister::from_sampler(g.clone(), gaussian(-0.4, 0.0, 0.7)).unwrap();
    let f = |n: usize| 0.37 * n as f64 * n as f64;
    let joint = apply_coupled_phase(&[&r1, &r2], &FnPhase::new(2, move |n: &[usize]| f(n[0])), DEFAULT_JOINT_CAP).unwrap();
    let mut r1p = r1.clone();
    r1p.apply_diagonal_phase(&FnPhase::new(1, move |n: &[usize]| f(n[0]))).unwrap();
    let expect = tensor_product(&[&r1p, &r2], DEFAULT_JOINT_CAP).unwrap();
    assert!(joint.distance(&expect).unwrap() < 1e-14);

    let unchanged = apply_coupled_phase(&[&r1, &r2], &FnPhase::new(2, |_: &[usize]| 0.0), DEFAULT_JOINT_CAP).unwrap();
    assert!(unchanged.distance(&tensor_product(&[&r1, &r2], DEFAULT_JOINT_CAP).unwrap()).unwrap() < 1e-15);
}

fn schmidt_rank(reg: &QuantumRegister, n1: usize, n2: usize) -> usize {
    let m = DMatrix::from_fn(n1, n2, |i, j| reg.amplitudes()[i * n2 + j]);
    let sv = m.singular_values();
    sv.iter().filter(|s| **s > 1e-10 * sv[0]).count()
}

#[test]
fn bilinear_coupling_entangles() {
    let g = grid1(5, -4.0, 4.0);
    let r1 = QuantumRegister::from_sampler(g.clone(), gaussian(0.0, 0.0, 1.0)).unwrap();
    let r2 = QuantumRegister::from_sampler(g.clone(), gaussian(0.5, 0.0, 1.0)).unwrap();
    let product = tensor_product(&[&r1, &r2], DEFAULT_JOINT_CAP).unwrap();
    assert_eq!(schmidt_rank(&product, 32, 32), 1);
    let xs = g.positions(0);
    let joint = apply_coupled_phase(
        &[&r1, &r2],
        &FnPhase::new(2, move |n: &[usize]| xs[n[0]] * xs[n[1]]),
        DEFAULT_JOINT_CAP,
    )
    .unwrap();
    assert!(schmidt_rank(&joint, 32, 32) > 1);
}

#[test]
fn coupled_phase_errors() {
    let g = grid1(4, -2.0, 2.0);
    let r = QuantumRegister::basis(g, &[0]).unwrap();
    assert!(matches!(
        apply_coupled_phase(&[&r, &r], &Const(0.0), DEFAULT_JOINT_CAP),
        Err(QregError::ArityMismatch { expected: 2, got: 1 })
    ));
    assert!(matches!(
        apply_coupled_phase(&[&r, &r], &FnPhase::new(2, |_: &[usize]| 0.0), 100),
        Err(QregError::MemoryCap { requested: 256, cap: 100 })
    ));
}

#[test]
fn ancilla_zero_phase_is_identity() {
    let reg = QuantumRegister::from_sampler(grid1(5, -3.0, 3.0), gaussian(0.2, 1.0, 0.5)).unwrap();
    for bits in [1, 7, 52] {
        let (out, report) = phase_via_ancilla(&reg, &Const(0.0), bits).unwrap();
        assert_eq!(report.residual, 0.0);
        assert_eq!(out.amplitudes(), reg.amplitudes());
    }
}

#[test]
fn ancilla_constant_phase_within_quantization_bound() {
    let reg = QuantumRegister::from_sampler(grid1(5, -3.0, 3.0), gaussian(0.0, 0.0, 0.5)).unwrap();
    let (out, report) = phase_via_ancilla(&reg, &Const(PI / 2.0), 20).unwrap();
    let bound = TAU * 2f64.powi(-20);
    assert!(report.max_phase_error <= bound);
    let kick = c(0.0, 1.0);
    for (a, b) in out.amplitudes().iter().zip(reg.amplitudes()) {
        assert!((a - kick * b).norm() <= bound * b.norm() + 1e-16);
    }
}

#[test]
fn ancilla_linear_phase_fidelity() {
    let g = grid1(6, -3.0, 3.0);
    let n = g.points(0) as f64;
    let reg = QuantumRegister::from_sampler(g, gaussian(0.0, 0.0, 0.7)).unwrap();
    let f = FnPhase::new(1, move |i: &[usize]| i[0] as f64 * TAU / n);
    let (out, _) = phase_via_ancilla(&reg, &f, 24).unwrap();
    let mut direct = reg.clone();
    direct.apply_diagonal_phase(&f).unwrap();
    assert!(out.fidelity(&direct).unwrap() >= 1.0 - 1e-10);
}

#[test]
fn ancilla_infidelity_decays_with_bits() {
    let g = grid1(6, -3.0, 3.0);
    let reg = QuantumRegister::from_sampler(g, gaussian(0.0, 0.0, 0.9)).unwrap();
    let f = FnPhase::new(1, |i: &[usize]| (i[0] as f64 * 0.731).sin() * 3.1 + 0.123);
    let mut direct = reg.clone();
    direct.apply_diagonal_phase(&f).unwrap();
    let mut points = vec![];
    for bits in [4u32, 6, 8, 10, 12] {
        let (out, _) = phase_via_ancilla(&reg, &f, bits).unwrap();
        let infid = 1.0 - out.fidelity(&direct).unwrap();
        assert!(infid <= (TAU * 2f64.powi(-(bits as i32))).powi(2));
        points.push((2f64.powi(-(bits as i32)), infid));
    }
    let fit = quanputer_core::fit_order(&points).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.5, "slope {}", fit.slope);
}

#[test]
fn ancilla_detects_inconsistent_phase_function() {
    let reg = QuantumRegister::from_sampler(grid1(3, -1.0, 1.0), |_| c(1.0, 0.0)).unwrap();
    let calls = AtomicUsize::new(0);
    let f = FnPhase::new(1, move |_: &[usize]| calls.fetch_add(1, Ordering::Relaxed) as f64 * 0.1);
    let err = phase_via_ancilla(&reg, &f, 16).unwrap_err();
    assert!(matches!(err, QregError::AncillaNotUncomputed { .. }));
}

#[test]
fn ancilla_rejects_bad_width() {
    let reg = QuantumRegister::basis(grid1(3, -1.0, 1.0), &[0]).unwrap();
    assert!(phase_via_ancilla(&reg, &Const(1.0), 0).is_err());
    assert!(phase_via_ancilla(&reg, &Const(1.0), 53).is_err());
}

#[test]
fn observables_of_basis_state() {
    let g = grid1(4, -2.0, 2.0);
    let reg = QuantumRegister::basis(g, &[0]).unwrap();
    let obs = reg.observables();
    assert_eq!(obs.norm, 1.0);
    assert_eq!(obs.mean_position, vec![-2.0]);
    assert!((reg.fidelity(&reg).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn kicked_gaussian_mean_momentum() {
    let reg = QuantumRegister::from_sampler(grid1(8, -10.0, 10.0), gaussian(0.0, 1.5, 1.0)).unwrap();
    assert!((reg.mean_momentum(0).unwrap() - 1.5).abs() < 1e-8);
    assert!((momentum_by_direct_sum(&reg) - 1.5).abs() < 1e-8);
}

#[test]
fn fidelity_grid_mismatch() {
    let a = QuantumRegister::basis(grid1(3, 0.0, 1.0), &[0]).unwrap();
    let b = QuantumRegister::basis(grid1(3, 0.0, 2.0), &[0]).unwrap();
    assert!(matches!(a.fidelity(&b), Err(QregError::GridMismatch(_))));
}

#[test]
fn multi_axis_transform_matches_per_axis_product() {
    let g = GridSpec::new(vec![3, 4], vec![0.5, 0.25], vec![-2.0, 1.0], 1.0).unwrap();
    let gx = GridSpec::new(vec![3], vec![0.5], vec![-2.0], 1.0).unwrap();
    let gy = GridSpec::new(vec![4], vec![0.25], vec![1.0], 1.0).unwrap();
    let rx = QuantumRegister::from_sampler(gx, gaussian(-0.5, 0.3, 0.8)).unwrap();
    let ry = QuantumRegister::from_sampler(gy, gaussian(2.0, -1.0, 0.6)).unwrap();
    let mut joint = tensor_product(&[&rx, &ry], DEFAULT_JOINT_CAP).unwrap();
    assert_eq!(joint.grid(), &g);
    joint.to_momentum(0).unwrap();
    joint.to_momentum(1).unwrap();
    let (mut mx, mut my) = (rx.clone(), ry.clone());
    mx.to_momentum(0).unwrap();
    my.to_momentum(0).unwrap();
    for i in 0..8 {
        for j in 0..16 {
            let want = mx.amplitudes()[i] * my.amplitudes()[j];
            assert!((joint.amplitudes()[i * 16 + j] - want).norm() < 1e-15);
        }
    }
}

#[test]
fn csv_and_binary_round_trip() {
    let g = GridSpec::new(vec![2, 3], vec![0.5, 0.25], vec![-1.0, 1.0], 0.5).unwrap();
    let reg = QuantumRegister::from_sampler(g, |x| c(x[0] + 2.0, x[1])).unwrap();
    let mut csv = Vec::new();
    reg.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("n,x_0,x_1,Re(a),Im(a),|a|^2\n"));
    assert_eq!(text.lines().count(), 33);

    let mut bin = Vec::new();
    reg.write_binary(&mut bin).unwrap();
    assert_eq!(&bin[..4], b"QREG");
    assert_eq!(bin.len(), 4 + 4 + 4 + 2 * 24 + 8 + 32 * 16);
    let back = QuantumRegister::read_binary(&bin[..]).unwrap();
    assert_eq!(back.grid(), reg.grid());
    assert_eq!(back.amplitudes(), reg.amplitudes());

    let mut bad = bin.clone();
    bad[0] = b'X';
    assert!(matches!(QuantumRegister::read_binary(&bad[..]), Err(QregError::Format(_))));
    assert!(QuantumRegister::read_binary(&bin[..40]).is_err());
}

#[test]
fn single_axis_csv_header() {
    let reg = QuantumRegister::basis(grid1(2, 0.0, 1.0), &[1]).unwrap();
    let mut csv = Vec::new();
    reg.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("n,x,Re(a),Im(a),|a|^2\n"));
    assert!(text.lines().nth(2).unwrap().starts_with("1,2.5"));
}

fn arb_register() -> impl Strategy<Value = QuantumRegister> {
    (1u32..7, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64))
        .prop_filter_map("nonzero", |(bits, raw)| {
            let n = 1usize << bits;
            let amps = raw[..n].iter().map(|(r, i)| c(*r, *i)).collect();
            QuantumRegister::from_amplitudes(grid1(bits, -1.5, 2.5), amps).ok()
        })
}

proptest! {
    #[test]
    fn dft_round_trip_and_parseval(reg in arb_register()) {
        let mut m = reg.clone();
        m.to_momentum(0).unwrap();
        prop_assert!((m.norm_sqr() - reg.norm_sqr()).abs() < 1e-13);
        m.to_position(0).unwrap();
        for (a, b) in m.amplitudes().iter().zip(reg.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn phases_compose_additively(reg in arb_register(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let f1 = FnPhase::new(1, move |n: &[usize]| a * n[0] as f64);
        let f2 = FnPhase::new(1, move |n: &[usize]| b * (n[0] as f64).sqrt());
        let sum = FnPhase::new(1, move |n: &[usize]| a * n[0] as f64 + b * (n[0] as f64).sqrt());
        let mut seq = reg.clone();
        seq.apply_diagonal_phase(&f1).unwrap();
        seq.apply_diagonal_phase(&f2).unwrap();
        let mut once = reg.clone();
        once.apply_diagonal_phase(&sum).unwrap();
        for (x, y) in seq.amplitudes().iter().zip(once.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn norm_drift_over_many_operations(reg in arb_register(), seed in 0.0f64..10.0) {
        let mut r = reg.clone();
        for k in 0..250 {
            let s = seed + k as f64;
            r.apply_diagonal_phase(&FnPhase::new(1, move |n: &[usize]| (s * n[0] as f64).cos())).unwrap();
            r.to_momentum(0).unwrap();
            r.to_position(0).unwrap();
            r.apply_diagonal_phase(&FnPhase::new(1, move |n: &[usize]| s * 0.01 * n[0] as f64)).unwrap();
        }
        prop_assert!((r.norm_sqr() - 1.0).abs() <= 1e-12);
    }
}
