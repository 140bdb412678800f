use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use quanputer_core::field::{ConstantField, FnField, LinearField, VectorField};
use quanputer_core::liouville::*;
use quanputer_core::qreg::{GridSpec, QuantumRegister};
use quanputer_core::ExpectedOrder;

fn grid2(bits: u32, lo: f64, hi: f64) -> GridSpec {
    GridSpec::uniform_box(2, bits, lo, hi, 1.0).unwrap()
}

fn blob(cx: f64, cy: f64) -> impl Fn(&[f64]) -> Complex64 + Sync + Copy {
    move |x: &[f64]| Complex64::new((-((x[0] - cx).powi(2) + (x[1] - cy).powi(2))).exp(), 0.0)
}

fn zero_flow() -> ConstantField {
    ConstantField { c: vec![0.0, 0.0] }
}

#[test]
fn symplectic_form_blocks() {
    let e = symplectic_form(4);
    assert_eq!(e[(0, 2)], 1.0);
    assert_eq!(e[(1, 3)], 1.0);
    assert_eq!(e[(2, 0)], -1.0);
    assert_eq!(e[(3, 1)], -1.0);
    assert_eq!(e.iter().filter(|v| **v != 0.0).count(), 4);
    assert_eq!(&e.transpose(), &(-&e));
}

#[test]
fn hamiltonian_flows() {
    let harmonic = flow_from_hamiltonian(HamiltonianFlowSpec::harmonic(2)).unwrap();
    assert_eq!(harmonic.velocity(&[0.3, -1.2]), vec![-1.2, -0.3]);

    let flat = flow_from_hamiltonian(HamiltonianFlowSpec::new("const", 2, Arc::new(|_: &[f64]| 4.2))).unwrap();
    for v in flat.velocity(&[1.0, 2.0]) {
        assert!(v.abs() < 1e-9);
    }

    // H = x1 x2 by central differences: grad = (x2, x1), v = (x1, -x2)
    let fd = flow_from_hamiltonian(HamiltonianFlowSpec::new("x1x2", 2, Arc::new(|x: &[f64]| x[0] * x[1]))).unwrap();
    let v = fd.velocity(&[0.7, -2.0]);
    assert!((v[0] - 0.7).abs() < 1e-9 && (v[1] - 2.0).abs() < 1e-9);
    let saddle = flow_from_hamiltonian(HamiltonianFlowSpec::saddle(2)).unwrap();
    assert_eq!(saddle.velocity(&[0.7, -2.0]), vec![0.7, 2.0]);

    let g = grid2(5, -4.0, 4.0);
    for f in [&harmonic as &dyn VectorField, &saddle, &fd] {
        assert!(divergence_report(f, &g).unwrap().divergence_free, "{}", f.name());
    }
    assert!(matches!(
        flow_from_hamiltonian(HamiltonianFlowSpec::harmonic(3)),
        Err(LiouvilleError::OddPhaseDim(3))
    ));
}

#[test]
fn four_dimensional_hamiltonian_flow_is_incompressible() {
    let spec = HamiltonianFlowSpec::new(
        "coupled",
        4,
        Arc::new(|x: &[f64]| x[0] * x[0] * x[3] + (x[1] * x[2]).sin() + 0.5 * x[2] * x[2]),
    );
    let f = flow_from_hamiltonian(spec).unwrap();
    let g = GridSpec::uniform_box(4, 2, -1.0, 1.0, 1.0).unwrap();
    let r = divergence_report(&f, &g).unwrap();
    assert!(r.max_divergence < 1e-5, "{r:?}");
}

#[test]
fn registry_builds_flows() {
    let reg = flow_registry();
    assert_eq!(
        reg.names().collect::<Vec<_>>(),
        ["constant", "hamiltonian", "rotation", "stretch", "tabulated"]
    );
    assert_eq!(reg.build_str("constant(1,2,3)").unwrap().dim(), 3);
    assert_eq!(reg.build_str("rotation").unwrap().velocity(&[1.0, 2.0]), vec![2.0, -1.0]);
    assert_eq!(reg.build_str("hamiltonian(H1=saddle)").unwrap().velocity(&[1.0, 2.0]), vec![1.0, -2.0]);
    assert_eq!(reg.build_str("hamiltonian(harmonic)").unwrap().velocity(&[1.0, 2.0]), vec![2.0, -1.0]);
    assert!(reg.build_str("hamiltonian(H1=duffing)").is_err());
    assert!(reg.build_str("constant").is_err());
}

#[test]
fn tabulated_flow_reproduces_linear_field() {
    let mut csv = String::from("x_0,x_1,v_0,v_1\n");
    for i in 0..5 {
        for j in 0..4 {
            let (x, y) = (i as f64 - 2.0, j as f64 * 0.5);
            csv.push_str(&format!("{x},{y},{y},{}\n", -x));
        }
    }
    let t = TabulatedFlow::from_csv_str("tab", &csv).unwrap();
    let v = t.velocity(&[0.3, 0.8]);
    assert!((v[0] - 0.8).abs() < 1e-14 && (v[1] + 0.3).abs() < 1e-14);
    assert_eq!(t.velocity(&[10.0, -5.0]), vec![0.0, -2.0]);
    assert!(TabulatedFlow::from_csv_str("bad", "0,0,1,1\n1,0,1,1\n0,1,1,1\n").is_err());
}

#[test]
fn u_for_constant_and_rotation() {
    let g = grid2(4, -3.0, 3.0);
    let c = build_u(&ConstantField { c: vec![1.5, -0.5] }, &g).unwrap();
    let rot = build_u(&LinearField::rotation(), &g).unwrap();
    for flat in 0..g.total_points() {
        let x = g.coordinates(flat);
        assert!((c.values[0][flat] - 1.5 * (x[0] + 3.0) / 2.0).abs() < 1e-13);
        assert!((c.values[1][flat] + 0.5 * (x[1] + 3.0) / 2.0).abs() < 1e-13);
        assert!((rot.values[0][flat] - x[1] * (x[0] + 3.0) / 2.0).abs() < 1e-13);
        assert!((rot.values[1][flat] + x[0] * (x[1] + 3.0) / 2.0).abs() < 1e-13);
    }
    assert_eq!(c.lower_limit, vec![-3.0, -3.0]);
    assert!(rot.derivative_error() < 1e-13);
}

#[test]
fn u_derivative_error_is_second_order() {
    let flow = FnField::new("wavy", 2, |x: &[f64]| vec![(x[0] + 0.3 * x[1]).sin(), (0.7 * x[0]).cos() * x[1]]);
    let errs: Vec<f64> = [5u32, 6, 7]
        .iter()
        .map(|&b| build_u(&flow, &grid2(b, -3.0, 3.0)).unwrap().derivative_error())
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.4, "{errs:?}");
    }
}

#[test]
fn generator_check_cases() {
    let g = grid2(4, -6.0, 6.0);
    let probes = ProbeSet::default_for(&g);
    let zero = liouville_generator_spectrum_check(&zero_flow(), &g, &probes).unwrap();
    assert_eq!(zero.transport_norm, 0.0);
    assert_eq!(zero.hermiticity_defect, 0.0);
    assert!(zero.hermitian && zero.divergence.divergence_free);

    let rot = liouville_generator_spectrum_check(&LinearField::rotation(), &g, &probes).unwrap();
    assert!(rot.hermitian && rot.divergence.divergence_free);

    let stretch = liouville_generator_spectrum_check(&LinearField::stretch(), &g, &probes).unwrap();
    assert!(!stretch.divergence.divergence_free);
    assert!(stretch.hermiticity_defect > 0.1);
    assert!(!stretch.hermitian);

    let big = grid2(7, -1.0, 1.0);
    assert!(matches!(
        liouville_generator_spectrum_check(&zero_flow(), &big, &probes),
        Err(LiouvilleError::TooLarge { .. })
    ));
}

#[test]
fn hermiticity_full_matches_dense_construction() {
    // independent dense build of M = Σ v_k P_k with P_k from an explicit DFT
    let g = grid2(3, -2.0, 2.0);
    let n = g.total_points();
    let flow = LinearField::stretch();
    let probes = ProbeSet { sigma: 0.5, centers: vec![vec![0.0, 0.0]] };
    let check = liouville_generator_spectrum_check(&flow, &g, &probes).unwrap();
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for a in 0..n {
        let ia = g.unravel(a);
        let v = flow.velocity(&g.coordinates(a));
        for b in 0..n {
            let ib = g.unravel(b);
            for k in 0..2 {
                if ia[1 - k] != ib[1 - k] {
                    continue;
                }
                let nk = g.points(k) as f64;
                let p: Complex64 = g
                    .momenta(k)
                    .iter()
                    .map(|&p| p * Complex64::from_polar(1.0, p * (g.position(k, ia[k]) - g.position(k, ib[k]))) / nk)
                    .sum();
                m[(a, b)] += v[k] * p;
            }
        }
    }
    let defect = (&m - m.adjoint()).norm() / m.norm();
    assert!((defect - check.hermiticity_defect).abs() < 1e-12, "{defect} vs {}", check.hermiticity_defect);
}

#[test]
fn commutator_step_identities() {
    let g = grid2(5, -5.0, 5.0);
    let psi0 = QuantumRegister::from_sampler(g.clone(), blob(0.5, -0.3)).unwrap();
    let u = build_u(&LinearField::rotation(), &g).unwrap();
    let mut psi = psi0.clone();
    commutator_step(&mut psi, &u, &CommutatorPlan::new(0.0, 1, TauSign::Plus, 1.0).unwrap()).unwrap();
    assert!(psi.distance(&psi0).unwrap() < 1e-13);

    let u0 = build_u(&zero_flow(), &g).unwrap();
    let mut psi = psi0.clone();
    commutator_step(&mut psi, &u0, &CommutatorPlan::new(0.3, 1, TauSign::Plus, 1.0).unwrap()).unwrap();
    assert!(psi.distance(&psi0).unwrap() < 1e-13);
}

#[test]
fn plan_tau() {
    let plan = CommutatorPlan::new(2.0, 8, TauSign::Plus, 0.5).unwrap();
    assert!((plan.tau() - 1.0).abs() < 1e-15);
    let neg = CommutatorPlan { sign: TauSign::Minus, ..plan };
    assert_eq!(neg.tau(), -plan.tau());
    let p = CommutatorPlan::new(1.0, 7, TauSign::Plus, 1.3).unwrap();
    assert!((p.steps as f64 * p.hbar * p.hbar * p.tau() * p.tau() - p.t_total).abs() < 1e-14);
    assert!(CommutatorPlan::new(1.0, 0, TauSign::Plus, 1.0).is_err());
}

#[test]
fn single_step_order_both_signs() {
    let g = GridSpec::new(vec![6, 2], vec![0.5, 0.5], vec![-16.0, -1.0], 1.0).unwrap();
    let flow = ConstantField { c: vec![1.0, 0.0] };
    let exp = Some(ExpectedOrder { slope: 3.0, tolerance: 0.3 });
    for sign in [1.0, -1.0] {
        let taus: Vec<f64> = [0.02, 0.01, 0.005, 0.0025].iter().map(|t| sign * t).collect();
        let r = single_step_convergence(&flow, &g, &taus, &StepMeasure::Operator, exp).unwrap();
        assert!(r.pass, "{}", r.summary_line());
    }
    let zero = single_step_convergence(&zero_flow(), &g, &[0.02, 0.01], &StepMeasure::Operator, None).unwrap();
    assert!(zero.max_error() < 1e-13);
}

#[test]
fn zero_flow_leaves_state() {
    let g = grid2(5, -5.0, 5.0);
    let psi0 = QuantumRegister::from_sampler(g.clone(), blob(1.0, 0.0)).unwrap();
    let run = evolve_classical(&psi0, &zero_flow(), &CommutatorPlan::new(1.0, 10, TauSign::Plus, 1.0).unwrap()).unwrap();
    assert!(run.register.distance(&psi0).unwrap() < 1e-12);
    assert!(run.warnings.is_empty());
    assert_eq!(run.records.len(), 11);
}

#[test]
fn constant_flow_translates_along_velocity() {
    let g = grid2(6, -8.0, 8.0);
    let c = 1.0;
    let flow = ConstantField { c: vec![c, 0.0] };
    let psi0 = QuantumRegister::from_sampler(g.clone(), blob(-0.5, 0.0)).unwrap();
    let run = evolve_classical(&psi0, &flow, &CommutatorPlan::new(1.0, 256, TauSign::Plus, 1.0).unwrap()).unwrap();
    let oracle = characteristics_oracle(&flow, blob(-0.5, 0.0), &g, 1.0, &OracleOptions::default()).unwrap();
    assert!(run.register.fidelity(&oracle).unwrap() >= 0.999);
    let shift = run.register.mean_position(0).unwrap() - psi0.mean_position(0).unwrap();
    assert!((shift - c).abs() < 1e-3, "{shift}");
    assert!(run.register.mean_position(1).unwrap().abs() < 1e-10);
}

#[test]
fn norm_preserved_even_for_compressible_flow() {
    let g = grid2(5, -6.0, 6.0);
    let psi0 = QuantumRegister::from_sampler(g.clone(), blob(0.0, 0.5)).unwrap();
    let run = evolve_classical(&psi0, &LinearField::stretch(), &CommutatorPlan::new(0.5, 40, TauSign::Plus, 1.0).unwrap()).unwrap();
    for r in &run.records {
        assert!((r.norm - 1.0).abs() <= 1e-12);
    }
    assert_eq!(run.warnings.len(), 1);
    assert!(!run.divergence.divergence_free);
}

#[test]
fn one_dimensional_flow_warns() {
    let g = GridSpec::uniform_box(1, 6, -8.0, 8.0, 1.0).unwrap();
    let psi0 = QuantumRegister::from_sampler(g.clone(), |x| Complex64::new((-x[0] * x[0]).exp(), 0.0)).unwrap();
    let run = evolve_classical(&psi0, &ConstantField { c: vec![1.0] }, &CommutatorPlan::new(1.0, 64, TauSign::Plus, 1.0).unwrap()).unwrap();
    assert_eq!(run.warnings.len(), 1);
    assert!(run.warnings[0].contains("one-dimensional"));
}

#[test]
fn oracle_cases() {
    let g = grid2(6, -8.0, 8.0);
    let s = blob(1.0, -0.5);
    let at0 = characteristics_oracle(&LinearField::rotation(), s, &g, 0.0, &OracleOptions::default()).unwrap();
    assert!(at0.distance(&QuantumRegister::from_sampler(g.clone(), s).unwrap()).unwrap() < 1e-15);

    let moved = characteristics_oracle(&ConstantField { c: vec![0.5, 0.25] }, s, &g, 2.0, &OracleOptions::default()).unwrap();
    let exact = QuantumRegister::from_sampler(g.clone(), |x: &[f64]| s(&[x[0] - 1.0, x[1] - 0.5])).unwrap();
    assert!(moved.distance(&exact).unwrap() < 1e-12);

    // Φ_{−π/2}(x1, x2) = (−x2, x1) for v = (x2, −x1)
    let quarter = characteristics_oracle(&LinearField::rotation(), s, &g, PI / 2.0, &OracleOptions::default()).unwrap();
    let exact = QuantumRegister::from_sampler(g.clone(), |x: &[f64]| s(&[-x[1], x[0]])).unwrap();
    assert!(quarter.distance(&exact).unwrap() < 1e-10);
}

#[test]
fn oracle_guards_safety_box() {
    let g = grid2(5, -6.0, 6.0);
    let err = characteristics_oracle(&ConstantField { c: vec![1.0, 0.0] }, blob(0.0, 0.0), &g, 5.0, &OracleOptions::default())
        .unwrap_err();
    assert!(matches!(err, LiouvilleError::LeftSafetyBox { .. }));
}

#[test]
fn constant_flow_global_sweep() {
    let g = grid2(6, -8.0, 8.0);
    let flow = ConstantField { c: vec![1.0, 0.0] };
    let sweep = global_convergence(&flow, blob(-0.5, 0.0), &g, 1.0, &[16, 64, 256], TauSign::Plus, &OracleOptions::default(), None)
        .unwrap();
    assert!(sweep.fidelity_monotone(1e-12));
    for (_, f) in &sweep.fidelities {
        assert!(*f >= 0.999);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn commutator_step_is_unitary(cx in -2.0f64..2.0, cy in -2.0f64..2.0, a in -1.0f64..1.0, b in -1.0f64..1.0, tau in -0.3f64..0.3) {
        let g = grid2(4, -5.0, 5.0);
        let flow = LinearField { label: "lin".into(), matrix: nalgebra::DMatrix::from_row_slice(2, 2, &[a, 1.0, -1.0, b]) };
        let u = build_u(&flow, &g).unwrap();
        let mut psi = QuantumRegister::from_sampler(g.clone(), blob(cx, cy)).unwrap();
        let stepper = CommutatorStepper::new(&u, tau);
        for _ in 0..20 {
            stepper.step(&mut psi).unwrap();
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-12);
    }
}
