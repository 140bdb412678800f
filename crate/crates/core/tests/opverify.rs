use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use quanputer_core::opverify::*;
use quanputer_core::qreg::GridSpec;
use quanputer_core::ExpectedOrder;

const ORDER3: Option<ExpectedOrder> = Some(ExpectedOrder { slope: 3.0, tolerance: 0.2 });

#[test]
fn commuting_pairs_have_no_defect() {
    let pair = MatrixPair::random_diagonal(4, 11).unwrap();
    for eps in [1.0, 0.5, 0.1, 1e-3] {
        assert!(group_commutator_defect(&pair, eps).unwrap() <= 1e-12);
        assert!(resolvent_commutator_defect(&pair, eps).unwrap() <= 1e-12);
    }
    let h = MatrixPair::random_hermitian(4, 3).unwrap();
    let same = MatrixPair::new(h.a.clone(), h.a.clone()).unwrap();
    for eps in [1.0, 0.3, 0.01] {
        assert!(group_commutator_defect(&same, eps).unwrap() <= 1e-12);
    }
    assert_eq!(resolvent_commutator_defect(&h, 0.0).unwrap(), 0.0);
}

#[test]
fn random_pairs_are_third_order() {
    for seed in 0u64..10 {
        let pair = MatrixPair::random_hermitian(4, seed).unwrap();
        for id in [Identity::Group, Identity::Resolvent] {
            let r = identity_sweep(id, &pair, &dyadic_eps(5), ORDER3).unwrap();
            assert!(r.pass, "{} seed {seed}: {}", id.name(), r.summary_line());
        }
        let r = identity_sweep(Identity::Group, &pair.skew(), &dyadic_eps(5), ORDER3).unwrap();
        assert!(r.pass, "skew seed {seed}: {}", r.summary_line());
    }
}

#[test]
fn dense_exponential_matches_eigendecomposition() {
    // oracle for the exponentials the defects rely on
    let pair = MatrixPair::random_hermitian(4, 9).unwrap();
    let prop = quanputer_core::linalg::HermitianPropagator::new(&pair.a);
    let via_eig = prop.unitary(-0.7, 1.0);
    let via_pade = (&pair.a * Complex64::new(0.0, 0.7)).exp();
    assert!((via_eig - via_pade).norm() < 1e-13);
}

#[test]
fn singular_resolvent_is_reported() {
    let a = quanputer_core::linalg::CMatrix::identity(2, 2) * Complex64::new(-2.0, 0.0);
    let b = quanputer_core::linalg::CMatrix::identity(2, 2);
    let pair = MatrixPair::new(a, b).unwrap();
    assert!(matches!(
        resolvent_commutator_defect(&pair, 0.5),
        Err(VerifyError::Singular { which: "A", .. })
    ));
}

#[test]
fn fit_order_synthetic() {
    let cubic: Vec<(f64, f64)> = dyadic_eps(5).iter().map(|&p| (p, p.powi(3))).collect();
    assert!((fit_order(&cubic).unwrap().slope - 3.0).abs() < 1e-10);
    let linear: Vec<(f64, f64)> = dyadic_eps(5).iter().map(|&p| (p, 2.0 * p)).collect();
    assert!((fit_order(&linear).unwrap().slope - 1.0).abs() < 1e-10);
    assert!(fit_order(&[(1.0, 1.0), (0.5, 0.0), (0.25, 1.0)]).is_err());
    let pair = MatrixPair::random_hermitian(4, 5).unwrap();
    let slope = identity_sweep(Identity::Group, &pair, &dyadic_eps(4), None).unwrap().slope().unwrap();
    assert!((2.8..=3.2).contains(&slope));
}

#[test]
fn overlap_values() {
    let norm = (2.0 * PI * 0.7f64).powf(-0.5);
    assert!((momentum_state_overlap(0.0, 3.0, 0.7) - norm).norm() < 1e-15);
    assert!((momentum_state_overlap(2.0, 0.0, 0.7) - norm).norm() < 1e-15);
    let z = momentum_state_overlap(1.0, 1.0, 1.0);
    assert!((z.arg() + 1.0).abs() < 1e-15);
}

#[test]
fn discrete_completeness_on_256_points() {
    let g = GridSpec::uniform_box(1, 8, -10.0, 10.0, 1.0).unwrap();
    assert!(discrete_completeness_defect(&g) <= 1e-10);
}

proptest! {
    #[test]
    fn overlap_is_pure_phase(x in -100.0f64..100.0, p in -100.0f64..100.0, hbar in 0.01f64..10.0) {
        let z = momentum_state_overlap(x, p, hbar);
        prop_assert!((z.norm() - (2.0 * PI * hbar).powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_pairs_respect_norm_cap(seed in any::<u64>(), n in 1usize..9) {
        let pair = MatrixPair::random_hermitian(n, seed).unwrap();
        prop_assert!(quanputer_core::linalg::spectral_norm(&pair.a) <= MAX_PAIR_NORM + 1e-9);
        prop_assert!(quanputer_core::linalg::hermiticity_defect(&pair.b) == 0.0);
    }
}
