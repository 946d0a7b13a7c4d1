use num_rational::BigRational;
use num_traits::{One, Zero};
use qcurrent::hseries::region_expand_reciprocal;
use qcurrent::level0::basis_duality;
use qcurrent::rational::{
    build_green, compute_q_closed, compute_tau, compute_u, gamma_closed, gamma_kernel, gamma_relations,
    generating_identity, min_basis_size, scaling_covariance, simply_laced_series, verify_vanishing_locus,
    DualBasisWindow, KernelBundle, FRAME,
};
use qcurrent::scalar::{rat, rat_int};
use qcurrent::{GaussRat, QcError, RegionSeries, Scalar, Series};
use std::path::PathBuf;

fn g(v: i64) -> GaussRat {
    GaussRat::from_i64(v)
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn dual_basis_exponents() {
    let b3 = DualBasisWindow::new(3, 4).unwrap();
    assert_eq!((b3.a, b3.b), (1, 1));
    assert_eq!(b3.upper_exp(0), -2);
    assert_eq!(b3.lower_exp(0), -1);
    let b4 = DualBasisWindow::new(4, 4).unwrap();
    assert_eq!((b4.a, b4.b), (1, 2));
    let b5 = DualBasisWindow::new(5, 4).unwrap();
    assert_eq!((b5.a, b5.b), (2, 2));
    assert!(matches!(DualBasisWindow::new(1, 4), Err(QcError::Domain(_))));
}

#[test]
fn residue_duality_is_identity() {
    for n in [2, 3, 4, 5] {
        let d = basis_duality(n, 40).unwrap();
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(*x, want, "N={n} ({i},{j})");
            }
        }
    }
}

#[test]
fn green_kernel_coefficients() {
    // G = z^{-1}w^{-1}/(z-w) = Σ_{i≥0} z^{-2-i} w^{i-1}
    let gk = build_green(3, 40, 2, 12).unwrap();
    for i in 0..=13i64 {
        assert_eq!(gk.g.coeff(0, &[-2 - i, i - 1]), g(1));
        assert!(gk.g.certifies(0, &[-2 - i, i - 1]));
    }
    assert!(!gk.g.certifies(0, &[-16, 13]));
    assert_eq!(gk.g.len(), 14);
    assert_eq!(gk.g.coeff(1, &[-3, 0]), g(0));
}

#[test]
fn green_kernel_matches_geometric_expansion() {
    for n in [2, 3, 4, 5, 6] {
        let b = DualBasisWindow::new(n, 0).unwrap();
        let gk = build_green(n, min_basis_size(n, 10), 2, 10).unwrap();
        let e = region_expand_reciprocal(&FRAME, 2, n, &[-b.a, -b.b], g(1), g(1), "z", g(-1), "w", 10).unwrap();
        assert_eq!(gk.g, e, "N={n}");
    }
}

#[test]
fn too_few_basis_elements() {
    assert!(matches!(build_green(3, 5, 1, 12), Err(QcError::WindowUnderflow(_))));
    assert!(matches!(build_green(3, 40, 1, -5), Err(QcError::WindowUnderflow(_))));
    assert_eq!(min_basis_size(3, 12), 14);
    assert!(build_green(3, 14, 1, 12).is_ok());
}

#[test]
fn gamma_for_n3() {
    let gamma = gamma_kernel(3, 2, 12).unwrap();
    assert!(gamma.is_exact());
    assert_eq!(gamma.len(), 1);
    assert_eq!(gamma.coeff(0, &[-4, -2]), g(1));
    let closed = gamma_closed(&DualBasisWindow::new(3, 0).unwrap(), 2).unwrap();
    assert_eq!(closed, gamma);
}

#[test]
fn gamma_lies_in_r_tensor_r() {
    for n in [3, 5, 7] {
        let b = DualBasisWindow::new(n, 0).unwrap();
        let gamma = gamma_kernel(n, 1, 12).unwrap();
        assert!(!gamma.is_zero());
        for (_, e) in gamma.terms().keys() {
            assert!(e[0] <= b.r_bound() && e[1] <= b.r_bound(), "N={n} {e:?}");
        }
        assert_eq!(gamma_closed(&b, 1).unwrap(), gamma, "N={n}");
    }
}

#[test]
fn gamma_relations_hold() {
    for n in [3, 5] {
        let gk = build_green(n, 40, 1, 12).unwrap();
        let gamma = gamma_kernel(n, 1, 12).unwrap();
        let (r1, r2) = gamma_relations(&gk, &gamma).unwrap();
        assert!(r1.is_zero(), "N={n}");
        assert!(r2.is_zero(), "N={n}");
    }
}

#[test]
fn even_n_gamma_leaves_r() {
    assert!(matches!(gamma_kernel(4, 1, 12), Err(QcError::IdentityViolation(_))));
}

#[test]
fn generating_identity_n3() {
    let r = generating_identity(3, 6, 12).unwrap();
    assert!(r.is_zero());
    assert_eq!(r.order(), 6);
}

#[test]
fn generating_identity_n5() {
    assert!(generating_identity(5, 4, 10).unwrap().is_zero());
}

#[test]
fn tau_is_symmetric_and_solves_its_equation() {
    let t = compute_tau(3, 5, 12).unwrap();
    assert!(t.residual.is_zero());
    assert!(!t.tau.is_zero());
    assert!(t.tau.hbar_coefficient(0).is_zero());
    assert_eq!(t.tau.swap_legs().unwrap(), t.tau);
    assert!(t.window >= 12);
}

#[test]
fn u_operator_n3() {
    let u = compute_u(3, 40, 5, 12).unwrap();
    assert!(u.residual.is_zero());
    assert!(u.u_minus_residual.is_zero());
    let b = DualBasisWindow::new(3, 0).unwrap();
    assert!(u.d_hbar.hbar_coefficient(0).is_zero());
    for (_, e) in u.d_hbar.terms().keys() {
        assert!(e[0] <= b.r_bound() && e[1] <= b.r_bound());
    }
    // U = O(ħ)
    for row in u.matrix.slice(0) {
        assert!(row.iter().all(|x| x.is_zero()));
    }
    assert!(!u.matrix.is_zero());
    assert_eq!(u.columns.len(), 40);
}

#[test]
fn u_needs_enough_basis_elements() {
    assert!(compute_u(3, 2, 5, 12).is_err());
}

fn q_hbar1_oracle_n3(window: i64) -> RegionSeries {
    // (z^{-2}+w^{-2})/(z-w) - z^{-1}w^{-2} + z^{-2}w^{-1}
    let e1 = region_expand_reciprocal(&FRAME, 1, 3, &[-2, 0], g(1), g(1), "z", g(-1), "w", window).unwrap();
    let e2 = region_expand_reciprocal(&FRAME, 1, 3, &[0, -2], g(1), g(1), "z", g(-1), "w", window).unwrap();
    e1.add(&e2)
        .unwrap()
        .add(&Series::monomial(&FRAME, 1, 3, 0, &[-1, -2], g(-1)))
        .unwrap()
        .add(&Series::monomial(&FRAME, 1, 3, 0, &[-2, -1], g(1)))
        .unwrap()
}

#[test]
fn q_leading_terms() {
    let q = compute_q_closed(3, 3, 12, &BigRational::one()).unwrap().q;
    let q0 = q.hbar_coefficient(0);
    assert_eq!(q0.len(), 1);
    assert_eq!(q0.coeff(0, &[0, 0]), g(1));
    let q1 = q.hbar_coefficient(1);
    let want = q_hbar1_oracle_n3(9);
    assert!(q1.agrees_with(&want).unwrap());
    assert!(q1.certifies(0, &[-11, 9]));
    assert_eq!(q1.coeff(0, &[-3, 0]), g(2));
    assert_eq!(q1.coeff(0, &[-1, -2]), g(0));
    assert_eq!(q1.coeff(0, &[-2, -1]), g(2));
}

#[test]
fn q_hbar1_golden_n3() {
    let q = compute_q_closed(3, 2, 13, &BigRational::one()).unwrap().q;
    let q1 = q.hbar_coefficient(1);
    assert_eq!(q1.hi(), &[10]);
    assert!(q1.agrees_with(&q_hbar1_oracle_n3(10)).unwrap());
    let text = q1.to_text();
    let path = golden("q_hbar1_N3_W10.txt");
    if std::env::var_os("QCV_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    let stored = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stored);
    assert_eq!(RegionSeries::from_text(&stored).unwrap(), q1);
}

#[test]
fn zero_shift_gives_trivial_q() {
    let q = compute_q_closed(3, 2, 12, &BigRational::zero()).unwrap().q;
    assert_eq!(q.restrict(&[12]).unwrap(), Series::one(&FRAME, 2, 3).restrict(&[12]).unwrap());
}

#[test]
fn vanishing_loci() {
    for n in [2, 3, 5] {
        let r = verify_vanishing_locus(n, 6, 12).unwrap();
        assert!(r.q_locus.is_zero(), "N={n}");
        assert!(r.q_inverse_locus.is_zero(), "N={n}");
        if n % 2 == 1 {
            assert!(r.simply_laced.as_ref().unwrap().is_zero(), "N={n}");
            assert!(r.simply_laced_inverse.as_ref().unwrap().is_zero(), "N={n}");
            assert!(!r.control.as_ref().unwrap().is_zero(), "N={n}");
        } else {
            assert!(r.simply_laced.is_none());
        }
    }
}

#[test]
fn simply_laced_leading_term() {
    let (p, psi) = simply_laced_series(3, 4).unwrap();
    assert!(p.is_exact());
    // ψ = -ħ - ħ³γ₁/3 + O(ħ⁴), and γ = z^{-4}w^{-2}
    assert_eq!(psi.coeff(1, &[]), rat_int(-1));
    assert_eq!(psi.coeff(3, &[1]), rat(-1, 3));
    assert_eq!(psi.terms().len(), 2);
    assert_eq!(p.len(), 4);
    assert_eq!(p.coeff(0, &[1, 0]), g(1));
    assert_eq!(p.coeff(0, &[0, 1]), g(-1));
    assert_eq!(p.coeff(1, &[-1, -1]), g(1));
    assert_eq!(p.coeff(3, &[-5, -3]), GaussRat::from_rat(rat(-1, 3)));
}

#[test]
fn scaling_law() {
    for a in [rat(1, 1), rat(2, 1), rat(-1, 1), rat(1, 2), rat(-3, 2)] {
        assert!(scaling_covariance(3, &a, 4, 10).unwrap().is_zero(), "alpha={a}");
    }
    assert!(scaling_covariance(5, &rat(2, 1), 3, 10).unwrap().is_zero());
    assert!(matches!(scaling_covariance(3, &rat(0, 1), 4, 10), Err(QcError::Domain(_))));
}

#[test]
fn scaling_breaks_with_wrong_power() {
    // q_{αħ}(αz, αw) differs from q_ħ for α ≠ ±1 when N = 3
    let base = compute_q_closed(3, 3, 10, &BigRational::one()).unwrap().q;
    let wrong = compute_q_closed(3, 3, 10, &rat(2, 1)).unwrap().q;
    let two = GaussRat::from_i64(2);
    let wrong = wrong.scale_var("z", &two).unwrap().scale_var("w", &two).unwrap();
    assert!(!wrong.sub(&base).unwrap().is_zero());
}

#[test]
fn kernel_bundle_text() {
    let b = KernelBundle::build(3, 3, 20, 8).unwrap();
    let t = b.to_text();
    assert_eq!(t.lines().next().unwrap(), "N=3 K=3 M=20 window=8");
    for h in ["# G", "# gamma", "# tau", "# q"] {
        assert!(t.lines().any(|l| l == h), "{h}");
    }
    assert_eq!(b.u.rows, 20);
}
