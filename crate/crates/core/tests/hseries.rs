use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use qcurrent::hseries::{nth_root_shift, region_expand_reciprocal, solve_phi_psi, GammaPolySeries, INF};
use qcurrent::rational::{build_green, gamma_kernel};
use qcurrent::scalar::{rat, Cyclotomic};
use qcurrent::{GaussRat, QcError, RegionSeries, Scalar};
use std::collections::BTreeMap;

type S = RegionSeries;

const ZW: [&str; 2] = ["z", "w"];

fn g(v: i64) -> GaussRat {
    GaussRat::from_i64(v)
}

fn gq(n: i64, d: i64) -> GaussRat {
    GaussRat::from_rat(rat(n, d))
}

fn one_plus_hbar(order: u32, sign: i64) -> S {
    S::one(&["z"], order, 0).add(&S::monomial(&["z"], order, 0, 1, &[0], g(sign))).unwrap()
}

#[test]
fn product_of_one_plus_and_minus_hbar() {
    let p = one_plus_hbar(3, 1).mul(&one_plus_hbar(3, -1)).unwrap();
    let want = S::one(&["z"], 3, 0).sub(&S::monomial(&["z"], 3, 0, 2, &[0], g(1))).unwrap();
    assert_eq!(p, want);
}

#[test]
fn adding_zero_intersects_windows() {
    let a = build_green(3, 40, 2, 12).unwrap().g;
    let zero = S::zero(&ZW, 2, 3).restrict(&[7]).unwrap();
    let s = a.add(&zero).unwrap();
    assert_eq!(s.hi(), &[7]);
    assert!(s.agrees_with(&a).unwrap());
    assert_eq!(s, a.restrict(&[7]).unwrap());
}

#[test]
fn green_square_matches_convolution() {
    let gk = build_green(3, 40, 1, 12).unwrap();
    let a = &gk.g;
    let sq = a.mul(a).unwrap();
    // window rule for products
    assert_eq!(sq.hi(), &[a.hi()[0] + a.lo()[0]]);
    let mut conv: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for (_, e1) in a.terms().keys() {
        for (_, e2) in a.terms().keys() {
            *conv.entry(vec![e1[0] + e2[0], e1[1] + e2[1]]).or_default() += 1;
        }
    }
    let mut checked = 0;
    for (e, c) in &conv {
        if sq.certifies(0, e) {
            assert_eq!(sq.coeff(0, e), g(*c), "at {e:?}");
            checked += 1;
        }
    }
    assert!(checked > 10);
    assert!(sq.coeff(0, &[-3, -1]).is_zero());
    assert_eq!(sq.coeff(0, &[-4, -2]), g(1));
    // nothing certified is missing from the oracle
    for (_, e) in sq.terms().keys() {
        assert!(conv.contains_key(e));
    }
}

#[test]
fn mismatched_frames_are_structural_errors() {
    let a = S::one(&["z", "w"], 2, 3);
    let b = S::one(&["w", "z"], 2, 3);
    assert!(matches!(a.add(&b), Err(QcError::Structural(_))));
    assert!(matches!(a.mul(&b), Err(QcError::Structural(_))));
    let c = S::one(&["z", "w"], 2, 2);
    assert!(matches!(a.add(&c), Err(QcError::Structural(_))));
}

#[test]
fn truncation_to_smaller_order() {
    let a = one_plus_hbar(5, 1).pow(4).unwrap();
    let b = one_plus_hbar(2, 1);
    let s = a.add(&b).unwrap();
    assert_eq!(s.order(), 2);
    assert_eq!(s.coeff(1, &[0]), g(5));
}

#[test]
fn invert_geometric_series() {
    let inv = one_plus_hbar(3, 1).invert_unit().unwrap();
    assert_eq!(inv.coeff(0, &[0]), g(1));
    assert_eq!(inv.coeff(1, &[0]), g(-1));
    assert_eq!(inv.coeff(2, &[0]), g(1));
    assert_eq!(inv.len(), 3);
}

#[test]
fn invert_constant() {
    let half = S::constant(&["z"], 3, 0, g(2)).invert_unit().unwrap();
    assert_eq!(half, S::constant(&["z"], 3, 0, gq(1, 2)));
    let i = S::constant(&["z"], 1, 0, GaussRat::i()).invert_unit().unwrap();
    assert_eq!(i.coeff(0, &[0]), GaussRat::i().neg());
}

#[test]
fn invert_one_plus_green_psi() {
    // ψ = −ħ + O(ħ³), so 1 + Gψ₁ħ = 1 − ħG
    let gk = build_green(3, 40, 4, 12).unwrap();
    let a = S::one(&ZW, 4, 3).sub(&gk.g.hbar_shift(1)).unwrap();
    let inv = a.invert_unit().unwrap();
    let one = S::one(&ZW, 4, 3);
    assert!(a.mul(&inv).unwrap().agrees_with(&one).unwrap());
    // term-by-term oracle: Σ ħ^k G^k
    let mut p = one.clone();
    for k in 0..4u32 {
        let slice = inv.hbar_coefficient(k);
        let want = p.hbar_coefficient(0).reweight(slice.weight());
        assert!(slice.agrees_with(&want).unwrap(), "hbar^{k}");
        p = p.mul(&gk.g).unwrap();
    }
}

#[test]
fn invert_z_minus_w() {
    let zw = S::var(&ZW, 2, 3, "z").unwrap().sub(&S::var(&ZW, 2, 3, "w").unwrap()).unwrap();
    let inv = zw.restrict(&[10]).unwrap().invert_unit().unwrap();
    for k in 0..=8 {
        assert_eq!(inv.coeff(0, &[-k - 1, k]), g(1));
    }
    let one = zw.restrict(&[10]).unwrap().mul(&inv).unwrap();
    assert_eq!(one.len(), 1);
}

#[test]
fn non_units_are_rejected() {
    let hb = S::monomial(&["z"], 3, 0, 1, &[0], g(1));
    assert!(matches!(hb.invert_unit(), Err(QcError::NotInvertible(_))));
    let zero = S::zero(&["z"], 3, 0);
    assert!(matches!(zero.invert_unit(), Err(QcError::NotInvertible(_))));
}

#[test]
fn exp_of_zero_is_one() {
    let z = S::zero(&["z"], 4, 0);
    assert_eq!(z.exp().unwrap(), S::one(&["z"], 4, 0));
}

#[test]
fn log_of_one_plus_hbar() {
    let l = one_plus_hbar(4, 1).log().unwrap();
    assert_eq!(l.coeff(1, &[0]), g(1));
    assert_eq!(l.coeff(2, &[0]), gq(-1, 2));
    assert_eq!(l.coeff(3, &[0]), gq(1, 3));
    assert_eq!(l.len(), 3);
}

#[test]
fn exp_log_round_trip_with_green() {
    let gk = build_green(3, 40, 5, 12).unwrap();
    let a = S::one(&ZW, 5, 3).add(&gk.g.hbar_shift(1)).unwrap();
    let back = a.log().unwrap().exp().unwrap();
    assert!(back.agrees_with(&a).unwrap());
    assert!(!back.is_empty());
}

#[test]
fn transcendental_domain_errors() {
    let one = S::one(&["z"], 3, 0);
    assert!(matches!(one.exp(), Err(QcError::Domain(_))));
    let two = S::constant(&["z"], 3, 0, g(2));
    assert!(matches!(two.log(), Err(QcError::Domain(_))));
}

#[test]
fn reciprocal_of_z_minus_w() {
    let s = region_expand_reciprocal(&ZW, 1, 1, &[0, 0], g(1), g(1), "z", g(-1), "w", 9).unwrap();
    assert_eq!(s.len(), 10);
    for k in 0..10 {
        assert_eq!(s.coeff(0, &[-k - 1, k]), g(1));
    }
}

#[test]
fn reciprocal_with_monomial_numerator() {
    // (zw)^{-1}/(z − w) = Σ z^{−2−i} w^{i−1}
    let s = region_expand_reciprocal(&ZW, 1, 3, &[-1, -1], g(1), g(1), "z", g(-1), "w", 12).unwrap();
    for i in 0..=13 {
        assert_eq!(s.coeff(0, &[-2 - i, i - 1]), g(1), "i={i}");
    }
    assert_eq!(s.len(), 14);
}

#[test]
fn reciprocal_at_root_of_unity() {
    // 1/(−z − w) = −Σ (−1)^k z^{−k−1} w^k
    let s = region_expand_reciprocal(&ZW, 1, 1, &[0, 0], g(1), g(-1), "z", g(-1), "w", 8).unwrap();
    for k in 0..=8 {
        let sign = if k % 2 == 0 { -1 } else { 1 };
        assert_eq!(s.coeff(0, &[-k - 1, k]), g(sign));
    }
    // the same with ζ = −1 in cyclotomic arithmetic
    let c = region_expand_reciprocal(
        &ZW,
        1,
        1,
        &[0, 0],
        Cyclotomic::one(),
        Cyclotomic::root_power(2, 1),
        "z",
        Cyclotomic::from_i64(-1),
        "w",
        8,
    )
    .unwrap();
    assert_eq!(c, s.map_coeffs(|x| Cyclotomic::from_rat(x.re.clone())));
}

#[test]
fn reciprocal_errors() {
    let r = region_expand_reciprocal(&ZW, 1, 1, &[0, 0], g(1), g(0), "z", g(-1), "w", 8);
    assert!(matches!(r, Err(QcError::DegenerateRoot(_))));
    let r = region_expand_reciprocal(&ZW, 1, 1, &[0, 0], g(1), g(1), "w", g(-1), "z", 8);
    assert!(matches!(r, Err(QcError::Structural(_))));
}

#[test]
fn cube_root_shift() {
    let s = nth_root_shift::<GaussRat>("z", 3, &BigRational::one(), 3).unwrap();
    let want = S::from_terms(
        &["z"],
        3,
        3,
        vec![],
        vec![],
        vec![((0, vec![1]), g(1)), ((1, vec![-2]), g(1)), ((2, vec![-5]), g(-1))],
    )
    .unwrap();
    assert_eq!(s.image, want);
    let cube = s.nth_power().unwrap();
    let z3 = S::monomial(&["z"], 3, 3, 0, &[3], g(1)).add(&S::monomial(&["z"], 3, 3, 1, &[0], g(3))).unwrap();
    assert_eq!(cube, z3);
}

#[test]
fn square_root_shift() {
    let s = nth_root_shift::<GaussRat>("z", 2, &BigRational::one(), 2).unwrap();
    assert_eq!(s.image.len(), 2);
    assert_eq!(s.image.coeff(0, &[1]), g(1));
    assert_eq!(s.image.coeff(1, &[-1]), g(1));
    let sq = s.nth_power().unwrap();
    assert_eq!(sq.coeff(0, &[2]), g(1));
    assert_eq!(sq.coeff(1, &[0]), g(2));
    assert_eq!(sq.len(), 2);
}

#[test]
fn zero_shift_is_identity() {
    let s = nth_root_shift::<GaussRat>("z", 5, &rat(0, 1), 4).unwrap();
    assert_eq!(s.image, S::var(&["z"], 4, 5, "z").unwrap());
}

#[test]
fn shift_composition_law() {
    for (n, l, m) in [(2, rat(1, 1), rat(1, 1)), (3, rat(1, 2), rat(-2, 3)), (5, rat(-1, 1), rat(1, 1))] {
        let a = nth_root_shift::<GaussRat>("z", n, &l, 5).unwrap();
        let both = nth_root_shift::<GaussRat>("z", n, &(&l + &m), 5).unwrap();
        assert_eq!(a.compose(&m).unwrap(), both.image, "N={n}");
    }
}

#[test]
fn root_shift_rejects_bad_input() {
    assert!(nth_root_shift::<GaussRat>("z", 0, &rat(1, 1), 3).is_err());
    assert!(nth_root_shift::<GaussRat>("z", 3, &rat(1, 1), 0).is_err());
}

#[test]
fn derivation_on_monomials() {
    let z = S::var(&["z"], 2, 3, "z").unwrap();
    assert_eq!(z.derive("z", 3).unwrap(), S::monomial(&["z"], 2, 3, 0, &[-2], g(1)));
    let z3 = z.pow(3).unwrap().derive("z", 3).unwrap();
    assert_eq!(z3, S::constant(&["z"], 2, 3, g(3)));
    assert!(matches!(z.derive("w", 3), Err(QcError::Structural(_))));
}

#[test]
fn derivation_of_green_gives_gamma() {
    // (∂⊗1)G = −G² + γ
    let gk = build_green(3, 40, 1, 12).unwrap();
    let gamma = gamma_kernel(3, 1, 12).unwrap();
    let lhs = gk.g.derive("z", 3).unwrap();
    let rhs = gamma.sub(&gk.g.mul(&gk.g).unwrap()).unwrap();
    assert!(lhs.agrees_with(&rhs).unwrap());
}

#[test]
fn text_form() {
    let s = S::from_terms(
        &ZW,
        2,
        3,
        vec![-1],
        vec![5],
        vec![((0, vec![-2, -1]), g(1)), ((1, vec![0, 2]), GaussRat::new(rat(1, 2), rat(-3, 4)))],
    )
    .unwrap();
    let t = s.to_text();
    assert_eq!(t.lines().next().unwrap(), "vars=z,w K=2 window=*,[-1,5] weight=3");
    assert_eq!(t.lines().nth(1).unwrap(), "0;-2,-1;1/1");
    assert_eq!(t.lines().nth(2).unwrap(), "1;0,2;1/2-3/4 i");
    assert_eq!(S::from_text(&t).unwrap(), s);
    assert!(S::from_text("").is_err());
    assert!(S::from_text("vars=z K=x window=*").is_err());
}

#[test]
fn exact_series_have_infinite_windows() {
    let s = S::var(&ZW, 2, 3, "w").unwrap();
    assert!(s.is_exact());
    assert_eq!(s.hi(), &[INF]);
}

#[test]
fn phi_psi_low_orders() {
    let (phi, psi) = solve_phi_psi(4);
    assert_eq!(psi.coeff(1, &[]), rat(-1, 1));
    assert_eq!(psi.coeff(2, &[]), rat(0, 1));
    assert_eq!(psi.coeff(3, &[1]), rat(-1, 3));
    assert_eq!(psi.hbar_slice(3).len(), 1);
    assert_eq!(phi.coeff(2, &[1]), rat(1, 2));
    assert_eq!(phi.hbar_slice(2).len(), 1);
    assert!(phi.hbar_slice(1).is_empty());
}

fn hbar_derivative(s: &GammaPolySeries) -> GammaPolySeries {
    let mut out = GammaPolySeries::zero(s.order() - 1);
    for ((k, d), c) in s.terms() {
        if *k > 0 {
            out = out.add(&GammaPolySeries::monomial(s.order() - 1, k - 1, d, c * rat(*k as i64, 1)));
        }
    }
    out
}

#[test]
fn phi_psi_solve_their_system() {
    let order = 8;
    let (phi, psi) = solve_phi_psi(order);
    let low = order - 1;
    let cut = |s: &GammaPolySeries| s.add(&GammaPolySeries::zero(low));
    let g0 = GammaPolySeries::monomial(low, 0, &[1], BigRational::one());
    let one = GammaPolySeries::monomial(low, 0, &[], BigRational::one());
    let m1 = rat(-1, 1);
    // ∂ψ/∂ħ − Dψ + 1 + γ₀ψ²
    let r_psi = hbar_derivative(&psi)
        .add(&cut(&psi.derivation()).scale(&m1))
        .add(&one)
        .add(&g0.mul(&cut(&psi)).mul(&cut(&psi)));
    assert!(r_psi.terms().is_empty(), "{:?}", r_psi.terms());
    // ∂φ/∂ħ − Dφ + γ₀ψ
    let r_phi = hbar_derivative(&phi).add(&cut(&phi.derivation()).scale(&m1)).add(&g0.mul(&cut(&psi)));
    assert!(r_phi.terms().is_empty());
    // the ħ^k coefficient involves γ₀ … γ_{k−2} only
    for ((k, d), _) in psi.terms().iter().chain(phi.terms()) {
        assert!((d.len() as u32) < (*k).max(1), "hbar^{k} uses {d:?}");
    }
}

fn small_series(order: u32) -> impl Strategy<Value = S> {
    prop::collection::vec((0..order, -3i64..=3, -3i64..=3, -4i64..=4, 1i64..=3), 0..6).prop_map(move |ts| {
        let terms = ts.into_iter().map(|(k, a, b, n, d)| ((k, vec![a, b]), GaussRat::from_rat(rat(n, d))));
        S::from_terms(&ZW, order, 3, vec![INF], vec![INF], terms).unwrap()
    })
}

fn small_poly(order: u32) -> impl Strategy<Value = S> {
    prop::collection::vec((0..order, -3i64..=3, -4i64..=4), 0..5).prop_map(move |ts| {
        let terms = ts.into_iter().map(|(k, a, n)| ((k, vec![a]), GaussRat::from_i64(n)));
        S::from_terms(&["z"], order, 2, vec![], vec![], terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in small_series(4), b in small_series(4), c in small_series(4)) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn ring_axioms_on_windowed_factor(a in small_series(3), b in small_series(3)) {
        let gk = build_green(3, 40, 3, 12).unwrap();
        let left = gk.g.mul(&a).unwrap().mul(&b).unwrap();
        let right = gk.g.mul(&a.mul(&b).unwrap()).unwrap();
        prop_assert!(left.agrees_with(&right).unwrap());
    }

    #[test]
    fn leibniz_rule(a in small_series(3), b in small_series(3), leg in prop::bool::ANY) {
        let v = if leg { "z" } else { "w" };
        let lhs = a.mul(&b).unwrap().derive(v, 3).unwrap();
        let rhs = a.derive(v, 3).unwrap().mul(&b).unwrap().add(&a.mul(&b.derive(v, 3).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_log_round_trips(a in small_series(4)) {
        let x = a.hbar_shift(1);
        prop_assert_eq!(x.exp().unwrap().log().unwrap(), x.clone());
        let u = S::one(&ZW, 4, 3).add(&x).unwrap();
        prop_assert_eq!(u.log().unwrap().exp().unwrap(), u);
    }

    #[test]
    fn inverse_round_trips(a in small_series(4), c in 1i64..5) {
        let u = S::constant(&ZW, 4, 3, GaussRat::from_i64(c)).add(&a.hbar_shift(1)).unwrap();
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(u.mul(&inv).unwrap(), S::one(&ZW, 4, 3));
    }

    #[test]
    fn root_shift_inverts(a in small_poly(4), n in 2i64..=4, ln in -3i64..=3, ld in 1i64..=3) {
        let a = a.reweight(n);
        let l = rat(ln, ld);
        let there = a.substitute_root_shift("z", n, &l).unwrap();
        let back = there.substitute_root_shift("z", n, &-l).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn text_round_trips(a in small_series(4), h in -2i64..10) {
        prop_assert_eq!(S::from_text(&a.to_text()).unwrap(), a.clone());
        let w = a.restrict(&[h]).unwrap();
        prop_assert_eq!(S::from_text(&w.to_text()).unwrap(), w);
    }
}
