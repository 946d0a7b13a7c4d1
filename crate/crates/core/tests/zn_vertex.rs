use proptest::prelude::*;
use qcurrent::hseries::Series;
use qcurrent::zn::{
    carry, carry_table, confluence_length3, emit_xy_relation, mu_projection, normal_order, pbw_symmetry_check,
    xy_residuals, rational_case_rule, residue, reverse_identity, round_trip, verify_plantes_equivalence, xy_text,
    CSeries, ComponentRule, Field, FieldProduct, ScalarRule, XYVariant,
};
use qcurrent::{Cyclotomic, QcError, Scalar};

const ZW: [&str; 2] = ["z", "w"];

fn c(v: i64) -> Cyclotomic {
    Cyclotomic::from_i64(v)
}

/// `z − w + s·ħ` as an exact series of weight 1.
fn z_minus_w(order: u32, s: i64) -> CSeries {
    let z = CSeries::var(&ZW, order, 1, "z").unwrap();
    let w = CSeries::var(&ZW, order, 1, "w").unwrap();
    z.sub(&w).unwrap().add(&CSeries::monomial(&ZW, order, 1, 1, &[0, 0], c(s))).unwrap()
}

#[test]
fn carry_examples() {
    assert_eq!(carry(3, 1, 1), 0);
    assert_eq!(carry(3, 2, 1), 1);
    assert_eq!(carry(3, -1, -1), 1);
    assert_eq!(carry(3, 0, -1), 0);
    assert_eq!(carry(1, 5, 7), 0);
    assert_eq!(carry_table(2), vec![vec![0, 0], vec![0, 1]]);
    assert_eq!(carry_table(3), vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
}

#[test]
fn carry_identity_small_n() {
    for n in 1..=8i64 {
        for a in -2 * n..=2 * n {
            for b in -2 * n..=2 * n {
                assert_eq!(residue(n, a) + residue(n, b), residue(n, a + b) + carry(n, a, b) * n);
            }
        }
    }
}

#[test]
fn projection_examples() {
    let m = mu_projection(3, 2, 10).unwrap();
    assert_eq!(m.rhs.coeff(0, &[-2, 1]), c(3));
    assert_eq!(m.rhs.coeff(0, &[-5, 4]), c(3));
    assert_eq!(m.rhs.coeff(0, &[-1, 0]), c(0));
    let m = mu_projection(2, 1, 6).unwrap();
    assert_eq!(m.lhs.coeff(0, &[-1, 0]), c(2));
    assert_eq!(m.lhs.coeff(0, &[-2, 1]), c(0));
    // N = 1 is the plain geometric series
    let m = mu_projection(1, 0, 5).unwrap();
    for j in 0..=5 {
        assert_eq!(m.lhs.coeff(0, &[-j - 1, j]), c(1));
    }
    assert!(mu_projection(0, 1, 5).is_err());
}

#[test]
fn projection_all_residues() {
    for n in 1..=6i64 {
        for p in 0..n {
            let m = mu_projection(n, p, 16).unwrap();
            // Σ_ζ ζ^p/(ζz − w) = Σ_j (Σ_ζ ζ^{p−1−j}) w^j z^{−j−1}
            for j in 0..=16 {
                let want = if residue(n, j - p + 1) == 0 { n } else { 0 };
                assert_eq!(m.lhs.coeff(0, &[-j - 1, j]), c(want), "N={n} p={p} j={j}");
                assert!(m.lhs.certifies(0, &[-j - 1, j]));
            }
            assert!(m.lhs.sub(&m.rhs).unwrap().is_zero());
        }
    }
}

#[test]
fn xy_relation_degenerates_for_n1() {
    let rel = emit_xy_relation(1, 0, 0, 3, XYVariant::ProofDerived).unwrap();
    assert_eq!(rel.lhs.len(), 1);
    assert_eq!(rel.rhs.len(), 1);
    let l = &rel.lhs[0].coeff;
    assert_eq!(l.len(), 3);
    assert_eq!(l.coeff(0, &[1, 0]), c(1));
    assert_eq!(l.coeff(0, &[0, 1]), c(-1));
    assert_eq!(l.coeff(1, &[0, 0]), c(1));
    assert_eq!(rel.rhs[0].coeff.coeff(1, &[0, 0]), c(-1));
    assert_eq!(rel.lhs[0].factors[0].1, "z");
    assert_eq!(rel.rhs[0].factors[0].1, "w");
}

#[test]
fn xy_relation_shape() {
    for variant in [XYVariant::Printed, XYVariant::ProofDerived] {
        let rel = emit_xy_relation(3, 1, 2, 3, variant).unwrap();
        assert_eq!(rel.lhs.len(), 3);
        assert_eq!(rel.rhs.len(), 3);
        for f in &rel.lhs {
            let (a, b) = (f.factors[0].0.comp, f.factors[1].0.comp);
            assert_eq!(residue(3, a + b), 2);
            assert!(f.is_ordered().unwrap());
        }
        for f in &rel.rhs {
            assert!(!f.is_ordered().unwrap());
        }
    }
    assert!(emit_xy_relation(0, 0, 0, 3, XYVariant::Printed).is_err());
}

#[test]
fn xy_text_format() {
    let rel = emit_xy_relation(3, 1, 2, 2, XYVariant::ProofDerived).unwrap();
    let t = xy_text(&rel);
    let lines: Vec<&str> = t.lines().collect();
    assert_eq!(lines[0], "RELATION N=3 p=1 q=2 variant=proof");
    assert_eq!(lines[1], "LHS");
    assert_eq!(lines[2], "COEFF c0 FIELD E(0) AT z FIELD E(2) AT w");
    assert_eq!(lines[5], "RHS");
    assert_eq!(lines[6], "COEFF c3 FIELD E(2) AT w FIELD E(0) AT z");
    assert_eq!(t.matches("SERIES c").count(), 6);
    assert_eq!(*lines.last().unwrap(), "END");
    let s0 = t.split("SERIES c0\n").nth(1).unwrap().split("SERIES c1").next().unwrap();
    assert_eq!(CSeries::from_text(s0).unwrap(), rel.lhs[0].coeff);
}

#[test]
fn xy_equivalence_small_n() {
    for n in 1..=3 {
        let rep = verify_plantes_equivalence(n, 4, 8).unwrap();
        assert_eq!(rep.entries.len(), (n * n) as usize);
        assert!(rep.entries.iter().all(|e| e.is_zero() && e.lhs_terms > 0));
        assert!(rep.reverse_residual.is_empty());
    }
}

#[test]
fn printed_component_relation_fails() {
    for n in 2..=3 {
        let entries = xy_residuals(n, 4, 8, XYVariant::Printed).unwrap();
        assert!(entries.iter().all(|e| !e.is_zero()), "N={n}");
    }
}

#[test]
fn reverse_identity_vanishes() {
    for n in 1..=3 {
        assert!(reverse_identity(n, 3).unwrap().is_empty());
    }
}

#[test]
fn component_coefficients_at_leading_order() {
    let rule = ComponentRule::new(3, 3, 8).unwrap();
    let c0 = rule.coefficient(0).hbar_coefficient(0);
    assert_eq!(c0.len(), 1);
    assert_eq!(c0.coeff(0, &[0, 0]), c(1));
    for d in 1..3 {
        assert!(rule.coefficient(d).hbar_coefficient(0).is_zero());
        assert!(!rule.coefficient(d).is_zero());
    }
}

fn word(order: u32, wt: i64) -> FieldProduct {
    let x = Field::new("x", 0);
    FieldProduct::new(vec![(x.clone(), "w"), (x, "z")], Series::one(&ZW, order, wt)).unwrap()
}

#[test]
fn trivial_rule_only_reorders() {
    let rule = ScalarRule::new(z_minus_w(3, 0), z_minus_w(3, 0), 8).unwrap();
    let out = normal_order(&[word(3, 1)], &rule).unwrap();
    assert_eq!(out.len(), 1);
    assert!(out[0].is_ordered().unwrap());
    assert_eq!(out[0].coeff, Series::one(&ZW, 3, 1).restrict(&[8]).unwrap());
}

#[test]
fn normal_order_is_idempotent() {
    let rule = rational_case_rule(3, 3, 8).unwrap();
    let once = normal_order(&[word(3, 3)], &rule).unwrap();
    let twice = normal_order(&once, &rule).unwrap();
    assert_eq!(once, twice);
    assert!(once.iter().all(|f| f.is_ordered().unwrap()));
}

#[test]
fn repeated_variable_is_rejected() {
    let x = Field::new("x", 0);
    let r = FieldProduct::new(vec![(x.clone(), "z"), (x, "z")], Series::one(&ZW, 2, 1));
    assert!(matches!(r, Err(QcError::Structural(_))));
}

#[test]
fn symmetric_rule_passes_gate() {
    let a = z_minus_w(3, 1);
    let rule = ScalarRule::new(a.clone(), a, 8).unwrap();
    let rep = pbw_symmetry_check(&rule).unwrap();
    assert!(rep.passes);
    assert!(rep.residual.is_zero());
}

#[test]
fn rational_rule_passes_gate() {
    let rule = rational_case_rule(3, 4, 10).unwrap();
    assert!(pbw_symmetry_check(&rule).unwrap().passes);
    assert!(round_trip(&rule).unwrap().is_zero());
    let conf = confluence_length3(&rule).unwrap();
    assert!(conf.confluent());
    assert!(!conf.via_121.is_empty());
}

#[test]
fn rational_rule_even_n_is_not_symmetric() {
    let rule = rational_case_rule(2, 4, 10).unwrap();
    assert!(!pbw_symmetry_check(&rule).unwrap().passes);
}

#[test]
fn adversarial_rule_residual() {
    let rule = ScalarRule::new(z_minus_w(3, 1), z_minus_w(3, 0), 8).unwrap();
    let rep = pbw_symmetry_check(&rule).unwrap();
    assert!(!rep.passes);
    // (z−w+ħ)(w−z+ħ) − (z−w)(w−z) = ħ²
    assert_eq!(rep.residual.len(), 1);
    assert_eq!(rep.residual.coeff(2, &[0, 0]), c(1));
    assert!(!confluence_length3(&rule).unwrap().confluent());
}

#[test]
fn rule_base_must_be_z_minus_w() {
    let z = CSeries::var(&ZW, 2, 1, "z").unwrap();
    let w = CSeries::var(&ZW, 2, 1, "w").unwrap();
    let bad = z.add(&w).unwrap();
    assert!(matches!(ScalarRule::new(bad, z_minus_w(2, 0), 8), Err(QcError::Structural(_))));
    let windowed = z_minus_w(2, 0).restrict(&[4]).unwrap();
    assert!(ScalarRule::new(windowed, z_minus_w(2, 0), 8).is_err());
    let three = CSeries::var(&["z", "w", "v"], 2, 1, "z").unwrap();
    assert!(ScalarRule::new(three, z_minus_w(2, 0), 8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn carry_is_symmetric_and_binary(n in 1i64..12, a in -50i64..50, b in -50i64..50) {
        let r = carry(n, a, b);
        prop_assert!(r == 0 || r == 1);
        prop_assert_eq!(r, carry(n, b, a));
        prop_assert_eq!(r, carry(n, a + n, b));
        prop_assert_eq!(residue(n, a) + residue(n, b), residue(n, a + b) + r * n);
    }

    #[test]
    fn symmetric_rules_pass(s in -3i64..=3, t in -3i64..=3) {
        // a = b passes for any a ≡ z − w mod ħ
        let a = z_minus_w(3, s)
            .add(&z_minus_w(3, 0).mul_monomial(2, &[0, 0], &c(t)))
            .unwrap();
        let rule = ScalarRule::new(a.clone(), a, 8).unwrap();
        prop_assert!(pbw_symmetry_check(&rule).unwrap().passes);
        prop_assert!(round_trip(&rule).unwrap().is_zero());
    }
}
