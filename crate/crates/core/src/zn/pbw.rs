//! Flatness gates for scalar exchange rules: the symmetry condition
//! `a(z,w)a(w,z) = b(z,w)b(w,z)` and confluence on words of length three.

use super::fields::{difference, reduce_along, CSeries, Field, FieldProduct, RuleInstance, ScalarRule};
use crate::error::QcResult;
use crate::hseries::Series;
use crate::rational::{compute_q_closed, phi_truncated, DualBasisWindow, FRAME};
use crate::scalar::{Cyclotomic, GaussRat, Scalar};
use num_rational::BigRational;
use num_traits::One;

#[derive(Clone, Debug)]
pub struct PbwReport {
    pub passes: bool,
    /// `a·a^{21} − b·b^{21}`
    pub residual: CSeries,
}

pub fn pbw_symmetry_check(rule: &ScalarRule) -> QcResult<PbwReport> {
    let aa = rule.a.mul(&rule.a.swap_legs()?)?;
    let bb = rule.b.mul(&rule.b.swap_legs()?)?;
    let residual = aa.sub(&bb)?;
    Ok(PbwReport { passes: residual.is_zero(), residual })
}

fn to_cyc(s: &Series<GaussRat>) -> CSeries {
    s.map_coeffs(|c| Cyclotomic::from_rat(c.real().cloned().expect("rational coefficient")))
}

/// `a = (z₁ − w) e^{φ(w,z)}`, `b = (z − w₁) e^{φ(z,w)}`: the factors of the
/// closed structure function `q = a/b` of the curve with `ω = z^{N-1}dz`.
pub fn rational_case_rule(n_curve: i64, order: u32, window: i64) -> QcResult<ScalarRule> {
    let basis = DualBasisWindow::new(n_curve, 0)?;
    let one = BigRational::one();
    let qc = compute_q_closed(n_curve, order, window, &one)?;
    let a = qc.numerator.mul(&phi_truncated("w", "z", basis.a, n_curve, &one, order)?.exp()?)?;
    let b = qc.denominator.mul(&phi_truncated("z", "w", basis.b, n_curve, &one, order)?.exp()?)?;
    debug_assert_eq!(a.vars(), FRAME);
    ScalarRule::new(to_cyc(&a), to_cyc(&b), window)
}

/// `(a/b)(z,w) · (a/b)(w,z) − 1` expanded for `|w| < |z|`: swapping twice
/// must return the original coefficient.
pub fn round_trip(rule: &ScalarRule) -> QcResult<CSeries> {
    let inv = |s: &CSeries| s.restrict_all(rule.window)?.invert_unit();
    let there = rule.a.mul(&inv(&rule.b)?)?;
    let back = rule.a.swap_legs()?.mul(&inv(&rule.b.swap_legs()?)?)?;
    let one = Series::one(&rule.a.vars(), rule.a.order(), rule.a.weight());
    there.mul(&back)?.sub(&one)
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub via_121: Vec<FieldProduct>,
    pub via_212: Vec<FieldProduct>,
    pub difference: Vec<FieldProduct>,
}

impl ConfluenceReport {
    pub fn confluent(&self) -> bool {
        self.difference.is_empty()
    }
}

/// Reduces `x(v)x(w)x(z)` to `x(z)x(w)x(v)` along `s₁s₂s₁` reading the
/// relation as `x(u)x(v) = a(v,u)/b(v,u)·x(v)x(u)` and along `s₂s₁s₂`
/// reading it as `x(u)x(v) = b(u,v)/a(u,v)·x(v)x(u)`.
pub fn confluence_length3(rule: &ScalarRule) -> QcResult<ConfluenceReport> {
    let frame = ["z", "w", "v"];
    let coeff = Series::one(&frame, rule.a.order(), rule.a.weight());
    let x = Field::new("x", 0);
    let word = FieldProduct::new(vec![(x.clone(), "v"), (x.clone(), "w"), (x, "z")], coeff)?;
    let direct = rule.with_instance(RuleInstance::Direct);
    let reflected = rule.with_instance(RuleInstance::Reflected);
    let via_121 = reduce_along(&word, &[0, 1, 0], &direct)?;
    let via_212 = reduce_along(&word, &[1, 0, 1], &reflected)?;
    let difference = difference(&via_121, &via_212)?;
    Ok(ConfluenceReport { via_121, via_212, difference })
}
