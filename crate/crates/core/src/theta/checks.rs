//! The residual table produced for a fixture.

use super::kernel::{c_linear_form, green_h_eval, pole_limit, q0_decompose, relation_coefficients, single_valuedness_check, KernelPoint, LatticeShift, StructureKind};
use super::{add, neg_vec, scale, sub, unit, Fixture, C64};
use crate::error::{QcError, QcResult};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    /// pass iff residual < tolerance
    Below,
    /// pass iff residual > tolerance (a deviation that must be detected)
    Above,
    /// pass iff residual is exactly 0
    Zero,
}

#[derive(Clone, Debug)]
pub struct CheckRow {
    pub check: String,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub expect: Expect,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &str, name: &str, residual: f64, tolerance: f64, expect: Expect) -> Self {
        let pass = residual.is_finite()
            && match expect {
                Expect::Below => residual < tolerance,
                Expect::Above => residual > tolerance,
                Expect::Zero => residual == 0.0,
            };
        CheckRow { check: check.into(), name: name.into(), residual, tolerance, expect, pass }
    }

    pub fn csv(&self) -> String {
        format!("{},{},{:.3e},{:.1e},{}", self.check, self.name, self.residual, self.tolerance, self.pass)
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

const EPS: f64 = 1e-15;

pub fn run_fixture_checks(fx: &Fixture) -> QcResult<Vec<CheckRow>> {
    let data = fx.data(EPS)?;
    let g = data.g;
    let z = fx.point("z")?.clone();
    let w = fx.point("w")?.clone();
    let p = fx.point("P")?.clone();
    let point = KernelPoint { e: fx.e.clone(), h: fx.h.clone(), s: fx.s.clone() };
    let f = &fx.name;
    let mut rows = Vec::new();
    let mut push = |r: CheckRow| rows.push(r);

    for o in &fx.oracles {
        let v = data.eval(&o.at)?.value();
        let r = if o.value.norm() < 1e-12 { v.norm() } else { rel(v, o.value) };
        push(CheckRow::new("theta_oracle", &format!("{f}:{}", o.name), r, 1e-12, Expect::Below));
    }
    let at_e = data.eval(&fx.e)?;
    if let Some(grad) = &fx.gradient {
        let s = at_e.log_scale.exp();
        let r = grad.iter().zip(&at_e.grad).map(|(o, v)| (v * s - o).norm()).fold(0.0, f64::max)
            / grad.iter().map(|x| x.norm()).fold(1e-300, f64::max);
        push(CheckRow::new("gradient_oracle", f, r, 1e-11, Expect::Below));
    }
    if data.parity() == -1 {
        push(CheckRow::new("oddness", f, at_e.value().norm(), 1e-12, Expect::Below));
    }
    let tz = data.eval(&z)?;
    let tmz = data.eval(&neg_vec(&z))?;
    push(CheckRow::new("parity", f, rel(tmz.value(), tz.value() * data.parity() as f64), 1e-10, Expect::Below));

    let r = data.radius()?;
    let wide = data.eval_with_radius(&z, 2.0 * r)?;
    let diff = (wide.value() - tz.value()).norm();
    push(CheckRow::new("error_estimate", f, diff, tz.error_abs().max(f64::MIN_POSITIVE), Expect::Below));

    let i_pi = C64::new(0.0, PI);
    let mut int_res: f64 = 0.0;
    let mut quasi_res: f64 = 0.0;
    for i in 0..g {
        let shifted = data.eval(&add(&z, &unit(g, i)))?;
        let phase = (2.0 * i_pi * data.alpha[i]).exp();
        int_res = int_res.max(rel(shifted.value(), tz.value() * phase));
        let shifted = data.eval(&add(&z, &data.period(i)))?;
        let mult = (-i_pi * data.omega[i][i] - 2.0 * i_pi * (z[i] + data.beta[i])).exp();
        quasi_res = quasi_res.max(rel(shifted.ratio(&tz), mult));
    }
    push(CheckRow::new("integer_period", f, int_res, 1e-10, Expect::Below));
    push(CheckRow::new("quasi_periodicity", f, quasi_res, 1e-10, Expect::Below));

    let u = sub(&z, &w);
    let gu = green_h_eval(&u, &data, &point)?;
    let gmu = green_h_eval(&neg_vec(&u), &data, &point)?;
    push(CheckRow::new("green_antisymmetry", f, (gu + gmu).norm() / gu.norm().max(1.0), 1e-10, Expect::Below));
    let mut shift_res: f64 = 0.0;
    for i in 0..g {
        let gs = green_h_eval(&add(&u, &data.period(i)), &data, &point)?;
        shift_res = shift_res.max((gs - gu + 2.0 * i_pi * fx.h[i]).norm());
    }
    push(CheckRow::new("green_period_shift", f, shift_res, 1e-9, Expect::Below));

    let v = fx.directions.get("V").ok_or_else(|| QcError::Parse("fixture needs direction V".into()))?;
    let pl = pole_limit(&data, &point, v, 1e-2)?;
    push(CheckRow::new("pole_limit", f, pl.residual, 1e-6, Expect::Below));

    let zero = vec![C64::new(0.0, 0.0); g];
    let h2: Vec<C64> = (0..g).map(|i| C64::new(0.3 * i as f64 - 0.2, 0.1)).collect();
    let cl = c_linear_form(&data, &fx.e, &[zero.clone(), fx.h.clone(), h2.clone(), add(&fx.h, &h2)], 1e-10)?;
    push(CheckRow::new("c_form_zero", f, cl.values[0].norm(), 0.0, Expect::Zero));
    let lin = (cl.values[3] - cl.values[1] - cl.values[2]).norm() / cl.values[1].norm().max(1.0);
    push(CheckRow::new("c_form_linearity", f, lin, 1e-11, Expect::Below));
    if let Some(t) = fx.directions.get("T") {
        let ct = c_linear_form(&data, &fx.e, std::slice::from_ref(t), 1e-10)?;
        let gn = ct.gradient.iter().map(|x| x.norm()).fold(0.0, f64::max);
        push(CheckRow::new("c_form_tangent_kernel", f, ct.values[0].norm() / gn.max(1e-300), 1e-10, Expect::Below));
    }

    let dec = q0_decompose(&z, &w, &p, &data, &point)?;
    push(CheckRow::new("decomposition_monodromy_a", f, dec.monodromy_a, 1e-8, Expect::Below));
    push(CheckRow::new("decomposition_monodromy_b", f, dec.monodromy_b, 1e-8, Expect::Below));
    push(CheckRow::new("decomposition_diagonal_bound", f, dec.boundedness, 1e-3, Expect::Below));
    let mut raw_dev: f64 = 0.0;
    let mut raw_law: f64 = 0.0;
    for (i, r) in dec.raw_monodromy.iter().enumerate() {
        raw_dev = raw_dev.max((r - 1.0).norm());
        raw_law = raw_law.max(rel(*r, (2.0 * i_pi * fx.s[i]).exp()));
    }
    push(CheckRow::new("raw_q0plus_monodromy_detected", f, raw_dev, 1e-6, Expect::Above));
    push(CheckRow::new("raw_q0plus_monodromy_law", f, raw_law, 1e-9, Expect::Below));
    let flat = KernelPoint { s: zero.clone(), ..point.clone() };
    let dec0 = q0_decompose(&z, &w, &p, &data, &flat)?;
    push(CheckRow::new("decomposition_zero_shift", f, (dec0.a - 1.0).norm(), 1e-10, Expect::Below));

    for (kind, label) in [(StructureKind::Q, "q"), (StructureKind::QPlus, "q_plus"), (StructureKind::QMinus, "q_minus")] {
        let r = single_valuedness_check(kind, &z, &w, &p, &data, &point, LatticeShift::Integer)?;
        push(CheckRow::new("single_valued_integer", &format!("{f}:{label}"), r, 1e-10, Expect::Below));
    }
    let r = single_valuedness_check(StructureKind::Q, &z, &w, &p, &data, &point, LatticeShift::Period)?;
    push(CheckRow::new("single_valued_period", &format!("{f}:q"), r, 1e-8, Expect::Below));
    let r = single_valuedness_check(StructureKind::RawQ0, &z, &w, &p, &data, &point, LatticeShift::Period)?;
    push(CheckRow::new("raw_q0_period_detected", f, r, 1e-6, Expect::Above));

    // every exchange coefficient tends to 1 linearly in s
    let coeffs_at = |t: f64| {
        let pt = KernelPoint { s: scale(&fx.s, C64::new(t, 0.0)), ..point.clone() };
        relation_coefficients(&z, &w, &data, &pt)
    };
    let full = coeffs_at(1.0)?;
    let small = coeffs_at(1e-3)?;
    for ((name, c1), (_, c3)) in full.iter().zip(&small) {
        let r = (c3 - 1.0).norm() / (c1 - 1.0).norm().max(1e-300);
        push(CheckRow::new("hbar_degeneration", &format!("{f}:{name}"), r, 2e-3, Expect::Below));
    }
    Ok(rows)
}
