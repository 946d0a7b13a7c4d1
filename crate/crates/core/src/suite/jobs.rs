//! The checks each suite runs, as independent jobs.

use super::{Expectation, Record, SuiteConfig, SuiteName};
use crate::error::QcResult;
use crate::hseries::Series;
use crate::level0::{self, CoproductKind, LieElem, TwistStatus};
use crate::rational;
use crate::scalar::{Cyclotomic, GaussRat, Scalar};
use crate::theta::{self, Expect, Fixture};
use crate::zn::{self, XYVariant};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeSet;

type Body = Box<dyn Fn() -> QcResult<Vec<Record>> + Send + Sync>;

pub struct Job {
    pub module: &'static str,
    pub operation: &'static str,
    pub params: String,
    body: Body,
}

impl Job {
    fn new(module: &'static str, operation: &'static str, params: String, body: Body) -> Self {
        Job { module, operation, params, body }
    }

    /// Engine errors become a single failing record carrying the message.
    pub fn run(&self) -> Vec<Record> {
        match (self.body)() {
            Ok(r) => r,
            Err(e) => vec![Record::engine_error(self.module, self.operation, &self.params, &e)],
        }
    }
}

const G2: &str = include_str!("../../../../fixtures/g2.fx");
const G2_RANDOM: &str = include_str!("../../../../fixtures/g2_random.fx");

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn or_default<T: Clone>(v: &[T], d: &[T]) -> Vec<T> {
    if v.is_empty() {
        d.to_vec()
    } else {
        v.to_vec()
    }
}

pub fn jobs_for(config: &SuiteConfig) -> QcResult<Vec<Job>> {
    let mut jobs = Vec::new();
    let all = config.suite == SuiteName::All;
    if all || config.suite == SuiteName::Rational {
        rational_jobs(config, &mut jobs);
    }
    if all || config.suite == SuiteName::Zn {
        zn_jobs(config, &mut jobs);
    }
    if all || config.suite == SuiteName::Level0 {
        level0_jobs(config, &mut jobs);
    }
    if all || config.suite == SuiteName::Theta {
        theta_jobs(config, &mut jobs)?;
    }
    Ok(jobs)
}

fn rational_jobs(c: &SuiteConfig, jobs: &mut Vec<Job>) {
    const M: &str = "rational_kernel";
    let ns = or_default(&c.n, &[2, 3, 5]);
    let k = c.k.unwrap_or(6);
    let w = c.window.unwrap_or(12);
    let m = c.m.unwrap_or(40);
    for n in ns {
        let p = format!("N={n};K={k};window={w}");
        jobs.push(Job::new(
            M,
            "vanishing_locus",
            p.clone(),
            Box::new(move || {
                let r = rational::verify_vanishing_locus(n, k, w)?;
                let p = format!("N={n};K={k};window={w}");
                let mut out = vec![
                    Record::exact(M, "vanishing_locus", &p, r.q_locus.len()),
                    Record::exact(M, "vanishing_locus_inverse", &p, r.q_inverse_locus.len()),
                ];
                if let (Some(sl), Some(sli), Some(ctl)) = (&r.simply_laced, &r.simply_laced_inverse, &r.control) {
                    out.push(Record::exact(M, "simply_laced_locus", &p, sl.len()));
                    out.push(Record::exact(M, "simply_laced_locus_inverse", &p, sli.len()));
                    out.push(Record::new(M, "simply_laced_control_detected", &p, ctl.len() as f64, Expectation::ExactNonzero));
                }
                Ok(out)
            }),
        ));
        for (num, den) in [(2, 1), (-1, 1), (1, 2)] {
            let p = format!("N={n};K={k};window={w};alpha={num}/{den}");
            jobs.push(Job::new(
                M,
                "scaling_covariance",
                p.clone(),
                Box::new(move || {
                    let r = rational::scaling_covariance(n, &rat(num, den), k, w)?;
                    Ok(vec![Record::exact(M, "scaling_covariance", &p, r.len())])
                }),
            ));
        }
        // γ, τ and U need the isotropic splitting, which exists for odd N only
        let odd = n % 2 == 1;
        let p = format!("N={n};K={k};window={w}");
        let skip = |op: &'static str, p: &str| vec![Record::exact(M, op, p, 0).inconclusive()];
        jobs.push(Job::new(
            M,
            "generating_identity",
            p.clone(),
            Box::new({
                let p = p.clone();
                move || {
                    if !odd {
                        return Ok(skip("generating_identity", &p));
                    }
                    Ok(vec![Record::exact(M, "generating_identity", &p, rational::generating_identity(n, k, w)?.len())])
                }
            }),
        ));
        jobs.push(Job::new(
            M,
            "gamma_relations",
            p.clone(),
            Box::new({
                let p = p.clone();
                move || {
                    if !odd {
                        return Ok(skip("gamma_relations", &p));
                    }
                    let gk = rational::build_green(n, rational::min_basis_size(n, w), k, w)?;
                    let g = rational::gamma_kernel(n, k, w)?;
                    let (r1, r2) = rational::gamma_relations(&gk, &g)?;
                    Ok(vec![Record::exact(M, "gamma_relations", &p, r1.len() + r2.len())])
                }
            }),
        ));
        jobs.push(Job::new(
            M,
            "tau_symmetry",
            p.clone(),
            Box::new({
                let p = p.clone();
                move || {
                    if !odd {
                        return Ok(skip("tau_symmetry", &p));
                    }
                    Ok(vec![Record::exact(M, "tau_symmetry", &p, rational::compute_tau(n, k, w)?.residual.len())])
                }
            }),
        ));
        let pu = format!("N={n};K={k};M={m};window={w}");
        jobs.push(Job::new(
            M,
            "u_identity",
            pu.clone(),
            Box::new(move || {
                if !odd {
                    return Ok(vec![
                        Record::exact(M, "u_identity", &pu, 0).inconclusive(),
                        Record::exact(M, "u_minus_vanishes", &pu, 0).inconclusive(),
                    ]);
                }
                let u = rational::compute_u(n, m, k, w)?;
                Ok(vec![
                    Record::exact(M, "u_identity", &pu, u.residual.len()),
                    Record::exact(M, "u_minus_vanishes", &pu, u.u_minus_residual.len()),
                ])
            }),
        ));
    }
}

fn zn_jobs(c: &SuiteConfig, jobs: &mut Vec<Job>) {
    const M: &str = "zn_vertex";
    let ns = or_default(&c.n, &[1, 2, 3]);
    let k = c.k.unwrap_or(4);
    let w = c.window.unwrap_or(8);
    const MU_WINDOW: i64 = 16;
    let mu_ns: BTreeSet<i64> = (1..=6).chain(ns.iter().copied()).collect();
    for n in mu_ns {
        let p = format!("N={n};window={MU_WINDOW}");
        jobs.push(Job::new(
            M,
            "root_of_unity_projection",
            p.clone(),
            Box::new(move || {
                let mut bad = 0;
                for q in 0..n {
                    let r = zn::mu_projection(n, q, MU_WINDOW)?;
                    bad += r.lhs.sub(&r.rhs)?.len();
                }
                Ok(vec![Record::exact(M, "root_of_unity_projection", &p, bad)])
            }),
        ));
    }
    for &n in &ns {
        let p = format!("N={n};K={k};window={w}");
        jobs.push(Job::new(
            M,
            "xy_equivalence",
            p.clone(),
            Box::new(move || {
                let mut out = Vec::new();
                for e in zn::xy_residuals(n, k, w, XYVariant::ProofDerived)? {
                    let p = format!("N={n};K={k};window={w};p={};q={}", e.p, e.q);
                    out.push(Record::exact(M, "xy_equivalence", &p, e.residual.len()));
                }
                for e in zn::xy_residuals(n, k, w, XYVariant::Printed)? {
                    let p = format!("N={n};K={k};window={w};p={};q={}", e.p, e.q);
                    // the printed prefactors are known to leave a residual for N ≥ 2
                    let expect = if n == 1 { Expectation::ExactZero } else { Expectation::ExactNonzero };
                    out.push(Record::new(M, "xy_printed_form", &p, e.residual.len() as f64, expect));
                }
                let rev = zn::reverse_identity(n, k)?;
                out.push(Record::exact(M, "xy_reverse_identity", &format!("N={n};K={k}"), rev.len()));
                Ok(out)
            }),
        ));
        if n >= 2 {
            let pk = 6.max(k);
            let pw = 12.max(w);
            let p = format!("N={n};K={pk};window={pw}");
            jobs.push(Job::new(
                M,
                "pbw_rational_rule",
                p.clone(),
                Box::new(move || {
                    let rule = zn::rational_case_rule(n, pk, pw)?;
                    let sym = zn::pbw_symmetry_check(&rule)?;
                    if n % 2 == 0 {
                        // no Lagrangian splitting for even N, so q(z,w)q(w,z) ≠ 1
                        let r = sym.residual.len() as f64;
                        return Ok(vec![Record::new(M, "pbw_rational_rule_even_detected", &p, r, Expectation::ExactNonzero)]);
                    }
                    let conf = zn::confluence_length3(&rule)?;
                    Ok(vec![
                        Record::exact(M, "pbw_rational_rule", &p, sym.residual.len()),
                        Record::exact(M, "pbw_rational_round_trip", &p, zn::round_trip(&rule)?.len()),
                        Record::exact(M, "pbw_rational_confluence", &p, conf.difference.len()),
                    ])
                }),
            ));
        }
    }
    jobs.push(Job::new(
        M,
        "pbw_adversarial_rule",
        "K=4;window=8".into(),
        Box::new(|| {
            let p = "K=4;window=8";
            let v = ["z", "w"];
            let z = Series::<Cyclotomic>::var(&v, 4, 1, "z")?;
            let w = Series::var(&v, 4, 1, "w")?;
            let zw = z.sub(&w)?;
            let a = zw.add(&Series::monomial(&v, 4, 1, 1, &[0, 0], Cyclotomic::one()))?;
            let rule = zn::ScalarRule::new(a, zw, 8)?;
            let rep = zn::pbw_symmetry_check(&rule)?;
            // a·a^{21} − b·b^{21} = ħ²
            let hbar2 = Series::monomial(&v, 4, 1, 2, &[0, 0], Cyclotomic::one());
            let off = rep.residual.sub(&hbar2)?;
            Ok(vec![
                Record::new(M, "pbw_adversarial_rejected", p, rep.residual.len() as f64, Expectation::ExactNonzero),
                Record::exact(M, "pbw_adversarial_residual", p, off.len()),
            ])
        }),
    ));
}

fn level0_jobs(c: &SuiteConfig, jobs: &mut Vec<Job>) {
    const M: &str = "level0_algebra";
    let ns = or_default(&c.n, &[3]);
    let k = c.k.unwrap_or(5);
    let m = c.m.unwrap_or(16);
    let tw = c.window.unwrap_or(8);
    for n in ns {
        let p = format!("N={n};M={m}");
        jobs.push(Job::new(
            M,
            "basis_duality",
            p.clone(),
            Box::new(move || {
                let d = level0::basis_duality(n, m)?;
                let bad = d
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| if i == j { !v.is_one() } else { !v.is_zero() }))
                    .filter(|b| *b)
                    .count();
                Ok(vec![Record::exact(M, "basis_duality", &p, bad)])
            }),
        ));
        if n < 2 {
            continue;
        }
        let bm = m;
        let p = format!("N={n};K={k};M={bm}");
        jobs.push(Job::new(
            M,
            "structure_operator",
            p.clone(),
            Box::new(move || {
                let log = level0::normalized_log_q(n, k, bm)?;
                let ops = level0::compute_b_v(&log, n, bm)?;
                let lin = ops.hbar_linear_lambda();
                let not_id = lin
                    .iter()
                    .enumerate()
                    .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| if i == j { !v.is_one() } else { !v.is_zero() }))
                    .filter(|b| *b)
                    .count();
                let two_form = ops.two_form_residual();
                let mut out = vec![
                    Record::exact(M, "b_lambda_hbar_linear_identity", &p, not_id),
                    Record::flag(M, "two_form_residual", &p, two_form.is_zero()),
                    Record::flag(M, "v_vanishes_at_hbar0", &p, ops.v.slice(0).iter().flatten().all(|x| x.is_zero())),
                ];
                for kind in [CoproductKind::Standard, CoproductKind::Bar] {
                    let r = level0::check_coproduct(&ops, kind, 4, 3)?;
                    let label = if kind == CoproductKind::Standard { "standard" } else { "bar" };
                    let pk = format!("{p};kind={label}");
                    out.push(Record::flag(M, "group_like_k_plus", &pk, r.group_like_plus));
                    out.push(Record::flag(M, "group_like_k_minus", &pk, r.group_like_minus));
                    out.push(Record::exact(M, "coassociativity", &pk, r.coassociativity.iter().map(|x| x.1).sum()));
                    out.push(Record::exact(M, "counit", &pk, r.counit.iter().map(|x| x.1).sum()));
                }
                Ok(out)
            }),
        ));
        let p = format!("N={n};K={k};M={bm};a=1;b=hbar");
        jobs.push(Job::new(
            M,
            "hopf_pairing",
            p.clone(),
            Box::new(move || {
                let v = ["z", "w"];
                let a = Series::one(&v, k, n);
                let b = Series::monomial(&v, k, n, 1, &[0, 0], GaussRat::one());
                let ops = level0::compute_b_v(&level0::log_q_ab(&a, &b, n, bm)?, n, bm)?;
                let two = BigRational::from_integer(2.into());
                let mut bad = 0;
                // 2ħ·id + O(ħ³)
                for kk in 0..(k as usize).min(3) {
                    for (i, row) in ops.b_lambda.slice(kk).iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            let want = if kk == 1 && i == j { two.clone() } else { BigRational::zero() };
                            bad += usize::from(*x != want);
                        }
                    }
                }
                let table = level0::hopf_pairing_table(&ops)?;
                let window = level0::required_window(n, bm, k)?;
                let rels = level0::emit_relation_set(&a, &b, &ops, window)?;
                Ok(vec![
                    Record::exact(M, "b_lambda_two_hbar_identity", &p, bad),
                    Record::flag(M, "pairing_antidiagonal", &p, table.ef_is_antidiagonal()),
                    Record::flag(M, "relation_set_complete", &p, rels.relations.len() == 8 && rels.symbols_declared()),
                ])
            }),
        ));
        let p = format!("N={n};K=4;window=10");
        jobs.push(Job::new(
            M,
            "isoms",
            p.clone(),
            Box::new(move || {
                let (s, c) = level0::isoms_check(n, 4, 10)?;
                Ok(vec![Record::exact(M, "isoms_symmetric_scale", &p, s.len()), Record::exact(M, "isoms_shift", &p, c.len())])
            }),
        ));
        let p = format!("N={n};window={tw}");
        jobs.push(Job::new(
            M,
            "delta_split",
            p.clone(),
            Box::new(move || {
                let d = level0::delta_split_check(n, tw)?;
                let rec = Record::flag(M, "delta_split", &p, d.is_formal_delta());
                // even N has an overlapping splitting by construction
                Ok(vec![if n % 2 == 0 { rec.inconclusive() } else { rec }])
            }),
        ));
        if n % 2 == 1 {
            for xi in ["K", "h[1]", "e[z^-2]", "f[z^-2]", "D"] {
                let p = format!("N={n};window={tw};xi={xi}");
                jobs.push(Job::new(
                    M,
                    "classical_twist",
                    p.clone(),
                    Box::new(move || {
                        let x: LieElem = xi.parse()?;
                        let r = level0::classical_twist_check(n, tw, x)?;
                        let mut rec = Record::exact(M, "classical_twist", &p, r.twist_r + r.twist_bar + r.duality_mismatches + r.invariance);
                        if r.status == TwistStatus::Inconclusive {
                            rec = rec.inconclusive();
                        }
                        // informational: the non-antisymmetrized twist
                        let lit = r.literal_r + r.literal_bar;
                        Ok(vec![rec, Record::exact(M, "classical_twist_literal_form", &p, lit).inconclusive()])
                    }),
                ));
            }
        }
    }
}

fn theta_jobs(c: &SuiteConfig, jobs: &mut Vec<Job>) -> QcResult<()> {
    const M: &str = "theta_kernel";
    let fixtures: Vec<Fixture> = if c.fixtures.is_empty() {
        vec![Fixture::parse("g2", G2)?, Fixture::parse("g2_random", G2_RANDOM)?]
    } else {
        c.fixtures.iter().map(|p| Fixture::load(p)).collect::<QcResult<_>>()?
    };
    for fx in fixtures {
        let tol = c.tolerances.clone();
        let p = format!("fixture={}", fx.name);
        jobs.push(Job::new(
            M,
            "fixture_checks",
            p,
            Box::new(move || {
                let rows = theta::run_fixture_checks(&fx)?;
                Ok(rows
                    .into_iter()
                    .map(|r| {
                        let t = tol.get(&r.check).copied().unwrap_or(r.tolerance);
                        let expect = match r.expect {
                            Expect::Below => Expectation::Below(t),
                            Expect::Above => Expectation::Above(t),
                            Expect::Zero => Expectation::ExactZero,
                        };
                        Record::new(M, &r.check, &format!("fixture={}", r.name), r.residual, expect)
                    })
                    .collect())
            }),
        ));
    }
    Ok(())
}
