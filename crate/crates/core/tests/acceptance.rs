//! Acceptance run: one line per criterion, nonzero exit if any fails.

use num_rational::BigRational;
use num_traits::{One, Zero};
use qcurrent::hseries::Series;
use qcurrent::level0::{self, CoproductKind, TwistStatus};
use qcurrent::rational;
use qcurrent::theta::{run_fixture_checks, Fixture};
use qcurrent::zn::{self, XYVariant};
use qcurrent::{Cyclotomic, QcResult, Scalar};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

type Check = fn() -> QcResult<Result<(), String>>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn is_identity(m: &[Vec<BigRational>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() }))
}

fn c1_vanishing_locus() -> QcResult<Result<(), String>> {
    for n in [2, 3, 5] {
        let t = Instant::now();
        let r = rational::verify_vanishing_locus(n, 6, 12)?;
        if !r.q_locus.is_zero() || !r.q_inverse_locus.is_zero() {
            return Ok(Err(format!("N={n}: {} surviving terms", r.q_locus.len() + r.q_inverse_locus.len())));
        }
        if t.elapsed() > Duration::from_secs(60) {
            return Ok(Err(format!("N={n} took {:?}", t.elapsed())));
        }
    }
    Ok(Ok(()))
}

fn c2_simply_laced() -> QcResult<Result<(), String>> {
    for n in [3, 5] {
        let r = rational::verify_vanishing_locus(n, 6, 12)?;
        let (Some(sl), Some(ctl)) = (&r.simply_laced, &r.control) else {
            return Ok(Err(format!("N={n}: no simply-laced residual")));
        };
        if !sl.is_zero() || ctl.is_zero() {
            return Ok(Err(format!("N={n}: residual {} terms, control {} terms", sl.len(), ctl.len())));
        }
    }
    Ok(Ok(()))
}

fn c3_u_identity() -> QcResult<Result<(), String>> {
    let u = rational::compute_u(3, 40, 5, 12)?;
    Ok(ensure(u.residual.is_zero() && u.u_minus_residual.is_zero(), format!("{} surviving terms", u.residual.len())))
}

fn c4_generating_identity() -> QcResult<Result<(), String>> {
    let r = rational::generating_identity(3, 6, 12)?;
    Ok(ensure(r.is_zero(), format!("{} surviving terms", r.len())))
}

fn c5_xy_equivalence() -> QcResult<Result<(), String>> {
    for n in 1..=3 {
        let entries = zn::xy_residuals(n, 4, 8, XYVariant::ProofDerived)?;
        if entries.len() != (n * n) as usize {
            return Ok(Err(format!("N={n}: {} pairs", entries.len())));
        }
        if let Some(e) = entries.iter().find(|e| !e.is_zero()) {
            return Ok(Err(format!("N={n} p={} q={}: {} terms", e.p, e.q, e.residual.len())));
        }
    }
    Ok(Ok(()))
}

fn c6_projection() -> QcResult<Result<(), String>> {
    for n in 1..=6 {
        for p in 0..n {
            let m = zn::mu_projection(n, p, 16)?;
            let d = m.lhs.sub(&m.rhs)?;
            if !d.is_zero() {
                return Ok(Err(format!("N={n} p={p}: {} terms", d.len())));
            }
        }
    }
    Ok(Ok(()))
}

fn c7_pbw_gate() -> QcResult<Result<(), String>> {
    let rule = zn::rational_case_rule(3, 6, 12)?;
    if !zn::pbw_symmetry_check(&rule)?.passes {
        return Ok(Err("rational rule rejected".into()));
    }
    if !zn::confluence_length3(&rule)?.confluent() {
        return Ok(Err("rational rule not confluent".into()));
    }
    let v = ["z", "w"];
    let zw = Series::<Cyclotomic>::var(&v, 4, 1, "z")?.sub(&Series::var(&v, 4, 1, "w")?)?;
    let hbar = |k| Series::monomial(&v, 4, 1, k, &[0, 0], Cyclotomic::one());
    let bad = zn::ScalarRule::new(zw.add(&hbar(1))?, zw, 8)?;
    let rep = zn::pbw_symmetry_check(&bad)?;
    if rep.passes || !rep.residual.sub(&hbar(2))?.is_zero() {
        return Ok(Err("adversarial residual is not ħ²".into()));
    }
    Ok(Ok(()))
}

fn c8_scaling() -> QcResult<Result<(), String>> {
    for a in [rat(2, 1), rat(-1, 1), rat(1, 2)] {
        let r = rational::scaling_covariance(3, &a, 6, 12)?;
        if !r.is_zero() {
            return Ok(Err(format!("alpha={a}: {} terms", r.len())));
        }
    }
    Ok(Ok(()))
}

fn c9_level0() -> QcResult<Result<(), String>> {
    if !is_identity(&level0::basis_duality(3, 16)?) {
        return Ok(Err("duality".into()));
    }
    let ops = level0::compute_b_v(&level0::normalized_log_q(3, 5, 16)?, 3, 16)?;
    if !is_identity(&ops.hbar_linear_lambda()) {
        return Ok(Err("ħ-linear block of B_Λ".into()));
    }
    for kind in [CoproductKind::Standard, CoproductKind::Bar] {
        let r = level0::check_coproduct(&ops, kind, 4, 3)?;
        if !r.passes() {
            return Ok(Err(format!("coproduct {kind:?}")));
        }
    }
    Ok(ensure(level0::hopf_pairing_table(&ops)?.ef_is_antidiagonal(), "pairing table"))
}

fn c10_twist() -> QcResult<Result<(), String>> {
    let t = Instant::now();
    for xi in ["K", "h[1]", "e[z^-2]", "f[z^-2]"] {
        let r = level0::classical_twist_check(3, 8, xi.parse()?)?;
        let bad = r.twist_r + r.twist_bar + r.duality_mismatches + r.invariance;
        if r.status != TwistStatus::Pass || bad != 0 || r.certificate.is_empty() {
            return Ok(Err(format!("xi={xi}: {bad} entries, {:?}", r.status)));
        }
    }
    Ok(ensure(t.elapsed() < Duration::from_secs(60), format!("took {:?}", t.elapsed())))
}

fn c11_theta() -> QcResult<Result<(), String>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let t = Instant::now();
    for name in ["g2.fx", "g2_random.fx"] {
        let rows = run_fixture_checks(&Fixture::load(&dir.join(name))?)?;
        if let Some(r) = rows.iter().find(|r| !r.pass) {
            return Ok(Err(r.csv()));
        }
    }
    Ok(ensure(t.elapsed() < Duration::from_secs(120), format!("took {:?}", t.elapsed())))
}

fn c12_cli() -> QcResult<Result<(), String>> {
    let run = || Command::new(env!("CARGO_BIN_EXE_qcv")).args(["suite", "all"]).output();
    let t = Instant::now();
    let a = run().map_err(|e| qcurrent::QcError::Domain(e.to_string()))?;
    if t.elapsed() > Duration::from_secs(600) {
        return Ok(Err(format!("took {:?}", t.elapsed())));
    }
    let b = run().map_err(|e| qcurrent::QcError::Domain(e.to_string()))?;
    if a.status.code() != Some(0) {
        return Ok(Err(format!("exit {:?}", a.status.code())));
    }
    Ok(ensure(a.stdout == b.stdout && !a.stdout.is_empty(), "reports differ"))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 12] = [
        ("vanishing locus", c1_vanishing_locus, 180),
        ("simply-laced vanishing", c2_simply_laced, 60),
        ("U identity", c3_u_identity, 120),
        ("generating identity", c4_generating_identity, 600),
        ("X:Y equivalence", c5_xy_equivalence, 120),
        ("root-of-unity projection", c6_projection, 600),
        ("PBW gate", c7_pbw_gate, 600),
        ("scaling law", c8_scaling, 600),
        ("level-0 algebra", c9_level0, 600),
        ("classical twist", c10_twist, 60),
        ("theta fixtures", c11_theta, 120),
        ("qcv suite all", c12_cli, 1200),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut res = match check() {
            Ok(r) => r,
            Err(e) => Err(format!("engine error: {e}")),
        };
        let took = t.elapsed();
        if res.is_ok() && took > Duration::from_secs(*limit) {
            res = Err(format!("over the {limit} s limit"));
        }
        match res {
            Ok(()) => println!("criterion {}: PASS  {name} ({:.2} s)", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({:.2} s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
