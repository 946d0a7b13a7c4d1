//! `G_h`, `q₀₊` and the `a + b·G_R` decomposition on Jacobian coordinates.

use super::{add, scale, sub, unit, ThetaData, ThetaValue, C64, CVec};
use crate::error::{QcError, QcResult};

/// `e` is the odd half-period shift (`δ − Δ`), `h` the direction, `s = ħh`.
#[derive(Clone, Debug)]
pub struct KernelPoint {
    pub e: CVec,
    pub h: CVec,
    pub s: CVec,
}

/// Points closer than this (Newton distance) to the zero divisor are rejected.
const POLE_DISTANCE: f64 = 1e-10;

fn shifted(data: &ThetaData, x: &[C64], e: &[C64]) -> QcResult<ThetaValue> {
    data.eval(&add(x, e))
}

fn off_divisor(v: &ThetaValue, what: &str) -> QcResult<()> {
    let gnorm: f64 = v.grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
    let dist = if gnorm > 0.0 { v.scaled.norm() / gnorm } else { f64::INFINITY };
    if v.scaled.norm() <= v.error || dist < POLE_DISTANCE {
        return Err(QcError::PoleProximity(format!("{what} is within {dist:.3e} of the theta divisor")));
    }
    Ok(())
}

/// `∂_hθ(u+e)/θ(u+e)`
pub fn green_h_eval(u: &[C64], data: &ThetaData, point: &KernelPoint) -> QcResult<C64> {
    let v = shifted(data, u, &point.e)?;
    off_divisor(&v, "G_h argument")?;
    Ok(v.dir(&point.h) / v.scaled)
}

#[derive(Clone, Debug)]
pub struct PoleLimit {
    pub samples: Vec<(f64, C64)>,
    pub extrapolated: C64,
    /// `∂_hθ(e)/∂_Vθ(e)`
    pub target: C64,
    pub residual: f64,
}

/// `t·G_h(tV)` at `t, t/2, t/4`, Richardson-extrapolated in `t²` (the
/// product is even in `t` when `x ↦ θ(x+e)` is odd).
pub fn pole_limit(data: &ThetaData, point: &KernelPoint, v: &[C64], t0: f64) -> QcResult<PoleLimit> {
    let ts = [t0, t0 / 2.0, t0 / 4.0];
    let mut samples = Vec::new();
    for t in ts {
        let g = green_h_eval(&scale(v, C64::new(t, 0.0)), data, point)?;
        samples.push((t, g * t));
    }
    let f: Vec<C64> = samples.iter().map(|s| s.1).collect();
    let r1 = [(4.0 * f[1] - f[0]) / 3.0, (4.0 * f[2] - f[1]) / 3.0];
    let extrapolated = (16.0 * r1[1] - r1[0]) / 15.0;
    let at_e = data.eval(&point.e)?;
    let target = at_e.dir(&point.h) / at_e.dir(v);
    let residual = (extrapolated - target).norm() / target.norm().max(1.0);
    Ok(PoleLimit { samples, extrapolated, target, residual })
}

#[derive(Clone, Debug)]
pub struct CLinearReport {
    pub values: Vec<C64>,
    pub in_kernel: Vec<bool>,
    /// Numerical rank of the row `(∂_{V_j}θ(e))_j`.
    pub rank: usize,
    pub gradient: CVec,
}

/// `h ↦ ∂_hθ(e)` on the supplied directions.
pub fn c_linear_form(data: &ThetaData, e: &[C64], dirs: &[CVec], tol: f64) -> QcResult<CLinearReport> {
    let v = data.eval(e)?;
    let scale_f = v.log_scale.exp();
    let values: Vec<C64> = dirs.iter().map(|d| v.dir(d) * scale_f).collect();
    let in_kernel: Vec<bool> = values.iter().map(|x| x.norm() < tol).collect();
    let rank = usize::from(in_kernel.iter().any(|k| !k));
    Ok(CLinearReport { values, in_kernel, rank, gradient: v.grad.iter().map(|g| g * scale_f).collect() })
}

/// `q₀₊(z,w) = θ(z−w−s+e)/θ(z−w+e)`
pub fn q0_plus(z: &[C64], w: &[C64], data: &ThetaData, point: &KernelPoint) -> QcResult<C64> {
    let u = sub(z, w);
    let num = shifted(data, &sub(&u, &point.s), &point.e)?;
    let den = shifted(data, &u, &point.e)?;
    off_divisor(&den, "q0+ denominator")?;
    Ok(num.ratio(&den))
}

fn theta_ratio(data: &ThetaData, num: &[C64], den: &[C64], e: &[C64]) -> QcResult<C64> {
    let n = shifted(data, num, e)?;
    let d = shifted(data, den, e)?;
    off_divisor(&d, "denominator")?;
    Ok(n.ratio(&d))
}

#[derive(Clone, Debug)]
pub struct Q0Decomposition {
    pub a: C64,
    pub b: C64,
    pub g_r: C64,
    /// `∂_hθ(e)`, the scalar playing the role of `κC(h)`.
    pub normalization: C64,
    /// `a` at `|z−w| ∈ {1e−2, 1e−3, 1e−4}` along the ray from `w` to `z`.
    pub near_diagonal: Vec<C64>,
    pub boundedness: f64,
    /// Max relative change of `a` and `b` under `z → z + Ωe_i` and `w → w + Ωe_i`.
    pub monodromy_a: f64,
    pub monodromy_b: f64,
    /// `q₀₊(z+Ωe_i, w)/q₀₊(z,w)` for each `i`.
    pub raw_monodromy: Vec<C64>,
}

struct Parts {
    a: C64,
    b: C64,
    g_r: C64,
}

fn parts(z: &[C64], w: &[C64], p: &[C64], data: &ThetaData, point: &KernelPoint, norm: C64) -> QcResult<Parts> {
    let q = q0_plus(z, w, data, point)? / (q0_plus(z, p, data, point)? * q0_plus(p, w, data, point)?);
    let gh = |x: CVec| green_h_eval(&x, data, point);
    let g_r = gh(sub(z, w))? - gh(sub(z, p))? + gh(sub(w, p))?;
    let theta_s = data.eval(&sub(&point.e, &point.s))?;
    let b = theta_s.value() / norm / (q0_plus(z, p, data, point)? * q0_plus(p, z, data, point)?);
    Ok(Parts { a: q - b * g_r, b, g_r })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn q0_decompose(z: &[C64], w: &[C64], p: &[C64], data: &ThetaData, point: &KernelPoint) -> QcResult<Q0Decomposition> {
    let at_e = data.eval(&point.e)?;
    let normalization = at_e.dir(&point.h) * at_e.log_scale.exp();
    if normalization.norm() < data.eps {
        return Err(QcError::Domain("∂_hθ(e) vanishes; h lies in the span of the divisor tangents".into()));
    }
    let base = parts(z, w, p, data, point, normalization)?;
    let d = sub(z, w);
    let dn: f64 = d.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let dir = scale(&d, C64::new(1.0 / dn, 0.0));
    let mut near_diagonal = Vec::new();
    for t in [1e-2, 1e-3, 1e-4] {
        let zt = add(w, &scale(&dir, C64::new(t, 0.0)));
        near_diagonal.push(parts(&zt, w, p, data, point, normalization)?.a);
    }
    let boundedness = near_diagonal.iter().flat_map(|x| near_diagonal.iter().map(move |y| rel(*x, *y))).fold(0.0, f64::max);
    let mut monodromy_a: f64 = 0.0;
    let mut monodromy_b: f64 = 0.0;
    let mut raw_monodromy = Vec::new();
    for i in 0..data.g {
        let per = data.period(i);
        let zs = add(z, &per);
        let ws = add(w, &per);
        for (zz, ww) in [(&zs, &w.to_vec()), (&z.to_vec(), &ws)] {
            let s = parts(zz, ww, p, data, point, normalization)?;
            monodromy_a = monodromy_a.max(rel(s.a, base.a));
            monodromy_b = monodromy_b.max(rel(s.b, base.b));
        }
        raw_monodromy.push(q0_plus(&zs, w, data, point)? / q0_plus(z, w, data, point)?);
    }
    Ok(Q0Decomposition {
        a: base.a,
        b: base.b,
        g_r: base.g_r,
        normalization,
        near_diagonal,
        boundedness,
        monodromy_a,
        monodromy_b,
        raw_monodromy,
    })
}

/// Structure functions whose single-valuedness is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    /// `q₀(z,w)/(q₀(z,P)q₀(P,w))`, `q₀ = θ(z−w+s+e)/θ(z−w−s+e)`
    Q,
    /// `q₊(z,w)/(q₊(z,P)q₊(P,w))`, `q₊ = θ(z−w+s+e)`
    QPlus,
    /// same with `−s`
    QMinus,
    /// unnormalized `q₀`
    RawQ0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeShift {
    Integer,
    Period,
}

fn structure(kind: StructureKind, z: &[C64], w: &[C64], p: &[C64], data: &ThetaData, point: &KernelPoint) -> QcResult<C64> {
    let e = &point.e;
    let s = &point.s;
    let q0 = |x: &[C64], y: &[C64]| -> QcResult<C64> {
        let u = sub(x, y);
        theta_ratio(data, &add(&u, s), &sub(&u, s), e)
    };
    let qpm = |x: &[C64], y: &[C64], sign: f64| -> QcResult<ThetaValue> {
        let v = shifted(data, &add(&sub(x, y), &scale(s, C64::new(sign, 0.0))), e)?;
        off_divisor(&v, "q± value")?;
        Ok(v)
    };
    match kind {
        StructureKind::Q => Ok(q0(z, w)? / (q0(z, p)? * q0(p, w)?)),
        StructureKind::RawQ0 => q0(z, w),
        StructureKind::QPlus | StructureKind::QMinus => {
            let sign = if kind == StructureKind::QPlus { 1.0 } else { -1.0 };
            let n = qpm(z, w, sign)?;
            let d1 = qpm(z, p, sign)?;
            let d2 = qpm(p, w, sign)?;
            Ok(n.scaled / (d1.scaled * d2.scaled) * (n.log_scale - d1.log_scale - d2.log_scale).exp())
        }
    }
}

/// Max relative deviation of the structure function under `z → z + λ` and
/// `w → w + λ` for `λ` running over `e_i` or `Ωe_i`.
pub fn single_valuedness_check(
    kind: StructureKind,
    z: &[C64],
    w: &[C64],
    p: &[C64],
    data: &ThetaData,
    point: &KernelPoint,
    shift: LatticeShift,
) -> QcResult<f64> {
    let base = structure(kind, z, w, p, data, point)?;
    let mut worst: f64 = 0.0;
    for i in 0..data.g {
        let lam = match shift {
            LatticeShift::Integer => unit(data.g, i),
            LatticeShift::Period => data.period(i),
        };
        worst = worst.max(rel(structure(kind, &add(z, &lam), w, p, data, point)?, base));
        worst = worst.max(rel(structure(kind, z, &add(w, &lam), p, data, point)?, base));
    }
    Ok(worst)
}

/// Scalar coefficients of the genus > 1 exchange relations at `(z, w)`,
/// keyed by the level-0 relation family names. Each value is the ratio
/// `RHS coefficient / LHS coefficient`; `h:h` and `e:f` carry none.
pub fn relation_coefficients(z: &[C64], w: &[C64], data: &ThetaData, point: &KernelPoint) -> QcResult<Vec<(&'static str, C64)>> {
    let u = sub(z, w);
    let plus = theta_ratio(data, &sub(&u, &point.s), &add(&u, &point.s), &point.e)?;
    let minus = theta_ratio(data, &add(&u, &point.s), &sub(&u, &point.s), &point.e)?;
    Ok(vec![("K+:e", plus), ("K-:e", minus), ("K+:f", minus), ("K-:f", plus), ("e:e", minus), ("f:f", plus)])
}
