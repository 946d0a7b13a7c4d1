//! Coproducts `Δ_{a,b}` and `Δ̄_{a,b}` on generating series: group-likeness of
//! `K^±`, coassociativity and counit laws, computed on symbolic tensor words.

use super::StructureOperatorB;
use crate::error::QcResult;
use crate::hseries::{RegionSeries, Series};
use crate::rational::DualBasisWindow;
use crate::scalar::{rat_int, GaussRat, Scalar};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// `h[ε_i]`
    H(i64),
    E,
    F,
    KPlus,
    KMinusInv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoproductKind {
    Standard,
    Bar,
}

/// Integer combination of tensor words; each slot is a word, `[]` is 1.
pub type TensorSum = BTreeMap<Vec<Vec<Sym>>, i64>;

fn add_into(t: &mut TensorSum, key: Vec<Vec<Sym>>, c: i64) {
    let v = t.entry(key.clone()).or_insert(0);
    *v += c;
    if *v == 0 {
        t.remove(&key);
    }
}

fn delta_sym(kind: CoproductKind, s: Sym) -> Vec<(Vec<Sym>, Vec<Sym>)> {
    use Sym::*;
    match (kind, s) {
        (_, H(_)) => vec![(vec![s], vec![]), (vec![], vec![s])],
        (_, KPlus) | (_, KMinusInv) => vec![(vec![s], vec![s])],
        (CoproductKind::Standard, E) => vec![(vec![E], vec![KPlus]), (vec![], vec![E])],
        (CoproductKind::Standard, F) => vec![(vec![F], vec![]), (vec![KMinusInv], vec![F])],
        (CoproductKind::Bar, E) => vec![(vec![E], vec![]), (vec![KMinusInv], vec![E])],
        (CoproductKind::Bar, F) => vec![(vec![F], vec![KPlus]), (vec![], vec![F])],
    }
}

/// Multiplicative extension to words.
fn delta_word(kind: CoproductKind, w: &[Sym]) -> Vec<(Vec<Sym>, Vec<Sym>)> {
    let mut acc = vec![(vec![], vec![])];
    for s in w {
        let mut next = Vec::new();
        for (l, r) in &acc {
            for (dl, dr) in delta_sym(kind, *s) {
                let mut nl = l.clone();
                nl.extend(dl);
                let mut nr = r.clone();
                nr.extend(dr);
                next.push((nl, nr));
            }
        }
        acc = next;
    }
    acc
}

/// Applies the coproduct to one tensor slot.
pub fn apply_delta(kind: CoproductKind, t: &TensorSum, slot: usize) -> TensorSum {
    let mut out = TensorSum::new();
    for (key, c) in t {
        for (l, r) in delta_word(kind, &key[slot]) {
            let mut k = key[..slot].to_vec();
            k.push(l);
            k.push(r);
            k.extend(key[slot + 1..].iter().cloned());
            add_into(&mut out, k, *c);
        }
    }
    out
}

fn counit_word(w: &[Sym]) -> i64 {
    if w.iter().all(|s| matches!(s, Sym::KPlus | Sym::KMinusInv)) {
        1
    } else {
        0
    }
}

/// Applies the counit to one tensor slot.
pub fn apply_counit(t: &TensorSum, slot: usize) -> TensorSum {
    let mut out = TensorSum::new();
    for (key, c) in t {
        let e = counit_word(&key[slot]);
        if e != 0 {
            let mut k = key.clone();
            k.remove(slot);
            add_into(&mut out, k, c * e);
        }
    }
    out
}

pub fn generator(s: Sym) -> TensorSum {
    let mut t = TensorSum::new();
    t.insert(vec![vec![s]], 1);
    t
}

fn sub(a: &TensorSum, b: &TensorSum) -> TensorSum {
    let mut out = a.clone();
    for (k, c) in b {
        add_into(&mut out, k.clone(), -c);
    }
    out
}

/// Commutative polynomials in the mode generators `h_i ⊗ 1`, `1 ⊗ h_i`
/// with one-variable series coefficients, truncated in total degree.
type CommPoly = BTreeMap<Vec<u8>, RegionSeries>;

fn poly_mul(a: &CommPoly, b: &CommPoly, degree: usize) -> QcResult<CommPoly> {
    let mut out = CommPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().map(|x| *x as usize).sum::<usize>() > degree {
                continue;
            }
            let p = ca.mul(cb)?;
            let v = match out.remove(&e) {
                Some(c) => c.add(&p)?,
                None => p,
            };
            if !v.is_zero() {
                out.insert(e, v);
            }
        }
    }
    Ok(out)
}

fn poly_add(a: &CommPoly, b: &CommPoly) -> QcResult<CommPoly> {
    let mut out = a.clone();
    for (e, c) in b {
        let v = match out.remove(e) {
            Some(x) => x.add(c)?,
            None => c.clone(),
        };
        if !v.is_zero() {
            out.insert(e.clone(), v);
        }
    }
    Ok(out)
}

fn poly_exp(p: &CommPoly, nvars: usize, degree: usize, unit: &RegionSeries) -> QcResult<CommPoly> {
    let mut out = CommPoly::new();
    out.insert(vec![0; nvars], unit.clone());
    let mut power = out.clone();
    for j in 1..=degree {
        // power holds p^j / j!
        let inv_j = rat_int(1) / rat_int(j as i64);
        power = poly_mul(&power, p, degree)?.into_iter().map(|(e, c)| (e, c.scale_rat(&inv_j))).collect();
        out = poly_add(&out, &power)?;
    }
    Ok(out)
}

/// `exp(X⊗1 + 1⊗X) = exp(X)⊗exp(X)` for `X = Σ_{i<modes} h_i c_i(z)`.
fn group_like(coeffs: &[RegionSeries], degree: usize) -> QcResult<bool> {
    let mh = coeffs.len();
    let nv = 2 * mh;
    let unit = Series::one(&["z"], coeffs[0].order(), coeffs[0].weight());
    let leg = |slot: usize| -> CommPoly {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut e = vec![0u8; nv];
                e[slot * mh + i] = 1;
                (e, c.clone())
            })
            .collect()
    };
    let x1 = leg(0);
    let x2 = leg(1);
    let lhs = poly_exp(&poly_add(&x1, &x2)?, nv, degree, &unit)?;
    let rhs = poly_mul(&poly_exp(&x1, nv, degree, &unit)?, &poly_exp(&x2, nv, degree, &unit)?, degree)?;
    let keys: std::collections::BTreeSet<_> = lhs.keys().chain(rhs.keys()).collect();
    for k in keys {
        let zero = Series::zero(&["z"], unit.order(), unit.weight());
        let l = lhs.get(k).unwrap_or(&zero);
        let r = rhs.get(k).unwrap_or(&zero);
        if !l.sub(r)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct CoproductReport {
    pub kind: CoproductKind,
    pub group_like_plus: bool,
    pub group_like_minus: bool,
    /// Generator label and number of surviving words in `(Δ⊗1)Δ − (1⊗Δ)Δ`.
    pub coassociativity: Vec<(String, usize)>,
    /// Generator label and surviving words in both counit laws.
    pub counit: Vec<(String, usize)>,
}

impl CoproductReport {
    pub fn passes(&self) -> bool {
        self.group_like_plus
            && self.group_like_minus
            && self.coassociativity.iter().all(|(_, r)| *r == 0)
            && self.counit.iter().all(|(_, r)| *r == 0)
    }
}

/// `(Δ⊗1)Δ(x) − (1⊗Δ)Δ(x)`
pub fn coassociativity_residual(kind: CoproductKind, s: Sym) -> TensorSum {
    let d = apply_delta(kind, &generator(s), 0);
    sub(&apply_delta(kind, &d, 0), &apply_delta(kind, &d, 1))
}

/// Runs all checks using `modes` Cartan modes and exponential degree `degree`.
pub fn check_coproduct(ops: &StructureOperatorB, kind: CoproductKind, modes: usize, degree: usize) -> QcResult<CoproductReport> {
    let modes = modes.min(ops.m);
    let basis = DualBasisWindow::new(ops.n, ops.m)?;
    let plus: Vec<RegionSeries> = (0..modes).map(|i| ops.kplus_mode(i)).collect::<QcResult<_>>()?;
    let minus: Vec<RegionSeries> = (0..modes)
        .map(|i| Series::monomial(&["z"], ops.order - 1, ops.n, 0, &[basis.upper_exp(i)], GaussRat::one()))
        .collect();
    let gens = [
        ("h[e_0]", Sym::H(0)),
        ("h[e^0]", Sym::H(-1)),
        ("e(z)", Sym::E),
        ("f(z)", Sym::F),
        ("K+(z)", Sym::KPlus),
        ("K-(z)^-1", Sym::KMinusInv),
    ];
    let mut coassociativity = Vec::new();
    let mut counit = Vec::new();
    for (label, s) in gens {
        coassociativity.push((label.to_string(), coassociativity_residual(kind, s).len()));
        let d = apply_delta(kind, &generator(s), 0);
        let x = generator(s);
        let r = sub(&apply_counit(&d, 0), &x).len() + sub(&apply_counit(&d, 1), &x).len();
        counit.push((label.to_string(), r));
    }
    Ok(CoproductReport {
        kind,
        group_like_plus: group_like(&plus, degree)?,
        group_like_minus: group_like(&minus, degree)?,
        coassociativity,
        counit,
    })
}
