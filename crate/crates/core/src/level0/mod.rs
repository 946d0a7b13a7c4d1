//! Level-zero algebras `U_{a,b}g` on the rational curve with
//! `ω = z^{N-1}dz`: residue pairing, the operators `B` and `V`, relation
//! emission, coproduct checks, Hopf pairing tables and the classical twist.

mod coproduct;
mod relations;
mod twist;

pub use coproduct::{
    apply_counit, apply_delta, check_coproduct, coassociativity_residual, generator, CoproductKind, CoproductReport, Sym,
    TensorSum,
};
pub use relations::{delta_parts, delta_split_check, emit_relation_set, DeltaSplit, RelTerm, Relation, RelationSet};
pub use twist::{classical_twist_check, LieElem, LoopAlgebra, Splitting, Tensor2, TwistReport, TwistStatus};

use crate::error::{QcError, QcResult};
use crate::hmatrix::{HMatrix, HPoly};
use crate::hseries::{region_expand_reciprocal, RegionSeries, Series};
use crate::rational::{compute_q_closed, DualBasisWindow};
use crate::scalar::{rat, GaussRat, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Finite Laurent polynomial in one variable.
pub type Laurent = BTreeMap<i64, BigRational>;

pub fn monomial(e: i64) -> Laurent {
    let mut l = Laurent::new();
    l.insert(e, BigRational::one());
    l
}

/// `res₀(f g z^{N-1} dz)`.
pub fn residue_pairing(f: &Laurent, g: &Laurent, n: i64) -> BigRational {
    let mut acc = BigRational::zero();
    for (i, a) in f {
        if let Some(b) = g.get(&(-n - i)) {
            acc += a * b;
        }
    }
    acc
}

/// `⟨e^i, e_j⟩` for `i, j < m`; the identity matrix for dual bases.
pub fn basis_duality(n: i64, m: usize) -> QcResult<Vec<Vec<BigRational>>> {
    let basis = DualBasisWindow::new(n, m)?;
    Ok((0..m)
        .map(|i| (0..m).map(|j| residue_pairing(&monomial(basis.upper_exp(i)), &monomial(basis.lower_exp(j)), n)).collect())
        .collect())
}

/// `ε_i` as a monomial exponent: `e_i` for `i ≥ 0`, `e^{-i-1}` otherwise.
pub fn epsilon_exp(basis: &DualBasisWindow, i: i64) -> i64 {
    if i >= 0 {
        basis.lower_exp(i as usize)
    } else {
        basis.upper_exp((-i - 1) as usize)
    }
}

const LOG_FRAME: [&str; 2] = ["w", "z"];

/// Checks `a ∈ 1 + ħ(R⊗R)[[ħ]]` and `b ∈ ħ(R⊗R)[[ħ]]` on stored terms,
/// allowing constant legs.
pub fn check_admissible(a: &RegionSeries, b: &RegionSeries, n: i64) -> QcResult<()> {
    let basis = DualBasisWindow::new(n, 0)?;
    for (name, s) in [("a", a), ("b", b)] {
        if !s.is_exact() || s.vars() != ["z", "w"] {
            return Err(QcError::Structural(format!("{name} must be exact in the frame [z, w]")));
        }
    }
    let in_r = |e: &[i64]| e.iter().all(|x| *x == 0 || *x < -basis.a);
    let one = Series::one(&["z", "w"], a.order(), a.weight());
    if !a.hbar_coefficient(0).sub(&one.hbar_coefficient(0))?.is_zero() {
        return Err(QcError::Domain("a must equal 1 at hbar^0".into()));
    }
    for (k, e) in a.terms().keys() {
        if *k > 0 && !in_r(e) {
            return Err(QcError::Domain(format!("a has a term outside R⊗R: {e:?}")));
        }
    }
    for (k, e) in b.terms().keys() {
        if *k == 0 || !in_r(e) {
            return Err(QcError::Domain(format!("b has a term outside hbar(R⊗R): hbar^{k} {e:?}")));
        }
    }
    Ok(())
}

/// `G^{(21)}(z,w) = G(w,z)` expanded for `|z| < |w|`, frame `[w, z]`.
pub fn green_21(n: i64, order: u32, window: i64) -> QcResult<RegionSeries> {
    let basis = DualBasisWindow::new(n, 0)?;
    region_expand_reciprocal(
        &LOG_FRAME,
        order,
        n,
        &[-basis.a, -basis.b],
        GaussRat::one(),
        GaussRat::one(),
        "w",
        GaussRat::from_i64(-1),
        "z",
        window,
    )
}

/// `q_{a,b} = (a + bG^{(21)})/(a^{(21)} − b^{(21)}G^{(21)})` in the frame `[w, z]`.
pub fn q_ab(a: &RegionSeries, b: &RegionSeries, n: i64, window: i64) -> QcResult<RegionSeries> {
    check_admissible(a, b, n)?;
    let order = a.order().min(b.order());
    let place = |s: &RegionSeries| -> QcResult<RegionSeries> { s.truncate_order(order).reweight(n).embed(&LOG_FRAME) };
    let g21 = green_21(n, order, window)?;
    let num = place(a)?.add(&place(b)?.mul(&g21)?)?;
    let den = place(&a.swap_legs()?)?.sub(&place(&b.swap_legs()?)?.mul(&g21)?)?;
    num.mul(&den.restrict(&[window])?.invert_unit()?)
}

/// Window needed to read `B` on `e_0 … e_{m−1}` at ħ-order `order`.
pub fn required_window(n: i64, m: usize, order: u32) -> QcResult<i64> {
    let basis = DualBasisWindow::new(n, m)?;
    Ok((basis.a + m as i64).max(m as i64 - 1 - basis.b + n * (order as i64 - 1)))
}

/// `log q_{a,b}` in the frame `[w, z]`.
pub fn log_q_ab(a: &RegionSeries, b: &RegionSeries, n: i64, m: usize) -> QcResult<RegionSeries> {
    let window = required_window(n, m, a.order().min(b.order()))?;
    q_ab(a, b, n, window)?.log()
}

/// The rational structure function normalized so that `B_Λ = ħ·id + o(ħ)`:
/// `½ log q` with `q` the closed form, legs named so that `w` dominates.
pub fn normalized_log_q(n: i64, order: u32, m: usize) -> QcResult<RegionSeries> {
    let window = required_window(n, m, order)?;
    let q = compute_q_closed(n, order, window, &BigRational::one())?.q;
    q.log()?.scale_rat(&rat(1, 2)).rename(&LOG_FRAME)
}

/// Window-truncated matrices of `B_Λ`, `B_R` and `V = B_R ∘ B_Λ^{-1}`.
/// Column `j` is the image of `e_j`; rows index `e_i` resp. `e^i`.
#[derive(Clone, Debug)]
pub struct StructureOperatorB {
    pub n: i64,
    pub m: usize,
    pub order: u32,
    pub b_lambda: HMatrix,
    pub b_r: HMatrix,
    /// Known modulo ħ^{order−1}.
    pub v: HMatrix,
}

fn real(c: &GaussRat) -> QcResult<BigRational> {
    c.real().cloned().ok_or_else(|| QcError::Domain("structure function has a non-real coefficient".into()))
}

fn read(log: &RegionSeries, k: u32, ew: i64, ez: i64) -> QcResult<BigRational> {
    let e = [ew, ez];
    if !log.certifies(k, &e) {
        return Err(QcError::WindowUnderflow(format!("coefficient hbar^{k} w^{ew} z^{ez} lies outside the window")));
    }
    real(&log.coeff(k, &e))
}

/// Pairs the `w` leg of `log q` (frame `[w, z]`) against `e_j`.
pub fn compute_b_v(log: &RegionSeries, n: i64, m: usize) -> QcResult<StructureOperatorB> {
    if log.vars() != LOG_FRAME {
        return Err(QcError::Structural("log q must be in the frame [w, z]".into()));
    }
    let order = log.order();
    if order < 2 {
        return Err(QcError::Domain("B needs hbar order at least 2".into()));
    }
    let basis = DualBasisWindow::new(n, m)?;
    let ku = order as usize;
    let mut b_lambda = HMatrix::zero(m, m, ku);
    let mut b_r = HMatrix::zero(m, m, ku);
    for j in 0..m {
        let ew = basis.upper_exp(j);
        for i in 0..m {
            let mut pl = HPoly::zero(ku);
            let mut pr = HPoly::zero(ku);
            for k in 0..order {
                pl.0[k as usize] = read(log, k, ew, basis.lower_exp(i))?;
                pr.0[k as usize] = read(log, k, ew, basis.upper_exp(i))?;
            }
            b_lambda.data[i][j] = pl;
            b_r.data[i][j] = pr;
        }
    }
    if b_lambda.data.iter().flatten().any(|p| !p.coeff(0).is_zero()) || b_r.data.iter().flatten().any(|p| !p.coeff(0).is_zero()) {
        return Err(QcError::Domain("B has a nonzero hbar^0 part".into()));
    }
    let c = b_lambda.map(|p| p.div_hbar().expect("checked above"));
    let c_inv = c.inverse().map_err(|_| QcError::NotInvertible("B_Λ is degenerate at hbar^1".into()))?;
    let br_h = b_r.map(|p| p.div_hbar().expect("checked above"));
    let v = br_h.mul(&c_inv);
    Ok(StructureOperatorB { n, m, order, b_lambda, b_r, v })
}

impl StructureOperatorB {
    /// `V ∘ B_Λ − B_R`, known modulo ħ^{order}.
    pub fn two_form_residual(&self) -> HMatrix {
        let c = self.b_lambda.map(|p| p.div_hbar().expect("B_Λ is O(ħ)"));
        let vc = self.v.mul(&c);
        let shifted = vc.map(|p| {
            let mut v = vec![BigRational::zero()];
            v.extend(p.0.iter().cloned());
            HPoly(v)
        });
        shifted.sub(&self.b_r)
    }

    /// `B_Λ` at ħ¹.
    pub fn hbar_linear_lambda(&self) -> Vec<Vec<BigRational>> {
        self.b_lambda.slice(1)
    }

    /// `((1+V)e_i)(z)` as an exact one-variable series, known modulo ħ^{order−1}.
    pub fn kplus_mode(&self, i: usize) -> QcResult<RegionSeries> {
        let basis = DualBasisWindow::new(self.n, self.m)?;
        let order = self.order - 1;
        let mut terms = vec![((0u32, vec![basis.lower_exp(i)]), GaussRat::one())];
        for j in 0..self.m {
            for (k, c) in self.v.data[j][i].0.iter().enumerate() {
                if !c.is_zero() && (k as u32) < order {
                    terms.push(((k as u32, vec![basis.upper_exp(j)]), GaussRat::from_rat(c.clone())));
                }
            }
        }
        Series::from_terms(&["z"], order, self.n, vec![], vec![], terms)
    }
}

/// Hopf pairing values on a window.
#[derive(Clone, Debug)]
pub struct PairingTable {
    pub m: usize,
    /// `⟨h[e^i], h[e_{−j−1}]⟩ = ⟨e^i, B_Λ e_j⟩`
    pub h_block: HMatrix,
    /// `⟨e[ε_i], f[ε_j]⟩` for `i, j ∈ [−m, m−1]`, row-major from `−m`.
    pub ef_block: Vec<Vec<BigRational>>,
}

impl PairingTable {
    pub fn ef_is_antidiagonal(&self) -> bool {
        let m = self.m as i64;
        (-m..m).all(|i| {
            (-m..m).all(|j| {
                let v = &self.ef_block[(i + m) as usize][(j + m) as usize];
                if i == -j - 1 {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        })
    }
}

pub fn hopf_pairing_table(b: &StructureOperatorB) -> QcResult<PairingTable> {
    let basis = DualBasisWindow::new(b.n, b.m)?;
    let m = b.m as i64;
    let ef_block: Vec<Vec<BigRational>> = (-m..m)
        .map(|i| {
            (-m..m)
                .map(|j| residue_pairing(&monomial(epsilon_exp(&basis, i)), &monomial(epsilon_exp(&basis, j)), b.n))
                .collect()
        })
        .collect();
    let table = PairingTable { m: b.m, h_block: b.b_lambda.clone(), ef_block };
    if !table.ef_is_antidiagonal() {
        return Err(QcError::IdentityViolation("e/f pairing is not anti-diagonal".into()));
    }
    Ok(table)
}

/// Residuals of `q_{sa,sb} − q_{a,b}` for symmetric `s` and
/// `q_{a−cG^{(21)}, b+c} − q_{a,b}` for `c = ħ(z−w)z^{−a−2}w^{−a−2}`.
pub fn isoms_check(n: i64, order: u32, window: i64) -> QcResult<(RegionSeries, RegionSeries)> {
    let basis = DualBasisWindow::new(n, 0)?;
    let v = ["z", "w"];
    let r = -basis.a - 1;
    let g = |v: i64| GaussRat::from_i64(v);
    let mono = |k: u32, ez: i64, ew: i64, c: i64| Series::monomial(&v, order, n, k, &[ez, ew], g(c));
    let a = mono(0, 0, 0, 1).add(&mono(2, r, r, 1))?;
    let b = mono(1, 0, 0, 1).add(&mono(2, r, 0, 1))?.add(&mono(2, 0, r, 1))?;
    let base = q_ab(&a, &b, n, window)?;
    let s = mono(0, 0, 0, 1).add(&mono(1, r, 0, 1))?.add(&mono(1, 0, r, 1))?.add(&mono(2, r, r, 3))?;
    let scaled = q_ab(&s.mul(&a)?, &s.mul(&b)?, n, window)?;
    // c vanishes on the diagonal, so c·G^{(21)} is the Laurent polynomial −ħ z^{r−1−b} w^{r−1−a}
    let c = mono(1, r, r - 1, 1).sub(&mono(1, r - 1, r, 1))?;
    let cg = mono(1, r - 1 - basis.b, r - 1 - basis.a, -1);
    let shifted = q_ab(&a.sub(&cg)?, &b.add(&c)?, n, window)?;
    Ok((scaled.sub(&base)?, shifted.sub(&base)?))
}
