//! Classical cobrackets of the extended loop algebra `g = sl2(K) ⊕ CK ⊕ CD`
//! for `K = C((z))`, `ω = z^{N−1}dz`, computed from canonical elements of
//! the Manin triples and of the Manin pair on a finite mode window.

use crate::error::{QcError, QcResult};
use crate::rational::DualBasisWindow;
use crate::scalar::rat;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LieElem {
    E(i64),
    F(i64),
    H(i64),
    K,
    D,
}

impl LieElem {
    fn mode(&self) -> Option<i64> {
        match self {
            LieElem::E(m) | LieElem::F(m) | LieElem::H(m) => Some(*m),
            _ => None,
        }
    }

    fn in_window(&self, w: i64) -> bool {
        self.mode().is_none_or(|m| m.abs() <= w)
    }
}

impl fmt::Display for LieElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieElem::E(m) => write!(f, "e[z^{m}]"),
            LieElem::F(m) => write!(f, "f[z^{m}]"),
            LieElem::H(m) => write!(f, "h[z^{m}]"),
            LieElem::K => write!(f, "K"),
            LieElem::D => write!(f, "D"),
        }
    }
}

impl FromStr for LieElem {
    type Err = QcError;
    /// Accepts `K`, `D`, `h[1]`, `e[z^-2]`, `f[z^3]`.
    fn from_str(s: &str) -> QcResult<Self> {
        let s = s.trim();
        match s {
            "K" => return Ok(LieElem::K),
            "D" => return Ok(LieElem::D),
            _ => {}
        }
        let bad = || QcError::Parse(format!("bad generator {s:?}"));
        let (x, rest) = s.split_at(1);
        let inner = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let m: i64 = match inner {
            "1" => 0,
            "z" => 1,
            _ => inner.strip_prefix("z^").ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        match x {
            "e" => Ok(LieElem::E(m)),
            "f" => Ok(LieElem::F(m)),
            "h" => Ok(LieElem::H(m)),
            _ => Err(bad()),
        }
    }
}

pub type Vector = BTreeMap<LieElem, BigRational>;
pub type Tensor2 = BTreeMap<(LieElem, LieElem), BigRational>;

fn push<K: Ord>(map: &mut BTreeMap<K, BigRational>, k: K, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

/// Structure constants of `g` for a fixed `N`.
#[derive(Clone, Copy, Debug)]
pub struct LoopAlgebra {
    pub n: i64,
}

impl LoopAlgebra {
    /// `⟨x[z^a], y[z^b]⟩ = tr(xy) δ_{a+b+N,0}`, `⟨K,D⟩ = 1`.
    pub fn pairing(&self, u: LieElem, v: LieElem) -> BigRational {
        use LieElem::*;
        let tr = match (u, v) {
            (E(a), F(b)) | (F(a), E(b)) if a + b + self.n == 0 => 1,
            (H(a), H(b)) if a + b + self.n == 0 => 2,
            (K, D) | (D, K) => 1,
            _ => 0,
        };
        BigRational::from_integer(tr.into())
    }

    /// `[x[z^a], y[z^b]] = [x,y][z^{a+b}] + a·tr(xy)δ_{a+b,0}K`,
    /// `[D, x[z^a]] = a·x[z^{a−N}]`.
    pub fn bracket(&self, u: LieElem, v: LieElem) -> Vector {
        use LieElem::*;
        let mut out = Vector::new();
        let n = self.n;
        let int = |v: i64| BigRational::from_integer(v.into());
        match (u, v) {
            (K, _) | (_, K) | (D, D) => {}
            (D, x) => {
                let m = x.mode().expect("mode element");
                push(&mut out, shift(x, m - n), int(m));
            }
            (x, D) => {
                let m = x.mode().expect("mode element");
                push(&mut out, shift(x, m - n), int(-m));
            }
            (x, y) => {
                let (a, b) = (x.mode().unwrap(), y.mode().unwrap());
                let s = a + b;
                match (x, y) {
                    (H(_), E(_)) => push(&mut out, E(s), int(2)),
                    (E(_), H(_)) => push(&mut out, E(s), int(-2)),
                    (H(_), F(_)) => push(&mut out, F(s), int(-2)),
                    (F(_), H(_)) => push(&mut out, F(s), int(2)),
                    (E(_), F(_)) => push(&mut out, H(s), int(1)),
                    (F(_), E(_)) => push(&mut out, H(s), int(-1)),
                    _ => {}
                }
                if s == 0 {
                    let tr = self.pairing(x, shift(y, -a - n));
                    push(&mut out, K, int(a) * tr);
                }
            }
        }
        out
    }

    /// `⟨u, v⟩` extended bilinearly.
    pub fn pair_vec(&self, u: &Vector, v: &Vector) -> BigRational {
        let mut acc = BigRational::zero();
        for (a, x) in u {
            for (b, y) in v {
                let p = self.pairing(*a, *b);
                if !p.is_zero() {
                    acc += x * y * p;
                }
            }
        }
        acc
    }

    /// `[Δξ, T] = Σ [ξ,A]⊗B + A⊗[ξ,B]`
    pub fn ad_delta(&self, xi: LieElem, t: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::new();
        for ((a, b), c) in t {
            for (x, d) in self.bracket(xi, *a) {
                push(&mut out, (x, *b), c * d);
            }
            for (x, d) in self.bracket(xi, *b) {
                push(&mut out, (*a, x), c * d);
            }
        }
        out
    }

    /// Dual basis element of `u` with respect to the pairing.
    pub fn dual(&self, u: LieElem) -> (LieElem, BigRational) {
        use LieElem::*;
        let n = self.n;
        match u {
            E(m) => (F(-m - n), BigRational::one()),
            F(m) => (E(-m - n), BigRational::one()),
            H(m) => (H(-m - n), rat(1, 2)),
            K => (D, BigRational::one()),
            D => (K, BigRational::one()),
        }
    }
}

fn shift(x: LieElem, m: i64) -> LieElem {
    match x {
        LieElem::E(_) => LieElem::E(m),
        LieElem::F(_) => LieElem::F(m),
        LieElem::H(_) => LieElem::H(m),
        other => other,
    }
}

/// Which isotropic splitting of `g` defines the cobracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// `g₊ = h(R) ⊕ e(K) ⊕ CD`
    Triple,
    /// `ḡ₊ = h(R) ⊕ f(K) ⊕ CD`
    BarTriple,
    /// `g_R = sl2(R) ⊕ CD` with complement `sl2(Λ) ⊕ CK`
    Pair,
}

impl Splitting {
    /// Whether `u` lies in the first (plus) subspace; `r_bound = −a−1`.
    pub fn in_plus(&self, u: LieElem, r_bound: i64) -> bool {
        use LieElem::*;
        match (self, u) {
            (_, D) => true,
            (_, K) => false,
            (_, H(m)) => m <= r_bound,
            (Splitting::Triple, E(_)) | (Splitting::BarTriple, F(_)) => true,
            (Splitting::Triple, F(_)) | (Splitting::BarTriple, E(_)) => false,
            (Splitting::Pair, E(m)) | (Splitting::Pair, F(m)) => m <= r_bound,
        }
    }
}

fn all_basis(range: i64) -> Vec<LieElem> {
    let mut v = vec![LieElem::K, LieElem::D];
    for m in -range..=range {
        v.extend([LieElem::E(m), LieElem::F(m), LieElem::H(m)]);
    }
    v
}

/// `Σ u ⊗ u*` over plus-basis elements with `|mode| ≤ range`.
pub fn canonical_element(alg: &LoopAlgebra, split: Splitting, r_bound: i64, range: i64) -> Tensor2 {
    let mut t = Tensor2::new();
    for u in all_basis(range) {
        if split.in_plus(u, r_bound) {
            let (d, c) = alg.dual(u);
            push(&mut t, (u, d), c);
        }
    }
    t
}

/// `f₁ = Σ_i e[e_i]⊗f[e^i]` and `f₂ = Σ_i e[e^i]⊗f[e_i]`, all `i` with modes in range.
pub fn f_parts(alg: &LoopAlgebra, r_bound: i64, range: i64) -> (Tensor2, Tensor2) {
    let mut f1 = Tensor2::new();
    let mut f2 = Tensor2::new();
    for m in -range..=range {
        let (d, c) = alg.dual(LieElem::E(m));
        if m <= r_bound {
            push(&mut f2, (LieElem::E(m), d), c);
        } else {
            push(&mut f1, (LieElem::E(m), d), c);
        }
    }
    (f1, f2)
}

fn flip(t: &Tensor2) -> Tensor2 {
    t.iter().map(|((a, b), c)| ((*b, *a), c.clone())).collect()
}

fn combine(parts: &[(&Tensor2, i64)]) -> Tensor2 {
    let mut out = Tensor2::new();
    for (t, s) in parts {
        let s = BigRational::from_integer((*s).into());
        for (k, c) in t.iter() {
            push(&mut out, *k, c * &s);
        }
    }
    out
}

fn project(t: &Tensor2, w: i64) -> Tensor2 {
    t.iter().filter(|((a, b), _)| a.in_window(w) && b.in_window(w)).map(|(k, c)| (*k, c.clone())).collect()
}

/// Checks that `δ(ξ) = [Δξ, r]` is the transpose of the bracket on the
/// complementary subspace: for `ξ` in the plus part, `δ(ξ)` has only
/// plus⊗plus components and `⟨δ(ξ), a⊗b⟩ = ⟨ξ,[a,b]⟩`; for `ξ` in the minus
/// part of a triple the same holds with `[b,a]`. Returns mismatch count.
fn duality_mismatches(alg: &LoopAlgebra, split: Splitting, xi: LieElem, delta: &Tensor2, r_bound: i64, w: i64) -> usize {
    let plus = split.in_plus(xi, r_bound);
    if !plus && split == Splitting::Pair {
        return 0;
    }
    let mut bad = delta.keys().filter(|(a, b)| split.in_plus(*a, r_bound) != plus || split.in_plus(*b, r_bound) != plus).count();
    let xv: Vector = [(xi, BigRational::one())].into_iter().collect();
    // complementary basis elements whose duals lie in the window
    let comp: Vec<LieElem> = all_basis(w + alg.n)
        .into_iter()
        .filter(|u| split.in_plus(*u, r_bound) != plus && alg.dual(*u).0.in_window(w))
        .collect();
    for a in &comp {
        for b in &comp {
            let (da, _) = alg.dual(*a);
            let (db, _) = alg.dual(*b);
            let coeff = delta.get(&(da, db)).cloned().unwrap_or_else(BigRational::zero);
            let lhs = coeff * alg.pairing(da, *a) * alg.pairing(db, *b);
            let br = if plus { alg.bracket(*a, *b) } else { alg.bracket(*b, *a) };
            let rhs = alg.pair_vec(&xv, &br);
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    bad
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct TwistReport {
    pub xi: LieElem,
    pub n: i64,
    pub window: i64,
    pub status: TwistStatus,
    /// Nonzero entries of `δ_R(ξ) − δ(ξ) − [f₁ − f₁^{21}, Δξ]`.
    pub twist_r: usize,
    /// Nonzero entries of `δ̄(ξ) − δ_R(ξ) − [f₂ − f₂^{21}, Δξ]`.
    pub twist_bar: usize,
    /// Same with `[f₁, Δξ]` and `[f₂, Δξ]` in place of the antisymmetrized twists.
    pub literal_r: usize,
    pub literal_bar: usize,
    pub duality_mismatches: usize,
    /// Nonzero entries of `[Δξ, r + r^{21}]`.
    pub invariance: usize,
    pub certificate: String,
    pub delta: Tensor2,
    pub delta_r: Tensor2,
    pub delta_bar: Tensor2,
}

/// Cobrackets of `ξ` on the mode window `|m| ≤ window`.
pub fn classical_twist_check(n: i64, window: i64, xi: LieElem) -> QcResult<TwistReport> {
    if n % 2 == 0 {
        return Err(QcError::Domain("the twist check needs odd N so that R and Λ split the modes".into()));
    }
    let basis = DualBasisWindow::new(n, 0)?;
    let r_bound = basis.r_bound();
    let alg = LoopAlgebra { n };
    let range = window + n;
    let k = xi.mode().unwrap_or(0);
    let inconclusive = k.abs() > window || window < n;
    let cob = |split| {
        let r = canonical_element(&alg, split, r_bound, range);
        project(&alg.ad_delta(xi, &r), window)
    };
    let delta = cob(Splitting::Triple);
    let delta_r = cob(Splitting::Pair);
    let delta_bar = cob(Splitting::BarTriple);
    let (f1, f2) = f_parts(&alg, r_bound, range);
    let tw = |f: &Tensor2| project(&alg.ad_delta(xi, f), window);
    // [f, Δξ] = −[Δξ, f]
    let t1 = combine(&[(&tw(&f1), -1), (&tw(&flip(&f1)), 1)]);
    let t2 = combine(&[(&tw(&f2), -1), (&tw(&flip(&f2)), 1)]);
    let twist_r = combine(&[(&delta_r, 1), (&delta, -1), (&t1, -1)]).len();
    let twist_bar = combine(&[(&delta_bar, 1), (&delta_r, -1), (&t2, -1)]).len();
    let literal_r = combine(&[(&delta_r, 1), (&delta, -1), (&tw(&f1), 1)]).len();
    let literal_bar = combine(&[(&delta_bar, 1), (&delta_r, -1), (&tw(&f2), 1)]).len();
    let duality_mismatches = [(Splitting::Triple, &delta), (Splitting::BarTriple, &delta_bar), (Splitting::Pair, &delta_r)]
        .par_iter()
        .map(|(s, d)| duality_mismatches(&alg, *s, xi, d, r_bound, window))
        .sum();
    let r = canonical_element(&alg, Splitting::Triple, r_bound, range);
    let casimir = combine(&[(&r, 1), (&flip(&r), 1)]);
    let invariance = project(&alg.ad_delta(xi, &casimir), window).len();
    let certificate = format!(
        "summands u⊗u* with |mode(u)| > {range} have both legs outside |m| ≤ {window}; each term of [Δξ, u⊗u*] keeps one leg, so they vanish after projection"
    );
    let ok = twist_r == 0 && twist_bar == 0 && duality_mismatches == 0 && invariance == 0;
    let status = if inconclusive {
        TwistStatus::Inconclusive
    } else if ok {
        TwistStatus::Pass
    } else {
        TwistStatus::Fail
    };
    Ok(TwistReport {
        xi,
        n,
        window,
        status,
        twist_r,
        twist_bar,
        literal_r,
        literal_bar,
        duality_mismatches,
        invariance,
        certificate,
        delta,
        delta_r,
        delta_bar,
    })
}
