//! Truncated ħ-adic series with multivariate Laurent coefficients.
//!
//! A `Series` lives in a frame of ordered variables `v0, v1, ...` with
//! `|v0| > |v1| > ...`. Completeness of stored coefficients is tracked with
//! filtration coordinates `f_i = e_i + e_{i+1} + ... + wt*k` for `i >= 1`;
//! every term with `f_i <= hi_i` for all `i` is stored, and every term of the
//! underlying infinite series satisfies `f_i >= lo_i`. The dominant variable
//! carries no window: each filtration slot holds finitely many terms.

mod expand;
mod gamma;
mod text;

pub use expand::{nth_root_shift, region_expand_reciprocal, SubstitutionSeries};
pub use gamma::{solve_phi_psi, GammaPolySeries};

use crate::error::{QcError, QcResult};
use crate::scalar::{GaussRat, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

pub const INF: i64 = i64::MAX;

pub type Key = (u32, Vec<i64>);

/// Series over Gaussian rationals: the default coefficient field.
pub type RegionSeries = Series<GaussRat>;

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C: Scalar> {
    vars: Vec<String>,
    order: u32,
    wt: i64,
    lo: Vec<i64>,
    hi: Vec<i64>,
    terms: BTreeMap<Key, C>,
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b)
    }
}

/// Generalized binomial coefficient binom(r, j).
pub fn binom_rat(r: &BigRational, j: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..j {
        acc = acc * (r - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

fn factorial(j: u32) -> BigRational {
    let mut acc = BigInt::one();
    for i in 2..=j {
        acc *= i;
    }
    BigRational::from_integer(acc)
}

impl<C: Scalar> Series<C> {
    // ------------------------------------------------------------------
    // construction

    /// The zero series, exact.
    pub fn zero(vars: &[&str], order: u32, wt: i64) -> Self {
        assert!(order >= 1, "hbar order must be at least 1");
        assert!(!vars.is_empty());
        let nw = vars.len() - 1;
        Series {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            order,
            wt,
            lo: vec![INF; nw],
            hi: vec![INF; nw],
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_like(&self) -> Self {
        Series { terms: BTreeMap::new(), lo: vec![INF; self.nwin()], hi: vec![INF; self.nwin()], ..self.clone_meta() }
    }

    fn clone_meta(&self) -> Self {
        Series {
            vars: self.vars.clone(),
            order: self.order,
            wt: self.wt,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `c * hbar^k * prod v_i^{e_i}`, exact.
    pub fn monomial(vars: &[&str], order: u32, wt: i64, k: u32, exps: &[i64], c: C) -> Self {
        let mut s = Self::zero(vars, order, wt);
        assert_eq!(exps.len(), vars.len());
        if k < order && !c.is_zero() {
            s.terms.insert((k, exps.to_vec()), c);
        }
        s.fix_exact_lo();
        s
    }

    pub fn constant(vars: &[&str], order: u32, wt: i64, c: C) -> Self {
        Self::monomial(vars, order, wt, 0, &vec![0; vars.len()], c)
    }

    pub fn one(vars: &[&str], order: u32, wt: i64) -> Self {
        Self::constant(vars, order, wt, C::one())
    }

    /// The frame variable `name` as a series.
    pub fn var(vars: &[&str], order: u32, wt: i64, name: &str) -> QcResult<Self> {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| QcError::Structural(format!("unknown variable {name}")))?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Ok(Self::monomial(vars, order, wt, 0, &e, C::one()))
    }

    /// Builds a series from raw terms with explicit bounds. `lo` must be a
    /// true lower bound of the underlying series and every term with all
    /// `f_i <= hi_i` must be present.
    pub fn from_terms(
        vars: &[&str],
        order: u32,
        wt: i64,
        lo: Vec<i64>,
        hi: Vec<i64>,
        terms: impl IntoIterator<Item = (Key, C)>,
    ) -> QcResult<Self> {
        let mut s = Self::zero(vars, order, wt);
        if lo.len() != s.nwin() || hi.len() != s.nwin() {
            return Err(QcError::Structural("window length does not match frame".into()));
        }
        s.lo = lo;
        s.hi = hi;
        for ((k, e), c) in terms {
            if e.len() != vars.len() {
                return Err(QcError::Structural("exponent vector length mismatch".into()));
            }
            s.accumulate(k, e, c);
        }
        s.normalize();
        Ok(s)
    }

    // ------------------------------------------------------------------
    // accessors

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn weight(&self) -> i64 {
        self.wt
    }
    pub fn lo(&self) -> &[i64] {
        &self.lo
    }
    pub fn hi(&self) -> &[i64] {
        &self.hi
    }
    pub fn terms(&self) -> &BTreeMap<Key, C> {
        &self.terms
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    /// True when no coefficient is stored: the series vanishes on its window.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_exact(&self) -> bool {
        self.hi.iter().all(|h| *h == INF)
    }
    fn nwin(&self) -> usize {
        self.vars.len() - 1
    }
    pub fn var_index(&self, name: &str) -> QcResult<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| QcError::Structural(format!("unknown variable {name}")))
    }

    pub fn coeff(&self, k: u32, exps: &[i64]) -> C {
        self.terms.get(&(k, exps.to_vec())).cloned().unwrap_or_else(C::zero)
    }

    /// Whether the coefficient at `(k, exps)` is certified by the window.
    pub fn certifies(&self, k: u32, exps: &[i64]) -> bool {
        k < self.order && self.fvec(k, exps).iter().zip(&self.hi).all(|(f, h)| f <= h)
    }

    /// Filtration coordinates of a term.
    pub fn fvec(&self, k: u32, exps: &[i64]) -> Vec<i64> {
        let n = self.vars.len();
        let mut out = vec![0i64; n - 1];
        let mut acc = self.wt * k as i64;
        for i in (1..n).rev() {
            acc += exps[i];
            out[i - 1] = acc;
        }
        out
    }

    fn accumulate(&mut self, k: u32, e: Vec<i64>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(k, e.clone())) {
            Some(v) => {
                *v = v.add(&c);
            }
            None => {
                self.terms.insert((k, e), c);
            }
        }
    }

    fn fix_exact_lo(&mut self) {
        if self.is_exact() {
            let mut lo = vec![INF; self.nwin()];
            for (k, e) in self.terms.keys() {
                for (l, f) in lo.iter_mut().zip(self.fvec(*k, e)) {
                    *l = (*l).min(f);
                }
            }
            self.lo = lo;
        }
    }

    /// Drops zero coefficients, orders at or above K, and terms outside the
    /// window; tightens `lo` where that is provably safe.
    fn normalize(&mut self) {
        let order = self.order;
        let hi = self.hi.clone();
        let wt = self.wt;
        let n = self.vars.len();
        self.terms.retain(|(k, e), c| {
            if c.is_zero() || *k >= order {
                return false;
            }
            let mut acc = wt * *k as i64;
            for i in (1..n).rev() {
                acc += e[i];
                if acc > hi[i - 1] {
                    return false;
                }
            }
            true
        });
        if self.is_exact() {
            self.fix_exact_lo();
        } else if self.nwin() == 1 {
            // single coordinate: anything unstored sits above hi
            let mut m = self.hi[0].saturating_add(1);
            for (k, e) in self.terms.keys() {
                m = m.min(self.fvec(*k, e)[0]);
            }
            self.lo[0] = self.lo[0].max(m);
        }
    }

    fn check_compat(&self, o: &Self) -> QcResult<()> {
        if self.vars != o.vars {
            return Err(QcError::Structural(format!(
                "variable order mismatch: {:?} vs {:?}",
                self.vars, o.vars
            )));
        }
        if self.wt != o.wt {
            return Err(QcError::Structural(format!("weight mismatch: {} vs {}", self.wt, o.wt)));
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // window management

    /// Lowers the window to `hi` (coordinatewise minimum with the current one).
    pub fn restrict(&self, hi: &[i64]) -> QcResult<Self> {
        if hi.len() != self.nwin() {
            return Err(QcError::Structural("window length does not match frame".into()));
        }
        let mut s = self.clone();
        for (h, n) in s.hi.iter_mut().zip(hi) {
            *h = (*h).min(*n);
        }
        s.normalize();
        Ok(s)
    }

    /// Restricts every windowed coordinate to the same bound.
    pub fn restrict_all(&self, h: i64) -> QcResult<Self> {
        self.restrict(&vec![h; self.nwin()])
    }

    pub fn truncate_order(&self, order: u32) -> Self {
        let mut s = self.clone();
        s.order = s.order.min(order);
        s.normalize();
        s
    }

    /// Changes the filtration weight, shrinking the window as needed.
    pub fn reweight(&self, wt: i64) -> Self {
        if wt == self.wt {
            return self.clone();
        }
        let d = (wt - self.wt) * (self.order as i64 - 1);
        let shift = d.min(0);
        let mut s = self.clone();
        s.wt = wt;
        for h in s.hi.iter_mut() {
            *h = sat_add(*h, shift);
        }
        for l in s.lo.iter_mut() {
            *l = sat_add(*l, shift);
        }
        s.normalize();
        s
    }

    /// Declares the series exact after checking that every stored term has
    /// last-variable exponent at most `emax` and that the window reaches all
    /// such terms. Two-variable frames only.
    pub fn promote_exact_below(&self, emax: i64) -> QcResult<Self> {
        if self.nwin() != 1 {
            return Err(QcError::Structural("promotion needs a two-variable frame".into()));
        }
        if self.is_exact() {
            return Ok(self.clone());
        }
        let need = emax + self.wt.max(0) * (self.order as i64 - 1);
        if self.hi[0] < need {
            return Err(QcError::WindowUnderflow(format!(
                "window {} does not reach {} needed for promotion",
                self.hi[0], need
            )));
        }
        for (k, e) in self.terms.keys() {
            if e[1] > emax {
                return Err(QcError::IdentityViolation(format!(
                    "term hbar^{} exps {:?} exceeds bound {}",
                    k, e, emax
                )));
            }
        }
        let mut s = self.clone();
        s.hi = vec![INF];
        s.fix_exact_lo();
        Ok(s)
    }

    // ------------------------------------------------------------------
    // ring operations

    pub fn add(&self, o: &Self) -> QcResult<Self> {
        self.check_compat(o)?;
        let mut s = self.clone_meta();
        s.order = self.order.min(o.order);
        for i in 0..self.nwin() {
            s.lo[i] = self.lo[i].min(o.lo[i]);
            s.hi[i] = self.hi[i].min(o.hi[i]);
        }
        s.terms = self.terms.clone();
        for ((k, e), c) in &o.terms {
            s.accumulate(*k, e.clone(), c.clone());
        }
        s.normalize();
        Ok(s)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.neg();
        }
        s
    }

    pub fn sub(&self, o: &Self) -> QcResult<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = self.clone();
        if c.is_zero() {
            s.terms.clear();
        } else {
            for v in s.terms.values_mut() {
                *v = v.mul(c);
            }
        }
        s
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&C::from_rat(r.clone()))
    }

    /// Multiplies by `c * hbar^k * prod v_i^{e_i}`.
    pub fn mul_monomial(&self, k: u32, exps: &[i64], c: &C) -> Self {
        let shift = self.fvec(k, exps);
        let mut s = self.clone_meta();
        for i in 0..self.nwin() {
            s.lo[i] = sat_add(self.lo[i], shift[i]);
            s.hi[i] = sat_add(self.hi[i], shift[i]);
        }
        if !c.is_zero() {
            for ((kk, e), v) in &self.terms {
                let ne: Vec<i64> = e.iter().zip(exps).map(|(a, b)| a + b).collect();
                s.terms.insert((kk + k, ne), v.mul(c));
            }
        }
        s.normalize();
        s
    }

    pub fn mul(&self, o: &Self) -> QcResult<Self> {
        self.check_compat(o)?;
        let nw = self.nwin();
        let mut s = self.clone_meta();
        s.order = self.order.min(o.order);
        for i in 0..nw {
            s.lo[i] = sat_add(self.lo[i], o.lo[i]);
            s.hi[i] = sat_add(self.hi[i], o.lo[i]).min(sat_add(o.hi[i], self.lo[i]));
        }
        let order = s.order;
        let hi = s.hi.clone();
        let prep = |x: &Self| -> Vec<(u32, Vec<i64>, Vec<i64>, C)> {
            let mut v: Vec<_> = x
                .terms
                .iter()
                .map(|((k, e), c)| (*k, e.clone(), x.fvec(*k, e), c.clone()))
                .collect();
            if nw > 0 {
                v.sort_by_key(|t| t.2[0]);
            }
            v
        };
        let a = prep(self);
        let b = prep(o);
        let mut acc: HashMap<Key, C> = HashMap::new();
        for (ka, ea, fa, ca) in &a {
            for (kb, eb, fb, cb) in &b {
                if nw > 0 && sat_add(fa[0], fb[0]) > hi[0] {
                    break;
                }
                if ka + kb >= order {
                    continue;
                }
                if (1..nw).any(|i| sat_add(fa[i], fb[i]) > hi[i]) {
                    continue;
                }
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let p = ca.mul(cb);
                match acc.get_mut(&(ka + kb, e.clone())) {
                    Some(v) => *v = v.add(&p),
                    None => {
                        acc.insert((ka + kb, e), p);
                    }
                }
            }
        }
        s.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        s.normalize();
        Ok(s)
    }

    pub fn pow(&self, n: u32) -> QcResult<Self> {
        let mut acc = Self::one(&self.vars(), self.order, self.wt);
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with a dominating unit term at ħ⁰.
    pub fn invert_unit(&self) -> QcResult<Self> {
        let zero_terms: Vec<(&Vec<i64>, &C)> =
            self.terms.iter().filter(|((k, _), _)| *k == 0).map(|((_, e), c)| (e, c)).collect();
        if zero_terms.is_empty() {
            return Err(QcError::NotInvertible("no hbar^0 part".into()));
        }
        let fv: Vec<Vec<i64>> = zero_terms.iter().map(|(e, _)| self.fvec(0, e)).collect();
        let lead = (0..zero_terms.len()).find(|&i| {
            (0..zero_terms.len()).all(|j| {
                j == i || {
                    let le = fv[i].iter().zip(&fv[j]).all(|(a, b)| a <= b);
                    le && fv[i] != fv[j]
                }
            })
        });
        let lead = lead.ok_or_else(|| {
            QcError::NotInvertible("no unique leading term dominating the hbar^0 part".into())
        })?;
        let (le, lc) = zero_terms[lead];
        let inv_c = lc
            .inv()
            .ok_or_else(|| QcError::NotInvertible("leading coefficient is zero".into()))?;
        let neg_e: Vec<i64> = le.iter().map(|x| -x).collect();
        let unit = self.mul_monomial(0, &neg_e, &inv_c);
        let one = Self::one(&self.vars(), self.order, self.wt);
        let x = unit.sub(&one)?;
        if x.lo.iter().any(|l| *l < 0) {
            return Err(QcError::NotInvertible(format!(
                "correction has negative filtration bound {:?}",
                x.lo
            )));
        }
        for (k, e) in x.terms.keys() {
            if *k == 0 && x.fvec(0, e).iter().all(|f| *f <= 0) {
                return Err(QcError::NotInvertible(
                    "hbar^0 correction does not decay in any windowed variable".into(),
                ));
            }
        }
        let mx = x.neg();
        let mut sum = one.clone();
        let mut p = one;
        let mut steps = 0usize;
        loop {
            p = p.mul(&mx)?.restrict(&x.hi)?;
            if p.is_zero() {
                break;
            }
            sum = sum.add(&p)?;
            steps += 1;
            if steps > 20_000 {
                return Err(QcError::NotInvertible(
                    "geometric series does not terminate: restrict window first".into(),
                ));
            }
        }
        // the truncated sum is exact only up to the window of x
        let mut sum = sum.restrict(&x.hi.clone())?;
        for (l, xl) in sum.lo.iter_mut().zip(&x.lo) {
            *l = (*l).min(0).min(*xl);
        }
        Ok(sum.mul_monomial(0, &neg_e, &inv_c))
    }

    fn has_hbar0(&self) -> bool {
        self.terms.keys().any(|(k, _)| *k == 0)
    }

    pub fn exp(&self) -> QcResult<Self> {
        if self.has_hbar0() {
            return Err(QcError::Domain("exp needs a series vanishing at hbar^0".into()));
        }
        let mut sum = Self::one(&self.vars(), self.order, self.wt);
        let mut p = sum.clone();
        for j in 1..self.order {
            p = p.mul(self)?.scale_rat(&(BigRational::one() / BigRational::from_integer(BigInt::from(j))));
            sum = sum.add(&p)?;
        }
        Ok(sum)
    }

    pub fn log(&self) -> QcResult<Self> {
        let one = Self::one(&self.vars(), self.order, self.wt);
        let x = self.sub(&one)?;
        if x.has_hbar0() {
            return Err(QcError::Domain("log needs a series equal to 1 at hbar^0".into()));
        }
        let mut sum = self.zero_like();
        sum.lo = x.lo.clone();
        sum.hi = x.hi.clone();
        let mut p = one;
        for j in 1..self.order {
            p = p.mul(&x)?;
            let c = BigRational::new(BigInt::from(if j % 2 == 1 { 1 } else { -1 }), BigInt::from(j));
            sum = sum.add(&p.scale_rat(&c))?;
        }
        Ok(sum)
    }

    // ------------------------------------------------------------------
    // derivations and substitutions

    /// `v^{1-N} d/dv` on the variable `name`.
    pub fn derive(&self, name: &str, n: i64) -> QcResult<Self> {
        let idx = self.var_index(name)?;
        let mut s = self.clone_meta();
        for i in 0..self.nwin() {
            if i < idx {
                s.lo[i] = sat_add(s.lo[i], -n);
                s.hi[i] = sat_add(s.hi[i], -n);
            }
        }
        for ((k, e), c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= n;
            s.terms.insert((*k, ne), c.mul(&C::from_i64(e[idx])));
        }
        s.normalize();
        Ok(s)
    }

    /// `d/dħ`; the result is known modulo ħ^{K-1}.
    pub fn hbar_derive(&self) -> QcResult<Self> {
        if self.order < 2 {
            return Err(QcError::Domain("hbar derivative needs K >= 2".into()));
        }
        let mut s = self.clone_meta();
        s.order -= 1;
        for i in 0..self.nwin() {
            s.lo[i] = sat_add(s.lo[i], -self.wt);
            s.hi[i] = sat_add(s.hi[i], -self.wt);
        }
        for ((k, e), c) in &self.terms {
            if *k == 0 {
                continue;
            }
            s.terms.insert((k - 1, e.clone()), c.mul(&C::from_i64(*k as i64)));
        }
        s.normalize();
        Ok(s)
    }

    /// `∫_0^ħ`; the result is known modulo ħ^{K+1}.
    pub fn hbar_integrate(&self) -> Self {
        let mut s = self.clone_meta();
        s.order += 1;
        for i in 0..self.nwin() {
            s.lo[i] = sat_add(s.lo[i], self.wt);
            s.hi[i] = sat_add(s.hi[i], self.wt);
        }
        for ((k, e), c) in &self.terms {
            let r = BigRational::new(BigInt::one(), BigInt::from(k + 1));
            s.terms.insert((k + 1, e.clone()), c.scale_rat(&r));
        }
        s.normalize();
        s
    }

    /// Multiplies by ħ^j.
    pub fn hbar_shift(&self, j: u32) -> Self {
        self.mul_monomial(j, &vec![0; self.vars.len()], &C::one())
    }

    /// Substitutes `v -> v_λ = (v^N + λNħ)^{1/N}` for the variable `name`.
    pub fn substitute_root_shift(&self, name: &str, n: i64, lambda: &BigRational) -> QcResult<Self> {
        let idx = self.var_index(name)?;
        let k_max = self.order as i64 - 1;
        let mut s = self.clone_meta();
        for i in 0..self.nwin() {
            let d = if i < idx { self.wt - n } else { self.wt };
            let shift = (d * k_max).min(0);
            s.lo[i] = sat_add(s.lo[i], shift);
            s.hi[i] = sat_add(s.hi[i], shift);
        }
        let ln = lambda * BigRational::from_integer(BigInt::from(n));
        let nr = BigRational::from_integer(BigInt::from(n));
        let mut acc: HashMap<Key, C> = HashMap::new();
        for ((k, e), c) in &self.terms {
            let p = BigRational::from_integer(BigInt::from(e[idx])) / &nr;
            let mut lam_pow = BigRational::one();
            for j in 0..(self.order - k) {
                if j > 0 {
                    lam_pow = &lam_pow * &ln;
                    if lam_pow.is_zero() {
                        break;
                    }
                }
                let b = binom_rat(&p, j);
                if b.is_zero() {
                    break;
                }
                let mut ne = e.clone();
                ne[idx] -= j as i64 * n;
                let term = c.scale_rat(&(b * &lam_pow));
                let key = (k + j, ne);
                match acc.get_mut(&key) {
                    Some(v) => *v = v.add(&term),
                    None => {
                        acc.insert(key, term);
                    }
                }
            }
        }
        s.terms = acc.into_iter().collect();
        s.normalize();
        Ok(s)
    }

    /// Substitutes `from := into_λ` and drops `from` from the frame.
    /// Exact series only.
    pub fn collapse(&self, from: &str, into: &str, n: i64, lambda: &BigRational) -> QcResult<Self> {
        if !self.is_exact() {
            return Err(QcError::Structural("collapse needs an exact series".into()));
        }
        let fi = self.var_index(from)?;
        let ii = self.var_index(into)?;
        let new_vars: Vec<&str> = self.vars().into_iter().filter(|v| *v != from).collect();
        let mut s = Series::zero(&new_vars, self.order, self.wt);
        let ln = lambda * BigRational::from_integer(BigInt::from(n));
        let nr = BigRational::from_integer(BigInt::from(n));
        for ((k, e), c) in &self.terms {
            let p = BigRational::from_integer(BigInt::from(e[fi])) / &nr;
            let mut lam_pow = BigRational::one();
            for j in 0..(self.order - k) {
                if j > 0 {
                    lam_pow = &lam_pow * &ln;
                    if lam_pow.is_zero() {
                        break;
                    }
                }
                let b = binom_rat(&p, j);
                if b.is_zero() {
                    break;
                }
                let mut ne = e.clone();
                ne[ii] += e[fi] - j as i64 * n;
                ne.remove(fi);
                s.accumulate(k + j, ne, c.scale_rat(&(b * &lam_pow)));
            }
        }
        s.normalize();
        Ok(s)
    }

    /// Reorders variables by `perm` (new position i takes old variable
    /// `perm[i]`) keeping the names in frame order. Exact series only.
    pub fn permute_exps(&self, perm: &[usize]) -> QcResult<Self> {
        if !self.is_exact() {
            return Err(QcError::Structural("leg permutation needs an exact series".into()));
        }
        let mut s = self.zero_like();
        for ((k, e), c) in &self.terms {
            let ne: Vec<i64> = perm.iter().map(|&p| e[p]).collect();
            s.accumulate(*k, ne, c.clone());
        }
        s.normalize();
        Ok(s)
    }

    /// `f(z,w) -> f(w,z)` in a two-variable frame. Exact series only.
    pub fn swap_legs(&self) -> QcResult<Self> {
        if self.vars.len() != 2 {
            return Err(QcError::Structural("swap needs two variables".into()));
        }
        self.permute_exps(&[1, 0])
    }

    /// Renames the frame variables without touching exponents.
    pub fn rename(&self, names: &[&str]) -> QcResult<Self> {
        if names.len() != self.vars.len() {
            return Err(QcError::Structural("rename length mismatch".into()));
        }
        let mut s = self.clone();
        s.vars = names.iter().map(|x| x.to_string()).collect();
        Ok(s)
    }

    /// Places an exact series into a larger frame, matching variables by name.
    pub fn embed(&self, frame: &[&str]) -> QcResult<Self> {
        if !self.is_exact() {
            return Err(QcError::Structural("embedding needs an exact series".into()));
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| {
                frame
                    .iter()
                    .position(|f| f == v)
                    .ok_or_else(|| QcError::Structural(format!("variable {v} not in target frame")))
            })
            .collect::<QcResult<_>>()?;
        let mut s = Series::zero(frame, self.order, self.wt);
        for ((k, e), c) in &self.terms {
            let mut ne = vec![0i64; frame.len()];
            for (i, &m) in map.iter().enumerate() {
                ne[m] = e[i];
            }
            s.accumulate(*k, ne, c.clone());
        }
        s.normalize();
        Ok(s)
    }

    /// `e -> factor * e` on every exponent, with a new filtration weight.
    /// Exact series only.
    pub fn scale_exponents(&self, factor: i64, wt: i64) -> QcResult<Self> {
        if !self.is_exact() {
            return Err(QcError::Structural("exponent scaling needs an exact series".into()));
        }
        let mut s = Series::zero(&self.vars(), self.order, wt);
        for ((k, e), c) in &self.terms {
            s.accumulate(*k, e.iter().map(|x| x * factor).collect(), c.clone());
        }
        s.normalize();
        Ok(s)
    }

    /// `v -> α v`.
    pub fn scale_var(&self, name: &str, alpha: &C) -> QcResult<Self> {
        let idx = self.var_index(name)?;
        let inv = alpha.inv().ok_or_else(|| QcError::Domain("zero scale".into()))?;
        let mut s = self.clone();
        for ((_, e), c) in s.terms.iter_mut() {
            let p = e[idx];
            let base = if p >= 0 { alpha } else { &inv };
            let mut f = C::one();
            for _ in 0..p.unsigned_abs() {
                f = f.mul(base);
            }
            *c = c.mul(&f);
        }
        Ok(s)
    }

    /// `ħ -> β ħ`.
    pub fn scale_hbar(&self, beta: &C) -> Self {
        let mut s = self.clone();
        for ((k, _), c) in s.terms.iter_mut() {
            let mut f = C::one();
            for _ in 0..*k {
                f = f.mul(beta);
            }
            *c = c.mul(&f);
        }
        s.normalize();
        s
    }

    /// Keeps only terms satisfying `pred(k, exps)`.
    pub fn filter(&self, pred: impl Fn(u32, &[i64]) -> bool) -> Self {
        let mut s = self.clone();
        s.terms.retain(|(k, e), _| pred(*k, e));
        s
    }

    /// Coefficient of `name^{e}` as a series in the remaining variables.
    /// Exact series only.
    pub fn coefficient_slice(&self, name: &str, e: i64) -> QcResult<Self> {
        if !self.is_exact() {
            return Err(QcError::Structural("slice needs an exact series".into()));
        }
        let idx = self.var_index(name)?;
        let new_vars: Vec<&str> = self.vars().into_iter().filter(|v| *v != name).collect();
        let mut s = Series::zero(&new_vars, self.order, self.wt);
        for ((k, ex), c) in &self.terms {
            if ex[idx] == e {
                let mut ne = ex.clone();
                ne.remove(idx);
                s.accumulate(*k, ne, c.clone());
            }
        }
        s.normalize();
        Ok(s)
    }

    /// Coefficient of ħ^k as an exact-K=1 series.
    pub fn hbar_coefficient(&self, k: u32) -> Self {
        let mut s = self.clone_meta();
        s.order = 1;
        for ((kk, e), c) in &self.terms {
            if *kk == k {
                s.terms.insert((0, e.clone()), c.clone());
            }
        }
        for i in 0..self.nwin() {
            let d = self.wt * k as i64;
            s.lo[i] = sat_add(self.lo[i], -d);
            s.hi[i] = sat_add(self.hi[i], -d);
        }
        s.normalize();
        s
    }

    /// Maps coefficients into another field.
    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut s = Series::<D> {
            vars: self.vars.clone(),
            order: self.order,
            wt: self.wt,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            terms: BTreeMap::new(),
        };
        for (key, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                s.terms.insert(key.clone(), d);
            }
        }
        s
    }

    /// Compares on the intersection of both windows.
    pub fn agrees_with(&self, o: &Self) -> QcResult<bool> {
        let d = self.sub(o)?;
        Ok(d.is_zero())
    }

    /// Largest |f| over stored terms; handy for reports.
    pub fn first_term(&self) -> Option<(&Key, &C)> {
        self.terms.iter().next()
    }
}

impl<C: Scalar> Series<C> {
    /// Applies `Σ_{j≥1} ħ^j ∂^{j-1}/j!` on the given leg, i.e. `(q^∂ - 1)/∂`.
    pub fn shift_quotient(&self, name: &str, n: i64) -> QcResult<Self> {
        let mut acc = self.zero_like();
        acc.lo = self.lo.clone();
        acc.hi = self.hi.clone();
        let mut d = self.clone();
        for j in 1..self.order {
            let t = d.hbar_shift(j).scale_rat(&(BigRational::one() / factorial(j)));
            acc = acc.add(&t)?;
            d = d.derive(name, n)?;
        }
        Ok(acc)
    }

    /// `(q^∂ - q^{-∂})/∂ = Σ_{j odd} 2ħ^j ∂^{j-1}/j!` on a leg.
    pub fn sinh_quotient(&self, name: &str, n: i64) -> QcResult<Self> {
        let mut acc = self.zero_like();
        acc.lo = self.lo.clone();
        acc.hi = self.hi.clone();
        let mut d = self.clone();
        let two = BigRational::from_integer(BigInt::from(2));
        for j in 1..self.order {
            if j % 2 == 1 {
                let t = d.hbar_shift(j).scale_rat(&(&two / factorial(j)));
                acc = acc.add(&t)?;
            }
            d = d.derive(name, n)?;
        }
        Ok(acc)
    }

    /// `T = sh(ħ∂)/(ħ∂) = Σ_{j even} (ħ∂)^j/(j+1)!` on a leg.
    pub fn t_operator(&self, name: &str, n: i64) -> QcResult<Self> {
        let mut acc = self.clone();
        let mut d = self.clone();
        for j in 1..self.order {
            d = d.derive(name, n)?;
            if j % 2 == 0 {
                let t = d.hbar_shift(j).scale_rat(&(BigRational::one() / factorial(j + 1)));
                acc = acc.add(&t)?;
            }
        }
        Ok(acc)
    }

    /// Reinterprets an exact ħ-independent series at another truncation order.
    pub fn as_hbar_constant(&self, order: u32) -> QcResult<Self> {
        if !self.is_exact() || self.terms.keys().any(|(k, _)| *k > 0) {
            return Err(QcError::Structural("not an exact hbar-independent series".into()));
        }
        let mut s = self.clone();
        s.order = order;
        Ok(s)
    }

    /// `q^{λ∂}` on a leg: Taylor series `Σ (λħ)^j ∂^j / j!`.
    pub fn shift_exp(&self, name: &str, n: i64, lambda: &BigRational) -> QcResult<Self> {
        let mut acc = self.clone();
        let mut d = self.clone();
        let mut lp = BigRational::one();
        for j in 1..self.order {
            d = d.derive(name, n)?;
            lp = &lp * lambda;
            let t = d.hbar_shift(j).scale_rat(&(&lp / factorial(j)));
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
}
