use super::{binom_rat, Series, INF};
use crate::error::{QcError, QcResult};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Geometric expansion of `c * v^num / (c1*vi + c2*vj)` for `|vj| < |vi|`.
///
/// The frame is `vars`; `vi` must come before `vj`. Coordinates strictly
/// between the two variables are windowed at `hi`, the rest are exact.
#[allow(clippy::too_many_arguments)]
pub fn region_expand_reciprocal<C: Scalar>(
    vars: &[&str],
    order: u32,
    wt: i64,
    num: &[i64],
    c: C,
    c1: C,
    vi: &str,
    c2: C,
    vj: &str,
    hi: i64,
) -> QcResult<Series<C>> {
    let ii = vars.iter().position(|v| *v == vi).ok_or_else(|| QcError::Structural(format!("unknown variable {vi}")))?;
    let jj = vars.iter().position(|v| *v == vj).ok_or_else(|| QcError::Structural(format!("unknown variable {vj}")))?;
    if ii >= jj {
        return Err(QcError::Structural(format!("{vi} does not dominate {vj}")));
    }
    let inv1 = c1.inv().ok_or_else(|| QcError::DegenerateRoot(format!("leading coefficient of {vi} is zero")))?;
    let ratio = c2.mul(&inv1).neg();
    let nw = vars.len() - 1;
    let mut base = num.to_vec();
    base[ii] -= 1;
    let probe = Series::<C>::zero(vars, order, wt);
    let f0 = probe.fvec(0, &base);
    let mut lo = f0.clone();
    let mut hiv = vec![INF; nw];
    for l in 1..=nw {
        if l > ii && l <= jj {
            hiv[l - 1] = hi;
        } else {
            // unaffected coordinate: every term shares the same value
            lo[l - 1] = f0[l - 1];
        }
    }
    let mut terms = Vec::new();
    let mut coef = c.mul(&inv1);
    let mut k = 0i64;
    loop {
        let mut e = base.clone();
        e[ii] -= k;
        e[jj] += k;
        let f = probe.fvec(0, &e);
        if (0..nw).any(|l| f[l] > hiv[l]) {
            break;
        }
        if coef.is_zero() {
            break;
        }
        terms.push(((0u32, e), coef.clone()));
        coef = coef.mul(&ratio);
        k += 1;
        if k > 1_000_000 {
            return Err(QcError::WindowUnderflow("expansion window is unbounded".into()));
        }
    }
    Series::from_terms(vars, order, wt, lo, hiv, terms)
}

/// `v_λ = (v^N + λNħ)^{1/N}` as a one-variable series.
#[derive(Clone, Debug, PartialEq)]
pub struct SubstitutionSeries<C: Scalar> {
    pub target: String,
    pub n: i64,
    pub lambda: BigRational,
    pub image: Series<C>,
}

pub fn nth_root_shift<C: Scalar>(var: &str, n: i64, lambda: &BigRational, order: u32) -> QcResult<SubstitutionSeries<C>> {
    if n < 1 {
        return Err(QcError::Domain("root order must be positive".into()));
    }
    if order < 1 {
        return Err(QcError::Domain("hbar order must be at least 1".into()));
    }
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
    let ln = lambda * BigRational::from_integer(BigInt::from(n));
    let mut terms = Vec::new();
    let mut lp = BigRational::one();
    for j in 0..order {
        if j > 0 {
            lp = &lp * &ln;
        }
        let b = binom_rat(&inv_n, j) * &lp;
        if !b.is_zero() {
            terms.push(((j, vec![1 - j as i64 * n]), C::from_rat(b)));
        }
    }
    let image = Series::from_terms(&[var], order, n, vec![], vec![], terms)?;
    Ok(SubstitutionSeries { target: var.to_string(), n, lambda: lambda.clone(), image })
}

impl<C: Scalar> SubstitutionSeries<C> {
    /// Applies the substitution to a series containing the target variable.
    pub fn apply(&self, s: &Series<C>) -> QcResult<Series<C>> {
        s.substitute_root_shift(&self.target, self.n, &self.lambda)
    }

    /// `v_λ` then `v -> v_μ`, which should equal `v_{λ+μ}`.
    pub fn compose(&self, mu: &BigRational) -> QcResult<Series<C>> {
        self.image.substitute_root_shift(&self.target, self.n, mu)
    }

    /// `(v_λ)^N`, which should be `v^N + λNħ`.
    pub fn nth_power(&self) -> QcResult<Series<C>> {
        self.image.pow(self.n as u32)
    }
}
