use super::Series;
use crate::error::{QcError, QcResult};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// ħ-series whose coefficients are polynomials in free variables γ₀, γ₁, ...
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPolySeries {
    order: u32,
    terms: BTreeMap<(u32, Vec<u32>), BigRational>,
}

fn trim(mut d: Vec<u32>) -> Vec<u32> {
    while d.last() == Some(&0) {
        d.pop();
    }
    d
}

impl GammaPolySeries {
    pub fn zero(order: u32) -> Self {
        GammaPolySeries { order, terms: BTreeMap::new() }
    }

    pub fn monomial(order: u32, k: u32, deg: &[u32], c: BigRational) -> Self {
        let mut s = Self::zero(order);
        s.insert(k, deg.to_vec(), c);
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<(u32, Vec<u32>), BigRational> {
        &self.terms
    }

    fn insert(&mut self, k: u32, deg: Vec<u32>, c: BigRational) {
        if k >= self.order || c.is_zero() {
            return;
        }
        let key = (k, trim(deg));
        let v = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, k: u32, deg: &[u32]) -> BigRational {
        self.terms.get(&(k, trim(deg.to_vec()))).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        s.order = s.order.min(o.order);
        s.terms.retain(|(k, _), _| *k < s.order);
        for ((k, d), c) in &o.terms {
            s.insert(*k, d.clone(), c.clone());
        }
        s
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let mut s = Self::zero(self.order);
        for ((k, d), c) in &self.terms {
            s.insert(*k, d.clone(), c * r);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero(self.order.min(o.order));
        for ((ka, da), ca) in &self.terms {
            for ((kb, db), cb) in &o.terms {
                if ka + kb >= s.order {
                    continue;
                }
                let n = da.len().max(db.len());
                let d: Vec<u32> = (0..n)
                    .map(|i| da.get(i).copied().unwrap_or(0) + db.get(i).copied().unwrap_or(0))
                    .collect();
                s.insert(ka + kb, d, ca * cb);
            }
        }
        s
    }

    /// `D = Σ γ_{i+1} ∂/∂γ_i`.
    pub fn derivation(&self) -> Self {
        let mut s = Self::zero(self.order);
        for ((k, d), c) in &self.terms {
            for (i, &p) in d.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let mut nd = d.clone();
                nd[i] -= 1;
                if nd.len() <= i + 1 {
                    nd.resize(i + 2, 0);
                }
                nd[i + 1] += 1;
                s.insert(*k, nd, c * BigRational::from_integer(BigInt::from(p)));
            }
        }
        s
    }

    /// Coefficient of ħ^k as a list of (multidegree, coefficient).
    pub fn hbar_slice(&self, k: u32) -> Vec<(Vec<u32>, BigRational)> {
        self.terms.iter().filter(|((kk, _), _)| *kk == k).map(|((_, d), c)| (d.clone(), c.clone())).collect()
    }

    /// Largest γ index appearing in the series.
    pub fn max_gamma(&self) -> Option<usize> {
        self.terms.keys().filter(|(_, d)| !d.is_empty()).map(|(_, d)| d.len() - 1).max()
    }

    /// Evaluates at `γ_i := gammas[i]`, producing a series in the frame of
    /// the supplied images.
    pub fn substitute<C: Scalar>(&self, gammas: &[Series<C>], template: &Series<C>) -> QcResult<Series<C>> {
        let mut powers: HashMap<(usize, u32), Series<C>> = HashMap::new();
        let mut acc = template.zero_like();
        let one = Series::<C>::one(&template.vars(), template.order(), template.weight());
        for ((k, d), c) in &self.terms {
            let mut t = one.clone();
            for (i, &p) in d.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let g = gammas
                    .get(i)
                    .ok_or_else(|| QcError::Structural(format!("gamma_{i} not supplied")))?;
                let gp = match powers.get(&(i, p)) {
                    Some(x) => x.clone(),
                    None => {
                        let x = g.pow(p)?;
                        powers.insert((i, p), x.clone());
                        x
                    }
                };
                t = t.mul(&gp)?;
            }
            let t = t.hbar_shift(*k).scale_rat(c);
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
}

/// Solutions of `∂ψ/∂ħ = Dψ − 1 − γ₀ψ²`, `∂φ/∂ħ = Dφ − γ₀ψ` with
/// `φ(0) = ψ(0) = 0`, returned as `(φ, ψ)` modulo ħ^K.
pub fn solve_phi_psi(order: u32) -> (GammaPolySeries, GammaPolySeries) {
    let mut psi = GammaPolySeries::zero(order);
    let mut phi = GammaPolySeries::zero(order);
    let g0 = GammaPolySeries::monomial(order, 0, &[1], BigRational::one());
    // slices[k] holds the ħ^k coefficient as an order-1 polynomial
    let slice = |s: &GammaPolySeries, k: u32| -> GammaPolySeries {
        let mut out = GammaPolySeries::zero(1);
        for (d, c) in s.hbar_slice(k) {
            out.insert(0, d, c);
        }
        out
    };
    let g0s = slice(&g0, 0);
    for k in 0..order.saturating_sub(1) {
        let psi_k = slice(&psi, k);
        let phi_k = slice(&phi, k);
        let mut rhs_psi = psi_k.derivation();
        if k == 0 {
            rhs_psi.insert(0, vec![], -BigRational::one());
        }
        let mut sq = GammaPolySeries::zero(1);
        for i in 0..=k {
            sq = sq.add(&slice(&psi, i).mul(&slice(&psi, k - i)));
        }
        rhs_psi = rhs_psi.add(&g0s.mul(&sq).scale(&-BigRational::one()));
        let rhs_phi = phi_k.derivation().add(&g0s.mul(&psi_k).scale(&-BigRational::one()));
        let inv = BigRational::new(BigInt::one(), BigInt::from(k + 1));
        for ((_, d), c) in rhs_psi.terms {
            psi.insert(k + 1, d, c * &inv);
        }
        for ((_, d), c) in rhs_phi.terms {
            phi.insert(k + 1, d, c * &inv);
        }
    }
    (phi, psi)
}
