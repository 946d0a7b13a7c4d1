//! Matrices whose entries are ħ-polynomials truncated at a fixed order.

use crate::error::{QcError, QcResult};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Coefficients of ħ^0, ħ^1, ... up to the truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoly(pub Vec<BigRational>);

impl HPoly {
    pub fn zero(order: usize) -> Self {
        HPoly(vec![BigRational::zero(); order])
    }
    pub fn constant(order: usize, c: BigRational) -> Self {
        let mut p = Self::zero(order);
        if order > 0 {
            p.0[0] = c;
        }
        p
    }
    pub fn order(&self) -> usize {
        self.0.len()
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
    pub fn coeff(&self, k: usize) -> BigRational {
        self.0.get(k).cloned().unwrap_or_else(BigRational::zero)
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        HPoly((0..n).map(|i| &self.0[i] + &o.0[i]).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        HPoly((0..n).map(|i| &self.0[i] - &o.0[i]).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..(n - i) {
                out[i + j] += &self.0[i] * &o.0[j];
            }
        }
        HPoly(out)
    }
    pub fn scale(&self, r: &BigRational) -> Self {
        HPoly(self.0.iter().map(|c| c * r).collect())
    }
    /// Divides by ħ, dropping the top order. The ħ^0 coefficient must vanish.
    pub fn div_hbar(&self) -> QcResult<Self> {
        if !self.coeff(0).is_zero() {
            return Err(QcError::Domain("entry not divisible by hbar".into()));
        }
        Ok(HPoly(self.0.iter().skip(1).cloned().collect()))
    }
    pub fn truncate(&self, order: usize) -> Self {
        HPoly(self.0.iter().take(order).cloned().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    pub rows: usize,
    pub cols: usize,
    pub order: usize,
    pub data: Vec<Vec<HPoly>>,
}

impl HMatrix {
    pub fn zero(rows: usize, cols: usize, order: usize) -> Self {
        HMatrix { rows, cols, order, data: vec![vec![HPoly::zero(order); cols]; rows] }
    }
    pub fn identity(n: usize, order: usize) -> Self {
        let mut m = Self::zero(n, n, order);
        for i in 0..n {
            m.data[i][i] = HPoly::constant(order, BigRational::one());
        }
        m
    }
    pub fn get(&self, i: usize, j: usize) -> &HPoly {
        &self.data[i][j]
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(|p| p.is_zero())
    }
    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i][j] = self.data[i][j].add(&o.data[i][j]);
            }
        }
        m.order = self.order.min(o.order);
        m
    }
    pub fn sub(&self, o: &Self) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i][j] = self.data[i][j].sub(&o.data[i][j]);
            }
        }
        m.order = self.order.min(o.order);
        m
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let order = self.order.min(o.order);
        let mut m = Self::zero(self.rows, o.cols, order);
        for i in 0..self.rows {
            for l in 0..self.cols {
                if self.data[i][l].is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let p = self.data[i][l].mul(&o.data[l][j]);
                    m.data[i][j] = m.data[i][j].add(&p);
                }
            }
        }
        m
    }
    /// The matrix of ħ^k coefficients.
    pub fn slice(&self, k: usize) -> Vec<Vec<BigRational>> {
        self.data.iter().map(|r| r.iter().map(|p| p.coeff(k)).collect()).collect()
    }
    pub fn map(&self, f: impl Fn(&HPoly) -> HPoly) -> Self {
        let data: Vec<Vec<HPoly>> = self.data.iter().map(|r| r.iter().map(&f).collect()).collect();
        let order = data.first().and_then(|r| r.first()).map(|p| p.order()).unwrap_or(self.order);
        HMatrix { rows: self.rows, cols: self.cols, order, data }
    }
    fn from_const(c: &[Vec<BigRational>], order: usize) -> Self {
        let rows = c.len();
        let cols = c.first().map(|r| r.len()).unwrap_or(0);
        let mut m = Self::zero(rows, cols, order);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i][j] = HPoly::constant(order, c[i][j].clone());
            }
        }
        m
    }

    /// Inverse as an ħ-adic series; the ħ^0 part must be invertible.
    pub fn inverse(&self) -> QcResult<Self> {
        assert_eq!(self.rows, self.cols);
        let c0 = self.slice(0);
        let inv0 = rational_inverse(&c0)
            .ok_or_else(|| QcError::NotInvertible("leading matrix is singular".into()))?;
        let inv0m = Self::from_const(&inv0, self.order);
        // X = I - inv0 * self is O(ħ); self^{-1} = (Σ X^j) inv0
        let x = Self::identity(self.rows, self.order).sub(&inv0m.mul(self));
        let mut sum = Self::identity(self.rows, self.order);
        let mut p = sum.clone();
        for _ in 1..self.order {
            p = p.mul(&x);
            sum = sum.add(&p);
        }
        Ok(sum.mul(&inv0m))
    }
}

/// Gauss-Jordan inverse of a rational matrix.
pub fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}
