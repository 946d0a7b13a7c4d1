//! Riemann theta functions with characteristics and the genus > 1 Green
//! kernels built from them.
//!
//! Convention: `θ[α,β](z) = Σ_n exp(iπ(n+α)ᵀΩ(n+α) + 2πi(n+α)ᵀ(z+β))`.
//! Under it `θ(z+Ωm) = exp(−iπmᵀΩm − 2πimᵀ(z+β))θ(z)`, so the
//! log-derivative `∂_hθ/θ` shifts by `−2πi h_i` along `Ωe_i`.

mod checks;
mod fixture;
mod kernel;

pub use checks::{run_fixture_checks, CheckRow, Expect};
pub use fixture::{Fixture, OracleValue};
pub use kernel::{
    c_linear_form, green_h_eval, pole_limit, q0_decompose, q0_plus, relation_coefficients, single_valuedness_check, CLinearReport, KernelPoint,
    LatticeShift, PoleLimit, Q0Decomposition, StructureKind,
};

use crate::error::{QcError, QcResult};
use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::{gamma, gamma_ur};
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type CVec = Vec<C64>;

/// Neumaier-compensated complex sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let comp = if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
    *acc = (t, c + comp);
}

impl CompensatedSum {
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }
    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// `θ = scaled · exp(log_scale)`; `error` bounds `|scaled − exact scaled|`.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub scaled: C64,
    pub log_scale: f64,
    pub error: f64,
    /// `∂_jθ` in the same scaling.
    pub grad: CVec,
    pub terms: usize,
}

impl ThetaValue {
    pub fn value(&self) -> C64 {
        self.scaled * self.log_scale.exp()
    }
    pub fn error_abs(&self) -> f64 {
        self.error * self.log_scale.exp()
    }
    pub fn dir(&self, h: &[C64]) -> C64 {
        self.grad.iter().zip(h).map(|(g, x)| g * x).sum()
    }
    /// `self / other` without forming the exponential scales separately.
    pub fn ratio(&self, other: &ThetaValue) -> C64 {
        self.scaled / other.scaled * (self.log_scale - other.log_scale).exp()
    }
}

#[derive(Clone, Debug)]
pub struct ThetaData {
    pub g: usize,
    pub omega: Vec<CVec>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub eps: f64,
    /// Largest admissible radius of the summation ellipsoid.
    pub rho_max: f64,
    /// Upper-triangular `T` with `Im Ω = TᵀT`.
    t: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    /// Shortest vector length of the lattice `√π T Z^g`.
    rho: f64,
}

fn is_half_integer(x: f64) -> bool {
    let d = 2.0 * x;
    (d - d.round()).abs() < 1e-12
}

impl ThetaData {
    pub fn new(omega: Vec<CVec>, alpha: Vec<f64>, beta: Vec<f64>, eps: f64) -> QcResult<Self> {
        let g = omega.len();
        if g == 0 || omega.iter().any(|r| r.len() != g) || alpha.len() != g || beta.len() != g {
            return Err(QcError::Domain("Ω must be square and match the characteristic length".into()));
        }
        if eps.is_nan() || eps <= 0.0 {
            return Err(QcError::Domain("tolerance must be positive".into()));
        }
        for i in 0..g {
            for j in 0..g {
                if (omega[i][j] - omega[j][i]).norm() > 1e-14 {
                    return Err(QcError::Domain("Ω is not symmetric".into()));
                }
            }
        }
        if !alpha.iter().chain(&beta).all(|x| is_half_integer(*x)) {
            return Err(QcError::Domain("characteristic entries must lie in Z/2".into()));
        }
        let y = DMatrix::from_fn(g, g, |i, j| omega[i][j].im);
        let chol = y.clone().cholesky().ok_or_else(|| QcError::Domain("Im Ω is not positive definite".into()))?;
        let t = chol.l().transpose();
        let y_inv = chol.inverse();
        let mut data = ThetaData { g, omega, alpha, beta, eps, rho_max: 40.0, t, y_inv, rho: 0.0 };
        data.rho = data.shortest_vector();
        Ok(data)
    }

    /// `(−1)^{4α·β}`
    pub fn parity(&self) -> i32 {
        let s: f64 = self.alpha.iter().zip(&self.beta).map(|(a, b)| 4.0 * a * b).sum();
        if (s.round() as i64).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    fn t_norm2(&self, x: &[f64]) -> f64 {
        (0..self.g)
            .map(|i| {
                let r: f64 = (i..self.g).map(|j| self.t[(i, j)] * x[j]).sum();
                r * r
            })
            .sum()
    }

    /// Integer points `n` with `‖T(n + shift)‖ ≤ r`, in a fixed order.
    fn ellipsoid_points(&self, shift: &[f64], r: f64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; self.g];
        self.enumerate(self.g, shift, r * r, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, level: usize, shift: &[f64], rem: f64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if level == 0 {
            out.push(cur.clone());
            return;
        }
        let i = level - 1;
        let tail: f64 = (i + 1..self.g).map(|j| self.t[(i, j)] * (cur[j] as f64 + shift[j])).sum();
        let tii = self.t[(i, i)];
        let rad = rem.max(0.0).sqrt();
        // tii (n_i + shift_i) + tail ∈ [−rad, rad]
        let lo = ((-rad - tail) / tii - shift[i]).ceil() as i64;
        let hi = ((rad - tail) / tii - shift[i]).floor() as i64;
        for n in lo..=hi {
            let v = tii * (n as f64 + shift[i]) + tail;
            cur[i] = n;
            self.enumerate(i, shift, rem - v * v, cur, out);
        }
        cur[i] = 0;
    }

    fn shortest_vector(&self) -> f64 {
        // the shortest basis column bounds the minimum
        let zero = vec![0.0; self.g];
        let mut best = f64::INFINITY;
        for i in 0..self.g {
            let mut e = vec![0.0; self.g];
            e[i] = 1.0;
            best = best.min(self.t_norm2(&e).sqrt());
        }
        for n in self.ellipsoid_points(&zero, best * (1.0 + 1e-12)) {
            if n.iter().any(|x| *x != 0) {
                let v: Vec<f64> = n.iter().map(|x| *x as f64).collect();
                best = best.min(self.t_norm2(&v).sqrt());
            }
        }
        best * PI.sqrt()
    }

    /// Gaussian tail bound for the terms outside radius `r` (scaled units).
    pub fn tail_bound(&self, r: f64) -> f64 {
        let g = self.g as f64;
        let rho = self.rho;
        if r <= rho / 2.0 {
            return f64::INFINITY;
        }
        let x = (r - rho / 2.0).powi(2);
        (g / 2.0) * (2.0 / rho).powf(g) * gamma_ur(g / 2.0, x) * gamma(g / 2.0)
    }

    /// Smallest radius (to 1e-3) whose tail bound is below `eps`.
    pub fn radius(&self) -> QcResult<f64> {
        let mut hi = self.rho / 2.0 + 1.0;
        while self.tail_bound(hi) >= self.eps {
            hi *= 1.5;
            if hi > self.rho_max {
                return Err(QcError::Precision(format!("tail bound {} unreachable within radius {}", self.eps, self.rho_max)));
            }
        }
        let mut lo = self.rho / 2.0;
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) < self.eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    pub fn eval(&self, z: &[C64]) -> QcResult<ThetaValue> {
        let r = self.radius()?;
        self.eval_with_radius(z, r)
    }

    /// Lattice sum over `‖√π T(n + α − c)‖ ≤ r`, `c = −Y^{-1} Im z`.
    pub fn eval_with_radius(&self, z: &[C64], r: f64) -> QcResult<ThetaValue> {
        let g = self.g;
        if z.len() != g {
            return Err(QcError::Domain("point has the wrong dimension".into()));
        }
        let y: Vec<f64> = z.iter().map(|c| c.im).collect();
        let c: Vec<f64> = (0..g).map(|i| -(0..g).map(|j| self.y_inv[(i, j)] * y[j]).sum::<f64>()).collect();
        let log_scale: f64 = PI * (0..g).map(|i| (0..g).map(|j| y[i] * self.y_inv[(i, j)] * y[j]).sum::<f64>()).sum::<f64>();
        let shift: Vec<f64> = (0..g).map(|i| self.alpha[i] - c[i]).collect();
        let pts = self.ellipsoid_points(&shift, r / PI.sqrt());
        let zb: Vec<C64> = (0..g).map(|i| z[i] + self.beta[i]).collect();
        let i_pi = C64::new(0.0, PI);
        let mut sum = CompensatedSum::default();
        let mut grad = vec![CompensatedSum::default(); g];
        let mut abs_sum = 0.0;
        for n in &pts {
            let v: Vec<f64> = (0..g).map(|i| n[i] as f64 + self.alpha[i]).collect();
            let mut quad = C64::new(0.0, 0.0);
            for i in 0..g {
                for j in 0..g {
                    quad += self.omega[i][j] * (v[i] * v[j]);
                }
            }
            let lin: C64 = (0..g).map(|i| zb[i] * v[i]).sum();
            let term = (i_pi * quad + 2.0 * i_pi * lin - log_scale).exp();
            abs_sum += term.norm();
            sum.add(term);
            for i in 0..g {
                grad[i].add(2.0 * i_pi * v[i] * term);
            }
        }
        let error = self.tail_bound(r) + 8.0 * f64::EPSILON * abs_sum;
        Ok(ThetaValue { scaled: sum.value(), log_scale, error, grad: grad.iter().map(|s| s.value()).collect(), terms: pts.len() })
    }

    /// `Ω e_i`
    pub fn period(&self, i: usize) -> CVec {
        (0..self.g).map(|r| self.omega[r][i]).collect()
    }
}

pub fn add(a: &[C64], b: &[C64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[C64], b: &[C64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[C64], t: C64) -> CVec {
    a.iter().map(|x| x * t).collect()
}

pub fn unit(g: usize, i: usize) -> CVec {
    (0..g).map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()
}

pub fn neg_vec(a: &[C64]) -> CVec {
    a.iter().map(|x| -x).collect()
}
