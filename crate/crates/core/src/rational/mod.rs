//! Kernels and structure functions of the rational curve with
//! `ω = z^{N-1} dz`, in the frame `[z, w]` with `|w| < |z|`.
//!
//! Sign conventions: `G = z^{-a} w^{-b} / (z - w)` and
//! `γ = (∂⊗1)G + G²`. The ODE system for `φ, ψ` is written for the
//! opposite-sign pair `G_s = -G`, `γ_s = -γ`.

mod divide;

use crate::error::{QcError, QcResult};
use crate::hmatrix::{HMatrix, HPoly};
use crate::hseries::{region_expand_reciprocal, solve_phi_psi, GammaPolySeries, RegionSeries, Series};
use crate::scalar::{GaussRat, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use divide::divide_by_linear;

pub const FRAME: [&str; 2] = ["z", "w"];


fn gr(v: i64) -> GaussRat {
    GaussRat::from_i64(v)
}

/// Dual bases `e^i = z^{-a-1-i}` of R and `e_i = z^{i-b}` of Λ.
#[derive(Clone, Debug, PartialEq)]
pub struct DualBasisWindow {
    pub n_curve: i64,
    pub a: i64,
    pub b: i64,
    pub m: usize,
}

impl DualBasisWindow {
    pub fn new(n_curve: i64, m: usize) -> QcResult<Self> {
        if n_curve < 2 {
            return Err(QcError::Domain(format!("N must be at least 2, got {n_curve}")));
        }
        let (a, b) = if n_curve % 2 == 1 {
            let n = (n_curve - 1) / 2;
            (n, n)
        } else {
            let n = (n_curve - 2) / 2;
            (n, n + 1)
        };
        Ok(DualBasisWindow { n_curve, a, b, m })
    }
    pub fn upper_exp(&self, i: usize) -> i64 {
        -self.a - 1 - i as i64
    }
    pub fn lower_exp(&self, i: usize) -> i64 {
        i as i64 - self.b
    }
    pub fn is_odd(&self) -> bool {
        self.n_curve % 2 == 1
    }
    /// Largest second-leg exponent reached by the first M basis products.
    pub fn certified_window(&self) -> i64 {
        self.m as i64 - 1 - self.b
    }
    /// Upper exponent bound of R.
    pub fn r_bound(&self) -> i64 {
        -self.a - 1
    }
}

#[derive(Clone, Debug)]
pub struct GreenKernel {
    pub basis: DualBasisWindow,
    pub g: RegionSeries,
}

/// `G = Σ_{i<M} e^i ⊗ e_i`, cross-checked against the geometric expansion.
pub fn build_green(n_curve: i64, m: usize, order: u32, window: i64) -> QcResult<GreenKernel> {
    let basis = DualBasisWindow::new(n_curve, m)?;
    if window > basis.certified_window() {
        return Err(QcError::WindowUnderflow(format!(
            "window {window} needs more than M={m} basis pairs (certified up to {})",
            basis.certified_window()
        )));
    }
    if window < -basis.b {
        return Err(QcError::WindowUnderflow(format!("window {window} below the support of G")));
    }
    let terms = (0..m)
        .filter(|&i| basis.lower_exp(i) <= window)
        .map(|i| ((0u32, vec![basis.upper_exp(i), basis.lower_exp(i)]), gr(1)));
    let sum = Series::from_terms(&FRAME, order, n_curve, vec![-basis.b], vec![window], terms)?;
    let exp = region_expand_reciprocal(
        &FRAME,
        order,
        n_curve,
        &[-basis.a, -basis.b],
        gr(1),
        gr(1),
        "z",
        gr(-1),
        "w",
        window,
    )?;
    if !sum.sub(&exp)?.is_zero() {
        return Err(QcError::IdentityViolation("dual-basis sum and expansion of G disagree".into()));
    }
    Ok(GreenKernel { basis, g: sum })
}

/// Smallest M certifying a window.
pub fn min_basis_size(n_curve: i64, window: i64) -> usize {
    let b = DualBasisWindow::new(n_curve.max(2), 0).map(|d| d.b).unwrap_or(0);
    (window + b + 1).max(1) as usize
}

fn check_r_membership(s: &RegionSeries, bound: i64, what: &str) -> QcResult<()> {
    for (k, e) in s.terms().keys() {
        if e[0] > bound || e[1] > bound {
            return Err(QcError::IdentityViolation(format!(
                "{what}: term hbar^{k} z^{} w^{} lies outside R⊗R",
                e[0], e[1]
            )));
        }
    }
    Ok(())
}

/// `γ` from the closed numerator divided exactly by `(z - w)²`.
pub fn gamma_closed(basis: &DualBasisWindow, order: u32) -> QcResult<RegionSeries> {
    let (n, a, b) = (basis.n_curve, basis.a, basis.b);
    let zw = Series::var(&FRAME, 1, n, "z")?.sub(&Series::var(&FRAME, 1, n, "w")?)?;
    let mono = |ez: i64, ew: i64, c: i64| Series::monomial(&FRAME, 1, n, 0, &[ez, ew], gr(c));
    let p = mono(-n - a, -b, -a)
        .mul(&zw)?
        .sub(&mono(1 - n - a, -b, 1))?
        .add(&mono(-2 * a, -2 * b, 1))?;
    let q = divide_by_linear(&divide_by_linear(&p)?)?;
    q.as_hbar_constant(order)
}

/// `γ = (∂⊗1)G + G²` from the windowed series, checked to lie in R⊗R and
/// promoted to an exact series.
pub fn gamma_kernel(n_curve: i64, order: u32, window: i64) -> QcResult<RegionSeries> {
    let basis = DualBasisWindow::new(n_curve, 0)?;
    // G² is certified up to w - b; keep a margin above the bound of R
    let w = window.max(basis.b + 4);
    let gk = build_green(n_curve, min_basis_size(n_curve, w), 1, w)?;
    let g = gk.g;
    let gamma = g.derive("z", n_curve)?.add(&g.mul(&g)?)?;
    check_r_membership(&gamma, basis.r_bound(), "gamma")?;
    let gamma = gamma.promote_exact_below(basis.r_bound())?;
    gamma.as_hbar_constant(order)
}

/// Residuals of `(∂⊗1 + 1⊗∂)G = γ − γ^{21}` and `(1⊗∂)G = G² − γ^{21}`.
pub fn gamma_relations(gk: &GreenKernel, gamma: &RegionSeries) -> QcResult<(RegionSeries, RegionSeries)> {
    let n = gk.basis.n_curve;
    let g = &gk.g;
    let g21 = gamma.swap_legs()?;
    let r1 = g.derive("z", n)?.add(&g.derive("w", n)?)?.sub(&gamma.sub(&g21)?)?;
    let r2 = g.derive("w", n)?.sub(&g.mul(g)?.sub(&g21)?)?;
    Ok((r1, r2))
}

/// `γ_i = (∂^i ⊗ 1) γ_s` for `i <= count`.
pub fn gamma_derivatives(gamma_s: &RegionSeries, n_curve: i64, count: usize) -> QcResult<Vec<RegionSeries>> {
    let mut out = vec![gamma_s.clone()];
    for _ in 0..count {
        let next = out.last().unwrap().derive("z", n_curve)?;
        out.push(next);
    }
    Ok(out)
}

/// Residual of `((q^∂ - 1)/∂ ⊗ 1) G_s = φ(ħ, γ_i) − log(1 + G_s ψ(ħ, γ_i))`.
pub fn generating_identity(n_curve: i64, order: u32, window: i64) -> QcResult<RegionSeries> {
    let gk = build_green(n_curve, min_basis_size(n_curve, window), order, window)?;
    let gs = gk.g.neg();
    let gamma_s = gamma_kernel(n_curve, order, window)?.neg();
    let gams = gamma_derivatives(&gamma_s, n_curve, order as usize)?;
    let (phi, psi) = solve_phi_psi(order);
    let phi_v = phi.substitute(&gams, &gs)?;
    let psi_v = psi.substitute(&gams, &gs)?;
    let lhs = gs.shift_quotient("z", n_curve)?;
    let one = Series::one(&FRAME, order, n_curve);
    let lg = one.add(&gs.mul(&psi_v)?)?.log()?;
    lhs.sub(&phi_v.sub(&lg)?)
}

/// `z − w + (z − w) G_s ψ(ħ, γ_i) = z − w − z^{-a} w^{-b} ψ`, an exact series.
pub fn simply_laced_series(n_curve: i64, order: u32) -> QcResult<(RegionSeries, GammaPolySeries)> {
    let basis = DualBasisWindow::new(n_curve, 0)?;
    let gamma_s = gamma_kernel(n_curve, order, basis.b + 4)?.neg();
    let gams = gamma_derivatives(&gamma_s, n_curve, order as usize)?;
    let (_, psi) = solve_phi_psi(order);
    let tmpl = Series::zero(&FRAME, order, n_curve);
    let psi_v = psi.substitute(&gams, &tmpl)?;
    let zw = Series::var(&FRAME, order, n_curve, "z")?.sub(&Series::var(&FRAME, order, n_curve, "w")?)?;
    let p = zw.sub(&psi_v.mul_monomial(0, &[-basis.a, -basis.b], &gr(1)))?;
    Ok((p, psi))
}

/// Factored closed form `q = num · exp(corr) / den` with
/// `num = z_λ − w`, `den = z − w_λ`.
#[derive(Clone, Debug)]
pub struct QClosed {
    pub numerator: RegionSeries,
    pub denominator: RegionSeries,
    pub correction: RegionSeries,
    pub exp_correction: RegionSeries,
    pub q: RegionSeries,
}

/// `−Σ_{m=1}^{mmax} (x_λ^m − x^m)/(m y^m)`, the truncated `φ(x, y)`.
pub fn phi_truncated(x: &str, y: &str, mmax: i64, n_curve: i64, lambda: &BigRational, order: u32) -> QcResult<RegionSeries> {
    let xs = Series::var(&FRAME, order, n_curve, x)?;
    let x1 = xs.substitute_root_shift(x, n_curve, lambda)?;
    let yi = Series::<GaussRat>::zero(&FRAME, order, n_curve).var_index(y)?;
    let mut acc = Series::zero(&FRAME, order, n_curve);
    for m in 1..=mmax {
        let diff = x1.pow(m as u32)?.sub(&xs.pow(m as u32)?)?;
        let mut e = vec![0, 0];
        e[yi] = -m;
        let t = diff.mul_monomial(0, &e, &GaussRat::from_rat(BigRational::new((-1).into(), m.into())));
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

pub fn compute_q_closed(n_curve: i64, order: u32, window: i64, lambda: &BigRational) -> QcResult<QClosed> {
    let basis = DualBasisWindow::new(n_curve, 0)?;
    let z = Series::var(&FRAME, order, n_curve, "z")?;
    let w = Series::var(&FRAME, order, n_curve, "w")?;
    let z1 = z.substitute_root_shift("z", n_curve, lambda)?;
    let w1 = w.substitute_root_shift("w", n_curve, lambda)?;
    let numerator = z1.sub(&w)?;
    let denominator = z.sub(&w1)?;
    // φ_{z≥−a}(w, z) − φ_{w≥−b}(z, w)
    let correction = phi_truncated("w", "z", basis.a, n_curve, lambda, order)?
        .sub(&phi_truncated("z", "w", basis.b, n_curve, lambda, order)?)?;
    let exp_correction = correction.exp()?;
    let den_inv = denominator.restrict(&[window])?.invert_unit()?;
    let q = numerator.mul(&exp_correction)?.mul(&den_inv)?;
    Ok(QClosed { numerator, denominator, correction, exp_correction, q })
}

/// Residuals on the shifted loci.
#[derive(Clone, Debug)]
pub struct VanishingReport {
    /// `q` numerator at `z = w_{-1}`.
    pub q_locus: RegionSeries,
    /// `1/q` numerator at `z = w_{1}`.
    pub q_inverse_locus: RegionSeries,
    /// simply-laced series at `z = w_{-1}`.
    pub simply_laced: Option<RegionSeries>,
    /// simply-laced series with ħ → −ħ at `z = w_1`.
    pub simply_laced_inverse: Option<RegionSeries>,
    /// control: substitution with λ = 0, expected nonzero.
    pub control: Option<RegionSeries>,
}

pub fn verify_vanishing_locus(n_curve: i64, order: u32, window: i64) -> QcResult<VanishingReport> {
    let one = BigRational::one();
    let qc = compute_q_closed(n_curve, order, window, &one)?;
    let q_locus = qc.numerator.mul(&qc.exp_correction)?.collapse("z", "w", n_curve, &-one.clone())?;
    let inv_num = qc.denominator.mul(&qc.correction.neg().exp()?)?;
    let q_inverse_locus = inv_num.collapse("z", "w", n_curve, &one)?;
    let (sl, sli, ctl) = if n_curve % 2 == 1 {
        let (p, _) = simply_laced_series(n_curve, order)?;
        let r = p.collapse("z", "w", n_curve, &-one.clone())?;
        let ri = p.scale_hbar(&gr(-1)).collapse("z", "w", n_curve, &one)?;
        let c = p.collapse("z", "w", n_curve, &BigRational::zero())?;
        (Some(r), Some(ri), Some(c))
    } else {
        (None, None, None)
    };
    Ok(VanishingReport {
        q_locus,
        q_inverse_locus,
        simply_laced: sl,
        simply_laced_inverse: sli,
        control: ctl,
    })
}

/// Residual of `q_{α^N ħ}(αz, αw) − q_ħ(z, w)`.
pub fn scaling_covariance(n_curve: i64, alpha: &BigRational, order: u32, window: i64) -> QcResult<RegionSeries> {
    if alpha.is_zero() {
        return Err(QcError::Domain("scale must be nonzero".into()));
    }
    let mut an = BigRational::one();
    for _ in 0..n_curve {
        an = &an * alpha;
    }
    let base = compute_q_closed(n_curve, order, window, &BigRational::one())?.q;
    let scaled = compute_q_closed(n_curve, order, window, &an)?.q;
    let a = GaussRat::from_rat(alpha.clone());
    let scaled = scaled.scale_var("z", &a)?.scale_var("w", &a)?;
    scaled.sub(&base)
}

/// Symmetric τ with its defining residual.
#[derive(Clone, Debug)]
pub struct TauResult {
    pub s: RegionSeries,
    pub tau: RegionSeries,
    pub residual: RegionSeries,
    pub window: i64,
}

fn internal_window(basis: &DualBasisWindow, order: u32, window: i64) -> i64 {
    window.max(basis.r_bound() + basis.n_curve * (order as i64 - 1))
}

pub fn compute_tau(n_curve: i64, order: u32, window: i64) -> QcResult<TauResult> {
    let basis = DualBasisWindow::new(n_curve, 0)?;
    let w = internal_window(&basis, order, window);
    let gk = build_green(n_curve, min_basis_size(n_curve, w), order, w)?;
    let s = gk.g.t_operator("z", n_curve)?.sub(&gk.g.t_operator("w", n_curve)?)?;
    check_r_membership(&s, basis.r_bound(), "tau sum")?;
    let s = s.promote_exact_below(basis.r_bound())?;
    let s21 = s.swap_legs()?;
    if !s.sub(&s21)?.is_zero() {
        return Err(QcError::IdentityViolation("tau sum is not symmetric".into()));
    }
    let tau = s.scale_rat(&BigRational::new(1.into(), 2.into()));
    let residual = tau.add(&tau.swap_legs()?)?.sub(&s)?;
    Ok(TauResult { s, tau, residual, window: w })
}

/// Operator U of the U identity with its residual.
#[derive(Clone, Debug)]
pub struct UResult {
    pub d_hbar: RegionSeries,
    /// `U(e_i)` as series in `w`.
    pub columns: Vec<RegionSeries>,
    /// Entry (j, i) is the coefficient of `e^j(w)` in `U(e_i)`.
    pub matrix: HMatrix,
    /// Left side minus right side of the identity.
    pub residual: RegionSeries,
    /// Residual of the equation whose solution is `U₋`; zero means `U₋ = 0`.
    pub u_minus_residual: RegionSeries,
}

pub fn compute_u(n_curve: i64, m: usize, order: u32, window: i64) -> QcResult<UResult> {
    let basis = DualBasisWindow::new(n_curve, m)?;
    let w_int = internal_window(&basis, order, window);
    let gk_int = build_green(n_curve, min_basis_size(n_curve, w_int), order, w_int)?;
    let minus = -BigRational::one();
    let gsh = gk_int
        .g
        .substitute_root_shift("z", n_curve, &minus)?
        .substitute_root_shift("w", n_curve, &minus)?;
    let d = gk_int.g.sub(&gsh)?;
    check_r_membership(&d, basis.r_bound(), "D_hbar")?;
    let d = d.promote_exact_below(basis.r_bound())?;
    let e = d.shift_exp("z", n_curve, &BigRational::one())?;
    // every first-leg exponent of E must be a basis element of R
    let mut max_i = 0usize;
    for (_, ex) in e.terms().keys() {
        let i = -basis.a - 1 - ex[0];
        if i < 0 {
            return Err(QcError::IdentityViolation("(q^∂⊗1)D_hbar leaves R in the first leg".into()));
        }
        max_i = max_i.max(i as usize);
    }
    if max_i >= m {
        return Err(QcError::WindowUnderflow(format!("U needs at least {} basis elements", max_i + 1)));
    }
    let mut columns = Vec::with_capacity(m);
    let mut matrix = HMatrix::zero(m, m, order as usize);
    let mut usum = Series::zero(&FRAME, order, n_curve);
    for i in 0..m {
        let v = e.coefficient_slice("z", basis.upper_exp(i))?;
        let u = v.hbar_integrate().truncate_order(order);
        for ((k, ex), c) in u.terms() {
            let j = -basis.a - 1 - ex[0];
            if j < 0 || j as usize >= m {
                return Err(QcError::IdentityViolation(format!("U(e_{i}) leaves the window of R")));
            }
            let re = c.real().cloned().ok_or_else(|| QcError::Domain("non-real U entry".into()))?;
            let entry = &mut matrix.data[j as usize][i].0[*k as usize];
            *entry += re;
        }
        let lifted = u.embed(&["z", "w"])?.mul_monomial(0, &[basis.upper_exp(i), 0], &gr(1));
        usum = usum.add(&lifted)?;
        columns.push(u);
    }
    let gk = build_green(n_curve, m.max(min_basis_size(n_curve, window)), order, window)?;
    let lhs = gk.g.sinh_quotient("w", n_curve)?.add(&usum)?;
    let qc = compute_q_closed(n_curve, order, window, &BigRational::one())?;
    let ratio = qc.numerator.mul(&qc.denominator.restrict(&[window])?.invert_unit()?)?;
    let rhs = ratio.log()?.add(&qc.correction)?;
    let residual = lhs.sub(&rhs)?;

    // U₋: ∂_ħ(log((z−w)/(z−w₁)) + φ_{z≥−a}(w,z)) − G(z, w₁)
    let one = BigRational::one();
    let z = Series::var(&FRAME, order, n_curve, "z")?;
    let w = Series::var(&FRAME, order, n_curve, "w")?;
    let zw = z.sub(&w)?;
    let den = z.sub(&w.substitute_root_shift("w", n_curve, &one)?)?;
    let lg = zw.mul(&den.restrict(&[window])?.invert_unit()?)?.log()?;
    let ph = phi_truncated("w", "z", basis.a, n_curve, &one, order)?;
    let gw1 = gk.g.substitute_root_shift("w", n_curve, &one)?;
    let u_minus_residual = lg.add(&ph)?.hbar_derive()?.sub(&gw1.truncate_order(order - 1))?;

    Ok(UResult { d_hbar: d, columns, matrix, residual, u_minus_residual })
}

/// Everything computed for one `(N, K, M, window)` configuration.
#[derive(Clone, Debug)]
pub struct KernelBundle {
    pub n_curve: i64,
    pub order: u32,
    pub m: usize,
    pub window: i64,
    pub g: RegionSeries,
    pub gamma: RegionSeries,
    pub phi: GammaPolySeries,
    pub psi: GammaPolySeries,
    pub tau: RegionSeries,
    pub u: HMatrix,
    pub q: RegionSeries,
}

impl KernelBundle {
    /// Odd N only: γ and τ need the isotropic splitting.
    pub fn build(n_curve: i64, order: u32, m: usize, window: i64) -> QcResult<Self> {
        let gk = build_green(n_curve, m, order, window)?;
        let gamma = gamma_kernel(n_curve, order, window)?;
        let (phi, psi) = solve_phi_psi(order);
        let tau = compute_tau(n_curve, order, window)?.tau;
        let u = compute_u(n_curve, m, order, window)?.matrix;
        let q = compute_q_closed(n_curve, order, window, &BigRational::one())?.q;
        Ok(KernelBundle { n_curve, order, m, window, g: gk.g, gamma, phi, psi, tau, u, q })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("N={} K={} M={} window={}\n", self.n_curve, self.order, self.m, self.window);
        for (name, s) in [("G", &self.g), ("gamma", &self.gamma), ("tau", &self.tau), ("q", &self.q)] {
            out.push_str(&format!("# {name}\n"));
            out.push_str(&s.to_text());
        }
        out
    }
}

/// Matrix entries of an HMatrix as plain text rows, for reports.
pub fn hpoly_text(p: &HPoly) -> String {
    let parts: Vec<String> = p.0.iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect();
    parts.join(" ")
}
