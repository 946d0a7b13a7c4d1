//! The component relations between `e^{(α)}(z)` and `e^{(β)}(w)` and their
//! equivalence with `(z₁ − w) ẽ(z)ẽ(w) = (z − w₁) ẽ(w)ẽ(z)`.

use super::fields::{collect, difference, normal_order, CSeries, ExchangeRule, Field, FieldProduct};
use super::{carry, residue};
use crate::error::{QcError, QcResult};
use crate::hseries::Series;
use crate::scalar::{Cyclotomic, Scalar};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

const FIELD: &str = "e";
const VARS: [&str; 2] = ["z", "w"];

fn cz(v: i64) -> Cyclotomic {
    Cyclotomic::from_i64(v)
}

fn mono(n: i64, order: u32, k: u32, ez: i64, ew: i64, c: i64) -> CSeries {
    Series::monomial(&VARS, order, n, k, &[ez, ew], cz(c))
}

fn shifted(n: i64, order: u32, name: &str) -> QcResult<CSeries> {
    Series::var(&VARS, order, n, name)?.substitute_root_shift(name, n, &BigRational::one())
}

/// `Z − W + s·Nħ` written in `z, w`.
fn zw_linear(n: i64, order: u32, s: i64) -> QcResult<CSeries> {
    mono(n, order, 0, n, 0, 1).sub(&mono(n, order, 0, 0, n, 1))?.add(&mono(n, order, 1, 0, 0, s * n))
}

/// Exchange of component fields:
/// `e^{(β)}(w) e^{(α)}(z) = Σ_{β'} c_{β'−β}(z,w) e^{(α+β−β')}(z) e^{(β')}(w)` with
/// `c_δ = (1/N) Σ_σ σ^δ (z₁ − σw)/(z − σw₁)`. Two-variable words only.
#[derive(Clone, Debug)]
pub struct ComponentRule {
    pub n: i64,
    pub window: i64,
    coeffs: Vec<CSeries>,
}

impl ComponentRule {
    pub fn new(n: i64, order: u32, window: i64) -> QcResult<Self> {
        let nu = n as u32;
        let z = Series::var(&VARS, order, n, "z")?;
        let w = Series::var(&VARS, order, n, "w")?;
        let z1 = shifted(n, order, "z")?;
        let w1 = shifted(n, order, "w")?;
        let mut ratios = Vec::new();
        for s in 0..n {
            let sigma = Cyclotomic::root_power(nu, s);
            let num = z1.sub(&w.scale(&sigma))?;
            let den = z.sub(&w1.scale(&sigma))?;
            let inv = den.restrict(&[window])?.invert_unit()?;
            ratios.push(num.mul(&inv)?);
        }
        let inv_n = Cyclotomic::from_rat(BigRational::new(1.into(), n.into()));
        let mut coeffs = Vec::new();
        for d in 0..n {
            let mut acc = Series::zero(&VARS, order, n);
            for (s, r) in ratios.iter().enumerate() {
                acc = acc.add(&r.scale(&Cyclotomic::root_power(nu, s as i64 * d)))?;
            }
            coeffs.push(acc.scale(&inv_n));
        }
        Ok(ComponentRule { n, window, coeffs })
    }

    /// `c_δ` in the frame `[z, w]`.
    pub fn coefficient(&self, delta: i64) -> &CSeries {
        &self.coeffs[residue(self.n, delta) as usize]
    }
}

impl ExchangeRule for ComponentRule {
    fn swap(&self, left: &Field, lvar: &str, right: &Field, rvar: &str, template: &CSeries) -> QcResult<Vec<(Field, Field, CSeries)>> {
        if template.vars() != [rvar, lvar] {
            return Err(QcError::Rewrite("component exchange is defined on two-variable words".into()));
        }
        let (beta, alpha) = (left.comp, right.comp);
        let mut out = Vec::new();
        for bp in 0..self.n {
            let c = self.coefficient(bp - beta);
            if c.is_zero() {
                continue;
            }
            let c = c.rename(&[rvar, lvar])?.truncate_order(template.order());
            out.push((
                Field::new(&right.name, residue(self.n, alpha + beta - bp)),
                Field::new(&left.name, bp),
                c,
            ));
        }
        Ok(out)
    }
}

/// Which reading of the component relation to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XYVariant {
    /// Prefactors `Z^{r(N−p−α,α)} (W+Nħ)^{r(p+α−1,q−α)}` on the left and
    /// `(Z+Nħ)^{r(N−p−α,α)} W^{r(p+α−1,q−α)}` on the right, with
    /// `E^{(α)}(Z) = z^{−ᾱ} e^{(α)}(z)`.
    Printed,
    /// Prefactors `z^{(−p−α)‾} w₁^{(p+α−1)‾}` on the left and
    /// `z₁^{(−p−α)‾} w^{(p+α−1)‾}` on the right.
    ProofDerived,
}

impl XYVariant {
    pub fn label(&self) -> &'static str {
        match self {
            XYVariant::Printed => "printed",
            XYVariant::ProofDerived => "proof",
        }
    }
}

/// Both sides of the `(p, q)` component relation as products of
/// `e^{(α)}(z)`, `e^{(β)}(w)` in the frame `[z, w]` with weight `N`.
#[derive(Clone, Debug)]
pub struct XYRelation {
    pub n: i64,
    pub p: i64,
    pub q: i64,
    pub variant: XYVariant,
    pub lhs: Vec<FieldProduct>,
    pub rhs: Vec<FieldProduct>,
}

pub fn emit_xy_relation(n: i64, p: i64, q: i64, order: u32, variant: XYVariant) -> QcResult<XYRelation> {
    if n < 1 {
        return Err(QcError::Domain("N must be positive".into()));
    }
    let plus = zw_linear(n, order, 1)?;
    let minus = zw_linear(n, order, -1)?;
    let z1 = shifted(n, order, "z")?;
    let w1 = shifted(n, order, "w")?;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for alpha in 0..n {
        let beta = residue(n, q - alpha);
        let (lc, rc) = match variant {
            XYVariant::Printed => {
                let r1 = carry(n, n - p - alpha, alpha);
                let r2 = carry(n, p + alpha - 1, q - alpha);
                let unit = mono(n, order, 0, -alpha, -beta, 1);
                let zr = mono(n, order, 0, n * r1, 0, 1);
                let wr = mono(n, order, 0, 0, n * r2, 1);
                let z_sh = if r1 == 1 { mono(n, order, 0, n, 0, 1).add(&mono(n, order, 1, 0, 0, n))? } else { mono(n, order, 0, 0, 0, 1) };
                let w_sh = if r2 == 1 { mono(n, order, 0, 0, n, 1).add(&mono(n, order, 1, 0, 0, n))? } else { mono(n, order, 0, 0, 0, 1) };
                (plus.mul(&zr)?.mul(&w_sh)?.mul(&unit)?, minus.mul(&z_sh)?.mul(&wr)?.mul(&unit)?)
            }
            XYVariant::ProofDerived => {
                let a = residue(n, -p - alpha) as u32;
                let b = residue(n, p + alpha - 1);
                let l = plus.mul(&mono(n, order, 0, a as i64, 0, 1))?.mul(&w1.pow(b as u32)?)?;
                let r = minus.mul(&z1.pow(a)?)?.mul(&mono(n, order, 0, 0, b, 1))?;
                (l, r)
            }
        };
        lhs.push(FieldProduct::new(vec![(Field::new(FIELD, alpha), "z"), (Field::new(FIELD, beta), "w")], lc)?);
        rhs.push(FieldProduct::new(vec![(Field::new(FIELD, beta), "w"), (Field::new(FIELD, alpha), "z")], rc)?);
    }
    Ok(XYRelation { n, p, q, variant, lhs, rhs })
}

/// Outcome for one `(p, q)`.
#[derive(Clone, Debug)]
pub struct XYEntry {
    pub p: i64,
    pub q: i64,
    /// Nonzero coefficients of lhs − ordered rhs.
    pub residual: Vec<FieldProduct>,
    /// Total number of stored terms on the left side.
    pub lhs_terms: usize,
    /// Window on which the ordered right side is certified.
    pub window: i64,
}

impl XYEntry {
    pub fn is_zero(&self) -> bool {
        self.residual.is_empty()
    }
}

fn entry_for(rel: &XYRelation, rule: &ComponentRule) -> QcResult<XYEntry> {
    let ordered = normal_order(&rel.rhs, rule)?;
    let window = ordered.iter().map(|f| f.coeff.hi()[0]).min().unwrap_or(rule.window);
    let lhs = collect(rel.lhs.clone())?;
    let residual = difference(&lhs, &ordered)?;
    let lhs_terms = rel.lhs.iter().map(|f| f.coeff.len()).sum();
    Ok(XYEntry { p: rel.p, q: rel.q, residual, lhs_terms, window })
}

/// Residual of every `(p, q)` relation inside the quotient by the vertex
/// relation, in `(p, q)` lexicographic order.
pub fn xy_residuals(n: i64, order: u32, window: i64, variant: XYVariant) -> QcResult<Vec<XYEntry>> {
    let rule = ComponentRule::new(n, order, window)?;
    let pairs: Vec<(i64, i64)> = (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).collect();
    pairs
        .par_iter()
        .map(|&(p, q)| entry_for(&emit_xy_relation(n, p, q, order, variant)?, &rule))
        .collect()
}

/// Free-algebra identity recovering the vertex relation from the family:
/// `(z₁−w)(z−w₁) Σ_{p,q} X_{pq} = (Z−W−Nħ)(Z−W+Nħ) · master`.
/// Returns the nonzero coefficients of the difference.
pub fn reverse_identity(n: i64, order: u32) -> QcResult<Vec<FieldProduct>> {
    let z = Series::var(&VARS, order, n, "z")?;
    let w = Series::var(&VARS, order, n, "w")?;
    let a = shifted(n, order, "z")?.sub(&w)?;
    let b = z.sub(&shifted(n, order, "w")?)?;
    let ab = a.mul(&b)?;
    let mut family = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let rel = emit_xy_relation(n, p, q, order, XYVariant::ProofDerived)?;
            family.extend(rel.lhs);
            family.extend(rel.rhs.into_iter().map(|f| FieldProduct { coeff: f.coeff.neg(), ..f }));
        }
    }
    let left: Vec<FieldProduct> =
        collect(family)?.into_iter().map(|f| Ok(FieldProduct { coeff: f.coeff.mul(&ab)?, ..f })).collect::<QcResult<_>>()?;
    let scale = zw_linear(n, order, -1)?.mul(&zw_linear(n, order, 1)?)?;
    let mut master = Vec::new();
    for al in 0..n {
        for be in 0..n {
            let ez = Field::new(FIELD, al);
            let ew = Field::new(FIELD, be);
            master.push(FieldProduct::new(vec![(ez.clone(), "z"), (ew.clone(), "w")], a.mul(&scale)?)?);
            master.push(FieldProduct::new(vec![(ew, "w"), (ez, "z")], b.mul(&scale)?.neg())?);
        }
    }
    if left.is_empty() {
        return Err(QcError::IdentityViolation("component family is empty".into()));
    }
    difference(&left, &collect(master)?)
}

/// Summary of the equivalence check.
#[derive(Clone, Debug)]
pub struct PlantesReport {
    pub n: i64,
    pub entries: Vec<XYEntry>,
    pub reverse_residual: Vec<FieldProduct>,
}

/// Certifies both directions of the equivalence with the proof-derived
/// prefactors. Fails with a `(p, q, α)` witness on a nonzero residual.
pub fn verify_plantes_equivalence(n: i64, order: u32, window: i64) -> QcResult<PlantesReport> {
    let entries = xy_residuals(n, order, window, XYVariant::ProofDerived)?;
    for e in &entries {
        if let Some(f) = e.residual.first() {
            let alpha = f.factors[0].0.comp;
            return Err(QcError::IdentityViolation(format!(
                "component relation (p,q)=({},{}) leaves a residual at alpha={alpha}",
                e.p, e.q
            )));
        }
    }
    let reverse_residual = reverse_identity(n, order)?;
    if !reverse_residual.is_empty() {
        return Err(QcError::IdentityViolation("vertex relation not recovered from the component family".into()));
    }
    Ok(PlantesReport { n, entries, reverse_residual })
}

fn write_side(out: &mut String, side: &[FieldProduct], refs: &mut Vec<CSeries>) {
    for f in side {
        out.push_str(&format!("COEFF c{}", refs.len()));
        for (fld, v) in &f.factors {
            out.push_str(&format!(" FIELD E({}) AT {}", fld.comp, v));
        }
        out.push('\n');
        refs.push(f.coeff.clone());
    }
}

/// Text form of a relation: product lines followed by the referenced series.
pub fn xy_text(rel: &XYRelation) -> String {
    let mut out = format!("RELATION N={} p={} q={} variant={}\n", rel.n, rel.p, rel.q, rel.variant.label());
    let mut refs = Vec::new();
    out.push_str("LHS\n");
    write_side(&mut out, &rel.lhs, &mut refs);
    out.push_str("RHS\n");
    write_side(&mut out, &rel.rhs, &mut refs);
    for (i, s) in refs.iter().enumerate() {
        out.push_str(&format!("SERIES c{i}\n{}", s.to_text()));
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    out.push_str("END\n");
    out
}
