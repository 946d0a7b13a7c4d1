//! Words of fields at variables and the rewriting engine that sorts them.

use crate::error::{QcError, QcResult};
use crate::hseries::Series;
use crate::scalar::Cyclotomic;
use std::collections::BTreeMap;

pub type CSeries = Series<Cyclotomic>;

/// A field symbol with a Z_N component index (0 for plain fields).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub name: String,
    pub comp: i64,
}

impl Field {
    pub fn new(name: &str, comp: i64) -> Self {
        Field { name: name.to_string(), comp }
    }
}

/// `coeff · f1(v1) f2(v2) ...`
#[derive(Clone, Debug, PartialEq)]
pub struct FieldProduct {
    pub factors: Vec<(Field, String)>,
    pub coeff: CSeries,
}

impl FieldProduct {
    pub fn new(factors: Vec<(Field, &str)>, coeff: CSeries) -> QcResult<Self> {
        let vars: Vec<&str> = factors.iter().map(|(_, v)| *v).collect();
        for (i, v) in vars.iter().enumerate() {
            if vars[i + 1..].contains(v) {
                return Err(QcError::Structural(format!("variable {v} repeated in product")));
            }
            coeff.var_index(v)?;
        }
        Ok(FieldProduct { factors: factors.into_iter().map(|(f, v)| (f, v.to_string())).collect(), coeff })
    }

    fn positions(&self) -> QcResult<Vec<usize>> {
        self.factors.iter().map(|(_, v)| self.coeff.var_index(v)).collect()
    }

    /// Factors appear in frame (dominance) order.
    pub fn is_ordered(&self) -> QcResult<bool> {
        let p = self.positions()?;
        Ok(p.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn word_key(&self) -> Vec<(Field, String)> {
        self.factors.clone()
    }
}

/// Adjacent exchange: `left(lvar) right(rvar) = Σ coeff · new_left(rvar) new_right(lvar)`
/// where `rvar` dominates `lvar` in the frame.
pub trait ExchangeRule: Sync {
    fn swap(&self, left: &Field, lvar: &str, right: &Field, rvar: &str, template: &CSeries) -> QcResult<Vec<(Field, Field, CSeries)>>;
}

/// Sums products with equal words; drops zero coefficients.
pub fn collect(prods: Vec<FieldProduct>) -> QcResult<Vec<FieldProduct>> {
    let mut map: BTreeMap<Vec<(Field, String)>, CSeries> = BTreeMap::new();
    for p in prods {
        let key = p.word_key();
        match map.remove(&key) {
            Some(c) => {
                map.insert(key, c.add(&p.coeff)?);
            }
            None => {
                map.insert(key, p.coeff);
            }
        }
    }
    Ok(map
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(factors, coeff)| FieldProduct { factors, coeff })
        .collect())
}

/// Swaps the factors at `pos` and `pos + 1` using the rule. The pair must be
/// out of order.
pub fn swap_at(prod: &FieldProduct, pos: usize, rule: &dyn ExchangeRule) -> QcResult<Vec<FieldProduct>> {
    let (lf, lv) = &prod.factors[pos];
    let (rf, rv) = &prod.factors[pos + 1];
    let li = prod.coeff.var_index(lv)?;
    let rix = prod.coeff.var_index(rv)?;
    if rix > li {
        return Err(QcError::Rewrite(format!("factors at {pos} are already ordered")));
    }
    let mut out = Vec::new();
    for (nl, nr, c) in rule.swap(lf, lv, rf, rv, &prod.coeff)? {
        let mut factors = prod.factors.clone();
        factors[pos] = (nl, rv.clone());
        factors[pos + 1] = (nr, lv.clone());
        out.push(FieldProduct { factors, coeff: prod.coeff.mul(&c)? });
    }
    Ok(out)
}

/// Rewrites a sum of products into canonical factor order.
pub fn normal_order(prods: &[FieldProduct], rule: &dyn ExchangeRule) -> QcResult<Vec<FieldProduct>> {
    let mut todo: Vec<FieldProduct> = prods.to_vec();
    let mut done = Vec::new();
    let mut steps = 0usize;
    while let Some(p) = todo.pop() {
        let pos = p.positions()?;
        match pos.windows(2).position(|w| w[0] > w[1]) {
            None => done.push(p),
            Some(i) => {
                todo.extend(swap_at(&p, i, rule)?);
                steps += 1;
                if steps > 100_000 {
                    return Err(QcError::Rewrite("normal ordering does not terminate".into()));
                }
            }
        }
    }
    collect(done)
}

/// Applies adjacent swaps at the listed positions in turn.
pub fn reduce_along(prod: &FieldProduct, path: &[usize], rule: &dyn ExchangeRule) -> QcResult<Vec<FieldProduct>> {
    let mut cur = vec![prod.clone()];
    for &i in path {
        let mut next = Vec::new();
        for p in &cur {
            next.extend(swap_at(p, i, rule)?);
        }
        cur = collect(next)?;
    }
    Ok(cur)
}

/// Difference of two collected sums, as a list of nonzero coefficients.
pub fn difference(a: &[FieldProduct], b: &[FieldProduct]) -> QcResult<Vec<FieldProduct>> {
    let mut all = a.to_vec();
    all.extend(b.iter().map(|p| FieldProduct { factors: p.factors.clone(), coeff: p.coeff.neg() }));
    collect(all)
}

/// Which orientation of the relation supplies the swap coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleInstance {
    /// `x(u)x(v) = a(v,u)/b(v,u) · x(v)x(u)`
    Direct,
    /// `x(u)x(v) = b(u,v)/a(u,v) · x(v)x(u)`
    Reflected,
}

/// `a(z,w) x(z)x(w) = b(z,w) x(w)x(z)` for a single field, with exact
/// structure series in the placeholder frame `[z, w]`.
#[derive(Clone, Debug)]
pub struct ScalarRule {
    pub a: CSeries,
    pub b: CSeries,
    pub instance: RuleInstance,
    pub window: i64,
}

impl ScalarRule {
    pub fn new(a: CSeries, b: CSeries, window: i64) -> QcResult<Self> {
        if a.vars() != ["z", "w"] || b.vars() != ["z", "w"] || !a.is_exact() || !b.is_exact() {
            return Err(QcError::Structural("rule series must be exact in the frame [z, w]".into()));
        }
        // both must reduce to z - w at hbar^0
        let base = a.hbar_coefficient(0);
        let zw = Series::var(&["z", "w"], 1, a.weight(), "z")?.sub(&Series::var(&["z", "w"], 1, a.weight(), "w")?)?;
        if !base.truncate_order(1).sub(&zw.reweight(base.weight()))?.is_zero()
            || !b.hbar_coefficient(0).sub(&zw.reweight(b.weight()))?.is_zero()
        {
            return Err(QcError::Structural("structure series must equal z - w at hbar^0".into()));
        }
        Ok(ScalarRule { a, b, instance: RuleInstance::Direct, window })
    }

    pub fn with_instance(&self, instance: RuleInstance) -> Self {
        ScalarRule { instance, ..self.clone() }
    }

    fn place(&self, s: &CSeries, first: &str, second: &str, template: &CSeries) -> QcResult<CSeries> {
        let renamed = s.rename(&[first, second])?;
        let frame = template.vars();
        Ok(renamed.embed(&frame)?.reweight(template.weight()).truncate_order(template.order()))
    }
}

impl ExchangeRule for ScalarRule {
    fn swap(&self, left: &Field, lvar: &str, right: &Field, rvar: &str, template: &CSeries) -> QcResult<Vec<(Field, Field, CSeries)>> {
        let (num, den) = match self.instance {
            RuleInstance::Direct => (self.place(&self.a, rvar, lvar, template)?, self.place(&self.b, rvar, lvar, template)?),
            RuleInstance::Reflected => (self.place(&self.b, lvar, rvar, template)?, self.place(&self.a, lvar, rvar, template)?),
        };
        let nw = template.vars().len() - 1;
        let inv = den
            .restrict(&vec![self.window; nw])?
            .invert_unit()
            .map_err(|e| QcError::Rewrite(format!("structure series not invertible: {e}")))?;
        let ratio = num.mul(&inv)?;
        Ok(vec![(right.clone(), left.clone(), ratio)])
    }
}
