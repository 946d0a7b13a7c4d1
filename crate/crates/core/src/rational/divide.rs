use crate::error::{QcError, QcResult};
use crate::hseries::Series;
use crate::scalar::Scalar;
use std::collections::BTreeMap;

/// Exact quotient of an exact two-variable series by `(v0 − v1)`.
/// Fails with an identity violation when the division leaves a remainder,
/// i.e. when the input does not vanish on the diagonal.
pub fn divide_by_linear<C: Scalar>(p: &Series<C>) -> QcResult<Series<C>> {
    if p.vars().len() != 2 || !p.is_exact() {
        return Err(QcError::Structural("exact two-variable series required".into()));
    }
    // group by (k, total degree); within a group index by the second exponent
    let mut groups: BTreeMap<(u32, i64), BTreeMap<i64, C>> = BTreeMap::new();
    for ((k, e), c) in p.terms() {
        groups.entry((*k, e[0] + e[1])).or_default().insert(e[1], c.clone());
    }
    let vars = p.vars();
    let mut terms = Vec::new();
    for ((k, d), row) in groups {
        let i0 = *row.keys().next().unwrap();
        let i1 = *row.keys().last().unwrap();
        let mut acc = C::zero();
        for i in i0..=i1 {
            if let Some(c) = row.get(&i) {
                acc = acc.add(c);
            }
            if i < i1 {
                if !acc.is_zero() {
                    terms.push(((k, vec![d - 1 - i, i]), acc.clone()));
                }
            } else if !acc.is_zero() {
                return Err(QcError::IdentityViolation(format!(
                    "pole on the diagonal: hbar^{k} degree {d} piece does not vanish at v0 = v1"
                )));
            }
        }
    }
    let mut out = Series::from_terms(&vars, p.order(), p.weight(), vec![crate::hseries::INF], vec![crate::hseries::INF], terms)?;
    out = out.restrict(&[crate::hseries::INF])?;
    Ok(out)
}
