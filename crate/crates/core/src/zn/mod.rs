//! Z_N component presentation of the vertex relation for `ω = z^{N-1}dz`:
//! carries, root-of-unity projections, the component relations and a
//! rewriting engine used to certify them.

mod fields;
mod pbw;
mod xy;

pub use fields::{
    collect, difference, normal_order, reduce_along, swap_at, CSeries, ExchangeRule, Field, FieldProduct, RuleInstance,
    ScalarRule,
};
pub use pbw::{confluence_length3, pbw_symmetry_check, rational_case_rule, round_trip, ConfluenceReport, PbwReport};
pub use xy::{
    emit_xy_relation, xy_residuals, reverse_identity, verify_plantes_equivalence, xy_text, ComponentRule,
    XYEntry, PlantesReport, XYRelation, XYVariant,
};

use crate::error::{QcError, QcResult};
use crate::hseries::{region_expand_reciprocal, Series};
use crate::scalar::{Cyclotomic, Scalar};

/// Representative of `a` in `[0, n-1]`.
pub fn residue(n: i64, a: i64) -> i64 {
    a.rem_euclid(n)
}

/// `r(a,b)` with `ā + b̄ = (a+b)‾ + r(a,b)·N`.
pub fn carry(n: i64, a: i64, b: i64) -> i64 {
    assert!(n >= 1);
    if residue(n, a) + residue(n, b) >= n {
        1
    } else {
        0
    }
}

/// All carries for `a, b ∈ Z_N`, row `a`, column `b`.
pub fn carry_table(n: i64) -> Vec<Vec<i64>> {
    (0..n).map(|a| (0..n).map(|b| carry(n, a, b)).collect()).collect()
}

/// Both sides of `Σ_ζ ζ^p/(ζz − w) = N w^{p̂−1} z^{N−p̂}/(z^N − w^N)`,
/// expanded for `|w| < |z|`. Here `p̂` is the representative of `p` in
/// `[1, N]`.
#[derive(Clone, Debug)]
pub struct MuProjection {
    pub n: i64,
    pub p: i64,
    pub lhs: CSeries,
    pub rhs: CSeries,
}

pub fn mu_projection(n: i64, p: i64, window: i64) -> QcResult<MuProjection> {
    if n < 1 {
        return Err(QcError::Domain("N must be positive".into()));
    }
    let vars = ["z", "w"];
    let nu = n as u32;
    let mut lhs = Series::<Cyclotomic>::zero(&vars, 1, n);
    for s in 0..n {
        let zeta = Cyclotomic::root_power(nu, s);
        let c = Cyclotomic::root_power(nu, s * p);
        let t = region_expand_reciprocal(&vars, 1, n, &[0, 0], c, zeta, "z", Cyclotomic::from_i64(-1), "w", window)?;
        lhs = lhs.add(&t)?;
    }
    let ph = residue(n, p - 1) + 1;
    let mut terms = Vec::new();
    let mut k = 0;
    while ph - 1 + n * k <= window {
        terms.push(((0u32, vec![n - ph - n * (k + 1), ph - 1 + n * k]), Cyclotomic::from_i64(n)));
        k += 1;
    }
    let rhs = Series::from_terms(&vars, 1, n, vec![ph - 1], vec![window], terms)?;
    // lhs windows are exact up to `window`; the exact cancellations above
    // leave lo at the first surviving term
    let lhs = lhs.restrict(&[window])?;
    if !lhs.sub(&rhs)?.is_zero() {
        return Err(QcError::IdentityViolation(format!("root-of-unity projection fails for N={n}, p={p}")));
    }
    Ok(MuProjection { n, p, lhs, rhs })
}
