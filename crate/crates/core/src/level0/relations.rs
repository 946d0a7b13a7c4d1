//! The defining relations of `U_{a,b}g` with concrete coefficient series.

use super::{q_ab, StructureOperatorB};
use crate::error::{QcError, QcResult};
use crate::hseries::{region_expand_reciprocal, RegionSeries, Series};
use crate::rational::DualBasisWindow;
use crate::scalar::{GaussRat, Scalar};
use std::collections::BTreeMap;

pub const SYMBOLS: [&str; 7] = ["e", "f", "h", "K+", "K-", "K+^-1", "K-^-1"];

/// `coeff · Π sym(var)`, optionally multiplied by `α(z) − α(w)` for an
/// arbitrary `α ∈ K`.
#[derive(Clone, Debug)]
pub struct RelTerm {
    pub coeff: RegionSeries,
    pub word: Vec<(String, String)>,
    pub alpha_factor: bool,
}

impl RelTerm {
    fn new(coeff: RegionSeries, word: &[(&str, &str)], alpha_factor: bool) -> Self {
        RelTerm { coeff, word: word.iter().map(|(s, v)| (s.to_string(), v.to_string())).collect(), alpha_factor }
    }
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub lhs: Vec<RelTerm>,
    pub rhs: Vec<RelTerm>,
}

#[derive(Clone, Debug)]
pub struct RelationSet {
    pub n: i64,
    pub relations: Vec<Relation>,
    /// `[h[e^i], e(z)] = (Σ_j B_Λ[i][j] e^j)(z) e(z)` for `i < M`.
    pub derived: Vec<Relation>,
}

impl RelationSet {
    pub fn names(&self) -> Vec<&str> {
        self.relations.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn symbols_declared(&self) -> bool {
        self.relations
            .iter()
            .chain(&self.derived)
            .flat_map(|r| r.lhs.iter().chain(&r.rhs))
            .flat_map(|t| &t.word)
            .all(|(s, _)| SYMBOLS.contains(&s.as_str()) || s.starts_with("h[e^"))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.relations.iter().chain(&self.derived) {
            out.push_str(&format!("RELATION {}\n", r.name));
            let mut refs: Vec<&RegionSeries> = Vec::new();
            for (label, side) in [("LHS", &r.lhs), ("RHS", &r.rhs)] {
                out.push_str(label);
                out.push('\n');
                for t in side {
                    out.push_str(&format!("COEFF c{}", refs.len()));
                    refs.push(&t.coeff);
                    if t.alpha_factor {
                        out.push_str(" ALPHA");
                    }
                    for (s, v) in &t.word {
                        out.push_str(&format!(" FIELD {s} AT {v}"));
                    }
                    out.push('\n');
                }
            }
            for (i, s) in refs.iter().enumerate() {
                out.push_str(&format!("SERIES c{i}\n{}", s.to_text()));
                if !out.ends_with('\n') {
                    out.push('\n');
                }
            }
            out.push_str("END\n");
        }
        out
    }
}

fn green(vars: [&str; 2], n: i64, order: u32, window: i64) -> QcResult<RegionSeries> {
    let basis = DualBasisWindow::new(n, 0)?;
    // G(x, y) = x^{-a} y^{-b}/(x − y) expanded with x dominant
    region_expand_reciprocal(
        &vars,
        order,
        n,
        &[-basis.a, -basis.b],
        GaussRat::one(),
        GaussRat::one(),
        vars[0],
        GaussRat::from_i64(-1),
        vars[1],
        window,
    )
}

/// `G(z,w)` in `[z, w]` and `G(w,z)` in `[w, z]`.
pub fn delta_parts(n: i64, order: u32, window: i64) -> QcResult<(RegionSeries, RegionSeries)> {
    Ok((green(["z", "w"], n, order, window)?, green(["w", "z"], n, order, window)?))
}

/// Comparison of `G(z,w) + G(w,z)` with the formal delta `Σ_m z^m w^{−N−m}`
/// for `|m| ≤ window`, by `z`-exponent.
#[derive(Clone, Debug)]
pub struct DeltaSplit {
    pub overlaps: Vec<i64>,
    pub gaps: Vec<i64>,
    pub non_unit: Vec<i64>,
}

impl DeltaSplit {
    pub fn is_formal_delta(&self) -> bool {
        self.overlaps.is_empty() && self.gaps.is_empty() && self.non_unit.is_empty()
    }
}

pub fn delta_split_check(n: i64, window: i64) -> QcResult<DeltaSplit> {
    let (g12, g21) = delta_parts(n, 1, 2 * window + n)?;
    let mut seen: BTreeMap<i64, Vec<GaussRat>> = BTreeMap::new();
    for s in [&g12, &g21] {
        let zi = s.var_index("z")?;
        let wi = s.var_index("w")?;
        for ((_, e), c) in s.terms() {
            if e[zi] + e[wi] != -n {
                return Err(QcError::IdentityViolation(format!("delta term off the anti-diagonal: {e:?}")));
            }
            seen.entry(e[zi]).or_default().push(c.clone());
        }
    }
    let mut out = DeltaSplit { overlaps: vec![], gaps: vec![], non_unit: vec![] };
    for m in -window..=window {
        match seen.get(&m) {
            None => out.gaps.push(m),
            Some(v) if v.len() > 1 => out.overlaps.push(m),
            Some(v) if v[0] != GaussRat::one() => out.non_unit.push(m),
            _ => {}
        }
    }
    Ok(out)
}

fn inv(s: &RegionSeries, window: i64) -> QcResult<RegionSeries> {
    s.restrict(&[window])?.invert_unit()
}

/// All eight families plus the mode form of `(K+:e)`.
pub fn emit_relation_set(a: &RegionSeries, b: &RegionSeries, ops: &StructureOperatorB, window: i64) -> QcResult<RelationSet> {
    let n = ops.n;
    let order = a.order().min(b.order());
    let zw = ["z", "w"];
    let one = |vars: &[&str]| Series::one(vars, order, n);
    let (g12, g21) = delta_parts(n, order, window)?;
    let a = a.truncate_order(order).reweight(n);
    let b = b.truncate_order(order).reweight(n);
    let a21 = a.swap_legs()?;
    let b21 = b.swap_legs()?;

    let q = q_ab(&a, &b, n, window)?;
    let q_minus = a21.add(&b21.mul(&g12)?)?.mul(&inv(&a.sub(&b.mul(&g12)?)?, window)?)?;
    let t = |c: RegionSeries, w: &[(&str, &str)]| RelTerm::new(c, w, false);
    let ta = |c: RegionSeries, w: &[(&str, &str)]| RelTerm::new(c, w, true);

    let mut rels = vec![Relation {
        name: "h:h".into(),
        lhs: vec![t(one(&zw), &[("h", "z"), ("h", "w")])],
        rhs: vec![t(one(&zw), &[("h", "w"), ("h", "z")])],
    }];
    let conj = |name: &str, k: &str, kinv: &str, x: &str, c: RegionSeries| Relation {
        name: name.into(),
        lhs: vec![t(Series::one(&c.vars(), order, n), &[(k, "z"), (x, "w"), (kinv, "z")])],
        rhs: vec![t(c, &[(x, "w")])],
    };
    rels.push(conj("K+:e", "K+", "K+^-1", "e", q.clone()));
    rels.push(conj("K-:e", "K-", "K-^-1", "e", q_minus.clone()));
    rels.push(conj("K+:f", "K+", "K+^-1", "f", inv(&q, window)?));
    rels.push(conj("K-:f", "K-", "K-^-1", "f", inv(&q_minus, window)?));
    rels.push(Relation {
        name: "e:e".into(),
        lhs: vec![ta(a21.add(&b21.mul(&g12)?)?, &[("e", "z"), ("e", "w")])],
        rhs: vec![ta(a.sub(&b.mul(&g12)?)?, &[("e", "w"), ("e", "z")])],
    });
    rels.push(Relation {
        name: "f:f".into(),
        lhs: vec![ta(a.sub(&b.mul(&g12)?)?, &[("f", "z"), ("f", "w")])],
        rhs: vec![ta(a21.add(&b21.mul(&g12)?)?, &[("f", "w"), ("f", "z")])],
    });
    rels.push(Relation {
        name: "e:f".into(),
        lhs: vec![t(one(&zw), &[("e", "z"), ("f", "w")]), t(one(&zw).neg(), &[("f", "w"), ("e", "z")])],
        rhs: vec![
            t(g12.clone(), &[("K+", "z")]),
            t(g21.clone(), &[("K+", "z")]),
            t(g12.neg(), &[("K-^-1", "z")]),
            t(g21.neg(), &[("K-^-1", "z")]),
        ],
    });

    let basis = DualBasisWindow::new(n, ops.m)?;
    let mut derived = Vec::new();
    for i in 0..ops.m {
        let mut terms = Vec::new();
        for j in 0..ops.m {
            for (k, c) in ops.b_lambda.data[i][j].0.iter().enumerate() {
                if !num_traits::Zero::is_zero(c) {
                    terms.push(((k as u32, vec![basis.upper_exp(j)]), GaussRat::from_rat(c.clone())));
                }
            }
        }
        let coeff = Series::from_terms(&["z"], ops.order, n, vec![], vec![], terms)?;
        let h = format!("h[e^{i}]");
        derived.push(Relation {
            name: format!("h[e^{i}]:e"),
            lhs: vec![
                RelTerm::new(Series::one(&["z"], ops.order, n), &[(&h, "z"), ("e", "z")], false),
                RelTerm::new(Series::one(&["z"], ops.order, n).neg(), &[("e", "z"), (&h, "z")], false),
            ],
            rhs: vec![RelTerm::new(coeff, &[("e", "z")], false)],
        });
    }
    let set = RelationSet { n, relations: rels, derived };
    debug_assert!(set.symbols_declared());
    Ok(set)
}
