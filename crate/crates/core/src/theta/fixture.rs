//! Plain-text genus-g fixtures: Jacobian data, named points and oracle
//! values computed at high precision by an external generator.
//!
//! ```text
//! genus 2
//! omega <re im> × g²        (row-major)
//! alpha a₁ … a_g
//! beta  b₁ … b_g
//! h <re im> × g
//! e <re im> × g
//! s <re im> × g
//! point <name> <re im> × g
//! direction <name> <re im> × g
//! oracle <name> <re im> × g  <re im>      θ[α,β] at the point
//! gradient <re im> × g                    ∇θ[α,β](e)
//! ```

use super::{CVec, ThetaData, C64};
use crate::error::{QcError, QcResult};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct OracleValue {
    pub name: String,
    pub at: CVec,
    pub value: C64,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub genus: usize,
    pub omega: Vec<CVec>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub h: CVec,
    pub e: CVec,
    pub s: CVec,
    pub points: BTreeMap<String, CVec>,
    pub directions: BTreeMap<String, CVec>,
    pub oracles: Vec<OracleValue>,
    pub gradient: Option<CVec>,
}

fn nums(tokens: &[&str], line: usize) -> QcResult<Vec<f64>> {
    tokens.iter().map(|t| t.parse::<f64>().map_err(|_| QcError::Parse(format!("line {line}: bad number {t:?}")))).collect()
}

fn cvec(v: &[f64]) -> CVec {
    v.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

impl Fixture {
    pub fn parse(name: &str, text: &str) -> QcResult<Self> {
        let mut genus = None;
        let mut fx = Fixture {
            name: name.to_string(),
            genus: 0,
            omega: vec![],
            alpha: vec![],
            beta: vec![],
            h: vec![],
            e: vec![],
            s: vec![],
            points: BTreeMap::new(),
            directions: BTreeMap::new(),
            oracles: vec![],
            gradient: None,
        };
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let ln = ln + 1;
            let need = |k: usize| -> QcResult<usize> { genus.map(|g: usize| g * k).ok_or_else(|| QcError::Parse(format!("line {ln}: genus must come first"))) };
            let exact = |v: &[&str], n: usize| -> QcResult<Vec<f64>> {
                if v.len() != n {
                    return Err(QcError::Parse(format!("line {ln}: expected {n} numbers, got {}", v.len())));
                }
                nums(v, ln)
            };
            match toks[0] {
                "genus" => {
                    let g: usize = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| QcError::Parse(format!("line {ln}: bad genus")))?;
                    genus = Some(g);
                    fx.genus = g;
                }
                "omega" => {
                    let g = need(1)?;
                    let v = cvec(&exact(&toks[1..], 2 * g * g)?);
                    fx.omega = v.chunks(g).map(|r| r.to_vec()).collect();
                }
                "alpha" => fx.alpha = exact(&toks[1..], need(1)?)?,
                "beta" => fx.beta = exact(&toks[1..], need(1)?)?,
                "h" => fx.h = cvec(&exact(&toks[1..], need(2)?)?),
                "e" => fx.e = cvec(&exact(&toks[1..], need(2)?)?),
                "s" => fx.s = cvec(&exact(&toks[1..], need(2)?)?),
                "gradient" => fx.gradient = Some(cvec(&exact(&toks[1..], need(2)?)?)),
                "point" | "direction" => {
                    let label = toks.get(1).ok_or_else(|| QcError::Parse(format!("line {ln}: missing name")))?.to_string();
                    let v = cvec(&exact(&toks[2..], need(2)?)?);
                    if toks[0] == "point" {
                        fx.points.insert(label, v);
                    } else {
                        fx.directions.insert(label, v);
                    }
                }
                "oracle" => {
                    let label = toks.get(1).ok_or_else(|| QcError::Parse(format!("line {ln}: missing name")))?.to_string();
                    let v = cvec(&exact(&toks[2..], need(2)? + 2)?);
                    let g = fx.genus;
                    fx.oracles.push(OracleValue { name: label, at: v[..g].to_vec(), value: v[g] });
                }
                other => return Err(QcError::Parse(format!("line {ln}: unknown key {other:?}"))),
            }
        }
        if genus.is_none() || fx.omega.is_empty() || fx.alpha.is_empty() || fx.beta.is_empty() {
            return Err(QcError::Parse("fixture needs genus, omega, alpha and beta".into()));
        }
        let g = fx.genus;
        if fx.h.is_empty() {
            return Err(QcError::Parse("fixture needs a direction h".into()));
        }
        if fx.e.is_empty() {
            fx.e = vec![C64::new(0.0, 0.0); g];
        }
        if fx.s.is_empty() {
            fx.s = fx.h.iter().map(|x| x * 1e-2).collect();
        }
        Ok(fx)
    }

    pub fn load(path: &std::path::Path) -> QcResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QcError::Parse(format!("{}: {e}", path.display())))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse(&name, &text)
    }

    pub fn data(&self, eps: f64) -> QcResult<ThetaData> {
        ThetaData::new(self.omega.clone(), self.alpha.clone(), self.beta.clone(), eps)
    }

    pub fn point(&self, name: &str) -> QcResult<&CVec> {
        self.points.get(name).ok_or_else(|| QcError::Parse(format!("fixture {} has no point {name:?}", self.name)))
    }
}
