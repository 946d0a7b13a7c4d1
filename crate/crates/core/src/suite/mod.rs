//! Suite configuration, batch execution and report serialization for `qcv`.

mod jobs;

pub use jobs::{jobs_for, Job};

use crate::error::{QcError, QcResult};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Rational,
    Zn,
    Level0,
    Theta,
    All,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Rational => "rational",
            SuiteName::Zn => "zn",
            SuiteName::Level0 => "level0",
            SuiteName::Theta => "theta",
            SuiteName::All => "all",
        }
    }
}

impl FromStr for SuiteName {
    type Err = QcError;
    fn from_str(s: &str) -> QcResult<Self> {
        Ok(match s {
            "rational" => SuiteName::Rational,
            "zn" => SuiteName::Zn,
            "level0" => SuiteName::Level0,
            "theta" => SuiteName::Theta,
            "all" => SuiteName::All,
            other => return Err(QcError::Parse(format!("unknown suite {other:?}"))),
        })
    }
}

/// Parameters of a suite run. `None` fields fall back to per-suite defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Per-operation tolerance overrides for floating-point checks.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixtures: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(suite: SuiteName) -> Self {
        SuiteConfig { suite, n: vec![], k: None, window: None, m: None, tolerances: BTreeMap::new(), fixtures: vec![], out: None }
    }

    pub fn from_toml(text: &str) -> QcResult<Self> {
        toml::from_str(text).map_err(|e| QcError::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> QcResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QcError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> QcResult<()> {
        if let Some(k) = self.k {
            if k < 2 {
                return Err(QcError::Domain("K must be at least 2".into()));
            }
        }
        if let Some(w) = self.window {
            if w < 2 {
                return Err(QcError::Domain("window must be at least 2".into()));
            }
        }
        if self.m == Some(0) {
            return Err(QcError::Domain("M must be positive".into()));
        }
        if self.n.iter().any(|n| *n < 1) {
            return Err(QcError::Domain("every N must be positive".into()));
        }
        if let Some((name, _)) = self.tolerances.iter().find(|(_, t)| t.is_nan() || **t <= 0.0) {
            return Err(QcError::Domain(format!("tolerance for {name} must be positive")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        })
    }
}

impl FromStr for Status {
    type Err = QcError;
    fn from_str(s: &str) -> QcResult<Self> {
        match s {
            "pass" => Ok(Status::Pass),
            "fail" => Ok(Status::Fail),
            "inconclusive" => Ok(Status::Inconclusive),
            _ => Err(QcError::Parse(format!("bad status {s:?}"))),
        }
    }
}

/// What a record's residual is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Expectation {
    /// residual is a count of surviving terms and must be 0
    ExactZero,
    /// a deviation that must be detected: residual must be nonzero
    ExactNonzero,
    Below(f64),
    Above(f64),
}

impl Expectation {
    pub fn holds(&self, residual: f64) -> bool {
        match self {
            Expectation::ExactZero => residual == 0.0,
            Expectation::ExactNonzero => residual != 0.0,
            Expectation::Below(t) => residual < *t,
            Expectation::Above(t) => residual > *t,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::ExactZero => f.write_str("=0"),
            Expectation::ExactNonzero => f.write_str("!=0"),
            Expectation::Below(t) => write!(f, "<{t:e}"),
            Expectation::Above(t) => write!(f, ">{t:e}"),
        }
    }
}

impl FromStr for Expectation {
    type Err = QcError;
    fn from_str(s: &str) -> QcResult<Self> {
        let num = |t: &str| t.parse::<f64>().map_err(|_| QcError::Parse(format!("bad tolerance {s:?}")));
        match s {
            "=0" => Ok(Expectation::ExactZero),
            "!=0" => Ok(Expectation::ExactNonzero),
            _ if s.starts_with('<') => Ok(Expectation::Below(num(&s[1..])?)),
            _ if s.starts_with('>') => Ok(Expectation::Above(num(&s[1..])?)),
            _ => Err(QcError::Parse(format!("bad expectation {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub module: String,
    pub operation: String,
    /// `key=value` pairs joined by `;`, no spaces.
    pub params: String,
    /// Surviving-term count for exact checks, a floating-point norm
    /// otherwise; absent when the engine raised an error.
    pub residual: Option<f64>,
    pub expect: Expectation,
    pub status: Status,
    /// Set when the engine raised an error instead of producing a residual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl Record {
    pub fn new(module: &str, operation: &str, params: &str, residual: f64, expect: Expectation) -> Self {
        let status = if residual.is_finite() && expect.holds(residual) { Status::Pass } else { Status::Fail };
        Record { module: module.into(), operation: operation.into(), params: params.into(), residual: Some(residual), expect, status, error: None, wall_ms: None }
    }

    pub fn exact(module: &str, operation: &str, params: &str, terms: usize) -> Self {
        Self::new(module, operation, params, terms as f64, Expectation::ExactZero)
    }

    pub fn flag(module: &str, operation: &str, params: &str, ok: bool) -> Self {
        Self::exact(module, operation, params, usize::from(!ok))
    }

    pub fn inconclusive(mut self) -> Self {
        self.status = Status::Inconclusive;
        self
    }

    pub fn engine_error(module: &str, operation: &str, params: &str, e: &QcError) -> Self {
        Record {
            module: module.into(),
            operation: operation.into(),
            params: params.into(),
            residual: None,
            expect: Expectation::ExactZero,
            status: Status::Fail,
            error: Some(e.to_string()),
            wall_ms: None,
        }
    }

    fn sort_key(&self) -> (&str, &str, &str) {
        (&self.module, &self.operation, &self.params)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub engine_errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub engine_version: String,
    pub config: SuiteConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn from_records(config: SuiteConfig, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut summary = Summary { total: records.len(), ..Summary::default() };
        for r in &records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Inconclusive => summary.inconclusive += 1,
            }
            if r.error.is_some() {
                summary.engine_errors += 1;
            }
        }
        SuiteReport { engine_version: crate::ENGINE_VERSION.to_string(), config, records, summary }
    }

    /// 0 all pass, 1 any failure, 3 engine error.
    pub fn exit_code(&self) -> i32 {
        if self.summary.engine_errors > 0 {
            3
        } else if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> QcResult<Self> {
        serde_json::from_str(text).map_err(|e| QcError::Parse(format!("report: {e}")))
    }

    /// Fixed-width table. The header lines carry the version and the config
    /// (as one-line JSON) so the table parses back into the same report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# engine_version {}\n", self.engine_version));
        out.push_str(&format!("# config {}\n", serde_json::to_string(&self.config).expect("config serializes")));
        let w = |f: fn(&Record) -> usize, min: usize| self.records.iter().map(f).max().unwrap_or(0).max(min);
        let wm = w(|r| r.module.len(), 6);
        let wo = w(|r| r.operation.len(), 9);
        let wp = w(|r| r.params.len(), 6);
        out.push_str(&format!(
            "{:<wm$}  {:<wo$}  {:<wp$}  {:<12}  {:>24}  {:<24}  {:>12}  {}\n",
            "module", "operation", "params", "status", "residual", "expect", "wall_ms", "error"
        ));
        for r in &self.records {
            let wall = r.wall_ms.map(|x| format!("{x:?}")).unwrap_or_else(|| "-".into());
            let err = r.error.clone().unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<wm$}  {:<wo$}  {:<wp$}  {:<12}  {:>24}  {:<24}  {:>12}  {}\n",
                r.module,
                r.operation,
                if r.params.is_empty() { "-" } else { &r.params },
                r.status.to_string(),
                r.residual.map(|x| format!("{x:?}")).unwrap_or_else(|| "-".into()),
                r.expect.to_string(),
                wall,
                err
            ));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "# summary total={} pass={} fail={} inconclusive={} engine_errors={}\n",
            s.total, s.pass, s.fail, s.inconclusive, s.engine_errors
        ));
        out
    }

    pub fn from_text(text: &str) -> QcResult<Self> {
        let mut version = None;
        let mut config = None;
        let mut records = Vec::new();
        let bad = |l: &str| QcError::Parse(format!("bad report line {l:?}"));
        for line in text.lines() {
            if let Some(v) = line.strip_prefix("# engine_version ") {
                version = Some(v.to_string());
            } else if let Some(c) = line.strip_prefix("# config ") {
                config = Some(serde_json::from_str::<SuiteConfig>(c).map_err(|e| QcError::Parse(format!("config: {e}")))?);
            } else if line.starts_with('#') || line.starts_with("module ") || line.trim().is_empty() {
                continue;
            } else {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() < 8 {
                    return Err(bad(line));
                }
                let module = t[0].to_string();
                let operation = t[1].to_string();
                let params = if t[2] == "-" { String::new() } else { t[2].to_string() };
                let status: Status = t[3].parse()?;
                let residual = if t[4] == "-" { None } else { Some(t[4].parse::<f64>().map_err(|_| bad(line))?) };
                let expect: Expectation = t[5].parse()?;
                let wall_ms = if t[6] == "-" { None } else { Some(t[6].parse().map_err(|_| bad(line))?) };
                let error = if t.len() == 8 && t[7] == "-" { None } else { Some(error_text(line)?) };
                records.push(Record { module, operation, params, residual, expect, status, error, wall_ms });
            }
        }
        let config = config.ok_or_else(|| QcError::Parse("report has no config line".into()))?;
        let mut rep = SuiteReport::from_records(config, records);
        rep.engine_version = version.ok_or_else(|| QcError::Parse("report has no version line".into()))?;
        Ok(rep)
    }
}

/// Text after the seventh whitespace-separated column, verbatim.
fn error_text(line: &str) -> QcResult<String> {
    let mut rest = line;
    for _ in 0..7 {
        rest = rest.trim_start();
        let end = rest.find(char::is_whitespace).ok_or_else(|| QcError::Parse(format!("bad report line {line:?}")))?;
        rest = &rest[end..];
    }
    Ok(rest.trim_start().to_string())
}

/// Runs a config on the global pool (or the one installed by the caller).
pub fn run_suite(config: &SuiteConfig, timings: bool) -> QcResult<SuiteReport> {
    config.validate()?;
    let jobs = jobs_for(config)?;
    use rayon::prelude::*;
    let records: Vec<Record> = jobs
        .into_par_iter()
        .flat_map_iter(|job| {
            let t = Instant::now();
            let mut recs = job.run();
            if timings {
                let ms = t.elapsed().as_secs_f64() * 1e3;
                for r in &mut recs {
                    r.wall_ms = Some(ms);
                }
            }
            recs
        })
        .collect();
    Ok(SuiteReport::from_records(config.clone(), records))
}
