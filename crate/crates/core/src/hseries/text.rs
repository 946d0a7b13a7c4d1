use super::{Series, INF};
use crate::error::{QcError, QcResult};
use crate::scalar::Scalar;

fn bound(v: i64) -> String {
    if v == INF {
        "inf".into()
    } else {
        v.to_string()
    }
}

fn parse_bound(s: &str) -> QcResult<i64> {
    if s == "inf" {
        Ok(INF)
    } else {
        s.parse().map_err(|_| QcError::Parse(format!("bad bound {s}")))
    }
}

impl<C: Scalar> Series<C> {
    /// Canonical text form: a header line followed by sorted term lines.
    pub fn to_text(&self) -> String {
        let mut win = vec!["*".to_string()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            win.push(format!("[{},{}]", bound(*l), bound(*h)));
        }
        let mut out = format!(
            "vars={} K={} window={} weight={}\n",
            self.vars.join(","),
            self.order,
            win.join(","),
            self.wt
        );
        for ((k, e), c) in &self.terms {
            let es: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{};{};{}\n", k, es.join(","), c.to_text()));
        }
        out
    }

    pub fn from_text(text: &str) -> QcResult<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| QcError::Parse("empty input".into()))?;
        let mut vars: Option<Vec<String>> = None;
        let mut order = None;
        let mut wt = 0i64;
        let mut window: Option<String> = None;
        for tok in header.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| QcError::Parse(format!("bad header token {tok}")))?;
            match key {
                "vars" => vars = Some(val.split(',').map(|s| s.to_string()).collect()),
                "K" => order = Some(val.parse::<u32>().map_err(|_| QcError::Parse("bad K".into()))?),
                "window" => window = Some(val.to_string()),
                "weight" => wt = val.parse().map_err(|_| QcError::Parse("bad weight".into()))?,
                _ => return Err(QcError::Parse(format!("unknown header key {key}"))),
            }
        }
        let vars = vars.ok_or_else(|| QcError::Parse("missing vars".into()))?;
        let order = order.ok_or_else(|| QcError::Parse("missing K".into()))?;
        let window = window.ok_or_else(|| QcError::Parse("missing window".into()))?;
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let rest = window.strip_prefix('*').ok_or_else(|| QcError::Parse("window must start with *".into()))?;
        for part in rest.split('[').skip(1) {
            let inner = part.trim_end_matches(',').trim_end_matches(']');
            let (l, h) = inner.split_once(',').ok_or_else(|| QcError::Parse("bad interval".into()))?;
            lo.push(parse_bound(l)?);
            hi.push(parse_bound(h)?);
        }
        let vref: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut terms = Vec::new();
        for line in lines {
            let mut parts = line.splitn(3, ';');
            let k: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| QcError::Parse(format!("bad term line {line}")))?;
            let es = parts.next().ok_or_else(|| QcError::Parse(format!("bad term line {line}")))?;
            let e: Vec<i64> = es
                .split(',')
                .map(|x| x.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| QcError::Parse(format!("bad exponents in {line}")))?;
            let c = parts
                .next()
                .and_then(C::parse_text)
                .ok_or_else(|| QcError::Parse(format!("bad coefficient in {line}")))?;
            terms.push(((k, e), c));
        }
        let mut s = Series::from_terms(&vref, order, wt, lo.clone(), hi, terms)?;
        // keep the stored lower bound verbatim
        s.lo = lo;
        Ok(s)
    }
}
