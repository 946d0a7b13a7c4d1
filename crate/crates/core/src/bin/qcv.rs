//! `qcv`: run verification suites and write reports.
//!
//! Exit codes: 0 all pass, 1 any failure, 2 usage, 3 engine error, 4 I/O.

use clap::{Parser, Subcommand, ValueEnum};
use qcurrent::suite::{run_suite, SuiteConfig, SuiteName};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qcv", version, about = "Verification suites for quantum current algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite: rational, zn, level0, theta or all.
    Suite {
        name: String,
        /// TOML config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "N")]
        n: Vec<i64>,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long)]
        window: Option<i64>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        fixture: Vec<PathBuf>,
        /// Tolerance override, `check=value`.
        #[arg(long = "tol")]
        tol: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Record wall time per check (makes the report run-dependent).
        #[arg(long)]
        timings: bool,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("qcv: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Cmd::Suite { name, config, n, k, window, m, fixture, tol, out, format, timings } = cli.cmd;
    let suite: SuiteName = match name.parse() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let mut cfg = match &config {
        Some(p) => match SuiteConfig::load(p) {
            Ok(c) => c,
            Err(e) => return usage(e),
        },
        None => SuiteConfig::new(suite),
    };
    cfg.suite = suite;
    if !n.is_empty() {
        cfg.n = n;
    }
    cfg.k = k.or(cfg.k);
    cfg.window = window.or(cfg.window);
    cfg.m = m.or(cfg.m);
    if !fixture.is_empty() {
        cfg.fixtures = fixture;
    }
    for t in tol {
        let Some((key, val)) = t.split_once('=') else { return usage(format!("bad --tol {t:?}")) };
        match val.parse::<f64>() {
            Ok(v) => {
                cfg.tolerances.insert(key.to_string(), v);
            }
            Err(_) => return usage(format!("bad --tol {t:?}")),
        }
    }
    if out.is_some() {
        cfg.out = out;
    }
    if let Err(e) = cfg.validate() {
        return usage(e);
    }
    if let Ok(v) = std::env::var("QCV_THREADS") {
        match v.parse::<usize>() {
            Ok(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => return usage(format!("QCV_THREADS must be a positive integer, got {v:?}")),
        }
    }
    let report = match run_suite(&cfg, timings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("qcv: engine error: {e}");
            return ExitCode::from(3);
        }
    };
    let body = match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    let written = match &cfg.out {
        Some(p) => std::fs::write(p, &body),
        None => std::io::stdout().write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("qcv: cannot write report: {e}");
        return ExitCode::from(4);
    }
    for r in report.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("qcv: {} {} {}: {}", r.module, r.operation, r.params, r.error.as_deref().unwrap_or(""));
    }
    ExitCode::from(report.exit_code() as u8)
}
