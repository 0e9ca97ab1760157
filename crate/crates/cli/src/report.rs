//! Evaluation report rendering: machine-stable CSV and a human text table.
//!
//! The CSV stores fractions at four decimal places; the text table shows
//! percentages and says so in its column headers.

use fakestereo_core::eval::Scope;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const REPORT_HEADER: &str = "train_corpus,test_corpus,cutoff_hz,scope,acc,far,n_real,n_fake";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub train_corpus: String,
    pub test_corpus: String,
    /// `None` pools every cutoff present in the test split.
    pub cutoff_hz: Option<f64>,
    pub scope: Scope,
    pub acc: f64,
    pub far: f64,
    pub n_real: u64,
    pub n_fake: u64,
}

fn cutoff_str(cutoff: Option<f64>) -> String {
    match cutoff {
        Some(c) => format!("{c}"),
        None => "all".into(),
    }
}

/// Fixed row order so re-renders are byte-stable: train, test, scope,
/// pooled-before-cutoffs, cutoff ascending.
pub fn sort_rows(rows: &mut [EvalRow]) {
    rows.sort_by(|a, b| {
        (&a.train_corpus, &a.test_corpus, a.scope)
            .cmp(&(&b.train_corpus, &b.test_corpus, b.scope))
            .then_with(|| match (a.cutoff_hz, b.cutoff_hz) {
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (Some(_), None) => std::cmp::Ordering::Greater,
                (Some(x), Some(y)) => x.total_cmp(&y),
            })
    });
}

pub fn render_csv(rows: &[EvalRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{:.4},{},{}\n",
            r.train_corpus,
            r.test_corpus,
            cutoff_str(r.cutoff_hz),
            r.scope,
            r.acc,
            r.far,
            r.n_real,
            r.n_fake
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<EvalRow>, ReportError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let parse = |message: String| ReportError::Parse { line, message };
        if raw.is_empty() {
            continue;
        }
        if idx == 0 {
            if raw != REPORT_HEADER {
                return Err(parse(format!("expected header {REPORT_HEADER:?}")));
            }
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 8 {
            return Err(parse(format!("expected 8 fields, found {}", fields.len())));
        }
        let cutoff_hz = if fields[2] == "all" {
            None
        } else {
            Some(fields[2].parse().map_err(|_| parse("bad cutoff_hz".into()))?)
        };
        let scope = match fields[3] {
            "first" => Scope::First,
            "second" => Scope::Second,
            "fused" => Scope::Fused,
            other => return Err(parse(format!("bad scope {other:?}"))),
        };
        rows.push(EvalRow {
            train_corpus: fields[0].to_string(),
            test_corpus: fields[1].to_string(),
            cutoff_hz,
            scope,
            acc: fields[4].parse().map_err(|_| parse("bad acc".into()))?,
            far: fields[5].parse().map_err(|_| parse("bad far".into()))?,
            n_real: fields[6].parse().map_err(|_| parse("bad n_real".into()))?,
            n_fake: fields[7].parse().map_err(|_| parse("bad n_fake".into()))?,
        });
    }
    Ok(rows)
}

/// Human-oriented table; rates as percentages, labeled as such.
pub fn render_text(rows: &[EvalRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14} {:<14} {:>9} {:>7} {:>8} {:>8} {:>7} {:>7}\n",
        "train", "test", "cutoff_hz", "scope", "acc(%)", "far(%)", "n_real", "n_fake"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<14} {:<14} {:>9} {:>7} {:>8.2} {:>8.2} {:>7} {:>7}\n",
            r.train_corpus,
            r.test_corpus,
            cutoff_str(r.cutoff_hz),
            r.scope.to_string(),
            r.acc * 100.0,
            r.far * 100.0,
            r.n_real,
            r.n_fake
        ));
    }
    out
}

pub fn write_csv(rows: &[EvalRow], path: &Path) -> Result<(), ReportError> {
    fs::write(path, render_csv(rows))
        .map_err(|e| ReportError::Io { path: path.display().to_string(), source: e })
}

pub fn load_csv(path: &Path) -> Result<Vec<EvalRow>, ReportError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ReportError::Io { path: path.display().to_string(), source: e })?;
    parse_csv(&text)
}
