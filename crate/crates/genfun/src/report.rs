//! Reports, their JSON and text renderings, and CSV trace files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use genfun_core::{NormMode, UltraNormValue, Verdict};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level answer of a command, which fixes the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Holds => 0,
            Outcome::Fails => 1,
            Outcome::Inconclusive => 3,
        }
    }

    pub fn of(v: &Verdict) -> Self {
        match v {
            Verdict::Holds => Outcome::Holds,
            Verdict::Fails(_) => Outcome::Fails,
            Verdict::Inconclusive(_) => Outcome::Inconclusive,
        }
    }
}

/// Floats as JSON; non-finite values become the strings `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::from("nan")
    } else if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from(x)
    }
}

fn num_text(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Entry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<[Value; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Entry {
    fn named(name: &str) -> Self {
        Entry { name: name.into(), verdict: None, value: None, mode: None, ci: None, detail: None }
    }

    pub fn label(name: &str, label: impl Into<String>) -> Self {
        Entry { verdict: Some(label.into()), ..Entry::named(name) }
    }

    pub fn value(name: &str, x: f64) -> Self {
        Entry { value: Some(num(x)), ..Entry::named(name) }
    }

    pub fn json(name: &str, v: Value) -> Self {
        Entry { value: Some(v), ..Entry::named(name) }
    }

    pub fn norm(name: &str, v: &UltraNormValue) -> Self {
        let mut e = Entry::named(name);
        match v.mode {
            NormMode::Exact => {
                e.value = Some(num(v.value));
                e.mode = Some("exact".into());
            }
            NormMode::Estimated { ci_low, ci_high } => {
                e.value = Some(num(v.value));
                e.mode = Some("estimated".into());
                e.ci = Some([num(ci_low), num(ci_high)]);
            }
            NormMode::Inconclusive => e.mode = Some("inconclusive".into()),
        }
        e
    }

    pub fn verdict(name: &str, v: &Verdict) -> Self {
        let mut e = Entry::named(name);
        match v {
            Verdict::Holds => e.verdict = Some("holds".into()),
            Verdict::Fails(w) => {
                e.verdict = Some("fails".into());
                let mut d = w.detail.clone();
                if let Some(i) = w.index {
                    let _ = write!(d, " at n = {i}");
                }
                if !w.values.is_empty() {
                    let vals: Vec<String> = w.values.iter().map(|&x| num_text(x)).collect();
                    let _ = write!(d, " [{}]", vals.join(", "));
                }
                e.detail = Some(d);
            }
            Verdict::Inconclusive(ev) => {
                e.verdict = Some("inconclusive".into());
                e.detail = Some(ev.note.clone());
            }
        }
        e
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// A numeric table, written as CSV when a trace directory is given.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Trace {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Trace {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Trace { name: name.into(), path: None, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| num(x)).collect());
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub outcome: Outcome,
    pub inputs: Value,
    pub results: Vec<Entry>,
    pub traces: Vec<Trace>,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            outcome: Outcome::Holds,
            inputs,
            results: Vec::new(),
            traces: Vec::new(),
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    pub fn entry(&self, name: &str) -> Option<&Entry> {
        self.results.iter().find(|e| e.name == name)
    }

    pub fn trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }

    /// Writes every trace to `dir/<command>_<trace>.csv` and records the path.
    pub fn write_traces(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for t in &mut self.traces {
            let path: PathBuf = dir.join(format!("{}_{}.csv", self.command, t.name));
            t.write_csv(&path)?;
            t.path = Some(path.display().to_string());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} ({})", self.command, serde_json::to_value(self.outcome).unwrap().as_str().unwrap());
        for e in &self.results {
            let _ = write!(s, "  {}:", e.name);
            if let Some(v) = &e.verdict {
                let _ = write!(s, " {v}");
            }
            if let Some(v) = &e.value {
                let _ = write!(s, " {}", v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()));
            }
            if let Some(m) = &e.mode {
                let _ = write!(s, " ({m})");
            }
            if let Some([lo, hi]) = &e.ci {
                let _ = write!(s, " ci [{lo}, {hi}]");
            }
            if let Some(d) = &e.detail {
                let _ = write!(s, " -- {d}");
            }
            s.push('\n');
        }
        for t in &self.traces {
            match &t.path {
                Some(p) => {
                    let _ = writeln!(s, "  trace {}: {} rows -> {p}", t.name, t.rows.len());
                }
                None => {
                    let _ = writeln!(s, "  trace {}: {}", t.name, t.columns.join(","));
                    for row in &t.rows {
                        let cells: Vec<String> = row.iter().map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string())).collect();
                        let _ = writeln!(s, "    {}", cells.join(","));
                    }
                }
            }
        }
        s
    }
}
