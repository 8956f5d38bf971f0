//! Check records, reports and canonical JSON.

use std::fmt::{Display, Write as _};
use std::path::Path;

use num_complex::Complex64;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::algebra::Rational;
use crate::error::HarnessError;
use crate::numerics::theta::CMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// pass when measured <= tolerance
    AtMost,
    /// pass when measured > tolerance (negative controls, separations)
    Exceeds,
}

/// One verification result.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub name: String,
    pub paper_ref: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub comparison: Comparison,
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, paper_ref: &str, measured: f64, tolerance: f64) -> Self {
        CheckRecord {
            name: name.into(),
            paper_ref: paper_ref.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
            comparison: Comparison::AtMost,
            detail: None,
        }
    }

    pub fn exceeds(name: impl Into<String>, paper_ref: &str, measured: f64, bound: f64) -> Self {
        CheckRecord {
            name: name.into(),
            paper_ref: paper_ref.into(),
            measured,
            tolerance: bound,
            pass: measured > bound,
            comparison: Comparison::Exceeds,
            detail: None,
        }
    }

    /// An exact identity: measured 0 when it holds, 1 otherwise.
    pub fn holds(name: impl Into<String>, paper_ref: &str, ok: bool) -> Self {
        Self::at_most(name, paper_ref, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    /// A check that could not be carried out.
    pub fn errored(name: impl Into<String>, paper_ref: &str, tolerance: f64, err: impl Display) -> Self {
        let mut r = Self::at_most(name, paper_ref, f64::NAN, tolerance);
        r.detail = Some(err.to_string());
        r
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    /// Re-evaluate against a new tolerance.
    pub fn retolerance(&mut self, tol: f64) {
        self.tolerance = tol;
        self.pass = match self.comparison {
            Comparison::AtMost => self.measured <= tol,
            Comparison::Exceeds => self.measured > tol,
        };
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("paper_ref".into(), Value::String(self.paper_ref.clone()));
        m.insert("measured".into(), float(self.measured));
        m.insert("tolerance".into(), float(self.tolerance));
        m.insert("pass".into(), Value::Bool(self.pass));
        if self.comparison == Comparison::Exceeds {
            m.insert("comparison".into(), Value::String("exceeds".into()));
        }
        if let Some(d) = &self.detail {
            m.insert("detail".into(), Value::String(d.clone()));
        }
        Value::Object(m)
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::Exceeds => ">",
        };
        let mut s = format!(
            "[{}] {:<44} {:>11.3e} {op} {:.1e}",
            if self.pass { "pass" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        );
        if let Some(d) = &self.detail {
            let _ = write!(s, "  ({d})");
        }
        s
    }
}

/// The outcome of one run.
#[derive(Clone, Debug)]
pub struct Report {
    pub version: String,
    pub fingerprint: Option<String>,
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// wall-clock seconds; printed, never written into the canonical report
    pub elapsed: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("version".into(), Value::String(self.version.clone()));
        m.insert("fingerprint".into(), self.fingerprint.clone().map(Value::String).unwrap_or(Value::Null));
        m.insert("suite".into(), Value::String(self.suite.clone()));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(|c| c.to_json()).collect()));
        m.insert("pass".into(), Value::Bool(self.all_pass()));
        Value::Object(m)
    }
}

/// Write the report as canonical JSON.
pub fn emit_report(r: &Report, path: &Path) -> Result<(), HarnessError> {
    let mut s = canonical_string(&r.to_json());
    s.push('\n');
    std::fs::write(path, s).map_err(HarnessError::Io)
}

/// Hex SHA-256 of a string.
pub fn fingerprint(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

pub fn cvec(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

pub fn cmat(m: &CMat) -> Value {
    Value::Array(m.iter().map(|r| cvec(r)).collect())
}

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

/// 17 significant digits, integral values without exponent noise.
fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    format!("{x:.16e}")
}

/// Sorted keys, no whitespace, floats with 17 significant digits.
pub fn canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(a) => {
            out.push('[');
            for (k, x) in a.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).unwrap());
                out.push(':');
                write_canonical(&m[*key], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let v: Value = serde_json::from_str(r#"{"b":[1,0.1,null],"a":{"y":true,"x":"1/3"}}"#).unwrap();
        assert_eq!(canonical_string(&v), r#"{"a":{"x":"1/3","y":true},"b":[1,1.0000000000000001e-1,null]}"#);
        let back: Value = serde_json::from_str(&canonical_string(&v)).unwrap();
        assert_eq!(back["b"][1].as_f64(), Some(0.1));
    }

    #[test]
    fn records() {
        let r = CheckRecord::at_most("x", "r", f64::NAN, 1.0);
        assert!(!r.pass);
        assert_eq!(r.to_json()["measured"], Value::Null);
        let mut c = CheckRecord::exceeds("neg", "r", 0.5, 0.1);
        assert!(c.pass);
        c.retolerance(0.6);
        assert!(!c.pass);
        assert_eq!(fingerprint("abc").len(), 64);
    }
}
