//! Suite reports and their byte-stable JSON encoding.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One verified property. Fields are declared in key order so the derived
/// serializer emits sorted keys.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub details: String,
    pub max_error: f64,
    pub name: String,
    pub status: Status,
    pub tolerance: f64,
}

impl Case {
    /// Passes when `max_error ≤ tolerance`; NaN never passes.
    pub fn measured(name: impl Into<String>, max_error: f64, tolerance: f64, details: impl Into<String>) -> Self {
        let status = if max_error <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            details: details.into(),
            max_error,
            name: name.into(),
            status,
            tolerance,
        }
    }

    /// Counts violations of a yes/no property.
    pub fn counted(name: impl Into<String>, violations: usize, checks: usize, what: &str) -> Self {
        Self::measured(name, violations as f64, 0.0, format!("{violations} of {checks} {what} violated"))
    }

    /// A deliberately broken variant: passes when its error exceeds the
    /// tolerance, i.e. when the check catches it.
    pub fn mutant(name: impl Into<String>, max_error: f64, tolerance: f64, what: &str) -> Self {
        let flagged = max_error > tolerance;
        Self {
            details: if flagged {
                format!("{what}: flagged")
            } else {
                format!("{what}: not flagged")
            },
            max_error,
            name: name.into(),
            status: if flagged { Status::Pass } else { Status::Fail },
            tolerance,
        }
    }

    pub fn errored(name: impl Into<String>, err: &Error) -> Self {
        Self {
            details: format!("error: {err}"),
            max_error: f64::NAN,
            name: name.into(),
            status: Status::Fail,
            tolerance: 0.0,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            details: reason.into(),
            max_error: 0.0,
            name: name.into(),
            status: Status::Skipped,
            tolerance: 0.0,
        }
    }
}

/// Configuration as recorded in a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(rename = "N")]
    pub n: usize,
    pub dims: [usize; 2],
    pub grid_step: f64,
    pub model: String,
    pub seed: u64,
    pub tol: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub cases: Vec<Case>,
    pub config: ConfigEcho,
    pub suite: String,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, config: ConfigEcho, mut cases: Vec<Case>) -> Self {
        cases.sort_by(|a, b| a.name.cmp(&b.name));
        Self {
            cases,
            config,
            suite: suite.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Pretty printer with every float written as `{:.16e}`, i.e. 17
/// significant digits.
pub struct FixedFloatFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for FixedFloatFormatter<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for FixedFloatFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialises any value with sorted keys (struct fields are declared in
/// order, maps are `BTreeMap`s) and fixed float formatting.
pub fn to_json_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit_report(report: &SuiteReport, path: Option<&Path>) -> io::Result<()> {
    let bytes = to_json_bytes(report).map_err(io::Error::other)?;
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => io::stdout().lock().write_all(&bytes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo() -> ConfigEcho {
        ConfigEcho {
            dims: [1, 4],
            grid_step: 0.25,
            model: "both".into(),
            n: 32,
            seed: 7,
            tol: 1e-10,
            trials: 10,
        }
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = SuiteReport::new("jordan", echo(), vec![]);
        let text = String::from_utf8(to_json_bytes(&r).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["cases"], serde_json::json!([]));
        assert_eq!(v["suite"], "jordan");
        assert!(text.contains("\"tol\": 1.0000000000000000e-10"));
    }

    #[test]
    fn cases_are_sorted_and_keys_ordered() {
        let r = SuiteReport::new(
            "x",
            echo(),
            vec![Case::measured("b", 0.0, 1.0, ""), Case::measured("a", 2.0, 1.0, "")],
        );
        assert_eq!(r.cases[0].name, "a");
        assert!(!r.passed());
        let text = String::from_utf8(to_json_bytes(&r).unwrap()).unwrap();
        let keys: Vec<usize> = ["\"cases\"", "\"config\"", "\"suite\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn non_finite_errors_become_null() {
        let c = Case::errored("e", &Error::Numerical("x".into()));
        let text = String::from_utf8(to_json_bytes(&c).unwrap()).unwrap();
        assert!(text.contains("\"max_error\": null"));
    }

    #[test]
    fn mutants_pass_only_when_flagged() {
        assert_eq!(Case::mutant("m", 1.0, 1e-9, "w").status, Status::Pass);
        assert_eq!(Case::mutant("m", 0.0, 1e-9, "w").status, Status::Fail);
    }
}
