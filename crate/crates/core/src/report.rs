use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// Outcome of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Serialize `f64` with non-finite values as strings so the document stays valid JSON.
pub fn serialize_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub(crate) fn serialize_status<S: Serializer>(v: &Status, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Status::Pass => s.serialize_bool(true),
        Status::Fail => s.serialize_bool(false),
        Status::NotApplicable => s.serialize_none(),
    }
}

fn serialize_constants<S: Serializer>(v: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(v.len()))?;
    for (k, x) in v {
        map.serialize_entry(k, &F64(*x))?;
    }
    map.end()
}

struct F64(f64);

impl Serialize for F64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, s)
    }
}

/// One named check in an [`AuditReport`].
///
/// `pass` serializes as `true`, `false` or `null` (not applicable).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(rename = "pass", serialize_with = "serialize_status")]
    pub status: Status,
    #[serde(serialize_with = "serialize_f64")]
    pub measured: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
    pub anchor: String,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, status: Status, measured: f64, tolerance: f64, anchor: &str) -> Self {
        Self {
            name: name.to_string(),
            status,
            measured,
            tolerance,
            anchor: anchor.to_string(),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn not_applicable(name: &str, anchor: &str, why: impl Into<String>) -> Self {
        Self::new(name, Status::NotApplicable, f64::NAN, f64::NAN, anchor).with_detail(why)
    }
}

/// A collection of checks plus named constants, merged deterministically by check name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<Check>,
    #[serde(serialize_with = "serialize_constants")]
    pub constants: BTreeMap<String, f64>,
}

impl AuditReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    /// Appends `other` and re-sorts checks by name. Later constants win on key clashes.
    pub fn merge(&mut self, other: AuditReport) {
        self.checks.extend(other.checks);
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.constants.extend(other.constants);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// True when no check failed. Not-applicable checks do not count as failures.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_sorts_by_name() {
        let mut a = AuditReport::new();
        a.push(Check::new("zeta", Status::Pass, 0.0, 0.0, "x"));
        let mut b = AuditReport::new();
        b.push(Check::new("alpha", Status::Fail, 1.0, 0.0, "y"));
        b.constant("m", 2.0);
        a.merge(b);
        assert_eq!(a.checks[0].name, "alpha");
        assert_eq!(a.constants["m"], 2.0);
        assert!(!a.all_pass());
    }

    #[test]
    fn not_applicable_is_not_a_failure() {
        let mut a = AuditReport::new();
        a.push(Check::not_applicable("c", "x", "tied"));
        assert!(a.all_pass());
    }
}
