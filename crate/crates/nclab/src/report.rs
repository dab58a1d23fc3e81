//! Verification reports and their deterministic serializations.
//!
//! JSON keys are emitted in lexicographic order, floats with 17 significant
//! digits, non-finite values as `null`. Nothing time- or host-dependent
//! enters a report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// Estimate-versus-estimate disagreement beyond slack: reported, not fatal.
    Flagged,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Flagged => "flagged",
            Verdict::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(config_text: &str, seed: u64) -> Self {
        let digest = Sha256::digest(config_text.as_bytes());
        Self {
            config_sha256: digest.iter().fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            }),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub constants: BTreeMap<String, f64>,
    pub margins: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub notes: BTreeMap<String, String>,
    /// Bulk data (profiles, per-sample records).
    pub data: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            suite: suite.into(),
            constants: BTreeMap::new(),
            margins: BTreeMap::new(),
            verdicts: BTreeMap::new(),
            notes: BTreeMap::new(),
            data: BTreeMap::new(),
            provenance,
        }
    }

    pub fn constant(&mut self, name: &str, value: f64) -> &mut Self {
        self.constants.insert(name.into(), value);
        self
    }

    pub fn margin(&mut self, name: &str, value: f64) -> &mut Self {
        self.margins.insert(name.into(), value);
        self
    }

    pub fn verdict(&mut self, name: &str, v: Verdict) -> &mut Self {
        self.verdicts.insert(name.into(), v);
        self
    }

    /// Exact check: pass or fail.
    pub fn check(&mut self, name: &str, ok: bool) -> &mut Self {
        self.verdict(name, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    /// Estimate-based check: pass or flagged.
    pub fn check_estimate(&mut self, name: &str, ok: bool) -> &mut Self {
        self.verdict(name, if ok { Verdict::Pass } else { Verdict::Flagged })
    }

    pub fn note(&mut self, name: &str, text: impl Into<String>) -> &mut Self {
        self.notes.insert(name.into(), text.into());
        self
    }

    pub fn data(&mut self, name: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.data.insert(name.into(), v);
        self
    }

    pub fn failed(&self) -> bool {
        self.verdicts.values().any(|v| *v == Verdict::Fail)
    }

    pub fn worst(&self) -> Verdict {
        self.verdicts.values().copied().max().unwrap_or(Verdict::Pass)
    }

    pub fn to_value(&self) -> Value {
        let floats = |m: &BTreeMap<String, f64>| Value::Object(m.iter().map(|(k, v)| (k.clone(), float(*v))).collect());
        let mut root = serde_json::Map::new();
        root.insert("suite".into(), Value::String(self.suite.clone()));
        root.insert("constants".into(), floats(&self.constants));
        root.insert("margins".into(), floats(&self.margins));
        root.insert(
            "verdicts".into(),
            Value::Object(self.verdicts.iter().map(|(k, v)| (k.clone(), Value::String(v.as_str().into()))).collect()),
        );
        if !self.notes.is_empty() {
            root.insert(
                "notes".into(),
                Value::Object(self.notes.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()),
            );
        }
        if !self.data.is_empty() {
            root.insert("data".into(), Value::Object(self.data.clone().into_iter().collect()));
        }
        root.insert("provenance".into(), serde_json::to_value(&self.provenance).unwrap_or(Value::Null));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        to_json(&self.to_value())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} ({})\n", self.suite, self.worst().as_str());
        let _ = writeln!(s, "| verdict | result |\n|---|---|");
        for (k, v) in &self.verdicts {
            let _ = writeln!(s, "| {k} | {} |", v.as_str());
        }
        if !self.constants.is_empty() {
            let _ = writeln!(s, "\n| constant | value |\n|---|---|");
            for (k, v) in &self.constants {
                let _ = writeln!(s, "| {k} | {} |", number(*v));
            }
        }
        if !self.margins.is_empty() {
            let _ = writeln!(s, "\n| margin | value |\n|---|---|");
            for (k, v) in &self.margins {
                let _ = writeln!(s, "| {k} | {} |", number(*v));
            }
        }
        for (k, v) in &self.notes {
            let _ = writeln!(s, "\n- {k}: {v}");
        }
        let _ = writeln!(
            s,
            "\nconfig sha256 `{}`, seed {}",
            self.provenance.config_sha256, self.provenance.seed
        );
        s
    }
}

fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

/// Pretty JSON with sorted keys and `{:.16e}` floats.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i), _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&number(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(i, depth, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(i, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(&map[*key], depth + 1, out);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// RFC 4180 CSV of the ultracontractivity profile.
pub fn profile_csv(t: &[f64], norms: &[f64], certificates: &[&str]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "norm", "certificate"])?;
    for ((t, v), c) in t.iter().zip(norms).zip(certificates) {
        w.write_record([number(*t), number(*v), c.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_sorted_and_fixed_precision() {
        let mut r = VerificationReport::new("demo", Provenance::new("{}", 3));
        r.constant("z", 0.1).constant("a", f64::INFINITY).check("ok", true).check_estimate("loose", false);
        r.data("grid", vec![1.0, 2.5]);
        let s = r.to_json();
        assert!(s.find("\"a\"").unwrap() < s.find("\"z\"").unwrap());
        assert!(s.contains("\"a\": null"));
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("[1.0000000000000000e0, 2.5000000000000000e0]"));
        assert!(s.contains("\"seed\": 3"));
        assert_eq!(r.worst(), Verdict::Flagged);
        assert!(!r.failed());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["verdicts"]["loose"], "flagged");
    }

    #[test]
    fn sha_is_stable() {
        assert_eq!(
            Provenance::new("abc", 0).config_sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_header() {
        let s = profile_csv(&[1.0], &[2.0], &["exact"]).unwrap();
        assert_eq!(s.lines().next(), Some("t,norm,certificate"));
        assert_eq!(s.lines().count(), 2);
    }
}
