//! Deterministic CSV and JSON reports.

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::geometry::{QuadMethod, QuadratureSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: Vec<(String, f64)>,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A table of results with the configuration that produced it.
#[derive(Debug, Clone, Default)]
pub struct Report {
    config: Vec<(String, Value)>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
    checks: Vec<CheckResult>,
}

impl Report {
    /// Starts a report whose header records version, command, d, seed,
    /// method and node counts.
    pub fn new(command: &str, d: usize, seed: u64, quad: &QuadratureSpec) -> Self {
        let base = Self::default()
            .with("version", VERSION)
            .with("command", command)
            .with("d", d)
            .with("seed", seed);
        match quad.method {
            QuadMethod::MonteCarlo => base
                .with("method", "monte_carlo")
                .with("samples", quad.n_outer),
            QuadMethod::ProductSlicing => base
                .with("method", "product_slicing")
                .with("n_outer", quad.n_outer)
                .with("n_inner", quad.n_inner)
                .with("n_radial", quad.n_radial)
                .with("pole_decades", quad.pole_decades),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.config.push((key.to_string(), value.into()));
        self
    }

    pub fn columns(mut self, names: &[&str]) -> Self {
        self.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_check(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn checks(&self) -> &[CheckResult] {
        &self.checks
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// SHA-256 (first 16 hex digits) of the configuration entries.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(&self.config).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        hex::encode(&digest[..8])
    }

    fn config_entries(&self) -> Vec<(String, Value)> {
        let mut entries = self.config.clone();
        entries.push(("content_hash".into(), self.content_hash().into()));
        entries
    }

    pub fn to_json(&self) -> String {
        let config: Vec<Value> = self
            .config_entries()
            .into_iter()
            .map(|(k, v)| json!({ "key": k, "value": v }))
            .collect();
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    m.insert(c.clone(), v.clone());
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({
            "config": config,
            "results": results,
            "checks": self.checks,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    /// One `#` metadata line, the header row, the rows, then one `#` line per check.
    pub fn to_csv(&self) -> String {
        let meta: Vec<String> = self
            .config_entries()
            .iter()
            .map(|(k, v)| format!("{k}={}", plain(v)))
            .collect();
        let mut out = format!("# {}\n", meta.join("; "));
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(
                &row.iter()
                    .map(|v| csv_field(&plain(v)))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        for c in &self.checks {
            out.push_str(&format!("# {}\n", c.line()));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("mu-hat", 5, 42, &QuadratureSpec::default())
            .columns(&["R", "|mu_hat|", "note"]);
        r.push_row(vec![2.5.into(), 0.125.into(), "a,b".into()]);
        r.push_check(CheckResult {
            id: 1,
            name: "x".into(),
            passed: true,
            detail: "ok".into(),
            metrics: vec![],
        });
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# version="));
        assert!(lines[0].contains("seed=42") && lines[0].contains("n_radial=32"));
        assert_eq!(lines[1], "R,|mu_hat|,note");
        assert_eq!(lines[2], "2.5,0.125,\"a,b\"");
        assert!(lines[3].starts_with("# criterion  1 [PASS]"));
    }

    #[test]
    fn json_layout_and_hash() {
        let r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["config", "results", "checks"] {
            assert!(v[key].is_array());
        }
        assert_eq!(v["results"][0]["R"], 2.5);
        assert_eq!(r.content_hash(), sample().content_hash());
        assert_ne!(r.content_hash(), sample().with("extra", 1).content_hash());
    }
}
