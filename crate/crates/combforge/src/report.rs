use std::str::FromStr;

use combforge_core::check::{Check, Relation};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Config(format!("unknown report format {s:?} (json or csv)"))),
        }
    }
}

/// Parameters echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub budget_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub passed: bool,
    pub n_checks: usize,
    pub n_failed: usize,
    pub checks: Vec<Check>,
    /// Wall-clock time; the only field allowed to differ between reruns.
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(suite: &str, config: ConfigEcho, checks: Vec<Check>, runtime_ms: u64) -> Self {
        let n_failed = checks.iter().filter(|c| !c.passed).count();
        VerificationReport {
            suite: suite.to_string(),
            config,
            passed: n_failed == 0 && !checks.is_empty(),
            n_checks: checks.len(),
            n_failed,
            checks,
            runtime_ms,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per check.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "name", "params", "value", "limit", "relation", "passed", "exact"])?;
        for c in &self.checks {
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let relation = match c.relation {
                Relation::AtMost => "at_most",
                Relation::AtLeast => "at_least",
            };
            w.write_record([
                self.suite.as_str(),
                c.name.as_str(),
                &params.join(";"),
                &c.value.to_string(),
                &c.limit.to_string(),
                relation,
                &c.passed.to_string(),
                &c.exact.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

/// JSON text with every `runtime_ms` field removed, for rerun comparisons.
pub fn strip_timing(json: &str) -> Result<String> {
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(map) => {
                map.remove("runtime_ms");
                map.values_mut().for_each(strip);
            }
            serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    strip(&mut v);
    Ok(serde_json::to_string(&v)?)
}
