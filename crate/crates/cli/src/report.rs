use serde::Serialize;
use serde_json::{Map, Value};

use freeprob::characterize::IdentityReport;

#[derive(Debug, Clone, Serialize)]
pub struct IdentityLine {
    pub name: String,
    pub residual_max: f64,
    pub pass: bool,
}

/// Canonical JSON report. `data` carries command-specific payloads and is
/// omitted when empty.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub identities: Vec<IdentityLine>,
    pub wall_time_ms: u64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report { command: command.into(), params: Map::new(), seed, identities: Vec::new(), wall_time_ms: 0, data: Value::Null }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.into(), serde_json::to_value(value).expect("parameters serialize"));
        self
    }

    /// `residual_max ≤ tol`; NaN fails.
    pub fn check(&mut self, name: &str, residual_max: f64, tol: f64) {
        self.identities.push(IdentityLine { name: name.into(), residual_max, pass: residual_max <= tol });
    }

    pub fn extend_from(&mut self, rep: &IdentityReport) {
        self.identities.extend(rep.identities.iter().map(|i| IdentityLine {
            name: i.name.clone(),
            residual_max: i.residual_max,
            pass: i.pass,
        }));
    }

    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|i| i.pass)
    }
}

/// Largest `|a_i - b_i| / max(1, |b_i|)`.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::NAN;
    }
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| {
        let r = (x - y).abs() / y.abs().max(1.0);
        if r.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(r)
        }
    })
}
