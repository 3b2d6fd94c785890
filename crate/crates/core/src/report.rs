use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Aggregated residuals of one named check over a point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check_name: String,
    pub count: usize,
    pub skipped: usize,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: String,
    /// Points evaluated but marked (e.g. clamped b(f)).
    #[serde(default)]
    pub flagged: usize,
    /// Ungated diagnostic numbers.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl ResidualReport {
    /// Same report with a different gate; `pass` is recomputed.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.max <= tolerance;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.check_name = name.into();
        self
    }

    pub fn attempted(&self) -> usize {
        self.count + self.skipped
    }
}

/// Accumulates per-point residuals in submission order.
#[derive(Clone, Debug)]
pub struct ReportBuilder {
    name: String,
    tolerance: f64,
    provenance: String,
    residuals: Vec<f64>,
    skipped: usize,
    flagged: usize,
    diagnostics: BTreeMap<String, f64>,
}

impl ReportBuilder {
    pub fn new(name: impl Into<String>, tolerance: f64, provenance: impl Into<String>) -> Self {
        ReportBuilder {
            name: name.into(),
            tolerance,
            provenance: provenance.into(),
            residuals: Vec::new(),
            skipped: 0,
            flagged: 0,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, residual: f64) {
        self.residuals.push(residual);
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn flag(&mut self) {
        self.flagged += 1;
    }

    pub fn diagnostic(&mut self, key: impl Into<String>, value: f64) {
        self.diagnostics.insert(key.into(), value);
    }

    /// Keeps the largest value seen under `key`.
    pub fn diagnostic_max(&mut self, key: &str, value: f64) {
        let e = self.diagnostics.entry(key.to_string()).or_insert(value);
        if value > *e || value.is_nan() {
            *e = value;
        }
    }

    pub fn finish(self) -> ResidualReport {
        let count = self.residuals.len();
        // NaN must never pass
        let max = self.residuals.iter().fold(0.0_f64, |m, &r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r) });
        let mean = if count == 0 { 0.0 } else { pairwise_sum(&self.residuals) / count as f64 };
        ResidualReport {
            check_name: self.name,
            count,
            skipped: self.skipped,
            max,
            mean,
            tolerance: self.tolerance,
            pass: max <= self.tolerance,
            provenance: self.provenance,
            flagged: self.flagged,
            diagnostics: self.diagnostics,
        }
    }
}

/// Pairwise (cascade) summation; fixed association order for a given length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
