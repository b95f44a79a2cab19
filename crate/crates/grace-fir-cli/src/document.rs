//! On-disk formats: the JSON filter document and CSV tap files.

use grace_fir::{CoefficientVector, CompensationReport, FilterMetrics};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

/// A designed filter with its provenance, serialized as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterDocument {
    pub format_version: u32,
    pub spec: SpecInfo,
    /// All `2m + 1` taps; JSON floats round-trip exactly.
    pub coefficients: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compensation: Option<CompensationInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsInfo>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpecInfo {
    pub m: usize,
    pub n: u32,
    pub p: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompensationInfo {
    pub applied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub step_reached: u32,
    pub accepted: bool,
    pub singular_values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsInfo {
    pub f_r: f64,
    pub f_c: f64,
    pub rolloff_db_per_octave: f64,
    pub first_sidelobe_db: f64,
    pub derivative_magnitudes: Vec<f64>,
}

impl CompensationInfo {
    pub fn from_report(report: &CompensationReport, applied: bool, q: Option<usize>) -> Self {
        CompensationInfo {
            applied,
            q,
            step_reached: report.step_reached,
            accepted: report.accepted,
            singular_values: report.singular_values.clone(),
        }
    }
}

impl From<&FilterMetrics> for MetricsInfo {
    fn from(m: &FilterMetrics) -> Self {
        MetricsInfo {
            f_r: m.f_r,
            f_c: m.f_c,
            rolloff_db_per_octave: m.rolloff_db_per_octave,
            first_sidelobe_db: m.first_sidelobe_db,
            derivative_magnitudes: m.derivative_magnitudes.clone(),
        }
    }
}

/// Serialize one tap per line as `index,value` with 17 significant digits.
pub fn taps_to_csv(c: &CoefficientVector) -> String {
    let m = c.half_len() as isize;
    let mut out = String::new();
    for i in -m..=m {
        let _ = writeln!(out, "{},{:.16e}", i, c.tap(i));
    }
    out
}

/// Parse taps from CSV (`index,value` or bare `value` lines). Lines are
/// expected in ascending index order; blank lines are ignored.
pub fn taps_from_csv(text: &str) -> Result<CoefficientVector, String> {
    let mut taps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value_field = line.rsplit(',').next().unwrap().trim();
        let value: f64 = value_field
            .parse()
            .map_err(|e| format!("line {}: bad value {value_field:?}: {e}", lineno + 1))?;
        taps.push(value);
    }
    CoefficientVector::from_taps(taps).map_err(|e| e.to_string())
}

/// Load taps from a path holding either a JSON document or CSV.
pub fn load_taps(path: &Path) -> Result<(CoefficientVector, Option<FilterDocument>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let doc: FilterDocument = serde_json::from_str(&text)
            .map_err(|e| format!("{}: line {}: {e}", path.display(), e.line()))?;
        if doc.format_version > FORMAT_VERSION {
            return Err(format!(
                "{}: unsupported format_version {}",
                path.display(),
                doc.format_version
            ));
        }
        let taps = CoefficientVector::from_taps(doc.coefficients.clone())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        Ok((taps, Some(doc)))
    } else {
        let taps =
            taps_from_csv(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok((taps, None))
    }
}
