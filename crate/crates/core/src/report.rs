//! Serialized forms of [`EvaluationReport`]: flat `key = value` text, CSV
//! rows in the per-subject result table layouts, and JSON.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metrics::{BandPowers, EvaluationReport};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v}"))
}

fn ser_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&opt(*v))
}

/// Flat text document. `context` pairs (tool version, seed, effective
/// configuration and so on) are written first, in order. Ground-truth
/// metrics are left out when absent.
pub fn to_key_value(report: &EvaluationReport, context: &[(&str, String)]) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    for (k, v) in context {
        put(k, v.clone());
    }
    if let (Some(e), Some(c)) = (report.rrmse_pct, report.cc) {
        put("rrmse_pct", format!("{e}"));
        put("cc", format!("{c}"));
    }
    let mut bands = |prefix: &str, b: &BandPowers| {
        for (name, v) in b.iter() {
            put(&format!("band_power.{prefix}.{name}"), format!("{v}"));
        }
    };
    bands("contaminated", &report.band_power_contaminated);
    bands("cleaned", &report.band_power_cleaned);
    if let Some(gt) = &report.band_power_ground_truth {
        bands("ground_truth", gt);
    }
    put("blinks_before", report.blinks_before.to_string());
    put("blinks_after", report.blinks_after.to_string());
    put("reduction_pct", opt(report.reduction_pct));
    put("elapsed_s", opt(report.elapsed_s));
    out
}

/// Context pairs followed by the report, as one JSON object.
pub fn to_json(report: &EvaluationReport, context: &[(&str, String)]) -> Result<String> {
    let mut map = serde_json::Map::new();
    for (k, v) in context {
        map.insert(k.to_string(), serde_json::Value::String(v.clone()));
    }
    let value = serde_json::to_value(report).map_err(|e| Error::Format(e.to_string()))?;
    map.insert("report".into(), value);
    serde_json::to_string_pretty(&map).map_err(|e| Error::Format(e.to_string()))
}

/// Signal-quality row: `Subject, Channel, RRMSE (%), CC`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityRow {
    #[serde(rename = "Subject")]
    pub subject: String,
    #[serde(rename = "Channel")]
    pub channel: String,
    #[serde(rename = "RRMSE (%)", serialize_with = "ser_opt")]
    pub rrmse_pct: Option<f64>,
    #[serde(rename = "CC", serialize_with = "ser_opt")]
    pub cc: Option<f64>,
}

/// Blink row: counts before and after, reduction and processing time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlinkRow {
    #[serde(rename = "Subject")]
    pub subject: String,
    #[serde(rename = "Channel")]
    pub channel: String,
    #[serde(rename = "Blinks before")]
    pub blinks_before: usize,
    #[serde(rename = "Blinks after")]
    pub blinks_after: usize,
    #[serde(rename = "Reduction (%)", serialize_with = "ser_opt")]
    pub reduction_pct: Option<f64>,
    #[serde(rename = "Time (s)", serialize_with = "ser_opt")]
    pub time_s: Option<f64>,
}

impl QualityRow {
    pub fn new(subject: &str, channel: &str, report: &EvaluationReport) -> Self {
        Self {
            subject: subject.into(),
            channel: channel.into(),
            rrmse_pct: report.rrmse_pct,
            cc: report.cc,
        }
    }
}

impl BlinkRow {
    pub fn new(subject: &str, channel: &str, report: &EvaluationReport) -> Self {
        Self {
            subject: subject.into(),
            channel: channel.into(),
            blinks_before: report.blinks_before,
            blinks_after: report.blinks_after,
            reduction_pct: report.reduction_pct,
            time_s: report.elapsed_s,
        }
    }
}

/// CSV with a header line. Works for any serializable row type.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}
