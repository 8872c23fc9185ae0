use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::claim::{Target, Tolerance};
use crate::error::Result;

/// Summary statistics of the observed values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Stats {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            stddev: var.sqrt(),
        })
    }
}

/// The sample that came closest to (or furthest past) the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstSample {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    pub observed: f64,
    pub scale: f64,
    /// Distance from the target in the direction that matters.
    pub deviation: f64,
    /// The deviation permitted at this sample.
    pub allowed: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

/// Verdict of one claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub id: String,
    pub statement: String,
    pub quantity: String,
    pub metric: String,
    pub pass: bool,
    pub target: Target,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub samples: usize,
    pub evaluated: usize,
    pub failures: usize,
    pub stats: Option<Stats>,
    pub worst: Option<WorstSample>,
    pub runtime_seconds: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Aggregate of a suite run, claims sorted by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub pass: bool,
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub runtime_seconds: f64,
    pub claims: Vec<ClaimReport>,
}

impl SuiteReport {
    pub fn from_reports(mut claims: Vec<ClaimReport>, runtime_seconds: f64) -> Self {
        claims.sort_by(|a, b| a.id.cmp(&b.id));
        let failed: Vec<String> = claims.iter().filter(|c| !c.pass).map(|c| c.id.clone()).collect();
        SuiteReport {
            pass: failed.is_empty(),
            total: claims.len(),
            passed: claims.len() - failed.len(),
            failed,
            runtime_seconds,
            claims,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// One row per claim.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "id",
            "pass",
            "quantity",
            "metric",
            "samples",
            "evaluated",
            "failures",
            "min",
            "max",
            "mean",
            "stddev",
            "worst_observed",
            "worst_deviation",
            "worst_allowed",
            "tolerance",
            "tolerance_kind",
            "seed",
            "runtime_seconds",
            "diagnostic",
        ])?;
        let num = |v: Option<f64>| v.map(|v| format!("{v:.12e}")).unwrap_or_default();
        for c in &self.claims {
            let s = c.stats;
            let worst = c.worst.as_ref();
            w.write_record([
                c.id.clone(),
                c.pass.to_string(),
                c.quantity.clone(),
                c.metric.clone(),
                c.samples.to_string(),
                c.evaluated.to_string(),
                c.failures.to_string(),
                num(s.map(|s| s.min)),
                num(s.map(|s| s.max)),
                num(s.map(|s| s.mean)),
                num(s.map(|s| s.stddev)),
                num(worst.map(|w| w.observed)),
                num(worst.map(|w| w.deviation)),
                num(worst.map(|w| w.allowed)),
                format!("{:e}", c.tolerance.value),
                format!("{:?}", c.tolerance.kind).to_lowercase(),
                c.seed.to_string(),
                format!("{:.3}", c.runtime_seconds),
                c.diagnostic.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_values() {
        let s = Stats::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean), (1.0, 3.0, 2.0));
        assert!((s.stddev - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Stats::of(&[]).is_none());
    }

    #[test]
    fn empty_suite_passes() {
        let r = SuiteReport::from_reports(Vec::new(), 0.0);
        assert!(r.pass);
        assert_eq!(r.total, 0);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1);
    }
}
