//! Run report: a single JSON document whose body depends only on the inputs
//! and the configuration. Wall-clock timings are kept out of it.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{Removal, SelectionConfig, SelectionResult, Termination, TraceRecord};
use crate::dataset::FeatureId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalMetrics {
    pub baseline_features: usize,
    pub reduced_features: usize,
    pub kept_features: Vec<FeatureId>,
    pub baseline_accuracy: f64,
    pub reduced_accuracy: f64,
    pub test_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub baseline_seconds: f64,
    pub reduced_seconds: f64,
    /// baseline / reduced.
    pub ratio: f64,
    pub repeats: usize,
}

impl Timing {
    pub fn new(baseline_seconds: f64, reduced_seconds: f64, repeats: usize) -> Self {
        let ratio = if reduced_seconds > 0.0 {
            baseline_seconds / reduced_seconds
        } else {
            f64::INFINITY
        };
        Timing {
            baseline_seconds,
            reduced_seconds,
            ratio,
            repeats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct T1Summary {
    pub calibrated_accuracy: f64,
    pub offset: f64,
    pub value: f64,
    pub by_round: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SelectionConfig,
    pub step_size: f64,
    pub t1: T1Summary,
    pub trace: Vec<TraceRecord>,
    pub removals: Vec<Removal>,
    pub removed_features: Vec<FeatureId>,
    pub surviving_features: Vec<FeatureId>,
    pub termination: Termination,
    pub final_metrics: FinalMetrics,
}

impl SelectionResult {
    pub fn report(&self) -> RunReport {
        RunReport {
            config: self.config.clone(),
            step_size: self.step_size,
            t1: T1Summary {
                calibrated_accuracy: self.calibrated_accuracy,
                offset: self.config.t1_offset,
                value: self.t1,
                by_round: self.t1_by_round.clone(),
            },
            trace: self.trace.clone(),
            removals: self.removals.clone(),
            removed_features: self.removed.clone(),
            surviving_features: self.surviving.clone(),
            termination: self.termination,
            final_metrics: self.evaluation.metrics.clone(),
        }
    }
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `iteration,round,feature,accuracy,beta,max_p` rows.
pub fn write_trace_csv<W: Write>(trace: &[TraceRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["iteration", "round", "feature", "accuracy", "beta", "max_p"])?;
    for t in trace {
        wtr.write_record([
            t.iteration.to_string(),
            t.round.to_string(),
            t.feature.to_string(),
            t.accuracy.to_string(),
            t.beta.to_string(),
            t.max_probability.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<trace csv>", e))?;
    Ok(())
}

/// Aligned baseline-vs-reduced comparison table.
pub fn comparison_table(metrics: &FinalMetrics, timing: Option<&Timing>) -> String {
    let kept = metrics
        .kept_features
        .iter()
        .map(FeatureId::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut rows = vec![
        ["".to_owned(), "baseline".to_owned(), "reduced".to_owned()],
        [
            "number of features".to_owned(),
            metrics.baseline_features.to_string(),
            metrics.reduced_features.to_string(),
        ],
        [
            "features".to_owned(),
            format!("1-{}", metrics.baseline_features),
            kept,
        ],
        [
            "accuracy".to_owned(),
            format!("{:.4}%", 100.0 * metrics.baseline_accuracy),
            format!("{:.4}%", 100.0 * metrics.reduced_accuracy),
        ],
    ];
    if let Some(t) = timing {
        rows.push([
            "test_time(s)".to_owned(),
            format!("{:.6}", t.baseline_seconds),
            format!("{:.6}", t.reduced_seconds),
        ]);
    }
    let widths: Vec<usize> = (0..3)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let _ = writeln!(
            out,
            "{:<w0$} | {:<w1$} | {:<w2$}",
            r[0],
            r[1],
            r[2],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        );
    }
    out
}
