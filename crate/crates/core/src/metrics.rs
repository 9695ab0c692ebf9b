//! Evaluation metric family: binary macro P/R/F1 and the per-label
//! positive/negative/macro F1 scheme for multilabel classification.
//!
//! 0/0-valued precision/recall/F1 terms are defined as 0, except the
//! fully degenerate per-label F1 cases (see [`BinaryCounts::f1_pos`]),
//! which are vacuously perfect. Internal
//! values stay full precision; [`percent1`] is the presentation rounding
//! used for reported percentages.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("gold and prediction sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("label {0} outside the declared inventory")]
    UnknownLabel(String),
}

/// Confusion counts for one label treated as a binary problem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl BinaryCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// F1 over positive presence: 2tp / (2tp + fp + fn). A label absent
    /// from gold and predictions alike (tp = fp = fn = 0) is vacuously
    /// perfect, so the degenerate form scores 1 rather than 0 — this
    /// keeps "perfect predictions score 1" true on every instance set.
    pub fn f1_pos(&self) -> f64 {
        if self.tp + self.fp + self.fn_ == 0 {
            1.0
        } else {
            ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
        }
    }

    /// F1 over correct absence: 2tn / (2tn + fp + fn); the degenerate
    /// all-positive case (tn = fp = fn = 0) is vacuously perfect.
    pub fn f1_neg(&self) -> f64 {
        if self.tn + self.fp + self.fn_ == 0 {
            1.0
        } else {
            ratio(2 * self.tn, 2 * self.tn + self.fp + self.fn_)
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-label positive/negative/macro F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics<L> {
    pub label: L,
    pub f1_pos: f64,
    pub f1_neg: f64,
    /// Exactly (f1_pos + f1_neg) / 2.
    pub macro_f1: f64,
}

/// Full multilabel evaluation report over a declared inventory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport<L: Ord> {
    pub per_label: Vec<LabelMetrics<L>>,
    /// Mean per-label macro F1 over the full inventory, including labels
    /// absent from gold.
    pub macro_all: f64,
    pub counts: BTreeMap<L, BinaryCounts>,
}

/// Macro-averaged precision, recall and F1 over the classes present in
/// gold or predictions. Zero-denominator terms count as 0.
pub fn binary_macro_prf<L: Ord + Clone>(
    gold: &[L],
    pred: &[L],
) -> Result<(f64, f64, f64), MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch(gold.len(), pred.len()));
    }
    if gold.is_empty() {
        return Err(MetricsError::Empty);
    }
    let classes: BTreeSet<&L> = gold.iter().chain(pred.iter()).collect();
    let mut p_sum = 0.0;
    let mut r_sum = 0.0;
    let mut f_sum = 0.0;
    for class in &classes {
        let mut counts = BinaryCounts::default();
        for (g, p) in gold.iter().zip(pred) {
            match (g == *class, p == *class) {
                (true, true) => counts.tp += 1,
                (false, true) => counts.fp += 1,
                (true, false) => counts.fn_ += 1,
                (false, false) => counts.tn += 1,
            }
        }
        let precision = counts.precision();
        let recall = counts.recall();
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        p_sum += precision;
        r_sum += recall;
        f_sum += f1;
    }
    let k = classes.len() as f64;
    Ok((p_sum / k, r_sum / k, f_sum / k))
}

/// Per-label positive/negative/macro F1 over label sets, averaged over
/// the full declared inventory.
pub fn multilabel_report<L: Ord + Clone + std::fmt::Display>(
    gold: &[BTreeSet<L>],
    pred: &[BTreeSet<L>],
    inventory: &[L],
) -> Result<EvaluationReport<L>, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::LengthMismatch(gold.len(), pred.len()));
    }
    let declared: BTreeSet<&L> = inventory.iter().collect();
    for set in gold.iter().chain(pred.iter()) {
        for label in set {
            if !declared.contains(label) {
                return Err(MetricsError::UnknownLabel(label.to_string()));
            }
        }
    }
    let mut per_label = Vec::with_capacity(inventory.len());
    let mut counts_map = BTreeMap::new();
    let mut macro_sum = 0.0;
    for label in inventory {
        let mut counts = BinaryCounts::default();
        for (g, p) in gold.iter().zip(pred) {
            match (g.contains(label), p.contains(label)) {
                (true, true) => counts.tp += 1,
                (false, true) => counts.fp += 1,
                (true, false) => counts.fn_ += 1,
                (false, false) => counts.tn += 1,
            }
        }
        let f1_pos = counts.f1_pos();
        let f1_neg = counts.f1_neg();
        let macro_f1 = (f1_pos + f1_neg) / 2.0;
        macro_sum += macro_f1;
        per_label.push(LabelMetrics {
            label: label.clone(),
            f1_pos,
            f1_neg,
            macro_f1,
        });
        counts_map.insert(label.clone(), counts);
    }
    Ok(EvaluationReport {
        per_label,
        macro_all: macro_sum / inventory.len() as f64,
        counts: counts_map,
    })
}

/// Presentation rounding: a fraction in [0, 1] to a percentage with one
/// decimal, truncated toward zero (the convention the reference result
/// tables follow; 0.369565 prints as 36.9, not 37.0). A tiny epsilon
/// absorbs float noise just below a tenth boundary.
pub fn percent1(fraction: f64) -> f64 {
    (fraction * 1000.0 + 1e-6).floor() / 10.0
}
