//! Corpus analytics: argument-type distributions, holistic label
//! distributions, temporal trend series, and plot-ready CSV emission.
//!
//! Everything here is a pure function of (corpus, filter) and runs the
//! same code path whether labels are gold or pipeline-predicted.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ArgumentGroup, ArgumentType, Corpus, Court, Document, HolisticLabel};
use crate::metrics::percent1;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("unlabeled documents: {0:?}")]
    Unlabeled(Vec<String>),
    #[error("no arguments in the selected date range")]
    NoArguments,
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Paragraph-level frequency and document-level existence counts for
/// one argument type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDistribution {
    /// Number of paragraph annotations carrying the type.
    pub frequency: u64,
    /// Number of documents containing the type at least once.
    pub existence: u64,
}

/// Argument-type distribution, overall and per court.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub n_documents: u64,
    pub n_arguments: u64,
    pub overall: BTreeMap<ArgumentType, TypeDistribution>,
    pub per_court: BTreeMap<Court, BTreeMap<ArgumentType, TypeDistribution>>,
}

fn in_range(doc: &Document, date_filter: Option<(NaiveDate, NaiveDate)>) -> bool {
    match date_filter {
        Some((from, to)) => doc.decision_date >= from && doc.decision_date <= to,
        None => true,
    }
}

/// Counts how often each argument type occurs (paragraph annotations)
/// and in how many documents it appears, optionally restricted to an
/// inclusive date range.
pub fn argument_distribution(
    corpus: &Corpus,
    date_filter: Option<(NaiveDate, NaiveDate)>,
) -> DistributionReport {
    let mut overall: BTreeMap<ArgumentType, TypeDistribution> = ArgumentType::ALL
        .iter()
        .map(|ty| (*ty, TypeDistribution::default()))
        .collect();
    let mut per_court: BTreeMap<Court, BTreeMap<ArgumentType, TypeDistribution>> =
        [Court::Sc, Court::Sac]
            .iter()
            .map(|c| (*c, overall.clone()))
            .collect();
    let mut n_documents = 0;
    for doc in corpus.documents.iter().filter(|d| in_range(d, date_filter)) {
        n_documents += 1;
        let mut doc_counts: BTreeMap<ArgumentType, u64> = BTreeMap::new();
        for para in &doc.paragraphs {
            for ty in &para.argument_types {
                *doc_counts.entry(*ty).or_default() += 1;
            }
        }
        for (ty, count) in doc_counts {
            for table in [&mut overall, per_court.get_mut(&doc.court).unwrap()] {
                let entry = table.get_mut(&ty).unwrap();
                entry.frequency += count;
                entry.existence += 1;
            }
        }
    }
    let n_arguments = overall.values().map(|d| d.frequency).sum();
    DistributionReport {
        n_documents,
        n_arguments,
        overall,
        per_court,
    }
}

/// Formalistic / non-formalistic document counts for one court.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub formalistic: u64,
    pub non_formalistic: u64,
}

impl LabelCounts {
    pub fn total(&self) -> u64 {
        self.formalistic + self.non_formalistic
    }

    /// Formalistic share in percent, one decimal.
    pub fn formalistic_pct(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            percent1(self.formalistic as f64 / self.total() as f64)
        }
    }

    pub fn non_formalistic_pct(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            percent1(self.non_formalistic as f64 / self.total() as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolisticDistribution {
    pub per_court: BTreeMap<Court, LabelCounts>,
    pub total: LabelCounts,
}

/// Per-court and total holistic label counts. Errors when any document
/// is unlabeled, listing the offenders.
pub fn holistic_distribution(corpus: &Corpus) -> Result<HolisticDistribution, AnalysisError> {
    let unlabeled: Vec<String> = corpus
        .documents
        .iter()
        .filter(|d| d.holistic_label.is_none())
        .map(|d| d.doc_id.clone())
        .collect();
    if !unlabeled.is_empty() {
        return Err(AnalysisError::Unlabeled(unlabeled));
    }
    let mut per_court: BTreeMap<Court, LabelCounts> = [Court::Sc, Court::Sac]
        .iter()
        .map(|c| (*c, LabelCounts::default()))
        .collect();
    let mut total = LabelCounts::default();
    for doc in &corpus.documents {
        let court = per_court.get_mut(&doc.court).unwrap();
        match doc.holistic_label.unwrap() {
            HolisticLabel::Formalistic => {
                court.formalistic += 1;
                total.formalistic += 1;
            }
            HolisticLabel::NonFormalistic => {
                court.non_formalistic += 1;
                total.non_formalistic += 1;
            }
        }
    }
    Ok(HolisticDistribution { per_court, total })
}

/// One (year bucket, court) point of the trend series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub bucket_start_year: i32,
    pub court: Court,
    pub n_documents: u64,
    /// Non-formalistic over formalistic argument counts; `None` when the
    /// bucket has no formalistic arguments (undefined, not zero).
    pub nf_over_f_argument_ratio: Option<f64>,
    pub mean_nf_arguments_per_decision: f64,
    /// Share of decisions labeled non-formalistic, in [0, 1].
    pub share_non_formalistic_decisions: f64,
    /// Share of decisions containing zero non-formalistic arguments.
    pub share_zero_nf_argument_decisions: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub bucket_years: u32,
    /// Sorted by (court, bucket start year).
    pub points: Vec<TrendPoint>,
}

fn nf_argument_count(doc: &Document) -> u64 {
    doc.paragraphs
        .iter()
        .flat_map(|p| &p.argument_types)
        .filter(|ty| ty.group() == ArgumentGroup::NonFormalistic)
        .count() as u64
}

fn f_argument_count(doc: &Document) -> u64 {
    doc.paragraphs
        .iter()
        .flat_map(|p| &p.argument_types)
        .filter(|ty| ty.group() == ArgumentGroup::Formalistic)
        .count() as u64
}

/// Aggregates the four trend series per court over `bucket_years`-wide
/// year buckets (aligned to multiples of the width). Requires every
/// document to be labeled and dated.
pub fn temporal_trends(corpus: &Corpus, bucket_years: u32) -> Result<TrendSeries, AnalysisError> {
    let bucket_years = bucket_years.max(1);
    let unlabeled: Vec<String> = corpus
        .documents
        .iter()
        .filter(|d| d.holistic_label.is_none())
        .map(|d| d.doc_id.clone())
        .collect();
    if !unlabeled.is_empty() {
        return Err(AnalysisError::Unlabeled(unlabeled));
    }
    #[derive(Default)]
    struct Acc {
        n_documents: u64,
        nf_args: u64,
        f_args: u64,
        nf_decisions: u64,
        zero_nf_decisions: u64,
    }
    let width = bucket_years as i32;
    let mut buckets: BTreeMap<(Court, i32), Acc> = BTreeMap::new();
    for doc in &corpus.documents {
        let year = doc.decision_date.year();
        let start = year.div_euclid(width) * width;
        let acc = buckets.entry((doc.court, start)).or_default();
        acc.n_documents += 1;
        let nf = nf_argument_count(doc);
        acc.nf_args += nf;
        acc.f_args += f_argument_count(doc);
        if nf == 0 {
            acc.zero_nf_decisions += 1;
        }
        if doc.holistic_label == Some(HolisticLabel::NonFormalistic) {
            acc.nf_decisions += 1;
        }
    }
    let points = buckets
        .into_iter()
        .map(|((court, bucket_start_year), acc)| {
            let n = acc.n_documents as f64;
            TrendPoint {
                bucket_start_year,
                court,
                n_documents: acc.n_documents,
                nf_over_f_argument_ratio: if acc.f_args > 0 {
                    Some(acc.nf_args as f64 / acc.f_args as f64)
                } else {
                    None
                },
                mean_nf_arguments_per_decision: acc.nf_args as f64 / n,
                share_non_formalistic_decisions: acc.nf_decisions as f64 / n,
                share_zero_nf_argument_decisions: acc.zero_nf_decisions as f64 / n,
            }
        })
        .collect();
    Ok(TrendSeries {
        bucket_years,
        points,
    })
}

/// Centered rolling mean of width `width` applied per court along the
/// bucket axis; the ratio series averages over defined values only.
pub fn rolling_mean(series: &TrendSeries, width: usize) -> TrendSeries {
    let width = width.max(1);
    let half = width / 2;
    let mut points = Vec::with_capacity(series.points.len());
    for court in [Court::Sc, Court::Sac] {
        let court_points: Vec<&TrendPoint> = series
            .points
            .iter()
            .filter(|p| p.court == court)
            .collect();
        for (i, point) in court_points.iter().enumerate() {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(court_points.len());
            let window = &court_points[lo..hi];
            let n = window.len() as f64;
            let ratios: Vec<f64> = window
                .iter()
                .filter_map(|p| p.nf_over_f_argument_ratio)
                .collect();
            points.push(TrendPoint {
                bucket_start_year: point.bucket_start_year,
                court,
                n_documents: point.n_documents,
                nf_over_f_argument_ratio: if ratios.is_empty() {
                    None
                } else {
                    Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
                },
                mean_nf_arguments_per_decision: window
                    .iter()
                    .map(|p| p.mean_nf_arguments_per_decision)
                    .sum::<f64>()
                    / n,
                share_non_formalistic_decisions: window
                    .iter()
                    .map(|p| p.share_non_formalistic_decisions)
                    .sum::<f64>()
                    / n,
                share_zero_nf_argument_decisions: window
                    .iter()
                    .map(|p| p.share_zero_nf_argument_decisions)
                    .sum::<f64>()
                    / n,
            });
        }
    }
    TrendSeries {
        bucket_years: series.bucket_years,
        points,
    }
}

/// Percentage of all arguments per type within the date filter (raw,
/// not rounded). Errors when the filtered slice has no arguments.
pub fn share_report(
    corpus: &Corpus,
    date_filter: Option<(NaiveDate, NaiveDate)>,
) -> Result<BTreeMap<ArgumentType, f64>, AnalysisError> {
    let report = argument_distribution(corpus, date_filter);
    if report.n_arguments == 0 {
        return Err(AnalysisError::NoArguments);
    }
    Ok(report
        .overall
        .iter()
        .map(|(ty, d)| {
            (
                *ty,
                100.0 * d.frequency as f64 / report.n_arguments as f64,
            )
        })
        .collect())
}

/// Writes `distribution.csv`: columns `scope,type,frequency,existence`
/// where scope is `all`, `SC`, or `SAC`.
pub fn write_distribution_csv(
    report: &DistributionReport,
    writer: impl Write,
) -> Result<(), AnalysisError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["scope", "type", "frequency", "existence"])?;
    let mut emit = |scope: &str, table: &BTreeMap<ArgumentType, TypeDistribution>| {
        for ty in ArgumentType::ALL {
            let d = table[&ty];
            csv.write_record([
                scope,
                ty.code(),
                &d.frequency.to_string(),
                &d.existence.to_string(),
            ])?;
        }
        Ok::<_, csv::Error>(())
    };
    emit("all", &report.overall)?;
    for (court, table) in &report.per_court {
        emit(court.code(), table)?;
    }
    Ok(())
}

/// Writes `holistic.csv`: columns
/// `scope,formalistic,non_formalistic,formalistic_pct,non_formalistic_pct`.
pub fn write_holistic_csv(
    distribution: &HolisticDistribution,
    writer: impl Write,
) -> Result<(), AnalysisError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record([
        "scope",
        "formalistic",
        "non_formalistic",
        "formalistic_pct",
        "non_formalistic_pct",
    ])?;
    let mut emit = |scope: &str, counts: &LabelCounts| {
        csv.write_record([
            scope,
            &counts.formalistic.to_string(),
            &counts.non_formalistic.to_string(),
            &counts.formalistic_pct().to_string(),
            &counts.non_formalistic_pct().to_string(),
        ])
    };
    emit("all", &distribution.total)?;
    for (court, counts) in &distribution.per_court {
        emit(court.code(), counts)?;
    }
    Ok(())
}

/// Writes `trends.csv`: one row per (court, bucket) with the four
/// series; undefined ratios come out as empty cells.
pub fn write_trends_csv(series: &TrendSeries, writer: impl Write) -> Result<(), AnalysisError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record([
        "court",
        "bucket_start_year",
        "n_documents",
        "nf_over_f_argument_ratio",
        "mean_nf_arguments_per_decision",
        "share_non_formalistic_decisions",
        "share_zero_nf_argument_decisions",
    ])?;
    for p in &series.points {
        csv.write_record([
            p.court.code(),
            &p.bucket_start_year.to_string(),
            &p.n_documents.to_string(),
            &p.nf_over_f_argument_ratio
                .map(|r| r.to_string())
                .unwrap_or_default(),
            &p.mean_nf_arguments_per_decision.to_string(),
            &p.share_non_formalistic_decisions.to_string(),
            &p.share_zero_nf_argument_decisions.to_string(),
        ])?;
    }
    Ok(())
}

/// Writes `shares.csv`: columns `type,share_pct` (raw percentages).
pub fn write_shares_csv(
    shares: &BTreeMap<ArgumentType, f64>,
    writer: impl Write,
) -> Result<(), AnalysisError> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(["type", "share_pct"])?;
    for ty in ArgumentType::ALL {
        csv.write_record([ty.code(), &shares.get(&ty).copied().unwrap_or(0.0).to_string()])?;
    }
    Ok(())
}
