//! Stratified train/validation/test splitting.
//!
//! Documents are partitioned per stratum (holistic label x court) with
//! largest-remainder rounding inside each stratum, so every stratum's
//! split shares track the requested ratios as closely as integer counts
//! allow. Deterministic given the seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Corpus, Court, HolisticLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    pub fn from_name(name: &str) -> Option<Split> {
        Split::ALL.iter().copied().find(|s| s.name() == name)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Total assignment of every doc_id to exactly one split.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitAssignment {
    assignment: BTreeMap<String, Split>,
}

impl SplitAssignment {
    pub fn get(&self, doc_id: &str) -> Option<Split> {
        self.assignment.get(doc_id).copied()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Split)> {
        self.assignment.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn size_of(&self, split: Split) -> usize {
        self.assignment.values().filter(|s| **s == split).count()
    }

    /// Doc ids of `corpus` assigned to `split`, in corpus order.
    pub fn doc_ids<'a>(&'a self, corpus: &'a Corpus, split: Split) -> Vec<&'a str> {
        corpus
            .documents
            .iter()
            .filter(|d| self.get(&d.doc_id) == Some(split))
            .map(|d| d.doc_id.as_str())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("ratios must be non-negative and sum to 1, got {0:?}")]
    BadRatios([f64; 3]),
    #[error("documents without a holistic label: {}", .0.join(", "))]
    Unlabeled(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("split file error: {0}")]
    Format(String),
}

/// Deterministic stratified split over (holistic label x court) strata.
///
/// Leftover units after flooring go to the splits with the largest
/// fractional remainder; remainder ties go to the split with the smaller
/// ratio, then to the later split in (train, validation, test) order.
/// Membership inside a stratum comes from a single seeded shuffle.
pub fn stratified_split(
    corpus: &Corpus,
    ratios: [f64; 3],
    seed: u64,
) -> Result<SplitAssignment, SplitError> {
    if ratios.iter().any(|r| *r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(SplitError::BadRatios(ratios));
    }
    let unlabeled: Vec<String> = corpus
        .documents
        .iter()
        .filter(|d| d.holistic_label.is_none())
        .map(|d| d.doc_id.clone())
        .collect();
    if !unlabeled.is_empty() {
        return Err(SplitError::Unlabeled(unlabeled));
    }

    // Strata in fixed (label, court) order so the rng stream is stable.
    let mut strata: BTreeMap<(HolisticLabel, Court), Vec<&str>> = BTreeMap::new();
    for label in HolisticLabel::ALL {
        for court in Court::ALL {
            strata.insert((label, court), Vec::new());
        }
    }
    for doc in &corpus.documents {
        let key = (doc.holistic_label.unwrap(), doc.court);
        strata.get_mut(&key).unwrap().push(&doc.doc_id);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = BTreeMap::new();
    for ids in strata.values_mut() {
        ids.shuffle(&mut rng);
        let counts = largest_remainder(ids.len(), ratios);
        let mut offset = 0;
        for (split, count) in Split::ALL.iter().zip(counts) {
            for id in &ids[offset..offset + count] {
                assignment.insert((*id).to_string(), *split);
            }
            offset += count;
        }
    }
    Ok(SplitAssignment { assignment })
}

/// Largest-remainder apportionment of `n` units over three ratios.
fn largest_remainder(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let targets: Vec<f64> = ratios.iter().map(|r| n as f64 * r).collect();
    let mut counts: [usize; 3] = [0; 3];
    for (c, t) in counts.iter_mut().zip(&targets) {
        *c = t.floor() as usize;
    }
    let mut leftover = n - counts.iter().sum::<usize>();
    // Candidates ordered by fractional remainder, ties favoring the
    // smaller-ratio split (so scarce splits are not starved), then the
    // later split in declared order.
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let frac_a = targets[a] - targets[a].floor();
        let frac_b = targets[b] - targets[b].floor();
        frac_b
            .partial_cmp(&frac_a)
            .unwrap()
            .then(ratios[a].partial_cmp(&ratios[b]).unwrap())
            .then(b.cmp(&a))
    });
    for idx in order {
        if leftover == 0 {
            break;
        }
        counts[idx] += 1;
        leftover -= 1;
    }
    counts
}

/// Writes a split file: header `doc_id,split`, one row per document.
pub fn save_split(assignment: &SplitAssignment, path: impl AsRef<Path>) -> Result<(), SplitError> {
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    writer.write_record(["doc_id", "split"]).map_err(csv_err)?;
    for (doc_id, split) in &assignment.assignment {
        writer.write_record([doc_id.as_str(), split.name()]).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn load_split(path: impl AsRef<Path>) -> Result<SplitAssignment, SplitError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["doc_id", "split"] {
        return Err(SplitError::Format(format!(
            "expected header doc_id,split, got {headers:?}"
        )));
    }
    let mut assignment = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let doc_id = record.get(0).unwrap_or("").to_string();
        let split_name = record.get(1).unwrap_or("");
        let split = Split::from_name(split_name)
            .ok_or_else(|| SplitError::Format(format!("unknown split {split_name:?}")))?;
        if assignment.insert(doc_id.clone(), split).is_some() {
            return Err(SplitError::Format(format!("duplicate doc_id {doc_id:?}")));
        }
    }
    Ok(SplitAssignment { assignment })
}

fn csv_err(e: csv::Error) -> SplitError {
    SplitError::Format(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Paragraph};
    use chrono::NaiveDate;
    use std::collections::BTreeSet;

    fn labeled_doc(id: &str, label: HolisticLabel, court: Court) -> Document {
        Document {
            doc_id: id.to_string(),
            court,
            decision_date: NaiveDate::from_ymd_opt(2012, 6, 1).unwrap(),
            holistic_label: Some(label),
            paragraphs: vec![Paragraph {
                para_id: "p1".to_string(),
                text: "text odstavce".to_string(),
                argument_types: BTreeSet::new(),
            }],
            extra: serde_json::Map::new(),
        }
    }

    fn corpus_with_strata(counts: &[((HolisticLabel, Court), usize)]) -> Corpus {
        let mut docs = Vec::new();
        for ((label, court), n) in counts {
            for i in 0..*n {
                docs.push(labeled_doc(
                    &format!("{}-{}-{i}", label.code(), court.code()),
                    *label,
                    *court,
                ));
            }
        }
        Corpus::from_documents(docs).unwrap()
    }

    #[test]
    fn all_in_train_with_unit_ratio() {
        let corpus = corpus_with_strata(&[((HolisticLabel::Formalistic, Court::Sc), 7)]);
        let assignment = stratified_split(&corpus, [1.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(assignment.size_of(Split::Train), 7);
        assert_eq!(assignment.len(), 7);
    }

    #[test]
    fn two_equal_strata_round_to_3_1_1() {
        // largest-remainder oracle: 5 * (0.6, 0.2, 0.2) = (3, 1, 1) exactly
        let corpus = corpus_with_strata(&[
            ((HolisticLabel::Formalistic, Court::Sc), 5),
            ((HolisticLabel::NonFormalistic, Court::Sac), 5),
        ]);
        for seed in [0, 1, 42] {
            let assignment = stratified_split(&corpus, [0.6, 0.2, 0.2], seed).unwrap();
            for (label, court) in [
                (HolisticLabel::Formalistic, Court::Sc),
                (HolisticLabel::NonFormalistic, Court::Sac),
            ] {
                let per_split = |s: Split| {
                    corpus
                        .documents
                        .iter()
                        .filter(|d| {
                            d.holistic_label == Some(label)
                                && d.court == court
                                && assignment.get(&d.doc_id) == Some(s)
                        })
                        .count()
                };
                assert_eq!(per_split(Split::Train), 3);
                assert_eq!(per_split(Split::Validation), 1);
                assert_eq!(per_split(Split::Test), 1);
            }
        }
    }

    #[test]
    fn reference_marginals_reproduce_split_table() {
        // 161 F / 111 NF crossed with courts: F-SC 116, F-SAC 45, NF-SC 66, NF-SAC 45
        let corpus = corpus_with_strata(&[
            ((HolisticLabel::Formalistic, Court::Sc), 116),
            ((HolisticLabel::Formalistic, Court::Sac), 45),
            ((HolisticLabel::NonFormalistic, Court::Sc), 66),
            ((HolisticLabel::NonFormalistic, Court::Sac), 45),
        ]);
        let assignment = stratified_split(&corpus, [0.7, 0.2, 0.1], 7).unwrap();
        assert_eq!(assignment.size_of(Split::Train), 189);
        assert_eq!(assignment.size_of(Split::Validation), 54);
        assert_eq!(assignment.size_of(Split::Test), 29);
        let marginal = |split: Split, label: HolisticLabel| {
            corpus
                .documents
                .iter()
                .filter(|d| d.holistic_label == Some(label) && assignment.get(&d.doc_id) == Some(split))
                .count()
        };
        assert_eq!(marginal(Split::Train, HolisticLabel::Formalistic), 112);
        assert_eq!(marginal(Split::Train, HolisticLabel::NonFormalistic), 77);
        assert_eq!(marginal(Split::Validation, HolisticLabel::Formalistic), 32);
        assert_eq!(marginal(Split::Validation, HolisticLabel::NonFormalistic), 22);
        assert_eq!(marginal(Split::Test, HolisticLabel::Formalistic), 17);
        assert_eq!(marginal(Split::Test, HolisticLabel::NonFormalistic), 12);
        let court_marginal = |split: Split, court: Court| {
            corpus
                .documents
                .iter()
                .filter(|d| d.court == court && assignment.get(&d.doc_id) == Some(split))
                .count()
        };
        assert_eq!(court_marginal(Split::Train, Court::Sc), 127);
        assert_eq!(court_marginal(Split::Train, Court::Sac), 62);
        assert_eq!(court_marginal(Split::Validation, Court::Sc), 36);
        assert_eq!(court_marginal(Split::Validation, Court::Sac), 18);
        assert_eq!(court_marginal(Split::Test, Court::Sc), 19);
        assert_eq!(court_marginal(Split::Test, Court::Sac), 10);
    }

    #[test]
    fn same_seed_same_assignment() {
        let corpus = corpus_with_strata(&[
            ((HolisticLabel::Formalistic, Court::Sc), 23),
            ((HolisticLabel::NonFormalistic, Court::Sac), 17),
        ]);
        let a = stratified_split(&corpus, [0.7, 0.2, 0.1], 99).unwrap();
        let b = stratified_split(&corpus, [0.7, 0.2, 0.1], 99).unwrap();
        assert_eq!(a, b);
        let c = stratified_split(&corpus, [0.7, 0.2, 0.1], 100).unwrap();
        // different seeds may coincide on tiny corpora but not here
        assert_ne!(a, c);
    }

    #[test]
    fn unlabeled_documents_listed_in_error() {
        let mut doc = labeled_doc("x", HolisticLabel::Formalistic, Court::Sc);
        doc.holistic_label = None;
        let corpus = Corpus::from_documents(vec![doc]).unwrap();
        match stratified_split(&corpus, [0.7, 0.2, 0.1], 0) {
            Err(SplitError::Unlabeled(ids)) => assert_eq!(ids, vec!["x".to_string()]),
            other => panic!("expected unlabeled error, got {other:?}"),
        }
    }

    #[test]
    fn bad_ratios_rejected() {
        let corpus = corpus_with_strata(&[((HolisticLabel::Formalistic, Court::Sc), 3)]);
        assert!(matches!(
            stratified_split(&corpus, [0.5, 0.2, 0.1], 0),
            Err(SplitError::BadRatios(_))
        ));
        assert!(matches!(
            stratified_split(&corpus, [1.2, -0.1, -0.1], 0),
            Err(SplitError::BadRatios(_))
        ));
    }

    #[test]
    fn split_file_round_trip() {
        let corpus = corpus_with_strata(&[
            ((HolisticLabel::Formalistic, Court::Sc), 9),
            ((HolisticLabel::NonFormalistic, Court::Sac), 6),
        ]);
        let assignment = stratified_split(&corpus, [0.6, 0.2, 0.2], 1).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_split(&assignment, f.path()).unwrap();
        let loaded = load_split(f.path()).unwrap();
        assert_eq!(assignment, loaded);
    }

    #[test]
    fn partition_covers_every_document_once() {
        let corpus = corpus_with_strata(&[
            ((HolisticLabel::Formalistic, Court::Sc), 13),
            ((HolisticLabel::Formalistic, Court::Sac), 4),
            ((HolisticLabel::NonFormalistic, Court::Sc), 8),
        ]);
        let assignment = stratified_split(&corpus, [0.7, 0.2, 0.1], 5).unwrap();
        assert_eq!(assignment.len(), corpus.len());
        for doc in &corpus.documents {
            assert!(assignment.get(&doc.doc_id).is_some());
        }
        assert_eq!(
            assignment.size_of(Split::Train)
                + assignment.size_of(Split::Validation)
                + assignment.size_of(Split::Test),
            corpus.len()
        );
    }
}
