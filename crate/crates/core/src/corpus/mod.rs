//! Data model, file ingestion/validation, corpus statistics, and
//! stratified splitting for annotated decision corpora.

mod io;
mod split;
mod stats;

pub use io::{load_corpus, save_corpus, CorpusError};
pub use split::{load_split, save_split, stratified_split, Split, SplitAssignment, SplitError};
pub use stats::{corpus_stats, CorpusStats};

use std::collections::BTreeSet;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// The eight-code argument-type inventory.
///
/// Variant order is the canonical inventory order used everywhere a fixed
/// ordering matters (feature vectors, report rows, tie-breaking).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ArgumentType {
    /// Linguistic Interpretation
    #[serde(rename = "LIN")]
    Lin,
    /// Systemic Interpretation
    #[serde(rename = "SI")]
    Si,
    /// Case Law
    #[serde(rename = "CL")]
    Cl,
    /// Doctrine
    #[serde(rename = "D")]
    D,
    /// Historical Interpretation
    #[serde(rename = "HI")]
    Hi,
    /// Principles of Law and Values
    #[serde(rename = "PL")]
    Pl,
    /// Teleological Interpretation
    #[serde(rename = "TI")]
    Ti,
    /// Practical Consequences
    #[serde(rename = "PC")]
    Pc,
}

/// Formalistic/non-formalistic grouping of argument types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgumentGroup {
    Formalistic,
    NonFormalistic,
}

impl ArgumentType {
    /// All eight codes in canonical inventory order.
    pub const ALL: [ArgumentType; 8] = [
        ArgumentType::Lin,
        ArgumentType::Si,
        ArgumentType::Cl,
        ArgumentType::D,
        ArgumentType::Hi,
        ArgumentType::Pl,
        ArgumentType::Ti,
        ArgumentType::Pc,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ArgumentType::Lin => "LIN",
            ArgumentType::Si => "SI",
            ArgumentType::Cl => "CL",
            ArgumentType::D => "D",
            ArgumentType::Hi => "HI",
            ArgumentType::Pl => "PL",
            ArgumentType::Ti => "TI",
            ArgumentType::Pc => "PC",
        }
    }

    pub fn from_code(code: &str) -> Option<ArgumentType> {
        ArgumentType::ALL.iter().copied().find(|t| t.code() == code)
    }

    /// LIN, SI, CL and D are formalistic; HI, PL, TI and PC are not.
    pub fn group(self) -> ArgumentGroup {
        match self {
            ArgumentType::Lin | ArgumentType::Si | ArgumentType::Cl | ArgumentType::D => {
                ArgumentGroup::Formalistic
            }
            ArgumentType::Hi | ArgumentType::Pl | ArgumentType::Ti | ArgumentType::Pc => {
                ArgumentGroup::NonFormalistic
            }
        }
    }
}

impl fmt::Display for ArgumentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Issuing court: Supreme Court or Supreme Administrative Court.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Court {
    #[serde(rename = "SC")]
    Sc,
    #[serde(rename = "SAC")]
    Sac,
}

impl Court {
    pub const ALL: [Court; 2] = [Court::Sc, Court::Sac];

    pub fn code(self) -> &'static str {
        match self {
            Court::Sc => "SC",
            Court::Sac => "SAC",
        }
    }
}

impl fmt::Display for Court {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Binary per-decision label assigned by holistic expert assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolisticLabel {
    Formalistic,
    NonFormalistic,
}

impl HolisticLabel {
    pub const ALL: [HolisticLabel; 2] = [HolisticLabel::Formalistic, HolisticLabel::NonFormalistic];

    pub fn code(self) -> &'static str {
        match self {
            HolisticLabel::Formalistic => "formalistic",
            HolisticLabel::NonFormalistic => "non_formalistic",
        }
    }
}

impl fmt::Display for HolisticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// A paragraph of a decision with its set of annotated argument types.
///
/// Each code appears at most once per paragraph; the set may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paragraph {
    pub para_id: String,
    pub text: String,
    pub argument_types: BTreeSet<ArgumentType>,
}

impl Paragraph {
    pub fn token_count(&self) -> usize {
        token_count(&self.text)
    }

    /// A paragraph is argumentative when it carries at least one argument.
    pub fn is_argumentative(&self) -> bool {
        !self.argument_types.is_empty()
    }
}

/// An annotated decision: paragraphs plus document-level metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub court: Court,
    pub decision_date: NaiveDate,
    pub holistic_label: Option<HolisticLabel>,
    pub paragraphs: Vec<Paragraph>,
    /// Unknown input fields, preserved across load/save round-trips.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Document {
    /// Total whitespace tokens over all paragraphs.
    pub fn token_count(&self) -> usize {
        self.paragraphs.iter().map(Paragraph::token_count).sum()
    }

    /// Multiset total of annotated arguments over all paragraphs.
    pub fn n_arguments(&self) -> usize {
        self.paragraphs.iter().map(|p| p.argument_types.len()).sum()
    }
}

/// An ordered sequence of documents; order is stable across round-trips.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    /// Free-form metadata (source path, annotator id, ...).
    pub provenance: serde_json::Map<String, serde_json::Value>,
}

impl Corpus {
    /// Builds a corpus from documents, validating all invariants.
    pub fn from_documents(documents: Vec<Document>) -> Result<Corpus, CorpusError> {
        let corpus = Corpus {
            documents,
            provenance: serde_json::Map::new(),
        };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Checks document/paragraph invariants: unique ids, non-empty
    /// paragraph sequences, non-blank texts.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut seen_docs = BTreeSet::new();
        for doc in &self.documents {
            io::validate_document(doc, None)?;
            if !seen_docs.insert(doc.doc_id.as_str()) {
                return Err(CorpusError::Schema {
                    line: None,
                    message: format!("duplicate doc_id {:?}", doc.doc_id),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

/// Number of maximal non-whitespace runs in `text` (Unicode whitespace).
pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}
