//! Line-delimited corpus file ingestion and validation.
//!
//! One document per line, each line a JSON record with fields `doc_id`,
//! `court`, `decision_date`, `holistic_label` and `paragraphs`. Unknown
//! fields survive a load/save round-trip.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::{Corpus, Document};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error{}: {message}", fmt_line(.line))]
    Schema { line: Option<usize>, message: String },
}

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!(" at line {n}"),
        None => String::new(),
    }
}

/// Loads and validates a line-delimited corpus file.
///
/// Aborts on the first malformed line (parse error) or invariant
/// violation (schema error), naming the offending line.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut documents = Vec::new();
    let mut seen_docs: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        // Two-phase parse: JSON syntax first, then schema mapping, so the
        // error category tells the caller what kind of fix is needed.
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        let doc: Document = serde_json::from_value(value).map_err(|e| CorpusError::Schema {
            line: Some(line_no),
            message: e.to_string(),
        })?;
        validate_document(&doc, Some(line_no))?;
        if !seen_docs.insert(doc.doc_id.clone()) {
            return Err(CorpusError::Schema {
                line: Some(line_no),
                message: format!("duplicate doc_id {:?}", doc.doc_id),
            });
        }
        documents.push(doc);
    }
    let mut provenance = serde_json::Map::new();
    provenance.insert(
        "source".to_string(),
        serde_json::Value::String(path.display().to_string()),
    );
    Ok(Corpus {
        documents,
        provenance,
    })
}

/// Writes a corpus back out, one JSON record per line, in document order.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut writer = BufWriter::new(File::create(path)?);
    for doc in &corpus.documents {
        let line = serde_json::to_string(doc).map_err(|e| CorpusError::Schema {
            line: None,
            message: e.to_string(),
        })?;
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

pub(super) fn validate_document(doc: &Document, line: Option<usize>) -> Result<(), CorpusError> {
    let schema = |message: String| CorpusError::Schema { line, message };
    if doc.doc_id.trim().is_empty() {
        return Err(schema("empty doc_id".to_string()));
    }
    if doc.paragraphs.is_empty() {
        return Err(schema(format!(
            "document {:?} has no paragraphs",
            doc.doc_id
        )));
    }
    let mut seen = BTreeSet::new();
    for para in &doc.paragraphs {
        if para.text.trim().is_empty() {
            return Err(schema(format!(
                "document {:?} paragraph {:?} has blank text",
                doc.doc_id, para.para_id
            )));
        }
        if !seen.insert(para.para_id.as_str()) {
            return Err(schema(format!(
                "document {:?} has duplicate para_id {:?}",
                doc.doc_id, para.para_id
            )));
        }
    }
    Ok(())
}
