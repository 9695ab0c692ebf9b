//! Corpus-level descriptive statistics.

use serde::{Deserialize, Serialize};

use super::Corpus;

/// Aggregate counts over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_documents: usize,
    pub n_paragraphs: usize,
    /// Multiset total of annotated arguments over all paragraphs.
    pub n_arguments: usize,
    pub paragraphs_with_0: usize,
    pub paragraphs_with_1_arg: usize,
    pub paragraphs_with_2plus: usize,
    /// Per-document token counts (whitespace tokenization).
    pub token_min: usize,
    pub token_max: usize,
    pub token_mean: f64,
    pub args_per_doc_mean: f64,
    pub args_per_doc_max: usize,
    pub docs_with_zero_args: usize,
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let n_documents = corpus.documents.len();
    let mut n_paragraphs = 0;
    let mut n_arguments = 0;
    let mut with_0 = 0;
    let mut with_1 = 0;
    let mut with_2plus = 0;
    let mut token_min = usize::MAX;
    let mut token_max = 0;
    let mut token_total = 0usize;
    let mut args_max = 0;
    let mut zero_arg_docs = 0;
    for doc in &corpus.documents {
        let mut doc_args = 0;
        for para in &doc.paragraphs {
            n_paragraphs += 1;
            let k = para.argument_types.len();
            doc_args += k;
            match k {
                0 => with_0 += 1,
                1 => with_1 += 1,
                _ => with_2plus += 1,
            }
        }
        n_arguments += doc_args;
        args_max = args_max.max(doc_args);
        if doc_args == 0 {
            zero_arg_docs += 1;
        }
        let tokens = doc.token_count();
        token_min = token_min.min(tokens);
        token_max = token_max.max(tokens);
        token_total += tokens;
    }
    if n_documents == 0 {
        token_min = 0;
    }
    CorpusStats {
        n_documents,
        n_paragraphs,
        n_arguments,
        paragraphs_with_0: with_0,
        paragraphs_with_1_arg: with_1,
        paragraphs_with_2plus: with_2plus,
        token_min,
        token_max,
        token_mean: if n_documents == 0 {
            0.0
        } else {
            token_total as f64 / n_documents as f64
        },
        args_per_doc_mean: if n_documents == 0 {
            0.0
        } else {
            n_arguments as f64 / n_documents as f64
        },
        args_per_doc_max: args_max,
        docs_with_zero_args: zero_arg_docs,
    }
}
