use std::path::Path;

use argmine::corpus::{
    corpus_stats, load_corpus, save_split, stratified_split, Split,
};

use crate::error::CliError;
use crate::output::{num, print_table};
use crate::Format;

pub fn validate(corpus: &Path) -> Result<(), CliError> {
    let corpus = load_corpus(corpus)?;
    let n_paragraphs: usize = corpus.documents.iter().map(|d| d.paragraphs.len()).sum();
    println!(
        "ok: {} documents, {} paragraphs",
        corpus.len(),
        n_paragraphs
    );
    Ok(())
}

pub fn stats(corpus: &Path, format: Format) -> Result<(), CliError> {
    let stats = corpus_stats(&load_corpus(corpus)?);
    let header = [
        "n_documents",
        "n_paragraphs",
        "n_arguments",
        "paragraphs_with_0",
        "paragraphs_with_1_arg",
        "paragraphs_with_2plus",
        "token_min",
        "token_max",
        "token_mean",
        "args_per_doc_mean",
        "args_per_doc_max",
        "docs_with_zero_args",
    ];
    let row = vec![
        stats.n_documents.to_string(),
        stats.n_paragraphs.to_string(),
        stats.n_arguments.to_string(),
        stats.paragraphs_with_0.to_string(),
        stats.paragraphs_with_1_arg.to_string(),
        stats.paragraphs_with_2plus.to_string(),
        stats.token_min.to_string(),
        stats.token_max.to_string(),
        num(stats.token_mean),
        num(stats.args_per_doc_mean),
        stats.args_per_doc_max.to_string(),
        stats.docs_with_zero_args.to_string(),
    ];
    print_table(format, &header, &[row]);
    Ok(())
}

pub fn split(corpus: &Path, ratios: &[f64], seed: u64, out: &Path) -> Result<(), CliError> {
    let corpus = load_corpus(corpus)?;
    let ratios: [f64; 3] = ratios
        .try_into()
        .map_err(|_| CliError::validation("--ratios takes exactly three fractions"))?;
    let assignment = stratified_split(&corpus, ratios, seed)?;
    save_split(&assignment, out)?;
    println!(
        "split {} documents: train {}, validation {}, test {} -> {}",
        assignment.len(),
        assignment.size_of(Split::Train),
        assignment.size_of(Split::Validation),
        assignment.size_of(Split::Test),
        out.display()
    );
    Ok(())
}
