use std::path::Path;

use argmine::agreement::{cohen_kappa, krippendorff_alpha, per_type_matrices};
use argmine::corpus::load_corpus;

use crate::error::CliError;
use crate::output::{num, print_table};
use crate::Format;

pub fn iaa(corpus_a: &Path, corpus_b: &Path, format: Format) -> Result<(), CliError> {
    let a = load_corpus(corpus_a)?;
    let b = load_corpus(corpus_b)?;
    let matrices = per_type_matrices(&a, &b)?;

    let mut rows = Vec::new();
    for (ty, matrix) in &matrices {
        let alpha = krippendorff_alpha(matrix)?;
        // binary presence vectors per annotator for the pairwise kappa
        let mut presence_a = Vec::new();
        let mut presence_b = Vec::new();
        for (doc_a, doc_b) in a.documents.iter().zip(&b.documents) {
            for (para_a, para_b) in doc_a.paragraphs.iter().zip(&doc_b.paragraphs) {
                presence_a.push(para_a.argument_types.contains(ty));
                presence_b.push(para_b.argument_types.contains(ty));
            }
        }
        let kappa = cohen_kappa(&presence_a, &presence_b)?;
        rows.push(vec![
            ty.code().to_string(),
            num(alpha),
            num(kappa),
            matrix.n_pairable_units().to_string(),
        ]);
    }
    print_table(format, &["type", "alpha", "kappa", "n_units"], &rows);
    Ok(())
}
