use std::collections::BTreeSet;
use std::path::Path;

use argmine::corpus::{load_corpus, ArgumentType, Corpus, Document, HolisticLabel};
use argmine::metrics::{binary_macro_prf, multilabel_report, percent1};

use crate::error::CliError;
use crate::output::{num, print_table};
use crate::Format;

/// Pairs every gold document with the prediction document of the same
/// id; paragraph-level tasks additionally require aligned paragraphs.
fn paired<'a>(gold: &'a Corpus, pred: &'a Corpus) -> Result<Vec<(&'a Document, &'a Document)>, CliError> {
    gold.documents
        .iter()
        .map(|g| {
            let p = pred.get(&g.doc_id).ok_or_else(|| {
                CliError::validation(format!("prediction file lacks document {:?}", g.doc_id))
            })?;
            Ok((g, p))
        })
        .collect()
}

fn paired_paragraphs<'a>(
    pairs: &[(&'a Document, &'a Document)],
) -> Result<Vec<(&'a argmine::corpus::Paragraph, &'a argmine::corpus::Paragraph)>, CliError> {
    let mut out = Vec::new();
    for (g, p) in pairs {
        if g.paragraphs.len() != p.paragraphs.len() {
            return Err(CliError::validation(format!(
                "document {:?}: gold has {} paragraphs, prediction has {}",
                g.doc_id,
                g.paragraphs.len(),
                p.paragraphs.len()
            )));
        }
        for (gp, pp) in g.paragraphs.iter().zip(&p.paragraphs) {
            if gp.para_id != pp.para_id {
                return Err(CliError::validation(format!(
                    "document {:?}: paragraph ids {:?} and {:?} do not line up",
                    g.doc_id, gp.para_id, pp.para_id
                )));
            }
            out.push((gp, pp));
        }
    }
    Ok(out)
}

pub fn run(task: u8, gold: &Path, pred: &Path, format: Format) -> Result<(), CliError> {
    let gold = load_corpus(gold)?;
    let pred = load_corpus(pred)?;
    let pairs = paired(&gold, &pred)?;
    match task {
        1 => {
            let paragraphs = paired_paragraphs(&pairs)?;
            let gold: Vec<bool> = paragraphs.iter().map(|(g, _)| g.is_argumentative()).collect();
            let pred: Vec<bool> = paragraphs.iter().map(|(_, p)| p.is_argumentative()).collect();
            let (p, r, f) = binary_macro_prf(&gold, &pred)?;
            print_prf(format, p, r, f);
        }
        2 => {
            let paragraphs = paired_paragraphs(&pairs)?;
            let gold: Vec<BTreeSet<ArgumentType>> =
                paragraphs.iter().map(|(g, _)| g.argument_types.clone()).collect();
            let pred: Vec<BTreeSet<ArgumentType>> =
                paragraphs.iter().map(|(_, p)| p.argument_types.clone()).collect();
            let report = multilabel_report(&gold, &pred, &ArgumentType::ALL)?;
            let mut rows: Vec<Vec<String>> = report
                .per_label
                .iter()
                .map(|lm| {
                    vec![
                        lm.label.code().to_string(),
                        num(percent1(lm.f1_pos)),
                        num(percent1(lm.f1_neg)),
                        num(percent1(lm.macro_f1)),
                    ]
                })
                .collect();
            rows.push(vec![
                "ALL".to_string(),
                String::new(),
                String::new(),
                num(percent1(report.macro_all)),
            ]);
            print_table(format, &["label", "f1_pos", "f1_neg", "macro_f1"], &rows);
        }
        3 => {
            let mut gold_labels: Vec<HolisticLabel> = Vec::new();
            let mut pred_labels: Vec<HolisticLabel> = Vec::new();
            for (g, p) in &pairs {
                let gl = g.holistic_label.ok_or_else(|| {
                    CliError::validation(format!("gold document {:?} has no holistic label", g.doc_id))
                })?;
                let pl = p.holistic_label.ok_or_else(|| {
                    CliError::validation(format!(
                        "prediction document {:?} has no holistic label",
                        p.doc_id
                    ))
                })?;
                gold_labels.push(gl);
                pred_labels.push(pl);
            }
            let (p, r, f) = binary_macro_prf(&gold_labels, &pred_labels)?;
            print_prf(format, p, r, f);
        }
        _ => unreachable!("clap range"),
    }
    Ok(())
}

fn print_prf(format: Format, p: f64, r: f64, f: f64) {
    print_table(
        format,
        &["macro_precision", "macro_recall", "macro_f1"],
        &[vec![
            num(percent1(p)),
            num(percent1(r)),
            num(percent1(f)),
        ]],
    );
}
