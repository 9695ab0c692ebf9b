use std::collections::BTreeSet;
use std::path::Path;

use argmine::baselines::{
    trigger_classify, MajorityPredictor, RandomMode, RandomPredictor, TriggerLexicon,
};
use argmine::corpus::{load_corpus, ArgumentType, Corpus, HolisticLabel};
use argmine::metrics::{binary_macro_prf, multilabel_report, percent1};
use clap::ValueEnum;

use crate::error::CliError;
use crate::output::{num, print_table};
use crate::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Majority,
    Random,
    Trigger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Uniform,
    Marginal,
}

impl From<Mode> for RandomMode {
    fn from(mode: Mode) -> RandomMode {
        match mode {
            Mode::Uniform => RandomMode::Uniform,
            Mode::Marginal => RandomMode::Marginal,
        }
    }
}

fn holistic_labels(corpus: &Corpus, role: &str) -> Result<Vec<HolisticLabel>, CliError> {
    corpus
        .documents
        .iter()
        .map(|d| {
            d.holistic_label.ok_or_else(|| {
                CliError::validation(format!(
                    "{role} document {:?} has no holistic label",
                    d.doc_id
                ))
            })
        })
        .collect()
}

fn load_lexicon(lexicon: Option<&Path>) -> Result<TriggerLexicon, CliError> {
    let path =
        lexicon.ok_or_else(|| CliError::validation("--kind trigger requires --lexicon"))?;
    Ok(TriggerLexicon::load(path)?)
}

pub fn run(
    kind: Kind,
    task: u8,
    train: &Path,
    eval: &Path,
    lexicon: Option<&Path>,
    mode: Mode,
    seed: u64,
    format: Format,
) -> Result<(), CliError> {
    let train = load_corpus(train)?;
    let eval = load_corpus(eval)?;
    match task {
        1 => task1(kind, &train, &eval, lexicon, mode, seed, format),
        2 => task2(kind, &train, &eval, lexicon, mode, seed, format),
        3 => task3(kind, &train, &eval, mode, seed, format),
        _ => unreachable!("clap range"),
    }
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

fn task1(
    kind: Kind,
    train: &Corpus,
    eval: &Corpus,
    lexicon: Option<&Path>,
    mode: Mode,
    seed: u64,
    format: Format,
) -> Result<(), CliError> {
    let gold: Vec<bool> = eval
        .documents
        .iter()
        .flat_map(|d| &d.paragraphs)
        .map(|p| p.is_argumentative())
        .collect();
    let pred: Vec<bool> = match kind {
        Kind::Majority => {
            let train_labels: Vec<bool> = train
                .documents
                .iter()
                .flat_map(|d| &d.paragraphs)
                .map(|p| p.is_argumentative())
                .collect();
            let predictor = MajorityPredictor::fit(&train_labels, &[false, true])?;
            vec![predictor.predict(); gold.len()]
        }
        Kind::Random => {
            let train_labels: Vec<bool> = train
                .documents
                .iter()
                .flat_map(|d| &d.paragraphs)
                .map(|p| p.is_argumentative())
                .collect();
            let mut predictor =
                RandomPredictor::fit(&train_labels, &[false, true], mode.into(), seed)?;
            (0..gold.len()).map(|_| predictor.predict()).collect()
        }
        Kind::Trigger => {
            let lexicon = load_lexicon(lexicon)?;
            eval.documents
                .iter()
                .flat_map(|d| &d.paragraphs)
                .map(|p| !trigger_classify(p, &lexicon).is_empty())
                .collect()
        }
    };
    let (p, r, f) = binary_macro_prf(&gold, &pred)?;
    print_prf(format, p, r, f);
    Ok(())
}

fn task2(
    kind: Kind,
    train: &Corpus,
    eval: &Corpus,
    lexicon: Option<&Path>,
    mode: Mode,
    seed: u64,
    format: Format,
) -> Result<(), CliError> {
    let gold: Vec<BTreeSet<ArgumentType>> = eval
        .documents
        .iter()
        .flat_map(|d| &d.paragraphs)
        .map(|p| p.argument_types.clone())
        .collect();
    let pred: Vec<BTreeSet<ArgumentType>> = match kind {
        Kind::Majority => {
            // independent per-type modal presence (all-negative on a
            // realistically sparse corpus)
            let mut modal = BTreeSet::new();
            for ty in ArgumentType::ALL {
                let train_labels: Vec<bool> = train
                    .documents
                    .iter()
                    .flat_map(|d| &d.paragraphs)
                    .map(|p| p.argument_types.contains(&ty))
                    .collect();
                if MajorityPredictor::fit(&train_labels, &[false, true])?.predict() {
                    modal.insert(ty);
                }
            }
            vec![modal; gold.len()]
        }
        Kind::Random => {
            // one seeded stream per type, in inventory order
            let mut predictors = Vec::new();
            for (i, ty) in ArgumentType::ALL.iter().enumerate() {
                let train_labels: Vec<bool> = train
                    .documents
                    .iter()
                    .flat_map(|d| &d.paragraphs)
                    .map(|p| p.argument_types.contains(ty))
                    .collect();
                predictors.push(RandomPredictor::fit(
                    &train_labels,
                    &[false, true],
                    mode.into(),
                    seed.wrapping_add(i as u64),
                )?);
            }
            (0..gold.len())
                .map(|_| {
                    ArgumentType::ALL
                        .iter()
                        .zip(&mut predictors)
                        .filter_map(|(ty, predictor)| predictor.predict().then_some(*ty))
                        .collect()
                })
                .collect()
        }
        Kind::Trigger => {
            let lexicon = load_lexicon(lexicon)?;
            eval.documents
                .iter()
                .flat_map(|d| &d.paragraphs)
                .map(|p| trigger_classify(p, &lexicon))
                .collect()
        }
    };
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
    Ok(())
}

fn task3(
    kind: Kind,
    train: &Corpus,
    eval: &Corpus,
    mode: Mode,
    seed: u64,
    format: Format,
) -> Result<(), CliError> {
    const ORDER: [HolisticLabel; 2] = [HolisticLabel::Formalistic, HolisticLabel::NonFormalistic];
    let gold = holistic_labels(eval, "evaluation")?;
    let pred: Vec<HolisticLabel> = match kind {
        Kind::Majority => {
            let train_labels = holistic_labels(train, "training")?;
            let predictor = MajorityPredictor::fit(&train_labels, &ORDER)?;
            vec![predictor.predict(); gold.len()]
        }
        Kind::Random => {
            let train_labels = holistic_labels(train, "training")?;
            let mut predictor = RandomPredictor::fit(&train_labels, &ORDER, mode.into(), seed)?;
            (0..gold.len()).map(|_| predictor.predict()).collect()
        }
        Kind::Trigger => {
            return Err(CliError::validation(
                "the trigger baseline serves tasks 1 and 2; task 3 needs a trained model",
            ))
        }
    };
    let (p, r, f) = binary_macro_prf(&gold, &pred)?;
    print_prf(format, p, r, f);
    Ok(())
}
