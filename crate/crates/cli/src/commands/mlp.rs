use std::io::Write;
use std::path::Path;

use argmine::attribution::{exact_shapley, mean_feature_vector};
use argmine::corpus::{load_corpus, load_split, Corpus, HolisticLabel, Split};
use argmine::features::{
    extract_features, train_mlp, FeatureVector, LossKind, MlpConfig, MlpModel, MonitorMetric,
};
use clap::ValueEnum;

use crate::error::CliError;
use crate::output::{num, print_table};
use crate::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Bce,
    WeightedBce,
    Asymmetric,
}

impl From<LossArg> for LossKind {
    fn from(arg: LossArg) -> LossKind {
        match arg {
            LossArg::Bce => LossKind::Bce,
            LossArg::WeightedBce => LossKind::WeightedBce,
            LossArg::Asymmetric => LossKind::Asymmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MonitorArg {
    /// Validation loss.
    Loss,
    /// Validation macro F1.
    MacroF1,
}

impl From<MonitorArg> for MonitorMetric {
    fn from(arg: MonitorArg) -> MonitorMetric {
        match arg {
            MonitorArg::Loss => MonitorMetric::ValidationLoss,
            MonitorArg::MacroF1 => MonitorMetric::ValidationMacroF1,
        }
    }
}

fn labeled_set(
    corpus: &Corpus,
    assignment: &argmine::corpus::SplitAssignment,
    split: Split,
) -> Result<Vec<(FeatureVector, HolisticLabel)>, CliError> {
    let mut out = Vec::new();
    for doc in &corpus.documents {
        if assignment.get(&doc.doc_id) != Some(split) {
            continue;
        }
        let label = doc.holistic_label.ok_or_else(|| {
            CliError::validation(format!(
                "document {:?} is in the {} split but has no holistic label",
                doc.doc_id,
                split.name()
            ))
        })?;
        out.push((extract_features(doc), label));
    }
    Ok(out)
}

pub fn train(
    corpus: &Path,
    split: &Path,
    seed: u64,
    loss: LossArg,
    monitor: MonitorArg,
    max_epochs: usize,
    out: &Path,
) -> Result<(), CliError> {
    let corpus = load_corpus(corpus)?;
    let assignment = load_split(split)?;
    let train_set = labeled_set(&corpus, &assignment, Split::Train)?;
    let val_set = labeled_set(&corpus, &assignment, Split::Validation)?;
    let config = MlpConfig {
        seed,
        loss: loss.into(),
        monitor: monitor.into(),
        max_epochs,
        ..MlpConfig::default()
    };
    let model = train_mlp(&train_set, &val_set, &config)?;
    model.save(out)?;
    let best = model
        .history
        .iter()
        .min_by(|a, b| a.validation_loss.partial_cmp(&b.validation_loss).unwrap())
        .expect("non-empty history");
    println!(
        "trained on {} documents ({} validation) for {} epochs; best validation loss {:.6} (macro F1 {:.4}) -> {}",
        train_set.len(),
        val_set.len(),
        model.history.len(),
        best.validation_loss,
        best.validation_macro_f1,
        out.display()
    );
    Ok(())
}

pub fn predict(model: &Path, corpus: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let model = MlpModel::load(model)?;
    let corpus = load_corpus(corpus)?;
    let mut lines = vec!["doc_id,probability,predicted_label".to_string()];
    for doc in &corpus.documents {
        let features = extract_features(doc);
        let probability = model.predict(&features);
        lines.push(format!(
            "{},{},{}",
            doc.doc_id,
            probability,
            model.predict_label(&features).code()
        ));
    }
    let text = lines.join("\n") + "\n";
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn explain(
    model: &Path,
    corpus: &Path,
    doc_id: &str,
    reference_corpus: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let model = MlpModel::load(model)?;
    let corpus = load_corpus(corpus)?;
    let doc = corpus
        .get(doc_id)
        .ok_or_else(|| CliError::validation(format!("no document {doc_id:?} in the corpus")))?;
    let reference_vectors: Vec<FeatureVector> = match reference_corpus {
        Some(path) => load_corpus(path)?
            .documents
            .iter()
            .map(extract_features)
            .collect(),
        None => corpus.documents.iter().map(extract_features).collect(),
    };
    let reference = mean_feature_vector(&reference_vectors);
    let attribution = exact_shapley(&model, &extract_features(doc), &reference);
    println!("doc_id: {doc_id}");
    println!("prediction: {}", num(attribution.prediction));
    println!("base_value: {}", num(attribution.base_value));
    let rows: Vec<Vec<String>> = attribution
        .ranked()
        .into_iter()
        .map(|(name, value)| vec![name.to_string(), num(value)])
        .collect();
    print_table(format, &["feature", "shapley_value"], &rows);
    Ok(())
}
