//! Reference predictors: majority, seeded random, and a trigger-lexicon
//! classifier built from cue phrases that usually signal each argument
//! type.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{ArgumentType, Paragraph};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// A cue pattern: literal substring match after case folding, with `*`
/// matching any (possibly empty) span. Stored as the ordered list of
/// literal segments between wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerPattern {
    raw: String,
    segments: Vec<String>,
}

impl TriggerPattern {
    pub fn parse(raw: &str) -> TriggerPattern {
        let folded = raw.to_lowercase();
        TriggerPattern {
            raw: raw.to_string(),
            segments: folded.split('*').map(str::to_string).collect(),
        }
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    /// True when the folded segments occur in order, without overlap,
    /// with the first anchored only by preceding `*` semantics (a leading
    /// or trailing wildcard is implicit: plain substring search).
    pub fn matches(&self, folded_text: &str) -> bool {
        let mut rest = folded_text;
        for segment in &self.segments {
            if segment.is_empty() {
                continue;
            }
            match rest.find(segment.as_str()) {
                Some(pos) => rest = &rest[pos + segment.len()..],
                None => return false,
            }
        }
        true
    }
}

/// Cue phrases per argument type, loaded from a TSV file with one
/// `TYPE<TAB>pattern` entry per line (`#` comments and blank lines
/// ignored).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriggerLexicon {
    patterns: BTreeMap<ArgumentType, Vec<TriggerPattern>>,
}

impl TriggerLexicon {
    pub fn new() -> TriggerLexicon {
        TriggerLexicon::default()
    }

    pub fn add(&mut self, ty: ArgumentType, pattern: &str) {
        self.patterns
            .entry(ty)
            .or_default()
            .push(TriggerPattern::parse(pattern));
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TriggerLexicon, LexiconError> {
        let file = std::fs::File::open(path)?;
        let mut lexicon = TriggerLexicon::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (code, pattern) = trimmed.split_once('\t').ok_or_else(|| LexiconError::Format {
                line: i + 1,
                message: "expected TYPE<TAB>pattern".to_string(),
            })?;
            let ty = ArgumentType::from_code(code.trim()).ok_or_else(|| LexiconError::Format {
                line: i + 1,
                message: format!("unknown argument type code {:?}", code.trim()),
            })?;
            let pattern = pattern.trim();
            if pattern.is_empty() {
                return Err(LexiconError::Format {
                    line: i + 1,
                    message: "empty pattern".to_string(),
                });
            }
            lexicon.add(ty, pattern);
        }
        Ok(lexicon)
    }

    pub fn patterns_for(&self, ty: ArgumentType) -> &[TriggerPattern] {
        self.patterns.get(&ty).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.values().all(Vec::is_empty)
    }
}

/// Predicts the set of argument types whose cue patterns match the
/// paragraph text case-insensitively; presence = non-empty result.
pub fn trigger_classify(paragraph: &Paragraph, lexicon: &TriggerLexicon) -> BTreeSet<ArgumentType> {
    let folded = paragraph.text.to_lowercase();
    ArgumentType::ALL
        .iter()
        .copied()
        .filter(|ty| lexicon.patterns_for(*ty).iter().any(|p| p.matches(&folded)))
        .collect()
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("empty training label sequence")]
    EmptyTraining,
}

/// A constant predictor returning the modal training label for every
/// input. Ties break by the declared order of `label_order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityPredictor<L> {
    label: L,
}

impl<L: Clone + Eq> MajorityPredictor<L> {
    /// `label_order` declares the full label inventory in tie-break
    /// order; training labels must come from it.
    pub fn fit(train_labels: &[L], label_order: &[L]) -> Result<MajorityPredictor<L>, BaselineError> {
        if train_labels.is_empty() {
            return Err(BaselineError::EmptyTraining);
        }
        let mut best: Option<(usize, &L)> = None;
        for label in label_order {
            let count = train_labels.iter().filter(|l| *l == label).count();
            // strictly-greater keeps the earliest declared label on ties
            if best.map_or(true, |(c, _)| count > c) {
                best = Some((count, label));
            }
        }
        let (_, label) = best.expect("non-empty label order");
        Ok(MajorityPredictor { label: label.clone() })
    }

    pub fn predict(&self) -> L {
        self.label.clone()
    }
}

/// Sampling distribution for [`RandomPredictor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomMode {
    /// Every label equally likely.
    Uniform,
    /// Labels drawn with their training-set frequencies.
    Marginal,
}

/// Per-instance independent label draws; the stream is deterministic
/// given the seed.
#[derive(Debug, Clone)]
pub struct RandomPredictor<L> {
    labels: Vec<L>,
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
}

impl<L: Clone + Eq> RandomPredictor<L> {
    pub fn fit(
        train_labels: &[L],
        label_order: &[L],
        mode: RandomMode,
        seed: u64,
    ) -> Result<RandomPredictor<L>, BaselineError> {
        let weights: Vec<f64> = match mode {
            RandomMode::Uniform => vec![1.0; label_order.len()],
            RandomMode::Marginal => {
                if train_labels.is_empty() {
                    return Err(BaselineError::EmptyTraining);
                }
                label_order
                    .iter()
                    .map(|label| train_labels.iter().filter(|l| *l == label).count() as f64)
                    .collect()
            }
        };
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(RandomPredictor {
            labels: label_order.to_vec(),
            cumulative,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn predict(&mut self) -> L {
        let draw: f64 = self.rng.gen();
        for (label, threshold) in self.labels.iter().zip(&self.cumulative) {
            if draw < *threshold {
                return label.clone();
            }
        }
        self.labels.last().expect("non-empty labels").clone()
    }
}
