//! The three-stage holistic-formalism pipeline with pluggable stage
//! backends.
//!
//! Stage 1 filters paragraphs down to those containing legal arguments,
//! stage 2 assigns argument types to the retained paragraphs, and stage 3
//! extracts document features from the predicted annotations and runs the
//! feature classifier. Stages 1 and 2 are served by backends: built-in
//! baselines or an external model process speaking a newline-delimited
//! JSON protocol over standard streams (see [`external`]).

mod external;

pub use external::ExternalProcessBackend;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{trigger_classify, TriggerLexicon};
use crate::corpus::{ArgumentType, Document, HolisticLabel, Paragraph};
use crate::features::{extract_features, FeatureVector, MlpModel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("backend failure: {0}")]
    Backend(String),
    #[error("protocol violation: {message}; payload: {payload}")]
    Protocol { message: String, payload: String },
    #[error("backend timed out after {0} s")]
    Timeout(u64),
    #[error("response id {id:?} was never requested")]
    UnknownResponseId { id: String },
    #[error("duplicate response for id {id:?}")]
    DuplicateResponse { id: String },
    #[error("no response for request id {id:?}")]
    MissingResponse { id: String },
    #[error("probability {value} for id {id:?} outside [0, 1]")]
    BadProbability { id: String, value: f64 },
    #[error("config error: {0}")]
    Config(String),
}

/// Which question a stage backend is being asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageTask {
    /// Does this paragraph contain a legal argument?
    Presence,
    /// Which argument types does it contain?
    Types,
}

/// One request line of the wire protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub id: String,
    pub task: StageTask,
    pub text: String,
}

/// One response line of the wire protocol. `presence_prob` answers
/// presence requests; `type_probs` (all 8 codes) answers type requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presence_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type_probs: Option<BTreeMap<String, f64>>,
}

/// A stage-1 or stage-2 predictor. Responses may come back in any order;
/// the pipeline matches them to requests by id and requires each id to be
/// answered exactly once.
pub trait StageBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError>;
}

fn presence_response(id: &str, prob: f64) -> WireResponse {
    WireResponse {
        id: id.to_string(),
        presence_prob: Some(prob),
        type_probs: None,
    }
}

fn types_response(id: &str, probs: BTreeMap<String, f64>) -> WireResponse {
    WireResponse {
        id: id.to_string(),
        presence_prob: None,
        type_probs: Some(probs),
    }
}

fn uniform_type_probs(prob: f64) -> BTreeMap<String, f64> {
    ArgumentType::ALL
        .iter()
        .map(|ty| (ty.code().to_string(), prob))
        .collect()
}

/// Answers "argumentative" with probability 1 and predicts no types;
/// stage 1 with this backend is equivalent to filtering disabled.
#[derive(Debug, Default)]
pub struct AllPassBackend;

impl StageBackend for AllPassBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        Ok(requests
            .iter()
            .map(|r| match task {
                StageTask::Presence => presence_response(&r.id, 1.0),
                StageTask::Types => types_response(&r.id, uniform_type_probs(0.0)),
            })
            .collect())
    }
}

/// Constant probabilities for every request; the majority baseline is
/// the special case (0, 0) since most paragraphs carry no argument.
#[derive(Debug)]
pub struct ConstantBackend {
    pub presence_prob: f64,
    pub type_prob: f64,
}

impl StageBackend for ConstantBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        Ok(requests
            .iter()
            .map(|r| match task {
                StageTask::Presence => presence_response(&r.id, self.presence_prob),
                StageTask::Types => types_response(&r.id, uniform_type_probs(self.type_prob)),
            })
            .collect())
    }
}

/// Independent uniform draws per request; deterministic given the seed.
#[derive(Debug)]
pub struct RandomBackend {
    rng: ChaCha8Rng,
}

impl RandomBackend {
    pub fn new(seed: u64) -> RandomBackend {
        RandomBackend {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl StageBackend for RandomBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        Ok(requests
            .iter()
            .map(|r| match task {
                StageTask::Presence => presence_response(&r.id, self.rng.gen()),
                StageTask::Types => {
                    let probs = ArgumentType::ALL
                        .iter()
                        .map(|ty| (ty.code().to_string(), self.rng.gen()))
                        .collect();
                    types_response(&r.id, probs)
                }
            })
            .collect())
    }
}

/// Classifies by cue-phrase lookup in a [`TriggerLexicon`].
#[derive(Debug)]
pub struct TriggerBackend {
    pub lexicon: TriggerLexicon,
}

impl StageBackend for TriggerBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        Ok(requests
            .iter()
            .map(|r| {
                let paragraph = Paragraph {
                    para_id: r.id.clone(),
                    text: r.text.clone(),
                    argument_types: BTreeSet::new(),
                };
                let types = trigger_classify(&paragraph, &self.lexicon);
                match task {
                    StageTask::Presence => {
                        presence_response(&r.id, if types.is_empty() { 0.0 } else { 1.0 })
                    }
                    StageTask::Types => {
                        let probs = ArgumentType::ALL
                            .iter()
                            .map(|ty| {
                                (
                                    ty.code().to_string(),
                                    if types.contains(ty) { 1.0 } else { 0.0 },
                                )
                            })
                            .collect();
                        types_response(&r.id, probs)
                    }
                }
            })
            .collect())
    }
}

/// Replays the gold annotations of the documents it was built from,
/// keyed by the pipeline's request ids. Isolates pipeline plumbing from
/// model quality: with this backend the pipeline must reproduce the
/// classifier's predictions on gold features.
#[derive(Debug)]
pub struct GoldReplayBackend {
    by_id: BTreeMap<String, BTreeSet<ArgumentType>>,
}

impl GoldReplayBackend {
    /// `documents` must be the same slice (same order) later passed to
    /// [`run_pipeline`], since request ids are positional.
    pub fn new(documents: &[Document]) -> GoldReplayBackend {
        let mut by_id = BTreeMap::new();
        for (d, doc) in documents.iter().enumerate() {
            for (p, para) in doc.paragraphs.iter().enumerate() {
                by_id.insert(paragraph_request_id(d, p), para.argument_types.clone());
            }
        }
        GoldReplayBackend { by_id }
    }
}

impl StageBackend for GoldReplayBackend {
    fn classify(
        &mut self,
        task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        requests
            .iter()
            .map(|r| {
                let types = self.by_id.get(&r.id).ok_or_else(|| PipelineError::Backend(
                    format!("gold replay has no paragraph for id {:?}", r.id),
                ))?;
                Ok(match task {
                    StageTask::Presence => {
                        presence_response(&r.id, if types.is_empty() { 0.0 } else { 1.0 })
                    }
                    StageTask::Types => {
                        let probs = ArgumentType::ALL
                            .iter()
                            .map(|ty| {
                                (
                                    ty.code().to_string(),
                                    if types.contains(ty) { 1.0 } else { 0.0 },
                                )
                            })
                            .collect();
                        types_response(&r.id, probs)
                    }
                })
            })
            .collect()
    }
}

/// Declarative backend choice, loadable from a pipeline config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    BuiltinAllPass,
    /// Constant all-negative answers (the per-paragraph majority).
    BuiltinMajority,
    BuiltinRandom { seed: u64 },
    BuiltinTrigger { lexicon: PathBuf },
    External {
        command: Vec<String>,
        #[serde(default = "default_timeout_secs")]
        timeout_secs: u64,
    },
}

fn default_timeout_secs() -> u64 {
    120
}

impl BackendSpec {
    pub fn build(&self) -> Result<Box<dyn StageBackend>, PipelineError> {
        Ok(match self {
            BackendSpec::BuiltinAllPass => Box::new(AllPassBackend),
            BackendSpec::BuiltinMajority => Box::new(ConstantBackend {
                presence_prob: 0.0,
                type_prob: 0.0,
            }),
            BackendSpec::BuiltinRandom { seed } => Box::new(RandomBackend::new(*seed)),
            BackendSpec::BuiltinTrigger { lexicon } => Box::new(TriggerBackend {
                lexicon: TriggerLexicon::load(lexicon)
                    .map_err(|e| PipelineError::Config(e.to_string()))?,
            }),
            BackendSpec::External {
                command,
                timeout_secs,
            } => Box::new(ExternalProcessBackend::spawn(command, *timeout_secs)?),
        })
    }
}

/// Full pipeline configuration as stored in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    #[serde(default = "default_format_version")]
    pub format_version: u32,
    #[serde(default = "default_true")]
    pub filtering_enabled: bool,
    pub stage1: BackendSpec,
    pub stage2: BackendSpec,
    /// Path to the serialized stage-3 classifier.
    pub model: PathBuf,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// When set, stage-3 document length counts retained paragraphs
    /// only instead of the whole document.
    #[serde(default)]
    pub length_over_retained_only: bool,
}

fn default_format_version() -> u32 {
    1
}
fn default_true() -> bool {
    true
}
fn default_batch_size() -> usize {
    32
}
fn default_threshold() -> f64 {
    0.5
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<PipelineConfig, PipelineError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn options(&self) -> PipelineOptions {
        PipelineOptions {
            filtering_enabled: self.filtering_enabled,
            threshold: self.threshold,
            batch_size: self.batch_size,
            length_over_retained_only: self.length_over_retained_only,
        }
    }
}

/// Runtime knobs of [`run_pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub filtering_enabled: bool,
    pub threshold: f64,
    pub batch_size: usize,
    pub length_over_retained_only: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            filtering_enabled: true,
            threshold: 0.5,
            batch_size: 32,
            length_over_retained_only: false,
        }
    }
}

/// Per-document pipeline output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub doc_id: String,
    pub predicted_label: HolisticLabel,
    /// Probability of non-formalistic from stage 3.
    pub probability: f64,
    pub features: FeatureVector,
    /// (para_id, retained by stage 1) in document order.
    pub paragraph_presence: Vec<(String, bool)>,
    /// (para_id, predicted types) in document order; filtered-out
    /// paragraphs always carry the empty set.
    pub paragraph_types: Vec<(String, BTreeSet<ArgumentType>)>,
}

/// Wall-clock time spent per stage, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineTiming {
    pub stage1_ms: f64,
    pub stage2_ms: f64,
    pub stage3_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub results: Vec<PipelineResult>,
    pub timing: PipelineTiming,
}

/// Positional request id for paragraph `p` of document `d`.
pub fn paragraph_request_id(doc_index: usize, para_index: usize) -> String {
    format!("d{doc_index}.p{para_index}")
}

fn check_prob(id: &str, value: f64) -> Result<f64, PipelineError> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(PipelineError::BadProbability {
            id: id.to_string(),
            value,
        });
    }
    Ok(value)
}

/// Sends requests in batches and assembles the answers by id,
/// enforcing the exactly-once contract.
fn classify_matched(
    backend: &mut dyn StageBackend,
    task: StageTask,
    requests: &[WireRequest],
    batch_size: usize,
) -> Result<BTreeMap<String, WireResponse>, PipelineError> {
    let expected: BTreeSet<&str> = requests.iter().map(|r| r.id.as_str()).collect();
    let mut answers = BTreeMap::new();
    for batch in requests.chunks(batch_size.max(1)) {
        for response in backend.classify(task, batch)? {
            if !expected.contains(response.id.as_str()) {
                return Err(PipelineError::UnknownResponseId { id: response.id });
            }
            if answers.contains_key(&response.id) {
                return Err(PipelineError::DuplicateResponse { id: response.id });
            }
            answers.insert(response.id.clone(), response);
        }
    }
    for request in requests {
        if !answers.contains_key(&request.id) {
            return Err(PipelineError::MissingResponse {
                id: request.id.clone(),
            });
        }
    }
    Ok(answers)
}

fn presence_of(response: &WireResponse) -> Result<f64, PipelineError> {
    let prob = response
        .presence_prob
        .ok_or_else(|| PipelineError::Protocol {
            message: "presence response lacks presence_prob".to_string(),
            payload: serde_json::to_string(response).unwrap_or_default(),
        })?;
    check_prob(&response.id, prob)
}

fn types_of(
    response: &WireResponse,
    threshold: f64,
) -> Result<BTreeSet<ArgumentType>, PipelineError> {
    let probs = response.type_probs.as_ref().ok_or_else(|| PipelineError::Protocol {
        message: "types response lacks type_probs".to_string(),
        payload: serde_json::to_string(response).unwrap_or_default(),
    })?;
    let mut out = BTreeSet::new();
    for ty in ArgumentType::ALL {
        let prob = *probs.get(ty.code()).ok_or_else(|| PipelineError::Protocol {
            message: format!("type_probs missing code {:?}", ty.code()),
            payload: serde_json::to_string(response).unwrap_or_default(),
        })?;
        if check_prob(&response.id, prob)? >= threshold {
            out.insert(ty);
        }
    }
    for code in probs.keys() {
        if ArgumentType::from_code(code).is_none() {
            return Err(PipelineError::Protocol {
                message: format!("type_probs has unknown code {code:?}"),
                payload: serde_json::to_string(response).unwrap_or_default(),
            });
        }
    }
    Ok(out)
}

/// Runs the three stages over `documents` (gold labels, if any, are
/// ignored). Deterministic whenever the backends are.
pub fn run_pipeline(
    documents: &[Document],
    stage1: &mut dyn StageBackend,
    stage2: &mut dyn StageBackend,
    model: &MlpModel,
    options: &PipelineOptions,
) -> Result<PipelineRun, PipelineError> {
    let mut timing = PipelineTiming::default();

    // stage 1: paragraph presence
    let mut requests = Vec::new();
    for (d, doc) in documents.iter().enumerate() {
        for (p, para) in doc.paragraphs.iter().enumerate() {
            requests.push(WireRequest {
                id: paragraph_request_id(d, p),
                task: StageTask::Presence,
                text: para.text.clone(),
            });
        }
    }
    let retained: BTreeMap<String, bool> = if options.filtering_enabled {
        let start = Instant::now();
        let answers = classify_matched(stage1, StageTask::Presence, &requests, options.batch_size)?;
        timing.stage1_ms = start.elapsed().as_secs_f64() * 1e3;
        answers
            .iter()
            .map(|(id, response)| Ok((id.clone(), presence_of(response)? >= options.threshold)))
            .collect::<Result<_, PipelineError>>()?
    } else {
        requests.iter().map(|r| (r.id.clone(), true)).collect()
    };

    // stage 2: argument types for retained paragraphs only
    let type_requests: Vec<WireRequest> = requests
        .iter()
        .filter(|r| retained[&r.id])
        .map(|r| WireRequest {
            id: r.id.clone(),
            task: StageTask::Types,
            text: r.text.clone(),
        })
        .collect();
    let start = Instant::now();
    let type_answers = classify_matched(stage2, StageTask::Types, &type_requests, options.batch_size)?;
    timing.stage2_ms = start.elapsed().as_secs_f64() * 1e3;

    // stage 3: features + holistic classifier
    let start = Instant::now();
    let mut results = Vec::with_capacity(documents.len());
    for (d, doc) in documents.iter().enumerate() {
        let mut relabeled = doc.clone();
        let mut paragraph_presence = Vec::with_capacity(doc.paragraphs.len());
        let mut paragraph_types = Vec::with_capacity(doc.paragraphs.len());
        for (p, para) in relabeled.paragraphs.iter_mut().enumerate() {
            let id = paragraph_request_id(d, p);
            let keep = retained[&id];
            para.argument_types = if keep {
                types_of(&type_answers[&id], options.threshold)?
            } else {
                BTreeSet::new()
            };
            paragraph_presence.push((para.para_id.clone(), keep));
            paragraph_types.push((para.para_id.clone(), para.argument_types.clone()));
        }
        if options.length_over_retained_only {
            let keep: BTreeSet<&str> = paragraph_presence
                .iter()
                .filter(|(_, k)| *k)
                .map(|(id, _)| id.as_str())
                .collect();
            relabeled
                .paragraphs
                .retain(|para| keep.contains(para.para_id.as_str()));
        }
        let features = extract_features(&relabeled);
        let probability = model.predict(&features);
        if !probability.is_finite() {
            return Err(PipelineError::Backend(format!(
                "non-finite stage-3 probability for document {:?}",
                doc.doc_id
            )));
        }
        let predicted_label = if probability >= 0.5 {
            HolisticLabel::NonFormalistic
        } else {
            HolisticLabel::Formalistic
        };
        results.push(PipelineResult {
            doc_id: doc.doc_id.clone(),
            predicted_label,
            probability,
            features,
            paragraph_presence,
            paragraph_types,
        });
    }
    timing.stage3_ms = start.elapsed().as_secs_f64() * 1e3;

    Ok(PipelineRun { results, timing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Court;
    use crate::features::{fit_scaler, Dense, Mlp, MlpConfig};
    use chrono::NaiveDate;

    fn para(id: &str, text: &str, types: &[ArgumentType]) -> Paragraph {
        Paragraph {
            para_id: id.to_string(),
            text: text.to_string(),
            argument_types: types.iter().copied().collect(),
        }
    }

    fn fixture_documents() -> Vec<Document> {
        use ArgumentType::*;
        let mk = |i: usize, paragraphs: Vec<Paragraph>| Document {
            doc_id: format!("doc-{i}"),
            court: if i % 2 == 0 { Court::Sc } else { Court::Sac },
            decision_date: NaiveDate::from_ymd_opt(2010 + i as i32, 1, 1).unwrap(),
            holistic_label: None,
            paragraphs,
            extra: serde_json::Map::new(),
        };
        vec![
            mk(
                0,
                vec![
                    para("p1", "the wording is unambiguous here", &[Lin]),
                    para("p2", "procedural history recital", &[]),
                    para("p3", "as the settled case-law holds", &[Cl, Si]),
                ],
            ),
            mk(
                1,
                vec![
                    para("p1", "the purpose of the provision controls", &[Ti, Pl]),
                    para("p2", "facts of the case", &[]),
                ],
            ),
            mk(2, vec![para("p1", "no arguments at all", &[])]),
        ]
    }

    fn toy_model(documents: &[Document]) -> MlpModel {
        let vectors: Vec<_> = documents.iter().map(extract_features).collect();
        let scaler = fit_scaler(&vectors).unwrap();
        let network = Mlp {
            layers: vec![
                Dense {
                    in_dim: crate::features::FEATURE_DIM,
                    out_dim: 1,
                    weights: vec![0.3; crate::features::FEATURE_DIM],
                    biases: vec![0.1],
                },
                Dense {
                    in_dim: 1,
                    out_dim: 1,
                    weights: vec![1.0],
                    biases: vec![0.0],
                },
            ],
        };
        MlpModel::from_parts(network, scaler, MlpConfig::default())
    }

    #[test]
    fn gold_replay_equals_gold_feature_prediction() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        let mut stage1 = GoldReplayBackend::new(&documents);
        let mut stage2 = GoldReplayBackend::new(&documents);
        let run = run_pipeline(
            &documents,
            &mut stage1,
            &mut stage2,
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        for (doc, result) in documents.iter().zip(&run.results) {
            let gold_features = extract_features(doc);
            assert_eq!(result.features, gold_features);
            assert_eq!(result.probability, model.predict(&gold_features));
        }
    }

    #[test]
    fn filtering_off_equals_all_pass_stage1() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        let mut stage2a = GoldReplayBackend::new(&documents);
        let mut stage2b = GoldReplayBackend::new(&documents);
        let mut all_pass = AllPassBackend;
        let with_all_pass = run_pipeline(
            &documents,
            &mut all_pass,
            &mut stage2a,
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        let mut ignored = ConstantBackend {
            presence_prob: 0.0,
            type_prob: 0.0,
        };
        let without_filtering = run_pipeline(
            &documents,
            &mut ignored,
            &mut stage2b,
            &model,
            &PipelineOptions {
                filtering_enabled: false,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        assert_eq!(with_all_pass.results, without_filtering.results);
    }

    #[test]
    fn filtered_out_paragraphs_get_empty_sets_and_still_count_length() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        // stage 1 rejects everything
        let mut stage1 = ConstantBackend {
            presence_prob: 0.0,
            type_prob: 0.0,
        };
        let mut stage2 = GoldReplayBackend::new(&documents);
        let run = run_pipeline(
            &documents,
            &mut stage1,
            &mut stage2,
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        for (doc, result) in documents.iter().zip(&run.results) {
            assert!(result.paragraph_types.iter().all(|(_, t)| t.is_empty()));
            assert_eq!(result.features.n_arguments, 0);
            // document length is a property of the document, not the filter
            assert_eq!(result.features.doc_length_tokens, doc.token_count() as u64);
        }
    }

    #[test]
    fn length_over_retained_only_shrinks_doc_length() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        let mut stage1 = GoldReplayBackend::new(&documents);
        let mut stage2 = GoldReplayBackend::new(&documents);
        let run = run_pipeline(
            &documents,
            &mut stage1,
            &mut stage2,
            &model,
            &PipelineOptions {
                length_over_retained_only: true,
                ..PipelineOptions::default()
            },
        )
        .unwrap();
        // doc 0: paragraphs p1 and p3 are argumentative (5 + 5 tokens)
        assert_eq!(run.results[0].features.doc_length_tokens, 10);
    }

    /// Returns correct answers but in reversed order.
    struct ShuffledBackend(GoldReplayBackend);

    impl StageBackend for ShuffledBackend {
        fn classify(
            &mut self,
            task: StageTask,
            requests: &[WireRequest],
        ) -> Result<Vec<WireResponse>, PipelineError> {
            let mut responses = self.0.classify(task, requests)?;
            responses.reverse();
            Ok(responses)
        }
    }

    #[test]
    fn shuffled_responses_match_ordered_responses() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        let ordered = run_pipeline(
            &documents,
            &mut GoldReplayBackend::new(&documents),
            &mut GoldReplayBackend::new(&documents),
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        let shuffled = run_pipeline(
            &documents,
            &mut ShuffledBackend(GoldReplayBackend::new(&documents)),
            &mut ShuffledBackend(GoldReplayBackend::new(&documents)),
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        assert_eq!(ordered.results, shuffled.results);
    }

    struct BrokenBackend {
        mode: &'static str,
    }

    impl StageBackend for BrokenBackend {
        fn classify(
            &mut self,
            _task: StageTask,
            requests: &[WireRequest],
        ) -> Result<Vec<WireResponse>, PipelineError> {
            let mut responses: Vec<WireResponse> = requests
                .iter()
                .map(|r| presence_response(&r.id, 0.7))
                .collect();
            match self.mode {
                "duplicate" => responses.push(responses[0].clone()),
                "missing" => {
                    responses.pop();
                }
                "unknown" => responses[0].id = "never-requested".to_string(),
                "bad_prob" => responses[0].presence_prob = Some(1.5),
                other => panic!("unknown mode {other}"),
            }
            Ok(responses)
        }
    }

    #[test]
    fn protocol_violations_abort() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        for (mode, check) in [
            ("duplicate", "duplicate" as &str),
            ("missing", "no response"),
            ("unknown", "never requested"),
            ("bad_prob", "outside"),
        ] {
            let mut stage1 = BrokenBackend { mode };
            let mut stage2 = GoldReplayBackend::new(&documents);
            let err = run_pipeline(
                &documents,
                &mut stage1,
                &mut stage2,
                &model,
                &PipelineOptions::default(),
            )
            .unwrap_err();
            let text = err.to_string();
            assert!(text.contains(check), "{mode}: {text}");
        }
    }

    #[test]
    fn zero_argument_prediction_still_emits_label() {
        use ArgumentType::*;
        let documents = fixture_documents();
        let model = toy_model(&documents);
        // stage 2 predicts nothing anywhere, stage 1 retains everything
        let mut stage1 = AllPassBackend;
        let mut stage2 = ConstantBackend {
            presence_prob: 1.0,
            type_prob: 0.0,
        };
        let run = run_pipeline(
            &documents,
            &mut stage1,
            &mut stage2,
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        assert_eq!(run.results.len(), documents.len());
        for result in &run.results {
            assert_eq!(result.features.n_arguments, 0);
            assert!(result.probability.is_finite());
        }
        // and a stage 2 saying CL everywhere labels every retained paragraph {CL}
        let mut cl_stage2 = ConstantBackend {
            presence_prob: 1.0,
            type_prob: 0.0,
        };
        struct ClBackend;
        impl StageBackend for ClBackend {
            fn classify(
                &mut self,
                task: StageTask,
                requests: &[WireRequest],
            ) -> Result<Vec<WireResponse>, PipelineError> {
                Ok(requests
                    .iter()
                    .map(|r| match task {
                        StageTask::Presence => presence_response(&r.id, 1.0),
                        StageTask::Types => {
                            let mut probs = uniform_type_probs(0.1);
                            probs.insert("CL".to_string(), 0.9);
                            types_response(&r.id, probs)
                        }
                    })
                    .collect())
            }
        }
        let _ = &mut cl_stage2;
        let run = run_pipeline(
            &documents,
            &mut AllPassBackend,
            &mut ClBackend,
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        for result in &run.results {
            for (_, types) in &result.paragraph_types {
                assert_eq!(types, &BTreeSet::from([Cl]));
            }
        }
    }

    #[test]
    fn perfect_stage1_retained_fraction_matches_gold() {
        let documents = fixture_documents();
        let model = toy_model(&documents);
        let run = run_pipeline(
            &documents,
            &mut GoldReplayBackend::new(&documents),
            &mut GoldReplayBackend::new(&documents),
            &model,
            &PipelineOptions::default(),
        )
        .unwrap();
        let retained: usize = run
            .results
            .iter()
            .flat_map(|r| &r.paragraph_presence)
            .filter(|(_, k)| *k)
            .count();
        let gold_argumentative: usize = documents
            .iter()
            .flat_map(|d| &d.paragraphs)
            .filter(|p| p.is_argumentative())
            .count();
        assert_eq!(retained, gold_argumentative);
    }

    #[test]
    fn config_round_trips_and_builds() {
        let config = PipelineConfig {
            format_version: 1,
            filtering_enabled: true,
            stage1: BackendSpec::BuiltinAllPass,
            stage2: BackendSpec::BuiltinMajority,
            model: PathBuf::from("model.json"),
            batch_size: 16,
            threshold: 0.5,
            length_over_retained_only: false,
        };
        let json = serde_json::to_string(&config).unwrap();
        assert!(json.contains("builtin_all_pass"));
        let back: PipelineConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
        assert!(config.stage1.build().is_ok());
        assert!(config.stage2.build().is_ok());
    }

    #[test]
    fn random_backend_is_seed_deterministic() {
        let requests: Vec<WireRequest> = (0..20)
            .map(|i| WireRequest {
                id: format!("r{i}"),
                task: StageTask::Presence,
                text: "text".to_string(),
            })
            .collect();
        let a = RandomBackend::new(9)
            .classify(StageTask::Presence, &requests)
            .unwrap();
        let b = RandomBackend::new(9)
            .classify(StageTask::Presence, &requests)
            .unwrap();
        assert_eq!(a, b);
    }
}
