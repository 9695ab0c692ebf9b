//! The feature-based formalism classifier: a small fully-connected
//! network (11 -> 20 -> 50 -> 1, rectifier hidden units, logistic
//! output) trained with mini-batch adaptive moment estimation.
//!
//! Training is single-threaded and bit-deterministic given the seed. The
//! positive class is non-formalistic, so the output probability reads as
//! "degree of non-formalism".

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{apply_scaler, fit_scaler, FeatureVector, Scaler, FEATURE_DIM};
use crate::corpus::HolisticLabel;
use crate::metrics::binary_macro_prf;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("empty {0} set")]
    EmptySet(&'static str),
    #[error("non-finite loss at epoch {epoch}: training diverged ({detail})")]
    Diverged { epoch: usize, detail: String },
}

/// Training loss variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Bce,
    WeightedBce,
    Asymmetric,
}

/// What early stopping watches on the validation set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorMetric {
    ValidationLoss,
    ValidationMacroF1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_sizes: (usize, usize),
    pub dropout_rates: (f64, f64),
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Epochs without validation improvement before stopping.
    pub early_stopping_patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub loss: LossKind,
    pub monitor: MonitorMetric,
    /// Focusing exponent on the positive term of the asymmetric loss.
    pub asymmetric_gamma_pos: f64,
    /// Focusing exponent on the negative term of the asymmetric loss.
    pub asymmetric_gamma_neg: f64,
    /// Probability margin clipped off the negative term.
    pub asymmetric_margin: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_sizes: (20, 50),
            dropout_rates: (0.1, 0.4),
            learning_rate: 1e-3,
            batch_size: 8,
            early_stopping_patience: 3,
            max_epochs: 200,
            seed: 0,
            loss: LossKind::Bce,
            monitor: MonitorMetric::ValidationLoss,
            asymmetric_gamma_pos: 0.0,
            asymmetric_gamma_neg: 4.0,
            asymmetric_margin: 0.05,
        }
    }
}

/// One fully-connected layer; weights are out x in, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    fn forward(&self, input: &[f64], output: &mut Vec<f64>) {
        output.clear();
        for o in 0..self.out_dim {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let mut z = self.biases[o];
            for (w, x) in row.iter().zip(input) {
                z += w * x;
            }
            output.push(z);
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

/// The bare network (operates on already-scaled inputs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Mlp {
    fn new(sizes: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        let mut layers = Vec::new();
        for pair in sizes.windows(2) {
            let (in_dim, out_dim) = (pair[0], pair[1]);
            let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
            let weights = (0..in_dim * out_dim)
                .map(|_| rng.gen_range(-limit..limit))
                .collect();
            layers.push(Dense {
                in_dim,
                out_dim,
                weights,
                biases: vec![0.0; out_dim],
            });
        }
        Mlp { layers }
    }

    /// Deterministic forward pass (no dropout); returns the output
    /// probability.
    pub fn forward(&self, input: &[f64]) -> f64 {
        let mut current = input.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.forward(&current, &mut next);
            if i < last {
                for z in &mut next {
                    *z = z.max(0.0);
                }
            }
            std::mem::swap(&mut current, &mut next);
        }
        sigmoid(current[0])
    }

    /// Forward with caches (and optional per-layer dropout masks) for
    /// backpropagation. Returns (activations per layer incl. input,
    /// output probability).
    fn forward_cached(&self, input: &[f64], masks: Option<&[Vec<f64>]>) -> (Vec<Vec<f64>>, f64) {
        let mut activations = vec![input.to_vec()];
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::new();
            layer.forward(activations.last().unwrap(), &mut out);
            if i < last {
                for z in &mut out {
                    *z = z.max(0.0);
                }
                if let Some(masks) = masks {
                    for (a, m) in out.iter_mut().zip(&masks[i]) {
                        *a *= m;
                    }
                }
            }
            activations.push(out);
        }
        let p = sigmoid(activations.last().unwrap()[0]);
        (activations, p)
    }

    /// Gradient of the loss wrt every parameter, accumulated into `grads`
    /// (flat layout: per layer, weights then biases).
    fn accumulate_gradients(
        &self,
        activations: &[Vec<f64>],
        masks: Option<&[Vec<f64>]>,
        dloss_dz_out: f64,
        grads: &mut [f64],
    ) {
        // delta for the current layer's outputs, starting at the output unit
        let mut delta = vec![dloss_dz_out];
        let mut offset: usize = self.layers.iter().map(Dense::param_count).sum();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            offset -= layer.param_count();
            let input = &activations[i];
            let grad = &mut grads[offset..offset + layer.param_count()];
            for o in 0..layer.out_dim {
                for j in 0..layer.in_dim {
                    grad[o * layer.in_dim + j] += delta[o] * input[j];
                }
                grad[layer.weights.len() + o] += delta[o];
            }
            if i == 0 {
                break;
            }
            // propagate through weights, then the previous layer's
            // dropout mask and rectifier
            let mut prev = vec![0.0; layer.in_dim];
            for o in 0..layer.out_dim {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += delta[o] * w;
                }
            }
            if let Some(masks) = masks {
                for (p, m) in prev.iter_mut().zip(&masks[i - 1]) {
                    *p *= m;
                }
            }
            for (p, a) in prev.iter_mut().zip(&activations[i]) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }

    fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    fn set_params_flat(&mut self, params: &[f64]) {
        let mut offset = 0;
        for layer in &mut self.layers {
            let nw = layer.weights.len();
            layer.weights.copy_from_slice(&params[offset..offset + nw]);
            offset += nw;
            let nb = layer.biases.len();
            layer.biases.copy_from_slice(&params[offset..offset + nb]);
            offset += nb;
        }
    }
}

const P_CLAMP: f64 = 1e-12;

fn clamp_prob(p: f64) -> f64 {
    p.clamp(P_CLAMP, 1.0 - P_CLAMP)
}

/// Loss for one sample; `target` is 1 for non-formalistic.
fn loss_value(config: &MlpConfig, pos_weight: f64, p: f64, target: f64) -> f64 {
    let p = clamp_prob(p);
    match config.loss {
        LossKind::Bce => -(target * p.ln() + (1.0 - target) * (1.0 - p).ln()),
        LossKind::WeightedBce => {
            -(pos_weight * target * p.ln() + (1.0 - target) * (1.0 - p).ln())
        }
        LossKind::Asymmetric => {
            if target > 0.5 {
                // positive term with focusing exponent gamma+
                -(1.0 - p).powf(config.asymmetric_gamma_pos) * p.ln()
            } else {
                // negative term: probability margin clipped, exponent gamma-
                let pm = (p - config.asymmetric_margin).max(0.0);
                if pm <= 0.0 {
                    0.0
                } else {
                    -pm.powf(config.asymmetric_gamma_neg) * (1.0 - pm).ln()
                }
            }
        }
    }
}

/// d(loss)/d(pre-sigmoid logit) for one sample.
fn dloss_dz(config: &MlpConfig, pos_weight: f64, p: f64, target: f64) -> f64 {
    let p = clamp_prob(p);
    match config.loss {
        LossKind::Bce => p - target,
        LossKind::WeightedBce => {
            // d/dz of -(w+ y ln p + (1-y) ln(1-p))
            pos_weight * target * (p - 1.0) + (1.0 - target) * p
        }
        LossKind::Asymmetric => {
            let dp = if target > 0.5 {
                let g = config.asymmetric_gamma_pos;
                if g == 0.0 {
                    -1.0 / p
                } else {
                    g * (1.0 - p).powf(g - 1.0) * p.ln() - (1.0 - p).powf(g) / p
                }
            } else {
                let pm = p - config.asymmetric_margin;
                if pm <= 0.0 {
                    0.0
                } else {
                    let h = config.asymmetric_gamma_neg;
                    -h * pm.powf(h - 1.0) * (1.0 - pm).ln() + pm.powf(h) / (1.0 - pm)
                }
            };
            dp * p * (1.0 - p)
        }
    }
}

/// Per-epoch losses recorded during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub validation_macro_f1: f64,
}

/// A trained classifier: network parameters, the scaler fitted on the
/// training set, and the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub format_version: u32,
    pub network: Mlp,
    pub scaler: Scaler,
    pub config: MlpConfig,
    /// Positive-class weight used by the weighted loss (1.0 otherwise).
    pub pos_weight: f64,
    pub history: Vec<EpochStats>,
    /// Architecture metadata recorded for reproducibility.
    pub activation: String,
    pub optimizer: String,
}

impl MlpModel {
    /// Probability of non-formalistic for a raw (unscaled) feature
    /// vector. Deterministic; no dropout at inference.
    pub fn predict(&self, vector: &FeatureVector) -> f64 {
        self.network.forward(&apply_scaler(&self.scaler, vector))
    }

    /// Thresholded prediction at 0.5.
    pub fn predict_label(&self, vector: &FeatureVector) -> HolisticLabel {
        if self.predict(vector) >= 0.5 {
            HolisticLabel::NonFormalistic
        } else {
            HolisticLabel::Formalistic
        }
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> std::io::Result<MlpModel> {
        let json = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&json)?)
    }

    /// Builds a model directly from parts; used by tests and tools that
    /// need hand-constructed networks.
    pub fn from_parts(network: Mlp, scaler: Scaler, config: MlpConfig) -> MlpModel {
        MlpModel {
            format_version: 1,
            network,
            scaler,
            config,
            pos_weight: 1.0,
            history: Vec::new(),
            activation: "relu/sigmoid".to_string(),
            optimizer: "adam".to_string(),
        }
    }
}

fn target_of(label: HolisticLabel) -> f64 {
    match label {
        HolisticLabel::NonFormalistic => 1.0,
        HolisticLabel::Formalistic => 0.0,
    }
}

fn mean_loss(
    network: &Mlp,
    config: &MlpConfig,
    pos_weight: f64,
    data: &[(Vec<f64>, f64)],
) -> f64 {
    let total: f64 = data
        .iter()
        .map(|(x, y)| loss_value(config, pos_weight, network.forward(x), *y))
        .sum();
    total / data.len() as f64
}

fn macro_f1_of(network: &Mlp, data: &[(Vec<f64>, f64)]) -> f64 {
    let gold: Vec<bool> = data.iter().map(|(_, y)| *y > 0.5).collect();
    let pred: Vec<bool> = data.iter().map(|(x, _)| network.forward(x) >= 0.5).collect();
    let (_, _, f1) = binary_macro_prf(&gold, &pred).expect("non-empty");
    f1
}

/// Trains the classifier with mini-batch gradients, seeded shuffling,
/// dropout active only during training, and early stopping on the
/// configured validation metric. Returns the parameters from the best
/// validation epoch.
pub fn train_mlp(
    train: &[(FeatureVector, HolisticLabel)],
    validation: &[(FeatureVector, HolisticLabel)],
    config: &MlpConfig,
) -> Result<MlpModel, TrainError> {
    if train.is_empty() {
        return Err(TrainError::EmptySet("training"));
    }
    if validation.is_empty() {
        return Err(TrainError::EmptySet("validation"));
    }
    let train_vectors: Vec<FeatureVector> = train.iter().map(|(fv, _)| fv.clone()).collect();
    let scaler = fit_scaler(&train_vectors).expect("non-empty training set");
    let scale_set = |rows: &[(FeatureVector, HolisticLabel)]| -> Vec<(Vec<f64>, f64)> {
        rows.iter()
            .map(|(fv, label)| (apply_scaler(&scaler, fv).to_vec(), target_of(*label)))
            .collect()
    };
    let train_data = scale_set(train);
    let val_data = scale_set(validation);

    let n_pos = train_data.iter().filter(|(_, y)| *y > 0.5).count();
    let n_neg = train_data.len() - n_pos;
    let pos_weight = if config.loss == LossKind::WeightedBce && n_pos > 0 {
        n_neg as f64 / n_pos as f64
    } else {
        1.0
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sizes = [
        FEATURE_DIM,
        config.hidden_sizes.0,
        config.hidden_sizes.1,
        1,
    ];
    let mut network = Mlp::new(&sizes, &mut rng);
    let n_params = network.param_count();

    // adaptive moment estimation state
    let mut m = vec![0.0; n_params];
    let mut v = vec![0.0; n_params];
    let mut step = 0usize;
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    let dropout = [config.dropout_rates.0, config.dropout_rates.1];
    let hidden = [config.hidden_sizes.0, config.hidden_sizes.1];

    let mut indices: Vec<usize> = (0..train_data.len()).collect();
    let mut history = Vec::new();
    let mut best_params = network.params_flat();
    let mut best_metric = f64::INFINITY; // minimized; macro-F1 is negated
    let mut epochs_without_improvement = 0;

    for epoch in 0..config.max_epochs {
        indices.shuffle(&mut rng);
        for batch in indices.chunks(config.batch_size.max(1)) {
            let mut grads = vec![0.0; n_params];
            for &idx in batch {
                let (x, y) = &train_data[idx];
                // fresh inverted-dropout masks per sample
                let masks: Vec<Vec<f64>> = hidden
                    .iter()
                    .zip(dropout)
                    .map(|(size, rate)| {
                        (0..*size)
                            .map(|_| {
                                if rate > 0.0 && rng.gen::<f64>() < rate {
                                    0.0
                                } else {
                                    1.0 / (1.0 - rate)
                                }
                            })
                            .collect()
                    })
                    .collect();
                let (activations, p) = network.forward_cached(x, Some(&masks));
                let dz = dloss_dz(config, pos_weight, p, *y);
                network.accumulate_gradients(&activations, Some(&masks), dz, &mut grads);
            }
            let scale = 1.0 / batch.len() as f64;
            step += 1;
            let mut params = network.params_flat();
            let bc1 = 1.0 - BETA1.powi(step as i32);
            let bc2 = 1.0 - BETA2.powi(step as i32);
            for i in 0..n_params {
                let g = grads[i] * scale;
                m[i] = BETA1 * m[i] + (1.0 - BETA1) * g;
                v[i] = BETA2 * v[i] + (1.0 - BETA2) * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                params[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + EPS);
            }
            network.set_params_flat(&params);
        }

        let train_loss = mean_loss(&network, config, pos_weight, &train_data);
        let validation_loss = mean_loss(&network, config, pos_weight, &val_data);
        let validation_macro_f1 = macro_f1_of(&network, &val_data);
        if !train_loss.is_finite() || !validation_loss.is_finite() {
            return Err(TrainError::Diverged {
                epoch,
                detail: format!("train={train_loss}, validation={validation_loss}"),
            });
        }
        history.push(EpochStats {
            epoch,
            train_loss,
            validation_loss,
            validation_macro_f1,
        });

        let monitored = match config.monitor {
            MonitorMetric::ValidationLoss => validation_loss,
            MonitorMetric::ValidationMacroF1 => -validation_macro_f1,
        };
        if monitored < best_metric {
            best_metric = monitored;
            best_params = network.params_flat();
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if epochs_without_improvement >= config.early_stopping_patience {
                break;
            }
        }
    }

    network.set_params_flat(&best_params);
    Ok(MlpModel {
        format_version: 1,
        network,
        scaler,
        config: config.clone(),
        pos_weight,
        history,
        activation: "relu/sigmoid".to_string(),
        optimizer: "adam".to_string(),
    })
}

/// Compares analytic gradients against central finite differences for
/// every parameter at one sample (dropout disabled). Returns the maximum
/// relative error; parameter pairs that are both numerically zero are
/// compared absolutely.
pub fn gradient_check(model: &MlpModel, sample: (&FeatureVector, HolisticLabel), epsilon: f64) -> f64 {
    let (fv, label) = sample;
    let x = apply_scaler(&model.scaler, fv).to_vec();
    let y = target_of(label);

    let mut network = model.network.clone();
    let (activations, p) = network.forward_cached(&x, None);
    let dz = dloss_dz(&model.config, model.pos_weight, p, y);
    let mut analytic = vec![0.0; network.param_count()];
    network.accumulate_gradients(&activations, None, dz, &mut analytic);

    let mut params = network.params_flat();
    let mut max_err: f64 = 0.0;
    for i in 0..params.len() {
        let original = params[i];
        params[i] = original + epsilon;
        network.set_params_flat(&params);
        let loss_plus = loss_value(&model.config, model.pos_weight, network.forward(&x), y);
        params[i] = original - epsilon;
        network.set_params_flat(&params);
        let loss_minus = loss_value(&model.config, model.pos_weight, network.forward(&x), y);
        params[i] = original;
        let numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
        let denom = analytic[i].abs().max(numeric.abs());
        let err = if denom < 1e-7 {
            (analytic[i] - numeric).abs()
        } else {
            (analytic[i] - numeric).abs() / denom
        };
        max_err = max_err.max(err);
    }
    network.set_params_flat(&params);
    max_err
}
