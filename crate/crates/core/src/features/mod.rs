//! Document-level feature extraction, feature scaling and the MLP
//! formalism classifier.

mod mlp;

pub use mlp::{
    gradient_check, train_mlp, Dense, EpochStats, LossKind, Mlp, MlpConfig, MlpModel,
    MonitorMetric, TrainError,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ArgumentType, Document};

/// Number of feature components: doc length, argument count, average
/// argument length, plus one relative frequency per argument type.
pub const FEATURE_DIM: usize = 11;

/// Fixed component order: (doc_length, n_arguments, avg_arg_length,
/// LIN, SI, CL, D, HI, PL, TI, PC).
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "doc_length_tokens",
    "n_arguments",
    "avg_argument_length_tokens",
    "rel_freq_LIN",
    "rel_freq_SI",
    "rel_freq_CL",
    "rel_freq_D",
    "rel_freq_HI",
    "rel_freq_PL",
    "rel_freq_TI",
    "rel_freq_PC",
];

/// The 11-component document feature representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_length_tokens: u64,
    pub n_arguments: u64,
    pub avg_argument_length_tokens: f64,
    /// Relative frequency in percent per argument type, inventory order.
    pub rel_freq: [f64; 8],
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        out[0] = self.doc_length_tokens as f64;
        out[1] = self.n_arguments as f64;
        out[2] = self.avg_argument_length_tokens;
        out[3..].copy_from_slice(&self.rel_freq);
        out
    }

    pub fn from_array(values: [f64; FEATURE_DIM]) -> FeatureVector {
        let mut rel_freq = [0.0; 8];
        rel_freq.copy_from_slice(&values[3..]);
        FeatureVector {
            doc_length_tokens: values[0].round() as u64,
            n_arguments: values[1].round() as u64,
            avg_argument_length_tokens: values[2],
            rel_freq,
        }
    }

    pub fn rel_freq_of(&self, ty: ArgumentType) -> f64 {
        let idx = ArgumentType::ALL.iter().position(|t| *t == ty).unwrap();
        self.rel_freq[idx]
    }
}

/// Extracts the document-level feature vector from annotations (gold or
/// predicted).
///
/// Average argument length is the mean token count of paragraphs
/// containing at least one argument (0 when there is none); relative
/// frequencies sum to 100 whenever any argument exists.
pub fn extract_features(document: &Document) -> FeatureVector {
    let doc_length_tokens = document.token_count() as u64;
    let mut type_counts = [0u64; 8];
    let mut arg_para_tokens = 0usize;
    let mut arg_para_count = 0usize;
    for para in &document.paragraphs {
        if para.is_argumentative() {
            arg_para_tokens += para.token_count();
            arg_para_count += 1;
        }
        for ty in &para.argument_types {
            let idx = ArgumentType::ALL.iter().position(|t| t == ty).unwrap();
            type_counts[idx] += 1;
        }
    }
    let n_arguments: u64 = type_counts.iter().sum();
    let avg_argument_length_tokens = if arg_para_count == 0 {
        0.0
    } else {
        arg_para_tokens as f64 / arg_para_count as f64
    };
    let mut rel_freq = [0.0; 8];
    if n_arguments > 0 {
        for (freq, count) in rel_freq.iter_mut().zip(type_counts) {
            *freq = 100.0 * count as f64 / n_arguments as f64;
        }
    }
    FeatureVector {
        doc_length_tokens,
        n_arguments,
        avg_argument_length_tokens,
        rel_freq,
    }
}

#[derive(Debug, Error)]
pub enum ScalerError {
    #[error("empty training set")]
    EmptyTrainingSet,
}

/// Per-component standardization parameters fitted on training data.
///
/// Degenerate (constant) components get scale 1 so scaled values come out
/// as 0 instead of NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: [f64; FEATURE_DIM],
    pub scale: [f64; FEATURE_DIM],
}

/// Fits standardization parameters (mean, population standard deviation)
/// per component.
pub fn fit_scaler(train_vectors: &[FeatureVector]) -> Result<Scaler, ScalerError> {
    if train_vectors.is_empty() {
        return Err(ScalerError::EmptyTrainingSet);
    }
    let n = train_vectors.len() as f64;
    let mut mean = [0.0; FEATURE_DIM];
    for fv in train_vectors {
        for (m, x) in mean.iter_mut().zip(fv.to_array()) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut scale = [0.0; FEATURE_DIM];
    for fv in train_vectors {
        for ((s, m), x) in scale.iter_mut().zip(mean).zip(fv.to_array()) {
            *s += (x - m) * (x - m);
        }
    }
    for s in &mut scale {
        *s = (*s / n).sqrt();
        if *s <= 1e-12 {
            *s = 1.0;
        }
    }
    Ok(Scaler { mean, scale })
}

pub fn apply_scaler(scaler: &Scaler, vector: &FeatureVector) -> [f64; FEATURE_DIM] {
    let mut out = vector.to_array();
    for ((x, m), s) in out.iter_mut().zip(scaler.mean).zip(scaler.scale) {
        *x = (*x - m) / s;
    }
    out
}

pub fn invert_scaler(scaler: &Scaler, scaled: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
    let mut out = *scaled;
    for ((x, m), s) in out.iter_mut().zip(scaler.mean).zip(scaler.scale) {
        *x = *x * s + m;
    }
    out
}
