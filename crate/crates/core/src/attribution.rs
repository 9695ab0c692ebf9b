//! Exact Shapley-value attribution for the feature classifier.
//!
//! With only 11 features the 2^11 = 2048 coalitions can be enumerated
//! outright, so no sampling approximation is needed. Features absent from
//! a coalition are replaced by the corresponding component of a reference
//! vector (conventionally the training-set mean); the value of a
//! coalition is the model output on that mixed raw-space vector.

use crate::features::{FeatureVector, MlpModel, FEATURE_DIM, FEATURE_NAMES};

/// Shapley attributions for one instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Attribution {
    /// Per-feature Shapley value, in [`FEATURE_NAMES`] order.
    pub values: [f64; FEATURE_DIM],
    /// Model output with every feature at the reference (empty coalition).
    pub base_value: f64,
    /// Model output on the instance itself (grand coalition).
    pub prediction: f64,
}

impl Attribution {
    /// Features sorted by decreasing absolute attribution.
    pub fn ranked(&self) -> Vec<(&'static str, f64)> {
        let mut out: Vec<(&'static str, f64)> = FEATURE_NAMES
            .iter()
            .copied()
            .zip(self.values)
            .collect();
        out.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap());
        out
    }
}

/// Exact Shapley values for an arbitrary coalition value function over
/// `n` players. Enumerates all 2^n coalitions; `n` must stay small.
///
/// `value` receives a membership mask of length `n`.
pub fn shapley_from_value_fn(n: usize, mut value: impl FnMut(&[bool]) -> f64) -> Vec<f64> {
    assert!(n > 0 && n <= 20, "coalition enumeration needs 0 < n <= 20");
    let size = 1usize << n;
    // evaluate every coalition once
    let mut table = Vec::with_capacity(size);
    let mut members = vec![false; n];
    for mask in 0..size {
        for (i, m) in members.iter_mut().enumerate() {
            *m = mask & (1 << i) != 0;
        }
        table.push(value(&members));
    }

    let mut factorial = vec![1.0f64; n + 1];
    for i in 1..=n {
        factorial[i] = factorial[i - 1] * i as f64;
    }
    // weight for a coalition of size s that excludes the player:
    // s! (n - 1 - s)! / n!
    let weights: Vec<f64> = (0..n)
        .map(|s| factorial[s] * factorial[n - 1 - s] / factorial[n])
        .collect();

    let mut phi = vec![0.0; n];
    for mask in 0..size {
        let s = (mask as u32).count_ones() as usize;
        for i in 0..n {
            if mask & (1 << i) == 0 {
                phi[i] += weights[s] * (table[mask | (1 << i)] - table[mask]);
            }
        }
    }
    phi
}

/// Exact Shapley attribution of a model prediction. Coalition mixing
/// happens in raw feature space; the model's own scaler is applied inside
/// the value function.
pub fn exact_shapley(
    model: &MlpModel,
    instance: &FeatureVector,
    reference: &FeatureVector,
) -> Attribution {
    let x = instance.to_array();
    let r = reference.to_array();
    let values_vec = shapley_from_value_fn(FEATURE_DIM, |members| {
        let mut mixed = r;
        for (i, &m) in members.iter().enumerate() {
            if m {
                mixed[i] = x[i];
            }
        }
        model.predict(&FeatureVector::from_array(mixed))
    });
    let mut values = [0.0; FEATURE_DIM];
    values.copy_from_slice(&values_vec);
    Attribution {
        values,
        base_value: model.predict(reference),
        prediction: model.predict(instance),
    }
}

/// Component-wise mean of feature vectors; the usual reference point.
pub fn mean_feature_vector(vectors: &[FeatureVector]) -> FeatureVector {
    assert!(!vectors.is_empty(), "mean of empty feature set");
    let mut acc = [0.0; FEATURE_DIM];
    for fv in vectors {
        for (a, x) in acc.iter_mut().zip(fv.to_array()) {
            *a += x;
        }
    }
    for a in &mut acc {
        *a /= vectors.len() as f64;
    }
    FeatureVector::from_array(acc)
}

/// Mean absolute Shapley value per feature across a set of instances
/// (global importance summary).
pub fn shap_summary(
    model: &MlpModel,
    instances: &[FeatureVector],
    reference: &FeatureVector,
) -> [f64; FEATURE_DIM] {
    let mut acc = [0.0; FEATURE_DIM];
    for fv in instances {
        let attribution = exact_shapley(model, fv, reference);
        for (a, v) in acc.iter_mut().zip(attribution.values) {
            *a += v.abs();
        }
    }
    if !instances.is_empty() {
        for a in &mut acc {
            *a /= instances.len() as f64;
        }
    }
    acc
}
