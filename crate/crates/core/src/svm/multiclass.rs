use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train_binary, BinaryModel, SvmConfig};
use crate::dataset::{Dataset, FeatureId, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// One-vs-rest linear classifier over classes `0..NUM_CLASSES`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub classes: Vec<u8>,
    pub models: Vec<BinaryModel>,
    /// Identities of the columns the model was trained on, shared by every
    /// member model.
    pub feature_ids: Vec<FeatureId>,
    pub config: SvmConfig,
}

/// Trains one binary model per class (label == c vs rest). Classes absent
/// from the data get the constant negative model.
pub fn train_multiclass(dataset: &Dataset, cfg: &SvmConfig) -> Result<MulticlassModel> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let present = dataset.class_counts();
    let x = dataset.features();
    let models = (0..NUM_CLASSES as u8)
        .into_par_iter()
        .map(|class| {
            if present[class as usize] == 0 {
                return Ok(BinaryModel::constant(x.cols(), -1.0));
            }
            let y: Vec<f64> = dataset
                .labels()
                .iter()
                .map(|&l| if l == class { 1.0 } else { -1.0 })
                .collect();
            let class_cfg = SvmConfig {
                seed: cfg.seed.wrapping_add(class as u64),
                ..*cfg
            };
            train_binary(x, &y, &class_cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MulticlassModel {
        classes: (0..NUM_CLASSES as u8).collect(),
        models,
        feature_ids: dataset.feature_ids().to_vec(),
        config: *cfg,
    })
}

impl MulticlassModel {
    pub fn n_features(&self) -> usize {
        self.feature_ids.len()
    }

    /// Argmax of the per-class decision values; ties go to the lowest class.
    pub fn predict(&self, row: &[f64]) -> Result<u8> {
        if row.len() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                found: row.len(),
            });
        }
        Ok(self.predict_unchecked(row))
    }

    #[inline]
    fn predict_unchecked(&self, row: &[f64]) -> u8 {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (k, m) in self.models.iter().enumerate() {
            let s = m.decision(row);
            if s > best_score {
                best = k;
                best_score = s;
            }
        }
        self.classes[best]
    }

    pub fn predict_batch(&self, x: &Matrix) -> Result<Vec<u8>> {
        if x.cols() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                found: x.cols(),
            });
        }
        Ok(x.iter_rows().map(|r| self.predict_unchecked(r)).collect())
    }

    fn check_compatible(&self, dataset: &Dataset) -> Result<()> {
        if dataset.n_features() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                found: dataset.n_features(),
            });
        }
        if dataset.feature_ids() != self.feature_ids.as_slice() {
            return Err(Error::config("dataset columns differ from the model's columns"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: MulticlassModel = serde_json::from_str(text)?;
        if model.classes.len() != model.models.len()
            || model
                .models
                .iter()
                .any(|m| m.weights.len() != model.feature_ids.len())
        {
            return Err(Error::config("inconsistent model document"));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        MulticlassModel::from_json(&text)
    }
}

/// Fraction of rows whose predicted class equals the label.
pub fn accuracy(model: &MulticlassModel, dataset: &Dataset) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    model.check_compatible(dataset)?;
    let predictions = model.predict_batch(dataset.features())?;
    let correct = predictions
        .iter()
        .zip(dataset.labels())
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / dataset.n_rows() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedPrediction {
    pub predictions: Vec<u8>,
    pub median_seconds: f64,
    pub samples: Vec<f64>,
}

/// Predicts the whole dataset `repeats` times and reports the median
/// wall-clock duration of one full pass.
pub fn timed_predict(model: &MulticlassModel, dataset: &Dataset, repeats: usize) -> Result<TimedPrediction> {
    if repeats == 0 {
        return Err(Error::config("timed prediction needs at least one repeat"));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    model.check_compatible(dataset)?;
    let mut samples = Vec::with_capacity(repeats);
    let mut predictions = Vec::new();
    for _ in 0..repeats {
        let start = Instant::now();
        let p = model.predict_batch(dataset.features())?;
        samples.push(start.elapsed().as_secs_f64());
        predictions = std::hint::black_box(p);
    }
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median_seconds = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    Ok(TimedPrediction {
        predictions,
        median_seconds,
        samples,
    })
}
