//! Dataset container and the preprocessing pipeline feeding the selector.

mod csv_io;
pub mod kdd;
pub mod scale;
pub mod subset;

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use csv_io::{read_csv, read_csv_from, write_csv, write_csv_to};
pub use scale::ScalingParams;
pub use subset::{build_subset_pool, sample_subset, SubsetPool, SubsetSpec};

/// Number of class codes: normal=0, DoS=1, U2R=2, R2L=3, PROBE=4.
pub const NUM_CLASSES: usize = 5;

/// Original 1-based feature index. Never renumbered by removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureId(pub usize);

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Feature matrix, class labels and the identities of the surviving columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<u8>,
    feature_ids: Vec<FeatureId>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<u8>,
        feature_ids: Vec<FeatureId>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Dimension {
                expected: features.rows(),
                found: labels.len(),
            });
        }
        for len in [feature_ids.len(), feature_names.len()] {
            if len != features.cols() {
                return Err(Error::Dimension {
                    expected: features.cols(),
                    found: len,
                });
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= NUM_CLASSES) {
            return Err(Error::InvalidLabel(bad as u32));
        }
        if feature_ids.windows(2).any(|w| w[0] >= w[1]) || feature_ids.first() == Some(&FeatureId(0)) {
            return Err(Error::config(
                "feature ids must be 1-based and strictly increasing",
            ));
        }
        Ok(Dataset {
            features,
            labels,
            feature_ids,
            feature_names,
        })
    }

    /// Dataset whose columns are numbered 1..=cols and named `f1`, `f2`, ...
    pub fn with_default_ids(features: Matrix, labels: Vec<u8>) -> Result<Self> {
        let ids: Vec<_> = (1..=features.cols()).map(FeatureId).collect();
        let names = ids.iter().map(|id| format!("f{id}")).collect();
        Dataset::new(features, labels, ids, names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_ids(&self) -> &[FeatureId] {
        &self.feature_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows() == 0
    }

    pub fn position_of(&self, id: FeatureId) -> Option<usize> {
        self.feature_ids.binary_search(&id).ok()
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Drops the named columns. Surviving columns keep their identities.
    pub fn remove_features(&self, ids: &[FeatureId]) -> Result<Dataset> {
        let mut drop = vec![false; self.n_features()];
        for &id in ids {
            let pos = self.position_of(id).ok_or(Error::UnknownFeature(id))?;
            if drop[pos] {
                return Err(Error::UnknownFeature(id));
            }
            drop[pos] = true;
        }
        let keep: Vec<usize> = (0..self.n_features()).filter(|&j| !drop[j]).collect();
        Ok(self.project(&keep))
    }

    /// Keeps only the named columns (in identity order).
    pub fn retain_features(&self, ids: &[FeatureId]) -> Result<Dataset> {
        let mut keep = ids
            .iter()
            .map(|&id| self.position_of(id).ok_or(Error::UnknownFeature(id)))
            .collect::<Result<Vec<_>>>()?;
        keep.sort_unstable();
        keep.dedup();
        Ok(self.project(&keep))
    }

    fn project(&self, positions: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_cols(positions),
            labels: self.labels.clone(),
            feature_ids: positions.iter().map(|&j| self.feature_ids[j]).collect(),
            feature_names: positions.iter().map(|&j| self.feature_names[j].clone()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            feature_ids: self.feature_ids.clone(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Per-class shuffled split; `test_fraction` of every class goes to the
    /// second dataset (rounded down).
    pub fn stratified_split(&self, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
        if !(0.0..1.0).contains(&test_fraction) {
            return Err(Error::config(format!(
                "test fraction {test_fraction} outside [0, 1)"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in 0..NUM_CLASSES as u8 {
            let mut rows: Vec<usize> = (0..self.n_rows()).filter(|&i| self.labels[i] == class).collect();
            rows.shuffle(&mut rng);
            let n_test = (rows.len() as f64 * test_fraction).floor() as usize;
            test.extend_from_slice(&rows[..n_test]);
            train.extend_from_slice(&rows[n_test..]);
        }
        train.sort_unstable();
        test.sort_unstable();
        Ok((self.select_rows(&train), self.select_rows(&test)))
    }
}
