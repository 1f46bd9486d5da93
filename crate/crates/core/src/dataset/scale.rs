//! Per-column min-max scaling to [0, 1].

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalingParams {
    /// Fit on training data only.
    pub fn fit(dataset: &Dataset) -> ScalingParams {
        let m = dataset.features();
        let mut mins = vec![f64::INFINITY; m.cols()];
        let mut maxs = vec![f64::NEG_INFINITY; m.cols()];
        for row in m.iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        if m.rows() == 0 {
            mins.fill(0.0);
            maxs.fill(0.0);
        }
        ScalingParams { mins, maxs }
    }

    /// `(x - min) / (max - min)` clamped to [0, 1]; constant columns map to 0.
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        let m = dataset.features();
        if m.cols() != self.mins.len() {
            return Err(Error::Dimension {
                expected: self.mins.len(),
                found: m.cols(),
            });
        }
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for (j, (dst, &x)) in out.row_mut(i).iter_mut().zip(m.row(i)).enumerate() {
                *dst = self.scale_value(j, x);
            }
        }
        Dataset::new(
            out,
            dataset.labels().to_vec(),
            dataset.feature_ids().to_vec(),
            dataset.feature_names().to_vec(),
        )
    }

    fn scale_value(&self, column: usize, x: f64) -> f64 {
        let (lo, hi) = (self.mins[column], self.maxs[column]);
        let range = hi - lo;
        if range <= 0.0 || !range.is_finite() {
            return 0.0;
        }
        ((x - lo) / range).clamp(0.0, 1.0)
    }
}
