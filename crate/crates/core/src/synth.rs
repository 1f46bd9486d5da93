//! Synthetic classification data with planted informative and pure-noise
//! columns, used as ground truth for the selector.
//!
//! Informative columns come from class-conditional Gaussians with standard
//! deviation [`CLUSTER_STD`] around per-class means. A draw is kept only if
//! it lies at least `margin / 2` on its own side of every bisecting
//! hyperplane between its class mean and another class mean, so the classes
//! are linearly separable with a corridor of width `margin`. With two
//! classes the means differ along a direction with equal weight on every
//! informative column, and the clusters are wide compared with the corridor,
//! so dropping any one of them costs accuracy. Noise columns are uniform on
//! [0, 1] and independent of the label. Columns are shuffled and the result
//! is min-max scaled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureId, ScalingParams, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::svm::{accuracy, train_multiclass, SvmConfig};

const MAX_DRAWS_PER_SAMPLE: usize = 10_000;

/// Per-column standard deviation of the informative clusters, in the same
/// raw units as the margin.
pub const CLUSTER_STD: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub samples: usize,
    pub informative: usize,
    pub noise: usize,
    pub classes: usize,
    pub margin: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            samples: 2000,
            informative: 5,
            noise: 10,
            classes: 2,
            margin: 2.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.informative == 0 {
            return Err(Error::config("need at least one informative feature"));
        }
        if !(2..=NUM_CLASSES).contains(&self.classes) {
            return Err(Error::config(format!(
                "class count must be 2..={NUM_CLASSES}, got {}",
                self.classes
            )));
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return Err(Error::config(format!(
                "margin must be positive, got {}",
                self.margin
            )));
        }
        if self.samples < self.classes {
            return Err(Error::config("need at least one sample per class"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: Dataset,
    pub noise_features: Vec<FeatureId>,
    pub informative_features: Vec<FeatureId>,
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.informative;
    let means = class_means(spec, &mut rng);

    let width = d + spec.noise;
    let mut rows: Vec<(Vec<f64>, u8)> = Vec::with_capacity(spec.samples);
    for i in 0..spec.samples {
        let class = i % spec.classes;
        let x = draw_separated(&means, class, spec.margin, &mut rng)?;
        let mut row = x;
        row.extend((0..spec.noise).map(|_| rng.random::<f64>()));
        rows.push((row, class as u8));
    }
    rows.shuffle(&mut rng);

    // generated column g lands at position perm[g]
    let mut perm: Vec<usize> = (0..width).collect();
    perm.shuffle(&mut rng);
    let mut data = vec![0.0; spec.samples * width];
    let mut labels = Vec::with_capacity(spec.samples);
    for (i, (row, label)) in rows.iter().enumerate() {
        for (g, &v) in row.iter().enumerate() {
            data[i * width + perm[g]] = v;
        }
        labels.push(*label);
    }
    let raw = Dataset::with_default_ids(Matrix::new(spec.samples, width, data)?, labels)?;
    let dataset = ScalingParams::fit(&raw).apply(&raw)?;

    let mut noise_features: Vec<FeatureId> = (d..width).map(|g| FeatureId(perm[g] + 1)).collect();
    let mut informative_features: Vec<FeatureId> = (0..d).map(|g| FeatureId(perm[g] + 1)).collect();
    noise_features.sort_unstable();
    informative_features.sort_unstable();
    Ok(SynthData {
        dataset,
        noise_features,
        informative_features,
    })
}

fn class_means(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = spec.informative;
    let half = spec.margin / 2.0;
    if spec.classes == 2 {
        let scale = half / (d as f64).sqrt();
        let v: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect();
        return vec![v.iter().map(|x| -x).collect(), v];
    }
    if d == 1 {
        // inner classes need room on both sides of their mean
        return (0..spec.classes)
            .map(|c| vec![2.0 * c as f64 * spec.margin])
            .collect();
    }
    loop {
        let dirs: Vec<Vec<f64>> = (0..spec.classes)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                let n = dot(&v, &v).sqrt();
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let mut min_dist = f64::INFINITY;
        for a in 0..dirs.len() {
            for b in a + 1..dirs.len() {
                min_dist = min_dist.min(distance(&dirs[a], &dirs[b]));
            }
        }
        if min_dist > 1e-3 {
            let s = spec.margin / min_dist;
            return dirs
                .into_iter()
                .map(|v| v.into_iter().map(|x| x * s).collect())
                .collect();
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn draw_separated(means: &[Vec<f64>], class: usize, margin: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let own = &means[class];
    for _ in 0..MAX_DRAWS_PER_SAMPLE {
        let x: Vec<f64> = own
            .iter()
            .map(|m| m + CLUSTER_STD * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let clear = means.iter().enumerate().all(|(k, other)| {
            if k == class {
                return true;
            }
            let normal: Vec<f64> = own.iter().zip(other).map(|(a, b)| a - b).collect();
            let mid: Vec<f64> = own.iter().zip(other).map(|(a, b)| 0.5 * (a + b)).collect();
            let offset: Vec<f64> = x.iter().zip(&mid).map(|(a, b)| a - b).collect();
            dot(&offset, &normal) / dot(&normal, &normal).sqrt() >= margin / 2.0
        });
        if clear {
            return Ok(x);
        }
    }
    Err(Error::config(format!(
        "could not draw a sample for class {class} clear of the margin; lower the margin or class count"
    )))
}

/// Accuracy with and without `feature`, training on the first 7 of every 10
/// rows and testing on the rest.
pub fn oracle_redundancy(dataset: &Dataset, feature: FeatureId, svm: &SvmConfig) -> Result<(f64, f64)> {
    if dataset.n_features() < 2 {
        return Err(Error::config("need at least 2 features to drop one"));
    }
    dataset
        .position_of(feature)
        .ok_or(Error::UnknownFeature(feature))?;
    let (train_rows, test_rows): (Vec<usize>, Vec<usize>) = (0..dataset.n_rows()).partition(|i| i % 10 < 7);
    let train = dataset.select_rows(&train_rows);
    let test = dataset.select_rows(&test_rows);

    let with = accuracy(&train_multiclass(&train, svm)?, &test)?;
    let train_wo = train.remove_features(&[feature])?;
    let test_wo = test.remove_features(&[feature])?;
    let without = accuracy(&train_multiclass(&train_wo, svm)?, &test_wo)?;
    Ok((with, without))
}
