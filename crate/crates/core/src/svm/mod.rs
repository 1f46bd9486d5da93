//! Linear SVM: L2-regularized hinge loss solved by dual coordinate descent,
//! plus a one-vs-rest multiclass wrapper.
//!
//! The bias is handled as an extra constant-1 input, so it is regularized
//! together with the weights:
//!
//! ```text
//! min  ½(‖w‖² + b²) + C · Σ max(0, 1 − yᵢ(w·xᵢ + b))
//! ```
//!
//! The dual is `min ½αᵀQα − Σα` subject to `0 ≤ αᵢ ≤ C` with
//! `Qᵢⱼ = yᵢyⱼ(xᵢ·xⱼ + 1)`; each coordinate step is solved in closed form
//! and `(w, b) = Σ αᵢyᵢ(xᵢ, 1)` is maintained incrementally.

mod multiclass;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

pub use multiclass::{accuracy, timed_predict, train_multiclass, MulticlassModel, TimedPrediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    /// Hinge-loss weight.
    pub c: f64,
    pub max_epochs: usize,
    /// Stop once every projected-gradient magnitude is below this.
    pub tolerance: f64,
    /// Seed of the per-epoch example permutation.
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            max_epochs: 100,
            tolerance: 1e-3,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::config(format!("svm C must be positive, got {}", self.c)));
        }
        if self.max_epochs == 0 {
            return Err(Error::config("svm max epochs must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::config(format!(
                "svm tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Linear decision function `w·x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl BinaryModel {
    /// The model that scores every input as `sign`.
    pub fn constant(dim: usize, sign: f64) -> Self {
        BinaryModel {
            weights: vec![0.0; dim],
            bias: sign.signum(),
        }
    }

    #[inline]
    pub fn decision(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.bias
    }

    pub fn predict_sign(&self, row: &[f64]) -> f64 {
        if self.decision(row) >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Solver output including the dual variables and per-epoch objectives.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    pub model: BinaryModel,
    pub alphas: Vec<f64>,
    pub epochs: usize,
    pub converged: bool,
    /// Dual objective `½(‖w‖² + b²) − Σα` after each epoch.
    pub dual_objective: Vec<f64>,
    /// Primal objective after each epoch; empty unless recording was requested.
    pub primal_objective: Vec<f64>,
}

pub fn train_binary(x: &Matrix, y: &[f64], cfg: &SvmConfig) -> Result<BinaryModel> {
    Ok(solve(x, y, cfg, false)?.model)
}

/// Like [`train_binary`] but keeps the dual solution and records the primal
/// objective after every epoch.
pub fn train_binary_traced(x: &Matrix, y: &[f64], cfg: &SvmConfig) -> Result<TrainTrace> {
    solve(x, y, cfg, true)
}

fn check_targets(x: &Matrix, y: &[f64]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(Error::Dimension {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if let Some(bad) = y.iter().find(|&&t| t != 1.0 && t != -1.0) {
        return Err(Error::config(format!("svm targets must be ±1, got {bad}")));
    }
    Ok(())
}

fn solve(x: &Matrix, y: &[f64], cfg: &SvmConfig, record_primal: bool) -> Result<TrainTrace> {
    cfg.validate()?;
    check_targets(x, y)?;
    let n = x.rows();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let d = x.cols();

    let first = y[0];
    if y.iter().all(|&t| t == first) {
        return Ok(TrainTrace {
            model: BinaryModel::constant(d, first),
            alphas: vec![0.0; n],
            epochs: 0,
            converged: true,
            dual_objective: Vec::new(),
            primal_objective: Vec::new(),
        });
    }

    let c = cfg.c;
    let diag: Vec<f64> = x.iter_rows().map(|r| dot(r, r) + 1.0).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut dual_objective = Vec::new();
    let mut primal_objective = Vec::new();
    let mut converged = false;
    let mut epochs = 0;

    while epochs < cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut max_violation: f64 = 0.0;
        for &i in &order {
            let xi = x.row(i);
            let yi = y[i];
            let g = yi * (dot(&w, xi) + b) - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                alpha[i] = (old - g / diag[i]).clamp(0.0, c);
                let step = (alpha[i] - old) * yi;
                if step != 0.0 {
                    for (wj, &xj) in w.iter_mut().zip(xi) {
                        *wj += step * xj;
                    }
                    b += step;
                }
            }
        }
        epochs += 1;

        dual_objective.push(0.5 * (dot(&w, &w) + b * b) - alpha.iter().sum::<f64>());
        if record_primal {
            let model = BinaryModel {
                weights: w.clone(),
                bias: b,
            };
            primal_objective.push(primal(&model, x, y, c));
        }
        if max_violation < cfg.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("svm stopped after {epochs} epochs without reaching tolerance");
    }

    Ok(TrainTrace {
        model: BinaryModel { weights: w, bias: b },
        alphas: alpha,
        epochs,
        converged,
        dual_objective,
        primal_objective,
    })
}

fn primal(model: &BinaryModel, x: &Matrix, y: &[f64], c: f64) -> f64 {
    let reg = 0.5 * (dot(&model.weights, &model.weights) + model.bias * model.bias);
    let loss: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(row, &t)| (1.0 - t * model.decision(row)).max(0.0))
        .sum();
    reg + c * loss
}

/// Primal objective `½(‖w‖² + b²) + C·Σ hinge` of `model` on `(x, y)`.
pub fn objective(model: &BinaryModel, x: &Matrix, y: &[f64], c: f64) -> Result<f64> {
    if x.rows() != y.len() {
        return Err(Error::Dimension {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if x.cols() != model.weights.len() {
        return Err(Error::Dimension {
            expected: model.weights.len(),
            found: x.cols(),
        });
    }
    Ok(primal(model, x, y, c))
}
