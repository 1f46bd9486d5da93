//! The selection loop: calibrate the accuracy floor, let the automaton pick
//! features to drop temporarily, reward it when validation accuracy holds up,
//! and remove a feature for good once its probability crosses the removal
//! threshold.

mod report;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::{Automaton, Feedback};
use crate::dataset::{build_subset_pool, Dataset, FeatureId, SubsetPool, SubsetSpec};
use crate::error::{Error, Result};
use crate::svm::{accuracy, timed_predict, train_multiclass, MulticlassModel, SvmConfig};

pub use report::{comparison_table, write_trace_csv, FinalMetrics, RunReport, T1Summary, Timing};

/// Iterations per round when no explicit budget is configured, per active
/// feature.
pub const AUTO_BUDGET_PER_FEATURE: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConfig {
    /// Probability at which a feature is declared redundant (T2).
    pub removal_threshold: f64,
    /// Reward step; `None` means `1 / (10 · N)` over the original features.
    pub step_size: Option<f64>,
    /// Number of pre-drawn subsets (r).
    pub pool_size: usize,
    /// Added to the calibrated mean accuracy to form the floor T1.
    pub t1_offset: f64,
    /// Iterations per round; `None` means 200 × active features.
    pub iteration_budget: Option<usize>,
    pub min_features: usize,
    /// Recompute T1 on the reduced feature set after every removal.
    pub recalibrate: bool,
    pub subset: SubsetSpec,
    pub svm: SvmConfig,
    pub seed: u64,
    /// Repeats of the timed prediction in the final evaluation.
    pub timing_repeats: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            removal_threshold: 0.8,
            step_size: None,
            pool_size: 10,
            t1_offset: 0.0,
            iteration_budget: None,
            min_features: 1,
            recalibrate: false,
            subset: SubsetSpec::default(),
            svm: SvmConfig::default(),
            seed: 0,
            timing_repeats: 5,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.removal_threshold > 0.0 && self.removal_threshold <= 1.0) {
            return Err(Error::config(format!(
                "removal threshold must lie in (0, 1], got {}",
                self.removal_threshold
            )));
        }
        if let Some(step) = self.step_size {
            if !(step > 0.0 && step < 1.0) {
                return Err(Error::config(format!("step size must lie in (0, 1), got {step}")));
            }
        }
        if self.pool_size < 2 {
            return Err(Error::config(format!(
                "pool size must be at least 2, got {}",
                self.pool_size
            )));
        }
        if !self.t1_offset.is_finite() {
            return Err(Error::config("t1 offset must be finite"));
        }
        if self.iteration_budget == Some(0) {
            return Err(Error::config("iteration budget must be at least 1"));
        }
        if self.min_features == 0 {
            return Err(Error::config("minimum surviving features must be at least 1"));
        }
        if self.timing_repeats == 0 {
            return Err(Error::config("timing repeats must be at least 1"));
        }
        self.svm.validate()
    }

    pub fn resolved_step(&self, original_features: usize) -> f64 {
        self.step_size.unwrap_or(1.0 / (10.0 * original_features as f64))
    }

    pub fn resolved_budget(&self, active_features: usize) -> usize {
        self.iteration_budget
            .unwrap_or(AUTO_BUDGET_PER_FEATURE * active_features)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub round: usize,
    pub feature: FeatureId,
    pub train_subset: usize,
    pub validation_subset: usize,
    pub accuracy: f64,
    pub beta: u8,
    /// Largest action probability after the update.
    pub max_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub round: usize,
    pub iteration: usize,
    pub feature: FeatureId,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// A full round passed without any action reaching the threshold.
    BudgetExhausted,
    /// The surviving feature count hit the configured minimum.
    MinFeaturesReached,
}

/// Outcome of a single automaton step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub feature: FeatureId,
    pub train_subset: usize,
    pub validation_subset: usize,
    pub accuracy: f64,
    pub feedback: Feedback,
}

/// Models and metrics from retraining on the full training data.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub metrics: FinalMetrics,
    pub timing: Timing,
    pub baseline_model: MulticlassModel,
    pub reduced_model: MulticlassModel,
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub config: SelectionConfig,
    pub original_features: Vec<FeatureId>,
    pub step_size: f64,
    pub calibrated_accuracy: f64,
    /// T1 at the start of the run.
    pub t1: f64,
    /// T1 in force during each round (differs only with recalibration).
    pub t1_by_round: Vec<f64>,
    pub removed: Vec<FeatureId>,
    pub surviving: Vec<FeatureId>,
    pub trace: Vec<TraceRecord>,
    pub removals: Vec<Removal>,
    pub termination: Termination,
    pub evaluation: Evaluation,
}

/// Mean validation accuracy over the ordered pool pairs `(k, k+1 mod r)`,
/// training on `features` only.
pub fn pool_accuracy(pool: &[Dataset], features: &[FeatureId], svm: &SvmConfig) -> Result<f64> {
    let r = pool.len();
    if r < 2 {
        return Err(Error::config(format!(
            "calibration needs at least 2 subsets, got {r}"
        )));
    }
    let accs = (0..r)
        .into_par_iter()
        .map(|k| {
            let tr = pool[k].retain_features(features)?;
            let val = pool[(k + 1) % r].retain_features(features)?;
            let model = train_multiclass(&tr, svm)?;
            accuracy(&model, &val)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(accs.iter().sum::<f64>() / r as f64)
}

/// Accuracy floor T1: mean pool accuracy plus `offset`, capped at 1.
pub fn calibrate_t1(pool: &[Dataset], features: &[FeatureId], svm: &SvmConfig, offset: f64) -> Result<f64> {
    Ok((pool_accuracy(pool, features, svm)? + offset).min(1.0))
}

/// One automaton step: pick a feature, drop it from a random train/validation
/// pair, train, validate against `t1` and update the automaton.
pub fn run_iteration<R: Rng + ?Sized>(
    automaton: &mut Automaton,
    pool: &[Dataset],
    svm: &SvmConfig,
    t1: f64,
    rng: &mut R,
) -> Result<Step> {
    let r = pool.len();
    if r < 2 {
        return Err(Error::config("iteration needs at least 2 subsets"));
    }
    if automaton.len() < 2 {
        return Err(Error::config("iteration needs at least 2 active features"));
    }
    let feature = automaton.select_action(rng);
    let train_subset = rng.random_range(0..r);
    let mut validation_subset = rng.random_range(0..r - 1);
    if validation_subset >= train_subset {
        validation_subset += 1;
    }

    let candidates: Vec<FeatureId> = automaton
        .actions()
        .iter()
        .copied()
        .filter(|&f| f != feature)
        .collect();
    let tr = pool[train_subset].retain_features(&candidates)?;
    let val = pool[validation_subset].retain_features(&candidates)?;
    let model =
        train_multiclass(&tr, svm).map_err(|e| e.context(format!("training without feature {feature}")))?;
    let acc = accuracy(&model, &val)?;

    let feedback = if acc >= t1 {
        Feedback::Reward
    } else {
        Feedback::Penalty
    };
    automaton.update(feature, feedback)?;
    Ok(Step {
        feature,
        train_subset,
        validation_subset,
        accuracy: acc,
        feedback,
    })
}

/// Runs the whole selection on `train` and evaluates the result on `test`.
pub fn run_selection(train: &Dataset, test: &Dataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    let original: Vec<FeatureId> = train.feature_ids().to_vec();
    if original.len() < 2 {
        return Err(Error::config("selection needs at least 2 features"));
    }
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if test.feature_ids() != train.feature_ids() {
        return Err(Error::config("train and test columns differ"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let SubsetPool { subsets: pool, .. } = build_subset_pool(train, cfg.pool_size, &cfg.subset, &mut rng)?;

    let step_size = cfg.resolved_step(original.len());
    let mut automaton = Automaton::new(original.clone(), step_size, cfg.removal_threshold)?;
    let calibrated_accuracy = pool_accuracy(&pool, &original, &cfg.svm)?;
    let t1 = (calibrated_accuracy + cfg.t1_offset).min(1.0);
    log::info!("calibrated accuracy {calibrated_accuracy:.6}, t1 {t1:.6}");

    let mut current_t1 = t1;
    let mut t1_by_round = Vec::new();
    let mut trace = Vec::new();
    let mut removals = Vec::new();
    let mut removed = Vec::new();
    let mut round = 1;
    let mut in_round = 0;
    let mut budget = cfg.resolved_budget(automaton.len());

    let termination = loop {
        if automaton.len() <= cfg.min_features {
            break Termination::MinFeaturesReached;
        }
        if in_round >= budget {
            break Termination::BudgetExhausted;
        }
        if in_round == 0 {
            t1_by_round.push(current_t1);
        }
        let step = run_iteration(&mut automaton, &pool, &cfg.svm, current_t1, &mut rng)
            .map_err(|e| e.context(format!("iteration {}", trace.len() + 1)))?;
        in_round += 1;
        trace.push(TraceRecord {
            iteration: trace.len() + 1,
            round,
            feature: step.feature,
            train_subset: step.train_subset,
            validation_subset: step.validation_subset,
            accuracy: step.accuracy,
            beta: step.feedback.beta(),
            max_probability: automaton.max_probability(),
        });

        if let Some(m) = automaton.check_threshold() {
            let probability = automaton.max_probability();
            automaton.reinitialize(m)?;
            removed.push(m);
            removals.push(Removal {
                round,
                iteration: trace.len(),
                feature: m,
                probability,
            });
            log::info!(
                "round {round}: removed feature {m} after {in_round} iterations, {} remain",
                automaton.len()
            );
            round += 1;
            in_round = 0;
            budget = cfg.resolved_budget(automaton.len());
            if cfg.recalibrate && automaton.len() > cfg.min_features {
                current_t1 = calibrate_t1(&pool, automaton.actions(), &cfg.svm, cfg.t1_offset)?;
            }
        }
    };

    let evaluation = evaluate_final(train, test, &removed, &cfg.svm, cfg.timing_repeats)?;
    Ok(SelectionResult {
        config: cfg.clone(),
        original_features: original,
        step_size,
        calibrated_accuracy,
        t1,
        t1_by_round,
        removed,
        surviving: automaton.actions().to_vec(),
        trace,
        removals,
        termination,
        evaluation,
    })
}

/// Trains a full-feature baseline and a reduced model (without `removed`)
/// on `train`, and compares their test accuracy and prediction time.
pub fn evaluate_final(
    train: &Dataset,
    test: &Dataset,
    removed: &[FeatureId],
    svm: &SvmConfig,
    repeats: usize,
) -> Result<Evaluation> {
    if test.is_empty() || train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let reduced_train = train.remove_features(removed)?;
    let reduced_test = test.remove_features(removed)?;

    let baseline_model = train_multiclass(train, svm)?;
    let reduced_model = train_multiclass(&reduced_train, svm)?;
    let baseline_accuracy = accuracy(&baseline_model, test)?;
    let reduced_accuracy = accuracy(&reduced_model, &reduced_test)?;
    let baseline_time = timed_predict(&baseline_model, test, repeats)?;
    let reduced_time = timed_predict(&reduced_model, &reduced_test, repeats)?;

    Ok(Evaluation {
        metrics: FinalMetrics {
            baseline_features: train.n_features(),
            reduced_features: reduced_train.n_features(),
            kept_features: reduced_train.feature_ids().to_vec(),
            baseline_accuracy,
            reduced_accuracy,
            test_rows: test.n_rows(),
        },
        timing: Timing::new(baseline_time.median_seconds, reduced_time.median_seconds, repeats),
        baseline_model,
        reduced_model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn two_feature(n: usize) -> Dataset {
        // feature 1 carries the label, feature 2 is constant
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let label = (i % 2) as u8;
            rows.push([
                if label == 1 { 0.8 } else { 0.2 } + 0.1 * ((i * 7 % 10) as f64 / 10.0),
                0.5,
            ]);
            labels.push(label);
        }
        Dataset::with_default_ids(Matrix::from_rows(&rows).unwrap(), labels).unwrap()
    }

    #[test]
    fn defaults_match_documented_values() {
        let cfg = SelectionConfig::default();
        assert_eq!(cfg.removal_threshold, 0.8);
        assert_eq!(cfg.t1_offset, 0.0);
        assert!((cfg.resolved_step(41) - 0.00244).abs() < 1e-5);
        assert_eq!(cfg.resolved_budget(15), 3000);
        assert_eq!(cfg.pool_size, 10);
    }

    #[test]
    fn invalid_configs_rejected_before_work() {
        let ds = two_feature(20);
        for cfg in [
            SelectionConfig {
                removal_threshold: 0.0,
                ..Default::default()
            },
            SelectionConfig {
                pool_size: 1,
                ..Default::default()
            },
            SelectionConfig {
                iteration_budget: Some(0),
                ..Default::default()
            },
            SelectionConfig {
                min_features: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(run_selection(&ds, &ds, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn t1_is_capped_at_one() {
        let ds = two_feature(40);
        let pool = vec![ds.clone(), ds.clone(), ds.clone()];
        let ids = ds.feature_ids().to_vec();
        let t1 = calibrate_t1(&pool, &ids, &SvmConfig::default(), 0.3).unwrap();
        assert_eq!(t1, 1.0);
        assert!(calibrate_t1(&pool[..1], &ids, &SvmConfig::default(), 0.0).is_err());
    }

    #[test]
    fn iteration_never_pairs_a_subset_with_itself() {
        let ds = two_feature(20);
        let pool: Vec<Dataset> = (0..10).map(|_| ds.clone()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let svm = SvmConfig {
            max_epochs: 5,
            ..Default::default()
        };
        for _ in 0..1000 {
            let mut a = Automaton::new(ds.feature_ids().to_vec(), 0.05, 1.0).unwrap();
            let step = run_iteration(&mut a, &pool, &svm, 2.0, &mut rng).unwrap();
            assert_ne!(step.train_subset, step.validation_subset);
            assert!(step.train_subset < 10 && step.validation_subset < 10);
            assert_eq!(step.feedback, Feedback::Penalty);
        }
    }

    #[test]
    fn removing_nothing_keeps_baseline_metrics() {
        let ds = two_feature(60);
        let ev = evaluate_final(&ds, &ds, &[], &SvmConfig::default(), 1).unwrap();
        assert_eq!(ev.metrics.baseline_accuracy, ev.metrics.reduced_accuracy);
        assert_eq!(ev.baseline_model, ev.reduced_model);
        let empty = ds.select_rows(&[]);
        assert!(matches!(
            evaluate_final(&ds, &empty, &[], &SvmConfig::default(), 1),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn constant_column_is_removed() {
        let ds = two_feature(200);
        let cfg = SelectionConfig {
            step_size: Some(0.05),
            iteration_budget: Some(500),
            subset: SubsetSpec {
                normal_quota: 60,
                dos_quota: 60,
                include_minority: true,
            },
            timing_repeats: 1,
            ..Default::default()
        };
        let res = run_selection(&ds, &ds, &cfg).unwrap();
        assert_eq!(res.removed, vec![FeatureId(2)]);
        assert_eq!(res.surviving, vec![FeatureId(1)]);
        assert_eq!(res.termination, Termination::MinFeaturesReached);
    }
}
