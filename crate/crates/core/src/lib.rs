//! Learning-automata driven backward feature elimination around a linear SVM.
//!
//! Every candidate feature is an action of a variable-structure learning
//! automaton. At each step the automaton picks a feature, the feature is
//! dropped from a random train/validation pair, and a linear SVM is trained
//! and validated without it. Validation accuracy at or above a calibrated
//! floor rewards the automaton (linear reward-inaction update); once one
//! action's probability reaches the removal threshold the feature is dropped
//! for good and the automaton restarts over the survivors.
//!
//! Module map:
//!
//! * [`dataset`] - KDD-style record parsing, categorical encoding, min-max
//!   scaling, stratified subset sampling and feature removal.
//! * [`svm`] - L2-regularized hinge-loss linear SVM trained by dual
//!   coordinate descent, one-vs-rest multiclass wrapper, timed prediction.
//! * [`automaton`] - action probability vector and its reward update.
//! * [`engine`] - threshold calibration, the selection loop, final evaluation
//!   and the JSON run report.
//! * [`synth`] - synthetic datasets with planted noise features.

pub mod automaton;
pub mod dataset;
pub mod engine;
mod error;
pub mod matrix;
pub mod svm;
pub mod synth;

pub use automaton::{Automaton, Feedback};
pub use dataset::{Dataset, FeatureId, SubsetSpec, NUM_CLASSES};
pub use engine::{SelectionConfig, SelectionResult};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use svm::{BinaryModel, MulticlassModel, SvmConfig};
pub use synth::SynthSpec;
