//! From-scratch classifiers over sparse count vectors: multinomial Naive
//! Bayes, maximum entropy via full-batch gradient ascent, and a linear SVM
//! trained by deterministic subgradient descent, plus evaluation metrics.

mod maxent;
mod metrics;
mod model_io;
mod nb;
mod svm;

pub use maxent::{maxent_predict, maxent_train, objective_and_gradient, MaxEntModel};
pub use metrics::{evaluate, Metrics};
pub use model_io::Model;
pub use nb::{nb_predict, nb_train, NbModel};
pub use svm::{
    svm_objective, svm_predict, svm_predict_signed, svm_train, svm_train_binary_traced,
    svm_train_signed, SparseRow, SvmModel,
};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::Scalar;

/// Labeled training data: parallel vectors and category indices plus the
/// category naming and feature-space dimensions.
#[derive(Debug, Clone)]
pub struct LabeledSet {
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<usize>,
    pub category_names: Vec<String>,
    pub vocab_size: usize,
}

impl LabeledSet {
    pub fn new(
        vectors: Vec<FeatureVector>,
        labels: Vec<usize>,
        category_names: Vec<String>,
        vocab_size: usize,
    ) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::validation("labeled set is empty"));
        }
        if vectors.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if category_names.is_empty() {
            return Err(Error::validation("no category names"));
        }
        let m = category_names.len();
        for &label in &labels {
            if label >= m {
                return Err(Error::validation(format!(
                    "label {label} out of range for {m} categories"
                )));
            }
        }
        for vector in &vectors {
            if let Some(max) = vector.max_index() {
                if max >= vocab_size {
                    return Err(Error::validation(format!(
                        "feature index {max} out of range for vocabulary size {vocab_size}"
                    )));
                }
            }
        }
        Ok(LabeledSet {
            vectors,
            labels,
            category_names,
            vocab_size,
        })
    }

    pub fn num_categories(&self) -> usize {
        self.category_names.len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Training precondition: every category has at least one example.
    pub fn require_all_categories_populated(&self) -> Result<()> {
        let mut seen = vec![false; self.num_categories()];
        for &label in &self.labels {
            seen[label] = true;
        }
        for (index, seen) in seen.iter().enumerate() {
            if !seen {
                return Err(Error::validation(format!(
                    "category {:?} has no training examples",
                    self.category_names[index]
                )));
            }
        }
        Ok(())
    }
}

/// Optimizer hyperparameters shared by the iterative trainers.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<S: Scalar = f64> {
    pub epochs: usize,
    pub learning_rate: S,
    pub l2: S,
    pub seed: u64,
    pub tolerance: S,
}

impl<S: Scalar> TrainConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::validation("epochs must be positive"));
        }
        if !(self.learning_rate > S::zero()) || !self.learning_rate.is_finite() {
            return Err(Error::validation("learning_rate must be positive and finite"));
        }
        if self.l2 < S::zero() || !self.l2.is_finite() {
            return Err(Error::validation("l2 must be non-negative and finite"));
        }
        if !(self.tolerance > S::zero()) {
            return Err(Error::validation("tolerance must be positive"));
        }
        Ok(())
    }
}

impl<S: Scalar> Default for TrainConfig<S> {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            learning_rate: S::from_f64_lossy(0.1),
            l2: S::from_f64_lossy(1e-3),
            seed: 0,
            tolerance: S::from_f64_lossy(1e-6),
        }
    }
}

/// Sparse dot product `w . x` accumulated in vector index order.
pub(crate) fn dot<S: Scalar>(weights: &[S], x: &FeatureVector) -> S {
    let mut sum = S::zero();
    for (index, count) in x.iter() {
        sum += weights[index] * S::from_count(count as usize);
    }
    sum
}

/// Index of the largest score, ties resolved to the lowest index.
pub(crate) fn argmax<S: Scalar>(scores: &[S]) -> usize {
    let mut best = 0;
    for (index, &score) in scores.iter().enumerate().skip(1) {
        if score > scores[best] {
            best = index;
        }
    }
    best
}
