//! Linear SVM trained one-vs-rest by deterministic full-batch subgradient
//! descent on the regularized mean hinge loss
//! `(l2/2) ||w||^2 + (1/n) sum hinge(1 - y (w.x + b))`
//! with the learning-rate schedule `lr / (1 + epoch)` and a fixed data
//! order. The bias is not regularized.
//!
//! The optimizer itself runs on signed sparse rows; [`svm_train`] feeds it
//! document count vectors, while [`svm_train_signed`] accepts arbitrary
//! real-valued features directly.

use crate::classify::{argmax, dot, LabeledSet, TrainConfig};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::Scalar;

/// Sparse real-valued feature row: `(index, value)` pairs in index order.
pub type SparseRow<S> = Vec<(usize, S)>;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel<S: Scalar = f64> {
    /// `weights[class][word]`, m x V; one separator per class.
    pub weights: Vec<Vec<S>>,
    pub bias: Vec<S>,
    pub regularization: S,
    pub vocab_size: usize,
}

impl<S: Scalar> SvmModel<S> {
    pub fn num_categories(&self) -> usize {
        self.bias.len()
    }
}

fn sparse_dot<S: Scalar>(weights: &[S], row: &SparseRow<S>) -> S {
    let mut sum = S::zero();
    for &(index, value) in row {
        sum += weights[index] * value;
    }
    sum
}

fn count_rows<S: Scalar>(data: &LabeledSet) -> Vec<SparseRow<S>> {
    data.vectors
        .iter()
        .map(|x| {
            x.iter()
                .map(|(index, count)| (index, S::from_count(count as usize)))
                .collect()
        })
        .collect()
}

fn objective_on_rows<S: Scalar>(
    rows: &[SparseRow<S>],
    labels: &[usize],
    class_index: usize,
    weights: &[S],
    bias: S,
    l2: S,
) -> S {
    let n = S::from_count(rows.len());
    let half = S::from_f64_lossy(0.5);
    let mut norm_sq = S::zero();
    for &w in weights {
        norm_sq += w * w;
    }
    let mut hinge_sum = S::zero();
    for (row, &label) in rows.iter().zip(labels) {
        let y = if label == class_index { S::one() } else { -S::one() };
        let margin = y * (sparse_dot(weights, row) + bias);
        hinge_sum += (S::one() - margin).max(S::zero());
    }
    half * l2 * norm_sq + hinge_sum / n
}

/// Regularized mean hinge objective of one separator on count vectors, with
/// labels mapped to +1 for `class_index` and -1 otherwise.
pub fn svm_objective<S: Scalar>(
    data: &LabeledSet,
    class_index: usize,
    weights: &[S],
    bias: S,
    l2: S,
) -> S {
    objective_on_rows(
        &count_rows::<S>(data),
        &data.labels,
        class_index,
        weights,
        bias,
        l2,
    )
}

fn train_separator<S: Scalar>(
    rows: &[SparseRow<S>],
    labels: &[usize],
    vocab_size: usize,
    class_index: usize,
    cfg: &TrainConfig<S>,
    mut on_epoch_end: impl FnMut(usize, &[S], S),
) -> (Vec<S>, S) {
    let n = S::from_count(rows.len());
    let mut weights = vec![S::zero(); vocab_size];
    let mut bias = S::zero();
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate / (S::one() + S::from_count(epoch));
        // subgradient of the mean hinge term, accumulated in data order
        let mut grad_w = vec![S::zero(); vocab_size];
        let mut grad_b = S::zero();
        for (row, &label) in rows.iter().zip(labels) {
            let y = if label == class_index { S::one() } else { -S::one() };
            if y * (sparse_dot(&weights, row) + bias) < S::one() {
                for &(index, value) in row {
                    grad_w[index] -= y * value;
                }
                grad_b -= y;
            }
        }
        for (w, &g) in weights.iter_mut().zip(&grad_w) {
            *w -= lr * (cfg.l2 * *w + g / n);
        }
        bias -= lr * grad_b / n;
        on_epoch_end(epoch, &weights, bias);
    }
    (weights, bias)
}

/// One-vs-rest training over signed sparse feature rows. Bit-deterministic
/// given `(row order, cfg)`.
pub fn svm_train_signed<S: Scalar>(
    rows: &[SparseRow<S>],
    labels: &[usize],
    category_names: &[String],
    vocab_size: usize,
    cfg: &TrainConfig<S>,
) -> Result<SvmModel<S>> {
    cfg.validate()?;
    let m = category_names.len();
    if m < 2 {
        return Err(Error::validation(format!(
            "svm training needs at least 2 categories, got {m}"
        )));
    }
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::validation(format!(
            "{} rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    for row in rows {
        if row.iter().any(|&(index, _)| index >= vocab_size) {
            return Err(Error::validation("feature index out of range".to_string()));
        }
    }
    for (c, name) in category_names.iter().enumerate() {
        if !labels.iter().any(|&l| l == c) {
            return Err(Error::validation(format!(
                "category {name:?} has no positive examples"
            )));
        }
    }
    let mut weights = Vec::with_capacity(m);
    let mut bias = Vec::with_capacity(m);
    for c in 0..m {
        let (w, b) = train_separator(rows, labels, vocab_size, c, cfg, |_, _, _| {});
        if !w.iter().all(|v| v.is_finite()) || !b.is_finite() {
            return Err(Error::Divergence {
                epoch: cfg.epochs,
                message: format!("separator for category {:?} became non-finite", name_of(category_names, c)),
            });
        }
        weights.push(w);
        bias.push(b);
    }
    Ok(SvmModel {
        weights,
        bias,
        regularization: cfg.l2,
        vocab_size,
    })
}

fn name_of(names: &[String], index: usize) -> &str {
    names.get(index).map_or("?", String::as_str)
}

/// One-vs-rest training on document count vectors (the pipeline path).
pub fn svm_train<S: Scalar>(data: &LabeledSet, cfg: &TrainConfig<S>) -> Result<SvmModel<S>> {
    svm_train_signed(
        &count_rows::<S>(data),
        &data.labels,
        &data.category_names,
        data.vocab_size,
        cfg,
    )
}

/// Train a single one-vs-rest separator on count vectors and record the
/// objective at the end of every epoch. Diagnostic companion to
/// [`svm_train`].
pub fn svm_train_binary_traced<S: Scalar>(
    data: &LabeledSet,
    class_index: usize,
    cfg: &TrainConfig<S>,
) -> Result<(Vec<S>, S, Vec<S>)> {
    cfg.validate()?;
    if class_index >= data.num_categories() {
        return Err(Error::validation(format!(
            "class index {class_index} out of range"
        )));
    }
    let rows = count_rows::<S>(data);
    let mut objectives = Vec::with_capacity(cfg.epochs);
    let (w, b) = train_separator(&rows, &data.labels, data.vocab_size, class_index, cfg, |_, w, b| {
        objectives.push(objective_on_rows(&rows, &data.labels, class_index, w, b, cfg.l2));
    });
    Ok((w, b, objectives))
}

/// Margins `w_c . x + b_c` for every class; returns the argmax (ties to the
/// lowest index) and the margin list.
pub fn svm_predict<S: Scalar>(model: &SvmModel<S>, x: &FeatureVector) -> (usize, Vec<S>) {
    let margins: Vec<S> = model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(w, &b)| dot(w, x) + b)
        .collect();
    (argmax(&margins), margins)
}

/// Margins over a signed sparse row instead of a count vector.
pub fn svm_predict_signed<S: Scalar>(model: &SvmModel<S>, row: &SparseRow<S>) -> (usize, Vec<S>) {
    let margins: Vec<S> = model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(w, &b)| sparse_dot(w, row) + b)
        .collect();
    (argmax(&margins), margins)
}
