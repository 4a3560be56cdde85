//! Maximum entropy (multinomial logistic) classifier trained by full-batch
//! gradient ascent on the L2-penalized conditional log-likelihood.
//!
//! Features are the class-conditional word counts `f_i(c, d)` plus one bias
//! feature per class; the bias is not regularized.

use crate::classify::{argmax, dot, LabeledSet, TrainConfig};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::{log_sum_exp, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel<S: Scalar = f64> {
    /// `lambdas[class][word]`, m x V.
    pub lambdas: Vec<Vec<S>>,
    pub bias: Vec<S>,
    pub vocab_size: usize,
}

impl<S: Scalar> MaxEntModel<S> {
    pub fn num_categories(&self) -> usize {
        self.bias.len()
    }
}

fn class_scores<S: Scalar>(lambdas: &[Vec<S>], bias: &[S], x: &FeatureVector) -> Vec<S> {
    lambdas
        .iter()
        .zip(bias)
        .map(|(row, &b)| dot(row, x) + b)
        .collect()
}

/// Penalized conditional log-likelihood and its gradient at the given
/// parameters:
/// `L = sum_d log P(label_d | d) - l2 * ||lambda||^2`.
///
/// Returns `(objective, gradient_lambdas, gradient_bias)`; ascending this
/// gradient maximizes `L`.
pub fn objective_and_gradient<S: Scalar>(
    data: &LabeledSet,
    lambdas: &[Vec<S>],
    bias: &[S],
    l2: S,
) -> (S, Vec<Vec<S>>, Vec<S>) {
    let m = bias.len();
    let v = data.vocab_size;
    let mut objective = S::zero();
    let mut grad_lambdas = vec![vec![S::zero(); v]; m];
    let mut grad_bias = vec![S::zero(); m];

    for (x, &label) in data.vectors.iter().zip(&data.labels) {
        let scores = class_scores(lambdas, bias, x);
        let normalizer = log_sum_exp(&scores);
        objective += scores[label] - normalizer;
        for c in 0..m {
            let indicator = if c == label { S::one() } else { S::zero() };
            let residual = indicator - (scores[c] - normalizer).exp();
            grad_bias[c] += residual;
            for (index, count) in x.iter() {
                grad_lambdas[c][index] += residual * S::from_count(count as usize);
            }
        }
    }

    let two = S::from_f64_lossy(2.0);
    for c in 0..m {
        for i in 0..v {
            objective -= l2 * lambdas[c][i] * lambdas[c][i];
            grad_lambdas[c][i] -= two * l2 * lambdas[c][i];
        }
    }
    (objective, grad_lambdas, grad_bias)
}

fn grad_inf_norm<S: Scalar>(grad_lambdas: &[Vec<S>], grad_bias: &[S]) -> S {
    let mut max = S::zero();
    for row in grad_lambdas {
        for &g in row {
            max = max.max(g.abs());
        }
    }
    for &g in grad_bias {
        max = max.max(g.abs());
    }
    max
}

/// Full-batch gradient ascent from zero parameters. Runs `cfg.epochs`
/// updates or stops early once the gradient infinity-norm drops below
/// `cfg.tolerance`. Deterministic given the data order and config.
pub fn maxent_train<S: Scalar>(data: &LabeledSet, cfg: &TrainConfig<S>) -> Result<MaxEntModel<S>> {
    data.require_all_categories_populated()?;
    cfg.validate()?;
    let m = data.num_categories();
    let v = data.vocab_size;
    let mut lambdas = vec![vec![S::zero(); v]; m];
    let mut bias = vec![S::zero(); m];

    for epoch in 0..cfg.epochs {
        let (objective, grad_lambdas, grad_bias) =
            objective_and_gradient(data, &lambdas, &bias, cfg.l2);
        if !objective.is_finite() {
            return Err(Error::Divergence {
                epoch,
                message: format!("objective became {objective} (reduce the learning rate)"),
            });
        }
        if grad_inf_norm(&grad_lambdas, &grad_bias) < cfg.tolerance {
            break;
        }
        for c in 0..m {
            for i in 0..v {
                lambdas[c][i] += cfg.learning_rate * grad_lambdas[c][i];
            }
            bias[c] += cfg.learning_rate * grad_bias[c];
        }
    }

    let finite = lambdas.iter().flatten().all(|l| l.is_finite())
        && bias.iter().all(|b| b.is_finite());
    if !finite {
        return Err(Error::Divergence {
            epoch: cfg.epochs,
            message: "parameters became non-finite (reduce the learning rate)".to_string(),
        });
    }
    Ok(MaxEntModel {
        lambdas,
        bias,
        vocab_size: v,
    })
}

/// Class argmax under the model. Returns the winning index (ties to the
/// lowest) and log-posteriors normalized so the probabilities sum to 1.
pub fn maxent_predict<S: Scalar>(model: &MaxEntModel<S>, x: &FeatureVector) -> (usize, Vec<S>) {
    let scores = class_scores(&model.lambdas, &model.bias, x);
    let normalizer = log_sum_exp(&scores);
    let log_posteriors: Vec<S> = scores.iter().map(|&s| s - normalizer).collect();
    (argmax(&log_posteriors), log_posteriors)
}
