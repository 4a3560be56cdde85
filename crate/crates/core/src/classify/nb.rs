//! Multinomial Naive Bayes. Word likelihoods are per-class count ratios
//! with optional additive smoothing; `smoothing = 0` reproduces the raw
//! ratio exactly (zero-count words get a -inf log likelihood).

use crate::classify::{argmax, LabeledSet};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::{log_sum_exp, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct NbModel<S: Scalar = f64> {
    pub log_priors: Vec<S>,
    /// `log_likelihoods[class][word]`, m x V.
    pub log_likelihoods: Vec<Vec<S>>,
    pub smoothing: S,
    pub vocab_size: usize,
}

impl<S: Scalar> NbModel<S> {
    pub fn num_categories(&self) -> usize {
        self.log_priors.len()
    }
}

/// Train on counted documents:
/// `likelihood(word | class) = (count + smoothing) / (total + smoothing * V)`
/// and `prior(class) = docs_in_class / n`, both stored in log space.
pub fn nb_train<S: Scalar>(data: &LabeledSet, smoothing: S) -> Result<NbModel<S>> {
    data.require_all_categories_populated()?;
    if smoothing < S::zero() || !smoothing.is_finite() {
        return Err(Error::validation("smoothing must be non-negative and finite"));
    }
    let m = data.num_categories();
    let v = data.vocab_size;

    let mut word_counts = vec![vec![0u64; v]; m];
    let mut total_words = vec![0u64; m];
    let mut doc_counts = vec![0u64; m];
    for (vector, &label) in data.vectors.iter().zip(&data.labels) {
        doc_counts[label] += 1;
        for (index, count) in vector.iter() {
            word_counts[label][index] += u64::from(count);
            total_words[label] += u64::from(count);
        }
    }

    if smoothing == S::zero() {
        for (c, &total) in total_words.iter().enumerate() {
            if total == 0 {
                return Err(Error::validation(format!(
                    "category {:?} has zero total words and smoothing is 0",
                    data.category_names[c]
                )));
            }
        }
    }

    let n = S::from_count(data.len());
    let log_priors: Vec<S> = doc_counts
        .iter()
        .map(|&d| (S::from_count(d as usize) / n).ln())
        .collect();

    let smooth_total = smoothing * S::from_count(v);
    let log_likelihoods: Vec<Vec<S>> = (0..m)
        .map(|c| {
            let denom = S::from_count(total_words[c] as usize) + smooth_total;
            word_counts[c]
                .iter()
                .map(|&count| ((S::from_count(count as usize) + smoothing) / denom).ln())
                .collect()
        })
        .collect();

    Ok(NbModel {
        log_priors,
        log_likelihoods,
        smoothing,
        vocab_size: v,
    })
}

/// Posterior argmax. Returns the winning category index (ties to the lowest
/// index) and the log-posterior list normalized so the probabilities sum
/// to 1. Errors when every class score is -inf.
pub fn nb_predict<S: Scalar>(model: &NbModel<S>, x: &FeatureVector) -> Result<(usize, Vec<S>)> {
    if let Some(max) = x.max_index() {
        if max >= model.vocab_size {
            return Err(Error::validation(format!(
                "feature index {max} out of range for vocabulary size {}",
                model.vocab_size
            )));
        }
    }
    let scores: Vec<S> = model
        .log_priors
        .iter()
        .enumerate()
        .map(|(c, &prior)| {
            let mut score = prior;
            for (index, count) in x.iter() {
                score += S::from_count(count as usize) * model.log_likelihoods[c][index];
            }
            score
        })
        .collect();
    let normalizer = log_sum_exp(&scores);
    if !normalizer.is_finite() {
        return Err(Error::Unclassifiable);
    }
    let log_posteriors: Vec<S> = scores.iter().map(|&s| s - normalizer).collect();
    Ok((argmax(&log_posteriors), log_posteriors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_set(classes: &[&[&[&str]]]) -> (LabeledSet, Vec<String>) {
        // build vectors over the lexicographic vocabulary of all words
        use crate::features::{fit_vocabulary, vectorize};
        use crate::normalize::NormalizedDoc;
        let mut docs = Vec::new();
        let mut labels = Vec::new();
        for (c, class_docs) in classes.iter().enumerate() {
            for (i, tokens) in class_docs.iter().enumerate() {
                docs.push(NormalizedDoc {
                    id: format!("{c}-{i}"),
                    tokens: tokens.iter().map(|t| t.to_string()).collect(),
                });
                labels.push(c);
            }
        }
        let vocab = fit_vocabulary(&docs, 1).unwrap();
        let words: Vec<String> = vocab.words().map(str::to_string).collect();
        let vectors = docs.iter().map(|d| vectorize(d, &vocab)).collect();
        let names = (0..classes.len()).map(|c| format!("c{}", c + 1)).collect();
        (
            LabeledSet::new(vectors, labels, names, vocab.size()).unwrap(),
            words,
        )
    }

    #[test]
    fn unsmoothed_likelihood_is_count_ratio() {
        let (data, words) = doc_set(&[&[&["exam", "exam", "fail"]]]);
        let model: NbModel = nb_train(&data, 0.0).unwrap();
        let exam = words.iter().position(|w| w == "exam").unwrap();
        assert!((model.log_likelihoods[0][exam].exp() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn smoothed_likelihood_formula() {
        // V = 4, class total words 3, word count 2, smoothing 1 -> 3/7
        let (data, words) = doc_set(&[
            &[&["exam", "exam", "fail"]],
            &[&["pizza", "free"]],
        ]);
        assert_eq!(data.vocab_size, 4);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        let exam = words.iter().position(|w| w == "exam").unwrap();
        assert!((model.log_likelihoods[0][exam].exp() - 3.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn priors_are_doc_count_ratios() {
        let (data, _) = doc_set(&[
            &[&["a"], &["a"], &["a"]],
            &[&["b"]],
        ]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        assert!((model.log_priors[0].exp() - 0.75).abs() < 1e-12);
        assert!((model.log_priors[1].exp() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn likelihoods_sum_to_one_with_smoothing() {
        let (data, _) = doc_set(&[
            &[&["exam", "exam", "fail"]],
            &[&["pizza", "free"]],
        ]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        for row in &model.log_likelihoods {
            let sum: f64 = row.iter().map(|l| l.exp()).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
        let prior_sum: f64 = model.log_priors.iter().map(|p| p.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn predict_matches_hand_computed_posterior() {
        // c1 = [exam exam fail], c2 = [pizza free], smoothing 1:
        // P(exam|c1) = 3/7, P(exam|c2) = 1/6, equal priors
        // posterior(c1 | [exam]) = (3/14) / (3/14 + 1/12) = 18/25
        let (data, words) = doc_set(&[
            &[&["exam", "exam", "fail"]],
            &[&["pizza", "free"]],
        ]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        let exam = words.iter().position(|w| w == "exam").unwrap();
        let x = FeatureVector::from_pairs("q", &[(exam, 1)]);
        let (winner, log_posteriors) = nb_predict(&model, &x).unwrap();
        assert_eq!(winner, 0);
        assert!((log_posteriors[0].exp() - 18.0 / 25.0).abs() < 1e-12);
        assert!((log_posteriors[1].exp() - 7.0 / 25.0).abs() < 1e-12);
    }

    #[test]
    fn empty_vector_with_equal_priors_ties_to_category_zero() {
        let (data, _) = doc_set(&[&[&["a"]], &[&["b"]]]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        let x = FeatureVector::from_pairs("q", &[]);
        let (winner, log_posteriors) = nb_predict(&model, &x).unwrap();
        assert_eq!(winner, 0);
        assert!((log_posteriors[0].exp() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_vector_follows_priors() {
        let (data, _) = doc_set(&[
            &[&["a"], &["a"], &["a"]],
            &[&["b"]],
        ]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        let (winner, log_posteriors) =
            nb_predict(&model, &FeatureVector::from_pairs("q", &[])).unwrap();
        assert_eq!(winner, 0);
        assert!((log_posteriors[0].exp() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn posteriors_sum_to_one() {
        let (data, _) = doc_set(&[
            &[&["exam", "fail"], &["exam"]],
            &[&["pizza"], &["free", "pizza"]],
        ]);
        let model: NbModel = nb_train(&data, 1.0).unwrap();
        let x = FeatureVector::from_pairs("q", &[(0, 2), (3, 1)]);
        let (_, log_posteriors) = nb_predict(&model, &x).unwrap();
        let sum: f64 = log_posteriors.iter().map(|p| p.exp()).sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unsmoothed_cross_class_word_mix_is_unclassifiable() {
        // a document holding one word from each class zeroes both posteriors
        let (data, words) = doc_set(&[
            &[&["exam"]],
            &[&["pizza"]],
        ]);
        let model: NbModel = nb_train(&data, 0.0).unwrap();
        let exam = words.iter().position(|w| w == "exam").unwrap();
        let pizza = words.iter().position(|w| w == "pizza").unwrap();
        let x = FeatureVector::from_pairs("q", &[(exam, 1), (pizza, 1)]);
        assert!(matches!(nb_predict(&model, &x), Err(Error::Unclassifiable)));
    }

    #[test]
    fn unsmoothed_zero_count_class_is_ruled_out() {
        let (data, words) = doc_set(&[
            &[&["exam"]],
            &[&["pizza"]],
        ]);
        let model: NbModel = nb_train(&data, 0.0).unwrap();
        let exam = words.iter().position(|w| w == "exam").unwrap();
        let (winner, log_posteriors) =
            nb_predict(&model, &FeatureVector::from_pairs("q", &[(exam, 1)])).unwrap();
        assert_eq!(winner, 0);
        assert_eq!(log_posteriors[1], f64::NEG_INFINITY);
        assert!((log_posteriors[0].exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_word_class_with_zero_smoothing_errors() {
        use crate::features::FeatureVector;
        let vectors = vec![
            FeatureVector::from_pairs("a", &[(0, 1)]),
            FeatureVector::from_pairs("b", &[]),
        ];
        let data = LabeledSet::new(vectors, vec![0, 1], vec!["c0".into(), "c1".into()], 1).unwrap();
        assert!(matches!(nb_train(&data, 0.0), Err(Error::Validation(_))));
        // smoothing > 0 handles the empty class
        assert!(nb_train(&data, 1.0).is_ok());
    }

    #[test]
    fn f32_instantiation_trains_and_predicts() {
        let (data, _) = doc_set(&[&[&["a"]], &[&["b"]]]);
        let model = nb_train::<f32>(&data, 1.0).unwrap();
        let (winner, _) = nb_predict(&model, &FeatureVector::from_pairs("q", &[(0, 1)])).unwrap();
        assert_eq!(winner, 0);
    }
}
