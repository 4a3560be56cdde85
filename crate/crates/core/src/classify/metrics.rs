//! Confusion-matrix-derived evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy, per-category precision/recall/F1, macro-F1, and the confusion
/// matrix (`confusion[gold][predicted]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub macro_f1: f64,
    pub confusion: Vec<Vec<usize>>,
}

/// Standard multiclass metrics from parallel predicted/gold index lists.
/// Per-category precision and recall are defined as 0 when their
/// denominator is 0.
pub fn evaluate(predicted: &[usize], gold: &[usize], m: usize) -> Result<Metrics> {
    if predicted.len() != gold.len() {
        return Err(Error::validation(format!(
            "{} predictions but {} gold labels",
            predicted.len(),
            gold.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::validation("cannot evaluate zero predictions"));
    }
    if m == 0 {
        return Err(Error::validation("cannot evaluate with zero categories"));
    }
    let mut confusion = vec![vec![0usize; m]; m];
    for (&p, &g) in predicted.iter().zip(gold) {
        if p >= m || g >= m {
            return Err(Error::validation(format!(
                "label out of range: predicted {p}, gold {g}, m {m}"
            )));
        }
        confusion[g][p] += 1;
    }
    let total = predicted.len();
    let correct: usize = (0..m).map(|c| confusion[c][c]).sum();
    let accuracy = correct as f64 / total as f64;

    let mut precision = Vec::with_capacity(m);
    let mut recall = Vec::with_capacity(m);
    let mut f1 = Vec::with_capacity(m);
    for c in 0..m {
        let tp = confusion[c][c];
        let predicted_c: usize = (0..m).map(|g| confusion[g][c]).sum();
        let gold_c: usize = confusion[c].iter().sum();
        let p = if predicted_c == 0 {
            0.0
        } else {
            tp as f64 / predicted_c as f64
        };
        let r = if gold_c == 0 {
            0.0
        } else {
            tp as f64 / gold_c as f64
        };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        precision.push(p);
        recall.push(r);
        f1.push(f);
    }
    let macro_f1 = f1.iter().sum::<f64>() / m as f64;
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        macro_f1,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_agreement() {
        let labels = vec![0, 1, 2, 1, 0];
        let metrics = evaluate(&labels, &labels, 3).unwrap();
        assert_eq!(metrics.accuracy, 1.0);
        assert_eq!(metrics.macro_f1, 1.0);
        assert_eq!(metrics.confusion[0][0], 2);
        assert_eq!(metrics.confusion[1][1], 2);
        assert_eq!(metrics.confusion[2][2], 1);
    }

    #[test]
    fn constant_predictor_on_balanced_gold() {
        let predicted = vec![0, 0, 0, 0];
        let gold = vec![0, 0, 1, 1];
        let metrics = evaluate(&predicted, &gold, 2).unwrap();
        assert_eq!(metrics.accuracy, 0.5);
        assert_eq!(metrics.recall[0], 1.0);
        assert_eq!(metrics.recall[1], 0.0);
        assert_eq!(metrics.precision[0], 0.5);
        // no predictions of class 1: precision defined as 0
        assert_eq!(metrics.precision[1], 0.0);
        assert_eq!(metrics.f1[1], 0.0);
    }

    #[test]
    fn degenerate_inputs_error() {
        assert!(evaluate(&[], &[], 2).is_err());
        assert!(evaluate(&[0], &[0, 1], 2).is_err());
        assert!(evaluate(&[2], &[0], 2).is_err());
    }

    #[test]
    fn confusion_row_sums_match_gold_counts() {
        let predicted = vec![0, 1, 1, 2, 0];
        let gold = vec![0, 0, 1, 2, 2];
        let metrics = evaluate(&predicted, &gold, 3).unwrap();
        let row_sums: Vec<usize> = metrics.confusion.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(row_sums, vec![2, 1, 2]);
        let trace: usize = (0..3).map(|c| metrics.confusion[c][c]).sum();
        assert_eq!(metrics.accuracy, trace as f64 / 5.0);
    }
}
