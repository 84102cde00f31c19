//! Subject-level aggregation of record predictions and the seven evaluation
//! scores.
//!
//! Recordings are scored per subject: the mean of a subject's record
//! probabilities is thresholded at 0.5 (ties predict positive). The positive
//! class is PWP (label 1). Degenerate 0/0 rate denominators yield 0 by
//! convention so every metric is total and deterministic.

use std::collections::HashMap;

use crate::dataset::SubjectId;
use crate::{Error, Result};

/// Probability clip bound keeping logarithms finite.
pub const PROB_CLIP: f64 = 1e-15;

/// One subject's aggregated prediction.
#[derive(Debug, Clone)]
pub struct SubjectPrediction {
    pub subject_id: SubjectId,
    /// Arithmetic mean of the subject's record probabilities.
    pub mean_prob: f64,
    /// 1 iff `mean_prob >= 0.5`.
    pub predicted: u8,
    pub actual: u8,
}

/// Confusion counts over scored subjects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// The five threshold rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicRates {
    pub accuracy: f64,
    pub specificity: f64,
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
}

/// All seven scores for one fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub accuracy: f64,
    pub specificity: f64,
    pub sensitivity: f64,
    pub precision: f64,
    pub f1: f64,
    pub mcc: f64,
    pub cross_entropy: f64,
}

impl MetricSet {
    pub const NAMES: [&'static str; 7] = [
        "accuracy",
        "specificity",
        "sensitivity",
        "precision",
        "f1",
        "mcc",
        "cross_entropy",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.accuracy,
            self.specificity,
            self.sensitivity,
            self.precision,
            self.f1,
            self.mcc,
            self.cross_entropy,
        ]
    }
}

/// Mean and population standard deviation of one metric over folds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

/// Fold-averaged summary: mean and population std per metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub accuracy: Stat,
    pub specificity: Stat,
    pub sensitivity: Stat,
    pub precision: Stat,
    pub f1: Stat,
    pub mcc: Stat,
    pub cross_entropy: Stat,
}

impl MetricSummary {
    pub fn stats(&self) -> [Stat; 7] {
        [
            self.accuracy,
            self.specificity,
            self.sensitivity,
            self.precision,
            self.f1,
            self.mcc,
            self.cross_entropy,
        ]
    }
}

/// Collapses record-level probabilities into one prediction per subject.
///
/// Vectors must be aligned; all records of a subject must share one label.
/// Subjects appear in first-encounter order. Class is decided by thresholding
/// the mean probability at 0.5, with 0.5 itself predicting positive.
pub fn aggregate_subjects(
    record_probs: &[f64],
    record_subjects: &[SubjectId],
    record_labels: &[u8],
) -> Result<Vec<SubjectPrediction>> {
    if record_probs.len() != record_subjects.len() || record_probs.len() != record_labels.len() {
        return Err(Error::Dimension(format!(
            "probs/subjects/labels lengths {}/{}/{} differ",
            record_probs.len(),
            record_subjects.len(),
            record_labels.len()
        )));
    }
    if record_probs.is_empty() {
        return Err(Error::Invalid("no records to aggregate".into()));
    }

    let mut order: Vec<SubjectId> = Vec::new();
    let mut acc: HashMap<SubjectId, (f64, usize, u8)> = HashMap::new();
    for ((p, s), &l) in record_probs
        .iter()
        .zip(record_subjects)
        .zip(record_labels)
    {
        match acc.get_mut(s) {
            Some((sum, n, label)) => {
                if *label != l {
                    return Err(Error::Integrity(format!(
                        "subject {} appears with labels {} and {}",
                        s, label, l
                    )));
                }
                *sum += p;
                *n += 1;
            }
            None => {
                order.push(s.clone());
                acc.insert(s.clone(), (*p, 1, l));
            }
        }
    }

    Ok(order
        .into_iter()
        .map(|sid| {
            let (sum, n, label) = acc[&sid];
            let mean_prob = sum / n as f64;
            SubjectPrediction {
                subject_id: sid,
                predicted: (mean_prob >= 0.5) as u8,
                actual: label,
                mean_prob,
            }
        })
        .collect())
}

/// Counts the four confusion cells; positive class is PWP (label 1).
pub fn confusion(preds: &[SubjectPrediction]) -> ConfusionCounts {
    let mut c = ConfusionCounts {
        true_pos: 0,
        true_neg: 0,
        false_pos: 0,
        false_neg: 0,
    };
    for p in preds {
        match (p.predicted, p.actual) {
            (1, 1) => c.true_pos += 1,
            (0, 0) => c.true_neg += 1,
            (1, 0) => c.false_pos += 1,
            _ => c.false_neg += 1,
        }
    }
    c
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy, specificity, sensitivity, precision, and F1. Any 0/0 is 0.
pub fn basic_rates(c: &ConfusionCounts) -> BasicRates {
    let accuracy = ratio(c.true_pos + c.true_neg, c.total());
    let specificity = ratio(c.true_neg, c.true_neg + c.false_pos);
    let sensitivity = ratio(c.true_pos, c.true_pos + c.false_neg);
    let precision = ratio(c.true_pos, c.true_pos + c.false_pos);
    let f1 = if precision + sensitivity == 0.0 {
        0.0
    } else {
        2.0 * precision * sensitivity / (precision + sensitivity)
    };
    BasicRates {
        accuracy,
        specificity,
        sensitivity,
        precision,
        f1,
    }
}

/// Matthews correlation coefficient; returns 0 when any denominator factor
/// is zero (all predictions or all actuals in one class).
pub fn mcc(c: &ConfusionCounts) -> f64 {
    let tp = c.true_pos as f64;
    let tn = c.true_neg as f64;
    let fp = c.false_pos as f64;
    let fnn = c.false_neg as f64;
    let denom = (tp + fp) * (tp + fnn) * (tn + fp) * (tn + fnn);
    if denom == 0.0 {
        0.0
    } else {
        (tp * tn - fp * fnn) / denom.sqrt()
    }
}

/// Mean binary cross-entropy of the subject mean probabilities against the
/// actual labels. Probabilities are clipped to keep logarithms finite; the
/// mean (rather than the sum) makes values comparable across fold sizes.
pub fn cross_entropy(preds: &[SubjectPrediction]) -> f64 {
    let n = preds.len() as f64;
    preds
        .iter()
        .map(|p| {
            let q = p.mean_prob.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
            if p.actual == 1 {
                -q.ln()
            } else {
                -(1.0 - q).ln()
            }
        })
        .sum::<f64>()
        / n
}

/// All seven scores from a list of subject predictions.
pub fn metric_set(preds: &[SubjectPrediction]) -> MetricSet {
    let c = confusion(preds);
    let r = basic_rates(&c);
    MetricSet {
        accuracy: r.accuracy,
        specificity: r.specificity,
        sensitivity: r.sensitivity,
        precision: r.precision,
        f1: r.f1,
        mcc: mcc(&c),
        cross_entropy: cross_entropy(preds),
    }
}

fn stat(values: impl Iterator<Item = f64> + Clone) -> Stat {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Stat {
        mean,
        std: var.sqrt(),
    }
}

/// Arithmetic mean and population standard deviation per metric over folds.
pub fn summarize_folds(per_fold: &[MetricSet]) -> MetricSummary {
    assert!(!per_fold.is_empty(), "summarize_folds needs at least one fold");
    let col = |f: fn(&MetricSet) -> f64| stat(per_fold.iter().map(f));
    MetricSummary {
        accuracy: col(|m| m.accuracy),
        specificity: col(|m| m.specificity),
        sensitivity: col(|m| m.sensitivity),
        precision: col(|m| m.precision),
        f1: col(|m| m.f1),
        mcc: col(|m| m.mcc),
        cross_entropy: col(|m| m.cross_entropy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(s: &str) -> SubjectId {
        SubjectId::new(s)
    }

    fn pred(p: f64, actual: u8) -> SubjectPrediction {
        SubjectPrediction {
            subject_id: sid("x"),
            mean_prob: p,
            predicted: (p >= 0.5) as u8,
            actual,
        }
    }

    #[test]
    fn aggregation_means_and_thresholds() {
        let subjects = vec![sid("a"), sid("a"), sid("a"), sid("b")];
        let probs = vec![0.9, 0.9, 0.1, 0.2];
        let labels = vec![1, 1, 1, 0];
        let out = aggregate_subjects(&probs, &subjects, &labels).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[0].mean_prob - 0.6333333333333333).abs() < 1e-12);
        assert_eq!(out[0].predicted, 1);
        assert_eq!(out[1].predicted, 0);
    }

    #[test]
    fn threshold_tie_predicts_positive() {
        let subjects = vec![sid("a"); 3];
        let out = aggregate_subjects(&[0.5, 0.5, 0.5], &subjects, &[0, 0, 0]).unwrap();
        assert_eq!(out[0].predicted, 1);
    }

    #[test]
    fn just_below_threshold_predicts_negative() {
        let subjects = vec![sid("a"); 26];
        let probs = vec![0.49; 26];
        let out = aggregate_subjects(&probs, &subjects, &[1; 26]).unwrap();
        assert!((out[0].mean_prob - 0.49).abs() < 1e-12);
        assert_eq!(out[0].predicted, 0);
    }

    #[test]
    fn misaligned_vectors_rejected() {
        let err = aggregate_subjects(&[0.5], &[sid("a"), sid("b")], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn inconsistent_labels_rejected() {
        let err =
            aggregate_subjects(&[0.5, 0.6], &[sid("a"), sid("a")], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn confusion_covers_all_cells() {
        let preds = vec![pred(0.9, 1), pred(0.8, 0), pred(0.1, 0), pred(0.2, 1)];
        let c = confusion(&preds);
        assert_eq!(
            c,
            ConfusionCounts {
                true_pos: 1,
                false_pos: 1,
                true_neg: 1,
                false_neg: 1
            }
        );
        assert_eq!(c.total(), 4);
    }

    #[test]
    fn perfect_and_inverted_rates() {
        let perfect = ConfusionCounts {
            true_pos: 5,
            true_neg: 5,
            false_pos: 0,
            false_neg: 0,
        };
        let r = basic_rates(&perfect);
        assert_eq!(
            (r.accuracy, r.specificity, r.sensitivity, r.precision, r.f1),
            (1.0, 1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(mcc(&perfect), 1.0);

        let inverted = ConfusionCounts {
            true_pos: 0,
            true_neg: 0,
            false_pos: 5,
            false_neg: 5,
        };
        let r = basic_rates(&inverted);
        assert_eq!(
            (r.accuracy, r.specificity, r.sensitivity, r.precision, r.f1),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(mcc(&inverted), -1.0);
    }

    #[test]
    fn rates_hand_case() {
        let c = ConfusionCounts {
            true_pos: 3,
            true_neg: 2,
            false_pos: 1,
            false_neg: 2,
        };
        let r = basic_rates(&c);
        assert!((r.accuracy - 0.625).abs() < 1e-12);
        assert!((r.specificity - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.sensitivity - 0.6).abs() < 1e-12);
        assert!((r.precision - 0.75).abs() < 1e-12);
        assert!((r.f1 - 0.9 / 1.35).abs() < 1e-12);
        assert!((mcc(&c) - 4.0 / 240f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mcc_degenerate_is_zero() {
        let one_sided = ConfusionCounts {
            true_pos: 4,
            true_neg: 0,
            false_pos: 4,
            false_neg: 0,
        };
        assert_eq!(mcc(&one_sided), 0.0);
    }

    #[test]
    fn mcc_symmetric_under_cell_swap() {
        let c = ConfusionCounts {
            true_pos: 7,
            true_neg: 3,
            false_pos: 2,
            false_neg: 5,
        };
        let swapped = ConfusionCounts {
            true_pos: c.true_neg,
            true_neg: c.true_pos,
            false_pos: c.false_neg,
            false_neg: c.false_pos,
        };
        assert!((mcc(&c) - mcc(&swapped)).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_cases() {
        // exact predictions collapse to ~0 after clipping
        let exact = vec![pred(1.0, 1), pred(0.0, 0)];
        assert!(cross_entropy(&exact) <= 1e-14);

        let uncertain = vec![pred(0.5, 1), pred(0.5, 0)];
        assert!((cross_entropy(&uncertain) - std::f64::consts::LN_2).abs() < 1e-12);

        let two = vec![pred(0.8, 1), pred(0.4, 0)];
        let expected = -(0.8f64.ln() + 0.6f64.ln()) / 2.0;
        assert!((cross_entropy(&two) - expected).abs() < 1e-12);
        assert!((expected - 0.36698).abs() < 1e-5);
    }

    #[test]
    fn summary_hand_case() {
        let base = metric_set(&[pred(0.9, 1), pred(0.1, 0)]);
        let folds: Vec<MetricSet> = [0.7, 0.7, 0.7, 0.6]
            .iter()
            .map(|&a| MetricSet {
                accuracy: a,
                ..base
            })
            .collect();
        let s = summarize_folds(&folds);
        assert!((s.accuracy.mean - 0.675).abs() < 1e-12);
        assert!((s.accuracy.std - 0.0433012701892219).abs() < 1e-10);
        // identical columns have zero spread
        assert_eq!(s.mcc.std, 0.0);
    }

    #[test]
    fn balanced_fold_accuracy_is_mean_of_class_rates() {
        // equal subjects per class: accuracy == (sensitivity + specificity) / 2
        let preds = vec![
            pred(0.9, 1),
            pred(0.2, 1),
            pred(0.7, 1),
            pred(0.1, 0),
            pred(0.6, 0),
            pred(0.3, 0),
        ];
        let m = metric_set(&preds);
        assert!((m.accuracy - (m.sensitivity + m.specificity) / 2.0).abs() < 1e-12);
    }
}
