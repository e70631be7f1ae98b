//! Nearest-prototype classification and prototype weight diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::selection::Selection;
use crate::similarity::{Metric, SimilarityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall_accuracy: f64,
    /// `None` for classes without target samples.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// Classes whose share of the target is below `1 / num_classes`.
    pub minority_classes: Vec<usize>,
    /// Mean accuracy over the minority classes; `None` when there are none.
    pub minority_avg_accuracy: Option<f64>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub target_class_counts: Vec<usize>,
    /// Number of prototypes per class.
    pub prototype_class_histogram: Vec<usize>,
}

fn labels_of<'a>(d: &'a Dataset, what: &str) -> Result<&'a [usize]> {
    d.labels
        .as_deref()
        .ok_or_else(|| Error::MissingLabels(format!("{what} has no label column")))
}

/// Labels every target point with the class of its nearest prototype under
/// `metric` (lowest source index among equally near prototypes).
pub fn nn_classify(
    source: &Dataset,
    sel: &Selection,
    target: &Dataset,
    metric: Metric,
) -> Result<EvalReport> {
    check_prototypes(sel, source.len())?;
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source has {} features, target has {}",
            source.dim(),
            target.dim()
        )));
    }
    let protos = ordered_prototypes(&sel.indices);
    let predicted: Vec<usize> = target
        .features
        .par_iter()
        .map(|y| {
            let mut best = protos[0];
            let mut best_cost = metric.cost(&source.features[best], y);
            for &i in &protos[1..] {
                let c = metric.cost(&source.features[i], y);
                if c < best_cost {
                    best = i;
                    best_cost = c;
                }
            }
            best
        })
        .collect();
    report(labels_of(source, "source")?, &sel.indices, &predicted, labels_of(target, "target")?)
}

/// Same rule on a precomputed source-by-target similarity matrix: the
/// prototype with the largest score wins.
pub fn nn_classify_similarity(
    s: &SimilarityMatrix,
    indices: &[usize],
    source_labels: &[usize],
    target_labels: &[usize],
) -> Result<EvalReport> {
    if indices.is_empty() {
        return Err(Error::Empty("prototype set"));
    }
    if let Some(&i) = indices.iter().find(|&&i| i >= s.rows()) {
        return Err(Error::IndexOutOfRange { index: i, size: s.rows() });
    }
    if target_labels.len() != s.cols() || source_labels.len() != s.rows() {
        return Err(Error::DimensionMismatch("labels do not match the similarity shape".into()));
    }
    let protos = ordered_prototypes(indices);
    let predicted: Vec<usize> = (0..s.cols())
        .into_par_iter()
        .map(|j| {
            let mut best = protos[0];
            for &i in &protos[1..] {
                if s.get(i, j) > s.get(best, j) {
                    best = i;
                }
            }
            best
        })
        .collect();
    report(source_labels, indices, &predicted, target_labels)
}

fn check_prototypes(sel: &Selection, m: usize) -> Result<()> {
    if sel.indices.is_empty() {
        return Err(Error::Empty("prototype set"));
    }
    match sel.indices.iter().find(|&&i| i >= m) {
        Some(&i) => Err(Error::IndexOutOfRange { index: i, size: m }),
        None => Ok(()),
    }
}

fn ordered_prototypes(indices: &[usize]) -> Vec<usize> {
    let mut p = indices.to_vec();
    p.sort_unstable();
    p.dedup();
    p
}

fn report(
    source_labels: &[usize],
    indices: &[usize],
    predicted_proto: &[usize],
    target_labels: &[usize],
) -> Result<EvalReport> {
    let classes = source_labels
        .iter()
        .chain(target_labels)
        .max()
        .map_or(0, |&c| c + 1);
    let mut confusion = vec![vec![0usize; classes]; classes];
    let mut correct = 0;
    for (&p, &truth) in predicted_proto.iter().zip(target_labels) {
        let guess = source_labels[p];
        confusion[truth][guess] += 1;
        correct += usize::from(guess == truth);
    }
    let mut prototype_class_histogram = vec![0; classes];
    for &i in indices {
        prototype_class_histogram[source_labels[i]] += 1;
    }
    let target_class_counts: Vec<usize> = confusion.iter().map(|r| r.iter().sum()).collect();
    let per_class_accuracy: Vec<Option<f64>> = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let total: usize = row.iter().sum();
            (total > 0).then(|| row[c] as f64 / total as f64)
        })
        .collect();
    let total = target_labels.len();
    let minority_classes: Vec<usize> = (0..classes)
        .filter(|&c| (target_class_counts[c] as f64) * (classes as f64) < total as f64)
        .collect();
    let minority: Vec<f64> = minority_classes
        .iter()
        .filter_map(|&c| per_class_accuracy[c])
        .collect();
    Ok(EvalReport {
        overall_accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        per_class_accuracy,
        minority_avg_accuracy: (!minority.is_empty())
            .then(|| minority.iter().sum::<f64>() / minority.len() as f64),
        minority_classes,
        confusion,
        target_class_counts,
        prototype_class_histogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSkewReport {
    pub sorted_weights: Vec<f64>,
    /// Population standard deviation.
    pub std_dev: f64,
    /// `max / min`; `None` when the smallest weight is zero.
    pub max_over_min: Option<f64>,
    pub has_zero_weight: bool,
}

pub fn weight_skew(sel: &Selection) -> Result<WeightSkewReport> {
    if sel.weights.is_empty() {
        return Err(Error::Empty("selection weights"));
    }
    let mut w = sel.weights.clone();
    w.sort_by(|a, b| b.total_cmp(a));
    let n = w.len() as f64;
    let (max, min) = (w[0], w[w.len() - 1]);
    let std_dev = if max == min {
        0.0
    } else {
        let mean = w.iter().sum::<f64>() / n;
        (w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
    };
    Ok(WeightSkewReport {
        sorted_weights: w,
        std_dev,
        max_over_min: (min > 0.0).then(|| max / min),
        has_zero_weight: min == 0.0,
    })
}
