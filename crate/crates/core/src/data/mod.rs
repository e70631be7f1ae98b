//! Datasets: labelled feature matrices, a synthetic long-tail generator,
//! CSV ingestion and a binary container for similarity matrices.

mod binary;
mod csv_io;
mod synth;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use binary::{read_similarity, write_similarity, UPSM_MAGIC, UPSM_VERSION};
pub use csv_io::{load_csv, save_csv};
pub use synth::{gen_gaussian_longtail, target_counts, GaussianConfig};

/// Samples as rows, with optional contiguous class ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    /// Samples per class id; empty when unlabelled.
    pub class_counts: Vec<usize>,
    /// Original label value of each class id, when labels were remapped on
    /// load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_values: Option<Vec<i64>>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let dim = features.first().map_or(0, Vec::len);
        if let Some(row) = features.iter().position(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "sample {row} has {} features, expected {dim}",
                features[row].len()
            )));
        }
        let class_counts = match &labels {
            None => Vec::new(),
            Some(l) => {
                if l.len() != features.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} labels for {} samples",
                        l.len(),
                        features.len()
                    )));
                }
                histogram(l)
            }
        };
        Ok(Self {
            features,
            labels,
            class_counts,
            label_values: None,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn num_classes(&self) -> usize {
        self.class_counts.len()
    }

    /// Rows at `indices`, keeping labels.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.len(),
            });
        }
        let features = indices.iter().map(|&i| self.features[i].clone()).collect();
        let labels = self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect());
        let mut out = Self::new(features, labels)?;
        if out.labels.is_some() {
            out.class_counts.resize(self.class_counts.len().max(out.class_counts.len()), 0);
        }
        out.label_values.clone_from(&self.label_values);
        Ok(out)
    }
}

fn histogram(labels: &[usize]) -> Vec<usize> {
    let classes = labels.iter().max().map_or(0, |&c| c + 1);
    let mut counts = vec![0; classes];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

/// Target class proportions: listed classes get their fraction and the rest
/// of the mass is spread evenly over the remaining classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSpec {
    pub num_classes: usize,
    pub skew_classes: Vec<(usize, f64)>,
}

impl SkewSpec {
    pub fn new(num_classes: usize, skew_classes: Vec<(usize, f64)>) -> Result<Self> {
        let spec = Self {
            num_classes,
            skew_classes,
        };
        spec.fractions()?;
        Ok(spec)
    }

    /// Balanced classes.
    pub fn uniform(num_classes: usize) -> Self {
        Self {
            num_classes,
            skew_classes: Vec::new(),
        }
    }

    /// Fraction of the target assigned to each class.
    pub fn fractions(&self) -> Result<Vec<f64>> {
        if self.num_classes == 0 {
            return Err(Error::InfeasibleSkew("no classes".into()));
        }
        let mut frac = vec![f64::NAN; self.num_classes];
        let mut used = 0.0;
        for &(c, p) in &self.skew_classes {
            if c >= self.num_classes {
                return Err(Error::InfeasibleSkew(format!(
                    "class {c} out of range for {} classes",
                    self.num_classes
                )));
            }
            if !frac[c].is_nan() {
                return Err(Error::InfeasibleSkew(format!("class {c} listed twice")));
            }
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InfeasibleSkew(format!("fraction {p} for class {c} is not in (0, 1)")));
            }
            frac[c] = p;
            used += p;
        }
        if used >= 1.0 {
            return Err(Error::InfeasibleSkew(format!("skewed fractions sum to {used}")));
        }
        let free = frac.iter().filter(|v| v.is_nan()).count();
        if free == 0 {
            return Err(Error::InfeasibleSkew(format!(
                "every class is skewed but the fractions only sum to {used}"
            )));
        }
        let rest = (1.0 - used) / free as f64;
        for v in frac.iter_mut().filter(|v| v.is_nan()) {
            *v = rest;
        }
        Ok(frac)
    }
}
