use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Per-row ratio between the mean of the `floor(n/k)` smallest and the mean
/// of the `floor(n/k)` largest similarities.
///
/// Greedy selection with the approximate gain reaches `(1 - e^-alpha)` of
/// the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBound {
    pub alpha_min: Vec<f64>,
    pub alpha_max: Vec<f64>,
    pub alpha: f64,
    pub block: usize,
}

impl AlphaBound {
    /// `alpha_min[j] / alpha_max[j]`, with `0/0 := 1`.
    pub fn ratio(&self, row: usize) -> f64 {
        row_ratio(self.alpha_min[row], self.alpha_max[row])
    }

    /// `1 - e^-alpha`.
    pub fn guarantee(&self) -> f64 {
        1.0 - (-self.alpha).exp()
    }
}

fn row_ratio(lo: f64, hi: f64) -> f64 {
    if hi == 0.0 {
        1.0
    } else {
        lo / hi
    }
}

pub fn alpha_bound(s: &SimilarityMatrix, k: usize) -> Result<AlphaBound> {
    let n = s.cols();
    if k == 0 || k > n {
        return Err(Error::InvalidBudget {
            k,
            what: format!("the alpha bound over {n} targets (needs 1 <= k <= n)"),
        });
    }
    let block = n / k;
    let mut alpha_min = Vec::with_capacity(s.rows());
    let mut alpha_max = Vec::with_capacity(s.rows());
    let mut sorted = vec![0.0; n];
    for i in 0..s.rows() {
        sorted.copy_from_slice(s.row(i));
        sorted.sort_by(f64::total_cmp);
        alpha_min.push(sorted[..block].iter().sum::<f64>() / block as f64);
        alpha_max.push(sorted[n - block..].iter().sum::<f64>() / block as f64);
    }
    let alpha = alpha_min
        .iter()
        .zip(&alpha_max)
        .map(|(&lo, &hi)| row_ratio(lo, hi))
        .fold(f64::INFINITY, f64::min);
    Ok(AlphaBound {
        alpha_min,
        alpha_max,
        alpha,
        block,
    })
}
