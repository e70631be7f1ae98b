//! Approximate marginal gain.
//!
//! With the current prototypes' plan frozen, a candidate row may only use
//! the leftover capacity `b`:
//!
//! ```text
//! max <S[j], v>  s.t.  v >= 0,  sum(v) = 1,  v <= b
//! ```
//!
//! This is a fractional knapsack with unit weights, so the greedy fill in
//! decreasing order of `S[j]` is optimal: saturate the best columns until one
//! unit of mass has been placed. With each row's order computed once up
//! front, a score costs `O(n)`.

use serde::{Deserialize, Serialize};

use super::capacity::CapacityVector;
use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Below this the capacity is treated as exhausted rather than as
/// round-off of a full budget.
const CAPACITY_SLACK: f64 = 1e-6;

/// Per-row column orders by decreasing similarity, ties by column index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedRows {
    cols: usize,
    order: Vec<u32>,
}

impl SortedRows {
    pub fn new(s: &SimilarityMatrix) -> Self {
        let n = s.cols();
        let mut order = Vec::with_capacity(s.rows() * n);
        for i in 0..s.rows() {
            let row = s.row(i);
            let mut idx: Vec<u32> = (0..n as u32).collect();
            // stable sort keeps lower indices first among equal scores
            idx.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]));
            order.extend(idx);
        }
        Self { cols: n, order }
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.order[i * self.cols..(i + 1) * self.cols]
    }
}

fn effective_scale(b: &CapacityVector) -> Result<f64> {
    let total = b.total();
    if total >= 1.0 {
        Ok(1.0)
    } else if total >= 1.0 - CAPACITY_SLACK {
        Ok(1.0 / total)
    } else {
        Err(Error::InsufficientCapacity { total })
    }
}

/// Closed-form approximate gain and its maximizing `v`.
pub fn approx_gain(row: &[f64], b: &CapacityVector) -> Result<(f64, Vec<f64>)> {
    if row.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "row of length {} against {} capacities",
            row.len(),
            b.len()
        )));
    }
    let mut order: Vec<u32> = (0..row.len() as u32).collect();
    order.sort_by(|&x, &y| row[y as usize].total_cmp(&row[x as usize]));
    let mut v = vec![0.0; row.len()];
    let value = fill(row, &order, b, Some(&mut v))?;
    Ok((value, v))
}

/// Gain value only, using a precomputed column order for the row.
pub fn approx_gain_sorted(row: &[f64], order: &[u32], b: &CapacityVector) -> Result<f64> {
    fill(row, order, b, None)
}

fn fill(row: &[f64], order: &[u32], b: &CapacityVector, mut v: Option<&mut Vec<f64>>) -> Result<f64> {
    let scale = effective_scale(b)?;
    let caps = b.values();
    let mut left = 1.0;
    let mut value = 0.0;
    for &j in order {
        let j = j as usize;
        let cap = caps[j] * scale;
        if cap <= 0.0 {
            continue;
        }
        let take = cap.min(left);
        value += take * row[j];
        if let Some(v) = v.as_deref_mut() {
            v[j] = take;
        }
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fills_best_columns() {
        let b = CapacityVector::new(vec![0.5; 4]);
        let (value, v) = approx_gain(&[4.0, 3.0, 2.0, 1.0], &b).unwrap();
        assert_eq!(v, vec![0.5, 0.5, 0.0, 0.0]);
        assert_eq!(value, 3.5);
    }

    #[test]
    fn skips_exhausted_columns() {
        let b = CapacityVector::new(vec![0.0, 0.0, 0.5, 0.5]);
        let (value, v) = approx_gain(&[9.0, 1.0, 2.0, 3.0], &b).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 0.5, 0.5]);
        assert_eq!(value, 2.5);
    }

    #[test]
    fn partial_fill_at_boundary() {
        let b = CapacityVector::new(vec![0.4, 0.4, 0.4]);
        let (value, v) = approx_gain(&[1.0, 3.0, 2.0], &b).unwrap();
        assert!((v[0] - 0.2).abs() < 1e-15);
        assert!((value - (0.4 * 3.0 + 0.4 * 2.0 + 0.2 * 1.0)).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let b = CapacityVector::new(vec![0.5, 0.5, 0.5]);
        let (_, v) = approx_gain(&[1.0, 1.0, 1.0], &b).unwrap();
        assert_eq!(v, vec![0.5, 0.5, 0.0]);
    }

    #[test]
    fn renormalizes_entropic_slack() {
        let b = CapacityVector::new(vec![0.5, 0.5 - 5e-7]);
        let (_, v) = approx_gain(&[1.0, 2.0], &b).unwrap();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let short = CapacityVector::new(vec![0.5, 0.49]);
        assert!(matches!(approx_gain(&[1.0, 2.0], &short), Err(Error::InsufficientCapacity { .. })));
    }

    #[test]
    fn sorted_cache_matches_direct() {
        let s = SimilarityMatrix::from_rows(&[vec![0.3, 0.9, 0.9, 0.1], vec![1.0, 0.0, 0.5, 0.5]]).unwrap();
        let sorted = SortedRows::new(&s);
        assert_eq!(sorted.row(0), &[1, 2, 0, 3]);
        let b = CapacityVector::new(vec![0.3, 0.3, 0.3, 0.3]);
        for i in 0..2 {
            let direct = approx_gain(s.row(i), &b).unwrap().0;
            let cached = approx_gain_sorted(s.row(i), sorted.row(i), &b).unwrap();
            assert_eq!(direct, cached);
        }
    }
}
