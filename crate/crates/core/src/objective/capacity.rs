use serde::{Deserialize, Serialize};

use crate::coupling::Coupling;
use crate::marginal::Marginal;

/// Target capacity left over after the current prototypes have been
/// transported, `b = k nu - gamma_P^T 1`, clamped at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityVector {
    b: Vec<f64>,
    total: f64,
    /// Total amount by which column sums exceeded their capacity (solver
    /// slack) and were clamped away.
    clamped: f64,
}

impl CapacityVector {
    pub fn new(b: Vec<f64>) -> Self {
        let b: Vec<f64> = b.into_iter().map(|v| v.max(0.0)).collect();
        let total = b.iter().sum();
        Self {
            b,
            total,
            clamped: 0.0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn clamped(&self) -> f64 {
        self.clamped
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Remaining capacity against a uniform cap of `k / n` per target.
pub fn remaining_capacity(k: usize, n: usize, gamma: Option<&Coupling>) -> CapacityVector {
    let per = k as f64 / n as f64;
    let caps = vec![per; n];
    remaining(&caps, gamma)
}

/// Remaining capacity against an arbitrary cap vector.
pub fn remaining_capacity_for(cap: &Marginal, gamma: Option<&Coupling>) -> CapacityVector {
    remaining(cap.mass(), gamma)
}

fn remaining(caps: &[f64], gamma: Option<&Coupling>) -> CapacityVector {
    let Some(gamma) = gamma else {
        return CapacityVector::new(caps.to_vec());
    };
    let mut clamped = 0.0;
    let b: Vec<f64> = caps
        .iter()
        .zip(gamma.col_sums())
        .map(|(c, used)| {
            let left = c - used;
            if left < 0.0 {
                clamped -= left;
                0.0
            } else {
                left
            }
        })
        .collect();
    let total = b.iter().sum();
    CapacityVector { b, total, clamped }
}
