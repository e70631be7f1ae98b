use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marginal::{uniform_marginal, Marginal};
use crate::similarity::SimilarityMatrix;

pub const DEFAULT_LAMBDA: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMode {
    Exact,
    Entropic,
}

impl std::str::FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverMode::Exact),
            "entropic" => Ok(SolverMode::Entropic),
            other => Err(Error::InvalidConfig(format!("unknown solver {other:?}"))),
        }
    }
}

/// Settings shared by the transport solvers.
///
/// `lambda`, `max_iter` and `tol` only matter in entropic mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub mode: SolverMode,
}

/// Iteration budget for the scaling iterations as a function of the source
/// set size.
pub fn default_max_iter(source_size: usize) -> usize {
    match source_size {
        0..=200 => 100,
        201..=1000 => 1000,
        1001..=4000 => 2000,
        _ => 4000,
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            max_iter: 1,
            tol: DEFAULT_TOL,
            mode: SolverMode::Exact,
        }
    }

    /// Entropic defaults for a source set of `source_size` points.
    pub fn entropic(source_size: usize) -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            max_iter: default_max_iter(source_size),
            tol: DEFAULT_TOL,
            mode: SolverMode::Entropic,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.mode == SolverMode::Entropic && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive in entropic mode, got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// A selection problem: similarities, target distribution and budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub similarity: SimilarityMatrix,
    pub target: Marginal,
    pub k: usize,
}

impl ProblemSpec {
    pub fn new(similarity: SimilarityMatrix, target: Marginal, k: usize) -> Result<Self> {
        if target.len() != similarity.cols() {
            return Err(Error::DimensionMismatch(format!(
                "target has {} atoms, similarity has {} columns",
                target.len(),
                similarity.cols()
            )));
        }
        if let Some((index, &value)) = target.mass().iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::InvalidValue { index, value });
        }
        if k == 0 || k > similarity.rows() {
            return Err(Error::InvalidBudget {
                k,
                what: format!("a source set of {} points", similarity.rows()),
            });
        }
        Ok(Self {
            similarity,
            target,
            k,
        })
    }

    /// Uniform target distribution `1/n`.
    pub fn uniform(similarity: SimilarityMatrix, k: usize) -> Result<Self> {
        let nu = uniform_marginal(similarity.cols(), 1.0)?;
        Self::new(similarity, nu, k)
    }

    pub fn m(&self) -> usize {
        self.similarity.rows()
    }

    pub fn n(&self) -> usize {
        self.similarity.cols()
    }

    /// Target distribution scaled to total mass `mass` (e.g. `k` or `|P|`).
    pub fn scaled_target(&self, mass: f64) -> Marginal {
        let scale = mass / self.target.total();
        Marginal::new(self.target.mass().iter().map(|v| v * scale).collect())
            .expect("scaling a valid marginal by a positive factor")
    }

    /// Per-target capacity `k * nu_j`, i.e. `k/n` for the uniform target.
    pub fn capacity(&self) -> Marginal {
        self.scaled_target(self.k as f64)
    }

    pub fn check_set(&self, set: &[usize]) -> Result<()> {
        let m = self.m();
        let mut seen = vec![false; m];
        for &i in set {
            if i >= m {
                return Err(Error::IndexOutOfRange { index: i, size: m });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::AlreadySelected(i));
            }
        }
        Ok(())
    }
}
