//! Balanced and semi-relaxed (partial) optimal transport, maximizing total
//! similarity `<S, gamma>`.
//!
//! Every solver works on a subset of the rows of a [`SimilarityMatrix`]; the
//! returned coupling is indexed by position in that subset.
//!
//! * [`ot_exact`] / [`pot_exact`]: network simplex. The partial problem is
//!   reduced to a balanced one by a zero-similarity slack row that absorbs
//!   the unused target capacity.
//! * [`ot_entropic`] / [`pot_entropic`]: log-domain scaling iterations on the
//!   kernel `exp(S / lambda)`.
//!
//! [`SimilarityMatrix`]: crate::similarity::SimilarityMatrix

mod entropic;
mod exact;
pub(crate) mod network_simplex;

use serde::{Deserialize, Serialize};

use crate::config::{SolverConfig, SolverMode};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::similarity::SimilarityMatrix;

pub use entropic::{ot_entropic, pot_entropic, pot_entropic_warm};
pub use exact::{ot_exact, pot_exact};

/// Absolute tolerance on the marginals of exact solutions.
pub const EXACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult {
    pub coupling: Coupling,
    /// `<S, gamma>`, without any entropy term.
    pub objective: f64,
    /// Pivots for the exact solver, scaling sweeps for the entropic ones.
    pub iterations_used: usize,
    pub converged: bool,
    pub marginal_violation: f64,
    /// Set when `S / lambda` would overflow `exp` without the per-row shift.
    #[serde(default)]
    pub stabilized: bool,
    /// Log column scalings of the entropic solvers, reusable as a warm start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_scaling: Option<Vec<f64>>,
}

/// `<S[rows], gamma>` recomputed from the coupling.
pub fn transport_objective(s: &SimilarityMatrix, rows: &[usize], coupling: &Coupling) -> f64 {
    rows.iter()
        .enumerate()
        .map(|(r, &i)| {
            s.row(i)
                .iter()
                .zip(coupling.row(r))
                .map(|(a, b)| a * b)
                .sum::<f64>()
        })
        .sum()
}

/// Dispatches to the exact or entropic partial solver.
pub fn pot_solve(
    s: &SimilarityMatrix,
    rows: &[usize],
    row_mass: f64,
    nu_cap: &Marginal,
    cfg: &SolverConfig,
) -> Result<TransportResult> {
    match cfg.mode {
        SolverMode::Exact => pot_exact(s, rows, row_mass, nu_cap),
        SolverMode::Entropic => pot_entropic(s, rows, row_mass, nu_cap, cfg),
    }
}

fn check_rows(s: &SimilarityMatrix, rows: &[usize], target: &Marginal) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Empty("active row set"));
    }
    if let Some(&i) = rows.iter().find(|&&i| i >= s.rows()) {
        return Err(Error::IndexOutOfRange {
            index: i,
            size: s.rows(),
        });
    }
    if target.len() != s.cols() {
        return Err(Error::DimensionMismatch(format!(
            "target marginal has {} entries, similarity has {} columns",
            target.len(),
            s.cols()
        )));
    }
    Ok(())
}

fn check_balanced(mu: &Marginal, nu: &Marginal) -> Result<()> {
    let scale = mu.total().max(nu.total()).max(1.0);
    if (mu.total() - nu.total()).abs() > 1e-9 * scale {
        return Err(Error::MassMismatch {
            source_mass: mu.total(),
            target_mass: nu.total(),
        });
    }
    Ok(())
}

fn check_capacity(p: usize, row_mass: f64, nu_cap: &Marginal) -> Result<()> {
    if !(row_mass >= 0.0 && row_mass.is_finite()) {
        return Err(Error::InvalidValue {
            index: 0,
            value: row_mass,
        });
    }
    let source_mass = p as f64 * row_mass;
    if source_mass > nu_cap.total() + 1e-9 {
        return Err(Error::CapacityExceeded {
            source_mass,
            capacity: nu_cap.total(),
        });
    }
    Ok(())
}

/// Largest violation of `gamma 1 = mu` and `gamma^T 1 = nu` (or
/// `gamma^T 1 <= nu` when `partial`).
fn violation(coupling: &Coupling, mu: &[f64], nu: &[f64], partial: bool) -> f64 {
    let rows = coupling
        .row_sums()
        .iter()
        .zip(mu)
        .map(|(a, b)| (a - b).abs());
    let cols = coupling.col_sums().iter().zip(nu).map(|(a, b)| {
        if partial {
            (a - b).max(0.0)
        } else {
            (a - b).abs()
        }
    });
    rows.chain(cols).fold(0.0, f64::max)
}
