//! Scaling iterations for entropically regularized transport.
//!
//! The plan is kept in factored log form
//! `ln gamma[i][j] = (S[i][j] - rowmax[i]) / lambda + a[i] + b[j]`.
//! Subtracting the row maximum keeps every kernel exponent `<= 0`; the shift
//! is absorbed by the row scaling `a`, so the iterates are the same as those
//! of the plain kernel `exp(S / lambda)` whenever that one is representable.
//!
//! Row step: `a[i] = ln mu[i] - LSE_j(K[i][j] + b[j])` makes the row sums
//! exact. Column step: balanced OT sets `b[j] = ln nu[j] - LSE_i(K[i][j] + a[i])`;
//! the partial problem uses `b[j] = min(0, ...)`, i.e. columns above their
//! capacity are scaled down to it and columns below it are left alone.

use super::{check_balanced, check_capacity, check_rows, violation, TransportResult};
use crate::config::{SolverConfig, SolverMode};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::similarity::SimilarityMatrix;

/// `ln(f64::MAX)`.
const EXP_LIMIT: f64 = 709.78;

#[derive(Clone, Copy, PartialEq)]
enum ColumnRule {
    Equality,
    Capacity,
}

struct LogKernel {
    p: usize,
    n: usize,
    /// `(S - rowmax) / lambda`, row-major.
    k: Vec<f64>,
    stabilized: bool,
}

impl LogKernel {
    fn new(s: &SimilarityMatrix, rows: &[usize], lambda: f64) -> Self {
        let n = s.cols();
        let mut k = Vec::with_capacity(rows.len() * n);
        let mut stabilized = false;
        for &i in rows {
            let row = s.row(i);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            stabilized |= max / lambda > EXP_LIMIT;
            k.extend(row.iter().map(|v| (v - max) / lambda));
        }
        Self {
            p: rows.len(),
            n,
            k,
            stabilized,
        }
    }

    /// `LSE_j(K[i][j] + b[j])` for every row.
    fn row_lse(&self, b: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.k[i * self.n..(i + 1) * self.n];
            *o = log_sum_exp(row.iter().zip(b).map(|(k, b)| k + b));
        }
    }

    /// `LSE_i(K[i][j] + a[i])` for every column.
    fn col_lse(&self, a: &[f64], max_buf: &mut [f64], out: &mut [f64]) {
        max_buf.iter_mut().for_each(|v| *v = f64::NEG_INFINITY);
        for (row, &ai) in self.k.chunks_exact(self.n).zip(a) {
            for (mx, k) in max_buf.iter_mut().zip(row) {
                *mx = mx.max(k + ai);
            }
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        for (row, &ai) in self.k.chunks_exact(self.n).zip(a) {
            if ai == f64::NEG_INFINITY {
                continue;
            }
            for ((o, k), mx) in out.iter_mut().zip(row).zip(max_buf.iter()) {
                if mx.is_finite() {
                    *o += (k + ai - mx).exp();
                }
            }
        }
        for (o, mx) in out.iter_mut().zip(max_buf.iter()) {
            *o = if mx.is_finite() { mx + o.ln() } else { f64::NEG_INFINITY };
        }
    }

    fn plan(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut plan = Vec::with_capacity(self.k.len());
        for (row, &ai) in self.k.chunks_exact(self.n).zip(a) {
            plan.extend(row.iter().zip(b).map(|(k, bj)| (k + ai + bj).exp()));
        }
        plan
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn ln(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

#[allow(clippy::too_many_arguments)]
fn scale(
    s: &SimilarityMatrix,
    rows: &[usize],
    mu: &[f64],
    nu: &[f64],
    rule: ColumnRule,
    cfg: &SolverConfig,
    init: Option<&[f64]>,
) -> Result<TransportResult> {
    if cfg.mode != SolverMode::Entropic {
        return Err(Error::InvalidConfig("entropic solver called with mode = exact".into()));
    }
    cfg.validate()?;
    let kernel = LogKernel::new(s, rows, cfg.lambda);
    let (p, n) = (kernel.p, kernel.n);
    let ln_mu: Vec<f64> = mu.iter().map(|&v| ln(v)).collect();
    let ln_nu: Vec<f64> = nu.iter().map(|&v| ln(v)).collect();

    let mut a = vec![0.0; p];
    let mut b = match init {
        Some(b0) if b0.len() == n => b0.to_vec(),
        Some(b0) => {
            return Err(Error::DimensionMismatch(format!(
                "warm start has {} entries, expected {n}",
                b0.len()
            )))
        }
        None => vec![0.0; n],
    };
    let mut row_lse = vec![0.0; p];
    let mut col_lse = vec![0.0; n];
    let mut max_buf = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    loop {
        kernel.row_lse(&b, &mut row_lse);
        if iterations > 0 {
            // Columns are feasible right after a column step, so only the
            // row sums can be off.
            let err = (0..p)
                .map(|i| ((a[i] + row_lse[i]).exp() - mu[i]).abs())
                .fold(0.0, f64::max);
            if err < cfg.tol {
                converged = true;
                break;
            }
        }
        if iterations == cfg.max_iter {
            break;
        }
        for i in 0..p {
            a[i] = if row_lse[i].is_finite() {
                ln_mu[i] - row_lse[i]
            } else {
                f64::NEG_INFINITY
            };
        }
        kernel.col_lse(&a, &mut max_buf, &mut col_lse);
        for j in 0..n {
            let target = if col_lse[j].is_finite() {
                ln_nu[j] - col_lse[j]
            } else {
                0.0
            };
            b[j] = match rule {
                ColumnRule::Equality => target,
                ColumnRule::Capacity => target.min(0.0),
            };
        }
        iterations += 1;
    }

    let coupling = Coupling::from_plan(p, n, kernel.plan(&a, &b));
    let objective = super::transport_objective(s, rows, &coupling);
    let marginal_violation = violation(&coupling, mu, nu, rule == ColumnRule::Capacity);
    Ok(TransportResult {
        coupling,
        objective,
        iterations_used: iterations,
        converged,
        marginal_violation,
        stabilized: kernel.stabilized,
        column_scaling: Some(b),
    })
}

/// Entropic balanced OT (two-sided Sinkhorn scaling).
pub fn ot_entropic(
    s: &SimilarityMatrix,
    rows: &[usize],
    mu: &Marginal,
    nu: &Marginal,
    cfg: &SolverConfig,
) -> Result<TransportResult> {
    check_rows(s, rows, nu)?;
    if mu.len() != rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} source masses for {} active rows",
            mu.len(),
            rows.len()
        )));
    }
    check_balanced(mu, nu)?;
    scale(s, rows, mu.mass(), nu.mass(), ColumnRule::Equality, cfg, None)
}

/// Entropic semi-relaxed POT by alternating Bregman projections onto
/// `gamma 1 = row_mass` and `gamma^T 1 <= nu_cap`.
pub fn pot_entropic(
    s: &SimilarityMatrix,
    rows: &[usize],
    row_mass: f64,
    nu_cap: &Marginal,
    cfg: &SolverConfig,
) -> Result<TransportResult> {
    pot_entropic_warm(s, rows, row_mass, nu_cap, cfg, None)
}

/// [`pot_entropic`] starting from given log column scalings, e.g. the
/// `column_scaling` of a previous solve on a subset of the rows.
pub fn pot_entropic_warm(
    s: &SimilarityMatrix,
    rows: &[usize],
    row_mass: f64,
    nu_cap: &Marginal,
    cfg: &SolverConfig,
    init: Option<&[f64]>,
) -> Result<TransportResult> {
    check_rows(s, rows, nu_cap)?;
    check_capacity(rows.len(), row_mass, nu_cap)?;
    let mu = vec![row_mass; rows.len()];
    scale(s, rows, &mu, nu_cap.mass(), ColumnRule::Capacity, cfg, init)
}
