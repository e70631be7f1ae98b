use super::{check_balanced, check_capacity, check_rows, network_simplex, violation, TransportResult};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::similarity::SimilarityMatrix;

fn residual_guard(residual: f64, total: f64) -> Result<()> {
    if residual > 1e-9 * total.max(1.0) {
        return Err(Error::Infeasible(residual));
    }
    Ok(())
}

/// Exact balanced OT: `max <S, gamma>` over `gamma 1 = mu`, `gamma^T 1 = nu`.
pub fn ot_exact(
    s: &SimilarityMatrix,
    rows: &[usize],
    mu: &Marginal,
    nu: &Marginal,
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

    let n = s.cols();
    let cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| s.row(i).iter().map(|v| -v))
        .collect();
    let sol = network_simplex::solve(mu.mass(), nu.mass(), &cost)?;
    residual_guard(sol.residual, mu.total())?;

    let coupling = Coupling::from_plan(rows.len(), n, sol.flow);
    let objective = super::transport_objective(s, rows, &coupling);
    let marginal_violation = violation(&coupling, mu.mass(), nu.mass(), false);
    Ok(TransportResult {
        coupling,
        objective,
        iterations_used: sol.pivots,
        converged: true,
        marginal_violation,
        stabilized: false,
        column_scaling: None,
    })
}

/// Exact semi-relaxed POT: every active row ships `row_mass`, column `j`
/// receives at most `nu_cap[j]`.
///
/// A slack row with zero similarity carries the unused capacity
/// `nu_cap.total - p * row_mass`, which makes the problem balanced without
/// changing the objective.
pub fn pot_exact(
    s: &SimilarityMatrix,
    rows: &[usize],
    row_mass: f64,
    nu_cap: &Marginal,
) -> Result<TransportResult> {
    check_rows(s, rows, nu_cap)?;
    let p = rows.len();
    check_capacity(p, row_mass, nu_cap)?;

    let n = s.cols();
    let slack = (nu_cap.total() - p as f64 * row_mass).max(0.0);
    let mut supply = vec![row_mass; p];
    let mut cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| s.row(i).iter().map(|v| -v))
        .collect();
    if slack > 0.0 {
        supply.push(slack);
        cost.extend(std::iter::repeat_n(0.0, n));
    }
    let sol = network_simplex::solve(&supply, nu_cap.mass(), &cost)?;
    residual_guard(sol.residual, nu_cap.total())?;

    let mut plan = sol.flow;
    plan.truncate(p * n);
    let coupling = Coupling::from_plan(p, n, plan);
    let objective = super::transport_objective(s, rows, &coupling);
    let marginal_violation = violation(&coupling, &supply[..p], nu_cap.mass(), true);
    Ok(TransportResult {
        coupling,
        objective,
        iterations_used: sol.pivots,
        converged: true,
        marginal_violation,
        stabilized: false,
        column_scaling: None,
    })
}
