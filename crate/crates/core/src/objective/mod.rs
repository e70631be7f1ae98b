//! The set functions scored by prototype selection.
//!
//! For a prototype set `P` (rows of `S`) and target distribution `nu`:
//!
//! * `l(P) = sum_j nu_j max_{i in P} S[i][j]`: facility location, where each
//!   target goes entirely to its most similar prototype. The implied prototype
//!   weights are generally far from uniform.
//! * `h(P) = OT(1_P, |P| nu)`: every prototype ships exactly one unit of mass
//!   and the target is scaled to match. Super-additive, so plain greedy has
//!   no guarantee on it.
//! * `g(P) = h(P) / |P|`.
//! * `f(P) = POT(1_P, k nu)`: the same unit rows, but target `j` only has to
//!   absorb *at most* `k nu_j`. `f` is monotone submodular and agrees with `h`
//!   on every set of size `k`.

mod alpha;
mod capacity;
mod gain;

use serde::{Deserialize, Serialize};

use crate::config::{ProblemSpec, SolverConfig};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::marginal::Marginal;
use crate::transport::{ot_exact, pot_solve};

pub use alpha::{alpha_bound, AlphaBound};
pub use capacity::{remaining_capacity, remaining_capacity_for, CapacityVector};
pub use gain::{approx_gain, approx_gain_sorted, SortedRows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    L,
    G,
    H,
    F,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub which: Objective,
    pub value: f64,
    /// Plan over the rows of `P` in the order given; absent for the empty set.
    pub coupling: Option<Coupling>,
}

impl ObjectiveValue {
    fn empty(which: Objective) -> Self {
        Self {
            which,
            value: 0.0,
            coupling: None,
        }
    }
}

/// Facility-location value: each target column sends all of its mass to
/// its most similar prototype (lowest index on ties).
pub fn eval_l(spec: &ProblemSpec, set: &[usize]) -> Result<ObjectiveValue> {
    if set.is_empty() {
        return Err(Error::Empty("prototype set"));
    }
    spec.check_set(set)?;
    let s = &spec.similarity;
    let n = spec.n();
    let mut plan = vec![0.0; set.len() * n];
    let mut value = 0.0;
    for j in 0..n {
        let mut best = 0;
        for (pos, &i) in set.iter().enumerate() {
            let (v, b) = (s.get(i, j), s.get(set[best], j));
            if v > b || (v == b && i < set[best]) {
                best = pos;
            }
        }
        plan[best * n + j] = spec.target[j];
        value += spec.target[j] * s.get(set[best], j);
    }
    Ok(ObjectiveValue {
        which: Objective::L,
        value,
        coupling: Some(Coupling::from_plan(set.len(), n, plan)),
    })
}

/// Balanced OT value with unit mass per prototype; `h(empty) = 0`.
pub fn eval_h(spec: &ProblemSpec, set: &[usize]) -> Result<ObjectiveValue> {
    if set.is_empty() {
        return Ok(ObjectiveValue::empty(Objective::H));
    }
    spec.check_set(set)?;
    let mu = Marginal::new(vec![1.0; set.len()])?;
    let nu = spec.scaled_target(set.len() as f64);
    let r = ot_exact(&spec.similarity, set, &mu, &nu)?;
    Ok(ObjectiveValue {
        which: Objective::H,
        value: r.objective,
        coupling: Some(r.coupling),
    })
}

/// `h(P) / |P|`; undefined on the empty set.
pub fn eval_g(spec: &ProblemSpec, set: &[usize]) -> Result<ObjectiveValue> {
    if set.is_empty() {
        return Err(Error::Empty("prototype set"));
    }
    let h = eval_h(spec, set)?;
    Ok(ObjectiveValue {
        which: Objective::G,
        value: h.value / set.len() as f64,
        coupling: h.coupling,
    })
}

/// Partial OT value with unit mass per prototype against capacity `k nu`;
/// `f(empty) = 0`.
pub fn eval_f(spec: &ProblemSpec, set: &[usize], cfg: &SolverConfig) -> Result<ObjectiveValue> {
    if set.len() > spec.k {
        return Err(Error::InvalidBudget {
            k: spec.k,
            what: format!("a set of {} prototypes", set.len()),
        });
    }
    if set.is_empty() {
        return Ok(ObjectiveValue::empty(Objective::F));
    }
    spec.check_set(set)?;
    let r = pot_solve(&spec.similarity, set, 1.0, &spec.capacity(), cfg)?;
    Ok(ObjectiveValue {
        which: Objective::F,
        value: r.objective,
        coupling: Some(r.coupling),
    })
}

/// `f(P + j) - f(P)` with both values from the same solver.
pub fn exact_gain(spec: &ProblemSpec, set: &[usize], j: usize, cfg: &SolverConfig) -> Result<f64> {
    let base = eval_f(spec, set, cfg)?.value;
    exact_gain_from(spec, set, base, j, cfg)
}

/// [`exact_gain`] when `f(P)` is already known.
pub fn exact_gain_from(
    spec: &ProblemSpec,
    set: &[usize],
    f_set: f64,
    j: usize,
    cfg: &SolverConfig,
) -> Result<f64> {
    if set.contains(&j) {
        return Err(Error::AlreadySelected(j));
    }
    if set.len() >= spec.k {
        return Err(Error::InvalidBudget {
            k: spec.k,
            what: "adding to a full set".into(),
        });
    }
    let mut extended = Vec::with_capacity(set.len() + 1);
    extended.extend_from_slice(set);
    extended.push(j);
    Ok(eval_f(spec, &extended, cfg)?.value - f_set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::SimilarityMatrix;

    fn spec(rows: &[&[f64]], k: usize) -> ProblemSpec {
        let s = SimilarityMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .unwrap();
        ProblemSpec::uniform(s, k).unwrap()
    }

    #[test]
    fn facility_location_values() {
        let sp = spec(&[&[5.0, 1.0], &[1.0, 5.0], &[3.0, 3.0]], 2);
        assert_eq!(eval_l(&sp, &[0]).unwrap().value, 3.0);
        assert_eq!(eval_l(&sp, &[0, 1]).unwrap().value, 5.0);
        assert!(eval_l(&sp, &[]).is_err());
    }

    #[test]
    fn facility_location_ties_go_to_lowest_index() {
        let sp = spec(&[&[2.0, 2.0], &[2.0, 1.0]], 2);
        let l = eval_l(&sp, &[1, 0]).unwrap();
        // position 1 holds index 0 and wins both columns
        assert_eq!(l.coupling.unwrap().row_sums(), &[0.0, 1.0]);
    }

    #[test]
    fn h_and_g_small_cases() {
        let sp = spec(&[&[0.8]], 1);
        assert!((eval_h(&sp, &[0]).unwrap().value - 0.8).abs() < 1e-12);
        assert!((eval_g(&sp, &[0]).unwrap().value - 0.8).abs() < 1e-12);

        let sp = spec(&[&[3.0, 1.0], &[1.0, 3.0]], 2);
        let h = eval_h(&sp, &[0, 1]).unwrap();
        assert!((h.value - 6.0).abs() < 1e-12);
        assert!((eval_g(&sp, &[0, 1]).unwrap().value - 3.0).abs() < 1e-12);
        assert_eq!(eval_h(&sp, &[]).unwrap().value, 0.0);
        assert!(eval_g(&sp, &[]).is_err());
    }

    #[test]
    fn f_small_cases() {
        let exact = SolverConfig::exact();
        // k = n = 2, capacity 1 per column
        let sp = spec(&[&[3.0, 1.0], &[1.0, 3.0]], 2);
        assert!((eval_f(&sp, &[0], &exact).unwrap().value - 3.0).abs() < 1e-12);
        assert!((eval_f(&sp, &[0, 1], &exact).unwrap().value - 6.0).abs() < 1e-12);
        assert_eq!(eval_f(&sp, &[], &exact).unwrap().value, 0.0);
        assert!(eval_f(&sp, &[0, 1, 0], &exact).is_err());
    }

    #[test]
    fn gains() {
        let exact = SolverConfig::exact();
        let sp = spec(&[&[3.0, 1.0], &[1.0, 3.0]], 2);
        assert!((exact_gain(&sp, &[0], 1, &exact).unwrap() - 3.0).abs() < 1e-12);
        assert!((exact_gain(&sp, &[], 1, &exact).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(exact_gain(&sp, &[0], 0, &exact), Err(Error::AlreadySelected(0))));
        assert!(exact_gain(&sp, &[0, 1], 1, &exact).is_err());
    }
}
