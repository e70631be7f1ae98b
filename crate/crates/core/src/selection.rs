//! Greedy prototype selection.
//!
//! [`select_uniprot`] grows a set one prototype at a time, scoring every
//! candidate by its marginal gain in `f` (exact re-solve or the closed-form
//! approximation) and keeping the best. [`select_kmedoids`] runs the same
//! greedy loop on the facility-location objective `l`, and
//! [`select_random`] draws a uniform baseline.
//!
//! Ties always go to the lowest source index.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ProblemSpec, SolverConfig, SolverMode};
use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::objective::{approx_gain_sorted, eval_l, remaining_capacity_for, SortedRows};
use crate::transport::{pot_entropic_warm, pot_exact, TransportResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    UniprotExact,
    UniprotApprox,
    UniprotStochastic,
    Kmedoids,
    Random,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::UniprotExact => "uniprot_exact",
            Method::UniprotApprox => "uniprot_approx",
            Method::UniprotStochastic => "uniprot_stochastic",
            Method::Kmedoids => "kmedoids",
            Method::Random => "random",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMode {
    Exact,
    Approx,
}

impl std::str::FromStr for GainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(GainMode::Exact),
            "approx" => Ok(GainMode::Approx),
            other => Err(Error::InvalidConfig(format!("unknown gain mode {other:?}"))),
        }
    }
}

/// Candidate subsampling: each step scores only a random pool of
/// `ceil((m / k) ln(1 / epsilon))` candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticConfig {
    pub epsilon: f64,
}

impl StochasticConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    /// Pool size for a ground set of `m`, budget `k` and `remaining`
    /// unselected candidates. Never below one.
    pub fn pool_size(&self, m: usize, k: usize, remaining: usize) -> usize {
        let raw = (m as f64 / k as f64) * (1.0 / self.epsilon).ln();
        (raw.ceil() as usize).clamp(1, remaining.max(1))
    }
}

/// Wall time of one greedy step, split between the transport solve for the
/// current set and candidate scoring.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub solve_secs: f64,
    pub score_secs: f64,
}

impl StepTiming {
    pub fn total(&self) -> f64 {
        self.solve_secs + self.score_secs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub method: Method,
    /// Prototype indices in the order they were picked.
    pub indices: Vec<usize>,
    /// Objective after each step: `f` for UniPROT, `l` for k-medoids, empty
    /// for the random baseline.
    pub step_values: Vec<f64>,
    pub weights: Vec<f64>,
    pub seed: Option<u64>,
    pub timing: Vec<StepTiming>,
}

/// Knobs of [`select_uniprot_with`] beyond the solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniprotOptions {
    pub gain: GainMode,
    pub stochastic: Option<StochasticConfig>,
    pub seed: Option<u64>,
    /// Start each entropic solve from the previous step's column scalings.
    pub warm_start: bool,
}

impl UniprotOptions {
    pub fn new(gain: GainMode) -> Self {
        Self {
            gain,
            stochastic: None,
            seed: None,
            warm_start: false,
        }
    }
}

/// Greedy maximization of `f` under the budget `spec.k`.
pub fn select_uniprot(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    gain: GainMode,
    stochastic: Option<StochasticConfig>,
    seed: Option<u64>,
) -> Result<Selection> {
    let opts = UniprotOptions {
        stochastic,
        seed,
        ..UniprotOptions::new(gain)
    };
    select_uniprot_with(spec, cfg, &opts)
}

/// One partial transport solve of the current set, optionally warm.
struct SetSolver<'a> {
    spec: &'a ProblemSpec,
    cfg: SolverConfig,
    warm: Option<Vec<f64>>,
    use_warm: bool,
}

impl SetSolver<'_> {
    fn solve(&self, set: &[usize]) -> Result<TransportResult> {
        let cap = self.spec.capacity();
        match self.cfg.mode {
            SolverMode::Exact => pot_exact(&self.spec.similarity, set, 1.0, &cap),
            SolverMode::Entropic => {
                let init = if self.use_warm { self.warm.as_deref() } else { None };
                pot_entropic_warm(&self.spec.similarity, set, 1.0, &cap, &self.cfg, init)
            }
        }
    }
}

pub fn select_uniprot_with(
    spec: &ProblemSpec,
    cfg: &SolverConfig,
    opts: &UniprotOptions,
) -> Result<Selection> {
    cfg.validate()?;
    let (m, k) = (spec.m(), spec.k);
    let method = match (opts.stochastic, opts.gain) {
        (Some(_), _) => Method::UniprotStochastic,
        (None, GainMode::Exact) => Method::UniprotExact,
        (None, GainMode::Approx) => Method::UniprotApprox,
    };
    let seed = opts.stochastic.map(|_| opts.seed.unwrap_or(0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let sorted = (opts.gain == GainMode::Approx).then(|| SortedRows::new(&spec.similarity));
    let mut solver = SetSolver {
        spec,
        cfg: *cfg,
        warm: None,
        use_warm: opts.warm_start,
    };

    let mut selected = vec![false; m];
    let mut indices = Vec::with_capacity(k);
    let mut step_values = Vec::with_capacity(k);
    let mut timing = Vec::with_capacity(k);
    let mut current: Option<TransportResult> = None;
    let mut pending_solve = 0.0;

    for _ in 0..k {
        let started = Instant::now();
        let mut candidates: Vec<usize> = (0..m).filter(|&i| !selected[i]).collect();
        if let Some(st) = &opts.stochastic {
            let pool = st.pool_size(m, k, candidates.len());
            let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, candidates.len(), pool)
                .into_iter()
                .map(|p| candidates[p])
                .collect();
            picked.sort_unstable();
            candidates = picked;
        }

        let gains: Vec<f64> = match opts.gain {
            GainMode::Approx => {
                let gamma = current.as_ref().map(|r| &r.coupling);
                let b = remaining_capacity_for(&spec.capacity(), gamma);
                let sorted = sorted.as_ref().expect("built for approximate gains");
                candidates
                    .par_iter()
                    .map(|&j| approx_gain_sorted(spec.similarity.row(j), sorted.row(j), &b))
                    .collect::<Result<_>>()?
            }
            GainMode::Exact => {
                let base = current.as_ref().map_or(0.0, |r| r.objective);
                candidates
                    .par_iter()
                    .map(|&j| {
                        let mut set = indices.clone();
                        set.push(j);
                        Ok(solver.solve(&set)?.objective - base)
                    })
                    .collect::<Result<_>>()?
            }
        };
        let pick = candidates[argmax(&gains)];
        let score_secs = started.elapsed().as_secs_f64();

        selected[pick] = true;
        indices.push(pick);
        let started = Instant::now();
        let r = solver.solve(&indices)?;
        if r.column_scaling.is_some() {
            solver.warm.clone_from(&r.column_scaling);
        }
        step_values.push(r.objective);
        current = Some(r);
        timing.push(StepTiming {
            solve_secs: pending_solve,
            score_secs,
        });
        pending_solve = started.elapsed().as_secs_f64();
    }
    if let Some(last) = timing.last_mut() {
        last.solve_secs += pending_solve;
    }

    Ok(Selection {
        method,
        weights: vec![1.0 / indices.len() as f64; indices.len()],
        indices,
        step_values,
        seed,
        timing,
    })
}

/// Position of the largest value; the first one wins ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy facility location. Each step adds the row that most increases
/// `l`, tracking the best similarity seen so far in every column.
pub fn select_kmedoids(spec: &ProblemSpec) -> Result<Selection> {
    let (m, n, k) = (spec.m(), spec.n(), spec.k);
    let s = &spec.similarity;
    let nu = spec.target.mass();
    let mut best = vec![0.0f64; n];
    let mut selected = vec![false; m];
    let mut indices = Vec::with_capacity(k);
    let mut step_values = Vec::with_capacity(k);
    let mut timing = Vec::with_capacity(k);
    let mut value = 0.0;

    for _ in 0..k {
        let started = Instant::now();
        let candidates: Vec<usize> = (0..m).filter(|&i| !selected[i]).collect();
        let gains: Vec<f64> = candidates
            .par_iter()
            .map(|&i| {
                s.row(i)
                    .iter()
                    .zip(&best)
                    .zip(nu)
                    .map(|((&v, &b), &w)| w * (v - b).max(0.0))
                    .sum()
            })
            .collect();
        let pos = argmax(&gains);
        let pick = candidates[pos];
        selected[pick] = true;
        indices.push(pick);
        for (b, &v) in best.iter_mut().zip(s.row(pick)) {
            *b = b.max(v);
        }
        value += gains[pos];
        step_values.push(value);
        timing.push(StepTiming {
            solve_secs: 0.0,
            score_secs: started.elapsed().as_secs_f64(),
        });
    }

    let assignment = eval_l(spec, &indices)?;
    let weights = assignment
        .coupling
        .as_ref()
        .map(Coupling::row_sums)
        .map(|w| w.iter().map(|v| v / spec.target.total()).collect())
        .unwrap_or_default();
    Ok(Selection {
        method: Method::Kmedoids,
        indices,
        step_values,
        weights,
        seed: None,
        timing,
    })
}

/// `k` distinct indices drawn uniformly without replacement.
pub fn select_random(spec: &ProblemSpec, seed: u64) -> Result<Selection> {
    let k = spec.k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = rand::seq::index::sample(&mut rng, spec.m(), k).into_vec();
    Ok(Selection {
        method: Method::Random,
        weights: vec![1.0 / k as f64; k],
        indices,
        step_values: Vec::new(),
        seed: Some(seed),
        timing: Vec::new(),
    })
}
