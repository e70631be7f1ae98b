//! Brute-force optima and randomized checks of the structural properties of
//! `h` and `f` and of the greedy guarantees.
//!
//! Every check runs on exact solvers. A suite never throws on a violated
//! property; it counts the failure and keeps the first offending instance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ProblemSpec, SolverConfig};
use crate::error::{Error, Result};
use crate::objective::{
    alpha_bound, approx_gain, eval_f, eval_h, eval_l, remaining_capacity_for, Objective,
};
use crate::selection::{select_uniprot, GainMode};
use crate::similarity::SimilarityMatrix;
use crate::transport::{ot_exact, pot_exact};

/// Absolute tolerance for comparisons between exact solver outputs.
pub const CHECK_TOL: f64 = 1e-8;

/// Largest number of subsets [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    GainRatio,
    PotOtEquality,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Lemma1,
        Suite::Lemma2,
        Suite::Lemma3,
        Suite::Lemma4,
        Suite::Lemma5,
        Suite::GainRatio,
        Suite::PotOtEquality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Lemma5 => "lemma5",
            Suite::GainRatio => "gain_ratio",
            Suite::PotOtEquality => "pot_ot_equality",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub trials: usize,
    pub failures: usize,
    /// Largest amount by which any checked inequality was violated (zero
    /// when none was).
    pub worst_violation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    /// Suite-specific aggregates, e.g. `mean_ratio` for `gain_ratio`.
    #[serde(default)]
    pub stats: BTreeMap<String, f64>,
}

/// Size ranges of random instances (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceGen {
    pub m: (usize, usize),
    pub n: (usize, usize),
    pub k: (usize, usize),
}

impl Default for InstanceGen {
    fn default() -> Self {
        Self {
            m: (2, 10),
            n: (2, 8),
            k: (1, 4),
        }
    }
}

impl InstanceGen {
    pub fn new(m_max: usize, n_max: usize, k_max: usize) -> Self {
        Self {
            m: (2.min(m_max), m_max),
            n: (2.min(n_max), n_max),
            k: (1, k_max),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (usize, usize)| lo >= 1 && lo <= hi;
        if ok(self.m) && ok(self.n) && ok(self.k) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid instance ranges {self:?}")))
        }
    }

    /// Uniform costs `c` in `[0, 1]`, similarities `max(1 - c, 1e-3)`,
    /// uniform target, `k <= min(m, n)`.
    pub fn sample(&self, rng: &mut impl Rng) -> ProblemSpec {
        let m = rng.random_range(self.m.0..=self.m.1);
        let n = rng.random_range(self.n.0..=self.n.1);
        let k_hi = self.k.1.min(m).min(n).max(1);
        let k = rng.random_range(self.k.0.min(k_hi)..=k_hi);
        let data = (0..m * n)
            .map(|_| (1.0 - rng.random::<f64>()).max(1e-3))
            .collect();
        let s = SimilarityMatrix::from_raw(m, n, data).expect("positive finite entries");
        ProblemSpec::uniform(s, k).expect("k within range")
    }
}

/// `C(m, k)`, saturating at `u128::MAX`.
pub fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = match c.checked_mul((m - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    c
}

fn objective_value(spec: &ProblemSpec, set: &[usize], which: Objective) -> Result<f64> {
    Ok(match which {
        Objective::F => eval_f(spec, set, &SolverConfig::exact())?.value,
        Objective::H => eval_h(spec, set)?.value,
        Objective::G => eval_h(spec, set)?.value / set.len() as f64,
        Objective::L => eval_l(spec, set)?.value,
    })
}

/// Best subset of size exactly `spec.k` by exhaustive enumeration in
/// lexicographic order; the first of equally good sets is kept.
pub fn brute_force_opt(spec: &ProblemSpec, which: Objective) -> Result<(Vec<usize>, f64)> {
    let (m, k) = (spec.m(), spec.k);
    let count = binomial(m, k);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::GuardExceeded { m, k, count });
    }
    let mut set: Vec<usize> = (0..k).collect();
    let mut best = (set.clone(), objective_value(spec, &set, which)?);
    while next_combination(&mut set, m) {
        let v = objective_value(spec, &set, which)?;
        if v > best.1 {
            best = (set.clone(), v);
        }
    }
    Ok(best)
}

/// Advances `set` to the next `k`-combination of `0..m` in lexicographic
/// order. Returns `false` after the last one.
fn next_combination(set: &mut [usize], m: usize) -> bool {
    let k = set.len();
    let Some(i) = (0..k).rev().find(|&i| set[i] < m - k + i) else {
        return false;
    };
    set[i] += 1;
    for t in i + 1..k {
        set[t] = set[t - 1] + 1;
    }
    true
}

/// One greedy step of a gain-ratio trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainStep {
    pub step: usize,
    pub chosen: usize,
    pub approx_gain: f64,
    pub exact_gain: f64,
    /// `approx_gain / exact_gain`, or `1` when both vanish.
    pub ratio: f64,
    /// `f` after adding `chosen`.
    pub value: f64,
}

/// Runs the approximate-gain greedy with the exact solver and records, for
/// each chosen element, its approximate and exact marginal gains.
pub fn gain_trace(spec: &ProblemSpec) -> Result<Vec<GainStep>> {
    let exact = SolverConfig::exact();
    let sel = select_uniprot(spec, &exact, GainMode::Approx, None, None)?;
    let cap = spec.capacity();
    let mut steps = Vec::with_capacity(sel.indices.len());
    let mut coupling = None;
    let mut before = 0.0;
    for (t, &j) in sel.indices.iter().enumerate() {
        let b = remaining_capacity_for(&cap, coupling.as_ref());
        let (approx, _) = approx_gain(spec.similarity.row(j), &b)?;
        let r = pot_exact(&spec.similarity, &sel.indices[..=t], 1.0, &cap)?;
        let exact_gain = r.objective - before;
        steps.push(GainStep {
            step: t,
            chosen: j,
            approx_gain: approx,
            exact_gain,
            ratio: gain_ratio(approx, exact_gain),
            value: r.objective,
        });
        before = r.objective;
        coupling = Some(r.coupling);
    }
    Ok(steps)
}

fn gain_ratio(approx: f64, exact: f64) -> f64 {
    if exact.abs() <= 1e-12 && approx.abs() <= 1e-12 {
        1.0
    } else {
        approx / exact
    }
}

/// Outcome of one randomized trial.
#[derive(Default)]
struct Trial {
    violation: f64,
    failed: bool,
    detail: Option<serde_json::Value>,
    samples: Vec<f64>,
}

impl Trial {
    /// Records `lhs >= rhs - tol`.
    fn at_least(&mut self, lhs: f64, rhs: f64, tol: f64, what: &str) {
        let gap = rhs - lhs;
        if gap > 0.0 {
            self.violation = self.violation.max(gap);
        }
        if gap > tol && !self.failed {
            self.failed = true;
            self.detail = Some(serde_json::json!({ "check": what, "lhs": lhs, "rhs": rhs }));
        }
    }
}

fn random_subset(rng: &mut impl Rng, m: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..m).collect();
    all.shuffle(rng);
    all.truncate(size);
    all
}

fn lemma1(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let mut t = Trial::default();
    let m = spec.m();
    let chain = random_subset(rng, m, m);
    let mut prev = eval_h(spec, &[])?.value;
    t.at_least(prev, 0.0, CHECK_TOL, "h(empty) >= 0");
    t.at_least(0.0, prev, CHECK_TOL, "h(empty) <= 0");
    for len in 1..=m {
        let v = eval_h(spec, &chain[..len])?.value;
        t.at_least(v, 0.0, CHECK_TOL, "non-negativity");
        t.at_least(v, prev, CHECK_TOL, "monotonicity");
        prev = v;
    }
    let size = rng.random_range(2..=m);
    let set = random_subset(rng, m, size);
    let cut = rng.random_range(1..size);
    let (a, b) = set.split_at(cut);
    let ha = eval_h(spec, a)?.value;
    let hb = eval_h(spec, b)?.value;
    let hab = eval_h(spec, &set)?.value;
    t.at_least(hab, ha + hb, CHECK_TOL, "super-additivity");
    Ok(t)
}

fn lemma2(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let mut t = Trial::default();
    let exact = SolverConfig::exact();
    let f = |set: &[usize]| eval_f(spec, set, &exact).map(|v| v.value);
    let (m, k) = (spec.m(), spec.k);
    let b_size = rng.random_range(0..=(k - 1).min(m - 1));
    let mut pool = random_subset(rng, m, b_size + 1);
    let u = pool.pop().expect("pool holds b_size + 1 elements");
    let big = pool;
    let a_size = rng.random_range(0..=b_size);
    let small = &big[..a_size];
    let with = |set: &[usize]| -> Vec<usize> { set.iter().copied().chain([u]).collect() };
    let (fa, fb) = (f(small)?, f(&big)?);
    let (fau, fbu) = (f(&with(small))?, f(&with(&big))?);
    t.at_least(fau - fa, fbu - fb, CHECK_TOL, "submodularity");
    t.at_least(fb, fa, CHECK_TOL, "monotonicity over A within B");
    t.at_least(fbu, fb, CHECK_TOL, "monotonicity under adding u");
    t.at_least(fa, 0.0, CHECK_TOL, "non-negativity");
    Ok(t)
}

fn lemma3(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let mut t = Trial::default();
    let exact = SolverConfig::exact();
    let (m, k) = (spec.m(), spec.k);
    for size in 1..=k {
        let set = random_subset(rng, m, size);
        let f = eval_f(spec, &set, &exact)?.value;
        let h = eval_h(spec, &set)?.value;
        if size == k {
            t.at_least(f, h, CHECK_TOL, "f = h at size k (f >= h)");
            t.at_least(h, f, CHECK_TOL, "f = h at size k (h >= f)");
        } else {
            t.at_least(f, h, 1e-9, "f >= h below size k");
        }
    }
    let (set_f, val_f) = brute_force_opt(spec, Objective::F)?;
    let (set_h, val_h) = brute_force_opt(spec, Objective::H)?;
    t.at_least(val_f, val_h, CHECK_TOL, "max f = max h");
    t.at_least(val_h, val_f, CHECK_TOL, "max h = max f");
    if set_f != set_h {
        // Distinct argmax sets only count when they are not tied optima.
        let h_of_f = eval_h(spec, &set_f)?.value;
        let f_of_h = eval_f(spec, &set_h, &exact)?.value;
        t.at_least(h_of_f, val_h, CHECK_TOL, "argmax of f maximizes h");
        t.at_least(f_of_h, val_f, CHECK_TOL, "argmax of h maximizes f");
    }
    Ok(t)
}

fn lemma4(spec: &ProblemSpec) -> Result<Trial> {
    let mut t = Trial::default();
    let exact = SolverConfig::exact();
    let sel = select_uniprot(spec, &exact, GainMode::Exact, None, None)?;
    let value = eval_f(spec, &sel.indices, &exact)?.value;
    let (_, opt) = brute_force_opt(spec, Objective::F)?;
    let bound = (1.0 - (-1.0f64).exp()) * opt;
    t.at_least(value, bound, CHECK_TOL, "greedy >= (1 - 1/e) OPT");
    t.samples.push(if opt > 0.0 { value / opt } else { 1.0 });
    Ok(t)
}

fn lemma5(spec: &ProblemSpec) -> Result<Trial> {
    let mut t = Trial::default();
    let exact = SolverConfig::exact();
    let alpha = alpha_bound(&spec.similarity, spec.k)?;
    let sel = select_uniprot(spec, &exact, GainMode::Approx, None, None)?;
    let value = eval_f(spec, &sel.indices, &exact)?.value;
    let (_, opt) = brute_force_opt(spec, Objective::F)?;
    t.at_least(value, alpha.guarantee() * opt, CHECK_TOL, "greedy >= (1 - e^-alpha) OPT");
    t.samples.push(if opt > 0.0 { value / opt } else { 1.0 });

    // Sandwich of every candidate's approximate gain at every step.
    let cap = spec.capacity();
    let mut coupling = None;
    let mut base = 0.0;
    for t_step in 0..sel.indices.len() {
        let set = &sel.indices[..t_step];
        let b = remaining_capacity_for(&cap, coupling.as_ref());
        for j in (0..spec.m()).filter(|j| !set.contains(j)) {
            let (approx, _) = approx_gain(spec.similarity.row(j), &b)?;
            let mut ext = set.to_vec();
            ext.push(j);
            let exact_gain = pot_exact(&spec.similarity, &ext, 1.0, &cap)?.objective - base;
            t.at_least(exact_gain + 1e-9, approx, 0.0, "approx gain <= exact gain");
            t.at_least(approx, alpha.ratio(j) * exact_gain - CHECK_TOL, 0.0, "approx gain >= ratio * exact gain");
        }
        let r = pot_exact(&spec.similarity, &sel.indices[..=t_step], 1.0, &cap)?;
        base = r.objective;
        coupling = Some(r.coupling);
    }
    Ok(t)
}

fn gain_ratio_trial(spec: &ProblemSpec) -> Result<Trial> {
    let mut t = Trial::default();
    for step in gain_trace(spec)? {
        t.at_least(1.0 + 1e-9, step.ratio, 0.0, "ratio <= 1");
        t.samples.push(step.ratio);
    }
    Ok(t)
}

fn pot_ot_equality(spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let mut t = Trial::default();
    let size = rng.random_range(1..=spec.m());
    let set = random_subset(rng, spec.m(), size);
    let nu = spec.scaled_target(size as f64);
    let mu = crate::marginal::Marginal::new(vec![1.0; size])?;
    let pot = pot_exact(&spec.similarity, &set, 1.0, &nu)?.objective;
    let ot = ot_exact(&spec.similarity, &set, &mu, &nu)?.objective;
    t.at_least(pot, ot, CHECK_TOL, "POT >= OT");
    t.at_least(ot, pot, CHECK_TOL, "OT >= POT");
    Ok(t)
}

fn run_trial(suite: Suite, spec: &ProblemSpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    match suite {
        Suite::Lemma1 => lemma1(spec, rng),
        Suite::Lemma2 => lemma2(spec, rng),
        Suite::Lemma3 => lemma3(spec, rng),
        Suite::Lemma4 => lemma4(spec),
        Suite::Lemma5 => lemma5(spec),
        Suite::GainRatio => gain_ratio_trial(spec),
        Suite::PotOtEquality => pot_ot_equality(spec, rng),
    }
}

/// Runs `trials` independent random trials. Trial `i` draws from the
/// ChaCha8 stream `i` of `seed`, so results do not depend on scheduling.
pub fn run_suite(suite: Suite, trials: usize, gen: &InstanceGen, seed: u64) -> Result<VerificationReport> {
    gen.validate()?;
    if matches!(suite, Suite::Lemma3 | Suite::Lemma4 | Suite::Lemma5) {
        let worst = (gen.k.0..=gen.k.1).map(|k| binomial(gen.m.1, k)).max().unwrap_or(0);
        if worst > BRUTE_FORCE_LIMIT {
            return Err(Error::GuardExceeded {
                m: gen.m.1,
                k: gen.k.1,
                count: worst,
            });
        }
    }
    let outcomes: Vec<(ProblemSpec, Trial)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let spec = gen.sample(&mut rng);
            let trial = run_trial(suite, &spec, &mut rng)?;
            Ok((spec, trial))
        })
        .collect::<Result<_>>()?;

    let mut report = VerificationReport {
        suite,
        trials,
        failures: 0,
        worst_violation: 0.0,
        counterexample: None,
        stats: BTreeMap::new(),
    };
    let mut samples = Vec::new();
    for (i, (spec, trial)) in outcomes.into_iter().enumerate() {
        report.worst_violation = report.worst_violation.max(trial.violation);
        samples.extend(trial.samples);
        if trial.failed {
            report.failures += 1;
            if report.counterexample.is_none() {
                report.counterexample = Some(serde_json::json!({
                    "trial": i,
                    "k": spec.k,
                    "similarity": (0..spec.m()).map(|r| spec.similarity.row(r).to_vec()).collect::<Vec<_>>(),
                    "violation": trial.detail,
                }));
            }
        }
    }
    if !samples.is_empty() {
        let key = if suite == Suite::GainRatio { "ratio" } else { "value_over_opt" };
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        report.stats.insert(format!("mean_{key}"), mean);
        report.stats.insert(format!("min_{key}"), min);
        report.stats.insert("samples".into(), samples.len() as f64);
    }
    Ok(report)
}
