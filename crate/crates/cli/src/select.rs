use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Serialize;
use uniprot::config::{default_max_iter, ProblemSpec, SolverConfig, SolverMode, DEFAULT_LAMBDA, DEFAULT_TOL};
use uniprot::data::{load_csv, read_similarity, write_similarity, Dataset};
use uniprot::selection::{
    select_kmedoids, select_random, select_uniprot_with, GainMode, Selection, StochasticConfig,
    UniprotOptions,
};
use uniprot::similarity::{build_similarity, BetaMode, Metric, SimilarityMatrix};

use crate::output::{ensure_dir, with_manifest, Format, Manifest};
use crate::OutArgs;

/// Source of the similarity matrix: two feature CSVs or a saved matrix.
#[derive(Args, Debug, Clone, Serialize)]
pub struct InputArgs {
    /// Source feature CSV (the candidate prototypes).
    #[arg(long, requires = "target", conflicts_with = "similarity")]
    pub source: Option<PathBuf>,
    /// Target feature CSV.
    #[arg(long, requires = "source")]
    pub target: Option<PathBuf>,
    /// Binary similarity matrix written by `--save-similarity`.
    #[arg(long)]
    pub similarity: Option<PathBuf>,
    /// Integer label column of the CSVs (excluded from the features).
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// neg_sq_euclidean, neg_l1, cosine or dot.
    #[arg(long, default_value = "neg_sq_euclidean")]
    pub metric: String,
    /// Shift constant for distance metrics (default: largest cost + 1).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Keep the raw shifted scores instead of rescaling them to [0, 1].
    #[arg(long)]
    pub no_normalize: bool,
}

pub struct Loaded {
    pub similarity: SimilarityMatrix,
    pub source: Option<Dataset>,
}

/// Reads a CSV, keeping labels only when the label column exists.
pub fn load_dataset(path: &PathBuf, label_column: &str) -> anyhow::Result<Dataset> {
    let header = std::fs::read_to_string(path)
        .map_err(|source| uniprot::Error::Io {
            path: path.clone(),
            source,
        })?
        .lines()
        .next()
        .unwrap_or_default()
        .split(',')
        .any(|h| h.trim() == label_column);
    Ok(load_csv(path, header.then_some(label_column))?)
}

impl InputArgs {
    pub fn load(&self) -> anyhow::Result<Loaded> {
        if let Some(path) = &self.similarity {
            return Ok(Loaded {
                similarity: read_similarity(path)?,
                source: None,
            });
        }
        let (Some(src), Some(tgt)) = (&self.source, &self.target) else {
            bail!("either --similarity or both --source and --target are required");
        };
        let source = load_dataset(src, &self.label_column)?;
        let target = load_dataset(tgt, &self.label_column)?;
        let metric: Metric = self.metric.parse()?;
        let beta = self.beta.map_or(BetaMode::Auto, BetaMode::Given);
        let mut s = build_similarity(&source.features, &target.features, metric, beta)?;
        if !self.no_normalize {
            s = s.normalized();
        }
        Ok(Loaded {
            similarity: s,
            source: Some(source),
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Uniprot,
    Kmedoids,
    Random,
}

/// Solver flags shared by `select` and `bench`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    /// Entropic regularization strength.
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Scaling iterations (default depends on the source size).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop once the marginal violation falls below this.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// exact or entropic.
    #[arg(long, default_value = "entropic")]
    pub solver: String,
}

impl SolverArgs {
    pub fn config(&self, m: usize) -> anyhow::Result<SolverConfig> {
        let mode: SolverMode = self.solver.parse()?;
        let cfg = SolverConfig {
            lambda: self.lambda,
            max_iter: self.max_iter.unwrap_or_else(|| default_max_iter(m)),
            tol: self.tol,
            mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Uniprot)]
    method: MethodArg,
    /// Number of prototypes.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverArgs,
    /// exact or approx.
    #[arg(long, default_value = "approx")]
    gain: String,
    /// Score a random candidate pool per step instead of every candidate.
    #[arg(long)]
    stochastic: bool,
    /// Pool size parameter of the stochastic variant.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Start each entropic solve from the previous step's scalings.
    #[arg(long)]
    warm_start: bool,
    /// Select independently within each source label and take the union.
    #[arg(long)]
    per_source: bool,
    /// Per-source budgets in label order; must sum to k (default: k split
    /// evenly, remainder to the first labels).
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<usize>,
    /// Seed of the random baseline and the stochastic pools (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the similarity matrix in the binary format.
    #[arg(long)]
    save_similarity: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArgs,
}

#[derive(Serialize)]
struct SelectionOutput<'a> {
    #[serde(flatten)]
    selection: &'a Selection,
    gain: Option<GainMode>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    per_source: Vec<SourceSlice>,
}

#[derive(Serialize)]
struct SourceSlice {
    label: usize,
    budget: usize,
    selection: Selection,
}

#[derive(Serialize)]
struct SelectionRow {
    rank: usize,
    index: usize,
    weight: f64,
    step_value: Option<f64>,
    solve_secs: Option<f64>,
    score_secs: Option<f64>,
}

fn run_method(args: &SelectArgs, spec: &ProblemSpec, gain: GainMode) -> anyhow::Result<Selection> {
    Ok(match args.method {
        MethodArg::Uniprot => {
            let cfg = args.solver.config(spec.m())?;
            let opts = UniprotOptions {
                gain,
                stochastic: args.stochastic.then(|| StochasticConfig::new(args.epsilon)).transpose()?,
                seed: args.seed,
                warm_start: args.warm_start,
            };
            select_uniprot_with(spec, &cfg, &opts)?
        }
        MethodArg::Kmedoids => select_kmedoids(spec)?,
        MethodArg::Random => select_random(spec, args.seed.unwrap_or(0))?,
    })
}

fn split_budget(k: usize, groups: usize) -> Vec<usize> {
    (0..groups).map(|q| k / groups + usize::from(q < k % groups)).collect()
}

fn per_source(
    args: &SelectArgs,
    s: &SimilarityMatrix,
    labels: &[usize],
    gain: GainMode,
) -> anyhow::Result<(Selection, Vec<SourceSlice>)> {
    let groups = labels.iter().max().map_or(0, |&g| g + 1);
    let budgets = if args.budgets.is_empty() {
        split_budget(args.k, groups)
    } else {
        args.budgets.clone()
    };
    if budgets.len() != groups {
        bail!("{} budgets given for {groups} sources", budgets.len());
    }
    let total: usize = budgets.iter().sum();
    if total != args.k {
        return Err(uniprot::Error::InvalidBudget {
            k: args.k,
            what: format!("per-source budgets summing to {total}"),
        }
        .into());
    }
    let mut slices = Vec::new();
    let mut indices = Vec::with_capacity(args.k);
    for (label, &budget) in budgets.iter().enumerate() {
        let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if budget > rows.len() {
            return Err(uniprot::Error::InvalidBudget {
                k: budget,
                what: format!("source {label} with {} points", rows.len()),
            }
            .into());
        }
        if budget == 0 {
            continue;
        }
        let data = rows.iter().flat_map(|&i| s.row(i).iter().copied()).collect();
        let sub = SimilarityMatrix::from_raw(rows.len(), s.cols(), data)?;
        let spec = ProblemSpec::uniform(sub, budget)?;
        let mut sel = run_method(args, &spec, gain)?;
        sel.indices.iter_mut().for_each(|i| *i = rows[*i]);
        indices.extend_from_slice(&sel.indices);
        slices.push(SourceSlice {
            label,
            budget,
            selection: sel,
        });
    }
    let method = slices.first().map(|s| s.selection.method).context("no source received a budget")?;
    let union = Selection {
        method,
        weights: vec![1.0 / indices.len() as f64; indices.len()],
        indices,
        step_values: Vec::new(),
        seed: args.seed,
        timing: slices.iter().flat_map(|s| s.selection.timing.clone()).collect(),
    };
    Ok((union, slices))
}

pub fn run(args: &SelectArgs, mut manifest: Manifest) -> anyhow::Result<ExitCode> {
    let gain: GainMode = args.gain.parse()?;
    let loaded = args.input.load()?;
    let s = loaded.similarity;
    if let Some(path) = &args.save_similarity {
        write_similarity(path, &s)?;
    }
    let (selection, slices) = if args.per_source {
        let labels = loaded
            .source
            .as_ref()
            .and_then(|d| d.labels.as_deref())
            .ok_or_else(|| uniprot::Error::MissingLabels("--per-source needs a labelled --source CSV".into()))?;
        per_source(args, &s, labels, gain)?
    } else {
        let spec = ProblemSpec::uniform(s, args.k)?;
        (run_method(args, &spec, gain)?, Vec::new())
    };

    let dir = &args.out.out;
    ensure_dir(dir)?;
    manifest.seed(selection.seed.or(args.seed));
    let out = SelectionOutput {
        selection: &selection,
        gain: (args.method == MethodArg::Uniprot).then_some(gain),
        per_source: slices,
    };
    manifest.write_json(dir, "selection.json", &with_manifest(&out))?;
    if args.out.format == Format::Csv {
        let rows: Vec<SelectionRow> = selection
            .indices
            .iter()
            .enumerate()
            .map(|(rank, &index)| SelectionRow {
                rank,
                index,
                weight: selection.weights[rank],
                step_value: selection.step_values.get(rank).copied(),
                solve_secs: selection.timing.get(rank).map(|t| t.solve_secs),
                score_secs: selection.timing.get(rank).map(|t| t.score_secs),
            })
            .collect();
        manifest.write_csv(dir, "selection.csv", &rows)?;
    }
    manifest.finish(dir)?;
    Ok(ExitCode::SUCCESS)
}
