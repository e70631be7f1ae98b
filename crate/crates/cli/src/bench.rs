use std::process::ExitCode;

use clap::{Args, Subcommand};
use serde::Serialize;
use uniprot::config::{ProblemSpec, SolverConfig};
use uniprot::data::{gen_gaussian_longtail, GaussianConfig};
use uniprot::selection::{select_uniprot, select_uniprot_with, GainMode, UniprotOptions};
use uniprot::similarity::{build_similarity, BetaMode, Metric, SimilarityMatrix};
use uniprot::verify::gain_trace;

use crate::output::{ensure_dir, with_manifest, Manifest};
use crate::select::{InputArgs, SolverArgs};
use crate::OutArgs;

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[command(subcommand)]
    kind: BenchKind,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BenchKind {
    /// Approximate vs exact marginal gain along the approximate greedy,
    /// plus the objective curve of the exact-gain greedy.
    GainRatio(GainRatioArgs),
    /// Per-step scoring and solve time as the source size grows.
    Scaling(ScalingArgs),
}

#[derive(Args, Debug, Serialize)]
struct GainRatioArgs {
    /// Use this similarity instead of a generated Gaussian mixture.
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    /// Points of the generated instance (used as both source and target).
    #[arg(long, default_value_t = 500)]
    points: usize,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 3.0)]
    cluster_sep: f64,
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Skip the exact-gain greedy (one exact solve per candidate and step).
    #[arg(long)]
    skip_exact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug, Serialize)]
struct ScalingArgs {
    /// Source sizes to time.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000")]
    m: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Runs per size; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// exact or approx.
    #[arg(long, default_value = "approx")]
    gain: String,
    /// Reuse column scalings between entropic solves.
    #[arg(long)]
    warm_start: bool,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArgs,
}

#[derive(Serialize)]
struct RatioRow {
    step: usize,
    chosen: usize,
    approx_gain: f64,
    exact_gain: f64,
    ratio: f64,
    f_approx_greedy: f64,
    f_exact_greedy: Option<f64>,
}

#[derive(Serialize)]
struct RatioSummary {
    steps: usize,
    mean_ratio: f64,
    min_ratio: f64,
    max_ratio: f64,
    f_approx_greedy: f64,
    f_exact_greedy: Option<f64>,
}

#[derive(Serialize)]
struct ScalingRow {
    m: usize,
    n: usize,
    k: usize,
    score_ms_per_step: f64,
    solve_ms_per_step: f64,
}

pub fn run(args: &BenchArgs, manifest: Manifest) -> anyhow::Result<ExitCode> {
    match &args.kind {
        BenchKind::GainRatio(a) => gain_ratio(a, manifest),
        BenchKind::Scaling(a) => scaling(a, manifest),
    }
}

fn gain_ratio(args: &GainRatioArgs, mut manifest: Manifest) -> anyhow::Result<ExitCode> {
    let s = if args.input.source.is_some() || args.input.similarity.is_some() {
        args.input.load()?.similarity
    } else {
        let mut cfg = GaussianConfig::new(args.classes, args.dim, 1, args.points);
        cfg.cluster_sep = args.cluster_sep;
        cfg.seed = args.seed;
        let (_, points) = gen_gaussian_longtail(&cfg)?;
        build_similarity(&points.features, &points.features, Metric::NegSqEuclidean, BetaMode::Auto)?
            .normalized()
    };
    let spec = ProblemSpec::uniform(s, args.k)?;
    let trace = gain_trace(&spec)?;
    let exact_curve = if args.skip_exact {
        None
    } else {
        Some(select_uniprot(&spec, &SolverConfig::exact(), GainMode::Exact, None, None)?.step_values)
    };
    let rows: Vec<RatioRow> = trace
        .iter()
        .map(|t| RatioRow {
            step: t.step,
            chosen: t.chosen,
            approx_gain: t.approx_gain,
            exact_gain: t.exact_gain,
            ratio: t.ratio,
            f_approx_greedy: t.value,
            f_exact_greedy: exact_curve.as_ref().map(|c| c[t.step]),
        })
        .collect();
    let ratios = trace.iter().map(|t| t.ratio);
    let summary = RatioSummary {
        steps: trace.len(),
        mean_ratio: ratios.clone().sum::<f64>() / trace.len() as f64,
        min_ratio: ratios.clone().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.fold(f64::NEG_INFINITY, f64::max),
        f_approx_greedy: trace.last().map_or(0.0, |t| t.value),
        f_exact_greedy: exact_curve.as_ref().and_then(|c| c.last().copied()),
    };

    let dir = &args.out.out;
    ensure_dir(dir)?;
    manifest.seed(Some(args.seed));
    manifest.write_csv(dir, "gain_ratio.csv", &rows)?;
    manifest.write_json(dir, "bench.json", &with_manifest(&summary))?;
    manifest.finish(dir)?;
    Ok(ExitCode::SUCCESS)
}

/// Uniform `[0, 1)` scores from a SplitMix64 stream.
fn random_similarity(m: usize, n: usize, seed: u64) -> anyhow::Result<SimilarityMatrix> {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    };
    let data = (0..m * n).map(|_| next()).collect();
    Ok(SimilarityMatrix::from_raw(m, n, data)?)
}

fn scaling(args: &ScalingArgs, mut manifest: Manifest) -> anyhow::Result<ExitCode> {
    let gain: GainMode = args.gain.parse()?;
    let mut rows = Vec::new();
    for &m in &args.m {
        let spec = ProblemSpec::uniform(random_similarity(m, args.n, args.seed)?, args.k)?;
        let cfg = args.solver.config(m)?;
        let opts = UniprotOptions {
            warm_start: args.warm_start,
            ..UniprotOptions::new(gain)
        };
        let mut best = (f64::INFINITY, f64::INFINITY);
        for _ in 0..args.repeats.max(1) {
            let sel = select_uniprot_with(&spec, &cfg, &opts)?;
            let steps = sel.timing.len() as f64;
            let score = sel.timing.iter().map(|t| t.score_secs).sum::<f64>() / steps;
            let solve = sel.timing.iter().map(|t| t.solve_secs).sum::<f64>() / steps;
            if score < best.0 {
                best = (score, solve);
            }
        }
        rows.push(ScalingRow {
            m,
            n: args.n,
            k: args.k,
            score_ms_per_step: 1e3 * best.0,
            solve_ms_per_step: 1e3 * best.1,
        });
    }

    let dir = &args.out.out;
    ensure_dir(dir)?;
    manifest.seed(Some(args.seed));
    manifest.write_csv(dir, "scaling.csv", &rows)?;
    manifest.write_json(dir, "bench.json", &with_manifest(&serde_json::json!({ "scaling": rows })))?;
    manifest.finish(dir)?;
    Ok(ExitCode::SUCCESS)
}
