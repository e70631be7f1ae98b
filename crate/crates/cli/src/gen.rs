use std::process::ExitCode;

use anyhow::Context;
use clap::Args;
use serde::Serialize;
use uniprot::data::{gen_gaussian_longtail, save_csv, GaussianConfig, SkewSpec};

use crate::output::{ensure_dir, Manifest};
use crate::OutArgs;

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, default_value_t = 10)]
    num_classes: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Source samples per class.
    #[arg(long, default_value_t = 50)]
    per_class_source: usize,
    #[arg(long, default_value_t = 500)]
    target_total: usize,
    /// Skewed target classes as `class:fraction` pairs, e.g. `0:0.05,3:0.05`.
    /// The remaining mass is shared evenly by the other classes.
    #[arg(long, value_delimiter = ',', value_parser = parse_skew)]
    skew: Vec<(usize, f64)>,
    /// Minimum distance between class means.
    #[arg(long, default_value_t = 10.0)]
    cluster_sep: f64,
    /// Per-coordinate standard deviation within a class.
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArgs,
}

fn parse_skew(s: &str) -> Result<(usize, f64), String> {
    let (c, p) = s
        .split_once(':')
        .ok_or_else(|| format!("expected class:fraction, got {s:?}"))?;
    let c = c.trim().parse().map_err(|e| format!("class {c:?}: {e}"))?;
    let p = p.trim().parse().map_err(|e| format!("fraction {p:?}: {e}"))?;
    Ok((c, p))
}

pub fn run(args: &GenArgs, mut manifest: Manifest) -> anyhow::Result<ExitCode> {
    let cfg = GaussianConfig {
        num_classes: args.num_classes,
        dim: args.dim,
        per_class_source: args.per_class_source,
        target_total: args.target_total,
        skew: SkewSpec::new(args.num_classes, args.skew.clone())?,
        cluster_sep: args.cluster_sep,
        noise: args.noise,
        seed: args.seed,
    };
    let (source, target) = gen_gaussian_longtail(&cfg)?;
    let dir = &args.out.out;
    ensure_dir(dir)?;
    save_csv(dir.join("source.csv"), &source).context("writing source.csv")?;
    save_csv(dir.join("target.csv"), &target).context("writing target.csv")?;
    manifest.record("source.csv");
    manifest.record("target.csv");
    manifest.seed(Some(args.seed));
    manifest.finish(dir)?;
    Ok(ExitCode::SUCCESS)
}
