use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Args;
use serde::Serialize;
use uniprot::eval::{nn_classify, weight_skew, EvalReport, WeightSkewReport};
use uniprot::selection::Selection;
use uniprot::similarity::Metric;

use crate::output::{ensure_dir, with_manifest, Format, Manifest};
use crate::select::load_dataset;
use crate::OutArgs;

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Labelled source CSV the selection indexes into.
    #[arg(long)]
    source: PathBuf,
    /// Labelled target CSV to classify.
    #[arg(long)]
    target: PathBuf,
    /// `selection.json` written by `select`.
    #[arg(long)]
    selection: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Must match the metric used for selection.
    #[arg(long, default_value = "neg_sq_euclidean")]
    metric: String,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArgs,
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    classification: &'a EvalReport,
    weights: &'a WeightSkewReport,
}

#[derive(Serialize)]
struct ClassRow {
    class: usize,
    target_count: usize,
    prototypes: usize,
    accuracy: Option<f64>,
    minority: bool,
}

pub fn run(args: &EvalArgs, mut manifest: Manifest) -> anyhow::Result<ExitCode> {
    let source = load_dataset(&args.source, &args.label_column)?;
    let target = load_dataset(&args.target, &args.label_column)?;
    let text = std::fs::read_to_string(&args.selection).map_err(|source| uniprot::Error::Io {
        path: args.selection.clone(),
        source,
    })?;
    let selection: Selection = serde_json::from_str(&text).map_err(|e| uniprot::Error::Format {
        path: args.selection.clone(),
        message: e.to_string(),
    })?;
    let metric: Metric = args.metric.parse()?;
    let report = nn_classify(&source, &selection, &target, metric)?;
    let weights = weight_skew(&selection).context("weight skew")?;

    let dir = &args.out.out;
    ensure_dir(dir)?;
    manifest.seed(selection.seed);
    let out = EvalOutput {
        classification: &report,
        weights: &weights,
    };
    manifest.write_json(dir, "eval.json", &with_manifest(&out))?;
    if args.out.format == Format::Csv {
        let rows: Vec<ClassRow> = (0..report.per_class_accuracy.len())
            .map(|c| ClassRow {
                class: c,
                target_count: report.target_class_counts[c],
                prototypes: report.prototype_class_histogram[c],
                accuracy: report.per_class_accuracy[c],
                minority: report.minority_classes.contains(&c),
            })
            .collect();
        manifest.write_csv(dir, "eval.csv", &rows)?;
    }
    manifest.finish(dir)?;
    Ok(ExitCode::SUCCESS)
}
