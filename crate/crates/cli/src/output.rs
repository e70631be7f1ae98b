use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub const MANIFEST: &str = "manifest.json";

/// Everything needed to rerun a command: its parsed arguments, the seed,
/// the tool version and the files it wrote.
#[derive(Debug, Serialize)]
pub struct Manifest {
    tool: &'static str,
    version: &'static str,
    argv: Vec<String>,
    config: serde_json::Value,
    threads: Option<usize>,
    seed: Option<u64>,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn new(config: &impl Serialize, threads: Option<usize>) -> Self {
        Self {
            tool: "uniprot",
            version: env!("CARGO_PKG_VERSION"),
            argv: std::env::args().collect(),
            config: serde_json::to_value(config).expect("arguments serialize"),
            threads,
            seed: None,
            outputs: Vec::new(),
        }
    }

    pub fn seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    /// Writes `value` as pretty JSON into `dir` and records it.
    pub fn write_json(&mut self, dir: &Path, name: &str, value: &impl Serialize) -> anyhow::Result<PathBuf> {
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_owned());
        Ok(path)
    }

    /// Writes serializable rows as a CSV table into `dir` and records it.
    /// Every row ends with a `manifest` column naming the manifest file.
    pub fn write_csv<T: Serialize>(&mut self, dir: &Path, name: &str, rows: &[T]) -> anyhow::Result<PathBuf> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing csv")?)?;
        let mut text = String::with_capacity(body.len() + 16 * (rows.len() + 1));
        for (i, line) in body.lines().enumerate() {
            text.push_str(line);
            text.push(',');
            text.push_str(if i == 0 { "manifest" } else { MANIFEST });
            text.push('\n');
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.to_owned());
        Ok(path)
    }

    pub fn record(&mut self, name: &str) {
        self.outputs.push(name.to_owned());
    }

    pub fn finish(mut self, dir: &Path) -> anyhow::Result<()> {
        self.outputs.push(MANIFEST.to_owned());
        let text = serde_json::to_string_pretty(&self)?;
        fs::write(dir.join(MANIFEST), text + "\n").context("writing manifest")?;
        Ok(())
    }
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// JSON payload wrapper that points back at the manifest.
#[derive(Serialize)]
pub struct WithManifest<'a, T: Serialize> {
    pub manifest: &'static str,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn with_manifest<T: Serialize>(body: &T) -> WithManifest<'_, T> {
    WithManifest {
        manifest: MANIFEST,
        body,
    }
}
