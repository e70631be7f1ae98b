//! Dense nonnegative similarity matrices built from feature vectors.
//!
//! Distances are turned into similarities by a constant shift,
//! `S[i][j] = beta - cost(i, j)` with `beta` strictly above the largest cost,
//! so every entry is nonnegative and the ordering of costs is reversed
//! but otherwise preserved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How raw scores were derived from features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    NegSqEuclidean,
    NegL1,
    Cosine,
    Dot,
    Raw,
}

impl Metric {
    pub fn to_u8(self) -> u8 {
        match self {
            Metric::NegSqEuclidean => 0,
            Metric::NegL1 => 1,
            Metric::Cosine => 2,
            Metric::Dot => 3,
            Metric::Raw => 4,
        }
    }

    pub fn from_u8(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => Metric::NegSqEuclidean,
            1 => Metric::NegL1,
            2 => Metric::Cosine,
            3 => Metric::Dot,
            4 => Metric::Raw,
            _ => return None,
        })
    }

    /// Dissimilarity between two feature vectors; smaller means closer.
    ///
    /// For similarity-native metrics this is the negated score, which is
    /// enough for nearest-neighbour ordering.
    pub fn cost(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::NegSqEuclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Metric::NegL1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Cosine => -cosine(a, b),
            Metric::Dot | Metric::Raw => -dot(a, b),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg_sq_euclidean" | "sqeuclidean" => Ok(Metric::NegSqEuclidean),
            "neg_l1" | "l1" => Ok(Metric::NegL1),
            "cosine" => Ok(Metric::Cosine),
            "dot" => Ok(Metric::Dot),
            "raw" => Ok(Metric::Raw),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

/// Choice of the shift constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// `beta = max cost + 1`.
    Auto,
    Given(f64),
}

/// Row-major `rows x cols` matrix of nonnegative similarity scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    beta: f64,
    metric: Metric,
}

impl SimilarityMatrix {
    /// Wraps precomputed scores. The metric is recorded as [`Metric::Raw`].
    pub fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_provenance(rows, cols, data, 0.0, Metric::Raw)
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows have different lengths".into()));
        }
        Self::from_raw(m, n, rows.concat())
    }

    pub(crate) fn with_provenance(
        rows: usize,
        cols: usize,
        data: Vec<f64>,
        beta: f64,
        metric: Metric,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("similarity matrix"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidValue { index, value });
        }
        Ok(Self {
            rows,
            cols,
            data,
            beta,
            metric,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Divides every entry by the largest one so scores lie in `[0, 1]`.
    pub fn normalized(&self) -> Self {
        let max = self.max_value();
        let mut out = self.clone();
        if max > 0.0 {
            out.data.iter_mut().for_each(|v| *v /= max);
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b) / (norm(a) * norm(b))
}

fn check_features(features: &[Vec<f64>], what: &'static str) -> Result<usize> {
    let d = features.first().ok_or(Error::Empty(what))?.len();
    if d == 0 {
        return Err(Error::DimensionMismatch(format!("{what} has zero columns")));
    }
    if let Some(r) = features.iter().position(|r| r.len() != d) {
        return Err(Error::DimensionMismatch(format!(
            "{what} row {r} has {} columns, expected {d}",
            features[r].len()
        )));
    }
    Ok(d)
}

/// Builds the similarity matrix between source rows and target rows.
///
/// Distance metrics are shifted by `beta` (auto: largest cost plus one),
/// cosine is mapped to `1 + cos` in `[0, 2]`, and dot products are shifted
/// by `|min| + 1` only when some product is negative.
pub fn build_similarity(
    source: &[Vec<f64>],
    target: &[Vec<f64>],
    metric: Metric,
    beta_mode: BetaMode,
) -> Result<SimilarityMatrix> {
    let d = check_features(source, "source features")?;
    let d_target = check_features(target, "target features")?;
    if d != d_target {
        return Err(Error::DimensionMismatch(format!(
            "source has {d} columns, target has {d_target}"
        )));
    }
    let (m, n) = (source.len(), target.len());

    match metric {
        Metric::NegSqEuclidean | Metric::NegL1 => {
            let costs: Vec<f64> = source
                .iter()
                .flat_map(|x| target.iter().map(move |y| metric.cost(x, y)))
                .collect();
            let max_cost = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let beta = match beta_mode {
                BetaMode::Auto => max_cost + 1.0,
                BetaMode::Given(beta) if beta > max_cost => beta,
                BetaMode::Given(beta) => return Err(Error::BetaTooSmall { beta, max_cost }),
            };
            let data = costs.into_iter().map(|c| beta - c).collect();
            SimilarityMatrix::with_provenance(m, n, data, beta, metric)
        }
        Metric::Cosine => {
            for rows in [source, target] {
                if let Some(row) = rows.iter().position(|r| norm(r) == 0.0) {
                    return Err(Error::ZeroNormRow { row });
                }
            }
            let data = source
                .iter()
                .flat_map(|x| target.iter().map(move |y| (1.0 + cosine(x, y)).clamp(0.0, 2.0)))
                .collect();
            SimilarityMatrix::with_provenance(m, n, data, 1.0, metric)
        }
        Metric::Dot | Metric::Raw => {
            let raw: Vec<f64> = source
                .iter()
                .flat_map(|x| target.iter().map(move |y| dot(x, y)))
                .collect();
            let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let beta = if min < 0.0 { min.abs() + 1.0 } else { 0.0 };
            let data = raw.into_iter().map(|v| v + beta).collect();
            SimilarityMatrix::with_provenance(m, n, data, beta, metric)
        }
    }
}
