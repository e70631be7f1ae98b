use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Dataset, SkewSpec};
use crate::error::{Error, Result};

/// Parameters of the Gaussian-mixture long-tail generator.
///
/// Each class is an isotropic Gaussian with standard deviation `noise`
/// around a mean; means are at least `cluster_sep` apart. The source is
/// balanced, the target follows `skew`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianConfig {
    pub num_classes: usize,
    pub dim: usize,
    pub per_class_source: usize,
    pub target_total: usize,
    pub skew: SkewSpec,
    pub cluster_sep: f64,
    pub noise: f64,
    pub seed: u64,
}

impl GaussianConfig {
    pub fn new(num_classes: usize, dim: usize, per_class_source: usize, target_total: usize) -> Self {
        Self {
            num_classes,
            dim,
            per_class_source,
            target_total,
            skew: SkewSpec::uniform(num_classes),
            cluster_sep: 10.0,
            noise: 1.0,
            seed: 0,
        }
    }
}

/// Splits `total` by `fractions`: floors first, then one extra sample to
/// each of the largest fractional parts (lower class first on ties).
pub fn target_counts(fractions: &[f64], total: usize) -> Vec<usize> {
    let raw: Vec<f64> = fractions.iter().map(|p| p * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| (raw[b] - raw[b].floor()).total_cmp(&(raw[a] - raw[a].floor())));
    for &c in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[c] += 1;
    }
    counts
}

fn class_means(cfg: &GaussianConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let c = cfg.num_classes;
    let mut radius = cfg.cluster_sep * (c as f64).powf(1.0 / cfg.dim as f64);
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(c);
    let mut misses = 0;
    while means.len() < c {
        let cand: Vec<f64> = (0..cfg.dim).map(|_| rng.random_range(-radius..=radius)).collect();
        let far = means.iter().all(|m| {
            m.iter().zip(&cand).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= cfg.cluster_sep
        });
        if far {
            means.push(cand);
            misses = 0;
        } else {
            misses += 1;
            if misses == 1000 {
                radius *= 1.1;
                misses = 0;
            }
        }
    }
    means
}

fn draw(
    means: &[Vec<f64>],
    counts: &[usize],
    noise: &Normal<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    let mut rows: Vec<(Vec<f64>, usize)> = Vec::with_capacity(counts.iter().sum());
    for (class, (&count, mean)) in counts.iter().zip(means).enumerate() {
        for _ in 0..count {
            rows.push((mean.iter().map(|mu| mu + noise.sample(rng)).collect(), class));
        }
    }
    rows.shuffle(rng);
    let (features, labels): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let mut d = Dataset::new(features, Some(labels))?;
    d.class_counts = counts.to_vec();
    Ok(d)
}

/// Balanced source and skewed target drawn from the same class Gaussians.
///
/// Everything is derived from one ChaCha8 stream seeded with `cfg.seed`:
/// class means, then the source samples, then the target samples.
pub fn gen_gaussian_longtail(cfg: &GaussianConfig) -> Result<(Dataset, Dataset)> {
    if cfg.skew.num_classes != cfg.num_classes {
        return Err(Error::InfeasibleSkew(format!(
            "skew describes {} classes, generator has {}",
            cfg.skew.num_classes, cfg.num_classes
        )));
    }
    let fractions = cfg.skew.fractions()?;
    if cfg.dim == 0 || cfg.per_class_source == 0 || cfg.target_total == 0 {
        return Err(Error::InvalidConfig(
            "dim, per_class_source and target_total must be positive".into(),
        ));
    }
    if !(cfg.cluster_sep > 0.0 && cfg.cluster_sep.is_finite()) {
        return Err(Error::InvalidConfig(format!("cluster_sep must be positive, got {}", cfg.cluster_sep)));
    }
    let noise = Normal::new(0.0, cfg.noise)
        .map_err(|e| Error::InvalidConfig(format!("noise {}: {e}", cfg.noise)))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let means = class_means(cfg, &mut rng);
    let source = draw(&means, &vec![cfg.per_class_source; cfg.num_classes], &noise, &mut rng)?;
    let target = draw(&means, &target_counts(&fractions, cfg.target_total), &noise, &mut rng)?;
    Ok((source, target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_exact() {
        assert_eq!(target_counts(&[0.9, 0.1], 100), vec![90, 10]);
        assert_eq!(target_counts(&[1.0 / 3.0; 3], 100), vec![34, 33, 33]);
        let c = target_counts(&[0.05, 0.05, 0.3, 0.3, 0.3], 37);
        assert_eq!(c.iter().sum::<usize>(), 37);
    }

    #[test]
    fn deterministic_and_skewed() {
        let mut cfg = GaussianConfig::new(2, 3, 20, 50);
        cfg.skew = SkewSpec::new(2, vec![(0, 0.9)]).unwrap();
        cfg.seed = 7;
        let (s1, t1) = gen_gaussian_longtail(&cfg).unwrap();
        let (s2, t2) = gen_gaussian_longtail(&cfg).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(t1, t2);
        assert_eq!(s1.class_counts, vec![20, 20]);
        assert_eq!(t1.class_counts, vec![45, 5]);
        assert_eq!(t1.dim(), 3);
    }

    #[test]
    fn means_respect_separation() {
        let cfg = GaussianConfig::new(10, 2, 1, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let means = class_means(&cfg, &mut rng);
        for a in 0..10 {
            for b in a + 1..10 {
                let d: f64 = means[a].iter().zip(&means[b]).map(|(x, y)| (x - y).powi(2)).sum();
                assert!(d.sqrt() >= 10.0);
            }
        }
    }

    #[test]
    fn rejects_mismatched_skew() {
        let mut cfg = GaussianConfig::new(3, 2, 5, 10);
        cfg.skew = SkewSpec::uniform(2);
        assert!(matches!(gen_gaussian_longtail(&cfg), Err(Error::InfeasibleSkew(_))));
    }
}
