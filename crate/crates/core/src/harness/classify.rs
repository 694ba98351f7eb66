use serde::{Deserialize, Serialize};

use crate::basis::PrimeBasis;
use crate::encoder::{forward_batch, reverse_batch};
use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};
use crate::primes::PrimeTable;
use crate::synth::{self, DatasetKind};

/// Order of the four datasets in every similarity matrix.
pub const VARIANTS: [&str; 4] = ["clean_spiral", "noisy_spiral", "clean_circles", "noisy_circles"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationConfig {
    pub sigmas: Vec<f64>,
    pub d_outs: Vec<usize>,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        ClassificationConfig {
            sigmas: vec![0.007, 0.02, 1.0],
            d_outs: vec![4, 128],
            n: 1000,
            noise: 0.5,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub sigma: f64,
    pub d_out: usize,
    pub labels: [String; 4],
    /// Cosine similarity after subtracting each flattened vector's mean.
    pub centered: [[f64; 4]; 4],
    pub uncentered: [[f64; 4]; 4],
}

impl ClassificationResult {
    /// Centered clean-vs-noisy similarity for (spiral, circles).
    pub fn intra_class(&self) -> [f64; 2] {
        [self.centered[0][1], self.centered[2][3]]
    }

    /// Largest centered similarity between a spiral and a circles variant.
    pub fn max_inter_class(&self) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for a in 0..2 {
            for b in 2..4 {
                m = m.max(self.centered[a][b]);
            }
        }
        m
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (matrix::norm(a), matrix::norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    matrix::dot(a, b) / (na * nb)
}

fn centered(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
    v.iter().map(|x| x - mean).collect()
}

fn similarity_matrix(vectors: &[Vec<f64>; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let s = if a == b && matrix::norm(&vectors[a]) > 0.0 {
                1.0
            } else {
                cosine(&vectors[a], &vectors[b])
            };
            m[a][b] = s;
            m[b][a] = s;
        }
    }
    m
}

fn reconstruct(basis: &PrimeBasis, points: &Matrix) -> Result<Vec<f64>> {
    Ok(reverse_batch(basis, &forward_batch(basis, points)?)?.into_vec())
}

/// Cosine similarities between the flattened reconstructions of clean and
/// noisy spirals and circles, per (σ, D).
pub fn run_classification_study(
    cfg: &ClassificationConfig,
    primes: &mut PrimeTable,
) -> Result<Vec<ClassificationResult>> {
    if cfg.sigmas.is_empty() || cfg.d_outs.is_empty() {
        return Err(Error::InvalidArgument(
            "classification study needs sigmas and dims".into(),
        ));
    }
    let datasets = [
        synth::make(DatasetKind::Spiral, cfg.n, 0.0, cfg.seed)?,
        synth::make(DatasetKind::Spiral, cfg.n, cfg.noise, cfg.seed)?,
        synth::make(DatasetKind::Circles, cfg.n, 0.0, cfg.seed)?,
        synth::make(DatasetKind::Circles, cfg.n, cfg.noise, cfg.seed)?,
    ];
    let mut out = Vec::new();
    for &sigma in &cfg.sigmas {
        for &d_out in &cfg.d_outs {
            let basis = PrimeBasis::build(2, d_out, sigma, primes)?;
            let mut recon: [Vec<f64>; 4] = Default::default();
            for (slot, ds) in recon.iter_mut().zip(&datasets) {
                *slot = reconstruct(&basis, &ds.points)?;
            }
            let uncentered = similarity_matrix(&recon);
            let recon_centered = recon.map(|v| centered(&v));
            out.push(ClassificationResult {
                sigma,
                d_out,
                labels: VARIANTS.map(String::from),
                centered: similarity_matrix(&recon_centered),
                uncentered,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matrices_are_symmetric_with_unit_diagonal() {
        let cfg = ClassificationConfig {
            n: 200,
            ..ClassificationConfig::default()
        };
        let results = run_classification_study(&cfg, &mut PrimeTable::new()).unwrap();
        assert_eq!(results.len(), 6);
        for r in &results {
            for m in [&r.centered, &r.uncentered] {
                for a in 0..4 {
                    assert!((m[a][a] - 1.0).abs() < 1e-12);
                    for b in 0..4 {
                        assert_eq!(m[a][b], m[b][a]);
                        assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&m[a][b]));
                    }
                }
            }
        }
    }

    #[test]
    fn cosine_basics() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 2.0]), 0.0);
        assert!((cosine(&[1.0, 1.0], &[2.0, 2.0]) - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
        assert_eq!(centered(&[1.0, 3.0]), vec![-1.0, 1.0]);
    }
}
