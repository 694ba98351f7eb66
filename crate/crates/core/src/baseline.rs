//! Seeded normalized-Gaussian codebooks.
//!
//! Generator: ChaCha20 (`rand_chacha::ChaCha20Rng`, 256-bit key seeded from
//! the u64 seed). Standard normals come from the Box–Muller transform over
//! 53-bit uniforms, consumed in row-major order.

use std::f64::consts::TAU;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::encoder::{Codebook, CodebookMeta, Source};
use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

/// Name of the generator, recorded in reports.
pub const GENERATOR_NAME: &str = "chacha20+box-muller";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.dim == 0 {
            return Err(Error::InvalidDimension(format!(
                "baseline needs n >= 1 and dim >= 1, got n={} dim={}",
                self.n, self.dim
            )));
        }
        Ok(())
    }
}

/// Standard-normal stream over a seeded ChaCha20 generator.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }
}

pub fn generate_gaussian(cfg: &BaselineConfig) -> Result<Codebook> {
    cfg.validate()?;
    let mut stream = GaussianStream::new(cfg.seed);
    let mut rows = Matrix::zeros(cfg.n, cfg.dim);
    for r in 0..cfg.n {
        let row = rows.row_mut(r);
        loop {
            row.iter_mut().for_each(|v| *v = stream.next_normal());
            let n = matrix::norm(row);
            if n > 0.0 {
                row.iter_mut().for_each(|v| *v /= n);
                break;
            }
        }
    }
    Ok(Codebook {
        rows,
        meta: CodebookMeta {
            source: Source::GaussianBaseline,
            n: cfg.n,
            dim: cfg.dim,
            sigma: None,
            seed: Some(cfg.seed),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, n: usize, dim: usize) -> BaselineConfig {
        BaselineConfig { seed, n, dim }
    }

    #[test]
    fn rows_have_unit_norm() {
        let cb = generate_gaussian(&cfg(42, 200, 37)).unwrap();
        for row in cb.rows.rows_iter() {
            assert!((matrix::norm(row) - 1.0).abs() < 1e-12);
        }
        assert_eq!(cb.meta.seed, Some(42));
        assert_eq!(cb.source(), Source::GaussianBaseline);
    }

    #[test]
    fn same_seed_same_codebook() {
        let a = generate_gaussian(&cfg(7, 50, 16)).unwrap();
        let b = generate_gaussian(&cfg(7, 50, 16)).unwrap();
        assert_eq!(a, b);
        let c = generate_gaussian(&cfg(8, 50, 16)).unwrap();
        assert_ne!(a.rows, c.rows);
    }

    #[test]
    fn invalid_config() {
        assert!(generate_gaussian(&cfg(1, 0, 4)).is_err());
        assert!(generate_gaussian(&cfg(1, 4, 0)).is_err());
    }

    #[test]
    fn normal_moments() {
        let mut s = GaussianStream::new(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.next_normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        let kurt = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64 / (var * var);
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
        assert!((kurt - 3.0).abs() < 0.1, "{kurt}");
    }

    #[test]
    fn uniform_range() {
        let mut s = GaussianStream::new(0);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}
