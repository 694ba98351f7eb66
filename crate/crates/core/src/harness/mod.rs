//! Experiment orchestration: coherence grids, Welch populations, σ-regime
//! reconstruction, classification similarity and timing.

pub mod bench;
pub mod bundle;
pub mod checks;
pub mod classify;
pub mod orthogonality;
pub mod regime;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoder::Source;
use crate::error::{Error, Result};

pub use bench::{bench, BenchConfig, BenchRow, BenchTable};
pub use classify::{run_classification_study, ClassificationConfig, ClassificationResult};
pub use orthogonality::{
    run_orthogonality_grid, run_welch_population, OrthogonalityTable, PairedCell, SourcePopulation,
    SourceSummary, WelchPopulation,
};
pub use regime::{run_regime_study, LatentSummary, Regime, RegimeConfig, RegimeResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_values: Vec<usize>,
    pub d_values: Vec<usize>,
    pub sources: Vec<Source>,
    pub seeds: Vec<u64>,
}

impl Default for GridSpec {
    /// Desk-scale grid: N ∈ {500, 1000, 2000}, D ∈ {16, 64, 256}, five seeds.
    fn default() -> Self {
        GridSpec {
            n_values: vec![500, 1000, 2000],
            d_values: vec![16, 64, 256],
            sources: vec![Source::StaticPrime, Source::GaussianBaseline],
            seeds: vec![42, 43, 44, 45, 46],
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.d_values.is_empty() || self.sources.is_empty() {
            return Err(Error::InvalidArgument("grid lists must be nonempty".into()));
        }
        if self.sources.contains(&Source::GaussianBaseline) && self.seeds.is_empty() {
            return Err(Error::InvalidArgument(
                "gaussian cells need at least one seed".into(),
            ));
        }
        if self.sources.contains(&Source::DynamicPrime) {
            return Err(Error::InvalidArgument(
                "grid sources are static_prime and gaussian_baseline".into(),
            ));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!(
                "grid N must be at least 2, got {n}"
            )));
        }
        if self.sources.contains(&Source::StaticPrime) {
            if let Some(&d) = self.d_values.iter().find(|&&d| d == 0 || !d.is_multiple_of(2)) {
                return Err(Error::InvalidDimension(format!(
                    "prime cells need even D >= 2, got {d}"
                )));
            }
        }
        if self.d_values.contains(&0) {
            return Err(Error::InvalidDimension("D must be at least 1".into()));
        }
        Ok(())
    }
}

/// First 16 hex digits of the SHA-256 of the config's JSON form.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&json);
    Ok(hex::encode(&digest[..8]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

pub fn quantiles(values: &[f64]) -> Option<Quantiles> {
    Some(Quantiles {
        p25: quantile(values, 0.25)?,
        p50: quantile(values, 0.5)?,
        p75: quantile(values, 0.75)?,
    })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.5), Some(2.5));
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(quantile(&[], 0.5), None);
        let q = quantiles(&[7.5]).unwrap();
        assert_eq!((q.p25, q.p50, q.p75), (7.5, 7.5, 7.5));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::default().validate().is_ok());
        let mut g = GridSpec {
            d_values: vec![15],
            ..GridSpec::default()
        };
        assert!(g.validate().is_err());
        g.sources = vec![Source::GaussianBaseline];
        assert!(g.validate().is_ok());
        g.seeds.clear();
        assert!(g.validate().is_err());
        let mut g = GridSpec::default();
        g.n_values.clear();
        assert!(g.validate().is_err());
    }

    #[test]
    fn config_hash_is_stable() {
        let a = config_hash(&GridSpec::default()).unwrap();
        assert_eq!(a.len(), 16);
        assert_eq!(a, config_hash(&GridSpec::default()).unwrap());
        let mut g = GridSpec::default();
        g.seeds.push(99);
        assert_ne!(a, config_hash(&g).unwrap());
    }
}
