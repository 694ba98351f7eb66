use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::PrimeBasis;
use crate::encoder::{forward_batch, reverse_batch};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{self, Matrix};
use crate::primes::PrimeTable;
use crate::synth::{Dataset2D, DatasetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// No phase wraps and `D ≥ 2d`: decoding is exact.
    Manifold,
    /// Wrapping or an underdetermined basis.
    Hashing,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Manifold => "manifold",
            Regime::Hashing => "hashing",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    pub sigmas: Vec<f64>,
    pub d_outs: Vec<usize>,
    /// Cells with σ at or below this value claim the manifold regime and
    /// must pass the injectivity check.
    pub manifold_sigma: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig {
            sigmas: vec![0.007, 1.0],
            d_outs: vec![4, 128],
            manifold_sigma: 0.007,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentSummary {
    pub norms: Vec<f64>,
    pub labels: Vec<u8>,
    /// Projection onto the top two principal axes, one pair per point.
    pub principal_components: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeResult {
    pub dataset: DatasetKind,
    pub noise: f64,
    pub sigma: f64,
    pub d_out: usize,
    pub regime: Regime,
    pub injectivity_radius: f64,
    pub max_abs_input: f64,
    pub recon_mse: f64,
    /// Mean latent cosine similarity over same-label pairs.
    pub intra_class_sim: f64,
    /// Mean latent cosine similarity over cross-label pairs.
    pub inter_class_sim: f64,
    pub latent: LatentSummary,
}

fn class_similarities(latent: &Matrix, labels: &[u8]) -> (f64, f64) {
    let n = latent.nrows();
    let norms: Vec<f64> = latent.rows_iter().map(matrix::norm).collect();
    let partials: Vec<(f64, u64, f64, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut same, mut n_same, mut cross, mut n_cross) = (0.0, 0u64, 0.0, 0u64);
            for j in (i + 1)..n {
                let s = matrix::dot(latent.row(i), latent.row(j)) / (norms[i] * norms[j]);
                if labels[i] == labels[j] {
                    same += s;
                    n_same += 1;
                } else {
                    cross += s;
                    n_cross += 1;
                }
            }
            (same, n_same, cross, n_cross)
        })
        .collect();
    let (mut same, mut n_same, mut cross, mut n_cross) = (0.0, 0u64, 0.0, 0u64);
    for p in partials {
        same += p.0;
        n_same += p.1;
        cross += p.2;
        n_cross += p.3;
    }
    let avg = |s: f64, c: u64| if c == 0 { 0.0 } else { s / c as f64 };
    (avg(same, n_same), avg(cross, n_cross))
}

pub fn mse(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.as_slice().len().max(1) as f64;
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n
}

/// Encodes each dataset under each (σ, D), decodes it back, and records the
/// reconstruction error together with a latent summary.
pub fn run_regime_study(
    datasets: &[Dataset2D],
    cfg: &RegimeConfig,
    primes: &mut PrimeTable,
) -> Result<Vec<RegimeResult>> {
    if datasets.is_empty() || cfg.sigmas.is_empty() || cfg.d_outs.is_empty() {
        return Err(Error::InvalidArgument(
            "regime study needs datasets, sigmas and dims".into(),
        ));
    }
    let mut results = Vec::new();
    for ds in datasets {
        for &sigma in &cfg.sigmas {
            for &d_out in &cfg.d_outs {
                let basis = PrimeBasis::build(ds.points.ncols(), d_out, sigma, primes)?;
                let radius = basis.injectivity_radius();
                let max_abs = ds.max_abs();
                let regime = if basis.is_overdetermined() && max_abs < radius {
                    Regime::Manifold
                } else {
                    Regime::Hashing
                };
                if sigma <= cfg.manifold_sigma && regime != Regime::Manifold {
                    return Err(Error::InjectivityViolation(format!(
                        "{} (noise {}) at sigma={sigma}, D={d_out}: max |x| = {max_abs:.6} but radius = {radius:.6}{}",
                        ds.kind,
                        ds.noise,
                        if basis.is_overdetermined() { "" } else { " and D < 2d" }
                    )));
                }
                let latent = forward_batch(&basis, &ds.points)?;
                let recon = reverse_batch(&basis, &latent)?;
                let (intra, inter) = class_similarities(&latent, &ds.labels);
                let pcs = linalg::principal_components(&latent, 2)?;
                results.push(RegimeResult {
                    dataset: ds.kind,
                    noise: ds.noise,
                    sigma,
                    d_out,
                    regime,
                    injectivity_radius: radius,
                    max_abs_input: max_abs,
                    recon_mse: mse(&recon, &ds.points),
                    intra_class_sim: intra,
                    inter_class_sim: inter,
                    latent: LatentSummary {
                        norms: latent.rows_iter().map(matrix::norm).collect(),
                        labels: ds.labels.clone(),
                        principal_components: pcs.rows_iter().map(|r| [r[0], r[1]]).collect(),
                    },
                });
            }
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{make_circles, make_spiral};

    #[test]
    fn spiral_regimes() {
        let ds = make_spiral(400, 0.0, 42).unwrap();
        let results = run_regime_study(&[ds], &RegimeConfig::default(), &mut PrimeTable::new()).unwrap();
        assert_eq!(results.len(), 4);
        let cell = |s: f64, d: usize| results.iter().find(|r| r.sigma == s && r.d_out == d).unwrap();
        let low = cell(0.007, 128);
        let high = cell(1.0, 4);
        assert_eq!(low.regime, Regime::Manifold);
        assert_eq!(high.regime, Regime::Hashing);
        assert!(low.recon_mse < 1e-8);
        assert!(high.recon_mse >= 1e3 * low.recon_mse);
        for r in results.iter().filter(|r| r.d_out == 128) {
            assert!(r.latent.norms.iter().all(|n| (n - 8.0).abs() < 1e-9));
            assert_eq!(r.latent.principal_components.len(), 400);
            assert!((-1.0..=1.0).contains(&r.intra_class_sim));
            assert!((-1.0..=1.0).contains(&r.inter_class_sim));
        }
    }

    #[test]
    fn manifold_claim_is_checked() {
        // circles with heavy noise leave the injectivity radius at sigma=0.007, D=128
        let ds = make_circles(200, 1.5, 1).unwrap();
        let cfg = RegimeConfig {
            sigmas: vec![0.007],
            d_outs: vec![128],
            manifold_sigma: 0.007,
        };
        let err = run_regime_study(std::slice::from_ref(&ds), &cfg, &mut PrimeTable::new()).unwrap_err();
        assert!(matches!(err, Error::InjectivityViolation(_)));
        // the same cell without a claim is simply flagged as hashing
        let cfg = RegimeConfig {
            manifold_sigma: 0.0,
            ..cfg
        };
        let r = run_regime_study(&[ds], &cfg, &mut PrimeTable::new()).unwrap();
        assert_eq!(r[0].regime, Regime::Hashing);
    }

    #[test]
    fn class_similarity_of_identical_rows() {
        let latent = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (intra, inter) = class_similarities(&latent, &[0, 0, 1]);
        assert_eq!(intra, 1.0);
        assert_eq!(inter, 0.0);
    }
}
