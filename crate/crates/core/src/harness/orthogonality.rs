use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{config_hash, mean, quantile, quantiles, GridSpec, Quantiles};
use crate::baseline::{generate_gaussian, BaselineConfig};
use crate::basis::StaticBasis;
use crate::encoder::{generate_static, Source};
use crate::error::{Error, Result};
use crate::metrics::{self, GramReport};
use crate::primes::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    source: Source,
    n: usize,
    dim: usize,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub source: Source,
    pub cells: usize,
    pub mean_e_rms: f64,
    pub median_e_rms: f64,
    pub mean_optimality_ratio: Option<f64>,
    pub median_optimality_ratio: Option<f64>,
}

/// Prime cell against the seed-mean of the Gaussian cells of the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedCell {
    pub n: usize,
    pub dim: usize,
    pub prime_e_rms: f64,
    pub gaussian_mean_e_rms: f64,
    pub prime_wins: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityTable {
    pub config_hash: String,
    pub spec: GridSpec,
    /// Sorted by (source, n, dim, seed).
    pub reports: Vec<GramReport>,
    pub summary: Vec<SourceSummary>,
    pub paired: Vec<PairedCell>,
}

impl OrthogonalityTable {
    pub fn summary_for(&self, source: Source) -> Option<&SourceSummary> {
        self.summary.iter().find(|s| s.source == source)
    }

    pub fn reports_for(&self, source: Source) -> impl Iterator<Item = &GramReport> {
        self.reports.iter().filter(move |r| r.source == source)
    }
}

fn cells(spec: &GridSpec, welch_only: bool) -> Vec<CellKey> {
    let mut keys = Vec::new();
    for &source in &spec.sources {
        for &n in &spec.n_values {
            for &dim in &spec.d_values {
                if welch_only && n <= dim {
                    continue;
                }
                if source.is_prime() {
                    keys.push(CellKey {
                        source,
                        n,
                        dim,
                        seed: None,
                    });
                } else {
                    for &seed in &spec.seeds {
                        keys.push(CellKey {
                            source,
                            n,
                            dim,
                            seed: Some(seed),
                        });
                    }
                }
            }
        }
    }
    keys.sort();
    keys.dedup();
    keys
}

fn run_cells(keys: &[CellKey], primes: &mut PrimeTable) -> Result<Vec<GramReport>> {
    let mut static_bases = BTreeMap::new();
    for key in keys.iter().filter(|k| k.source == Source::StaticPrime) {
        if let Entry::Vacant(slot) = static_bases.entry(key.dim) {
            slot.insert(StaticBasis::build(key.dim, primes)?);
        }
    }
    keys.par_iter()
        .map(|key| {
            let codebook = match key.source {
                Source::StaticPrime => generate_static(&static_bases[&key.dim], key.n),
                Source::GaussianBaseline => generate_gaussian(&BaselineConfig {
                    seed: key.seed.expect("gaussian cells carry a seed"),
                    n: key.n,
                    dim: key.dim,
                })?,
                Source::DynamicPrime => unreachable!("rejected by GridSpec::validate"),
            };
            metrics::report(&codebook)
        })
        .collect()
}

fn summarize(reports: &[GramReport], sources: &[Source]) -> Vec<SourceSummary> {
    let mut out = Vec::new();
    let mut sources = sources.to_vec();
    sources.sort();
    sources.dedup();
    for source in sources {
        let rs: Vec<&GramReport> = reports.iter().filter(|r| r.source == source).collect();
        let e: Vec<f64> = rs.iter().map(|r| r.e_rms).collect();
        let ratios: Vec<f64> = rs.iter().filter_map(|r| r.optimality_ratio).collect();
        if e.is_empty() {
            continue;
        }
        out.push(SourceSummary {
            source,
            cells: rs.len(),
            mean_e_rms: mean(&e).unwrap(),
            median_e_rms: quantile(&e, 0.5).unwrap(),
            mean_optimality_ratio: mean(&ratios),
            median_optimality_ratio: quantile(&ratios, 0.5),
        });
    }
    out
}

fn pair(reports: &[GramReport]) -> Vec<PairedCell> {
    let mut gaussian: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.source == Source::GaussianBaseline) {
        gaussian.entry((r.n, r.dim)).or_default().push(r.e_rms);
    }
    let mut out: Vec<PairedCell> = reports
        .iter()
        .filter(|r| r.source == Source::StaticPrime)
        .filter_map(|r| {
            let g = mean(gaussian.get(&(r.n, r.dim))?)?;
            Some(PairedCell {
                n: r.n,
                dim: r.dim,
                prime_e_rms: r.e_rms,
                gaussian_mean_e_rms: g,
                prime_wins: r.e_rms < g,
            })
        })
        .collect();
    out.sort_by_key(|c| (c.n, c.dim));
    out
}

/// One [`GramReport`] per (source, N, D, seed) cell. Prime cells are
/// deterministic and appear once per (N, D) with no seed.
pub fn run_orthogonality_grid(spec: &GridSpec, primes: &mut PrimeTable) -> Result<OrthogonalityTable> {
    spec.validate()?;
    let keys = cells(spec, false);
    let reports = run_cells(&keys, primes)?;
    Ok(OrthogonalityTable {
        config_hash: config_hash(spec)?,
        spec: spec.clone(),
        summary: summarize(&reports, &spec.sources),
        paired: pair(&reports),
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcePopulation {
    pub source: Source,
    /// (n, dim, seed) of each member, aligned with the value arrays.
    pub cells: Vec<(usize, usize, Option<u64>)>,
    pub optimality_ratio: Vec<f64>,
    pub excess_coherence: Vec<f64>,
    pub ratio_quantiles: Quantiles,
    pub excess_quantiles: Quantiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelchPopulation {
    pub config_hash: String,
    pub spec: GridSpec,
    pub populations: Vec<SourcePopulation>,
    /// The underlying reports (valid cells only).
    pub reports: Vec<GramReport>,
}

impl WelchPopulation {
    pub fn for_source(&self, source: Source) -> Option<&SourcePopulation> {
        self.populations.iter().find(|p| p.source == source)
    }

    pub fn from_reports(config_hash: String, spec: GridSpec, reports: Vec<GramReport>) -> Result<Self> {
        let mut by_source: BTreeMap<Source, Vec<&GramReport>> = BTreeMap::new();
        for r in &reports {
            if r.optimality_ratio.is_some() {
                by_source.entry(r.source).or_default().push(r);
            }
        }
        if by_source.is_empty() {
            return Err(Error::EmptyInput("no grid cell has N > D"));
        }
        let populations = by_source
            .into_iter()
            .map(|(source, rs)| {
                let ratio: Vec<f64> = rs.iter().filter_map(|r| r.optimality_ratio).collect();
                let excess: Vec<f64> = rs.iter().filter_map(|r| r.excess_coherence).collect();
                SourcePopulation {
                    source,
                    cells: rs.iter().map(|r| (r.n, r.dim, r.seed)).collect(),
                    ratio_quantiles: quantiles(&ratio).expect("nonempty"),
                    excess_quantiles: quantiles(&excess).expect("nonempty"),
                    optimality_ratio: ratio,
                    excess_coherence: excess,
                }
            })
            .collect();
        Ok(WelchPopulation {
            config_hash,
            spec,
            populations,
            reports,
        })
    }
}

/// Optimality-ratio and excess-coherence populations over the cells with
/// N > D.
pub fn run_welch_population(spec: &GridSpec, primes: &mut PrimeTable) -> Result<WelchPopulation> {
    spec.validate()?;
    let keys = cells(spec, true);
    if keys.is_empty() {
        return Err(Error::EmptyInput("no grid cell has N > D"));
    }
    let reports = run_cells(&keys, primes)?;
    WelchPopulation::from_reports(config_hash(spec)?, spec.clone(), reports)
}
