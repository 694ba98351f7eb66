//! Report bundle layout:
//!
//! ```text
//! <dir>/config.json            run parameters and config hash
//! <dir>/reports.csv            one row per cell
//! <dir>/population_<src>.csv   per-source Welch populations (grid runs)
//! <dir>/plots/*.svg
//! ```

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::bench::BenchTable;
use super::classify::{ClassificationConfig, ClassificationResult};
use super::orthogonality::{OrthogonalityTable, SourcePopulation, WelchPopulation};
use super::regime::{RegimeConfig, RegimeResult};
use super::{config_hash, mean, GridSpec};
use crate::baseline::GENERATOR_NAME;
use crate::encoder::Source;
use crate::error::Result;
use crate::metrics::{bin_center, fmt_f64, log_density, GramReport, HISTOGRAM_BINS};
use crate::plot::{self, Series};

#[derive(Serialize)]
struct BundleConfig<'a, T: Serialize> {
    experiment: &'a str,
    config_hash: String,
    generator: &'a str,
    config: &'a T,
}

fn write_config<T: Serialize>(dir: &Path, experiment: &str, config: &T) -> Result<String> {
    fs::create_dir_all(dir.join("plots"))?;
    let hash = config_hash(config)?;
    let body = BundleConfig {
        experiment,
        config_hash: hash.clone(),
        generator: GENERATOR_NAME,
        config,
    };
    fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&body)? + "\n",
    )?;
    Ok(hash)
}

fn write_plot(dir: &Path, name: &str, svg: String) -> Result<()> {
    fs::write(dir.join("plots").join(name), svg)?;
    Ok(())
}

fn write_gram_reports(path: &Path, hash: &str, reports: &[GramReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["config_hash"];
    header.extend(GramReport::CSV_HEADER);
    w.write_record(&header)?;
    for r in reports {
        let mut rec = vec![hash.to_string()];
        rec.extend(r.csv_record());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_populations(dir: &Path, hash: &str, reports: &[GramReport]) -> Result<()> {
    let mut sources: Vec<Source> = reports.iter().map(|r| r.source).collect();
    sources.sort();
    sources.dedup();
    for source in sources {
        let mut w = csv::Writer::from_path(dir.join(format!("population_{source}.csv")))?;
        w.write_record([
            "config_hash",
            "n",
            "dim",
            "seed",
            "optimality_ratio",
            "excess_coherence",
        ])?;
        for r in reports.iter().filter(|r| r.source == source) {
            if let (Some(ratio), Some(excess)) = (r.optimality_ratio, r.excess_coherence) {
                w.write_record([
                    hash.to_string(),
                    r.n.to_string(),
                    r.dim.to_string(),
                    r.seed.map(|s| s.to_string()).unwrap_or_default(),
                    fmt_f64(ratio),
                    fmt_f64(excess),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn rms_heatmaps(dir: &Path, spec: &GridSpec, reports: &[GramReport]) -> Result<()> {
    let x_ticks: Vec<String> = spec.d_values.iter().map(|d| d.to_string()).collect();
    let y_ticks: Vec<String> = spec.n_values.iter().map(|n| n.to_string()).collect();
    let mut sources: Vec<Source> = reports.iter().map(|r| r.source).collect();
    sources.sort();
    sources.dedup();
    for source in sources {
        let values: Vec<Vec<Option<f64>>> = spec
            .n_values
            .iter()
            .map(|&n| {
                spec.d_values
                    .iter()
                    .map(|&d| {
                        let e: Vec<f64> = reports
                            .iter()
                            .filter(|r| r.source == source && r.n == n && r.dim == d)
                            .map(|r| r.e_rms)
                            .collect();
                        mean(&e)
                    })
                    .collect()
            })
            .collect();
        let svg = plot::heatmap(
            &format!("E_RMS ({source})"),
            "D",
            "N",
            &x_ticks,
            &y_ticks,
            &values,
        );
        write_plot(dir, &format!("rms_{source}.svg"), svg)?;
    }
    Ok(())
}

fn density_plots(dir: &Path, spec: &GridSpec, reports: &[GramReport]) -> Result<()> {
    let width = 2.0 / HISTOGRAM_BINS as f64;
    for &n in &spec.n_values {
        for &d in &spec.d_values {
            // first report per source for this cell (lowest seed for gaussian)
            let mut series = Vec::new();
            for source in [Source::StaticPrime, Source::GaussianBaseline] {
                if let Some(r) = reports
                    .iter()
                    .find(|r| r.source == source && r.n == n && r.dim == d)
                {
                    let ld = log_density(&r.histogram);
                    series.push(Series {
                        name: source.as_str(),
                        bins: ld
                            .iter()
                            .enumerate()
                            .map(|(i, &v)| (bin_center(i) - width / 2.0, v))
                            .collect(),
                        right_edge: 1.0,
                    });
                }
            }
            if !series.is_empty() {
                let svg = plot::step_histogram(
                    &format!("log-density of similarities, N={n}, D={d}"),
                    "cosine similarity",
                    "log10 density",
                    &series,
                );
                write_plot(dir, &format!("density_N{n}_D{d}.svg"), svg)?;
            }
        }
    }
    Ok(())
}

pub fn write_orthogonality(dir: &Path, table: &OrthogonalityTable) -> Result<()> {
    let hash = write_config(dir, "orthogonality", &table.spec)?;
    write_gram_reports(&dir.join("reports.csv"), &hash, &table.reports)?;
    write_populations(dir, &hash, &table.reports)?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "config_hash": hash,
            "summary": table.summary,
            "paired": table.paired,
        }))? + "\n",
    )?;
    rms_heatmaps(dir, &table.spec, &table.reports)?;
    density_plots(dir, &table.spec, &table.reports)?;
    Ok(())
}

fn population_histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = values.len().max(1) as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * width, c as f64 / (total * width)))
        .collect()
}

pub fn write_welch(dir: &Path, pop: &WelchPopulation) -> Result<()> {
    let hash = write_config(dir, "welch", &pop.spec)?;
    write_gram_reports(&dir.join("reports.csv"), &hash, &pop.reports)?;
    write_populations(dir, &hash, &pop.reports)?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&serde_json::json!({
            "config_hash": hash,
            "quantiles": pop.populations.iter().map(|p| serde_json::json!({
                "source": p.source,
                "cells": p.optimality_ratio.len(),
                "optimality_ratio": p.ratio_quantiles,
                "excess_coherence": p.excess_quantiles,
            })).collect::<Vec<_>>(),
        }))? + "\n",
    )?;
    for (name, label) in [
        ("optimality_ratio", "mu_max / welch"),
        ("excess_coherence", "mu_max - welch"),
    ] {
        let pick = |p: &SourcePopulation| -> Vec<f64> {
            if name == "optimality_ratio" {
                p.optimality_ratio.clone()
            } else {
                p.excess_coherence.clone()
            }
        };
        // the ideal (ratio 1, excess 0) is always inside the plotted range
        let ideal = if name == "optimality_ratio" { 1.0 } else { 0.0 };
        let all: Vec<f64> = pop.populations.iter().flat_map(pick).collect();
        let lo = all.iter().cloned().fold(ideal, f64::min);
        let hi = all.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let series: Vec<Series> = pop
            .populations
            .iter()
            .map(|p| Series {
                name: p.source.as_str(),
                bins: population_histogram(&pick(p), lo, hi, 20),
                right_edge: hi,
            })
            .collect();
        let svg = plot::step_histogram(&format!("{name} population"), label, "density", &series);
        write_plot(dir, &format!("{name}.svg"), svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct RegimeRunConfig<'a> {
    pub study: &'a RegimeConfig,
    pub datasets: Vec<DatasetParams>,
}

#[derive(Serialize)]
pub struct DatasetParams {
    pub kind: String,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
}

pub fn write_regimes(dir: &Path, config: &RegimeRunConfig<'_>, results: &[RegimeResult]) -> Result<()> {
    let hash = write_config(dir, "regimes", config)?;
    let mut w = csv::Writer::from_path(dir.join("reports.csv"))?;
    w.write_record([
        "config_hash",
        "dataset",
        "noise",
        "sigma",
        "d_out",
        "regime",
        "injectivity_radius",
        "max_abs_input",
        "recon_mse",
        "intra_class_sim",
        "inter_class_sim",
    ])?;
    for r in results {
        w.write_record([
            hash.clone(),
            r.dataset.to_string(),
            fmt_f64(r.noise),
            fmt_f64(r.sigma),
            r.d_out.to_string(),
            r.regime.as_str().to_string(),
            fmt_f64(r.injectivity_radius),
            fmt_f64(r.max_abs_input),
            fmt_f64(r.recon_mse),
            fmt_f64(r.intra_class_sim),
            fmt_f64(r.inter_class_sim),
        ])?;
    }
    w.flush()?;
    for r in results {
        let svg = plot::scatter(
            &format!(
                "latent PCA: {} noise={} sigma={} D={} ({})",
                r.dataset,
                r.noise,
                r.sigma,
                r.d_out,
                r.regime.as_str()
            ),
            "pc1",
            "pc2",
            &r.latent.principal_components,
            &r.latent.labels,
        );
        write_plot(
            dir,
            &format!(
                "latent_{}_noise{}_sigma{}_D{}.svg",
                r.dataset, r.noise, r.sigma, r.d_out
            ),
            svg,
        )?;
    }
    Ok(())
}

pub fn write_classification(
    dir: &Path,
    config: &ClassificationConfig,
    results: &[ClassificationResult],
) -> Result<()> {
    let hash = write_config(dir, "classify", config)?;
    let mut w = csv::Writer::from_path(dir.join("reports.csv"))?;
    w.write_record([
        "config_hash",
        "sigma",
        "d_out",
        "centering",
        "a",
        "b",
        "similarity",
    ])?;
    for r in results {
        for (centering, m) in [("centered", &r.centered), ("uncentered", &r.uncentered)] {
            for (a, row) in m.iter().enumerate() {
                for (b, &v) in row.iter().enumerate() {
                    w.write_record([
                        hash.clone(),
                        fmt_f64(r.sigma),
                        r.d_out.to_string(),
                        centering.to_string(),
                        r.labels[a].clone(),
                        r.labels[b].clone(),
                        fmt_f64(v),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    for r in results {
        let ticks: Vec<String> = r.labels.to_vec();
        let values: Vec<Vec<Option<f64>>> = r
            .centered
            .iter()
            .rev()
            .map(|row| row.iter().map(|&v| Some(v)).collect())
            .collect();
        let y_ticks: Vec<String> = ticks.iter().rev().cloned().collect();
        let svg = plot::heatmap(
            &format!("centered cosine similarity, s={}, D={}", r.sigma, r.d_out),
            "",
            "",
            &ticks,
            &y_ticks,
            &values,
        );
        write_plot(dir, &format!("classify_s{}_D{}.svg", r.sigma, r.d_out), svg)?;
    }
    Ok(())
}

pub fn write_bench(dir: &Path, table: &BenchTable) -> Result<()> {
    let hash = write_config(dir, "bench", &table.config)?;
    let mut w = csv::Writer::from_path(dir.join("reports.csv"))?;
    w.write_record([
        "config_hash",
        "op",
        "n",
        "d_in",
        "d_out",
        "median_secs",
        "ratio_to_previous",
    ])?;
    for r in &table.rows {
        w.write_record([
            hash.clone(),
            r.op.clone(),
            r.n.to_string(),
            r.d_in.to_string(),
            r.d_out.to_string(),
            fmt_f64(r.median_secs),
            r.ratio_to_previous.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
