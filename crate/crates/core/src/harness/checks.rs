//! Pass/fail assertions over experiment outputs, shared by `eval --check`
//! and the acceptance tests.

use serde::{Deserialize, Serialize};

use super::bench::{BenchTable, OP_DYNAMIC_FORWARD, OP_STATIC_GENERATE, OP_STATIC_INIT};
use super::classify::ClassificationResult;
use super::orthogonality::{OrthogonalityTable, WelchPopulation};
use super::regime::{Regime, RegimeResult};
use crate::encoder::Source;
use crate::metrics::GramReport;

pub const WELCH_SLACK: f64 = 1e-12;
pub const MANIFOLD_MSE_MAX: f64 = 1e-8;
pub const HASHING_MSE_FACTOR: f64 = 1e3;
pub const TORUS_NORM_TOL: f64 = 1e-9;
/// Prime must beat the Gaussian seed-mean in at least this share of cells (7 of 9).
pub const PRIME_WIN_FRACTION: f64 = 7.0 / 9.0;
pub const GAUSSIAN_RATIO_FACTOR: f64 = 2.0;
pub const SCALING_BAND: (f64, f64) = (1.5, 3.0);
pub const INIT_GROWTH_MAX: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}

/// `mu_max >= welch - 1e-12` for every report where the bound is defined.
pub fn check_welch_lower_bound<'a>(reports: impl IntoIterator<Item = &'a GramReport>) -> CheckOutcome {
    let mut checked = 0;
    let mut worst: Option<(f64, usize, usize, Source)> = None;
    for r in reports {
        if let Some(w) = r.welch {
            checked += 1;
            let gap = r.mu_max - w;
            if worst.is_none_or(|(g, ..)| gap < g) {
                worst = Some((gap, r.n, r.dim, r.source));
            }
        }
    }
    let passed = worst.is_none_or(|(g, ..)| g >= -WELCH_SLACK);
    let detail = match worst {
        Some((g, n, d, s)) => {
            format!("{checked} reports; smallest mu_max - welch = {g:.3e} ({s}, N={n}, D={d})")
        }
        None => "no report with N > D".into(),
    };
    CheckOutcome::new("welch lower bound", passed, detail)
}

pub fn check_orthogonality(table: &OrthogonalityTable) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let prime = table.summary_for(Source::StaticPrime);
    let gauss = table.summary_for(Source::GaussianBaseline);
    match (prime, gauss) {
        (Some(p), Some(g)) => {
            out.push(CheckOutcome::new(
                "grid-mean e_rms ordering",
                p.mean_e_rms < g.mean_e_rms,
                format!("prime {:.6} vs gaussian {:.6}", p.mean_e_rms, g.mean_e_rms),
            ));
            let wins = table.paired.iter().filter(|c| c.prime_wins).count();
            let cells = table.paired.len();
            let needed = (PRIME_WIN_FRACTION * cells as f64 - 1e-9).ceil() as usize;
            out.push(CheckOutcome::new(
                "per-cell prime wins",
                cells > 0 && wins >= needed,
                format!("{wins} of {cells} cells (need {needed})"),
            ));
        }
        _ => out.push(CheckOutcome::new(
            "grid-mean e_rms ordering",
            false,
            "grid must contain both sources".into(),
        )),
    }
    out.push(check_welch_lower_bound(&table.reports));
    out
}

pub fn check_welch(pop: &WelchPopulation) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let (Some(p), Some(g)) = (
        pop.for_source(Source::StaticPrime),
        pop.for_source(Source::GaussianBaseline),
    ) else {
        out.push(CheckOutcome::new(
            "median optimality ratio ordering",
            false,
            "population must contain both sources".into(),
        ));
        return out;
    };
    let (pr, gr) = (p.ratio_quantiles.p50, g.ratio_quantiles.p50);
    out.push(CheckOutcome::new(
        "median optimality ratio ordering",
        pr < gr,
        format!("prime {pr:.4} vs gaussian {gr:.4}"),
    ));
    out.push(CheckOutcome::new(
        "gaussian median ratio > 2x prime",
        gr > GAUSSIAN_RATIO_FACTOR * pr,
        format!("gaussian/prime = {:.4} (need > {GAUSSIAN_RATIO_FACTOR})", gr / pr),
    ));
    let (pe, ge) = (p.excess_quantiles.p50, g.excess_quantiles.p50);
    out.push(CheckOutcome::new(
        "median excess coherence ordering",
        pe < ge,
        format!("prime {pe:.4} vs gaussian {ge:.4}"),
    ));
    out.push(check_welch_lower_bound(&pop.reports));
    out
}

/// For every noiseless dataset present: the (σ_high, D_low) cell fails to
/// reconstruct by at least 10³× the (σ_low, D_high) cell. Manifold cells
/// reconstruct below 1e-8 and every latent row sits on the torus.
pub fn check_regimes(results: &[RegimeResult], low: (f64, usize), high: (f64, usize)) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut kinds: Vec<_> = results
        .iter()
        .filter(|r| r.noise == 0.0)
        .map(|r| r.dataset)
        .collect();
    kinds.sort();
    kinds.dedup();
    for kind in kinds {
        let find = |(s, d): (f64, usize)| {
            results
                .iter()
                .find(|r| r.dataset == kind && r.noise == 0.0 && r.sigma == s && r.d_out == d)
        };
        let name = format!("{kind} hashing/manifold mse ratio");
        match (find(low), find(high)) {
            (Some(lo), Some(hi)) => {
                let passed = hi.recon_mse >= HASHING_MSE_FACTOR * lo.recon_mse;
                out.push(CheckOutcome::new(
                    &name,
                    passed,
                    format!(
                        "mse(sigma={}, D={}) = {:.3e}, mse(sigma={}, D={}) = {:.3e}",
                        high.0, high.1, hi.recon_mse, low.0, low.1, lo.recon_mse
                    ),
                ));
            }
            _ => out.push(CheckOutcome::new(&name, false, "required cells missing".into())),
        }
    }
    let manifold: Vec<&RegimeResult> = results.iter().filter(|r| r.regime == Regime::Manifold).collect();
    let worst = manifold.iter().map(|r| r.recon_mse).fold(0.0, f64::max);
    out.push(CheckOutcome::new(
        "manifold reconstruction",
        worst < MANIFOLD_MSE_MAX,
        format!("{} manifold cells, worst mse {worst:.3e}", manifold.len()),
    ));
    let mut worst_norm: f64 = 0.0;
    for r in results {
        let expected = (r.d_out as f64 / 2.0).sqrt();
        for n in &r.latent.norms {
            worst_norm = worst_norm.max((n - expected).abs());
        }
    }
    out.push(CheckOutcome::new(
        "latent torus norm",
        worst_norm < TORUS_NORM_TOL,
        format!("max | |z| - sqrt(D/2) | = {worst_norm:.3e}"),
    ));
    out
}

pub fn check_classification(
    results: &[ClassificationResult],
    d_out: usize,
    linear_sigmas: &[f64],
    full_sigma: f64,
) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let find = |s: f64| results.iter().find(|r| r.sigma == s && r.d_out == d_out);
    for &s in linear_sigmas {
        let name = format!("intra > inter at s={s}, D={d_out}");
        match find(s) {
            Some(r) => {
                let intra = r.intra_class();
                let inter = r.max_inter_class();
                out.push(CheckOutcome::new(
                    &name,
                    intra[0] > inter && intra[1] > inter,
                    format!(
                        "intra spiral {:.4}, circles {:.4}; max inter {inter:.4}",
                        intra[0], intra[1]
                    ),
                ));
            }
            None => out.push(CheckOutcome::new(&name, false, "cell missing".into())),
        }
    }
    let name = format!(
        "intra(s={}) >= intra(s={full_sigma}) at D={d_out}",
        linear_sigmas.first().copied().unwrap_or(f64::NAN)
    );
    match (linear_sigmas.first().and_then(|&s| find(s)), find(full_sigma)) {
        (Some(lin), Some(full)) => {
            let (a, b) = (lin.intra_class(), full.intra_class());
            out.push(CheckOutcome::new(
                &name,
                a[0] >= b[0] && a[1] >= b[1],
                format!(
                    "spiral {:.4} vs {:.4}; circles {:.4} vs {:.4}",
                    a[0], b[0], a[1], b[1]
                ),
            ));
        }
        _ => out.push(CheckOutcome::new(&name, false, "cells missing".into())),
    }
    out
}

fn band_check(table: &BenchTable, op: &str) -> CheckOutcome {
    let rows: Vec<_> = table.op_rows(op).collect();
    let mut ratios = Vec::new();
    let mut passed = rows.len() >= 2;
    for pair in rows.windows(2) {
        let size_ratio = if op == OP_DYNAMIC_FORWARD {
            pair[1].d_out as f64 / pair[0].d_out as f64
        } else {
            pair[1].n as f64 / pair[0].n as f64
        };
        // only exact doublings are held to the band
        if (size_ratio - 2.0).abs() > 1e-9 {
            continue;
        }
        let r = pair[1].median_secs / pair[0].median_secs;
        passed &= (SCALING_BAND.0..=SCALING_BAND.1).contains(&r);
        ratios.push(format!("{r:.3}"));
    }
    passed &= !ratios.is_empty();
    CheckOutcome::new(
        &format!("{op} doubling band"),
        passed,
        format!("ratios [{}] (band {:?})", ratios.join(", "), SCALING_BAND),
    )
}

pub fn check_bench(table: &BenchTable) -> Vec<CheckOutcome> {
    let mut out = vec![
        band_check(table, OP_STATIC_GENERATE),
        band_check(table, OP_DYNAMIC_FORWARD),
    ];
    let init: Vec<f64> = table.op_rows(OP_STATIC_INIT).map(|r| r.median_secs).collect();
    let lo = init.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = init.iter().cloned().fold(0.0, f64::max);
    let growth = hi / lo;
    out.push(CheckOutcome::new(
        "static init independent of N",
        !init.is_empty() && growth < INIT_GROWTH_MAX,
        format!("max/min over N sweep = {growth:.3}"),
    ));
    out
}
