//! Gram-matrix coherence statistics and Welch-bound comparisons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoder::{Codebook, Source};
use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

/// Number of histogram bins over `[-1, 1]`; odd so one bin is centred on 0.
pub const HISTOGRAM_BINS: usize = 201;

/// Largest codebook a single report will process.
pub const MAX_REPORT_ROWS: usize = 20_000;

const NORM_TOLERANCE: f64 = 1e-6;

/// Floor added before taking log10 of a density.
pub const LOG_DENSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub source: Source,
    pub n: usize,
    pub dim: usize,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub e_rms: f64,
    pub mu_max: f64,
    pub welch: Option<f64>,
    pub optimality_ratio: Option<f64>,
    pub excess_coherence: Option<f64>,
    pub mean_offdiag: f64,
    pub histogram: Vec<u64>,
}

impl GramReport {
    pub const CSV_HEADER: [&'static str; 11] = [
        "source",
        "n",
        "dim",
        "sigma",
        "seed",
        "e_rms",
        "mu_max",
        "welch",
        "optimality_ratio",
        "excess_coherence",
        "mean_offdiag",
    ];

    /// One CSV record (histogram omitted; it is carried by the JSON form).
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.source.to_string(),
            self.n.to_string(),
            self.dim.to_string(),
            fmt_opt(self.sigma),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            fmt_f64(self.e_rms),
            fmt_f64(self.mu_max),
            fmt_opt(self.welch),
            fmt_opt(self.optimality_ratio),
            fmt_opt(self.excess_coherence),
            fmt_f64(self.mean_offdiag),
        ]
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn check_normalized(rows: &Matrix) -> Result<()> {
    for (r, row) in rows.rows_iter().enumerate() {
        let norm = matrix::norm(row);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { row: r, norm });
        }
    }
    Ok(())
}

/// All inner products `<v_i, v_j>` for `i < j`, in row-major pair order.
pub fn gram_offdiag(cb: &Codebook) -> Result<Vec<f64>> {
    check_normalized(&cb.rows)?;
    let rows = &cb.rows;
    let n = rows.nrows();
    let per_row: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let vi = rows.row(i);
            ((i + 1)..n).map(|j| matrix::dot(vi, rows.row(j))).collect()
        })
        .collect();
    Ok(per_row.into_iter().flatten().collect())
}

/// Quadratic mean of the similarities.
pub fn rms_error(sims: &[f64]) -> Result<f64> {
    if sims.is_empty() {
        return Err(Error::EmptyInput("similarity vector"));
    }
    let sq: f64 = sims.iter().map(|s| s * s).sum();
    Ok((sq / sims.len() as f64).sqrt())
}

/// `sqrt((n - dim) / (dim (n - 1)))`, defined only for `n > dim`.
pub fn welch_bound(n: usize, dim: usize) -> Option<f64> {
    if n <= dim || dim == 0 {
        return None;
    }
    let (n, d) = (n as f64, dim as f64);
    Some(((n - d) / (d * (n - 1.0))).sqrt())
}

pub fn histogram_bin(s: f64) -> usize {
    let idx = ((s + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor();
    idx.clamp(0.0, (HISTOGRAM_BINS - 1) as f64) as usize
}

pub fn bin_center(idx: usize) -> f64 {
    let width = 2.0 / HISTOGRAM_BINS as f64;
    -1.0 + (idx as f64 + 0.5) * width
}

/// `log10(count / (total · width) + 1e-12)` per bin.
pub fn log_density(histogram: &[u64]) -> Vec<f64> {
    let total: u64 = histogram.iter().sum();
    let width = 2.0 / histogram.len().max(1) as f64;
    histogram
        .iter()
        .map(|&c| {
            let density = if total == 0 {
                0.0
            } else {
                c as f64 / (total as f64 * width)
            };
            (density + LOG_DENSITY_FLOOR).log10()
        })
        .collect()
}

#[derive(Default)]
struct Partial {
    sum: f64,
    sum_sq: f64,
    max_abs: f64,
    count: u64,
    histogram: Vec<u64>,
}

/// Full coherence report. Rows are normalised first.
pub fn report(cb: &Codebook) -> Result<GramReport> {
    let n = cb.rows.nrows();
    let dim = cb.rows.ncols();
    if n < 2 {
        return Err(Error::EmptyInput("codebook needs at least two rows"));
    }
    if n > MAX_REPORT_ROWS {
        return Err(Error::InvalidArgument(format!(
            "codebook has {n} rows; reports are capped at {MAX_REPORT_ROWS}"
        )));
    }
    let normalized = cb.clone().normalize_rows()?;
    check_normalized(&normalized.rows)?;
    let rows = &normalized.rows;

    // Per-row partials are reduced in row order so the result does not
    // depend on thread scheduling.
    let partials: Vec<Partial> = (0..n)
        .into_par_iter()
        .map(|i| {
            let vi = rows.row(i);
            let mut p = Partial {
                histogram: vec![0; HISTOGRAM_BINS],
                ..Partial::default()
            };
            for j in (i + 1)..n {
                let s = matrix::dot(vi, rows.row(j));
                p.sum += s;
                p.sum_sq += s * s;
                p.max_abs = p.max_abs.max(s.abs());
                p.count += 1;
                p.histogram[histogram_bin(s)] += 1;
            }
            p
        })
        .collect();

    let mut total = Partial {
        histogram: vec![0; HISTOGRAM_BINS],
        ..Partial::default()
    };
    for p in partials {
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
        total.max_abs = total.max_abs.max(p.max_abs);
        total.count += p.count;
        for (t, c) in total.histogram.iter_mut().zip(&p.histogram) {
            *t += c;
        }
    }

    let count = total.count as f64;
    let mu_max = total.max_abs.min(1.0);
    let welch = welch_bound(n, dim);
    let (optimality_ratio, excess_coherence) = match welch {
        Some(w) if w > 0.0 => (Some(mu_max / w), Some(mu_max - w)),
        _ => (None, None),
    };
    Ok(GramReport {
        source: cb.meta.source,
        n,
        dim,
        sigma: cb.meta.sigma,
        seed: cb.meta.seed,
        e_rms: (total.sum_sq / count).sqrt(),
        mu_max,
        welch,
        optimality_ratio,
        excess_coherence,
        mean_offdiag: total.sum / count,
        histogram: total.histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::CodebookMeta;

    fn codebook(rows: Vec<Vec<f64>>) -> Codebook {
        let m = Matrix::from_rows(&rows).unwrap();
        Codebook {
            meta: CodebookMeta {
                source: Source::GaussianBaseline,
                n: m.nrows(),
                dim: m.ncols(),
                sigma: None,
                seed: None,
            },
            rows: m,
        }
    }

    fn planar_triple() -> Codebook {
        let rows = [0.0f64, 120.0, 240.0]
            .iter()
            .map(|deg| {
                let a = deg.to_radians();
                vec![a.cos(), a.sin()]
            })
            .collect();
        codebook(rows)
    }

    fn identity(n: usize) -> Codebook {
        codebook(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    #[test]
    fn orthonormal_rows() {
        let cb = identity(5);
        assert!(gram_offdiag(&cb).unwrap().iter().all(|&s| s == 0.0));
        let r = report(&cb).unwrap();
        assert_eq!(r.e_rms, 0.0);
        assert_eq!(r.mu_max, 0.0);
        assert_eq!(r.welch, None);
        assert_eq!(r.optimality_ratio, None);
        assert_eq!(r.histogram.iter().sum::<u64>(), 10);
        assert_eq!(r.histogram[100], 10);
    }

    #[test]
    fn identical_pair() {
        let cb = codebook(vec![vec![0.6, 0.8], vec![0.6, 0.8]]);
        let sims = gram_offdiag(&cb).unwrap();
        assert_eq!(sims.len(), 1);
        assert!((sims[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn planar_simplex() {
        let cb = planar_triple();
        let sims = gram_offdiag(&cb).unwrap();
        assert_eq!(sims.len(), 3);
        assert!(sims.iter().all(|s| (s + 0.5).abs() < 1e-15));
        assert!((rms_error(&sims).unwrap() - 0.5).abs() < 1e-15);
        let r = report(&cb).unwrap();
        assert!((r.mu_max - 0.5).abs() < 1e-15);
        assert!((r.welch.unwrap() - 0.5).abs() < 1e-15);
        assert!((r.optimality_ratio.unwrap() - 1.0).abs() < 1e-9);
        assert!(r.excess_coherence.unwrap().abs() < 1e-12);
    }

    #[test]
    fn rms_values() {
        assert_eq!(rms_error(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((rms_error(&[0.3, -0.4]).unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!(matches!(rms_error(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn welch_values() {
        assert!((welch_bound(8, 4).unwrap() - 0.377_964_473_009_227_2).abs() < 1e-15);
        assert_eq!(welch_bound(4, 4), None);
        assert_eq!(welch_bound(3, 10), None);
        assert_eq!(welch_bound(1, 1), None);
    }

    #[test]
    fn not_normalized_rejected() {
        let cb = codebook(vec![vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            gram_offdiag(&cb),
            Err(Error::NotNormalized { row: 0, .. })
        ));
        // report normalises on its own
        let r = report(&cb).unwrap();
        assert!((r.mu_max - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn report_needs_two_rows() {
        assert!(report(&identity(1)).is_err());
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(histogram_bin(-1.0), 0);
        assert_eq!(histogram_bin(1.0), 200);
        assert_eq!(histogram_bin(0.0), 100);
        assert!(bin_center(100).abs() < 1e-15);
        let ld = log_density(&[0, 4, 0]);
        assert!((ld[0] - (-12.0)).abs() < 1e-9);
        // all mass in one bin of width 2/3
        assert!((ld[1] - 1.5f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn csv_record_matches_header() {
        let r = report(&planar_triple()).unwrap();
        assert_eq!(r.csv_record().len(), GramReport::CSV_HEADER.len());
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "e_rms",
            "mu_max",
            "welch",
            "optimality_ratio",
            "excess_coherence",
            "histogram",
            "mean_offdiag",
            "n",
            "dim",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
