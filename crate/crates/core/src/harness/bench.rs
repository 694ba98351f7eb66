use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::quantile;
use crate::basis::{PrimeBasis, StaticBasis};
use crate::encoder::{forward_batch, generate_static, reverse_batch};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::primes::PrimeTable;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// N sweep for static generation, static init and cached reverse.
    pub n_sizes: Vec<usize>,
    /// D sweep for the dynamic forward pass.
    pub d_out_sizes: Vec<usize>,
    pub base_n: usize,
    pub base_d_out: usize,
    pub d_in: usize,
    pub trials: usize,
    /// Worker threads for the timed kernels; 1 measures serial scaling.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n_sizes: vec![20_000, 40_000, 80_000],
            d_out_sizes: vec![64, 128, 256],
            base_n: 10_000,
            base_d_out: 128,
            d_in: 8,
            trials: 5,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub op: String,
    pub n: usize,
    pub d_in: usize,
    pub d_out: usize,
    /// Median seconds per call over the trials.
    pub median_secs: f64,
    /// Median time divided by the previous row of the same op.
    pub ratio_to_previous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn op_rows<'a>(&'a self, op: &'a str) -> impl Iterator<Item = &'a BenchRow> + 'a {
        self.rows.iter().filter(move |r| r.op == op)
    }
}

pub const OP_STATIC_INIT: &str = "static_init";
pub const OP_STATIC_GENERATE: &str = "static_generate";
pub const OP_DYNAMIC_FORWARD: &str = "dynamic_forward";
pub const OP_CACHED_REVERSE: &str = "cached_reverse";

// Repeat cheap calls until one trial takes at least this long.
const MIN_TRIAL_SECS: f64 = 0.002;

fn median_time(trials: usize, mut f: impl FnMut()) -> f64 {
    // calibrate a repetition count so each sample is well above timer noise
    let start = Instant::now();
    f();
    let single = start.elapsed().as_secs_f64().max(1e-9);
    let reps = ((MIN_TRIAL_SECS / single).ceil() as usize).clamp(1, 100_000);
    let samples: Vec<f64> = (0..trials.max(1))
        .map(|_| {
            let start = Instant::now();
            for _ in 0..reps {
                f();
            }
            start.elapsed().as_secs_f64() / reps as f64
        })
        .collect();
    quantile(&samples, 0.5).unwrap()
}

fn push_with_ratio(rows: &mut Vec<BenchRow>, mut row: BenchRow) {
    row.ratio_to_previous = rows
        .iter()
        .rev()
        .find(|r| r.op == row.op)
        .map(|prev| row.median_secs / prev.median_secs);
    rows.push(row);
}

fn sweep_input(n: usize, d_in: usize) -> Matrix {
    let data = (0..n * d_in)
        .map(|i| ((i % 97) as f64 / 97.0 - 0.5) * 0.01)
        .collect();
    Matrix::from_vec(n, d_in, data).expect("shape")
}

/// Wall-time table for the four kernels across the configured sizes.
pub fn bench(cfg: &BenchConfig) -> Result<BenchTable> {
    if cfg.n_sizes.is_empty() || cfg.d_out_sizes.is_empty() || cfg.threads == 0 {
        return Err(Error::InvalidArgument(
            "bench needs sizes and at least one thread".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run(cfg))
}

fn run(cfg: &BenchConfig) -> Result<BenchTable> {
    let mut rows = Vec::new();
    let mut primes = PrimeTable::new();
    let static_basis = StaticBasis::build(cfg.base_d_out, &mut primes)?;

    for &n in &cfg.n_sizes {
        let secs = median_time(cfg.trials, || {
            let mut fresh = PrimeTable::new();
            black_box(StaticBasis::build(cfg.base_d_out, &mut fresh).expect("valid dims"));
        });
        push_with_ratio(
            &mut rows,
            BenchRow {
                op: OP_STATIC_INIT.into(),
                n,
                d_in: 1,
                d_out: cfg.base_d_out,
                median_secs: secs,
                ratio_to_previous: None,
            },
        );
    }
    for &n in &cfg.n_sizes {
        let secs = median_time(cfg.trials, || {
            black_box(generate_static(&static_basis, n));
        });
        push_with_ratio(
            &mut rows,
            BenchRow {
                op: OP_STATIC_GENERATE.into(),
                n,
                d_in: 1,
                d_out: cfg.base_d_out,
                median_secs: secs,
                ratio_to_previous: None,
            },
        );
    }
    let input = sweep_input(cfg.base_n, cfg.d_in);
    for &d_out in &cfg.d_out_sizes {
        let basis = PrimeBasis::build(cfg.d_in, d_out, 0.007, &mut primes)?;
        let secs = median_time(cfg.trials, || {
            black_box(forward_batch(&basis, &input).expect("shape checked"));
        });
        push_with_ratio(
            &mut rows,
            BenchRow {
                op: OP_DYNAMIC_FORWARD.into(),
                n: cfg.base_n,
                d_in: cfg.d_in,
                d_out,
                median_secs: secs,
                ratio_to_previous: None,
            },
        );
    }
    let basis = PrimeBasis::build(cfg.d_in, cfg.base_d_out, 0.007, &mut primes)?;
    basis.decoder()?;
    for &n in &cfg.n_sizes {
        let latent = forward_batch(&basis, &sweep_input(n, cfg.d_in))?;
        let secs = median_time(cfg.trials, || {
            black_box(reverse_batch(&basis, &latent).expect("shape checked"));
        });
        push_with_ratio(
            &mut rows,
            BenchRow {
                op: OP_CACHED_REVERSE.into(),
                n,
                d_in: cfg.d_in,
                d_out: cfg.base_d_out,
                median_secs: secs,
                ratio_to_previous: None,
            },
        );
    }
    Ok(BenchTable {
        config: cfg.clone(),
        rows,
    })
}
