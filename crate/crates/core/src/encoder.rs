//! Forward and inverse prime feature maps, and static sequence generation.
//!
//! Every embedding has layout `[cos(v) | sin(v)]`, so each `(i, k+i)` pair
//! lies on a unit circle and the whole vector sits on a torus of squared
//! norm `D/2`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{PrimeBasis, StaticBasis};
use crate::error::{Error, Result};
use crate::matrix::{self, Matrix};

/// Phases `v = 2πσ·Wx`, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(pub Vec<f64>);

/// A `[cos | sin]` embedding of length `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn half(&self) -> usize {
        self.0.len() / 2
    }

    /// Phases recovered with `atan2(sin, cos)`, in `(-π, π]`.
    pub fn phases(&self) -> PhaseVector {
        let k = self.half();
        PhaseVector((0..k).map(|i| self.0[k + i].atan2(self.0[i])).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    StaticPrime,
    DynamicPrime,
    GaussianBaseline,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::StaticPrime => "static_prime",
            Source::DynamicPrime => "dynamic_prime",
            Source::GaussianBaseline => "gaussian_baseline",
        }
    }

    pub fn is_prime(self) -> bool {
        !matches!(self, Source::GaussianBaseline)
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static_prime" | "prime" | "static" => Ok(Source::StaticPrime),
            "dynamic_prime" | "dynamic" => Ok(Source::DynamicPrime),
            "gaussian_baseline" | "gaussian" => Ok(Source::GaussianBaseline),
            other => Err(Error::InvalidArgument(format!("unknown source '{other}'"))),
        }
    }
}

/// Generation parameters carried alongside a codebook.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookMeta {
    pub source: Source,
    pub n: usize,
    pub dim: usize,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub rows: Matrix,
    pub meta: CodebookMeta,
}

impl Codebook {
    pub fn source(&self) -> Source {
        self.meta.source
    }

    /// Scales every row to unit L2 norm. Prime rows are divided by exactly
    /// `√(D/2)`.
    pub fn normalize_rows(mut self) -> Result<Self> {
        let dim = self.rows.ncols();
        let torus = self.meta.source.is_prime();
        let torus_norm = (dim as f64 / 2.0).sqrt();
        for r in 0..self.rows.nrows() {
            let row = self.rows.row_mut(r);
            let n = matrix::norm(row);
            if n == 0.0 {
                return Err(Error::DegenerateRow(r));
            }
            // torus rows already normalised (by an earlier call) are left alone
            let divisor = if torus && (n - torus_norm).abs() < 1e-9 * torus_norm {
                torus_norm
            } else {
                n
            };
            row.iter_mut().for_each(|v| *v /= divisor);
        }
        Ok(self)
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn write_embedding(phases: impl Iterator<Item = f64>, out: &mut [f64], k: usize) {
    for (i, v) in phases.enumerate() {
        let (s, c) = v.sin_cos();
        out[i] = c;
        out[k + i] = s;
    }
}

fn phases_into<'a>(basis: &'a PrimeBasis, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    let scale = basis.phase_scale();
    basis
        .weights()
        .rows_iter()
        .map(move |w| scale * matrix::dot(w, x))
}

/// Phases `2πσ·Wx` for one input.
pub fn project(basis: &PrimeBasis, x: &[f64]) -> Result<PhaseVector> {
    check_len(basis.d_in(), x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("input contains non-finite values".into()));
    }
    Ok(PhaseVector(phases_into(basis, x).collect()))
}

pub fn forward(basis: &PrimeBasis, x: &[f64]) -> Result<Embedding> {
    let phases = project(basis, x)?;
    let k = basis.k();
    let mut z = vec![0.0; 2 * k];
    write_embedding(phases.0.into_iter(), &mut z, k);
    Ok(Embedding(z))
}

/// Row-wise [`forward`] over an `N × d` batch.
pub fn forward_batch(basis: &PrimeBasis, xs: &Matrix) -> Result<Matrix> {
    check_len(basis.d_in(), xs.ncols())?;
    if xs.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("input contains non-finite values".into()));
    }
    let k = basis.k();
    let mut out = Matrix::zeros(xs.nrows(), 2 * k);
    out.as_mut_slice()
        .par_chunks_mut(2 * k)
        .enumerate()
        .for_each(|(r, dst)| write_embedding(phases_into(basis, xs.row(r)), dst, k));
    Ok(out)
}

/// Recovers `x̂ = pinv(2πσW) · atan2(z_sin, z_cos)`. Exact when `D ≥ 2d` and
/// the original input was inside the injectivity radius; otherwise the
/// least-squares solution for the wrapped phases.
pub fn reverse(basis: &PrimeBasis, z: &[f64]) -> Result<Vec<f64>> {
    check_len(basis.d_out(), z.len())?;
    let pinv = basis.decoder()?;
    let phases = Embedding(z.to_vec()).phases();
    Ok(pinv.rows_iter().map(|p| matrix::dot(p, &phases.0)).collect())
}

pub fn reverse_batch(basis: &PrimeBasis, zs: &Matrix) -> Result<Matrix> {
    check_len(basis.d_out(), zs.ncols())?;
    let pinv = basis.decoder()?;
    let k = basis.k();
    let d = basis.d_in();
    let mut out = Matrix::zeros(zs.nrows(), d);
    if d == 0 {
        return Ok(out);
    }
    out.as_mut_slice()
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(r, dst)| {
            let z = zs.row(r);
            let phases: Vec<f64> = (0..k).map(|i| z[k + i].atan2(z[i])).collect();
            for (slot, p) in dst.iter_mut().zip(pinv.rows_iter()) {
                *slot = matrix::dot(p, &phases);
            }
        });
    Ok(out)
}

/// Largest recovered-phase magnitude over a batch of embeddings.
pub fn max_abs_phase(zs: &Matrix) -> f64 {
    let k = zs.ncols() / 2;
    zs.rows_iter()
        .flat_map(|z| (0..k).map(move |i| z[k + i].atan2(z[i]).abs()))
        .fold(0.0, f64::max)
}

/// `N × D` sequence codebook: row `t` holds `cos(2π t ω)` then `sin(2π t ω)`.
pub fn generate_static(basis: &StaticBasis, n: usize) -> Codebook {
    let k = basis.omega().len();
    let d = basis.d_out();
    let mut rows = Matrix::zeros(n, d);
    let omega = basis.omega();
    rows.as_mut_slice()
        .par_chunks_mut(d)
        .enumerate()
        .for_each(|(t, dst)| {
            let t = t as f64;
            write_embedding(omega.iter().map(|w| TAU * (w * t)), dst, k);
        });
    Codebook {
        rows,
        meta: CodebookMeta {
            source: Source::StaticPrime,
            n,
            dim: d,
            sigma: None,
            seed: None,
        },
    }
}

/// Encodes a batch and wraps it as a dynamic-prime codebook.
pub fn dynamic_codebook(basis: &PrimeBasis, xs: &Matrix) -> Result<Codebook> {
    let rows = forward_batch(basis, xs)?;
    Ok(Codebook {
        meta: CodebookMeta {
            source: Source::DynamicPrime,
            n: rows.nrows(),
            dim: rows.ncols(),
            sigma: Some(basis.sigma()),
            seed: None,
        },
        rows,
    })
}
