//! Deterministic prime-frequency feature maps.
//!
//! [`basis::StaticBasis`] with [`encoder::generate_static`] gives a fixed
//! `N × D` sequence codebook; [`basis::PrimeBasis`] with [`encoder::forward`]
//! and [`encoder::reverse`] encodes continuous inputs onto the torus and back.
//! [`metrics`] scores codebooks against the Welch bound and [`harness`] runs
//! the comparison studies against a seeded Gaussian baseline.

pub mod baseline;
pub mod basis;
pub mod cli;
pub mod csvio;
pub mod encoder;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod metrics;
pub mod plot;
pub mod primes;
pub mod synth;

pub use baseline::{generate_gaussian, BaselineConfig};
pub use basis::{PrimeBasis, StaticBasis};
pub use encoder::{
    dynamic_codebook, forward, forward_batch, generate_static, reverse, reverse_batch, Codebook,
    CodebookMeta, Embedding, PhaseVector, Source,
};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use metrics::{report, rms_error, welch_bound, GramReport};
pub use primes::PrimeTable;
pub use synth::{make_circles, make_spiral, Dataset2D, DatasetKind};
