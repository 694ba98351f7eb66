//! Deterministic prime-root frequency bases.
//!
//! A [`PrimeBasis`] holds the `k × d` matrix of square roots of the first
//! `k·d` primes, filled row-major, together with the scale σ. Its decoder
//! (the pseudoinverse of `2πσW`) is computed on first use and cached.
//! A [`StaticBasis`] is the single-column special case used for sequence
//! generation: the square roots of the first `k` primes.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::primes::PrimeTable;

fn half_dim(d_out: usize) -> Result<usize> {
    if d_out == 0 || !d_out.is_multiple_of(2) {
        return Err(Error::InvalidDimension(format!(
            "output dimension must be even and at least 2, got {d_out}"
        )));
    }
    Ok(d_out / 2)
}

#[derive(Debug)]
pub struct PrimeBasis {
    w: Matrix,
    sigma: f64,
    d_in: usize,
    d_out: usize,
    w_max: f64,
    pinv: OnceLock<Matrix>,
}

impl Clone for PrimeBasis {
    fn clone(&self) -> Self {
        let pinv = OnceLock::new();
        if let Some(p) = self.pinv.get() {
            let _ = pinv.set(p.clone());
        }
        PrimeBasis {
            w: self.w.clone(),
            sigma: self.sigma,
            d_in: self.d_in,
            d_out: self.d_out,
            w_max: self.w_max,
            pinv,
        }
    }
}

impl PrimeBasis {
    pub fn build(d_in: usize, d_out: usize, sigma: f64, primes: &mut PrimeTable) -> Result<Self> {
        let k = half_dim(d_out)?;
        if d_in == 0 {
            return Err(Error::InvalidDimension(
                "input dimension must be at least 1".into(),
            ));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let roots = primes.slice_roots(k * d_in)?;
        let w = Matrix::from_vec(k, d_in, roots)?;
        let w_max = w.get(k - 1, d_in - 1);
        Ok(PrimeBasis {
            w,
            sigma,
            d_in,
            d_out,
            w_max,
            pinv: OnceLock::new(),
        })
    }

    pub fn weights(&self) -> &Matrix {
        &self.w
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn k(&self) -> usize {
        self.d_out / 2
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    /// `2πσ`, the factor applied to `Wx`.
    pub fn phase_scale(&self) -> f64 {
        TAU * self.sigma
    }

    /// The scaled basis `2πσW`.
    pub fn scaled_weights(&self) -> Matrix {
        let s = self.phase_scale();
        let mut m = self.w.clone();
        m.as_mut_slice().iter_mut().for_each(|v| *v *= s);
        m
    }

    /// Pseudoinverse of `2πσW` (shape `d_in × k`), computed once.
    pub fn decoder(&self) -> Result<&Matrix> {
        if let Some(p) = self.pinv.get() {
            return Ok(p);
        }
        let p = linalg::pseudoinverse(&self.scaled_weights())?;
        // a concurrent caller may have won; both computed the same matrix
        let _ = self.pinv.set(p);
        Ok(self.pinv.get().expect("just set"))
    }

    pub fn has_decoder(&self) -> bool {
        self.pinv.get().is_some()
    }

    /// Radius `1 / (2σ·d·w_max)` of the ∞-norm ball on which no phase wraps.
    pub fn injectivity_radius(&self) -> f64 {
        1.0 / (2.0 * self.sigma * self.d_in as f64 * self.w_max)
    }

    /// Whether the basis is overdetermined enough to be inverted (`D ≥ 2d`).
    pub fn is_overdetermined(&self) -> bool {
        self.d_out >= 2 * self.d_in
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticBasis {
    omega: Vec<f64>,
    d_out: usize,
}

impl StaticBasis {
    pub fn build(d_out: usize, primes: &mut PrimeTable) -> Result<Self> {
        let k = half_dim(d_out)?;
        Ok(StaticBasis {
            omega: primes.slice_roots(k)?,
            d_out,
        })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new()
    }

    #[test]
    fn dynamic_two_by_two() {
        let b = PrimeBasis::build(2, 4, 1.0, &mut table()).unwrap();
        let w = b.weights();
        assert_eq!(w.row(0), &[2f64.sqrt(), 3f64.sqrt()]);
        assert_eq!(w.row(1), &[5f64.sqrt(), 7f64.sqrt()]);
        assert_eq!(b.w_max(), 7f64.sqrt());
        assert!(!b.has_decoder());
    }

    #[test]
    fn dynamic_scalar() {
        let b = PrimeBasis::build(1, 2, 0.007, &mut table()).unwrap();
        assert_eq!(b.weights().as_slice(), &[2f64.sqrt()]);
        assert_eq!(b.w_max(), 2f64.sqrt());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            PrimeBasis::build(3, 7, 1.0, &mut table()),
            Err(Error::InvalidDimension(_))
        ));
        assert!(PrimeBasis::build(3, 0, 1.0, &mut table()).is_err());
        assert!(PrimeBasis::build(0, 4, 1.0, &mut table()).is_err());
        assert!(PrimeBasis::build(1, 4, 0.0, &mut table()).is_err());
        assert!(PrimeBasis::build(1, 4, f64::NAN, &mut table()).is_err());
        assert!(StaticBasis::build(5, &mut table()).is_err());
    }

    #[test]
    fn row_major_monotone() {
        let b = PrimeBasis::build(5, 40, 1.0, &mut table()).unwrap();
        let flat = b.weights().as_slice();
        assert!(flat.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b.w_max(), *flat.last().unwrap());
    }

    #[test]
    fn static_bases() {
        let b = StaticBasis::build(4, &mut table()).unwrap();
        assert_eq!(b.omega(), &[2f64.sqrt(), 3f64.sqrt()]);
        let b = StaticBasis::build(2, &mut table()).unwrap();
        assert_eq!(b.omega(), &[2f64.sqrt()]);
        let b = StaticBasis::build(16, &mut table()).unwrap();
        assert_eq!(b.omega().len(), 8);
        assert_eq!(*b.omega().last().unwrap(), 19f64.sqrt());
    }

    #[test]
    fn scalar_decoder() {
        let b = PrimeBasis::build(1, 2, 1.0, &mut table()).unwrap();
        let p = b.decoder().unwrap();
        let expected = 1.0 / (TAU * 2f64.sqrt());
        assert!((p.get(0, 0) - expected).abs() < 1e-15);
    }

    #[test]
    fn decoder_is_left_inverse_and_idempotent() {
        for (d_in, d_out, sigma) in [
            (1, 2, 1.0),
            (2, 4, 0.3),
            (3, 8, 0.007),
            (8, 128, 1.0),
            (2, 128, 0.007),
        ] {
            let b = PrimeBasis::build(d_in, d_out, sigma, &mut table()).unwrap();
            let p = b.decoder().unwrap().clone();
            let a = b.scaled_weights();
            for i in 0..d_in {
                for j in 0..d_in {
                    let s: f64 = (0..b.k()).map(|r| p.get(i, r) * a.get(r, j)).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (s - target).abs() < 1e-8,
                        "({d_in},{d_out},{sigma}) [{i},{j}] = {s}"
                    );
                }
            }
            assert_eq!(b.decoder().unwrap(), &p);
        }
    }

    #[test]
    fn decoder_for_wide_basis() {
        // k < d: still defined, just not a left inverse
        let b = PrimeBasis::build(4, 2, 1.0, &mut table()).unwrap();
        let p = b.decoder().unwrap();
        assert_eq!((p.nrows(), p.ncols()), (4, 1));
    }

    #[test]
    fn injectivity_radius_values() {
        let b = PrimeBasis::build(1, 2, 1.0, &mut table()).unwrap();
        let r = b.injectivity_radius();
        assert!((r - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((r - 0.353_553_390_593_273_7).abs() < 1e-12);
        // phase at the boundary is exactly pi
        assert!((b.phase_scale() * b.w_max() * r - std::f64::consts::PI).abs() < 1e-12);

        let b2 = PrimeBasis::build(1, 2, 2.0, &mut table()).unwrap();
        assert!((b2.injectivity_radius() - r / 2.0).abs() < 1e-15);

        let b = PrimeBasis::build(2, 4, 0.007, &mut table()).unwrap();
        let r = b.injectivity_radius();
        assert!((r - 1.0 / (2.0 * 0.007 * 2.0 * 7f64.sqrt())).abs() < 1e-12);
        assert!((r - 13.50).abs() < 0.01);
        // every corner of the boundary box keeps |v| <= pi
        let a = b.scaled_weights();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for row in 0..2 {
                    let v = a.get(row, 0) * sx * r + a.get(row, 1) * sy * r;
                    assert!(v.abs() <= std::f64::consts::PI + 1e-12);
                }
            }
        }
    }

    #[test]
    fn builds_are_bit_identical() {
        let a = PrimeBasis::build(3, 64, 0.5, &mut table()).unwrap();
        let b = PrimeBasis::build(3, 64, 0.5, &mut table()).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.decoder().unwrap(), b.decoder().unwrap());
    }
}
