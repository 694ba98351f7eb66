//! Two-class spirals and concentric circles with additive Gaussian noise.
//!
//! Each point consumes the same random draws whatever the noise level, so
//! datasets built with one seed and different noise share their clean
//! positions and point order.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::baseline::GaussianStream;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::fmt_f64;

/// Angular extent of each spiral arm (1.5 turns).
pub const SPIRAL_TURN: f64 = 3.0 * PI;

pub const INNER_RADIUS: f64 = 0.5;
pub const OUTER_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Spiral,
    Circles,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Spiral => "spiral",
            DatasetKind::Circles => "circles",
        }
    }
}

impl std::fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spiral" | "spirals" => Ok(DatasetKind::Spiral),
            "circles" | "circle" => Ok(DatasetKind::Circles),
            other => Err(Error::InvalidArgument(format!("unknown dataset '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset2D {
    pub points: Matrix,
    pub labels: Vec<u8>,
    pub kind: DatasetKind,
    pub noise: f64,
    pub seed: u64,
}

impl Dataset2D {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.points.max_abs()
    }

    /// Writes `x,y,label` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "label"])?;
        for (row, label) in self.points.rows_iter().zip(&self.labels) {
            w.write_record([fmt_f64(row[0]), fmt_f64(row[1]), label.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn validate(n: usize, noise: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dataset needs n >= 2, got {n}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise must be >= 0, got {noise}")));
    }
    Ok(())
}

/// Noiseless spiral point for parameter `theta` on arm `class`, before scaling.
pub fn spiral_point(theta: f64, class: u8) -> [f64; 2] {
    let arm = theta + class as f64 * PI;
    [theta * arm.cos(), theta * arm.sin()]
}

/// Two interleaved Archimedean spirals, scaled by `1/(3π)`. Class of point
/// `i` is `i % 2`.
pub fn make_spiral(n: usize, noise: f64, seed: u64) -> Result<Dataset2D> {
    validate(n, noise)?;
    let mut rng = GaussianStream::new(seed);
    let mut points = Matrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = (i % 2) as u8;
        let theta = rng.uniform() * SPIRAL_TURN;
        let (ex, ey) = (rng.next_normal(), rng.next_normal());
        let [x, y] = spiral_point(theta, class);
        points.set(i, 0, (x + noise * ex) / SPIRAL_TURN);
        points.set(i, 1, (y + noise * ey) / SPIRAL_TURN);
        labels.push(class);
    }
    Ok(Dataset2D {
        points,
        labels,
        kind: DatasetKind::Spiral,
        noise,
        seed,
    })
}

/// Class 0 on radius 0.5, class 1 on radius 1.0. Class of point `i` is `i % 2`.
pub fn make_circles(n: usize, noise: f64, seed: u64) -> Result<Dataset2D> {
    validate(n, noise)?;
    let mut rng = GaussianStream::new(seed);
    let mut points = Matrix::zeros(n, 2);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let class = (i % 2) as u8;
        let radius = if class == 0 { INNER_RADIUS } else { OUTER_RADIUS };
        let angle = rng.uniform() * TAU;
        let (ex, ey) = (rng.next_normal(), rng.next_normal());
        points.set(i, 0, radius * angle.cos() + noise * ex);
        points.set(i, 1, radius * angle.sin() + noise * ey);
        labels.push(class);
    }
    Ok(Dataset2D {
        points,
        labels,
        kind: DatasetKind::Circles,
        noise,
        seed,
    })
}

pub fn make(kind: DatasetKind, n: usize, noise: f64, seed: u64) -> Result<Dataset2D> {
    match kind {
        DatasetKind::Spiral => make_spiral(n, noise, seed),
        DatasetKind::Circles => make_circles(n, noise, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(p: &[f64]) -> f64 {
        (p[0] * p[0] + p[1] * p[1]).sqrt()
    }

    #[test]
    fn spiral_parametric_when_noiseless() {
        let ds = make_spiral(500, 0.0, 42).unwrap();
        for (p, &c) in ds.points.rows_iter().zip(&ds.labels) {
            let rho = norm(p) * SPIRAL_TURN;
            // point = rho (cos(rho + c pi), sin(rho + c pi)) / 3pi
            let arm = rho + c as f64 * PI;
            assert!((p[0] - rho * arm.cos() / SPIRAL_TURN).abs() < 1e-12);
            assert!((p[1] - rho * arm.sin() / SPIRAL_TURN).abs() < 1e-12);
            assert!(norm(p) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn spiral_origin_at_zero_angle() {
        for class in [0, 1] {
            let [x, y] = spiral_point(0.0, class);
            assert_eq!((x.abs(), y.abs()), (0.0, 0.0));
        }
    }

    #[test]
    fn circles_radii_exact() {
        let ds = make_circles(400, 0.0, 42).unwrap();
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for (p, &c) in ds.points.rows_iter().zip(&ds.labels) {
            let r = norm(p);
            if c == 1 {
                assert!((r - 1.0).abs() < 1e-12);
                outer.push(p.to_vec());
            } else {
                assert!((r - 0.5).abs() < 1e-12);
                inner.push(p.to_vec());
            }
        }
        let mut min = f64::INFINITY;
        for a in &inner {
            for b in &outer {
                min = min.min(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        assert!(min >= 0.5 - 1e-9);
        // with 200 uniform angles per class the closest pair is near-radial
        assert!(min < 0.52);
    }

    #[test]
    fn deterministic_and_balanced() {
        for kind in [DatasetKind::Spiral, DatasetKind::Circles] {
            let a = make(kind, 101, 0.5, 9).unwrap();
            let b = make(kind, 101, 0.5, 9).unwrap();
            assert_eq!(a, b);
            let ones = a.labels.iter().filter(|&&l| l == 1).count();
            assert!((ones as i64 - 50).abs() <= 1);
        }
    }

    #[test]
    fn noise_shares_clean_positions() {
        let clean = make_circles(64, 0.0, 5).unwrap();
        let noisy = make_circles(64, 0.5, 5).unwrap();
        let noisier = make_circles(64, 1.0, 5).unwrap();
        for r in 0..64 {
            for c in 0..2 {
                let d1 = noisy.points.get(r, c) - clean.points.get(r, c);
                let d2 = noisier.points.get(r, c) - clean.points.get(r, c);
                assert!((d2 - 2.0 * d1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_args() {
        assert!(make_spiral(1, 0.0, 0).is_err());
        assert!(make_circles(10, -1.0, 0).is_err());
    }

    #[test]
    fn csv_export() {
        let ds = make_spiral(4, 0.0, 1).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,label");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].ends_with(",1"));
    }
}
