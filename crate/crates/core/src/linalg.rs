//! SVD-based pseudoinverse and principal components.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const SVD_MAX_ITER: usize = 10_000;

fn svd(a: &Matrix) -> Result<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    a.to_nalgebra()
        .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))
}

/// Moore–Penrose pseudoinverse. Singular values at or below
/// `max(rows, cols) * eps * s_max` are treated as zero.
pub fn pseudoinverse(a: &Matrix) -> Result<Matrix> {
    let (rows, cols) = (a.nrows(), a.ncols());
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(cols, rows));
    }
    let svd = svd(a)?;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0, f64::max);
    let tol = rows.max(cols) as f64 * f64::EPSILON * s_max;

    let mut out = DMatrix::<f64>::zeros(cols, rows);
    for (i, &sv) in s.iter().enumerate() {
        if sv > tol {
            out += (v_t.row(i).transpose() * u.column(i).transpose()) / sv;
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite pseudoinverse".into()));
    }
    Ok(Matrix::from_nalgebra(&out))
}

/// Projection of the mean-centred rows onto the top `k` principal axes.
/// Returns an `rows × k` matrix (columns beyond the rank are zero).
pub fn principal_components(a: &Matrix, k: usize) -> Result<Matrix> {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut centred = a.clone();
    for c in 0..cols {
        let mean = (0..rows).map(|r| a.get(r, c)).sum::<f64>() / rows.max(1) as f64;
        for r in 0..rows {
            centred.set(r, c, a.get(r, c) - mean);
        }
    }
    let mut out = Matrix::zeros(rows, k);
    if rows == 0 || cols == 0 {
        return Ok(out);
    }
    let svd = svd(&centred)?;
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;
    // nalgebra does not sort singular values
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    for (slot, &axis) in order.iter().take(k).enumerate() {
        let dir = v_t.row(axis);
        // fix the sign so the largest-magnitude loading is positive
        let pivot = dir
            .iter()
            .cloned()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..rows {
            let proj: f64 = centred.row(r).iter().zip(dir.iter()).map(|(x, d)| x * d).sum();
            out.set(r, slot, sign * proj);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.nrows(), b.ncols());
        for i in 0..a.nrows() {
            for j in 0..b.ncols() {
                let s = (0..a.ncols()).map(|k| a.get(i, k) * b.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    #[test]
    fn pinv_satisfies_penrose_conditions() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.5]]).unwrap();
        let p = pseudoinverse(&a).unwrap();
        assert_eq!((p.nrows(), p.ncols()), (2, 3));
        let apa = matmul(&matmul(&a, &p), &a);
        let pap = matmul(&matmul(&p, &a), &p);
        for (x, y) in apa.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in pap.as_slice().iter().zip(p.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn pinv_of_rank_deficient_matrix() {
        // second column is twice the first
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let p = pseudoinverse(&a).unwrap();
        // pinv of u v^T scaled: A^+ = A^T / ||A||_F^2
        let fro2 = 25.0;
        for r in 0..2 {
            for c in 0..2 {
                assert!((p.get(r, c) - a.get(c, r) / fro2).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pca_recovers_dominant_axis() {
        // third column uncorrelated with t: sign pattern + - - + per block of 4
        let rows: Vec<Vec<f64>> = (0..48)
            .map(|i| {
                let t = i as f64 - 23.5;
                let minor = if i % 4 == 0 || i % 4 == 3 { 0.01 } else { -0.01 };
                vec![t, 0.5 * t, minor]
            })
            .collect();
        let a = Matrix::from_rows(&rows).unwrap();
        let pcs = principal_components(&a, 2).unwrap();
        let scale = (1.0f64 + 0.25).sqrt();
        for (i, row) in rows.iter().enumerate() {
            assert!((pcs.get(i, 0) - row[0] * scale).abs() < 1e-9);
            assert!((pcs.get(i, 1).abs() - 0.01).abs() < 1e-9);
        }
    }
}
