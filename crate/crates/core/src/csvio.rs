//! Numeric CSV matrices for the command line.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::metrics::fmt_f64;

/// Reads a rectangular table of floats. With `header`, the first record is
/// skipped. Every row must have `expected_cols` fields when given.
pub fn read_matrix<R: Read>(input: R, header: bool, expected_cols: Option<usize>) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut cols = expected_cols;
    let mut rows = 0;
    for record in reader.records() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let width = *cols.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                actual: record.len(),
            });
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| {
                Error::InvalidArgument(format!("row {}: cannot parse {field:?} as a number", rows + 1))
            })?;
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyInput("csv input has no data rows"));
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

/// Writes a matrix with 17 significant digits per value.
pub fn write_matrix<W: Write>(out: W, m: &Matrix, header: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(h) = header {
        w.write_record(h)?;
    }
    for row in m.rows_iter() {
        w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// `prefix0, prefix1, ...`
pub fn column_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let m = Matrix::from_rows(&[vec![0.1, -1.0 / 3.0], vec![1e-300, 2.0f64.sqrt()]]).unwrap();
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m, Some(&column_names("x", 2))).unwrap();
        let back = read_matrix(buf.as_slice(), true, Some(2)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn width_mismatch() {
        let err = read_matrix("1,2,3\n4,5,6\n".as_bytes(), false, Some(2)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                actual: 3
            }
        ));
        let err = read_matrix("1,2\n4\n".as_bytes(), false, None).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                actual: 1
            }
        ));
    }

    #[test]
    fn bad_values_and_empty() {
        assert!(matches!(
            read_matrix("1,x\n".as_bytes(), false, None),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            read_matrix("a,b\n".as_bytes(), true, None),
            Err(Error::EmptyInput(_))
        ));
    }
}
