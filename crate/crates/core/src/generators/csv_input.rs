//! CSV data ingestion for canonical-correlation instances.

use std::path::Path;

use super::scca::scca_bundle;
use super::InstanceBundle;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Reads a comma-separated matrix with rows as variables and columns as samples.
/// A first row with any non-numeric cell is treated as a header.
pub fn read_matrix_csv(path: &Path) -> Result<Matrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(std::fs::File::open(path)?);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => {
                return Err(Error::Parse(format!("{} line {}: {e}", path.display(), line + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: no numeric rows", path.display())));
    }
    Matrix::from_rows(&rows).map_err(|_| Error::Parse(format!("{}: ragged rows", path.display())))
}

/// Shifts and scales every column to mean zero and unit (population) variance.
/// Constant columns become zero.
fn normalize_columns(m: &mut Matrix<f64>) {
    let rows = m.rows() as f64;
    for c in 0..m.cols() {
        let col = m.column(c);
        let mean = col.iter().sum::<f64>() / rows;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / rows;
        let scale = if var > 0.0 {
            1.0 / var.sqrt()
        } else {
            log::warn!("sample column {c} is constant; mapped to zero");
            0.0
        };
        for r in 0..m.rows() {
            m[(r, c)] = (m[(r, c)] - mean) * scale;
        }
    }
}

/// Canonical-correlation instance from two data matrices sharing their sample columns.
/// Columns are normalized before the covariances are formed.
pub fn scca_from_data(mut x: Matrix<f64>, mut y: Matrix<f64>, s: usize) -> Result<InstanceBundle> {
    if x.cols() != y.cols() {
        return Err(Error::ShapeMismatch(format!("X has {} samples, Y has {}", x.cols(), y.cols())));
    }
    if s == 0 || s > x.rows() + y.rows() {
        return Err(Error::BadDimensions(format!("s = {s} out of range for n = {}", x.rows() + y.rows())));
    }
    normalize_columns(&mut x);
    normalize_columns(&mut y);
    scca_bundle(&x, &y, s, "scca-csv", 0)
}

pub fn scca_from_csv(path_x: &Path, path_y: &Path, s: usize) -> Result<InstanceBundle> {
    scca_from_data(read_matrix_csv(path_x)?, read_matrix_csv(path_y)?, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn header_detection_and_normalization() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "s1,s2,s3\n1,2,3\n4,6,3\n7,1,3").unwrap();
        let mut m = read_matrix_csv(f.path()).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 3));
        normalize_columns(&mut m);
        for c in 0..2 {
            let col = m.column(c);
            let mean: f64 = col.iter().sum::<f64>() / 3.0;
            let var: f64 = col.iter().map(|v| v * v).sum::<f64>() / 3.0;
            assert!(mean.abs() <= 1e-12);
            assert!((var - 1.0).abs() <= 1e-9);
        }
        assert_eq!(m.column(2), vec![0.0; 3]);
    }

    #[test]
    fn bad_cell_is_a_parse_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "1,2\nx,3").unwrap();
        assert!(matches!(read_matrix_csv(f.path()), Err(Error::Parse(_))));
    }

    #[test]
    fn sample_counts_must_match() {
        let x = Matrix::<f64>::zeros(3, 5);
        let y = Matrix::<f64>::zeros(3, 4);
        assert!(matches!(scca_from_data(x, y, 2), Err(Error::ShapeMismatch(_))));
    }
}
