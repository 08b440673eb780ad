//! Dense matrix aliases and small helpers shared by every module.

use nalgebra::DMatrix;

/// Dense real matrix, row/column indices are 0-based vertex indices.
pub type Matrix = DMatrix<f64>;

/// 0/1 matrix (reachability, sign patterns).
pub type BinaryMatrix = DMatrix<u8>;

/// Largest absolute entry, `0.0` for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Entrywise sign with an absolute threshold: `1` where `m_ij > threshold`.
pub fn sign_pattern(m: &Matrix, threshold: f64) -> BinaryMatrix {
    m.map(|x| u8::from(x > threshold))
}

/// Sign pattern using the default relative threshold `1e-9 * max |m_ij|`.
pub fn sign_pattern_relative(m: &Matrix) -> BinaryMatrix {
    sign_pattern(m, SIGN_REL_TOL * max_abs(m))
}

pub const SIGN_REL_TOL: f64 = 1e-9;

/// Maximum entrywise absolute difference.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Row-major nested vectors, convenient for serialization.
pub fn to_rows<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> Vec<Vec<T>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Build a matrix from row-major nested slices.
pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Number of singular values above `rel_tol * largest`.
pub fn numeric_rank(m: &Matrix, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().cloned().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Column sums as a vector.
pub fn column_sums(m: &Matrix) -> Vec<f64> {
    (0..m.ncols()).map(|j| m.column(j).sum()).collect()
}

/// Row sums as a vector.
pub fn row_sums(m: &Matrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m.row(i).sum()).collect()
}
