use crate::error::{mismatch, Error, Result};
use crate::po2::scalar::ScalarPo2;

/// Row-major dense real matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(mismatch(
                format!("{} entries for {rows}x{cols}", rows * cols),
                data.len(),
            ));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                i / cols,
                i % cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(mismatch(format!("{c} columns"), bad.len()));
        }
        DenseMatrix::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        assert!(v.is_finite(), "matrix entries must be finite");
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Rows `start..start + count` as a new matrix.
    pub fn row_block(&self, start: usize, count: usize) -> DenseMatrix {
        assert!(
            count > 0 && start + count <= self.rows,
            "row block out of range"
        );
        DenseMatrix {
            rows: count,
            cols: self.cols,
            data: self.data[start * self.cols..(start + count) * self.cols].to_vec(),
        }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[DenseMatrix]) -> Result<DenseMatrix> {
        let cols = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("nothing to stack".into()))?
            .cols;
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            if p.cols != cols {
                return Err(mismatch(format!("{cols} columns"), p.cols));
            }
            rows += p.rows;
            data.extend_from_slice(&p.data);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(mismatch(
                format!("{} rows on the right", self.cols),
                other.rows,
            ));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a != 0.0 {
                    for (d, b) in dst.iter_mut().zip(other.row(k)) {
                        *d += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self * rhs` for a sparse power-of-two right factor.
    pub fn mul_po2(&self, rhs: &Po2Matrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows() {
            return Err(mismatch(
                format!("{} rows on the right", self.cols),
                rhs.rows(),
            ));
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols());
        for e in rhs.entries() {
            for r in 0..self.rows {
                out.data[r * rhs.cols() + e.col] += e.value.apply(self.get(r, e.row));
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(mismatch(format!("vector of length {}", self.cols), x.len()));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub(crate) fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(mismatch(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }
}

/// One stored entry of a [`Po2Matrix`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Po2Entry {
    pub row: usize,
    pub col: usize,
    pub value: ScalarPo2,
}

/// Sparse matrix whose stored entries are all of the form `±2^e`.
///
/// Entries are kept sorted by `(row, col)` without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Po2Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Po2Entry>,
}

impl Po2Matrix {
    /// Builds a matrix from entries in any order. Duplicate positions and
    /// out-of-range indices are rejected.
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Po2Entry>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if let Some(e) = entries.iter().find(|e| e.row >= rows || e.col >= cols) {
            return Err(Error::InvalidInput(format!(
                "entry ({}, {}) outside {rows}x{cols}",
                e.row, e.col
            )));
        }
        entries.sort_unstable_by_key(|e| (e.row, e.col));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col))
        {
            return Err(Error::InvalidInput(format!(
                "duplicate entry at ({}, {})",
                w[0].row, w[0].col
            )));
        }
        Ok(Po2Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Po2Matrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        use crate::po2::scalar::Sign;
        let entries = (0..n)
            .map(|i| Po2Entry {
                row: i,
                col: i,
                value: ScalarPo2::new(Sign::Plus, 0),
            })
            .collect();
        Po2Matrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Po2Entry] {
        &self.entries
    }

    /// Entries of row `r`, relying on the sorted layout.
    pub fn row_entries(&self, r: usize) -> &[Po2Entry] {
        let lo = self.entries.partition_point(|e| e.row < r);
        let hi = self.entries.partition_point(|e| e.row <= r);
        &self.entries[lo..hi]
    }

    pub fn row_nnz(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rows];
        for e in &self.entries {
            counts[e.row] += 1;
        }
        counts
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for e in &self.entries {
            m.data[e.row * self.cols + e.col] = e.value.value();
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::po2::scalar::Sign;

    fn entry(row: usize, col: usize, s: Sign, e: i32) -> Po2Entry {
        Po2Entry {
            row,
            col,
            value: ScalarPo2::new(s, e),
        }
    }

    #[test]
    fn dense_validation() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn po2_sorting_and_duplicates() {
        let m = Po2Matrix::new(
            2,
            2,
            vec![entry(1, 0, Sign::Plus, 0), entry(0, 1, Sign::Minus, 2)],
        )
        .unwrap();
        assert_eq!(m.entries()[0].row, 0);
        assert_eq!(m.row_entries(1).len(), 1);
        assert_eq!(m.to_dense().data(), &[0.0, -4.0, 1.0, 0.0]);
        let dup = Po2Matrix::new(
            2,
            2,
            vec![entry(1, 0, Sign::Plus, 0), entry(1, 0, Sign::Minus, 2)],
        );
        assert!(dup.is_err());
        assert!(Po2Matrix::new(2, 2, vec![entry(2, 0, Sign::Plus, 0)]).is_err());
    }

    #[test]
    fn sparse_product_matches_dense() {
        let f = Po2Matrix::new(
            3,
            2,
            vec![
                entry(0, 0, Sign::Plus, 1),
                entry(2, 0, Sign::Minus, -1),
                entry(1, 1, Sign::Plus, 0),
            ],
        )
        .unwrap();
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 4.0]]).unwrap();
        let via_sparse = a.mul_po2(&f).unwrap();
        let via_dense = a.matmul(&f.to_dense()).unwrap();
        assert_eq!(via_sparse, via_dense);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let top = a.row_block(0, 1);
        let bottom = a.row_block(1, 2);
        assert_eq!(DenseMatrix::vstack(&[top, bottom]).unwrap(), a);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.column(1), vec![2.0, 4.0, 6.0]);
    }
}
