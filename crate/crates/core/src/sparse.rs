//! Minimal sparse storage: sorted sparse vectors and a compressed sparse
//! column matrix with the two dense products the randomized SVD needs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Sparse column vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from unordered `(index, value)` entries. Duplicate indices are
    /// summed and zero results dropped.
    pub fn from_entries(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        let mut indices: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: i + 1,
                });
            }
            match indices.last() {
                Some(&last) if last == i => *values.last_mut().expect("paired") += v,
                _ => {
                    indices.push(i);
                    values.push(v);
                }
            }
        }
        let mut out = SparseVector { dim, indices, values };
        out.drop_zeros();
        Ok(out)
    }

    fn drop_zeros(&mut self) {
        let mut k = 0;
        for j in 0..self.indices.len() {
            if self.values[j] != 0.0 {
                self.indices[k] = self.indices[j];
                self.values[k] = self.values[j];
                k += 1;
            }
        }
        self.indices.truncate(k);
        self.values.truncate(k);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn scale(&self, factor: f64) -> SparseVector {
        let mut out = SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        };
        out.drop_zeros();
        out
    }

    /// Elementwise sum of two vectors of the same dimension.
    pub fn add(&self, other: &SparseVector) -> Result<SparseVector> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut entries: Vec<(usize, f64)> = self.iter().collect();
        entries.extend(other.iter());
        SparseVector::from_entries(self.dim, entries)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

/// Compressed sparse column matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn from_columns(rows: usize, columns: &[SparseVector]) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let nnz = columns.iter().map(SparseVector::nnz).sum();
        let mut row_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        col_ptr.push(0);
        for col in columns {
            if col.dim() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: col.dim(),
                });
            }
            row_idx.extend_from_slice(col.indices());
            values.extend_from_slice(col.values());
            col_ptr.push(row_idx.len());
        }
        Ok(CscMatrix {
            rows,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Sparse copy of a dense matrix; exact zeros are not stored.
    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let columns: Vec<SparseVector> = (0..dense.ncols())
            .map(|j| {
                let entries = (0..dense.nrows()).map(|i| (i, dense[(i, j)])).collect();
                SparseVector::from_entries(dense.nrows(), entries).expect("in range")
            })
            .collect();
        CscMatrix::from_columns(dense.nrows(), &columns).expect("consistent dims")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, j: usize) -> SparseVector {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        SparseVector {
            dim: self.rows,
            indices: self.row_idx[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    /// `(row, col, value)` triples in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols()).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |k| (self.row_idx[k], j, self.values[k]))
        })
    }

    pub fn values_all_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.ncols());
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }

    /// `self * rhs` for a dense `rhs` with `ncols()` rows.
    pub fn mul_dense(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.ncols(), "inner dimensions differ");
        let mut out = DMatrix::zeros(self.rows, rhs.ncols());
        for c in 0..rhs.ncols() {
            let mut out_col = out.column_mut(c);
            for j in 0..self.ncols() {
                let x = rhs[(j, c)];
                if x == 0.0 {
                    continue;
                }
                for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                    out_col[self.row_idx[k]] += self.values[k] * x;
                }
            }
        }
        out
    }

    /// `selfᵀ * rhs` for a dense `rhs` with `nrows()` rows.
    pub fn transpose_mul_dense(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.rows, "inner dimensions differ");
        let mut out = DMatrix::zeros(self.ncols(), rhs.ncols());
        for c in 0..rhs.ncols() {
            let rhs_col = rhs.column(c);
            for j in 0..self.ncols() {
                let mut acc = 0.0;
                for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                    acc += self.values[k] * rhs_col[self.row_idx[k]];
                }
                out[(j, c)] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_sorted_merged_and_zero_free() {
        let v = SparseVector::from_entries(5, vec![(3, 1.0), (1, 2.0), (3, -1.0), (4, 0.5)]).unwrap();
        assert_eq!(v.indices(), &[1, 4]);
        assert_eq!(v.values(), &[2.0, 0.5]);
        assert_eq!(v.get(4), 0.5);
        assert_eq!(v.get(3), 0.0);
        assert!(SparseVector::from_entries(2, vec![(2, 1.0)]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let dense = DMatrix::from_row_slice(
            3,
            4,
            &[
                1.0, 0.0, 2.0, 0.0, //
                0.0, 0.0, 3.0, -1.0, //
                4.0, 5.0, 0.0, 0.0,
            ],
        );
        let sparse = CscMatrix::from_dense(&dense);
        assert_eq!(sparse.nnz(), 6);
        assert_eq!(sparse.to_dense(), dense);
        let x = DMatrix::from_fn(4, 2, |i, j| (i as f64) - 0.5 * j as f64);
        assert_eq!(sparse.mul_dense(&x), &dense * &x);
        let y = DMatrix::from_fn(3, 2, |i, j| (i * j) as f64 + 1.0);
        assert_eq!(sparse.transpose_mul_dense(&y), dense.transpose() * &y);
        assert!((sparse.frobenius_norm() - dense.norm()).abs() < 1e-12);
    }
}
