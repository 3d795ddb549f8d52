//! Randomized truncated SVD of a sparse matrix.
//!
//! Range finder with a Gaussian test matrix, optional power iterations with
//! re-orthonormalization after every product, then an exact SVD of the small
//! projected matrix `Qᵀ M`. When `rank + oversample` reaches `min(m, n)` the
//! sampled range is the whole column space and the result is exact up to
//! rounding.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sparse::CscMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsvdParams {
    pub rank: usize,
    pub oversample: usize,
    pub power_iters: usize,
    pub seed: u64,
}

impl Default for RsvdParams {
    fn default() -> Self {
        RsvdParams {
            rank: 1000,
            oversample: 20,
            power_iters: 2,
            seed: 0,
        }
    }
}

/// `M ≈ left · diag(singular) · rightᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    /// m × r, orthonormal columns.
    pub left: DMatrix<f64>,
    /// Descending, non-negative.
    pub singular: DVector<f64>,
    /// n × r, orthonormal columns.
    pub right: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn rank(&self) -> usize {
        self.singular.len()
    }

    /// `‖M − T S Dᵀ‖_F / ‖M‖_F`.
    pub fn relative_residual(&self, matrix: &CscMatrix) -> f64 {
        let approx = &self.left * DMatrix::from_diagonal(&self.singular) * self.right.transpose();
        let diff = matrix.to_dense() - approx;
        diff.norm() / matrix.frobenius_norm()
    }
}

/// Gaussian test matrix drawn column by column from a ChaCha stream keyed by
/// `seed`, so the draw does not depend on threading.
fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(StandardNormal.sample(&mut rng));
    }
    DMatrix::from_vec(rows, cols, data)
}

fn orthonormalize(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

pub fn randomized_svd(matrix: &CscMatrix, params: RsvdParams) -> Result<TruncatedSvd> {
    let (m, n) = (matrix.nrows(), matrix.ncols());
    let k = m.min(n);
    if params.rank == 0 || params.rank > k {
        return Err(Error::InvalidRank {
            rank: params.rank,
            rows: m,
            cols: n,
        });
    }
    if matrix.values_all_zero() {
        return Err(Error::ZeroMatrix);
    }
    let samples = (params.rank + params.oversample).min(k);

    let omega = gaussian_matrix(n, samples, params.seed);
    let mut q = orthonormalize(matrix.mul_dense(&omega));
    for _ in 0..params.power_iters {
        let z = orthonormalize(matrix.transpose_mul_dense(&q));
        q = orthonormalize(matrix.mul_dense(&z));
    }

    // B = Qᵀ M, built as (Mᵀ Q)ᵀ
    let b = matrix.transpose_mul_dense(&q).transpose();
    let svd = b.svd(true, true);
    let u_small = svd.u.expect("requested u");
    let v_t = svd.v_t.expect("requested v_t");
    let values = svd.singular_values;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order.truncate(params.rank);

    let u_full = &q * &u_small;
    let mut left = DMatrix::zeros(m, params.rank);
    let mut right = DMatrix::zeros(n, params.rank);
    let mut singular = DVector::zeros(params.rank);
    for (dst, &src) in order.iter().enumerate() {
        singular[dst] = values[src].max(0.0);
        left.set_column(dst, &u_full.column(src));
        right.set_column(dst, &v_t.row(src).transpose());
    }
    normalize_signs(&mut left, &mut right);
    Ok(TruncatedSvd { left, singular, right })
}

/// Flips each singular pair so the largest-magnitude entry of the left
/// vector is positive.
fn normalize_signs(left: &mut DMatrix<f64>, right: &mut DMatrix<f64>) {
    for j in 0..left.ncols() {
        let col = left.column(j);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            left.column_mut(j).neg_mut();
            right.column_mut(j).neg_mut();
        }
    }
}
