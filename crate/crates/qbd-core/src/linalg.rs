//! Thin wrappers around the dense LAPACK calls used throughout the crate.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{QbdError, Result};

/// Eigendecomposition of a general complex matrix. Columns of the second
/// component are the right eigenvectors.
pub(crate) fn eig_general(m: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    m.eig().map_err(|e| QbdError::EigensolveFailure(e.to_string()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn eigvals_hermitian(m: &Array2<C64>) -> Result<Array1<f64>> {
    let h = hermitian_part(m);
    let (vals, _) = h
        .eigh(UPLO::Lower)
        .map_err(|e| QbdError::EigensolveFailure(e.to_string()))?;
    Ok(vals)
}

/// Eigendecomposition of the Hermitian part of `m`.
pub(crate) fn eigh_hermitian(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    hermitian_part(m)
        .eigh(UPLO::Lower)
        .map_err(|e| QbdError::EigensolveFailure(e.to_string()))
}

pub(crate) fn min_eig_hermitian(m: &Array2<C64>) -> Result<f64> {
    let vals = eigvals_hermitian(m)?;
    Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Trace norm of a (near-)Hermitian matrix: sum of absolute eigenvalues.
pub(crate) fn trace_norm_hermitian(m: &Array2<C64>) -> Result<f64> {
    let vals = eigvals_hermitian(m)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

pub(crate) fn singular_values(m: &Array2<C64>) -> Result<Array1<f64>> {
    let (_, sv, _) = m
        .svd(false, false)
        .map_err(|e| QbdError::EigensolveFailure(e.to_string()))?;
    Ok(sv)
}

pub(crate) fn hermitian_part(m: &Array2<C64>) -> Array2<C64> {
    let adj = adjoint(m);
    (m + &adj).mapv(|z| z * 0.5)
}

pub(crate) fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Dense product that skips zero entries of the left factor, so products with
/// the banded shift/coupling operators stay O(N^2).
pub(crate) fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, k1) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k1, k2, "inner dimensions must agree");
    let zero = C64::new(0.0, 0.0);
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        for k in 0..k1 {
            let v = a[[i, k]];
            if v == zero {
                continue;
            }
            for j in 0..m {
                out[[i, j]] += v * b[[k, j]];
            }
        }
    }
    out
}

pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-entry norm over the top-left `k x k` corner.
pub(crate) fn corner_max_abs(m: &Array2<C64>, k: usize) -> f64 {
    let k = k.min(m.nrows()).min(m.ncols());
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            worst = worst.max(m[[i, j]].norm());
        }
    }
    worst
}

pub(crate) fn corner(m: &Array2<C64>, k: usize) -> Array2<C64> {
    let k = k.min(m.nrows()).min(m.ncols());
    m.slice(ndarray::s![0..k, 0..k]).to_owned()
}

/// Rank of the span of `mats`, compressed to the `k x k` corner, without
/// per-row normalization. `cutoff` is relative to the top singular value.
pub(crate) fn raw_span_rank(mats: &[Array2<C64>], k: usize, cutoff: f64) -> Result<usize> {
    if mats.is_empty() {
        return Ok(0);
    }
    let mut rows = Array2::zeros((mats.len(), k * k));
    for (r, m) in mats.iter().enumerate() {
        let c = corner(m, k);
        for i in 0..k {
            for j in 0..k {
                rows[[r, i * k + j]] = c[[i, j]];
            }
        }
    }
    let sv = singular_values(&rows)?;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > cutoff * top).count())
}

/// Rank of the span of `mats`, compressed to the `k x k` corner, by SVD of the
/// stacked (normalized) rows. `rel_cutoff` is relative to the top singular value.
pub(crate) fn span_rank(mats: &[Array2<C64>], k: usize, rel_cutoff: f64) -> Result<usize> {
    if mats.is_empty() {
        return Ok(0);
    }
    let mut rows = Array2::zeros((mats.len(), k * k));
    for (r, m) in mats.iter().enumerate() {
        let c = corner(m, k);
        let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for i in 0..k {
            for j in 0..k {
                rows[[r, i * k + j]] = c[[i, j]] / norm;
            }
        }
    }
    let sv = singular_values(&rows)?;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_cutoff * top).count())
}
