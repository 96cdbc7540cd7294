//! Small complex linear-algebra helpers shared by the alignment and MI code.

use nalgebra::DMatrix;

use crate::netmodel::C64;

/// Default relative tolerance for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Singular values, largest first.
pub fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn numerical_rank(a: &DMatrix<C64>, tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|s| **s > tol * top).count(),
        _ => 0,
    }
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hstack(blocks: &[&DMatrix<C64>], rows: usize) -> DMatrix<C64> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.columns_mut(at, b.ncols()).copy_from(*b);
        at += b.ncols();
    }
    out
}

/// Scales row `f` of `a` by `diag[f]`, i.e. computes `diag(d) * a`.
pub fn diag_mul(diag: &[C64], a: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = a.clone();
    for (f, mut row) in out.row_iter_mut().enumerate() {
        row *= diag[f];
    }
    out
}
