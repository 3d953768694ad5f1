//! Thin helpers over faer for the dense kernels the samplers need.

use faer::linalg::matmul::triangular::{matmul as tri_matmul, BlockStructure};
use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::{
    solve_lower_triangular_in_place, solve_upper_triangular_in_place,
};
use faer::{Accum, Mat, MatMut, MatRef, Par, Side};

use crate::error::{HsError, Result};

const JITTER_STEPS: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];

fn col(v: &[f64]) -> MatRef<'_, f64> {
    MatRef::from_column_major_slice(v, v.len(), 1)
}

fn col_mut(v: &mut [f64]) -> MatMut<'_, f64> {
    let n = v.len();
    MatMut::from_column_major_slice_mut(v, n, 1)
}

/// `x * v`
pub fn mat_vec(x: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.nrows()];
    matmul(col_mut(&mut out), Accum::Replace, x, col(v), 1.0, Par::Seq);
    out
}

/// `x' * v`
pub fn mat_t_vec(x: MatRef<'_, f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.ncols()];
    matmul(col_mut(&mut out), Accum::Replace, x.transpose(), col(v), 1.0, Par::Seq);
    out
}

/// Lower triangle of `x' x`.
pub fn gram_lower(x: MatRef<'_, f64>) -> Mat<f64> {
    let p = x.ncols();
    let mut g = Mat::<f64>::zeros(p, p);
    tri_matmul(
        &mut g,
        BlockStructure::TriangularLower,
        Accum::Replace,
        x.transpose(),
        BlockStructure::Rectangular,
        x,
        BlockStructure::Rectangular,
        1.0,
        Par::Seq,
    );
    g
}

/// Lower triangle of `I + x diag(d) x'`.
pub fn weighted_outer_plus_identity(x: MatRef<'_, f64>, d: &[f64]) -> Mat<f64> {
    let n = x.nrows();
    let xd = Mat::<f64>::from_fn(n, x.ncols(), |i, j| x[(i, j)] * d[j]);
    let mut m = Mat::<f64>::identity(n, n);
    tri_matmul(
        &mut m,
        BlockStructure::TriangularLower,
        Accum::Add,
        &xd,
        BlockStructure::Rectangular,
        x.transpose(),
        BlockStructure::Rectangular,
        1.0,
        Par::Seq,
    );
    m
}

/// Lower Cholesky factor of a symmetric matrix given by its lower triangle.
///
/// On failure the diagonal is inflated by `eps * mean(diag)` for escalating
/// `eps`; the error lists every level tried.
pub fn cholesky_with_jitter(a: Mat<f64>) -> Result<Mat<f64>> {
    if let Ok(llt) = a.llt(Side::Lower) {
        return Ok(llt.L().to_owned());
    }
    let n = a.nrows();
    let mean_diag = (0..n).map(|i| a[(i, i)]).sum::<f64>() / n as f64;
    let base = if mean_diag.is_finite() && mean_diag > 0.0 { mean_diag } else { 1.0 };
    let mut tried = Vec::with_capacity(JITTER_STEPS.len());
    for eps in JITTER_STEPS {
        tried.push(eps);
        let mut b = a.clone();
        for i in 0..n {
            b[(i, i)] += eps * base;
        }
        if let Ok(llt) = b.llt(Side::Lower) {
            return Ok(llt.L().to_owned());
        }
    }
    Err(HsError::Cholesky { jitter: tried })
}

/// Solve `l z = v` in place for lower-triangular `l`.
pub fn solve_lower(l: MatRef<'_, f64>, v: &mut [f64]) {
    solve_lower_triangular_in_place(l, col_mut(v), Par::Seq);
}

/// Solve `l' z = v` in place for lower-triangular `l`.
pub fn solve_lower_t(l: MatRef<'_, f64>, v: &mut [f64]) {
    solve_upper_triangular_in_place(l.transpose(), col_mut(v), Par::Seq);
}

#[cfg(test)]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
