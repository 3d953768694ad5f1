//! Row-major dense algebra by explicit Gauss-Jordan elimination.

pub type Matrix = Vec<Vec<f64>>;

/// Inverse with partial pivoting; panics on a singular matrix.
pub fn invert(a: &Matrix) -> Matrix {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        assert!(m[piv][c].abs() > 1e-300, "singular matrix");
        m.swap(c, piv);
        let d = m[c][c];
        m[c].iter_mut().for_each(|v| *v /= d);
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Mean and covariance of `N(A^-1 X'r, s2 A^-1)` with
/// `A = X'X + diag(prior_precision)`, `X` given by rows.
pub fn gaussian_conditional(
    rows: &Matrix,
    response: &[f64],
    prior_precision: &[f64],
    noise_variance: f64,
) -> (Vec<f64>, Matrix) {
    let p = prior_precision.len();
    let mut a = vec![vec![0.0; p]; p];
    let mut xr = vec![0.0; p];
    for (row, r) in rows.iter().zip(response) {
        for i in 0..p {
            xr[i] += row[i] * r;
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..p {
        a[i][i] += prior_precision[i];
    }
    let inv = invert(&a);
    let mean = mat_vec(&inv, &xr);
    let cov = inv
        .into_iter()
        .map(|r| r.into_iter().map(|v| v * noise_variance).collect())
        .collect();
    (mean, cov)
}
