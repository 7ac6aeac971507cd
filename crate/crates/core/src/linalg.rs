//! Small dense helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Rows `rows` and columns `cols` of `m`, in the given order.
pub fn submatrix(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn cholesky(m: &Mat) -> Option<Cholesky<f64, Dyn>> {
    if m.nrows() != m.ncols() {
        return None;
    }
    Cholesky::new(m.clone())
}

/// Inverse of a symmetric positive definite matrix, `None` if Cholesky fails.
pub fn spd_inverse(m: &Mat) -> Option<Mat> {
    if m.nrows() == 0 {
        return Some(Mat::zeros(0, 0));
    }
    let mut inv = cholesky(m)?.inverse();
    symmetrize(&mut inv);
    Some(inv)
}

pub fn log_det_spd(m: &Mat) -> Option<f64> {
    let chol = cholesky(m)?;
    let l = chol.l_dirty();
    Some(2.0 * (0..m.nrows()).map(|i| libm::log(l[(i, i)])).sum::<f64>())
}

pub fn symmetrize(m: &mut Mat) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Column-stacking `vec` operator.
pub fn vec(m: &Mat) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn trace_product(a: &Mat, b: &Mat) -> f64 {
    // tr(AB) without forming AB
    let mut t = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}
