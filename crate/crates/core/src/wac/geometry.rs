//! Subspace bases and probes of the weight-space geometry.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::Polytope;

/// Relative threshold below which singular values count as zero.
pub const RANK_TOL: f64 = 1e-10;

fn significant(sv: &DVector<f64>, rel: f64) -> Vec<usize> {
    let top = sv.amax();
    (0..sv.len()).filter(|&i| top > 0.0 && sv[i] > rel * top).collect()
}

/// Numerical rank with singular values below `rel · σ_max` treated as zero.
pub fn numerical_rank(a: &DMatrix<f64>, rel: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    significant(&a.clone().svd(false, false).singular_values, rel).len()
}

/// Orthonormal basis of `range(A)` as columns.
pub fn range_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep = significant(&svd.singular_values, RANK_TOL);
    DMatrix::from_fn(a.nrows(), keep.len(), |i, k| u[(i, keep[k])])
}

/// Orthonormal basis of `null(Aᵀ)`, the complement of `range(A)`.
pub fn left_null_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let q = range_basis(a);
    let p = DMatrix::identity(m, m) - &q * q.transpose();
    let eig = SymmetricEigen::new(p);
    let keep: Vec<usize> = (0..m).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    DMatrix::from_fn(m, keep.len(), |i, k| eig.eigenvectors[(i, keep[k])])
}

/// Orthonormal basis of `{d : eᵀd = 0}` as the trailing columns of the
/// Householder reflection taking `e/√m` to the first unit vector.
pub fn simplex_basis(m: usize) -> DMatrix<f64> {
    let mut v = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    v[0] -= 1.0;
    let vv = v.norm_squared();
    let h = if vv > 0.0 {
        DMatrix::identity(m, m) - &v * v.transpose() * (2.0 / vv)
    } else {
        DMatrix::identity(m, m)
    };
    h.columns(1, m - 1).into_owned()
}

/// `argmin ‖B z − r‖` by QR on unit-norm columns. Fails with the smallest
/// scaled pivot `|R_jj|` when it is below `guard`.
pub fn scaled_least_squares(bmat: &DMatrix<f64>, r: &DVector<f64>, guard: f64) -> Result<DVector<f64>, f64> {
    let n = bmat.ncols();
    let norms: Vec<f64> = (0..n).map(|j| bmat.column(j).norm()).collect();
    let top = norms.iter().copied().fold(0.0, f64::max);
    if let Some(j) = (0..n).find(|&j| !(norms[j] > f64::EPSILON * top)) {
        return Err(norms[j] / top.max(f64::MIN_POSITIVE));
    }
    let mut scaled = bmat.clone();
    for (j, nj) in norms.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / nj);
    }
    let qr = scaled.qr();
    let rmat = qr.r();
    let pivot = rmat.diagonal().iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min);
    if !(pivot >= guard) {
        return Err(pivot);
    }
    let qtr = qr.q().transpose() * r;
    let z = rmat.solve_upper_triangular(&qtr).ok_or(pivot)?;
    Ok(DVector::from_fn(n, |j, _| z[j] / norms[j]))
}

/// Orthogonal projection onto `range(A)`, given an orthonormal basis.
pub fn project(basis: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    basis * (basis.transpose() * g)
}

/// Affine dimension of a point cloud: rank of the centered sample matrix.
pub fn affine_dimension(points: &[DVector<f64>], rel: f64) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let dim = points[0].len();
    let mean = points.iter().fold(DVector::zeros(dim), |acc, p| acc + p) / points.len() as f64;
    let centered = DMatrix::from_fn(dim, points.len(), |i, k| points[k][i] - mean[i]);
    numerical_rank(&centered, rel)
}

/// `‖B Y⁻¹ w − B b‖_∞` with the rows of `B` an orthonormal basis of
/// `null(Aᵀ)`; zero exactly when `w` lies in `W_y`.
pub fn wy_membership_residual(poly: &Polytope, y: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let b = left_null_basis(&poly.a).transpose();
    (&b * w.component_div(y) - &b * &poly.b).amax()
}
