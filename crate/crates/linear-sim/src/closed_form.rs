use crate::{Dataset, LinSimError, RANK_TOLERANCE};
use nalgebra::{DMatrix, DVector};

/// The limit of gradient descent from zero.
///
/// For `d >= n` (with `Y` of full row rank) this is the minimum-norm
/// interpolator
/// `w* = e_1 + v* / ||v*||^2` with `v* = (-1, pinv(Y) X)`:
/// `v*` spans the direction of the kernel of `Z` along which the trivial
/// solution `e_1` can shed norm, and `w*` is the projection of `e_1` onto
/// the row space of `Z`. For `d < n` (with `Z` of full column rank) the
/// minimizer is unique and equals `e_1`.
///
/// `pinv(Y) X` is computed as `Y^T (Y Y^T)^{-1} X` through the
/// eigendecomposition of the Gram matrix, with eigenvalues below
/// `(RANK_TOLERANCE * sigma_max)^2` dropped.
pub fn closed_form_minimizer(ds: &Dataset) -> Result<DVector<f64>, LinSimError> {
    let (n, d) = (ds.n(), ds.d());
    if d < n {
        // Full column rank of Z makes e_1 the unique zero-loss point.
        let zt_z = ds.z().tr_mul(ds.z());
        let eig = zt_z.symmetric_eigen();
        let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let sigma_min = lambda_min.max(0.0).sqrt();
        if sigma_min <= RANK_TOLERANCE {
            return Err(LinSimError::RankDeficient { sigma_min });
        }
        let mut w = DVector::zeros(d + 1);
        w[0] = 1.0;
        return Ok(w);
    }

    let y = ds.y();
    let gram = y * y.transpose();
    let eig = gram.symmetric_eigen();
    let lambda_max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let sigma_min = lambda_min.max(0.0).sqrt();
    if sigma_min <= RANK_TOLERANCE {
        return Err(LinSimError::RankDeficient { sigma_min });
    }
    // a = (Y Y^T)^{-1} X via the eigenbasis.
    let cutoff = (RANK_TOLERANCE * lambda_max.max(0.0).sqrt()).powi(2);
    let mut a = DVector::zeros(n);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let u = eig.eigenvectors.column(i);
            a.axpy(u.dot(&ds.x()) / lambda, &u, 1.0);
        }
    }
    let tail = y.tr_mul(&a);
    let mut v = DVector::zeros(d + 1);
    v[0] = -1.0;
    for j in 0..d {
        v[j + 1] = tail[j];
    }
    let scale = 1.0 / v.norm_squared();
    let mut w = &v * scale;
    w[0] += 1.0;
    Ok(w)
}

/// Curvature spectrum governing the `d >= n` training dynamics: the
/// eigenvalues of `diag(sigma^2) + g g^T`, where `sigma` are the singular
/// values of `Y`, `V` the corresponding left singular vectors, and
/// `g = V^T X`. Returned in descending order; the matrix is similar to
/// `Z Z^T`, so all eigenvalues are nonnegative up to roundoff.
pub fn dynamics_spectrum(ds: &Dataset) -> Result<Vec<f64>, LinSimError> {
    let (n, d) = (ds.n(), ds.d());
    if d < n {
        return Err(LinSimError::WrongRegime {
            n,
            d,
            need: "d >= n",
        });
    }
    let y = ds.y();
    let gram = y * y.transpose();
    let eig = gram.symmetric_eigen();
    let g = eig.eigenvectors.tr_mul(&ds.x());
    let mut m = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += g[i] * g[j];
        }
    }
    let mut values: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
