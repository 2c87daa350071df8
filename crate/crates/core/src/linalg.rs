//! Dense linear algebra used by the ASR stages: deterministic symmetric
//! eigendecomposition, PSD square root, SVD pseudoinverse and covariance.
//!
//! Factorizations are delegated to `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-10;
pub(crate) const EIG_CLAMP_REL: f64 = 1e-12;
const PINV_CUTOFF_REL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
///
/// Each eigenvector is normalized so its largest-magnitude entry is
/// positive, making the decomposition reproducible bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

fn check_square_symmetric(c: &DMatrix<f64>) -> Result<()> {
    if !c.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    let scale = c.amax().max(1.0);
    let asym = (c - c.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::Numeric(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

pub fn symmetric_eigen(c: &DMatrix<f64>) -> Result<Eigen> {
    check_square_symmetric(c)?;
    let sym = (c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        let mut v = eig.eigenvectors.column(src).into_owned();
        let pivot = v
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(_, x)| x)
            .unwrap_or(1.0);
        if pivot < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(dst, &v);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigendecomposition produced non-finite values".into()));
    }
    Ok(Eigen { values, vectors })
}

/// Symmetric square root `S = V sqrt(max(D, 0)) Vᵀ` of a PSD matrix.
/// Eigenvalues below `1e-12 · max(D)` are treated as zero.
pub fn matrix_sqrt_psd(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = symmetric_eigen(c)?;
    Ok(sqrt_from_eigen(&eig))
}

pub(crate) fn sqrt_from_eigen(eig: &Eigen) -> DMatrix<f64> {
    let max = eig.values.max().max(0.0);
    let roots = eig.values.map(|d| if d > EIG_CLAMP_REL * max { d.sqrt() } else { 0.0 });
    let scaled = DMatrix::from_fn(eig.vectors.nrows(), eig.vectors.ncols(), |i, j| {
        eig.vectors[(i, j)] * roots[j]
    });
    let s = &scaled * eig.vectors.transpose();
    (&s + s.transpose()) * 0.5
}

/// Moore–Penrose pseudoinverse via SVD; singular values at or below
/// `1e-12 · σ_max` are dropped.
pub fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    pinv_with_cutoff(a, PINV_CUTOFF_REL)
}

/// [`pinv`] with singular values at or below `rel · σ_max` dropped.
pub fn pinv_with_cutoff(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if r == 0 || c == 0 || a.iter().all(|v| *v == 0.0) {
        return DMatrix::zeros(c, r);
    }
    let fa = faer::Mat::<f64>::from_fn(r, c, |i, j| a[(i, j)]);
    let svd = match fa.thin_svd() {
        Ok(svd) => svd,
        Err(_) => {
            log::warn!("SVD did not converge; returning zero pseudoinverse");
            return DMatrix::zeros(c, r);
        }
    };
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = s[0];
    let cutoff = rel * smax;
    let kept: Vec<(usize, f64)> = (0..s.nrows())
        .filter(|&k| s[k] > cutoff)
        .map(|k| (k, 1.0 / s[k]))
        .collect();
    // V · diag(1/s) · Uᵀ over the kept singular triplets.
    DMatrix::from_fn(c, r, |i, j| {
        kept.iter().map(|&(k, inv)| v[(i, k)] * inv * u[(j, k)]).sum()
    })
}

/// Row covariance of an `m × n` matrix (rows are variables), with per-row
/// mean removal and `1/(n − 1)` normalization. Returns zeros when `n < 2`.
pub fn covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = x.shape();
    if n < 2 {
        return DMatrix::zeros(m, m);
    }
    let means = x.column_mean();
    let mut centered = x.clone();
    for mut col in centered.column_iter_mut() {
        col -= &means;
    }
    let mut cov = &centered * centered.transpose() / (n - 1) as f64;
    cov.fill_upper_triangle_with_lower_triangle();
    cov
}

/// Numerical rank with singular values below `rel · σ_max` treated as zero.
pub fn numerical_rank(a: &DMatrix<f64>, rel: f64) -> usize {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return 0;
    }
    let Ok(s) = faer::Mat::<f64>::from_fn(r, c, |i, j| a[(i, j)]).singular_values() else {
        return 0;
    };
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * max).count()
}
