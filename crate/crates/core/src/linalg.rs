//! Small dense helpers shared by the phase-space modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|m[i,j] - m[j,i]|`.
pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// A symmetric matrix certified positive definite above a threshold, kept in
/// Cholesky form so every solve and determinant goes through the factor.
pub(crate) struct Spd {
    chol: Cholesky<f64, Dyn>,
}

impl Spd {
    /// Returns `Err(min_eigenvalue)` when the matrix is not safely positive definite.
    pub(crate) fn new(m: &DMatrix<f64>, threshold: f64) -> std::result::Result<Self, f64> {
        let sym = symmetrize(m);
        let min_eigenvalue = min_eigenvalue(&sym);
        if !(min_eigenvalue > threshold) {
            return Err(min_eigenvalue);
        }
        let chol = Cholesky::new(sym).ok_or(min_eigenvalue)?;
        Ok(Self { chol })
    }

    pub(crate) fn ln_det(&self) -> f64 {
        let l = self.chol.l_dirty();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
    }

    pub(crate) fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub(crate) fn inverse(&self) -> DMatrix<f64> {
        symmetrize(&self.chol.inverse())
    }
}

/// Eigendecomposition of a hermitian matrix, eigenvalues ascending.
///
/// Goes through the real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]`:
/// nalgebra's complex hermitian solver can leave residuals near `1e-9` on
/// purely imaginary input. Each eigenvalue of `H` appears twice in the
/// embedding; a complex eigenvector `a + ib` is recovered from `(a; b)` and the
/// duplicate `i(a + ib)` is discarded by Gram-Schmidt. The real solver itself
/// still leaves residuals near `1e-10` on some inputs with close eigenvalues;
/// use [`hermitian_jacobi`] where eigenvectors must be accurate to rounding.
pub(crate) fn hermitian_eigen(h: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let m = h.nrows();
    let real = DMatrix::from_fn(2 * m, 2 * m, |i, j| {
        let z = h[(i % m, j % m)];
        let w = 0.5 * (z + h[(j % m, i % m)].conj());
        match (i < m, j < m) {
            (true, true) | (false, false) => w.re,
            (true, false) => -w.im,
            (false, true) => w.im,
        }
    });
    let eig = real.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut values = Vec::with_capacity(m);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(m);
    for k in order {
        if vectors.len() == m {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let mut z = DVector::from_fn(m, |i, _| Complex64::new(col[i], col[m + i]));
        for _ in 0..2 {
            for q in &vectors {
                let proj = q.dotc(&z);
                z.axpy(-proj, q, Complex64::new(1.0, 0.0));
            }
        }
        let norm = z.norm();
        if norm * norm > 0.5 {
            vectors.push(z.unscale(norm));
            values.push(eig.eigenvalues[k]);
        }
    }
    (DVector::from_vec(values), DMatrix::from_columns(&vectors))
}

/// Cyclic Jacobi eigendecomposition of a small hermitian matrix, eigenvalues
/// ascending. Off-diagonal entries are annihilated until they are negligible
/// relative to the geometric mean of their diagonal entries, which keeps
/// small eigenvalues of graded positive semidefinite matrices accurate to
/// high relative precision.
pub(crate) fn hermitian_jacobi(h: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let n = h.nrows();
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut v: DMatrix<Complex64> = DMatrix::identity(n, n);
    for _ in 0..64 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let size = b.norm();
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if size == 0.0 || size <= f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let w = b / size;
                let theta = (aqq - app) / (2.0 * size);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let (upp, upq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (uqp, uqq) = (-w.conj() * s, w.conj() * c);
                for k in 0..n {
                    let (xp, xq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = xp * upp + xq * uqp;
                    a[(k, q)] = xp * upq + xq * uqq;
                    let (yp, yq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = yp * upp + yq * uqp;
                    v[(k, q)] = yp * upq + yq * uqq;
                }
                for k in 0..n {
                    let (xp, xq) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = upp.conj() * xp + uqp.conj() * xq;
                    a[(q, k)] = upq.conj() * xp + uqq.conj() * xq;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = DVector::from_iterator(n, order.iter().map(|&k| a[(k, k)].re));
    let vectors = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Principal square root of a symmetric positive definite matrix and its
/// inverse. Jacobi keeps the eigenvectors accurate for close eigenvalues,
/// where nalgebra's QR iteration can leave residuals near `1e-9`.
pub(crate) fn sqrt_spd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (values, vectors) = hermitian_jacobi(&symmetrize(m).map(|x| Complex64::new(x, 0.0)));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::Unphysical(format!(
            "covariance matrix is not positive definite (minimum eigenvalue {min:.3e})"
        )));
    }
    // Real input only ever sees real rotations.
    let q = vectors.map(|z| z.re);
    let root = values.map(f64::sqrt);
    let inv_root = root.map(|x| 1.0 / x);
    let sqrt = &q * DMatrix::from_diagonal(&root) * q.transpose();
    let inv_sqrt = &q * DMatrix::from_diagonal(&inv_root) * q.transpose();
    Ok((symmetrize(&sqrt), symmetrize(&inv_sqrt)))
}
