//! Williamson normal form `LᵀSL = diag(D₀, D₀)` of a covariance matrix.
//!
//! The construction diagonalizes the antisymmetric matrix `K = S^{½} J S^{½}`
//! through the hermitian matrix `iK`. An eigenpair `iK v = d v` with
//! `v = x + iy` gives `Kx = dy`, `Ky = -dx`, and `O = √2 (y_1..y_n, x_1..x_n)` is
//! orthogonal with `K O = O [[0, D], [-D, 0]]`. Then
//! `L = S^{-½} O diag(√d, √d)` is symplectic and brings `S` to `diag(d, d)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{half_coth, symplectic_form, symplectic_residual, SymplecticMatrix, ThermalSpec, TOL_SYMPLECTIC};
use crate::linalg::{hermitian_jacobi, max_asymmetry, sqrt_spd, symmetrize};

/// Distance above `½` below which a symplectic eigenvalue is treated as pure.
pub const PURE_TOL: f64 = 1e-9;
/// Slack below `½` tolerated by [`d_to_t`].
pub const TOL_BELOW_HALF: f64 = 1e-10;
const TOL_INPUT_SYM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonForm {
    pub l: SymplecticMatrix,
    /// Symplectic eigenvalues, descending.
    pub d: Vec<f64>,
    /// Thermal parameters, ascending; `t_j = d_to_t(d_j)`.
    pub t: ThermalSpec,
}

impl WilliamsonForm {
    /// `diag(d, d)`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        let n = self.d.len();
        DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| self.d[i % n]))
    }
}

fn check_input(s: &DMatrix<f64>) -> Result<()> {
    if s.nrows() != s.ncols() || s.nrows() % 2 != 0 || s.nrows() == 0 {
        return Err(Error::Shape(format!(
            "covariance must be 2n x 2n, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let asym = max_asymmetry(s);
    if asym > TOL_INPUT_SYM * (1.0 + s.amax()) {
        return Err(Error::Shape(format!("covariance is not symmetric (asymmetry {asym:.3e})")));
    }
    Ok(())
}

/// Symplectic eigenvalues of a positive definite `S`, sorted descending.
pub fn symplectic_eigenvalues(s: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_input(s)?;
    let n = s.nrows() / 2;
    let (root, _) = sqrt_spd(s)?;
    let k = &root * symplectic_form(n) * &root;
    // KᵀK = -K² carries every d² twice.
    let gram = symmetrize(&(k.transpose() * &k));
    let mut ev: Vec<f64> = gram.symmetric_eigenvalues().iter().map(|x| x.max(0.0).sqrt()).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev.into_iter().step_by(2).collect())
}

/// Williamson decomposition with `d` descending (so `t` ascending).
pub fn williamson_decompose(s: &DMatrix<f64>) -> Result<WilliamsonForm> {
    check_input(s)?;
    let n = s.nrows() / 2;
    let sym = symmetrize(s);
    let (root, inv_root) = sqrt_spd(&sym)?;
    let k = &root * symplectic_form(n) * &root;
    let ik = DMatrix::from_fn(2 * n, 2 * n, |i, j| Complex64::new(0.0, 0.5 * (k[(i, j)] - k[(j, i)])));
    let (values, vectors) = hermitian_jacobi(&ik);

    let mut pairs: Vec<(f64, DVector<Complex64>)> = (0..2 * n)
        .map(|i| (values[i], vectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.truncate(n);

    let mut o = DMatrix::zeros(2 * n, 2 * n);
    let mut d = Vec::with_capacity(n);
    for (j, (dj, mut v)) in pairs.into_iter().enumerate() {
        if !(dj > 0.0) {
            return Err(Error::Degenerate(format!("non-positive symplectic eigenvalue {dj}")));
        }
        // First component within rounding of the largest modulus, so ties are
        // broken by index rather than by noise.
        let largest = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let pivot = v.iter().position(|z| z.norm() >= largest * (1.0 - 1e-8)).unwrap_or(0);
        // Pivot made positive imaginary, so a diagonal S gives L diagonal.
        let phase = Complex64::i() * v[pivot].conj() / v[pivot].norm();
        v *= phase;
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..2 * n {
            o[(i, j)] = r2 * v[i].im;
            o[(i, n + j)] = r2 * v[i].re;
        }
        d.push(dj);
    }
    modified_gram_schmidt(&mut o);

    let scale = DVector::from_fn(2 * n, |i, _| d[i % n].sqrt());
    let l = inv_root * o * DMatrix::from_diagonal(&scale);
    let residual = symplectic_residual(&l);
    if residual > TOL_SYMPLECTIC {
        let worst = cluster_hint(&d);
        return Err(Error::DegenerateCluster { d: worst, residual });
    }
    let t: Vec<f64> = d.iter().map(|&x| d_to_t(x)).collect::<Result<_>>()?;
    Ok(WilliamsonForm {
        l: SymplecticMatrix::new_unchecked(l),
        d,
        t: ThermalSpec::new(t)?,
    })
}

/// Orthonormalizes columns in index order.
fn modified_gram_schmidt(o: &mut DMatrix<f64>) {
    for j in 0..o.ncols() {
        for i in 0..j {
            let proj = o.column(i).dot(&o.column(j));
            let ci = o.column(i).into_owned();
            o.column_mut(j).axpy(-proj, &ci, 1.0);
        }
        let norm = o.column(j).norm();
        o.column_mut(j).unscale_mut(norm);
    }
}

/// Eigenvalue belonging to the tightest cluster, used only in error messages.
fn cluster_hint(d: &[f64]) -> f64 {
    d.windows(2)
        .min_by(|a, b| (a[0] - a[1]).abs().total_cmp(&(b[0] - b[1]).abs()))
        .map(|w| w[0])
        .unwrap_or_else(|| d.first().copied().unwrap_or(f64::NAN))
}

/// `d_j - ½` for the covariance `S = ½I + E`, ascending, computed from `E`
/// directly so that values far below machine epsilon keep their relative
/// accuracy, including graded cases where modes differ by many orders of
/// magnitude. Values at the rounding level of their own mode are returned as
/// exact zeros.
///
/// In the eigenbasis `Q = (Q₊, Q₋)` of `iJ`, the numbers `d_j - ½` are the
/// solutions of `λ ∈ spec G(λ)` with
/// `G(λ) = Q₊ᵀEQ₊ - Q₊ᵀEQ₋ ((1+λ)I + Q₋ᵀEQ₋)⁻¹ Q₋ᵀEQ₊`, solved by Newton's method.
pub fn symplectic_excess(e: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_input(e)?;
    let n = e.nrows() / 2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DMatrix::from_fn(2 * n, n, |i, j| match (i < n, i % n == j) {
        (_, false) => Complex64::new(0.0, 0.0),
        (true, true) => Complex64::new(0.0, h),
        (false, true) => Complex64::new(h, 0.0),
    });
    let minus = plus.map(|z| Complex64::new(z.re, -z.im));
    let ec = symmetrize(e).map(|x| Complex64::new(x, 0.0));
    let hermitian = |m: DMatrix<Complex64>| (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let f = hermitian(plus.adjoint() * &ec * &plus);
    let b = plus.adjoint() * &ec * &minus;
    let c = hermitian(minus.adjoint() * &ec * &minus);
    // Bound on |Q₊ᵀ δE Q₊| for entrywise rounding δE of E itself.
    let e_abs = DMatrix::from_fn(n, n, |i, k| {
        0.5 * (e[(i, k)].abs() + e[(i, n + k)].abs() + e[(n + i, k)].abs() + e[(n + i, n + k)].abs())
    });

    let schur = |lambda: f64| -> Option<(DMatrix<Complex64>, DMatrix<Complex64>)> {
        let r = &c + DMatrix::identity(n, n) * Complex64::new(1.0 + lambda, 0.0);
        let r_inv = r.try_inverse()?;
        let g = hermitian(&f - &b * &r_inv * b.adjoint());
        Some((g, r_inv))
    };
    let pick = |g: DMatrix<Complex64>, j: usize| -> (f64, DVector<Complex64>) {
        let (values, vectors) = hermitian_jacobi(&g);
        (values[j], vectors.column(j).into_owned())
    };

    let not_positive = || Error::Unphysical("covariance is below the uncertainty bound".into());
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let (g0, _) = schur(0.0).ok_or_else(not_positive)?;
        let mut lambda = pick(g0, j).0.max(0.0);
        let mut floor = 0.0;
        for _ in 0..100 {
            let (g, r_inv) = schur(lambda).ok_or_else(not_positive)?;
            let (mu, v) = pick(g, j);
            // Rounding level of this eigenvalue: the magnitudes that cancel in
            // G, and the rounding already present in the entries of E.
            let correction = &b * &r_inv * b.adjoint();
            let cancelled = (0..n)
                .map(|i| v[i].norm_sqr() * (f[(i, i)].re.abs() + correction[(i, i)].re.abs()))
                .sum::<f64>();
            let v_abs = v.map(|z| z.norm());
            let inherited = v_abs.dot(&(&e_abs * &v_abs));
            floor = 64.0 * (2 * n) as f64 * f64::EPSILON * (cancelled + inherited);
            let w = &r_inv * b.adjoint() * &v;
            let slope = w.norm_squared();
            let step = (mu - lambda) / (1.0 - slope);
            lambda += step;
            if !(step.abs() > 4.0 * f64::EPSILON * lambda.abs()) {
                break;
            }
        }
        if lambda < -TOL_BELOW_HALF {
            return Err(Error::Unphysical(format!(
                "symplectic eigenvalue {} is below the bound 0.5",
                0.5 + lambda
            )));
        }
        out.push(if lambda <= floor { 0.0 } else { lambda });
    }
    out.sort_by(|a, b| a.total_cmp(b));
    Ok(out)
}

/// `t = ln(1 + 1/x)` for an excess `x = d - ½`; zero maps to `∞`.
pub fn excess_to_t(x: f64) -> f64 {
    if x > 0.0 {
        (1.0 / x).ln_1p()
    } else {
        f64::INFINITY
    }
}

/// `t = ln((d + ½)/(d - ½))`; values within [`PURE_TOL`] of `½` map to `∞`.
pub fn d_to_t(d: f64) -> Result<f64> {
    d_to_t_with(d, PURE_TOL)
}

pub fn d_to_t_with(d: f64, pure_tol: f64) -> Result<f64> {
    if d.is_nan() || d < 0.5 - TOL_BELOW_HALF {
        return Err(Error::Unphysical(format!(
            "symplectic eigenvalue {d} is below the bound 0.5"
        )));
    }
    let excess = d - 0.5;
    if excess <= pure_tol {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 / excess).ln_1p())
}

/// `½ coth(t/2)`.
pub fn t_to_d(t: f64) -> f64 {
    half_coth(t)
}
