//! Positive trace-class E₂ operators and their quadruple parameters.
//!
//! A positive E₂ operator `Z` on the Fock space of `n` modes is fixed by its
//! generating function on exponential vectors `e(u) = Σ u^k/√k! |k⟩`:
//!
//! ```text
//! ⟨e(ū)|Z|e(v)⟩ = c · exp(μᵀu + μ̄ᵀv + uᵀAu + uᵀΛv + vᵀĀv)
//! ```
//!
//! with `c > 0`, `A` complex symmetric and `Λ` hermitian positive semidefinite.
//! [`generating_function`] evaluates the right-hand side. The scalar is kept
//! as `ln c` so that many-mode or strongly displaced states do not underflow.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};
use crate::linalg::{max_abs, symmetrize, Spd};

/// Hermiticity/symmetry tolerance on `A` and `Λ`.
pub const TOL_HERM: f64 = 1e-12;
/// Allowed negative slack in the spectrum of `Λ`.
pub const TOL_PSD: f64 = 1e-10;
/// Minimum eigenvalue accepted before a factorization of `M` or `½I + S`.
pub const MIN_EIG: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct E2Quadruple {
    ln_c: f64,
    mu: DVector<Complex64>,
    a: DMatrix<Complex64>,
    lambda: DMatrix<Complex64>,
}

impl E2Quadruple {
    pub fn new(
        c: f64,
        mu: DVector<Complex64>,
        a: DMatrix<Complex64>,
        lambda: DMatrix<Complex64>,
    ) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameters(format!("c = {c} must be positive and finite")));
        }
        Self::from_ln_c(c.ln(), mu, a, lambda)
    }

    pub fn from_ln_c(
        ln_c: f64,
        mu: DVector<Complex64>,
        a: DMatrix<Complex64>,
        lambda: DMatrix<Complex64>,
    ) -> Result<Self> {
        let n = mu.len();
        if n == 0 || a.shape() != (n, n) || lambda.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "quadruple needs mu of length n and n x n blocks (n = {n})"
            )));
        }
        if !ln_c.is_finite() {
            return Err(Error::InvalidParameters(format!("ln c = {ln_c} is not finite")));
        }
        if mu.iter().chain(a.iter()).chain(lambda.iter()).any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameters("non-finite entries".into()));
        }
        let asym = max_abs_c(&(&a - a.transpose()));
        if asym > TOL_HERM {
            return Err(Error::InvalidParameters(format!("A is not symmetric ({asym:.3e})")));
        }
        let herm = max_abs_c(&(&lambda - lambda.adjoint()));
        if herm > TOL_HERM {
            return Err(Error::InvalidParameters(format!("Lambda is not hermitian ({herm:.3e})")));
        }
        let a = (&a + a.transpose()) * Complex64::new(0.5, 0.0);
        let lambda = (&lambda + lambda.adjoint()) * Complex64::new(0.5, 0.0);
        let min = realify(&lambda)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -TOL_PSD {
            return Err(Error::InvalidParameters(format!(
                "Lambda is not positive semidefinite (minimum eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { ln_c, mu, a, lambda })
    }

    pub fn modes(&self) -> usize {
        self.mu.len()
    }

    pub fn c(&self) -> f64 {
        self.ln_c.exp()
    }

    pub fn ln_c(&self) -> f64 {
        self.ln_c
    }

    pub fn mu(&self) -> &DVector<Complex64> {
        &self.mu
    }

    pub fn a(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn lambda(&self) -> &DMatrix<Complex64> {
        &self.lambda
    }

    /// `(Re μ; Im μ)`.
    pub fn mu_real(&self) -> DVector<f64> {
        let n = self.modes();
        DVector::from_fn(2 * n, |i, _| if i < n { self.mu[i].re } else { self.mu[i - n].im })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dc = (self.c() - other.c()).abs();
        let dm = (&self.mu - &other.mu).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        dc.max(dm)
            .max(max_abs_c(&(&self.a - &other.a)))
            .max(max_abs_c(&(&self.lambda - &other.lambda)))
    }
}

fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// `[[Re X, -Im X], [Im X, Re X]]`.
fn realify(x: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = x[(i, j)];
            out[(i, j)] = z.re;
            out[(i, n + j)] = -z.im;
            out[(n + i, j)] = z.im;
            out[(n + i, n + j)] = z.re;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ASign {
    Plus,
    Minus,
}

/// The real symmetric `2n×2n` matrix `M(±A, Λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrix(DMatrix<f64>);

impl MMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn asymmetry(&self) -> f64 {
        max_abs(&(&self.0 - self.0.transpose()))
    }
}

/// `M(A,Λ) = I - [[ReΛ, -ImΛ], [ImΛ, ReΛ]] - 2[[ReA, ImA], [ImA, -ReA]]`,
/// with `A` replaced by `-A` for [`ASign::Minus`].
pub fn m_matrix(a: &DMatrix<Complex64>, lambda: &DMatrix<Complex64>, sign: ASign) -> Result<MMatrix> {
    let offset = m_offset(a, lambda, sign)?;
    let n = offset.nrows();
    Ok(MMatrix(DMatrix::identity(n, n) - offset))
}

/// `I - M(±A, Λ)`, formed without cancellation against the identity.
pub(crate) fn m_offset(a: &DMatrix<Complex64>, lambda: &DMatrix<Complex64>, sign: ASign) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.shape() != (n, n) || lambda.shape() != (n, n) || n == 0 {
        return Err(Error::Shape(format!(
            "A is {:?} and Lambda is {:?}; both must be n x n",
            a.shape(),
            lambda.shape()
        )));
    }
    let s = match sign {
        ASign::Plus => 2.0,
        ASign::Minus => -2.0,
    };
    let mut m = realify(lambda);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            m[(i, j)] += s * z.re;
            m[(i, n + j)] += s * z.im;
            m[(n + i, j)] += s * z.im;
            m[(n + i, n + j)] -= s * z.re;
        }
    }
    Ok(m)
}

/// `ln √det M(A,Λ)`; fails with [`Error::NotPositive`] when `M(A,Λ)` has a negative eigenvalue.
pub fn ln_c_of(a: &DMatrix<Complex64>, lambda: &DMatrix<Complex64>) -> Result<f64> {
    let m = m_matrix(a, lambda, ASign::Plus)?;
    let sym = symmetrize(m.matrix());
    if let Ok(spd) = Spd::new(&sym, MIN_EIG) {
        return Ok(0.5 * spd.ln_det());
    }
    let eig = sym.symmetric_eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -MIN_EIG {
        return Err(Error::NotPositive(min));
    }
    Ok(0.5 * eig.iter().map(|x| x.max(0.0).ln()).sum::<f64>())
}

/// `c(A,Λ) = √det M(A,Λ)`.
pub fn c_of(a: &DMatrix<Complex64>, lambda: &DMatrix<Complex64>) -> Result<f64> {
    ln_c_of(a, lambda).map(f64::exp)
}

/// `ln Tr Z = ln c - ½ ln det M + (Re μ; Im μ)ᵀ M⁻¹ (Re μ; Im μ)` with `M = M(A,Λ)`.
pub fn ln_trace_positive_e2(p: &E2Quadruple) -> Result<f64> {
    let m = m_matrix(&p.a, &p.lambda, ASign::Plus)?;
    let spd = Spd::new(m.matrix(), MIN_EIG).map_err(Error::NotTraceClass)?;
    let mu = p.mu_real();
    let quad = mu.dot(&spd.solve(&mu));
    Ok(p.ln_c - 0.5 * spd.ln_det() + quad)
}

pub fn trace_positive_e2(p: &E2Quadruple) -> Result<f64> {
    ln_trace_positive_e2(p).map(f64::exp)
}

/// Quadruple of the density operator of `state`; its trace is one.
pub fn state_to_e2(state: &GaussianState) -> Result<E2Quadruple> {
    let n = state.modes();
    let dim = 2 * n;
    let shifted = DMatrix::identity(dim, dim) * 0.5 + state.cov();
    let spd = Spd::new(&shifted, MIN_EIG).map_err(|min| {
        Error::Degenerate(format!(
            "1/2 I + S is not safely invertible (minimum eigenvalue {min:.3e})"
        ))
    })?;
    let x = spd.inverse();
    let j = symplectic_form(n);
    let r = state.mean();
    let jr = &j * r;
    // rᵀ J X J r = -(Jr)ᵀ X (Jr)
    let ln_c = -0.5 * spd.ln_det() - jr.dot(&(&x * &jr));
    let w = &x * &jr;
    let mu = DVector::from_fn(n, |i, _| Complex64::new(-w[n + i], w[i]));
    let mut a = DMatrix::zeros(n, n);
    let mut lambda = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let (x11, x12, x21, x22) = (x[(i, k)], x[(i, n + k)], x[(n + i, k)], x[(n + i, n + k)]);
            a[(i, k)] = Complex64::new(0.25 * (x11 - x22), 0.25 * (x12 + x21));
            let delta = if i == k { 1.0 } else { 0.0 };
            lambda[(i, k)] = Complex64::new(delta - 0.5 * (x11 + x22), -0.5 * (x21 - x12));
        }
    }
    E2Quadruple::from_ln_c(ln_c, mu, a, lambda)
}

/// Normalized Gaussian state `Z / Tr Z`: `S = M(-A,Λ)⁻¹ - ½I`, `r = -J M(-A,Λ)⁻¹ J (Re μ; Im μ)`.
pub fn e2_to_state(p: &E2Quadruple) -> Result<GaussianState> {
    let n = p.modes();
    let m = m_matrix(&p.a, &p.lambda, ASign::Minus)?;
    let spd = Spd::new(m.matrix(), MIN_EIG).map_err(Error::NotNormalizable)?;
    let inv = spd.inverse();
    let cov = symmetrize(&(&inv - DMatrix::identity(2 * n, 2 * n) * 0.5));
    let j = symplectic_form(n);
    let mean = -(&j * (&inv * (&j * p.mu_real())));
    GaussianState::new(mean, cov)
}

/// A real diagonal contraction `K = diag(k_j)`, `0 ≤ k_j ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalContraction(Vec<f64>);

impl DiagonalContraction {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        for (index, &value) in k.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Contraction { index, value });
            }
        }
        Ok(Self(k))
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parameters of `Γ(K) Z Γ(K)`: `(c, Kμ, KAK, KΛK)`.
pub fn gamma_sandwich(p: &E2Quadruple, k: &DiagonalContraction) -> Result<E2Quadruple> {
    let n = p.modes();
    if k.len() != n {
        return Err(Error::Shape(format!("contraction has {} entries, state has {n} modes", k.len())));
    }
    let kd = k.diagonal();
    let mu = DVector::from_fn(n, |i, _| p.mu[i] * kd[i]);
    let a = DMatrix::from_fn(n, n, |i, j| p.a[(i, j)] * (kd[i] * kd[j]));
    let lambda = DMatrix::from_fn(n, n, |i, j| p.lambda[(i, j)] * (kd[i] * kd[j]));
    Ok(E2Quadruple {
        ln_c: p.ln_c,
        mu,
        a,
        lambda,
    })
}

/// `c · exp(μᵀu + μ̄ᵀv + uᵀAu + uᵀΛv + vᵀĀv)`.
pub fn generating_function(p: &E2Quadruple, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    let n = p.modes();
    if u.len() != n || v.len() != n {
        return Err(Error::Shape(format!("u and v must have {n} entries")));
    }
    let mut exponent = Complex64::new(p.ln_c, 0.0);
    for i in 0..n {
        exponent += p.mu[i] * u[i] + p.mu[i].conj() * v[i];
        for j in 0..n {
            exponent += u[i] * p.a[(i, j)] * u[j];
            exponent += u[i] * p.lambda[(i, j)] * v[j];
            exponent += v[i] * p.a[(i, j)].conj() * v[j];
        }
    }
    Ok(exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{coherent_state, squeezed_vacuum};
    use approx::assert_abs_diff_eq;

    fn cm(n: usize, v: &[(f64, f64)]) -> DMatrix<Complex64> {
        DMatrix::from_iterator(n, n, v.iter().map(|&(r, i)| Complex64::new(r, i)))
    }

    fn scalar(x: f64) -> DMatrix<Complex64> {
        cm(1, &[(x, 0.0)])
    }

    #[test]
    fn m_matrix_examples() {
        let z = scalar(0.0);
        assert_eq!(m_matrix(&z, &z, ASign::Plus).unwrap().into_matrix(), DMatrix::identity(2, 2));
        let m = m_matrix(&z, &scalar(0.5), ASign::Plus).unwrap();
        assert_eq!(m.matrix(), &(DMatrix::identity(2, 2) * 0.5));
        let m = m_matrix(&scalar(0.2), &z, ASign::Plus).unwrap();
        assert_abs_diff_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[0.6, 0.0, 0.0, 1.4]), epsilon = 1e-15);
        let m = m_matrix(&scalar(0.2), &z, ASign::Minus).unwrap();
        assert_abs_diff_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[1.4, 0.0, 0.0, 0.6]), epsilon = 1e-15);
        assert!(m_matrix(&cm(2, &[(0.0, 0.0); 4]), &z, ASign::Plus).is_err());
    }

    #[test]
    fn m_matrix_is_symmetric_for_valid_blocks() {
        let a = cm(2, &[(0.1, 0.2), (0.05, -0.1), (0.05, -0.1), (-0.2, 0.3)]);
        let l = cm(2, &[(0.4, 0.0), (0.1, -0.2), (0.1, 0.2), (0.3, 0.0)]);
        assert!(m_matrix(&a, &l, ASign::Plus).unwrap().asymmetry() <= 1e-12);
    }

    #[test]
    fn c_of_examples() {
        let z = scalar(0.0);
        assert_abs_diff_eq!(c_of(&z, &z).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c_of(&z, &scalar(0.5)).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c_of(&scalar(0.2), &z).unwrap(), 0.84f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(c_of(&z, &scalar(1.5)), Err(Error::NotPositive(_))));
        // PSD but singular is allowed and gives zero.
        assert_eq!(c_of(&z, &scalar(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn trace_examples() {
        let z = scalar(0.0);
        let zero = DVector::from_element(1, Complex64::new(0.0, 0.0));
        let vac = E2Quadruple::new(1.0, zero.clone(), z.clone(), z.clone()).unwrap();
        assert_abs_diff_eq!(trace_positive_e2(&vac).unwrap(), 1.0, epsilon = 1e-15);

        let th = E2Quadruple::new(0.5, zero.clone(), z.clone(), scalar(0.5)).unwrap();
        assert_abs_diff_eq!(trace_positive_e2(&th).unwrap(), 1.0, epsilon = 1e-15);

        let mu = DVector::from_element(1, Complex64::new(0.0, 1.0));
        let coh = E2Quadruple::new((-1f64).exp(), mu, z.clone(), z.clone()).unwrap();
        assert_abs_diff_eq!(trace_positive_e2(&coh).unwrap(), 1.0, epsilon = 1e-14);

        let bad = E2Quadruple::new(1.0, zero, z, scalar(1.0)).unwrap();
        assert!(matches!(trace_positive_e2(&bad), Err(Error::NotTraceClass(_))));
    }

    #[test]
    fn quadruple_validation() {
        let zero = DVector::from_element(1, Complex64::new(0.0, 0.0));
        let z = scalar(0.0);
        assert!(E2Quadruple::new(0.0, zero.clone(), z.clone(), z.clone()).is_err());
        assert!(E2Quadruple::new(1.0, zero.clone(), z.clone(), scalar(-0.1)).is_err());
        assert!(E2Quadruple::new(1.0, zero.clone(), z.clone(), cm(1, &[(0.1, 0.1)])).is_err());
        let a = cm(2, &[(0.0, 0.0), (0.1, 0.0), (0.2, 0.0), (0.0, 0.0)]);
        let zero2 = DVector::from_element(2, Complex64::new(0.0, 0.0));
        assert!(E2Quadruple::new(1.0, zero2, a, DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn state_to_e2_examples() {
        let vac = state_to_e2(&GaussianState::vacuum(1)).unwrap();
        assert_abs_diff_eq!(vac.c(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vac.mu()[0].norm(), 0.0);
        assert_abs_diff_eq!(vac.a()[(0, 0)].norm(), 0.0);
        assert_abs_diff_eq!(vac.lambda()[(0, 0)].norm(), 0.0);

        let th = state_to_e2(&GaussianState::thermal(&[2f64.ln()]).unwrap()).unwrap();
        assert_abs_diff_eq!(th.c(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(th.lambda()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(th.a()[(0, 0)].norm(), 0.0, epsilon = 1e-15);

        let coh = state_to_e2(&coherent_state(&[Complex64::new(1.0, 0.0)])).unwrap();
        assert_abs_diff_eq!(coh.c(), (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(coh.mu()[0].norm(), 1.0, epsilon = 1e-15);
        // μ is the coefficient of u: ⟨e(ū)|γ⟩⟨γ|e(v)⟩ = e^{-|γ|²} e^{γu + γ̄v}.
        assert_abs_diff_eq!(coh.mu()[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn e2_to_state_examples() {
        let z = scalar(0.0);
        let zero = DVector::from_element(1, Complex64::new(0.0, 0.0));
        let vac = E2Quadruple::new(1.0, zero.clone(), z.clone(), z.clone()).unwrap();
        assert_eq!(e2_to_state(&vac).unwrap(), GaussianState::vacuum(1));
        let th = E2Quadruple::new(0.5, zero.clone(), z.clone(), scalar(0.5)).unwrap();
        assert_abs_diff_eq!(
            e2_to_state(&th).unwrap().cov(),
            &(DMatrix::identity(2, 2) * 1.5),
            epsilon = 1e-14
        );
        let bad = E2Quadruple::new(1.0, zero, z, scalar(1.0)).unwrap();
        assert!(matches!(e2_to_state(&bad), Err(Error::NotNormalizable(_))));
    }

    #[test]
    fn squeezed_displaced_round_trip() {
        let s = squeezed_vacuum(0.4)
            .unwrap()
            .squeezed(0, Complex64::new(0.1, -0.3))
            .unwrap()
            .displaced(&[Complex64::new(0.3, -0.5)])
            .unwrap();
        let p = state_to_e2(&s).unwrap();
        assert_abs_diff_eq!(trace_positive_e2(&p).unwrap(), 1.0, epsilon = 1e-12);
        let back = e2_to_state(&p).unwrap();
        assert_abs_diff_eq!(back.cov(), s.cov(), epsilon = 1e-12);
        assert_abs_diff_eq!(back.mean(), s.mean(), epsilon = 1e-12);
    }

    #[test]
    fn gamma_sandwich_examples() {
        let p = state_to_e2(
            &squeezed_vacuum(0.3)
                .unwrap()
                .displaced(&[Complex64::new(0.2, 0.1)])
                .unwrap(),
        )
        .unwrap();
        let same = gamma_sandwich(&p, &DiagonalContraction::identity(1)).unwrap();
        assert_eq!(same, p);
        let zero = gamma_sandwich(&p, &DiagonalContraction::new(vec![0.0]).unwrap()).unwrap();
        assert_eq!(zero.c(), p.c());
        assert_eq!(zero.mu()[0].norm(), 0.0);
        assert_eq!(zero.a()[(0, 0)].norm(), 0.0);
        assert_eq!(zero.lambda()[(0, 0)].norm(), 0.0);

        let t = 1.3f64;
        let th = state_to_e2(&GaussianState::thermal(&[t]).unwrap()).unwrap();
        let k = 0.6;
        let out = gamma_sandwich(&th, &DiagonalContraction::new(vec![k]).unwrap()).unwrap();
        assert_abs_diff_eq!(out.c(), 1.0 - (-t).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.lambda()[(0, 0)].re, k * k * (-t).exp(), epsilon = 1e-15);

        assert!(matches!(
            DiagonalContraction::new(vec![0.5, 1.2]),
            Err(Error::Contraction { index: 1, .. })
        ));
        assert!(gamma_sandwich(&th, &DiagonalContraction::identity(2)).is_err());
    }

    #[test]
    fn generating_function_at_origin_is_c() {
        let p = state_to_e2(&GaussianState::thermal(&[0.8]).unwrap()).unwrap();
        let g = generating_function(&p, &[Complex64::new(0.0, 0.0)], &[Complex64::new(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(g.re, p.c(), epsilon = 1e-15);
        assert_abs_diff_eq!(g.im, 0.0);
    }
}
