//! Gaussian states of `n` bosonic modes in the `(mean, covariance)` parametrization.
//!
//! # Conventions
//!
//! Real phase-space vectors use block ordering `(x_1..x_n, y_1..y_n)` and the
//! symplectic form is `J = [[0, I], [-I, 0]]`. The vacuum covariance is `½I`.
//!
//! * The mean is the expectation of the annihilation operators,
//!   `m_j = <a_j> = mean[j] + i·mean[n + j]`.
//! * The covariance is the symmetrized second-moment matrix of the rotated
//!   quadratures `(p_1..p_n, -q_1..-q_n)`, with `q = (a + a†)/√2` and
//!   `p = (a - a†)/(i√2)`, i.e. `cov = J·S_qp·Jᵀ` where `S_qp` is the usual
//!   `(q, p)` covariance.
//!
//! This pairing is the one under which the closed-form E₂ parameters in
//! [`crate::e2`] describe the Fock-space operator exactly; the
//! generating-function audit in the test suite pins it against
//! [`crate::fock`]. A consequence is that the Fock squeezer
//! `exp(½(z̄a² - z a†²))` with real `z = r > 0` stretches the *first*
//! covariance coordinate: `squeezed_vacuum(r)` has `cov = diag(½e^{2r}, ½e^{-2r})`.
//!
//! A Gaussian unitary that maps the covariance as `S ↦ G S Gᵀ` (with `G`
//! symplectic) maps the mean as `m ↦ G⁻ᵀ m`; see
//! [`GaussianState::symplectic_congruence`].

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_asymmetry, min_eigenvalue, symmetrize};
use crate::williamson;

/// Maximum tolerated `|S - Sᵀ|` entry.
pub const TOL_SYM: f64 = 1e-12;
/// Slack below `½` tolerated for symplectic eigenvalues.
pub const TOL_PHYS: f64 = 1e-10;
/// Tolerance of the symplectic condition `LᵀJL = J`.
pub const TOL_SYMPLECTIC: f64 = 1e-10;
/// Largest squeezing magnitude accepted by [`squeezed_vacuum`].
pub const MAX_SQUEEZING: f64 = 5.0;

/// `J = [[0, I_n], [-I_n, 0]]`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

/// `½ coth(t/2)`, the symplectic eigenvalue of a thermal mode; `t = ∞` gives `½`.
pub fn half_coth(t: f64) -> f64 {
    if t.is_infinite() {
        return 0.5;
    }
    let e = (-t).exp();
    0.5 * (1.0 + e) / (-(-t).exp_m1())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Checks shapes and finiteness only; physicality is reported by [`validate_state`].
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let len = mean.len();
        if len == 0 || len % 2 != 0 {
            return Err(Error::Shape(format!(
                "mean must have positive even length 2n, got {len}"
            )));
        }
        if cov.nrows() != len || cov.ncols() != len {
            return Err(Error::Shape(format!(
                "covariance must be {len}x{len}, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Shape("mean and covariance must be finite".into()));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * n),
            cov: DMatrix::identity(2 * n, 2 * n) * 0.5,
        }
    }

    /// Product of thermal modes with per-mode parameters in any order.
    pub fn thermal(t: &[f64]) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidThermal("need at least one mode".into()));
        }
        for (j, &tj) in t.iter().enumerate() {
            if tj.is_nan() || tj <= 0.0 {
                return Err(Error::InvalidThermal(format!("t[{j}] = {tj} is not in (0, inf]")));
            }
        }
        let n = t.len();
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (j, &tj) in t.iter().enumerate() {
            let d = half_coth(tj);
            cov[(j, j)] = d;
            cov[(n + j, n + j)] = d;
        }
        Ok(Self {
            mean: DVector::zeros(2 * n),
            cov,
        })
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// `<a_j>` for each mode.
    pub fn annihilation_mean(&self) -> Vec<Complex64> {
        let n = self.modes();
        (0..n)
            .map(|j| Complex64::new(self.mean[j], self.mean[n + j]))
            .collect()
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_state(self)
    }

    pub fn is_physical(&self) -> bool {
        self.validate().is_empty()
    }

    /// Applies the displacement `D(γ)`: `<a> ↦ <a> + γ`.
    pub fn displaced(&self, gamma: &[Complex64]) -> Result<Self> {
        let n = self.modes();
        if gamma.len() != n {
            return Err(Error::Shape(format!("expected {n} displacements, got {}", gamma.len())));
        }
        let mut out = self.clone();
        for (j, g) in gamma.iter().enumerate() {
            out.mean[j] += g.re;
            out.mean[n + j] += g.im;
        }
        Ok(out)
    }

    /// Applies the Gaussian unitary `U` whose Heisenberg action is
    /// `U† a U = α a + β a†` (vector notation, `α`, `β` complex `n×n`).
    pub fn bogoliubov(&self, alpha: &DMatrix<Complex64>, beta: &DMatrix<Complex64>) -> Result<Self> {
        let n = self.modes();
        if alpha.shape() != (n, n) || beta.shape() != (n, n) {
            return Err(Error::Shape(format!("Bogoliubov blocks must be {n}x{n}")));
        }
        let sum = alpha + beta;
        let diff = alpha - beta;
        let mut f = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                f[(i, j)] = sum[(i, j)].re;
                f[(i, n + j)] = -diff[(i, j)].im;
                f[(n + i, j)] = sum[(i, j)].im;
                f[(n + i, n + j)] = diff[(i, j)].re;
            }
        }
        let jm = symplectic_form(n);
        let g = &jm * &f * jm.transpose();
        let cov = symmetrize(&(&g * &self.cov * g.transpose()));
        let mean = &f * &self.mean;
        let residual = max_abs(&(f.transpose() * &jm * &f - &jm));
        if residual > 1e-9 {
            return Err(Error::InvalidParameters(format!(
                "Bogoliubov map is not canonical (|FᵀJF - J| = {residual:.3e})"
            )));
        }
        Ok(Self { mean, cov })
    }

    /// Applies the squeezer `exp(½(z̄a_j² - z a_j†²))` to one mode.
    pub fn squeezed(&self, mode: usize, z: Complex64) -> Result<Self> {
        let n = self.modes();
        if mode >= n {
            return Err(Error::Shape(format!("mode {mode} out of range for {n} modes")));
        }
        let r = z.norm();
        if r > MAX_SQUEEZING {
            return Err(Error::OutOfRange(format!("|z| = {r} exceeds {MAX_SQUEEZING}")));
        }
        let phase = if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) };
        let mut alpha = DMatrix::identity(n, n);
        let mut beta = DMatrix::zeros(n, n);
        alpha[(mode, mode)] = Complex64::new(r.cosh(), 0.0);
        beta[(mode, mode)] = -phase * r.sinh();
        self.bogoliubov(&alpha, &beta)
    }

    /// Applies the beam splitter `exp(θ(e^{iφ} a_i† a_j - e^{-iφ} a_i a_j†))`.
    pub fn beam_split(&self, i: usize, j: usize, theta: f64, phi: f64) -> Result<Self> {
        let n = self.modes();
        if i >= n || j >= n || i == j {
            return Err(Error::Shape(format!("beam splitter needs two distinct modes < {n}")));
        }
        let e = Complex64::from_polar(1.0, phi);
        let mut alpha = DMatrix::identity(n, n);
        alpha[(i, i)] = Complex64::new(theta.cos(), 0.0);
        alpha[(j, j)] = Complex64::new(theta.cos(), 0.0);
        alpha[(i, j)] = e * theta.sin();
        alpha[(j, i)] = -e.conj() * theta.sin();
        self.bogoliubov(&alpha, &DMatrix::zeros(n, n))
    }

    /// General Gaussian unitary in phase-space form: `S ↦ G S Gᵀ`, `m ↦ G⁻ᵀ m + shift`.
    pub fn symplectic_congruence(&self, g: &SymplecticMatrix, shift: &DVector<f64>) -> Result<Self> {
        let n = self.modes();
        if g.modes() != n || shift.len() != 2 * n {
            return Err(Error::Shape(format!("transform does not act on {n} modes")));
        }
        let gm = g.matrix();
        let cov = symmetrize(&(gm * &self.cov * gm.transpose()));
        let mean = g.inverse().transpose() * &self.mean + shift;
        Ok(Self { mean, cov })
    }
}

/// Sorted thermal parameters `0 < t_1 ≤ … ≤ t_n ≤ ∞`; `∞` is a vacuum mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSpec(Vec<f64>);

impl ThermalSpec {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::InvalidThermal("need at least one mode".into()));
        }
        for (j, &tj) in t.iter().enumerate() {
            if tj.is_nan() || tj <= 0.0 {
                return Err(Error::InvalidThermal(format!("t[{j}] = {tj} is not in (0, inf]")));
            }
        }
        if t.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidThermal(format!("{t:?} is not sorted ascending")));
        }
        Ok(Self(t))
    }

    pub fn from_unsorted(mut t: Vec<f64>) -> Result<Self> {
        t.sort_by(|a, b| a.total_cmp(b));
        Self::new(t)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|t| t * factor).collect())
    }
}

/// Real `2n×2n` matrix with `LᵀJL = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    pub fn new(l: DMatrix<f64>) -> Result<Self> {
        if l.nrows() != l.ncols() || l.nrows() % 2 != 0 || l.nrows() == 0 {
            return Err(Error::Shape(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                l.nrows(),
                l.ncols()
            )));
        }
        let residual = symplectic_residual(&l);
        if residual > TOL_SYMPLECTIC {
            return Err(Error::InvalidParameters(format!(
                "matrix is not symplectic: |LᵀJL - J| = {residual:.3e}"
            )));
        }
        Ok(Self(l))
    }

    pub(crate) fn new_unchecked(l: DMatrix<f64>) -> Self {
        Self(l)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// `L⁻¹ = -J Lᵀ J`, exact for symplectic `L`.
    pub fn inverse(&self) -> DMatrix<f64> {
        let j = symplectic_form(self.modes());
        -(&j * self.0.transpose() * &j)
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.0)
    }
}

/// `max |LᵀJL - J|`.
pub fn symplectic_residual(l: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(l.nrows() / 2);
    max_abs(&(l.transpose() * &j * l - &j))
}

/// A failed physicality check.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Asymmetric { max_asymmetry: f64 },
    NotPositiveDefinite { min_eigenvalue: f64 },
    BelowUncertainty { mode: usize, symplectic_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Asymmetric { max_asymmetry } => write!(
                f,
                "symmetry: covariance asymmetry {max_asymmetry:.3e} exceeds {TOL_SYM:e}"
            ),
            Violation::NotPositiveDefinite { min_eigenvalue } => write!(
                f,
                "positivity: covariance has eigenvalue {min_eigenvalue} <= 0"
            ),
            Violation::BelowUncertainty {
                mode,
                symplectic_eigenvalue,
            } => write!(
                f,
                "uncertainty: symplectic eigenvalue {symplectic_eigenvalue} < 0.5 (mode {mode})"
            ),
        }
    }
}

/// Empty when the covariance is symmetric and every symplectic eigenvalue is at least `½`.
pub fn validate_state(state: &GaussianState) -> Vec<Violation> {
    let mut violations = Vec::new();
    let asym = max_asymmetry(&state.cov);
    if asym > TOL_SYM {
        violations.push(Violation::Asymmetric { max_asymmetry: asym });
    }
    let sym = symmetrize(&state.cov);
    let min = min_eigenvalue(&sym);
    if !(min > 0.0) {
        violations.push(Violation::NotPositiveDefinite { min_eigenvalue: min });
        return violations;
    }
    match williamson::symplectic_eigenvalues(&sym) {
        Ok(d) => {
            for (mode, &dj) in d.iter().enumerate() {
                if dj < 0.5 - TOL_PHYS {
                    violations.push(Violation::BelowUncertainty {
                        mode,
                        symplectic_eigenvalue: dj,
                    });
                }
            }
        }
        Err(_) => violations.push(Violation::NotPositiveDefinite { min_eigenvalue: min }),
    }
    violations
}

pub(crate) fn ensure_physical(state: &GaussianState, role: &str) -> Result<()> {
    let violations = validate_state(state);
    if violations.is_empty() {
        return Ok(());
    }
    let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Err(Error::Unphysical(format!("{role}: {}", list.join("; "))))
}

pub fn thermal_state(t: &ThermalSpec) -> GaussianState {
    GaussianState::thermal(t.values()).expect("ThermalSpec holds valid parameters")
}

/// Coherent state `|γ⟩` with `<a> = γ` and vacuum covariance.
pub fn coherent_state(gamma: &[Complex64]) -> GaussianState {
    let n = gamma.len();
    let mut mean = DVector::zeros(2 * n);
    for (j, g) in gamma.iter().enumerate() {
        mean[j] = g.re;
        mean[n + j] = g.im;
    }
    GaussianState {
        mean,
        cov: DMatrix::identity(2 * n, 2 * n) * 0.5,
    }
}

/// Single-mode squeezed vacuum, `cov = diag(½e^{2r}, ½e^{-2r})`.
pub fn squeezed_vacuum(r: f64) -> Result<GaussianState> {
    if !r.is_finite() || r.abs() > MAX_SQUEEZING {
        return Err(Error::OutOfRange(format!(
            "squeezing |r| = {} exceeds {MAX_SQUEEZING}",
            r.abs()
        )));
    }
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![
        0.5 * (2.0 * r).exp(),
        0.5 * (-2.0 * r).exp(),
    ]));
    Ok(GaussianState {
        mean: DVector::zeros(2),
        cov,
    })
}

/// `a ⊗ b`, with the modes of `a` first inside each of the two quadrature blocks.
pub fn tensor(a: &GaussianState, b: &GaussianState) -> GaussianState {
    let (na, nb) = (a.modes(), b.modes());
    let n = na + nb;
    let pos_a = |i: usize| if i < na { i } else { i + nb };
    let pos_b = |j: usize| if j < nb { na + j } else { 2 * na + j };
    let mut mean = DVector::zeros(2 * n);
    let mut cov = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 * na {
        mean[pos_a(i)] = a.mean[i];
        for k in 0..2 * na {
            cov[(pos_a(i), pos_a(k))] = a.cov[(i, k)];
        }
    }
    for j in 0..2 * nb {
        mean[pos_b(j)] = b.mean[j];
        for k in 0..2 * nb {
            cov[(pos_b(j), pos_b(k))] = b.cov[(j, k)];
        }
    }
    GaussianState { mean, cov }
}
