//! Brute-force reference on a truncated Fock space of one or two modes.
//!
//! Nothing here uses the E₂ calculus. States are built from a [`Recipe`]
//! (thermal modes, per-mode squeezing, an optional beam splitter, then a
//! displacement) by conjugating a diagonal thermal matrix with dense
//! unitaries, so the oracle never needs a Williamson decomposition.
//!
//! Unitaries are built on a padded basis and then truncated. A
//! [`FockState`] keeps the truncated rows `V` of the padded unitary together
//! with the thermal populations `λ`, so that `ρ^p = V diag(λ^p) V†` is exact
//! for the padded state; the sandwiched entropy then only needs one SVD.
//! Two-mode bases are ordered `|k₀, k₁⟩ ↦ k₀·N + k₁`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};
use crate::linalg::hermitian_eigen;
use crate::williamson::d_to_t;

/// Largest displacement accepted by [`displace`].
pub const MAX_DISPLACEMENT: f64 = 3.0;
/// Largest squeezing magnitude accepted by [`squeeze`].
pub const MAX_SQUEEZE: f64 = 1.0;
/// Tolerance of the hermiticity check on dense inputs.
pub const TOL_HERMITIAN: f64 = 1e-10;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense operator on `cutoff^n_modes` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    n_modes: usize,
    cutoff: usize,
    mat: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn new(n_modes: usize, cutoff: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        if n_modes == 0 || cutoff == 0 {
            return Err(Error::Shape("need at least one mode and one basis state".into()));
        }
        let dim = cutoff.pow(n_modes as u32);
        if mat.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "{n_modes} modes at cutoff {cutoff} need a {dim}x{dim} matrix, got {:?}",
                mat.shape()
            )));
        }
        Ok(Self { n_modes, cutoff, mat })
    }

    pub fn identity(n_modes: usize, cutoff: usize) -> Self {
        let dim = cutoff.pow(n_modes as u32);
        Self {
            n_modes,
            cutoff,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            ..*self
        }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs_c(&(&self.mat - self.mat.adjoint()))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat,
            ..*self
        })
    }

    /// `U X U†`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.same_space(x)?;
        Ok(Self {
            mat: &self.mat * &x.mat * self.mat.adjoint(),
            ..*self
        })
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes || self.cutoff != other.cutoff {
            return Err(Error::Shape(format!(
                "operators live on different spaces ({}^{} vs {}^{})",
                self.cutoff, self.n_modes, other.cutoff, other.n_modes
            )));
        }
        Ok(())
    }
}

fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

fn single_annihilator(cutoff: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(cutoff, cutoff);
    for k in 1..cutoff {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// `a_mode` with `a|k⟩ = √k |k-1⟩`, embedded at position `mode`.
pub fn annihilator(mode: usize, n_modes: usize, cutoff: usize) -> Result<FockOperator> {
    if mode >= n_modes {
        return Err(Error::Shape(format!("mode {mode} out of range for {n_modes} modes")));
    }
    let mut mat = DMatrix::identity(1, 1);
    for j in 0..n_modes {
        let factor = if j == mode {
            single_annihilator(cutoff)
        } else {
            DMatrix::identity(cutoff, cutoff)
        };
        mat = kron(&mat, &factor);
    }
    FockOperator::new(n_modes, cutoff, mat)
}

/// `p(t) e^{-kt}` for `k < len`; `t = ∞` is the vacuum.
fn thermal_populations(t: f64, len: usize) -> Vec<f64> {
    if t.is_infinite() {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        return v;
    }
    let p = -(-t).exp_m1();
    (0..len).map(|k| p * (-(k as f64) * t).exp()).collect()
}

/// Truncated thermal state `diag(p(t) e^{-kt})`; its trace is `1 - e^{-Nt}`.
pub fn thermal_density(t: f64, cutoff: usize) -> Result<FockOperator> {
    if !(t > 0.0) {
        return Err(Error::InvalidThermal(format!("t = {t} must be positive")));
    }
    let pops = thermal_populations(t, cutoff);
    let mat = DMatrix::from_diagonal(&DVector::from_iterator(cutoff, pops.into_iter().map(|x| Complex64::new(x, 0.0))));
    FockOperator::new(1, cutoff, mat)
}

/// `exp(γa† - γ̄a)` on the truncated space.
pub fn displace(gamma: Complex64, cutoff: usize) -> Result<FockOperator> {
    if !gamma.is_finite() || gamma.norm() > MAX_DISPLACEMENT {
        return Err(Error::OutOfRange(format!(
            "displacement |γ| = {} exceeds {MAX_DISPLACEMENT}",
            gamma.norm()
        )));
    }
    let a = single_annihilator(cutoff);
    let gen = a.adjoint() * gamma - &a * gamma.conj();
    FockOperator::new(1, cutoff, gen.exp())
}

/// `exp(½(z̄a² - z a†²))` on the truncated space.
pub fn squeeze(z: Complex64, cutoff: usize) -> Result<FockOperator> {
    if !z.is_finite() || z.norm() > MAX_SQUEEZE {
        return Err(Error::OutOfRange(format!("squeezing |z| = {} exceeds {MAX_SQUEEZE}", z.norm())));
    }
    let a = single_annihilator(cutoff);
    let a2 = &a * &a;
    let gen = (&a2 * z.conj() - a2.adjoint() * z) * Complex64::new(0.5, 0.0);
    FockOperator::new(1, cutoff, gen.exp())
}

/// Blocks of the beam splitter on fixed total photon number, restricted to
/// basis states with both occupations below `cutoff`: `(indices, block)`.
fn beam_splitter_blocks(theta: f64, phi: f64, cutoff: usize) -> Vec<(Vec<usize>, DMatrix<Complex64>)> {
    let e = Complex64::from_polar(theta, phi);
    let mut blocks = Vec::with_capacity(2 * cutoff - 1);
    for total in 0..=2 * (cutoff - 1) {
        // Block basis |k, total - k⟩, k = 0..=total.
        let size = total + 1;
        let mut gen = DMatrix::<Complex64>::zeros(size, size);
        for k in 0..total {
            // a₀†a₁ |k, total-k⟩ = √(k+1)√(total-k) |k+1, total-k-1⟩
            let amp = ((k + 1) as f64 * (total - k) as f64).sqrt();
            gen[(k + 1, k)] += e * amp;
            gen[(k, k + 1)] -= e.conj() * amp;
        }
        let full = gen.exp();
        let keep: Vec<usize> = (0..size).filter(|&k| k < cutoff && total - k < cutoff).collect();
        let block = DMatrix::from_fn(keep.len(), keep.len(), |r, c| full[(keep[r], keep[c])]);
        let indices = keep.iter().map(|&k| k * cutoff + (total - k)).collect();
        blocks.push((indices, block));
    }
    blocks
}

/// `exp(θ(e^{iφ} a₀†a₁ - e^{-iφ} a₀a₁†))`, built exactly from its
/// photon-number-conserving blocks and then restricted to the cutoff.
pub fn beam_splitter(theta: f64, phi: f64, cutoff: usize) -> Result<FockOperator> {
    check_angles(theta, phi)?;
    let dim = cutoff * cutoff;
    let mut mat = DMatrix::zeros(dim, dim);
    for (idx, block) in beam_splitter_blocks(theta, phi, cutoff) {
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                mat[(i, j)] = block[(r, c)];
            }
        }
    }
    FockOperator::new(2, cutoff, mat)
}

fn check_angles(theta: f64, phi: f64) -> Result<()> {
    if !theta.is_finite() || !phi.is_finite() {
        return Err(Error::OutOfRange("beam splitter angles must be finite".into()));
    }
    Ok(())
}

/// `m · B` for the beam splitter `B`, one photon-number block at a time.
fn mul_beam_splitter(m: &DMatrix<Complex64>, theta: f64, phi: f64, cutoff: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (idx, block) in beam_splitter_blocks(theta, phi, cutoff) {
        let sub = m.select_columns(&idx);
        let prod = sub * block;
        for (c, &j) in idx.iter().enumerate() {
            out.set_column(j, &prod.column(c));
        }
    }
    out
}

/// `m · (a ⊗ b)` without forming the Kronecker product: each row of `m`,
/// read as a `P×P` matrix `R`, maps to `aᵀ R b`.
fn mul_kron(m: &DMatrix<Complex64>, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let p = a.nrows();
    let at = a.transpose();
    let mut out = DMatrix::zeros(m.nrows(), p * p);
    for r in 0..m.nrows() {
        // Row-major k₀·P + k₁ is the transpose of nalgebra's column-major layout.
        let row = DMatrix::from_fn(p, p, |i, j| m[(r, i * p + j)]);
        let res = &at * row * b;
        for i in 0..p {
            for j in 0..p {
                out[(r, i * p + j)] = res[(i, j)];
            }
        }
    }
    out
}

/// Second quantization of a diagonal `K`: `Γ(K)|k⟩ = Π k_j^{n_j} |k⟩`.
pub fn second_quantized(k: &[f64], cutoff: usize) -> Result<FockOperator> {
    let n = k.len();
    let mut diag = DVector::from_element(1, ONE);
    for &kj in k {
        let pows = DVector::from_iterator(cutoff, (0..cutoff).map(|m| Complex64::new(kj.powi(m as i32), 0.0)));
        diag = diag.kronecker(&pows);
    }
    FockOperator::new(n, cutoff, DMatrix::from_diagonal(&diag))
}

/// Construction of a one- or two-mode Gaussian state: thermal modes, then
/// per-mode squeezing, then (two modes only) a beam splitter, then a displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub thermal: Vec<f64>,
    pub squeeze: Vec<Complex64>,
    pub beam_splitter: Option<(f64, f64)>,
    pub displacement: Vec<Complex64>,
}

impl Recipe {
    pub fn thermal(t: &[f64]) -> Self {
        let n = t.len();
        Self {
            thermal: t.to_vec(),
            squeeze: vec![ZERO; n],
            beam_splitter: None,
            displacement: vec![ZERO; n],
        }
    }

    pub fn single(t: f64, z: Complex64, gamma: Complex64) -> Self {
        Self {
            thermal: vec![t],
            squeeze: vec![z],
            beam_splitter: None,
            displacement: vec![gamma],
        }
    }

    pub fn with_squeeze(mut self, z: &[Complex64]) -> Self {
        self.squeeze = z.to_vec();
        self
    }

    pub fn with_beam_splitter(mut self, theta: f64, phi: f64) -> Self {
        self.beam_splitter = Some((theta, phi));
        self
    }

    pub fn with_displacement(mut self, gamma: &[Complex64]) -> Self {
        self.displacement = gamma.to_vec();
        self
    }

    pub fn modes(&self) -> usize {
        self.thermal.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.modes();
        if n == 0 || n > 2 {
            return Err(Error::UnsupportedRecipe(format!("{n} modes; the oracle handles 1 or 2")));
        }
        if self.squeeze.len() != n || self.displacement.len() != n {
            return Err(Error::UnsupportedRecipe("per-mode parameter lists must match the mode count".into()));
        }
        if self.beam_splitter.is_some() && n != 2 {
            return Err(Error::UnsupportedRecipe("a beam splitter needs two modes".into()));
        }
        for &t in &self.thermal {
            if !(t > 0.0) {
                return Err(Error::InvalidThermal(format!("t = {t} must be in (0, inf]")));
            }
        }
        for z in &self.squeeze {
            if !z.is_finite() || z.norm() > MAX_SQUEEZE {
                return Err(Error::OutOfRange(format!("squeezing |z| = {} exceeds {MAX_SQUEEZE}", z.norm())));
            }
        }
        for g in &self.displacement {
            if !g.is_finite() || g.norm() > MAX_DISPLACEMENT {
                return Err(Error::OutOfRange(format!(
                    "displacement |γ| = {} exceeds {MAX_DISPLACEMENT}",
                    g.norm()
                )));
            }
        }
        Ok(())
    }

    /// Phase-space moments of the state the recipe describes.
    pub fn gaussian_state(&self) -> Result<GaussianState> {
        self.validate()?;
        let mut s = GaussianState::thermal(&self.thermal)?;
        for (mode, z) in self.squeeze.iter().enumerate() {
            if z.norm() > 0.0 {
                s = s.squeezed(mode, *z)?;
            }
        }
        if let Some((theta, phi)) = self.beam_splitter {
            s = s.beam_split(0, 1, theta, phi)?;
        }
        s.displaced(&self.displacement)
    }

    /// Recipe of an arbitrary one-mode state: `S/√det S` fixes the squeezer,
    /// `√det S` the temperature and the mean the displacement.
    pub fn from_state(state: &GaussianState) -> Result<Self> {
        if state.modes() != 1 {
            return Err(Error::UnsupportedRecipe(
                "only one-mode states can be converted without a recipe".into(),
            ));
        }
        let s = state.cov();
        let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
        if !(det > 0.0) || !(s[(0, 0)] > 0.0) {
            return Err(Error::Unphysical("covariance is not positive definite".into()));
        }
        let d = det.sqrt();
        let t = d_to_t(d)?;
        let (p11, p22, p12) = (s[(0, 0)] / d, s[(1, 1)] / d, 0.5 * (s[(0, 1)] + s[(1, 0)]) / d);
        let ch = (0.5 * (p11 + p22)).max(1.0);
        let r = 0.5 * ch.acosh();
        let phi = p12.atan2(0.5 * (p11 - p22));
        let z = if r > 0.0 { Complex64::from_polar(r, phi) } else { ZERO };
        let gamma = state.annihilation_mean()[0];
        Ok(Self::single(t, z, gamma))
    }
}

/// A truncated density matrix `ρ = V diag(λ) V†`, where `V` holds the first
/// rows of a unitary on a padded basis and `λ` are thermal populations.
#[derive(Debug, Clone)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    v: DMatrix<Complex64>,
    lambda: Vec<f64>,
}

/// Default padding for a per-mode cutoff.
pub fn default_padding(cutoff: usize) -> usize {
    (cutoff / 2).max(8)
}

/// Builds `ρ` on `cutoff` levels per mode from unitaries on `cutoff + pad` levels.
pub fn state_to_fock_padded(recipe: &Recipe, cutoff: usize, pad: usize) -> Result<FockState> {
    recipe.validate()?;
    if cutoff < 2 {
        return Err(Error::Shape("cutoff must be at least 2".into()));
    }
    let n = recipe.modes();
    let big = cutoff + pad;
    let local = |mode: usize| -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
        let d = displace(recipe.displacement[mode], big)?.into_matrix();
        let s = squeeze(recipe.squeeze[mode], big)?.into_matrix();
        Ok((d, s))
    };
    let (v, lambda) = if n == 1 {
        let (d, s) = local(0)?;
        let u = d.rows(0, cutoff) * s;
        (u, thermal_populations(recipe.thermal[0], big))
    } else {
        let (d0, s0) = local(0)?;
        let (d1, s1) = local(1)?;
        let rows = kron(&d0.rows(0, cutoff).into_owned(), &d1.rows(0, cutoff).into_owned());
        let mixed = match recipe.beam_splitter {
            Some((theta, phi)) => {
                check_angles(theta, phi)?;
                mul_beam_splitter(&rows, theta, phi, big)
            }
            None => rows,
        };
        let u = mul_kron(&mixed, &s0, &s1);
        let p0 = thermal_populations(recipe.thermal[0], big);
        let p1 = thermal_populations(recipe.thermal[1], big);
        let lambda = p0.iter().flat_map(|a| p1.iter().map(move |b| a * b)).collect();
        (u, lambda)
    };
    Ok(FockState {
        n_modes: n,
        cutoff,
        v,
        lambda,
    })
}

pub fn state_to_fock(recipe: &Recipe, cutoff: usize) -> Result<FockState> {
    state_to_fock_padded(recipe, cutoff, default_padding(cutoff))
}

impl FockState {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `V diag(λ^p) V†`.
    pub fn power(&self, p: f64) -> FockOperator {
        let scaled = scale_columns(&self.v, &self.lambda, |x| if x > 0.0 { x.powf(p) } else { 0.0 });
        FockOperator {
            n_modes: self.n_modes,
            cutoff: self.cutoff,
            mat: scaled * self.v.adjoint(),
        }
    }

    pub fn density(&self) -> FockOperator {
        self.power(1.0)
    }

    /// `1 - Tr ρ`, the weight lost to truncation.
    pub fn truncation_deficit(&self) -> f64 {
        let kept: f64 = (0..self.v.ncols())
            .map(|j| self.lambda[j] * self.v.column(j).norm_squared())
            .sum();
        1.0 - kept
    }
}

fn scale_columns(v: &DMatrix<Complex64>, w: &[f64], f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
    let mut out = v.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= Complex64::new(f(w[j]), 0.0);
    }
    out
}

fn log_trace_power(singular: &DVector<f64>, alpha: f64) -> Result<f64> {
    let total: f64 = singular.iter().filter(|&&s| s > 0.0).map(|s| s.powf(2.0 * alpha)).sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("sandwiched operator vanishes on the truncated space".into()));
    }
    Ok(total.ln() / (alpha - 1.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// Sandwiched entropy of two recipe-built states from their exact spectral forms:
/// `Tr X^α = Σ s_i^{2α}` over the singular values of `σ^p ρ^{½}`, `p = (1-α)/(2α)`.
pub fn spectral_sandwiched_renyi(rho: &FockState, sigma: &FockState, alpha: f64) -> Result<f64> {
    spectral_sandwiched_renyi_sweep(rho, sigma, &[alpha]).map(|v| v[0])
}

/// [`spectral_sandwiched_renyi`] for several `α`, sharing the `α`-independent products.
pub fn spectral_sandwiched_renyi_sweep(rho: &FockState, sigma: &FockState, alphas: &[f64]) -> Result<Vec<f64>> {
    for &alpha in alphas {
        check_alpha(alpha)?;
    }
    if rho.n_modes != sigma.n_modes || rho.cutoff != sigma.cutoff {
        return Err(Error::Shape("states live on different truncated spaces".into()));
    }
    let overlap = scale_columns(&(sigma.v.adjoint() * &rho.v), &rho.lambda, |x| x.max(0.0).sqrt());
    alphas
        .iter()
        .map(|&alpha| {
            let p = (1.0 - alpha) / (2.0 * alpha);
            let left = scale_columns(&sigma.v, &sigma.lambda, |x| if x > 0.0 { x.powf(p) } else { 0.0 });
            log_trace_power(&(left * &overlap).singular_values(), alpha)
        })
        .collect()
}

/// Hermitian power on the non-negative part of the spectrum.
fn hermitian_power(h: &FockOperator, p: f64) -> Result<DMatrix<Complex64>> {
    let residual = h.hermiticity_residual();
    if residual > TOL_HERMITIAN {
        return Err(Error::InvalidParameters(format!(
            "operator is not hermitian (|X - X†| = {residual:.3e})"
        )));
    }
    let sym = (&h.mat + h.mat.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = hermitian_eigen(&sym);
    let w: Vec<f64> = values.iter().copied().collect();
    let scaled = scale_columns(&vectors, &w, |x| if x > 0.0 { x.powf(p) } else { 0.0 });
    Ok(scaled * vectors.adjoint())
}

/// `(α-1)⁻¹ ln Tr (σ^p ρ σ^p)^α` from dense matrices, `p = (1-α)/(2α)`.
/// Negative eigenvalues from rounding are treated as zero.
pub fn dense_sandwiched_renyi(rho: &FockOperator, sigma: &FockOperator, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    rho.same_space(sigma)?;
    let p = (1.0 - alpha) / (2.0 * alpha);
    let b = hermitian_power(sigma, p)? * hermitian_power(rho, 0.5)?;
    log_trace_power(&b.singular_values(), alpha)
}

/// Mean and covariance of `ρ/Tr ρ` in the library's phase-space convention.
pub fn moments(rho: &FockOperator) -> Result<GaussianState> {
    let n = rho.n_modes;
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Degenerate("operator has no weight".into()));
    }
    let ex = |op: &DMatrix<Complex64>| -> Complex64 { (&rho.mat * op).trace() / tr };
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut quads = Vec::with_capacity(2 * n);
    let mut annihilators = Vec::with_capacity(n);
    for mode in 0..n {
        annihilators.push(annihilator(mode, n, rho.cutoff)?.into_matrix());
    }
    // q_j then p_j, in (q_1..q_n, p_1..p_n) order.
    for a in &annihilators {
        quads.push((a + a.adjoint()) / Complex64::new(sqrt2, 0.0));
    }
    for a in &annihilators {
        quads.push((a - a.adjoint()) / Complex64::new(0.0, sqrt2));
    }
    let means: Vec<f64> = quads.iter().map(|q| ex(q).re).collect();
    let mut s_qp = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 * n {
        for k in i..2 * n {
            let anti = &quads[i] * &quads[k] + &quads[k] * &quads[i];
            let v = 0.5 * ex(&anti).re - means[i] * means[k];
            s_qp[(i, k)] = v;
            s_qp[(k, i)] = v;
        }
    }
    let j = symplectic_form(n);
    let cov = &j * s_qp * j.transpose();
    let mut mean = DVector::zeros(2 * n);
    for (mode, a) in annihilators.iter().enumerate() {
        let m = ex(a);
        mean[mode] = m.re;
        mean[n + mode] = m.im;
    }
    GaussianState::new(mean, cov)
}

/// `⟨e(ū)|ρ|e(v)⟩ = Σ_{k,l} u^k/√k! ρ_{kl} v^l/√l!` on the truncated basis.
pub fn generating_function(rho: &FockOperator, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
    let n = rho.n_modes;
    if u.len() != n || v.len() != n {
        return Err(Error::Shape(format!("u and v must have {n} entries")));
    }
    let vector = |z: &[Complex64]| -> DVector<Complex64> {
        let mut out = DVector::from_element(1, ONE);
        for &zj in z {
            let mut coeffs = Vec::with_capacity(rho.cutoff);
            let mut term = ONE;
            for k in 0..rho.cutoff {
                if k > 0 {
                    term = term * zj / (k as f64).sqrt();
                }
                coeffs.push(term);
            }
            out = out.kronecker(&DVector::from_vec(coeffs));
        }
        out
    };
    let left = vector(u);
    let right = vector(v);
    Ok((left.transpose() * &rho.mat * right)[(0, 0)])
}

/// Outcome of a cutoff-doubling comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converged {
    pub value: f64,
    pub coarse_value: f64,
    pub delta: f64,
    pub coarse: usize,
    pub fine: usize,
}

/// Evaluates `f` at two cutoffs and accepts the finer value only if both agree within `tol`.
pub fn converge(
    coarse: usize,
    fine: usize,
    tol: f64,
    mut f: impl FnMut(usize) -> Result<f64>,
) -> Result<Converged> {
    let coarse_value = f(coarse)?;
    let value = f(fine)?;
    let delta = (value - coarse_value).abs();
    if !(delta <= tol) {
        return Err(Error::NotConverged {
            coarse,
            fine,
            delta,
            tol,
        });
    }
    Ok(Converged {
        value,
        coarse_value,
        delta,
        coarse,
        fine,
    })
}
