//! Random Gaussian states, symplectic matrices and oracle recipes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::fock::Recipe;
use crate::gaussian::{GaussianState, SymplecticMatrix};
use crate::williamson::t_to_d;

/// Ranges for [`random_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRanges {
    /// Thermal parameters are drawn uniformly from this interval.
    pub t: (f64, f64),
    /// Probability that a mode is pure (`t = ∞`); zero gives faithful states.
    pub pure_probability: f64,
    /// Largest single-mode squeezing used in the symplectic part.
    pub max_squeeze: f64,
    /// Standard deviation of each mean component.
    pub mean_scale: f64,
}

impl Default for StateRanges {
    fn default() -> Self {
        Self {
            t: (0.3, 3.0),
            pure_probability: 0.0,
            max_squeeze: 0.6,
            mean_scale: 0.7,
        }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-random `n×n` unitary (QR of a complex Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(normal(rng), normal(rng)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Orthogonal symplectic matrix `[[Re U, -Im U], [Im U, Re U]]`.
pub fn passive_symplectic(u: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = u[(i, j)];
            o[(i, j)] = z.re;
            o[(i, n + j)] = -z.im;
            o[(n + i, j)] = z.im;
            o[(n + i, n + j)] = z.re;
        }
    }
    o
}

/// `O₁ · diag(e^{r}, e^{-r}) · O₂` with passive `O₁`, `O₂` and `|r_j| ≤ max_squeeze`.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, max_squeeze: f64, rng: &mut R) -> SymplecticMatrix {
    let o1 = passive_symplectic(&random_unitary(n, rng));
    let o2 = passive_symplectic(&random_unitary(n, rng));
    let r: Vec<f64> = (0..n).map(|_| rng.gen_range(-max_squeeze..=max_squeeze)).collect();
    let squeeze = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| {
        if i < n {
            r[i].exp()
        } else {
            (-r[i - n]).exp()
        }
    }));
    SymplecticMatrix::new_unchecked(o1 * squeeze * o2)
}

/// Random physical state `S = G diag(d, d) Gᵀ` with a random mean.
pub fn random_state<R: Rng + ?Sized>(n: usize, ranges: &StateRanges, rng: &mut R) -> GaussianState {
    let t: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < ranges.pure_probability {
                f64::INFINITY
            } else {
                rng.gen_range(ranges.t.0..=ranges.t.1)
            }
        })
        .collect();
    let g = random_symplectic(n, ranges.max_squeeze, rng).into_matrix();
    let d = DMatrix::from_diagonal(&DVector::from_fn(2 * n, |i, _| t_to_d(t[i % n])));
    let cov = &g * d * g.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = DVector::from_fn(2 * n, |_, _| ranges.mean_scale * normal(rng));
    GaussianState::new(mean, cov).expect("finite sample")
}

/// Random faithful state with default ranges.
pub fn random_faithful_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GaussianState {
    random_state(n, &StateRanges::default(), rng)
}

/// Bounds for [`random_recipe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeRanges {
    pub t: (f64, f64),
    pub pure: bool,
    pub max_squeeze: f64,
    pub max_displacement: f64,
}

impl Default for RecipeRanges {
    fn default() -> Self {
        Self {
            t: (0.5, 2.0),
            pure: false,
            max_squeeze: 0.5,
            max_displacement: 1.5,
        }
    }
}

fn in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Random one- or two-mode recipe; two-mode recipes always include a beam splitter.
pub fn random_recipe<R: Rng + ?Sized>(n: usize, ranges: &RecipeRanges, rng: &mut R) -> Recipe {
    let t: Vec<f64> = (0..n)
        .map(|_| {
            if ranges.pure {
                f64::INFINITY
            } else {
                rng.gen_range(ranges.t.0..=ranges.t.1)
            }
        })
        .collect();
    let z: Vec<Complex64> = (0..n).map(|_| in_disc(ranges.max_squeeze, rng)).collect();
    let gamma: Vec<Complex64> = (0..n).map(|_| in_disc(ranges.max_displacement, rng)).collect();
    let recipe = Recipe::thermal(&t).with_squeeze(&z).with_displacement(&gamma);
    if n == 2 {
        recipe.with_beam_splitter(
            rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        )
    } else {
        recipe
    }
}
