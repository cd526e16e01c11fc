//! Built-in comparison of the closed form against the Fock-space oracle.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{dense_sandwiched_renyi, spectral_sandwiched_renyi_sweep, state_to_fock, thermal_density, Recipe};
use crate::renyi::sandwiched_renyi_sweep;

/// Default comparison tolerance for one-mode instances.
pub const TOL_ONE_MODE: f64 = 1e-6;
/// Default comparison tolerance for two-mode instances.
pub const TOL_TWO_MODE: f64 = 1e-4;
/// Default one-mode cutoff; the guard compares it with its double.
pub const DEFAULT_CUTOFF: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Thermal,
    OneMode,
    TwoMode,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Self> {
        match name.trim() {
            "thermal" => Some(Suite::Thermal),
            "one-mode" | "1" => Some(Suite::OneMode),
            "two-mode" | "2" => Some(Suite::TwoMode),
            _ => None,
        }
    }

    pub fn all() -> Vec<Self> {
        vec![Suite::Thermal, Suite::OneMode, Suite::TwoMode]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub rho: Recipe,
    pub sigma: Recipe,
    pub alphas: Vec<f64>,
    pub tol: f64,
    /// Coarse and fine cutoff of the convergence guard.
    pub cutoffs: (usize, usize),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Per-mode cutoffs of two-mode instances derived from the one-mode cutoff.
pub fn two_mode_cutoffs(cutoff: usize) -> (usize, usize) {
    let fine = (cutoff / 3).clamp(4, 20);
    ((fine * 4 / 5).max(3), fine)
}

pub fn builtin_suite(suites: &[Suite], cutoff: usize, tol: Option<f64>) -> Vec<Instance> {
    let one = (cutoff, 2 * cutoff);
    let two = two_mode_cutoffs(cutoff);
    let mut out = Vec::new();
    for suite in suites {
        match suite {
            Suite::Thermal => out.push(Instance {
                name: "thermal ln2 vs ln4".into(),
                rho: Recipe::thermal(&[2f64.ln()]),
                sigma: Recipe::thermal(&[4f64.ln()]),
                alphas: vec![0.3, 0.5, 0.7],
                tol: tol.unwrap_or(TOL_ONE_MODE),
                cutoffs: one,
            }),
            Suite::OneMode => {
                out.push(Instance {
                    name: "coherent 1 vs thermal ln2".into(),
                    rho: Recipe::single(f64::INFINITY, c(0.0, 0.0), c(1.0, 0.0)),
                    sigma: Recipe::thermal(&[2f64.ln()]),
                    alphas: vec![0.3, 0.5, 0.7],
                    tol: tol.unwrap_or(TOL_ONE_MODE),
                    cutoffs: one,
                });
                out.push(Instance {
                    name: "squeezed-displaced vs squeezed thermal".into(),
                    rho: Recipe::single(1.0, c(0.4, 0.0), c(0.7, 0.3)),
                    sigma: Recipe::single(0.8, c(-0.3, 0.2), c(0.2, -0.1)),
                    alphas: vec![0.3, 0.5, 0.7, 0.9],
                    tol: tol.unwrap_or(TOL_ONE_MODE),
                    cutoffs: one,
                });
                out.push(Instance {
                    name: "pure squeezed-displaced vs thermal".into(),
                    rho: Recipe::single(f64::INFINITY, c(0.0, 0.5), c(-1.2, 0.6)),
                    sigma: Recipe::thermal(&[0.9]),
                    alphas: vec![0.5, 0.7],
                    tol: tol.unwrap_or(TOL_ONE_MODE),
                    cutoffs: one,
                });
            }
            Suite::TwoMode => {
                out.push(Instance {
                    name: "two-mode mixed vs squeezed thermal".into(),
                    rho: Recipe::thermal(&[1.2, f64::INFINITY])
                        .with_squeeze(&[c(0.3, 0.1), c(-0.2, 0.2)])
                        .with_beam_splitter(0.6, 0.4)
                        .with_displacement(&[c(0.5, -0.3), c(0.2, 0.4)]),
                    sigma: Recipe::thermal(&[0.9, 1.4])
                        .with_squeeze(&[c(0.2, 0.0), c(0.0, 0.3)])
                        .with_beam_splitter(0.3, -0.5)
                        .with_displacement(&[c(0.1, 0.0), c(0.0, -0.2)]),
                    alphas: vec![0.5, 0.7],
                    tol: tol.unwrap_or(TOL_TWO_MODE),
                    cutoffs: two,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    NotConverged,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotConverged => "cutoff not converged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub alpha: f64,
    pub closed_form: f64,
    /// Oracle value at the fine cutoff.
    pub oracle: f64,
    /// Oracle value at the coarse cutoff.
    pub coarse_oracle: f64,
    /// `|oracle(coarse) - oracle(fine)|`.
    pub guard_delta: f64,
    pub diff: f64,
    pub tol: f64,
    pub cutoffs: (usize, usize),
    pub status: Status,
}

fn oracle_values(inst: &Instance, cutoff: usize) -> Result<Vec<f64>> {
    let thermal_only = |r: &Recipe| r.modes() == 1 && r.squeeze[0].norm() == 0.0 && r.displacement[0].norm() == 0.0;
    if thermal_only(&inst.rho) && thermal_only(&inst.sigma) && inst.rho.thermal[0].is_finite() && inst.sigma.thermal[0].is_finite() {
        let rho = thermal_density(inst.rho.thermal[0], cutoff)?;
        let sigma = thermal_density(inst.sigma.thermal[0], cutoff)?;
        return inst.alphas.iter().map(|&a| dense_sandwiched_renyi(&rho, &sigma, a)).collect();
    }
    let rho = state_to_fock(&inst.rho, cutoff)?;
    let sigma = state_to_fock(&inst.sigma, cutoff)?;
    spectral_sandwiched_renyi_sweep(&rho, &sigma, &inst.alphas)
}

pub fn run_instance(inst: &Instance) -> Result<Vec<Outcome>> {
    let closed = sandwiched_renyi_sweep(&inst.rho.gaussian_state()?, &inst.sigma.gaussian_state()?, &inst.alphas)?;
    let coarse = oracle_values(inst, inst.cutoffs.0)?;
    let fine = oracle_values(inst, inst.cutoffs.1)?;
    Ok(inst
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let guard_delta = (fine[i] - coarse[i]).abs();
            let diff = (closed[i].divergence - fine[i]).abs();
            let status = if !(guard_delta <= inst.tol) {
                Status::NotConverged
            } else if diff <= inst.tol {
                Status::Pass
            } else {
                Status::Fail
            };
            Outcome {
                name: inst.name.clone(),
                alpha,
                closed_form: closed[i].divergence,
                oracle: fine[i],
                coarse_oracle: coarse[i],
                guard_delta,
                diff,
                tol: inst.tol,
                cutoffs: inst.cutoffs,
                status,
            }
        })
        .collect())
}
