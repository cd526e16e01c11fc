//! Sandwiched Rényi relative α-entropy between multimode Gaussian states.
//!
//! The closed-form route reduces `σ` to thermal form, represents the
//! sandwiched operator as a positive E₂ operator and reads off its trace and
//! spectrum from the quadruple `(c, μ, A, Λ)`. The [`fock`] module is an
//! independent brute-force oracle on a truncated Fock space.
//!
//! ```
//! use gauss_renyi::{sandwiched_renyi, GaussianState};
//!
//! let rho = GaussianState::thermal(&[2f64.ln()]).unwrap();
//! let sigma = GaussianState::thermal(&[4f64.ln()]).unwrap();
//! let report = sandwiched_renyi(&rho, &sigma, 0.5).unwrap();
//! assert!((report.divergence - 0.108_30).abs() < 1e-5);
//! ```

pub mod e2;
pub mod error;
pub mod fock;
pub mod gaussian;
mod linalg;
pub mod renyi;
pub mod williamson;
pub mod sample;
pub mod io;
pub mod verify;
pub mod cli;

pub use e2::{
    c_of, e2_to_state, gamma_sandwich, generating_function, m_matrix, state_to_e2, trace_positive_e2, ASign,
    DiagonalContraction, E2Quadruple, MMatrix,
};
pub use error::{Error, Result};
pub use gaussian::{
    coherent_state, squeezed_vacuum, symplectic_form, tensor, thermal_state, validate_state, GaussianState,
    SymplecticMatrix, ThermalSpec, Violation,
};
pub use renyi::{k_matrix, p_of, reduce_sigma, sandwiched_renyi, sandwiched_renyi_sweep, EntropyReport};
pub use williamson::{d_to_t, symplectic_eigenvalues, t_to_d, williamson_decompose, WilliamsonForm};
