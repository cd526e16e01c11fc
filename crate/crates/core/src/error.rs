use thiserror::Error;

/// Failures of the Gaussian-state calculus and the Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("0<alpha<1 required, got alpha = {0}")]
    AlphaOutOfRange(f64),

    #[error("not trace class: M(A,Λ) must be positive definite, minimum eigenvalue {0:.3e}")]
    NotTraceClass(f64),

    #[error("operator not positive/trace-class in this parametrization: M(A,Λ) has minimum eigenvalue {0:.3e}")]
    NotPositive(f64),

    #[error("parameters do not describe a normalizable gaussian state: M(-A,Λ) has minimum eigenvalue {0:.3e}")]
    NotNormalizable(f64),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error(
        "sigma must be faithful: sandwiched divergence requires supp ρ ⊆ supp σ; \
         pure σ modes unsupported (mode {mode} has symplectic eigenvalue {d})"
    )]
    NotFaithful { mode: usize, d: f64 },

    #[error("contraction violation: K[{index}] = {value} lies outside [0,1]")]
    Contraction { index: usize, value: f64 },

    #[error("invalid E2 parameters: {0}")]
    InvalidParameters(String),

    #[error("degenerate cluster near symplectic eigenvalue {d}: pairing leaves |LᵀJL - J| = {residual:.3e}")]
    DegenerateCluster { d: f64, residual: f64 },

    #[error("invalid thermal parameters: {0}")]
    InvalidThermal(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported recipe: {0}")]
    UnsupportedRecipe(String),

    #[error("cutoff not converged: values at cutoffs {coarse} and {fine} differ by {delta:.3e} > {tol:.1e}")]
    NotConverged { coarse: usize, fine: usize, delta: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
