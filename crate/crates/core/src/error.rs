use thiserror::Error;

/// Errors raised by model construction, the eigensolvers and the Juddian search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling |lambda| = {lambda} violates the normalisability bound |lambda| < 1/2")]
    OutsideValidity { lambda: f64 },

    #[error("squeezing |sigma| = {sigma} must be < 1 for a normalisable state")]
    NotNormalisable { sigma: f64 },

    #[error("non-finite matrix entry at index {0}")]
    NonFinite(usize),

    #[error("requested {requested} eigenpairs from a matrix of dimension {dim}")]
    TooManyEigenpairs { requested: usize, dim: usize },

    #[error("QL iteration failed to converge for eigenvalue {0}")]
    NoConvergence(usize),

    #[error("lowest {levels} eigenvalues not converged to {tol:e} by n_max = {n_max}")]
    TruncationNotConverged { levels: usize, tol: f64, n_max: usize },

    #[error("inverse iteration found no eigenpair near {target} (residual {residual:e})")]
    NoEigenpair { target: f64, residual: f64 },

    #[error("squeezed number state n = {n} needs n_max >= {needed} (got {n_max})")]
    InsufficientHeadroom { n: usize, n_max: usize, needed: usize },

    #[error("Juddian order N = {0} is below the minimum value of 2")]
    OrderTooLow(usize),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("ansatz residual {residual:e} exceeds {threshold:e}")]
    VerificationFailed { residual: f64, threshold: f64 },

    #[error("parity expectation {re:+.3e}{im:+.3e}i is {deviation:e} from the nearest fourth root of unity")]
    AmbiguousParity { re: f64, im: f64, deviation: f64 },

    #[error("parity of sector {sector} changes across the crossing at lambda = {lambda}")]
    InconsistentParity { sector: String, lambda: f64 },

    #[error("parity rule and Bargmann rule disagree for the crossing at lambda = {lambda}")]
    RuleDisagreement { lambda: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
