use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice extent: {0}")]
    InvalidExtent(String),
    #[error("dense dimension limit exceeded: {sites} sites requested, limit is {limit}")]
    DimensionLimit { sites: usize, limit: usize },
    #[error("ground state is degenerate: gap {gap:e} below tolerance {tol:e}")]
    DegenerateGroundState { gap: f64, tol: f64 },
    #[error("partial trace needs at least one kept site")]
    EmptyKeepSet,
    #[error("site {0} is not carried by this operator")]
    SiteNotPresent(usize),
    #[error("negative exponent {0}")]
    NegativeExponent(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent range exceeded while building a thermal state")]
    NumericalOverflow,
    #[error("error rate {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error("denominator Tr[rho^n] = {0:e} is numerically zero")]
    VanishingDenominator(f64),
    #[error("state is not pure: purity {0}")]
    NotPure(f64),
    #[error("eigenvalue floor changed the trace by {0:e}")]
    RankDeficient(f64),
    #[error("sampled denominator mean {0} is not positive")]
    DenominatorEstimateZero(f64),
    #[error("not a valid correlation matrix: {0}")]
    NotAValidCorrelation(String),
    #[error("determinant {0:e} is negative beyond roundoff")]
    NegativeDeterminant(f64),
    #[error("quadrature failed to converge: change {change:e} after {nodes} nodes")]
    QuadratureNotConverged { nodes: usize, change: f64 },
    #[error("operator is not Hermitian: defect {0:e}")]
    NotHermitian(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse Pauli string at position {position}: {reason}")]
    PauliParse { position: usize, reason: String },
    #[error("eigendecomposition failed to converge")]
    Eigensolver,
}

pub type Result<T> = std::result::Result<T, Error>;
