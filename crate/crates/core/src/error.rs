use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
///
/// Every variant names the condition that stopped the computation; none of
/// them are recovered from internally.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("leading initial minor tau_[{k}] vanishes; LU factorization does not exist")]
    ZeroLeadingMinor { k: usize },

    #[error("zero pivot at elimination step {k}")]
    ZeroPivot { k: usize },

    #[error("leading {k}x{k} block is singular")]
    SingularBlock { k: usize },

    #[error("degenerate factorization: {0}")]
    DegenerateFactorization(String),

    #[error("QR iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("spectrum has imaginary parts up to {max_imag:e} (tolerance {tolerance:e})")]
    ComplexSpectrum { max_imag: f64, tolerance: f64 },

    #[error("dimension {n} exceeds the limit {max} for this operation")]
    DimensionGuard { n: usize, max: usize },

    #[error("matrix is not lower Hessenberg")]
    NotHessenberg,

    #[error("matrix is not lower Hessenberg with unit superdiagonal")]
    NotUnitHessenberg,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("imaginary residue {residue:e} of the circle average exceeds {tolerance:e}")]
    ImagResidueTooLarge { residue: f64, tolerance: f64 },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("verification of {what} failed: residual {residual:e} > {tolerance:e}")]
    VerificationFailed {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("eigenvalues {i} and {j} coincide")]
    RepeatedEigenvalue { i: usize, j: usize },

    #[error("supplied eigenvalues do not match the spectrum (relative mismatch {mismatch:e})")]
    SpectrumMismatch { mismatch: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// The variant name, for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroLeadingMinor { .. } => "ZeroLeadingMinor",
            Error::ZeroPivot { .. } => "ZeroPivot",
            Error::SingularBlock { .. } => "SingularBlock",
            Error::DegenerateFactorization(_) => "DegenerateFactorization",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ComplexSpectrum { .. } => "ComplexSpectrum",
            Error::DimensionGuard { .. } => "DimensionGuard",
            Error::NotHessenberg => "NotHessenberg",
            Error::NotUnitHessenberg => "NotUnitHessenberg",
            Error::NotSquare { .. } => "NotSquare",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::ImagResidueTooLarge { .. } => "ImagResidueTooLarge",
            Error::Overflow(_) => "Overflow",
            Error::VerificationFailed { .. } => "VerificationFailed",
            Error::RepeatedEigenvalue { .. } => "RepeatedEigenvalue",
            Error::SpectrumMismatch { .. } => "SpectrumMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
