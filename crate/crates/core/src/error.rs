use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("exponent r must be at least 1, got {0}")]
    InvalidExponent(u32),
    #[error("dimension g must be at least 1")]
    InvalidDimension,
    #[error("ell = {0} must be a prime different from p")]
    EllEqualsP(u64),
    #[error("ell = {0} is not prime")]
    EllNotPrime(u64),
    #[error("expected {expected} residues, got {found}")]
    ResidueLength { expected: usize, found: usize },
    #[error("residue {value} is not reduced modulo {ell}")]
    ResidueNotReduced { value: u64, ell: u64 },
    #[error("the zero polynomial has no root structure")]
    ZeroPolynomial,
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("root iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: census has g = {census}, volume estimate has g = {volume}")]
    DimensionMismatch { census: usize, volume: usize },
    #[error("coefficient box does not fit in 128-bit integers")]
    BoxTooLarge,
    #[error("{ell}^{g} residue classes are too many to tabulate")]
    TooManyClasses { ell: u64, g: usize },
    #[error("sample count must be at least 1")]
    InvalidSamples,
    #[error("box scale must be positive and finite")]
    InvalidBoxScale,
    #[error("empty exponent range {r_min}..={r_max}")]
    EmptyRange { r_min: u32, r_max: u32 },
    #[error("congruence selects {found} residue classes, expected {expected}")]
    ClassCount { expected: u64, found: u64 },
    #[error("census at r = {r}: {source}")]
    Sweep {
        r: u32,
        #[source]
        source: Box<WeilError>,
    },
}

pub type Result<T> = std::result::Result<T, WeilError>;
