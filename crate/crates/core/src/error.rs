use thiserror::Error;

/// Errors raised by the algebra and the pipelines built on it.
///
/// The variants group into the three exit classes of the command-line tool:
/// configuration problems, precision shortfalls, and violated mathematical
/// preconditions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("field size {size} exceeds the bound {bound}")]
    SizeBound { size: u64, bound: u64 },
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("element is not a unit: {0}")]
    NotUnit(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("zero polynomial has no {0}")]
    ZeroPolynomial(&'static str),
    #[error("rank 0: the module has no coefficient above the constant term")]
    RankZero,
    #[error("characteristic divides f: gamma(f) is not a unit")]
    CharacteristicDividesLevel,
    #[error("torsion not rational over any extension of degree <= {0}")]
    TorsionSearchExhausted(u32),
    #[error("not a basis: images generate {found} of {expected} torsion points")]
    NotABasis { found: usize, expected: usize },
    #[error("point is not f-torsion")]
    NotTorsion,
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("potentially stable only: {0}")]
    NonIntegralSlope(String),
    #[error("no lattice: {0}")]
    NoLattice(String),
    #[error("not in N: {0}")]
    NotInN(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::SizeBound { .. }
            | Error::ReducibleModulus(_)
            | Error::DomainMismatch(_) => 2,
            Error::Precision(_) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
