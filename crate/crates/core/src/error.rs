use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by the arithmetic, evaluation and search layers.
///
/// `NotInGamma` and `Integrality` are not ordinary input errors: they mean a
/// proven congruence or integrality statement failed, which can only be an
/// implementation bug. Callers surface them as critical findings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: BigInt, m: BigInt },
    #[error("moduli {m1} and {m2} are not coprime")]
    ModuliNotCoprime { m1: BigInt, m2: BigInt },
    #[error("invalid modulus {0}")]
    InvalidModulus(BigInt),
    #[error("arguments {a} and {b} are not coprime")]
    NotCoprime { a: BigInt, b: BigInt },
    #[error("{l} * {l_star} is not 1 modulo {q}")]
    BadInverse {
        l: BigInt,
        l_star: BigInt,
        q: BigInt,
    },
    #[error("precondition failed: {0}")]
    PreconditionFailed(Precondition),
    #[error("critical: residue {residue} is not in Gamma_{q} (d = {d})")]
    NotInGamma {
        q: BigInt,
        residue: BigInt,
        d: BigInt,
    },
    #[error("critical: {0} is not an integer")]
    Integrality(String),
    #[error("critical: identity failed: {0}")]
    Identity(String),
}

impl Error {
    /// True for failures that contradict a theorem rather than bad input.
    pub fn is_critical(&self) -> bool {
        matches!(
            self,
            Error::NotInGamma { .. } | Error::Integrality(_) | Error::Identity(_)
        )
    }
}

/// Named precondition violations, so search drivers can skip and log why.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Precondition {
    #[error("t must be positive")]
    TNotPositive,
    #[error("t does not divide a^2+1")]
    TNotDividingASquaredPlusOne,
    #[error("gcd(a*q, t) != 1")]
    AqNotCoprimeToT,
    #[error("t*t_star is not 1 mod q")]
    TStarNotInverse,
    #[error("gcd(t, q) != 1")]
    TNotCoprimeToQ,
    #[error("q must be at least 2")]
    QTooSmall,
    #[error("gcd(q, a^2+1) != 1")]
    QNotCoprimeToASquaredPlusOne,
    #[error("gcd(a + t*j, q) != 1")]
    ShiftedANotCoprimeToQ,
    #[error("gcd(x, y) != 1")]
    XyNotCoprime,
    #[error("gcd(x^2+y^2, q) != 1")]
    NormNotCoprimeToQ,
    #[error("(x, y) = (0, 0)")]
    ZeroPair,
    #[error("no seed construction for q = {q} with g = {g}")]
    SeedShape { q: u64, g: u64 },
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
