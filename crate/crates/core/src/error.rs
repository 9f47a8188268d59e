use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field of order {p}^{degree} exceeds the supported envelope of 2^20 elements")]
    FieldTooLarge { p: u32, degree: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0}")]
    NotIrreducible(u32),
    #[error("given elements do not form a basis")]
    DependentBasis,
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("operands live over different field towers")]
    TowerMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("twist coefficient violates the norm condition")]
    InvalidDelta,
    #[error("element does not generate the extension field")]
    NotPrimitiveElement,
    #[error("unsupported code shape: length {n} exceeds extension degree {m}")]
    UnsupportedShape { n: usize, m: usize },
    #[error("resource budget exceeded: estimate {estimate} > budget {budget}")]
    ResourceBudgetExceeded { estimate: String, budget: String },
    #[error("the F_q-subspace is degenerate (dimension {0} below the expected {1})")]
    DegenerateSubspace(usize, usize),
    #[error("missing base value for t = {0}")]
    MissingBaseValue(usize),
    #[error("constructed code is not MRD (minimum distance {found}, expected {expected})")]
    NotMrd { found: usize, expected: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Fails with `ResourceBudgetExceeded` when `estimate > budget`.
pub(crate) fn check_budget(estimate: &num_bigint::BigUint, budget: u64) -> Result<()> {
    if *estimate > num_bigint::BigUint::from(budget) {
        return Err(Error::ResourceBudgetExceeded {
            estimate: estimate.to_string(),
            budget: budget.to_string(),
        });
    }
    Ok(())
}
