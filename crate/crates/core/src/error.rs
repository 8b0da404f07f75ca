use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible")]
    NotIrreducible,
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field too large: {0}")]
    FieldTooLarge(String),
    #[error("field too large; use counting bound instead")]
    BudgetExceeded,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("not homogeneous")]
    NotHomogeneous,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("line contained in curve (input not smooth)")]
    LineInCurve,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("singular point")]
    SingularPoint,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("Hessian degenerate in this characteristic")]
    HessianDegenerate,
    #[error("infinitely many flexes")]
    InfinitelyManyFlexes,
    #[error("coordinate change not found after {0} attempts")]
    NoCoordinateChange(usize),
    #[error("unknown fixture: {0}")]
    UnknownFixture(String),
    #[error("wrong characteristic: {0}")]
    WrongCharacteristic(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
