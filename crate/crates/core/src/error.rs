use thiserror::Error;

pub type Result<T> = std::result::Result<T, TollError>;

#[derive(Debug, Error)]
pub enum TollError {
    #[error("grid is not square: row {row} has {cols} columns, expected {expected}")]
    NotSquare { row: usize, cols: usize, expected: usize },

    #[error("negative toll {value} on trip [{entry},{exit}]")]
    NegativeToll { entry: usize, exit: usize, value: f64 },

    #[error("nonzero toll below the diagonal at ({entry},{exit})")]
    LowerTriangularNonzero { entry: usize, exit: usize },

    #[error("non-finite toll on trip [{entry},{exit}]")]
    NonFinite { entry: usize, exit: usize },

    #[error("duplicate trip [{entry},{exit}]")]
    DuplicateTrip { entry: usize, exit: usize },

    #[error("trip [{entry},{exit}] is out of range for {n} segments")]
    IndexOutOfRange { entry: usize, exit: usize, n: usize },

    #[error("a highway needs at least one segment")]
    EmptyHighway,

    #[error("matrices have different segment counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("density must lie in (0, 1], got {0}")]
    InvalidDensity(f64),

    #[error("maximum toll must be positive and finite, got {0}")]
    InvalidMaxToll(f64),

    #[error("blocks do not partition the segments: {0}")]
    BlocksNotPartition(String),

    #[error("scheme assigns inadmissible weight {value} to segment {segment} on trip [{entry},{exit}]")]
    NegativeWeight { entry: usize, exit: usize, segment: usize, value: f64 },

    #[error("unknown weight scheme `{0}`")]
    UnknownScheme(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),

    #[error("unknown solution concept `{0}`")]
    UnknownSolution(String),

    #[error("{n} segments exceed the exhaustive enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("tau-value undefined: utopia and minimal rights coincide but do not sum to v(N)")]
    TauUndefined,

    #[error("vector length {got} does not match {expected} segments")]
    LengthMismatch { expected: usize, got: usize },

    #[error("allocation share {value} for segment {segment} is negative or non-finite")]
    InvalidShare { segment: usize, value: f64 },

    #[error("allocation total is zero")]
    ZeroTotal,

    #[error("correlation needs at least two observations")]
    TooShort,

    #[error("correlation undefined for a constant vector")]
    ConstantVector,

    #[error("independence harness mismatch: method {method} on axiom {axiom}: {detail}")]
    HarnessMismatch { method: String, axiom: String, detail: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
