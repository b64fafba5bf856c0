use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input is not allowed")]
    EmptyInput,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("code {code} at row {row} is out of range for {n_categories} categories")]
    CodeOutOfRange {
        row: usize,
        code: usize,
        n_categories: usize,
    },
    #[error("a series needs at least one category")]
    NoCategories,
    #[error("table would have {cells} cells, cap is {cap}")]
    TooManyCells { cells: usize, cap: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("expected a 2x2 table, got dims {0:?}")]
    NotTwoByTwo(Vec<usize>),
    #[error("table has no observations")]
    EmptyTable,
    #[error("argument must be non-negative, got {0}")]
    Negative(f64),
    #[error("probability must lie strictly inside (0, 1), got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("invalid range: lower {lower} must be below upper {upper}")]
    InvalidRange { lower: f64, upper: f64 },
    #[error("threshold grid needs at least one point")]
    EmptyGrid,
    #[error("value {value} lies outside [{lower}, {upper}]")]
    OutOfRange { value: f64, lower: f64, upper: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least 4 rows to split, got {0}")]
    TooFewRows(usize),
    #[error("column `{0}` must be binary")]
    NotBinary(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("continuous column `{0}` has no threshold range")]
    MissingRange(String),
    #[error("no threshold available for continuous column `{0}`")]
    MissingThreshold(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
