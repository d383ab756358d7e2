use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("characteristic {0} is not an odd prime")]
    BadCharacteristic(u32),

    #[error("extension degree must be at least 1")]
    BadDegree,

    #[error("field of order {0} is larger than the supported table size")]
    FieldTooLarge(u64),

    #[error("zero is not a unit")]
    ZeroElement,

    #[error("element does not lie in the group of the character (order {order})")]
    NotInGroup { order: u32 },

    #[error("value is not a rational integer (approximately {re} + {im}i)")]
    NonIntegral { re: f64, im: f64 },

    #[error("eigenvalue for {label} is not integral: {detail}")]
    NonIntegralEigenvalue { label: String, detail: String },

    #[error("matrix is not in the group: {0}")]
    NotInGroupMatrix(String),

    #[error("character {irr} has no tabulated value at class {class}")]
    Untabulated { irr: String, class: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("group order {order} exceeds the brute-force bound {bound}")]
    BoundExceeded { order: u64, bound: u64 },

    #[error("q = {0} is not congruent to 3 mod 4")]
    NotThreeModFour(u32),

    #[error("labels from different groups")]
    Mismatch,

    #[error("invalid coset element: {0}")]
    InvalidCosetElement(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
