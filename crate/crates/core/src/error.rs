use thiserror::Error;

use crate::arrangement::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid arrangement: {0}")]
    InvalidInput(String),

    #[error("subtori[{index}].shift[{coord}]: {value} is not a rational number (use \"p/q\" or an integer)")]
    NonRationalShift { index: usize, coord: usize, value: String },

    #[error("subtori[{index}].directions: columns are not linearly independent")]
    RankDeficientDirections { index: usize },

    #[error("subtori[{index}] equals the whole torus; the complement is empty")]
    FullTorusMember { index: usize },

    #[error("stratum {subset} has {components} components; the connected model needs connected strata")]
    DisconnectedStratum { subset: Subset, components: usize },

    #[error("non-integral coefficient {0} in a matrix that must be integral")]
    NonIntegralCoefficient(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("inconsistent atlas: {0}")]
    Inconsistent(String),

    #[error("unsupported torus dimension {0} (this oracle needs n = 2)")]
    UnsupportedDimension(usize),

    #[error("unsupported input for this oracle: {0}")]
    Unsupported(String),
}
