use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// name the offending object in a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("face-closure violation: {face:?} is a face of {simplex:?} but is not listed")]
    FaceClosure { simplex: Vec<usize>, face: Vec<usize> },

    #[error("nonpositive weight {weight} on simplex {simplex:?}")]
    NonPositiveWeight { simplex: Vec<usize>, weight: String },

    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),

    #[error("malformed simplex {simplex:?}: {reason}")]
    MalformedSimplex { simplex: Vec<usize>, reason: String },

    #[error("degree {degree} out of range 0..={max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("chain is not a cycle over {0}")]
    NotACycle(String),

    #[error("class coordinates do not match the decomposition: {0}")]
    InvalidClass(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("minimizer enumeration hit the cap of {cap}; refusing to decide")]
    InexactEnumeration { cap: usize },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("linear program is {0}")]
    Lp(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
