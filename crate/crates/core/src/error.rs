use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{name}` has degree {degree}; degree >= 2 requires the non_simply_connected flag to relax (and degree 0 is never allowed)")]
    InvalidDegree { name: String, degree: u32 },
    #[error("differential of `{generator}` has degree {found}, expected {expected}")]
    DegreeMismatch {
        generator: String,
        expected: u32,
        found: u32,
    },
    #[error("d(d({generator})) = {value} is not zero")]
    NotSquareZero { generator: String, value: String },
    #[error("ideal is not closed under d: d({witness}) = {image} is not in the ideal")]
    IdealNotClosed { witness: String, image: String },
    #[error("elements come from different presentations")]
    PresentationMismatch,
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("requested degree range up to {requested} needs cap >= {needed}, presentation cap is {cap}")]
    RangeExceedsCap {
        requested: u32,
        needed: u32,
        cap: u32,
    },
    #[error("morphism `{morphism}`: {message}")]
    InvalidMorphism { morphism: String, message: String },
    #[error("`{0}` is not a free (relation-free) presentation")]
    NotFree(String),
    #[error("`{0}` has nonzero H^1; the construction needs a simply connected input")]
    NotSimplyConnected(String),
    #[error("morphism `{morphism}` is not surjective in degree {degree}")]
    NotSurjective { morphism: String, degree: u32 },
    #[error("morphism `{morphism}` is not a quasi-isomorphism in degree {degree}")]
    NotQuasiIso { morphism: String, degree: u32 },
    #[error("no pedigree (s-model or Sullivan augmentation) recorded for `{0}`")]
    PedigreeMissing(String),
    #[error("exponential series for generator `{0}` did not terminate")]
    SeriesNonterminating(String),
    #[error("top degree mismatch: expected formal dimension {expected}, {message}")]
    TopDegreeMismatch { expected: u32, message: String },
    #[error("d^2 != 0 on Ganea generator {0}")]
    SignCheckFailed(String),
    #[error("element {0} is not a cycle")]
    NotACycle(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error("{0}")]
    Invalid(String),
    #[error("at {line}:{column}: {inner}")]
    Located {
        line: usize,
        column: usize,
        inner: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
