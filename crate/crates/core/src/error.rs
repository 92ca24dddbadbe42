use thiserror::Error;

/// Errors raised by the library. Every variant names the violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported bound 2^16")]
    OrderTooLarge { p: u32, k: u32 },
    #[error("modulus is not a monic irreducible polynomial of degree {0} over the prime field")]
    BadModulus(usize),
    #[error("element code {0} is outside the field")]
    BadElement(u32),
    #[error("sesqui-morphism table has {got} entries, the field has {expected} elements")]
    TableSize { got: usize, expected: usize },
    #[error("map is not a sesqui-morphism (involution with automorphic normalization)")]
    NotSesquimorphism,
    #[error("frobenius conjugation needs an even extension degree, got {0}")]
    OddDegree(u32),
    #[error("lambda must be a nonzero field element")]
    ZeroLambda,
    #[error("lambda {0} is not sigma-compatible")]
    IncompatibleLambda(u32),
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown index label {0}")]
    UnknownLabel(usize),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("loop at vertex {0:?}")]
    Loop(String),
    #[error("arcs {0:?}->{1:?} and {1:?}->{0:?} are both present in an oriented graph")]
    OppositeArcs(String, String),
    #[error("graph is not sigma-symmetric")]
    NotSigmaSymmetric,
    #[error("pivot needs an edge, but {0:?} and {1:?} are not adjacent")]
    NotAnEdge(String, String),
    #[error("size bound exceeded: {what} allows at most {max} vertices, got {got}")]
    SizeBound {
        what: &'static str,
        max: usize,
        got: usize,
    },
    #[error("layout does not match the vertex set: {0}")]
    LayoutMismatch(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("even cycle length expected, got {0}")]
    OddCycle(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
