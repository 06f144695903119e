use thiserror::Error;

/// Failures of the typing rules for circuits and tapes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("symbol `{0}` declared with two different types")]
    ConflictingSymbol(String),
    #[error("symbol `{name}` used at type {used} but declared as {declared}")]
    SymbolType { name: String, used: String, declared: String },
    #[error("composition mismatch: codomain {left} ≠ domain {right}")]
    CompositionMismatch { left: String, right: String },
    #[error("trace shape mismatch: cannot trace {traced} out of {dom} → {cod}")]
    TraceShapeMismatch { traced: String, dom: String, cod: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

/// Failures of finite-relation operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("carrier mismatch: {left} vs {right}")]
    CarrierMismatch { left: String, right: String },
    #[error("relation is not an endo-relation ({dom} → {cod})")]
    NotEndo { dom: String, cod: String },
    #[error("trace shape mismatch: {0}")]
    TraceShapeMismatch(String),
    #[error("block shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element {0} out of range")]
    OutOfRange(String),
}

/// Failures while interpreting terms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error("symbol `{0}` has no interpretation")]
    Uninterpreted(String),
    #[error("sort `{0}` has no carrier")]
    NoCarrier(String),
    #[error("bad interpretation: {0}")]
    BadInterpretation(String),
}
