use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label collision on `{0}`")]
    LabelCollision(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("overlapping selectors on `{0}`")]
    OverlappingSelectors(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid instrument: {0}")]
    InvalidInstrument(String),
    #[error("inconsistent ensemble: {0}")]
    InconsistentEnsemble(String),
    #[error("ensemble member {index} is not pure (purity {purity})")]
    MixedMember { index: usize, purity: f64 },
    #[error("invalid extension: {0}")]
    InvalidExtension(String),
    #[error("decomposition term {0} is not a product state")]
    NonProductTerm(usize),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
