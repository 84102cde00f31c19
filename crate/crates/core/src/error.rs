use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A column schema does not match the file being read.
    #[error("schema error: {0}")]
    Schema(String),

    /// A cell could not be parsed; row and column are 0-based data positions.
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    /// The data violates a structural invariant (e.g. a subject with mixed labels).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Array shapes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Model training cannot proceed (single-class targets, non-finite inputs).
    #[error("training error: {0}")]
    Training(String),

    /// A caller-supplied argument is outside its documented domain.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A run configuration is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// An error raised while evaluating one fold of a cross-validation plan.
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    /// An error raised while evaluating the subset of a given size during a sweep.
    #[error("subset size {n}: {source}")]
    SubsetSize {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wraps an error with the index of the fold that produced it.
    pub fn in_fold(self, fold: usize) -> Self {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }

    /// Wraps an error with the subset size at which a sweep failed.
    pub fn at_subset_size(self, n: usize) -> Self {
        Error::SubsetSize {
            n,
            source: Box::new(self),
        }
    }
}
