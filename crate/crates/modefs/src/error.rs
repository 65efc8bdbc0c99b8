//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column {0:?} not found in header")]
    LabelColumnNotFound(String),

    #[error("row {line} has {found} fields, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {line}, column {column:?}: cannot parse {value:?} as a number")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },

    #[error("fewer than 2 classes in label column")]
    TooFewClasses,

    #[error("dataset needs at least {need} {what}, got {got}")]
    DatasetTooSmall {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },

    #[error("class {class} has {count} instance(s); stratified split needs at least 2")]
    ClassTooSmall { class: usize, count: usize },

    #[error("train fraction {0} outside (0, 1)")]
    BadTrainFraction(f64),

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("feature counts differ: train {train}, test {test}")]
    FeatureMismatch { train: usize, test: usize },

    #[error("k = {k} exceeds {n} training instance(s)")]
    KTooLarge { k: usize, n: usize },

    #[error("mask selects no features")]
    EmptyMask,

    #[error("empty feature pool")]
    EmptyPool,

    #[error("population size {got} below minimum {need}")]
    PopulationTooSmall { need: usize, got: usize },

    #[error("individual {0} has no objective values yet")]
    Unevaluated(usize),

    #[error("{d} features exceed the exhaustive enumeration limit {limit}")]
    TooManyFeatures { d: usize, limit: usize },

    #[error("reference front is empty")]
    EmptyReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps the error with the pipeline stage it surfaced in, so CLI
    /// diagnostics name where a run aborted.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn at_stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn at_stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
