use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading manifests, inventories and transcriptions.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed manifest {path}: {reason}")]
    MalformedManifest { path: PathBuf, reason: String },
    #[error("duplicate production unit ({codex}, {unit}) in manifest")]
    DuplicateUnit { codex: String, unit: String },
    #[error("transcription file not found: {0}")]
    MissingFile(PathBuf),
    #[error("transcription file is not valid UTF-8: {0}")]
    InvalidUtf8(PathBuf),
    #[error("invalid brevigraph inventory: {0}")]
    InvalidInventory(String),
    #[error("invalid scribe label: {0:?}")]
    InvalidLabel(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("document contains no letter or brevigraph clusters")]
    EmptyDocument,
    #[error("group {0:?} has no samples")]
    EmptyGroup(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LearnError {
    #[error("bad hyperparameter: {0}")]
    BadHyperparameter(String),
    #[error("input contains NaN or infinite values")]
    NonFiniteInput,
    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training labels contain a single class")]
    SingleClassInput,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set has {n} rows, fewer than k = {k}")]
    TooFewRows { n: usize, k: usize },
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("fewer than two scribes have at least {min_segments} segments")]
    InsufficientScribes { min_segments: usize },
    #[error("duplicate scribe label {0:?}")]
    DuplicateLabel(String),
    #[error("scribe {label:?} has {available} segments, {requested} requested")]
    NotEnoughSegments {
        label: String,
        available: usize,
        requested: usize,
    },
    #[error("scribe has segments from a single production unit only")]
    SingleUnit,
    #[error("class {0:?} has no segments")]
    EmptyClass(String),
    #[error("query label {0:?} has no segments")]
    EmptyQuery(String),
    #[error("reference set has no segments")]
    EmptyReference,
    #[error("no bigram containing a brevigraph occurs in the selected segments")]
    EmptyVocabulary,
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("habit profile has an empty lexicon")]
    EmptyLexicon,
    #[error("invalid abbreviation rule: {0}")]
    InvalidRule(String),
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("n_clusters must be at least 1")]
    ZeroLength,
}

/// Top-level error for callers that drive whole workflows.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("serialization error: {0}")]
    Serialize(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
