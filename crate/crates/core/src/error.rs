use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed csv: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("non-numeric cell at row {row}, column {col}: {value:?}")]
    NonNumericCell {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("row {row} has no samples")]
    EmptyRow { row: usize },
    #[error("label column {0:?} not found in header")]
    MissingColumn(String),

    #[error("max equals min; cannot rescale a constant signal")]
    DegenerateRange,
    #[error("window of {window} samples exceeds signal length {len}")]
    WindowTooLong { window: usize, len: usize },
    #[error("input too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("frequency {f0} Hz must lie strictly between 0 and Nyquist ({nyquist} Hz)")]
    InvalidFrequency { f0: f64, nyquist: f64 },

    #[error("unknown wavelet {0:?}")]
    UnknownWavelet(String),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("decomposition level {level} outside 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("coefficient shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("threshold selection needs at least one coefficient")]
    EmptyCoefficients,
    #[error("threshold must be nonnegative, got {0}")]
    NegativeThreshold(f64),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("estimate equals reference exactly; SNR is unbounded")]
    IdenticalSignals,
    #[error("reference signal is all zeros")]
    ZeroReference,
    #[error("band extraction needs {needed} levels, decomposition has {got}")]
    InsufficientLevels { needed: usize, got: usize },
    #[error("parameter search space is empty")]
    EmptySpace,

    #[error("expected a {expected} map, got {got}")]
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
    #[error("scale list is empty")]
    EmptyScales,

    #[error("sample {index} = {value} lies outside [-1, 1]")]
    NotNormalized { index: usize, value: f64 },
    #[error("recurrence threshold must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("{got} samples cannot fill {bins} quantile bins")]
    TooFewSamples { got: usize, bins: usize },
    #[error("all samples are equal; quantile bins are undefined")]
    DegenerateData,
    #[error("channel {channel} is {rows}x{cols}, expected a square matrix")]
    NonSquareChannel {
        channel: usize,
        rows: usize,
        cols: usize,
    },

    #[error("sampling rate {fs} Hz is below the required {min} Hz")]
    SamplingTooLow { fs: f64, min: f64 },
    #[error("heart rate needs at least two peaks, got {0}")]
    TooFewPeaks(usize),

    #[error("k = {k} exceeds the {train} training examples")]
    KTooLarge { k: usize, train: usize },
    #[error("feature dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input is empty")]
    EmptyInput,

    #[error("config error: {0}")]
    Config(String),
    #[error("record {id}: {source}")]
    Record {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach the id of the record being processed.
    pub fn in_record(self, id: &str) -> Self {
        Error::Record {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by a bad invocation (parameters, names, config)
    /// rather than by the data being processed.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidParameter(_)
            | Error::UnknownWavelet(_)
            | Error::Config(_)
            | Error::MissingColumn(_)
            | Error::NonPositiveScale(_)
            | Error::NegativeThreshold(_)
            | Error::NonPositiveEpsilon(_)
            | Error::InvalidFrequency { .. }
            | Error::EmptyScales
            | Error::EmptySpace
            | Error::KTooLarge { .. } => true,
            Error::Record { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
