use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Label track and signal durations differ by more than one frame hop.
    #[error("label track spans {labels:.4} s but signal spans {signal:.4} s")]
    SpanMismatch { signal: f64, labels: f64 },

    #[error("label track has no active frames")]
    NoActiveFrames,

    #[error("frame {frame} has {count} active sources, labels-first needs at most one")]
    OverlapUnsupported { frame: usize, count: usize },

    #[error("random orthonormal draw stayed degenerate after {0} attempts")]
    RngFailure(usize),

    #[error("no frame is active in both the estimate and the reference")]
    NoCoactiveFrames,

    #[error("expected 4 channels, found {0}")]
    BadChannelCount(u16),

    #[error("unsupported sample format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt WAV header: {0}")]
    CorruptHeader(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("value out of range at line {line}: {msg}")]
    Range { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable upper-case identifier, used by the CLI and the C bindings.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SpanMismatch { .. } => "SPAN_MISMATCH",
            Error::NoActiveFrames => "NO_ACTIVE_FRAMES",
            Error::OverlapUnsupported { .. } => "OVERLAP_UNSUPPORTED",
            Error::RngFailure(_) => "RNG_FAILURE",
            Error::NoCoactiveFrames => "NO_COACTIVE_FRAMES",
            Error::BadChannelCount(_) => "BAD_CHANNEL_COUNT",
            Error::UnsupportedFormat(_) => "UNSUPPORTED_FORMAT",
            Error::CorruptHeader(_) => "CORRUPT_HEADER",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Range { .. } => "RANGE_ERROR",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::Io(_) => "IO_ERROR",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
