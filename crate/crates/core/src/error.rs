use std::path::PathBuf;

use thiserror::Error;

use crate::weightnet::WeightNetParams;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid skeleton sequence: {0}")]
    InvalidSequence(String),

    #[error("degenerate bone {segment} (hand {hand}) in frame {frame}: joints {joint_a} and {joint_b} coincide")]
    DegenerateBone {
        frame: usize,
        hand: usize,
        segment: usize,
        joint_a: usize,
        joint_b: usize,
    },

    #[error("invalid tessellation: rings={rings} (need >= 2), verts_per_ring={verts_per_ring} (need >= 3)")]
    InvalidTessellation { rings: usize, verts_per_ring: usize },

    #[error("sequence spans {duration:.4} s, shorter than one radar frame ({needed:.4} s)")]
    SequenceTooShort { duration: f64, needed: f64 },

    #[error("invalid radar parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scatterer at the antenna (distance {0} m)")]
    NonPositiveDistance(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative weight {value} for scatterer {scatterer}, frame {frame}")]
    NegativeWeight {
        scatterer: usize,
        frame: usize,
        value: f64,
    },

    #[error("clutter suppression needs at least two chirps, got {0}")]
    TooFewChirps(usize),

    #[error("range bin {bin} out of bounds ({bins} bins)")]
    RangeBinOutOfBounds { bin: usize, bins: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("non-finite intermediate at stage `{0}`")]
    NonFiniteStage(&'static str),

    #[error("training diverged at stage {stage}, epoch {epoch}")]
    Diverged {
        stage: usize,
        epoch: usize,
        last_good: Box<WeightNetParams>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("entry `{entry}`, stage `{stage}`: {source}")]
    Stage {
        entry: String,
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Wraps an error with the pipeline stage and entry it came from.
    pub fn at_stage(self, entry: impl Into<String>, stage: &'static str) -> Self {
        Error::Stage {
            entry: entry.into(),
            stage,
            source: Box::new(self),
        }
    }
}
