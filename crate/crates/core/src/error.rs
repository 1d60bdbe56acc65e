use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty geometry")]
    EmptyGeometry,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("triangle {triangle} references vertex {index} but only {vertex_count} vertices exist")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("opening angle must be in (0, 90] degrees, got {0} degrees")]
    InvalidOpeningAngle(f64),

    #[error("object exceeds bounding sphere (max vertex norm {0})")]
    ObjectExceedsSphere(f64),

    #[error("viewpoint lies inside the bounding sphere of the mesh")]
    ViewpointInsideObject,

    #[error("density is undefined for r = {0} (surfel must lie strictly inside the unit sphere)")]
    SurfelOutsideSphere(f64),

    #[error("size mismatch: expected {expected} depths, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("model mismatch")]
    ModelMismatch,

    #[error("point cloud is not ordered (missing ray indices)")]
    MissingRayIndex,

    #[error("ray indices must be strictly increasing (position {0})")]
    UnorderedRayIndex(usize),

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error("bad magic")]
    BadMagic,

    #[error("version unsupported: {0}")]
    UnsupportedVersion(u16),

    #[error("header truncated")]
    HeaderTruncated,

    #[error("payload truncated: expected {expected} bytes, got {actual}")]
    PayloadTruncated { expected: usize, actual: usize },

    #[error("trailing data: {0} unexpected bytes after payload")]
    TrailingData(usize),

    #[error("depth out of range at index {index}: {value}")]
    DepthOutOfRange { index: usize, value: f32 },

    #[error("invalid frame radius {0}")]
    InvalidFrame(f64),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported file format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors that originate from reading or writing files rather than from
    /// the geometry or parameters themselves.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Parse { .. }
                | Error::UnsupportedFormat(_)
                | Error::BadMagic
                | Error::UnsupportedVersion(_)
                | Error::HeaderTruncated
                | Error::PayloadTruncated { .. }
                | Error::TrailingData(_)
        )
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
