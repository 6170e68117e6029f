//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A scene invariant was violated; `path` names the offending field.
    #[error("invalid scene: {path}: {reason}")]
    InvalidScene { path: String, reason: String },

    #[error("pixel ({u}, {v}) out of range for {width}x{height} image")]
    PixelOutOfRange {
        u: f64,
        v: f64,
        width: u32,
        height: u32,
    },

    #[error("angle {angle_rad} rad outside [0, pi]")]
    AngleOutOfRange { angle_rad: f64 },

    #[error("depth must be > 0, got {0} m")]
    NonPositiveDepth(f64),

    #[error("depth along ray must be >= 0 and finite, got {0} m")]
    InvalidDepth(f64),

    #[error("integration step must be > 0 and finite, got {0} m")]
    InvalidStep(f64),

    #[error("slab sampling needs n >= 1, d_max > 0 and a representable e^n (n={n}, d_max={d_max} m)")]
    InvalidSlabSampling { n: u32, d_max: f64 },

    #[error(
        "backscatter LUT would take {needed} bytes, cap is {cap}; \
         increase settings.lut_downsample"
    )]
    LutMemoryCapExceeded { needed: u64, cap: u64 },

    #[error("stale LUT: built for scene hash {lut_hash:#018x}, current scene hash {scene_hash:#018x}")]
    StaleLut { lut_hash: u64, scene_hash: u64 },

    #[error("dimension mismatch in {context}: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        context: String,
        expected_w: u32,
        expected_h: u32,
        got_w: u32,
        got_h: u32,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("unsupported image data: {0}")]
    UnsupportedImage(String),

    #[error("corrupt LUT cache: {0}")]
    CorruptLutCache(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn scene(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidScene {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
