use thiserror::Error;

/// Errors produced by the codec and its supporting modules.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),

    #[error("unsupported maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),

    #[error("raster too short: expected {expected} bytes, found {found}")]
    TruncatedRaster { expected: usize, found: usize },

    #[error("image must be at least 2x2, got {rows}x{cols}")]
    ImageTooSmall { rows: usize, cols: usize },

    #[error("pixel buffer length {found} does not match {rows}x{cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("reference region {ref_rows}x{ref_cols} is invalid for a {rows}x{cols} image")]
    InvalidReferenceRegion {
        ref_rows: usize,
        ref_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("tag {0} out of range 0..=8")]
    InvalidTag(u8),

    #[error("code table is not a bijection on 0..=8")]
    InvalidCodeTable,

    #[error("bit underflow: needed {needed} bits, {available} available")]
    Underflow { needed: usize, available: usize },

    #[error("expected {expected} bits, got {found}")]
    BitCount { expected: usize, found: usize },

    #[error("invalid header: {0}")]
    InvalidHeader(String),

    #[error("insufficient bootstrap capacity")]
    InsufficientBootstrap,

    #[error("payload exceeds capacity {capacity} bits")]
    PayloadTooLarge { capacity: usize },

    #[error("extraction failed: wrong key or corrupt image")]
    ExtractionFailed,

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),

    #[error("image smaller than the {0}x{0} SSIM window")]
    WindowTooLarge(usize),

    #[error("invalid hex key: {0}")]
    InvalidKey(String),
}

pub type Result<T> = std::result::Result<T, Error>;
