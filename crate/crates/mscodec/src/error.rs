use thiserror::Error;

/// Errors produced by the codec pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    PgmHeader(String),
    #[error("unsupported PGM maxval {0} (only 255 supported)")]
    PgmMaxval(u32),
    #[error("truncated PGM pixel data: expected {expected} bytes, got {got}")]
    PgmTruncated { expected: usize, got: usize },
    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("bad container magic")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u8),
    #[error("container body length mismatch")]
    BodyLength,
    #[error("chain walks out of bounds")]
    ChainOutOfBounds,
    #[error("payload exhausted before all regions were restored")]
    PayloadExhausted,
    #[error("invalid encoder configuration: {0}")]
    InvalidConfig(String),
    #[error("image dimensions exceed container limits")]
    Oversized,
    #[error("degenerate rate: {regions} regions for {pixels} pixels (limit pixels/4)")]
    DegenerateRate { regions: usize, pixels: usize },
    #[error("regions are not adjacent")]
    NotAdjacent,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
