use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("event {index} at ({x}, {y}) lies outside the {width}x{height} sensor")]
    OutOfBounds {
        index: usize,
        x: u32,
        y: u32,
        width: u32,
        height: u32,
    },
    #[error("invalid polarity {0}, expected 0 or 1")]
    Polarity(u32),
    #[error("num_bins must be at least 1")]
    ZeroBins,
    #[error("equal-count slicing needs at least one event")]
    EmptyStream,
    #[error("target dimensions must be non-zero, got {height}x{width}")]
    ZeroDims { height: usize, width: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("label length mismatch: {0} vs {1}")]
    LabelLength(usize, usize),
    #[error("invalid label: {0}")]
    Label(String),
    #[error("trailing partial record of {0} bytes")]
    PartialRecord(usize),
    #[error("{field} value {value} does not fit the output format (max {max})")]
    Overflow {
        field: &'static str,
        value: u64,
        max: u64,
    },
    #[error("line {line}: {msg}")]
    Text { line: usize, msg: String },
    #[error("bad magic bytes {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    Version(u8),
    #[error("unknown dtype code {0}")]
    Dtype(u8),
    #[error("truncated or oversized container: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("invalid brightness sequence: {0}")]
    Brightness(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid augmentation parameters: {0}")]
    Params(String),
    #[error("CutMix requires a partner sample")]
    MissingPartner,
    #[error("expected a binarized tensor, found entry {0}")]
    NotBinary(u16),
}
