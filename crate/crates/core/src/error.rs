use thiserror::Error;

/// Errors reported by the hashing, analysis and sketch routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("key {key:#x} does not fit in {bits} bits")]
    KeyOutOfRange { key: u64, bits: u32 },
    #[error("character {value} at position {position} is outside the alphabet of size 2^{char_bits}")]
    CharOutOfRange { position: usize, value: u64, char_bits: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("incompatible sketches: {0}")]
    Incompatible(String),
    #[error("empty sample")]
    EmptySample,
    #[error("sample has {0} empty coordinates")]
    Holes(usize),
    #[error("decode: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
