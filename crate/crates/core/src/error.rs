use thiserror::Error;

/// Errors raised anywhere in the codec, encoders and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("symbol {value} at index {index} is not +1 or -1")]
    InvalidSymbol { index: usize, value: i64 },

    #[error("binary sequence must not be empty")]
    EmptySequence,

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("numeric overflow in channel integrals (w- = {w_minus}, w+ = {w_plus}){}", iteration_suffix(*.iteration))]
    NumericOverflow {
        w_minus: f64,
        w_plus: f64,
        iteration: Option<usize>,
    },

    #[error("channel integral degenerate at iteration {iteration}, factor {factor}: i0 = {i0:e}")]
    ChannelDegenerate {
        iteration: usize,
        factor: usize,
        i0: f64,
    },

    #[error("codeword length {n} exceeds the exhaustive search limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("bad magic bytes {found:02x?}, expected \"PLC1\"")]
    BadMagic { found: [u8; 4] },

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("truncated header: expected {expected} bytes, got {actual}")]
    TruncatedHeader { expected: usize, actual: usize },

    #[error("truncated payload: expected {expected_bits} bits, got {actual_bits}")]
    TruncatedPayload {
        expected_bits: u64,
        actual_bits: u64,
    },

    #[error("nonzero padding bits in final payload byte {byte:#04x}")]
    NonzeroPadding { byte: u8 },

    #[error("trailing data after payload: {extra} bytes")]
    TrailingData { extra: usize },

    #[error("I/O error at byte offset {position}: {source}")]
    Io {
        position: u64,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),
}

fn iteration_suffix(iteration: Option<usize>) -> String {
    match iteration {
        Some(t) => format!(" at iteration {t}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
