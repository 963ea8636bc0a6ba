use thiserror::Error;

/// Errors produced by the coders, the container reader and the word deque.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: u32 },

    #[error("deque underflow: requested {requested} words, {available} available")]
    Underflow { requested: usize, available: usize },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("base {base} outside the admissible range [1, {max}]")]
    BaseOutOfRange { base: u64, max: u64 },

    #[error("digit {digit} is not below its base {base}")]
    DigitOutOfRange { digit: u64, base: u64 },

    #[error("cannot build a frequency table from empty input")]
    EmptyInput,

    #[error("{symbols} distinct symbols do not fit a table of precision {precision} bits")]
    TooManySymbols { symbols: usize, precision: u32 },

    #[error("symbol {0:#04x} has zero frequency in the table")]
    UnencodableSymbol(u8),

    #[error("slot {slot} outside the table range [0, {total})")]
    SlotOutOfRange { slot: u64, total: u64 },

    #[error("encoder underflow at renormalization {pop_index}: padding is only recoverable on the first refill")]
    UnrecoverablePadding { pop_index: u64 },

    #[error("payload exhausted after {decoded} of {expected} symbols")]
    PayloadExhausted { decoded: u64, expected: u64 },

    #[error("state {state} outside the coder interval [{low}, {high})")]
    StateOutOfRange { state: u64, low: u64, high: u64 },

    #[error("final state mismatch: expected {expected}, found {found}")]
    FinalStateMismatch { expected: u64, found: u64 },

    #[error("residual words after decoding: expected {expected} zero pad words, found {found} words ({nonzero} nonzero)")]
    ResidualWords {
        expected: u64,
        found: u64,
        nonzero: u64,
    },

    #[error("position {position} is beyond the direct-access region of {region} digits")]
    BeyondDirectAccess { position: u64, region: u64 },

    #[error("bad magic bytes {0:02x?}")]
    BadMagic([u8; 4]),

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("unsupported coder kind {0:#04x}")]
    UnsupportedKind(u8),

    #[error("frequency table sums to {sum}, expected {expected}")]
    TableSum { sum: u64, expected: u64 },

    #[error("malformed frequency table: {0}")]
    MalformedTable(String),

    #[error("truncated container: {0}")]
    Truncated(&'static str),

    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures that indicate a damaged or inconsistent stream, as
    /// opposed to bad arguments or I/O.
    pub fn is_integrity(&self) -> bool {
        matches!(
            self,
            Error::PayloadExhausted { .. }
                | Error::StateOutOfRange { .. }
                | Error::FinalStateMismatch { .. }
                | Error::ResidualWords { .. }
                | Error::SlotOutOfRange { .. }
                | Error::BadMagic(_)
                | Error::UnsupportedVersion(_)
                | Error::UnsupportedKind(_)
                | Error::TableSum { .. }
                | Error::MalformedTable(_)
                | Error::Truncated(_)
                | Error::TrailingBytes(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
