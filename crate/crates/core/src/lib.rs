//! Entropy coding on top of a renormalized binary ↔ mixed-radix conversion.
//!
//! * [`deque`]: the word deque every coder reads from and writes to.
//! * [`bemr`]: forward and inverse renormalized mixed-radix conversion.
//! * [`freq`]: quantized byte frequency tables.
//! * [`variant`]: the deque-based rANS variant with direct symbol access.
//! * [`baseline`]: classical streaming rANS and a 2-way interleaved coder.
//! * [`container`]: the `.bmrx` file format.
//! * [`harness`]: ratio and throughput comparison over a set of files.
//!
//! ```
//! use bemr::{compress, decompress, CodecConfig, CoderKind};
//!
//! let data = b"abracadabra, abracadabra";
//! let stream = compress(data, &CodecConfig::new(CoderKind::Variant)).unwrap();
//! assert_eq!(decompress(&stream).unwrap(), data);
//! ```

pub mod baseline;
pub mod bemr;
pub mod container;
pub mod deque;
pub mod error;
pub mod freq;
pub mod harness;
pub mod synth;
pub mod variant;

pub use baseline::{BaselineParams, BaselineStream, InterleavedStream};
pub use bemr::BemrParams;
pub use container::{CodedStream, CoderKind};
pub use deque::{ChunkValue, End, WordDeque};
pub use error::{Error, Result};
pub use freq::FreqTable;
pub use variant::{CoderParams, EncodedStream, StateTrace, TraceEvent, UnderflowPolicy};

/// Which coder to run and with what parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub kind: CoderKind,
    pub params: CoderParams,
    pub baseline: BaselineParams,
}

impl CodecConfig {
    pub fn new(kind: CoderKind) -> Self {
        Self::with_params(kind, CoderParams::default())
    }

    /// The baseline coders take their table precision from `params` and use
    /// 16-bit renormalization words with `L = 2^max(16, n)`.
    pub fn with_params(kind: CoderKind, params: CoderParams) -> Self {
        let baseline = BaselineParams::new(16, params.digit_bits().max(16))
            .expect("n <= 24 keeps the baseline state within 40 bits");
        Self {
            kind,
            params,
            baseline,
        }
    }
}

/// Builds the table for `data`. An empty input gets a one-symbol table so
/// that it still round-trips through the container.
pub fn table_for(data: &[u8], precision: u32) -> Result<FreqTable> {
    if data.is_empty() {
        let mut f = [0u32; freq::ALPHABET];
        f[0] = 1 << precision;
        return FreqTable::from_frequencies(f, precision);
    }
    FreqTable::from_data(data, precision)
}

pub fn compress(data: &[u8], config: &CodecConfig) -> Result<CodedStream> {
    let table = table_for(data, config.params.digit_bits())?;
    Ok(match config.kind {
        CoderKind::Variant => CodedStream::Variant(variant::encode(data, &table, config.params)?),
        CoderKind::Baseline => {
            CodedStream::Baseline(baseline::baseline_encode(data, &table, config.baseline)?)
        }
        CoderKind::Interleaved2 => CodedStream::Interleaved2(baseline::interleaved2_encode(
            data,
            &table,
            config.baseline,
        )?),
    })
}

/// Decodes any stream, including the end-of-stream integrity checks.
pub fn decompress(stream: &CodedStream) -> Result<Vec<u8>> {
    match stream {
        CodedStream::Variant(s) => variant::decode(s),
        CodedStream::Baseline(s) => baseline::baseline_decode(s),
        CodedStream::Interleaved2(s) => baseline::interleaved2_decode(s),
    }
}
