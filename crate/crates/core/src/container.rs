//! The `.bmrx` byte format.
//!
//! All integers are little-endian.
//!
//! | field        | bytes | notes                                              |
//! |--------------|-------|----------------------------------------------------|
//! | magic        | 4     | `BMRX`                                             |
//! | version      | 1     | `0x01`                                             |
//! | coder kind   | 1     | `0x01` variant, `0x02` baseline, `0x03` 2-way      |
//! | n            | 1     | table precision                                    |
//! | v            | 1     | variant: refill words; baseline kinds: word bits   |
//! | T            | 1     | variant: state bits; baseline kinds: `log2 L`      |
//! | N            | 8     | symbol count                                       |
//! | final state  | 8     | 2-way: lane 0 in the low, lane 1 in the high half  |
//! | pad words    | 4     |                                                    |
//! | z            | 2     | table entries                                      |
//! | entries      | 5·z   | `(symbol: u8, f: u32)`, ascending symbols          |
//! | l            | 8     | payload word count                                 |
//! | payload      | l·w   | `w = ⌈word bits / 8⌉` bytes per word               |
//!
//! Variant payload words are written from end `A` (newest digit first), so
//! a sequential reader sees them in decode order. Baseline words are also
//! written in decode order.

use std::io::{Read, Write};

use crate::baseline::{BaselineParams, BaselineStream, InterleavedStream};
use crate::error::{Error, Result};
use crate::freq::{FreqTable, ALPHABET};
use crate::variant::{CoderParams, EncodedStream};

pub const MAGIC: [u8; 4] = *b"BMRX";
pub const VERSION: u8 = 1;
pub const FILE_EXTENSION: &str = "bmrx";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CoderKind {
    Variant = 0x01,
    Baseline = 0x02,
    Interleaved2 = 0x03,
}

impl CoderKind {
    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0x01 => Ok(Self::Variant),
            0x02 => Ok(Self::Baseline),
            0x03 => Ok(Self::Interleaved2),
            other => Err(Error::UnsupportedKind(other)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Variant => "variant",
            Self::Baseline => "baseline",
            Self::Interleaved2 => "interleaved2",
        }
    }
}

/// Any stream the container can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodedStream {
    Variant(EncodedStream),
    Baseline(BaselineStream),
    Interleaved2(InterleavedStream),
}

impl CodedStream {
    pub fn kind(&self) -> CoderKind {
        match self {
            Self::Variant(_) => CoderKind::Variant,
            Self::Baseline(_) => CoderKind::Baseline,
            Self::Interleaved2(_) => CoderKind::Interleaved2,
        }
    }

    pub fn table(&self) -> &FreqTable {
        match self {
            Self::Variant(s) => &s.table,
            Self::Baseline(s) => &s.table,
            Self::Interleaved2(s) => &s.table,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Self::Variant(s) => s.len,
            Self::Baseline(s) => s.len,
            Self::Interleaved2(s) => s.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn header_fields(&self) -> Result<(u8, u8, u8, u64, u32)> {
        Ok(match self {
            Self::Variant(s) => (
                s.params.digit_bits() as u8,
                s.params.refill_words() as u8,
                s.params.state_bits() as u8,
                s.final_state,
                s.pad_words,
            ),
            Self::Baseline(s) => (
                s.table.precision() as u8,
                s.params.word_bits() as u8,
                s.params.lower_bits() as u8,
                s.final_state,
                0,
            ),
            Self::Interleaved2(s) => {
                if s.params.lower_bits() + s.params.word_bits() > 32 {
                    return Err(Error::InvalidParams(
                        "2-way states wider than 32 bits cannot share the state field".into(),
                    ));
                }
                (
                    s.table.precision() as u8,
                    s.params.word_bits() as u8,
                    s.params.lower_bits() as u8,
                    s.final_states[0] | (s.final_states[1] << 32),
                    0,
                )
            }
        })
    }

    fn payload(&self) -> (&[u32], u32) {
        match self {
            Self::Variant(s) => (&s.payload, s.params.digit_bits()),
            Self::Baseline(s) => (&s.words, s.params.word_bits()),
            Self::Interleaved2(s) => (&s.words, s.params.word_bits()),
        }
    }

    /// Payload size in bytes as serialized.
    pub fn payload_bytes(&self) -> u64 {
        let (words, bits) = self.payload();
        words.len() as u64 * bytes_per_word(bits) as u64
    }

    /// Total serialized size in bytes.
    pub fn serialized_len(&self) -> u64 {
        header_len(self.table().alphabet_size()) + self.payload_bytes()
    }
}

fn bytes_per_word(bits: u32) -> usize {
    bits.div_ceil(8) as usize
}

/// Fixed header bytes plus the table, excluding the payload.
pub fn header_len(alphabet_size: usize) -> u64 {
    (4 + 1 + 1 + 3 + 8 + 8 + 4 + 2 + 5 * alphabet_size + 8) as u64
}

pub fn to_bytes(stream: &CodedStream) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(stream.serialized_len() as usize);
    write_container(stream, &mut out)?;
    Ok(out)
}

/// Serializes `stream` and returns the number of bytes written.
pub fn write_container<W: Write>(stream: &CodedStream, mut sink: W) -> Result<u64> {
    let (n, v, t, final_state, pads) = stream.header_fields()?;
    let table = stream.table();
    let mut head = Vec::with_capacity(header_len(table.alphabet_size()) as usize);
    head.extend_from_slice(&MAGIC);
    head.push(VERSION);
    head.push(stream.kind() as u8);
    head.extend_from_slice(&[n, v, t]);
    head.extend_from_slice(&stream.len().to_le_bytes());
    head.extend_from_slice(&final_state.to_le_bytes());
    head.extend_from_slice(&pads.to_le_bytes());
    head.extend_from_slice(&(table.alphabet_size() as u16).to_le_bytes());
    for s in table.symbols() {
        head.push(s);
        head.extend_from_slice(&table.freq(s).to_le_bytes());
    }
    let (words, bits) = stream.payload();
    head.extend_from_slice(&(words.len() as u64).to_le_bytes());
    sink.write_all(&head)?;

    let width = bytes_per_word(bits);
    let mut body = Vec::with_capacity(words.len() * width);
    for &w in words {
        body.extend_from_slice(&w.to_le_bytes()[..width]);
    }
    sink.write_all(&body)?;
    Ok((head.len() + body.len()) as u64)
}

pub fn read_container<R: Read>(mut source: R) -> Result<CodedStream> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(Error::Truncated(what))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn array<const K: usize>(&mut self, what: &'static str) -> Result<[u8; K]> {
        Ok(self.take(K, what)?.try_into().expect("length checked"))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<CodedStream> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic = c.array::<4>("magic")?;
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = c.u8("version")?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let kind = CoderKind::from_tag(c.u8("coder kind")?)?;
    let [n, v, t] = c.array::<3>("parameters")?;
    let len = u64::from_le_bytes(c.array("symbol count")?);
    let final_state = u64::from_le_bytes(c.array("final state")?);
    let pad_words = u32::from_le_bytes(c.array("pad words")?);
    let z = u16::from_le_bytes(c.array("table size")?) as usize;
    if z == 0 || z > ALPHABET {
        return Err(Error::MalformedTable(format!("{z} entries")));
    }

    let mut freq = [0u32; ALPHABET];
    let mut sum = 0u64;
    let mut prev: Option<u8> = None;
    for _ in 0..z {
        let s = c.u8("table entry")?;
        let f = u32::from_le_bytes(c.array("table entry")?);
        if prev.is_some_and(|p| s <= p) {
            return Err(Error::MalformedTable(format!(
                "symbol {s:#04x} out of order"
            )));
        }
        if f == 0 {
            return Err(Error::MalformedTable(format!(
                "symbol {s:#04x} has zero frequency"
            )));
        }
        prev = Some(s);
        freq[s as usize] = f;
        sum += u64::from(f);
    }
    let precision = u32::from(n);
    if precision == 0 || precision > crate::freq::MAX_PRECISION {
        return Err(Error::InvalidParams(format!("table precision {n}")));
    }
    if sum != 1u64 << precision {
        return Err(Error::TableSum {
            sum,
            expected: 1 << precision,
        });
    }
    let table = FreqTable::from_frequencies(freq, precision)?;

    let word_bits = match kind {
        CoderKind::Variant => u32::from(n),
        CoderKind::Baseline | CoderKind::Interleaved2 => u32::from(v),
    };
    let l = u64::from_le_bytes(c.array("payload length")?);
    let width = bytes_per_word(word_bits.max(1));
    let payload_len = usize::try_from(l)
        .ok()
        .and_then(|l| l.checked_mul(width))
        .ok_or(Error::Truncated("payload"))?;
    let raw = c.take(payload_len, "payload")?;
    if c.pos != bytes.len() {
        return Err(Error::TrailingBytes(bytes.len() - c.pos));
    }
    let words = decode_words(raw, width, word_bits)?;

    Ok(match kind {
        CoderKind::Variant => CodedStream::Variant(EncodedStream {
            params: CoderParams::new(u32::from(n), u32::from(v), u32::from(t))?,
            table,
            len,
            final_state,
            pad_words,
            payload: words,
        }),
        CoderKind::Baseline => CodedStream::Baseline(BaselineStream {
            params: BaselineParams::new(u32::from(v), u32::from(t))?,
            table,
            len,
            final_state,
            words,
        }),
        CoderKind::Interleaved2 => CodedStream::Interleaved2(InterleavedStream {
            params: BaselineParams::new(u32::from(v), u32::from(t))?,
            table,
            len,
            final_states: [final_state & 0xFFFF_FFFF, final_state >> 32],
            words,
        }),
    })
}

fn decode_words(raw: &[u8], width: usize, bits: u32) -> Result<Vec<u32>> {
    raw.chunks_exact(width)
        .map(|chunk| {
            let mut le = [0u8; 4];
            le[..width].copy_from_slice(chunk);
            let w = u32::from_le_bytes(le);
            if bits < 32 && w >> bits != 0 {
                return Err(Error::ValueOutOfRange {
                    value: u64::from(w),
                    bits,
                });
            }
            Ok(w)
        })
        .collect()
}
