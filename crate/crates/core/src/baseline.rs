//! Classical streaming rANS and a two-lane interleaved variant, used as the
//! comparison point for the deque coder.
//!
//! The state lives in `[L, L·2^b)`. Encoding emits `b`-bit words until the
//! next step stays in range and then applies `C(s,x) = M⌊x/f⌋ + cdf + x mod f`.
//! Words are stored in decode order (the reverse of emission).

use crate::error::{Error, Result};
use crate::freq::FreqTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BaselineParams {
    word_bits: u32,
    lower_bits: u32,
}

impl Default for BaselineParams {
    /// 16-bit renormalization words, `L = 2^16`.
    fn default() -> Self {
        Self {
            word_bits: 16,
            lower_bits: 16,
        }
    }
}

impl BaselineParams {
    /// `word_bits` is the renormalization output width `b`, `lower_bits` is
    /// `log2 L`.
    pub fn new(word_bits: u32, lower_bits: u32) -> Result<Self> {
        if word_bits == 0 || word_bits > 32 || lower_bits + word_bits > 63 {
            return Err(Error::InvalidParams(format!(
                "baseline b={word_bits}, log2 L={lower_bits}: need 1 <= b <= 32 and b + log2 L <= 63"
            )));
        }
        Ok(Self {
            word_bits,
            lower_bits,
        })
    }

    #[inline]
    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    #[inline]
    pub fn lower_bits(&self) -> u32 {
        self.lower_bits
    }

    /// `L`, also the initial encoder state.
    #[inline]
    pub fn lower(&self) -> u64 {
        1 << self.lower_bits
    }

    /// Exclusive upper end of the state interval, `L·2^b`.
    #[inline]
    pub fn upper(&self) -> u64 {
        1 << (self.lower_bits + self.word_bits)
    }

    fn check_table(&self, table: &FreqTable) -> Result<()> {
        if self.lower_bits < table.precision() {
            return Err(Error::InvalidParams(format!(
                "L = 2^{} below M = 2^{}",
                self.lower_bits,
                table.precision()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineStream {
    pub params: BaselineParams,
    pub table: FreqTable,
    pub len: u64,
    pub final_state: u64,
    /// Renormalization words in decode order.
    pub words: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedStream {
    pub params: BaselineParams,
    pub table: FreqTable,
    pub len: u64,
    /// Lane 0 codes even positions, lane 1 odd ones.
    pub final_states: [u64; 2],
    /// Shared renormalization words in decode order.
    pub words: Vec<u32>,
}

struct Encoder<'a> {
    table: &'a FreqTable,
    word_bits: u32,
    /// `(L >> n) << b`; the state must stay below `f` times this.
    bound_unit: u64,
    precision: u32,
}

impl<'a> Encoder<'a> {
    fn new(table: &'a FreqTable, params: BaselineParams) -> Self {
        Self {
            table,
            word_bits: params.word_bits,
            bound_unit: (params.lower() >> table.precision()) << params.word_bits,
            precision: table.precision(),
        }
    }

    #[inline]
    fn put(&self, x: &mut u64, s: u8, out: &mut Vec<u32>) -> Result<()> {
        let f = u64::from(self.table.freq(s));
        if f == 0 {
            return Err(Error::UnencodableSymbol(s));
        }
        let x_max = self.bound_unit * f;
        let mask = (1u64 << self.word_bits) - 1;
        while *x >= x_max {
            out.push((*x & mask) as u32);
            *x >>= self.word_bits;
        }
        *x = ((*x / f) << self.precision) + (*x % f) + u64::from(self.table.cdf(s));
        Ok(())
    }
}

pub fn baseline_encode(
    symbols: &[u8],
    table: &FreqTable,
    params: BaselineParams,
) -> Result<BaselineStream> {
    params.check_table(table)?;
    let enc = Encoder::new(table, params);
    let mut words = Vec::with_capacity(symbols.len() / 2);
    let mut x = params.lower();
    for &s in symbols.iter().rev() {
        enc.put(&mut x, s, &mut words)?;
    }
    words.reverse();
    Ok(BaselineStream {
        params,
        table: table.clone(),
        len: symbols.len() as u64,
        final_state: x,
        words,
    })
}

fn check_state(x: u64, params: BaselineParams) -> Result<()> {
    if x < params.lower() || x >= params.upper() {
        return Err(Error::StateOutOfRange {
            state: x,
            low: params.lower(),
            high: params.upper(),
        });
    }
    Ok(())
}

fn check_end(x: u64, params: BaselineParams, consumed: usize, total: usize) -> Result<()> {
    if x != params.lower() {
        return Err(Error::FinalStateMismatch {
            expected: params.lower(),
            found: x,
        });
    }
    if consumed != total {
        return Err(Error::ResidualWords {
            expected: 0,
            found: (total - consumed) as u64,
            nonzero: 0,
        });
    }
    Ok(())
}

pub fn baseline_decode(stream: &BaselineStream) -> Result<Vec<u8>> {
    let p = stream.params;
    p.check_table(&stream.table)?;
    check_state(stream.final_state, p)?;
    let n = stream.len as usize;
    let table = &stream.table;
    match table.dense_slots() {
        Some(slots) => decode_single(stream, n, |d| slots[d as usize]),
        None => decode_single(stream, n, |d| table.symbol_of(d)),
    }
}

#[inline(always)]
fn decode_single<F: Fn(u32) -> u8>(
    stream: &BaselineStream,
    n: usize,
    slot_symbol: F,
) -> Result<Vec<u8>> {
    let p = stream.params;
    let table = &stream.table;
    let precision = table.precision();
    let slot_mask = (1u64 << precision) - 1;
    let lower = p.lower();
    let b = p.word_bits;
    let words = &stream.words;
    let mut rd = 0usize;
    let mut x = stream.final_state;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let slot = (x & slot_mask) as u32;
        let s = slot_symbol(slot);
        x = u64::from(table.freq(s)) * (x >> precision) + u64::from(slot - table.cdf(s));
        while x < lower {
            let Some(&w) = words.get(rd) else {
                return Err(Error::PayloadExhausted {
                    decoded: i as u64,
                    expected: n as u64,
                });
            };
            rd += 1;
            x = (x << b) | u64::from(w);
        }
        out.push(s);
    }
    check_end(x, p, rd, words.len())?;
    Ok(out)
}

/// Two coders with their own states sharing one word buffer. Symbol `i`
/// goes to lane `i mod 2`.
pub fn interleaved2_encode(
    symbols: &[u8],
    table: &FreqTable,
    params: BaselineParams,
) -> Result<InterleavedStream> {
    params.check_table(table)?;
    let enc = Encoder::new(table, params);
    let mut words = Vec::with_capacity(symbols.len() / 2);
    let mut x = [params.lower(); 2];
    for (i, &s) in symbols.iter().enumerate().rev() {
        enc.put(&mut x[i & 1], s, &mut words)?;
    }
    words.reverse();
    Ok(InterleavedStream {
        params,
        table: table.clone(),
        len: symbols.len() as u64,
        final_states: x,
        words,
    })
}

pub fn interleaved2_decode(stream: &InterleavedStream) -> Result<Vec<u8>> {
    let p = stream.params;
    p.check_table(&stream.table)?;
    for &x in &stream.final_states {
        check_state(x, p)?;
    }
    let n = stream.len as usize;
    let table = &stream.table;
    match table.dense_slots() {
        Some(slots) => decode_pair(stream, n, |d| slots[d as usize]),
        None => decode_pair(stream, n, |d| table.symbol_of(d)),
    }
}

#[inline(always)]
fn decode_pair<F: Fn(u32) -> u8>(
    stream: &InterleavedStream,
    n: usize,
    slot_symbol: F,
) -> Result<Vec<u8>> {
    let p = stream.params;
    let table = &stream.table;
    let precision = table.precision();
    let slot_mask = (1u64 << precision) - 1;
    let lower = p.lower();
    let b = p.word_bits;
    let words = &stream.words;
    let mut rd = 0usize;
    let [mut x0, mut x1] = stream.final_states;
    let mut out = Vec::with_capacity(n);

    macro_rules! refill {
        ($x:ident, $i:expr) => {
            while $x < lower {
                let Some(&w) = words.get(rd) else {
                    return Err(Error::PayloadExhausted {
                        decoded: $i as u64,
                        expected: n as u64,
                    });
                };
                rd += 1;
                $x = ($x << b) | u64::from(w);
            }
        };
    }

    let mut i = 0;
    while i + 1 < n {
        // Both lookups are independent; the refills must run in lane order
        // to mirror the encoder's emission order.
        let slot0 = (x0 & slot_mask) as u32;
        let slot1 = (x1 & slot_mask) as u32;
        let s0 = slot_symbol(slot0);
        let s1 = slot_symbol(slot1);
        x0 = u64::from(table.freq(s0)) * (x0 >> precision) + u64::from(slot0 - table.cdf(s0));
        x1 = u64::from(table.freq(s1)) * (x1 >> precision) + u64::from(slot1 - table.cdf(s1));
        refill!(x0, i);
        refill!(x1, i + 1);
        out.push(s0);
        out.push(s1);
        i += 2;
    }
    if i < n {
        let slot0 = (x0 & slot_mask) as u32;
        let s0 = slot_symbol(slot0);
        x0 = u64::from(table.freq(s0)) * (x0 >> precision) + u64::from(slot0 - table.cdf(s0));
        refill!(x0, i);
        out.push(s0);
    }
    check_end(x0, p, rd, words.len())?;
    check_end(x1, p, rd, words.len())?;
    Ok(out)
}
