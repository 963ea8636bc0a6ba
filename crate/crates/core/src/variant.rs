//! The deque-based rANS variant.
//!
//! The encoder walks the message backwards. For each symbol it runs one
//! forward BEMR step with the symbol frequency as base, refilling `v·n` bits
//! from end `B` of the deque when needed, and pushes the `n`-bit digit
//! `cdf_s + (x mod f_s)` at end `A`. Decoding walks forwards: it pops the
//! digit at end `A`, resolves its symbol from the digit alone, folds the
//! remainder back into the state and pushes any spilled chunk at end `B`.
//!
//! Because every surviving payload word is a complete digit, the first `l`
//! symbols of the message can be read straight from the payload: the word at
//! position `j` from end `A` decodes to symbol `j`.

use rayon::prelude::*;

use crate::bemr::{bemr_step, ibemr_step, BemrParams};
use crate::deque::{ChunkValue, End, WordDeque};
use crate::error::{Error, Result};
use crate::freq::FreqTable;

/// Digit width `n`, refill multiplier `v` and state bound exponent `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoderParams {
    digit_bits: u32,
    refill_words: u32,
    state_bits: u32,
}

impl Default for CoderParams {
    /// `n = 16, v = 3, T = 48` on a 64-bit state.
    fn default() -> Self {
        Self {
            digit_bits: 16,
            refill_words: 3,
            state_bits: 48,
        }
    }
}

impl CoderParams {
    pub fn new(digit_bits: u32, refill_words: u32, state_bits: u32) -> Result<Self> {
        let bad = |why: &str| {
            Err(Error::InvalidParams(format!(
                "n={digit_bits}, v={refill_words}, T={state_bits}: {why}"
            )))
        };
        if digit_bits == 0 || digit_bits > crate::freq::MAX_PRECISION {
            return bad("digit width out of range");
        }
        if refill_words == 0 || refill_words as u64 * digit_bits as u64 > state_bits as u64 {
            return bad("need 1 <= v and v*n <= T");
        }
        if state_bits > 63 || state_bits + digit_bits > 64 {
            return bad("need T <= 63 and T + n <= 64");
        }
        Ok(Self {
            digit_bits,
            refill_words,
            state_bits,
        })
    }

    #[inline]
    pub fn digit_bits(&self) -> u32 {
        self.digit_bits
    }

    #[inline]
    pub fn refill_words(&self) -> u32 {
        self.refill_words
    }

    #[inline]
    pub fn state_bits(&self) -> u32 {
        self.state_bits
    }

    /// Bits moved per renormalization, `t = v·n`.
    #[inline]
    pub fn refill_bits(&self) -> u32 {
        self.refill_words * self.digit_bits
    }

    /// `2^(T - v·n)`
    #[inline]
    pub fn low(&self) -> u64 {
        1 << (self.state_bits - self.refill_bits())
    }

    /// `2^T`
    #[inline]
    pub fn high(&self) -> u64 {
        1 << self.state_bits
    }

    /// `2^T - 1`, the state every encode starts from and every decode ends at.
    #[inline]
    pub fn initial_state(&self) -> u64 {
        self.high() - 1
    }

    pub fn bemr(&self) -> BemrParams {
        BemrParams::new(self.state_bits, self.refill_bits()).expect("validated by CoderParams::new")
    }

    fn check_table(&self, table: &FreqTable) -> Result<()> {
        if table.precision() != self.digit_bits {
            return Err(Error::InvalidParams(format!(
                "table precision {} differs from digit width {}",
                table.precision(),
                self.digit_bits
            )));
        }
        Ok(())
    }
}

/// What the encoder does when a refill finds the deque short of words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnderflowPolicy {
    /// Complete the refill with zero words and count them.
    #[default]
    Pad,
    /// Fail with [`Error::Underflow`].
    Strict,
}

/// A coded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedStream {
    pub params: CoderParams,
    pub table: FreqTable,
    /// Number of source symbols `N`.
    pub len: u64,
    pub final_state: u64,
    /// Zero words synthesized by the encoder; the decoder leaves exactly
    /// this many zero words unread.
    pub pad_words: u32,
    /// Surviving digits in `A → B` order: newest digit first, which is also
    /// the order the decoder consumes them.
    pub payload: Vec<u32>,
}

impl EncodedStream {
    /// Number of payload digits `l`, the size of the direct-access region.
    #[inline]
    pub fn direct_access_len(&self) -> u64 {
        self.payload.len() as u64
    }

    pub fn payload_bits(&self) -> u64 {
        self.payload.len() as u64 * u64::from(self.params.digit_bits)
    }

    fn validate(&self) -> Result<()> {
        self.params.check_table(&self.table)?;
        let m = self.table.total();
        if let Some(&w) = self.payload.iter().find(|&&w| w >= m) {
            return Err(Error::SlotOutOfRange {
                slot: u64::from(w),
                total: u64::from(m),
            });
        }
        if self.final_state >= self.params.high() {
            return Err(Error::StateOutOfRange {
                state: self.final_state,
                low: self.params.low(),
                high: self.params.high(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceEvent {
    /// Coder state between operations.
    State(u64),
    /// A digit pushed by the encoder or popped by the decoder.
    Digit(u32),
    /// A chunk refilled by the encoder or spilled by the decoder.
    Renorm(u64),
}

/// Ordered record of states and I/O of one encode or decode run.
///
/// An encoder trace read backwards equals the decoder trace of the same
/// stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateTrace {
    pub events: Vec<TraceEvent>,
}

impl StateTrace {
    pub fn reversed(&self) -> StateTrace {
        StateTrace {
            events: self.events.iter().rev().copied().collect(),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = u64> + '_ {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::State(x) => Some(*x),
            _ => None,
        })
    }

    fn push(&mut self, e: TraceEvent) {
        self.events.push(e);
    }
}

pub fn encode(symbols: &[u8], table: &FreqTable, params: CoderParams) -> Result<EncodedStream> {
    encode_impl(symbols, table, params, UnderflowPolicy::Pad, None)
}

pub fn encode_with_policy(
    symbols: &[u8],
    table: &FreqTable,
    params: CoderParams,
    policy: UnderflowPolicy,
) -> Result<EncodedStream> {
    encode_impl(symbols, table, params, policy, None)
}

pub fn encode_traced(
    symbols: &[u8],
    table: &FreqTable,
    params: CoderParams,
) -> Result<(EncodedStream, StateTrace)> {
    let mut trace = StateTrace::default();
    let stream = encode_impl(
        symbols,
        table,
        params,
        UnderflowPolicy::Pad,
        Some(&mut trace),
    )?;
    Ok((stream, trace))
}

fn encode_impl(
    symbols: &[u8],
    table: &FreqTable,
    params: CoderParams,
    policy: UnderflowPolicy,
    mut trace: Option<&mut StateTrace>,
) -> Result<EncodedStream> {
    params.check_table(table)?;
    let bemr = params.bemr();
    let padding = policy == UnderflowPolicy::Pad;
    let mut deque = WordDeque::with_capacity(params.digit_bits, symbols.len())?;
    let mut x = params.initial_state();
    let mut refills = 0u64;
    if let Some(t) = trace.as_deref_mut() {
        t.push(TraceEvent::State(x));
    }

    for &s in symbols.iter().rev() {
        let f = table.freq(s);
        if f == 0 {
            return Err(Error::UnencodableSymbol(s));
        }
        let pads_before = deque.pad_count();
        let step = bemr_step(x, u64::from(f), &bemr, &mut deque, padding)?;
        if let Some(q) = step.refill {
            // Zero words from a later refill would land between real words
            // on the decoder side, so only the first refill may pad.
            if deque.pad_count() > pads_before && refills > 0 {
                return Err(Error::UnrecoverablePadding { pop_index: refills });
            }
            refills += 1;
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceEvent::Renorm(q));
                t.push(TraceEvent::State(step.widened));
            }
        }
        let digit = (step.digit as u32) + table.cdf(s);
        deque.push_word(End::A, digit)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::Digit(digit));
            t.push(TraceEvent::State(step.state));
        }
        x = step.state;
    }

    Ok(EncodedStream {
        params,
        table: table.clone(),
        len: symbols.len() as u64,
        final_state: x,
        pad_words: u32::try_from(deque.pad_count())
            .map_err(|_| Error::InvalidParams("pad count overflow".into()))?,
        payload: deque.to_vec(),
    })
}

/// Decodes the whole message and verifies the end-of-stream invariants:
/// the state returns to `2^T - 1` and exactly `pad_words` zero words remain.
pub fn decode(stream: &EncodedStream) -> Result<Vec<u8>> {
    stream.validate()?;
    let n =
        usize::try_from(stream.len).map_err(|_| Error::InvalidParams("length overflow".into()))?;
    let table = &stream.table;
    match table.dense_slots() {
        Some(slots) => decode_queue(stream, n, true, |d| slots[d as usize]),
        None => decode_queue(stream, n, true, |d| table.symbol_of(d)),
    }
}

/// The first `count` symbols, decoded without the end-of-stream checks.
/// Works on damaged streams as long as the payload lasts.
pub fn decode_prefix(stream: &EncodedStream, count: u64) -> Result<Vec<u8>> {
    stream.validate()?;
    let n = usize::try_from(count.min(stream.len))
        .map_err(|_| Error::InvalidParams("length overflow".into()))?;
    let table = &stream.table;
    match table.dense_slots() {
        Some(slots) => decode_queue(stream, n, false, |d| slots[d as usize]),
        None => decode_queue(stream, n, false, |d| table.symbol_of(d)),
    }
}

/// The decoder only ever pops at end `A` and pushes at end `B`, so the deque
/// degenerates to a queue: the payload followed by spilled words.
#[inline(always)]
fn decode_queue<F: Fn(u32) -> u8>(
    stream: &EncodedStream,
    n: usize,
    verify: bool,
    slot_symbol: F,
) -> Result<Vec<u8>> {
    let p = stream.params;
    let table = &stream.table;
    let v = p.refill_words as usize;
    let digit_bits = p.digit_bits;
    let word_mask = (1u64 << digit_bits) - 1;
    let t = p.refill_bits();
    let spill_mask = (1u64 << t) - 1;
    let high = p.high();

    let mut queue = Vec::with_capacity(stream.payload.len() + n + stream.pad_words as usize + v);
    queue.extend_from_slice(&stream.payload);
    let mut out = Vec::with_capacity(n);
    let mut rd = 0usize;
    let mut x = stream.final_state;

    for i in 0..n {
        let Some(&d) = queue.get(rd) else {
            return Err(Error::PayloadExhausted {
                decoded: i as u64,
                expected: n as u64,
            });
        };
        rd += 1;
        let s = slot_symbol(d);
        let f = u64::from(table.freq(s));
        x = f * x + u64::from(d - table.cdf(s));
        if x >= high {
            let chunk = x & spill_mask;
            for j in 0..v {
                queue.push(((chunk >> (j as u32 * digit_bits)) & word_mask) as u32);
            }
            x >>= t;
        }
        out.push(s);
    }

    if verify {
        finish(stream, x, &queue[rd..])?;
    }
    Ok(out)
}

fn finish(stream: &EncodedStream, x: u64, residual: &[u32]) -> Result<()> {
    let expected = stream.params.initial_state();
    if x != expected {
        return Err(Error::FinalStateMismatch { expected, found: x });
    }
    let nonzero = residual.iter().filter(|&&w| w != 0).count() as u64;
    if residual.len() as u64 != u64::from(stream.pad_words) || nonzero != 0 {
        return Err(Error::ResidualWords {
            expected: u64::from(stream.pad_words),
            found: residual.len() as u64,
            nonzero,
        });
    }
    Ok(())
}

/// Step-by-step decode on a [`WordDeque`] through [`ibemr_step`], recording
/// every state and I/O event.
pub fn decode_traced(stream: &EncodedStream) -> Result<(Vec<u8>, StateTrace)> {
    stream.validate()?;
    let p = stream.params;
    let bemr = p.bemr();
    let table = &stream.table;
    let mut deque = WordDeque::from_words(p.digit_bits, stream.payload.iter().copied())?;
    let mut trace = StateTrace::default();
    let mut out = Vec::with_capacity(stream.len as usize);
    let mut x = stream.final_state;
    trace.push(TraceEvent::State(x));

    for i in 0..stream.len {
        let d = deque
            .pop_word(End::A)
            .map_err(|_| Error::PayloadExhausted {
                decoded: i,
                expected: stream.len,
            })?;
        let (s, cdf, f) = table.symbol_at(u64::from(d))?;
        trace.push(TraceEvent::Digit(d));
        let step = ibemr_step(x, u64::from(f), u64::from(d - cdf), &bemr)?;
        if let Some(chunk) = step.emitted {
            trace.push(TraceEvent::State(step.widened));
            trace.push(TraceEvent::Renorm(chunk));
            deque.push_chunk(End::B, ChunkValue::new(chunk, p.refill_words))?;
        }
        x = step.state;
        trace.push(TraceEvent::State(x));
        out.push(s);
    }

    finish(stream, x, &deque.to_vec())?;
    Ok((out, trace))
}

/// Symbol `j` (1-based) of the message, read from payload word `j - 1`
/// without touching the coder state.
pub fn direct_access(stream: &EncodedStream, j: u64) -> Result<u8> {
    let l = stream.direct_access_len();
    if j == 0 || j > l {
        return Err(Error::BeyondDirectAccess {
            position: j,
            region: l,
        });
    }
    Ok(stream
        .table
        .symbol_at(u64::from(stream.payload[(j - 1) as usize]))?
        .0)
}

/// The first `count` symbols, each resolved from its own digit.
pub fn batch_extract(stream: &EncodedStream, count: u64) -> Result<Vec<u8>> {
    let digits = direct_region(stream, count)?;
    digits
        .iter()
        .map(|&d| stream.table.symbol_at(u64::from(d)).map(|r| r.0))
        .collect()
}

/// [`batch_extract`] spread over the rayon pool.
pub fn batch_extract_parallel(stream: &EncodedStream, count: u64) -> Result<Vec<u8>> {
    let digits = direct_region(stream, count)?;
    let table = &stream.table;
    digits
        .par_chunks(1 << 14)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&d| table.symbol_at(u64::from(d)).map(|r| r.0))
                .collect::<Result<Vec<u8>>>()
        })
        .collect::<Result<Vec<Vec<u8>>>>()
        .map(|parts| parts.concat())
}

fn direct_region(stream: &EncodedStream, count: u64) -> Result<&[u32]> {
    let l = stream.direct_access_len();
    if count > l {
        return Err(Error::BeyondDirectAccess {
            position: count,
            region: l,
        });
    }
    Ok(&stream.payload[..count as usize])
}

/// Length of the message prefix guaranteed to decode correctly when the
/// payload word at decode-order position `k` (1-based) is damaged.
pub fn corruption_scope(stream: &EncodedStream, k: u64) -> Result<u64> {
    let l = stream.direct_access_len();
    if k == 0 || k > l {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            len: l as usize,
        });
    }
    Ok(k - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freq::ALPHABET;

    /// n=2 table over {a, b} with f_a = 3, f_b = 1.
    fn micro() -> (FreqTable, CoderParams) {
        let mut f = [0u32; ALPHABET];
        f[b'a' as usize] = 3;
        f[b'b' as usize] = 1;
        (
            FreqTable::from_frequencies(f, 2).unwrap(),
            CoderParams::new(2, 1, 4).unwrap(),
        )
    }

    #[test]
    fn micro_ab() {
        let (t, p) = micro();
        let s = encode(b"ab", &t, p).unwrap();
        assert_eq!(s.payload, vec![0, 3]);
        assert_eq!((s.final_state, s.pad_words), (5, 0));
        assert_eq!(decode(&s).unwrap(), b"ab");
        let (_, trace) = decode_traced(&s).unwrap();
        assert_eq!(
            trace.events,
            vec![
                TraceEvent::State(5),
                TraceEvent::Digit(0),
                TraceEvent::State(15),
                TraceEvent::Digit(3),
                TraceEvent::State(15),
            ]
        );
    }

    #[test]
    fn micro_aa_refills() {
        let (t, p) = micro();
        let (s, enc) = encode_traced(b"aa", &t, p).unwrap();
        assert_eq!(s.payload, vec![2]);
        assert_eq!((s.final_state, s.pad_words), (6, 0));
        assert_eq!(
            enc.events,
            vec![
                TraceEvent::State(15),
                TraceEvent::Digit(0),
                TraceEvent::State(5),
                TraceEvent::Renorm(0),
                TraceEvent::State(20),
                TraceEvent::Digit(2),
                TraceEvent::State(6),
            ]
        );
        let (out, dec) = decode_traced(&s).unwrap();
        assert_eq!(out, b"aa");
        assert_eq!(dec, enc.reversed());
        assert_eq!(decode(&s).unwrap(), b"aa");
    }

    #[test]
    fn empty_message() {
        let (t, p) = micro();
        let s = encode(b"", &t, p).unwrap();
        assert!(s.payload.is_empty());
        assert_eq!(s.final_state, 15);
        assert_eq!(decode(&s).unwrap(), b"");
    }

    #[test]
    fn direct_access_micro() {
        let (t, p) = micro();
        let s = encode(b"ab", &t, p).unwrap();
        assert_eq!(direct_access(&s, 1).unwrap(), b'a');
        assert_eq!(direct_access(&s, 2).unwrap(), b'b');
        assert!(matches!(
            direct_access(&s, 3),
            Err(Error::BeyondDirectAccess { .. })
        ));
        assert!(direct_access(&s, 0).is_err());
        assert_eq!(batch_extract(&s, 2).unwrap(), b"ab");
        assert_eq!(batch_extract(&s, 0).unwrap(), b"");
        assert!(batch_extract(&s, 3).is_err());

        let s = encode(b"aa", &t, p).unwrap();
        assert_eq!(s.direct_access_len(), 1);
        let empty = encode(b"", &t, p).unwrap();
        assert!(direct_access(&empty, 1).is_err());
    }

    #[test]
    fn corruption_scope_bounds() {
        let (t, p) = micro();
        let s = encode(b"ab", &t, p).unwrap();
        assert_eq!(corruption_scope(&s, 1).unwrap(), 0);
        assert_eq!(corruption_scope(&s, 2).unwrap(), 1);
        assert!(corruption_scope(&s, 3).is_err());
        assert!(corruption_scope(&s, 0).is_err());
    }

    #[test]
    fn unencodable_symbol() {
        let (t, p) = micro();
        assert_eq!(encode(b"abc", &t, p), Err(Error::UnencodableSymbol(b'c')));
    }

    #[test]
    fn table_precision_must_match() {
        let (t, _) = micro();
        assert!(encode(b"a", &t, CoderParams::default()).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(CoderParams::new(16, 3, 48).is_ok());
        assert!(CoderParams::new(16, 4, 48).is_err());
        assert!(CoderParams::new(16, 3, 49).is_err());
        assert!(CoderParams::new(8, 6, 48).is_ok());
        assert!(CoderParams::new(16, 0, 48).is_err());
        assert!(CoderParams::new(0, 1, 8).is_err());
        assert!(CoderParams::new(8, 2, 15).is_err());
        let d = CoderParams::default();
        assert_eq!(
            (d.digit_bits(), d.refill_words(), d.state_bits()),
            (16, 3, 48)
        );
        assert_eq!((d.low(), d.high()), (1, 1 << 48));
    }

    #[test]
    fn single_symbol_full_table_pads_once() {
        // f = 2^n with v = 1 forces a refill on an empty deque at the first step
        let mut f = [0u32; ALPHABET];
        f[b'z' as usize] = 4;
        let t = FreqTable::from_frequencies(f, 2).unwrap();
        let p = CoderParams::new(2, 1, 4).unwrap();
        let s = encode(b"zzzzz", &t, p).unwrap();
        assert_eq!(s.pad_words, 1);
        assert_eq!(decode(&s).unwrap(), b"zzzzz");
        assert_eq!(decode_traced(&s).unwrap().0, b"zzzzz");
        assert!(matches!(
            encode_with_policy(b"z", &t, p, UnderflowPolicy::Strict),
            Err(Error::Underflow { .. })
        ));
    }

    #[test]
    fn integrity_failures() {
        let t = FreqTable::from_data(b"abracadabra", 8).unwrap();
        let p = CoderParams::new(8, 2, 24).unwrap();
        let s = encode(b"abracadabra", &t, p).unwrap();

        let mut bad = s.clone();
        bad.final_state ^= 1;
        assert!(decode(&bad).is_err());

        let mut longer = s.clone();
        longer.len += 50;
        assert!(matches!(
            decode(&longer),
            Err(Error::PayloadExhausted { .. } | Error::FinalStateMismatch { .. })
        ));

        let mut extra = s.clone();
        extra.payload.push(0);
        assert!(decode(&extra).is_err());

        let mut oob = s.clone();
        oob.final_state = 1 << 24;
        assert!(matches!(decode(&oob), Err(Error::StateOutOfRange { .. })));

        let mut wide = s;
        wide.payload[0] = 256;
        assert!(matches!(decode(&wide), Err(Error::SlotOutOfRange { .. })));
    }

    #[test]
    fn prefix_skips_end_checks() {
        let t = FreqTable::from_data(b"abracadabra", 8).unwrap();
        let p = CoderParams::new(8, 2, 24).unwrap();
        let mut s = encode(b"abracadabra", &t, p).unwrap();
        assert_eq!(decode_prefix(&s, 4).unwrap(), b"abra");
        assert_eq!(decode_prefix(&s, 99).unwrap(), b"abracadabra");
        let l = s.payload.len();
        s.payload[l - 1] ^= 1;
        assert_eq!(
            &decode_prefix(&s, 11).unwrap()[..l - 1],
            &b"abracadabra"[..l - 1]
        );
    }
}
