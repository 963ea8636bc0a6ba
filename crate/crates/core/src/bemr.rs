//! Renormalized conversion between a bit source and mixed-radix digits.
//!
//! The forward direction divides a bounded state by each base in turn and
//! refills the state from a [`WordDeque`] whenever it would fall below the
//! interval `[2^(T-t), 2^T)`. The inverse multiplies the digits back in and
//! spills `t` low bits whenever the state reaches `2^T`. Both directions
//! keep the state inside the interval, so the arithmetic never needs more
//! than one machine word.

use crate::deque::{ChunkValue, End, WordDeque};
use crate::error::{Error, Result};

/// State bound `T` and refill width `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BemrParams {
    state_bits: u32,
    chunk_bits: u32,
}

impl BemrParams {
    pub fn new(state_bits: u32, chunk_bits: u32) -> Result<Self> {
        if chunk_bits == 0 || chunk_bits > state_bits || state_bits > 63 {
            return Err(Error::InvalidParams(format!(
                "need 0 < t <= T <= 63, got T={state_bits}, t={chunk_bits}"
            )));
        }
        Ok(Self {
            state_bits,
            chunk_bits,
        })
    }

    #[inline]
    pub fn state_bits(&self) -> u32 {
        self.state_bits
    }

    #[inline]
    pub fn chunk_bits(&self) -> u32 {
        self.chunk_bits
    }

    /// Lower end of the state interval, `2^(T-t)`.
    #[inline]
    pub fn low(&self) -> u64 {
        1 << (self.state_bits - self.chunk_bits)
    }

    /// Exclusive upper end of the state interval, `2^T`.
    #[inline]
    pub fn high(&self) -> u64 {
        1 << self.state_bits
    }

    /// Largest admissible base. A base above `2^t` could need a second
    /// refill, and one above `2^(64-T)` would overflow the state word.
    #[inline]
    pub fn max_base(&self) -> u64 {
        1 << self.chunk_bits.min(64 - self.state_bits)
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        x >= self.low() && x < self.high()
    }

    fn check_base(&self, base: u64) -> Result<()> {
        if base == 0 || base > self.max_base() {
            return Err(Error::BaseOutOfRange {
                base,
                max: self.max_base(),
            });
        }
        Ok(())
    }
}

/// Outcome of one forward step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForwardStep {
    pub digit: u64,
    pub state: u64,
    /// Chunk pulled from the bit source before dividing, if any.
    pub refill: Option<u64>,
    /// State after the refill and before the division.
    pub widened: u64,
}

/// Outcome of one inverse step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InverseStep {
    pub state: u64,
    /// Low `t` bits spilled from the state, if it reached `2^T`.
    pub emitted: Option<u64>,
    /// State after multiplying the digit back in, before the spill.
    pub widened: u64,
}

/// Converts the state to one digit of base `base`, refilling `t` bits from
/// end `B` of `source` first when `x < base·2^(T-t)`.
pub fn bemr_step(
    x: u64,
    base: u64,
    params: &BemrParams,
    source: &mut WordDeque,
    padding: bool,
) -> Result<ForwardStep> {
    params.check_base(base)?;
    let threshold = base << (params.state_bits - params.chunk_bits);
    let mut widened = x;
    let mut refill = None;
    if x < threshold {
        let t = params.chunk_bits;
        let word_bits = source.word_bits();
        if !t.is_multiple_of(word_bits) {
            return Err(Error::InvalidParams(format!(
                "refill width {t} is not a multiple of the {word_bits}-bit word"
            )));
        }
        let q = source.pop_chunk(End::B, t / word_bits, padding)?.value;
        widened = (x << t) | q;
        debug_assert!(
            x < params.low() || widened >= threshold,
            "second refill needed"
        );
        refill = Some(q);
    }
    Ok(ForwardStep {
        digit: widened % base,
        state: widened / base,
        refill,
        widened,
    })
}

/// Folds digit `digit` of base `base` back into the state, spilling the low
/// `t` bits when the result reaches `2^T`. The caller pushes the spilled
/// chunk at end `B`.
pub fn ibemr_step(x: u64, base: u64, digit: u64, params: &BemrParams) -> Result<InverseStep> {
    params.check_base(base)?;
    if digit >= base {
        return Err(Error::DigitOutOfRange { digit, base });
    }
    if x >= params.high() {
        return Err(Error::StateOutOfRange {
            state: x,
            low: params.low(),
            high: params.high(),
        });
    }
    let widened = base * x + digit;
    if widened >= params.high() {
        let t = params.chunk_bits;
        Ok(InverseStep {
            state: widened >> t,
            emitted: Some(widened & ((1 << t) - 1)),
            widened,
        })
    } else {
        Ok(InverseStep {
            state: widened,
            emitted: None,
            widened,
        })
    }
}

/// Runs [`bemr_step`] for `i = N` down to `1`. Returns `digits[i-1] = r_i`
/// and the final state, which must accompany the digits for inversion.
pub fn bemr_convert(
    x: u64,
    bases: &[u64],
    params: &BemrParams,
    source: &mut WordDeque,
    padding: bool,
) -> Result<(Vec<u64>, u64)> {
    let mut digits = vec![0; bases.len()];
    let mut x = x;
    for (digit, &base) in digits.iter_mut().zip(bases).rev() {
        let step = bemr_step(x, base, params, source, padding)?;
        *digit = step.digit;
        x = step.state;
    }
    Ok((digits, x))
}

/// Runs [`ibemr_step`] for `i = 1` to `N`, pushing every spilled chunk at
/// end `B` of a fresh deque of `word_bits`-bit words.
pub fn ibemr_convert(
    x: u64,
    bases: &[u64],
    digits: &[u64],
    params: &BemrParams,
    word_bits: u32,
) -> Result<(WordDeque, u64)> {
    if bases.len() != digits.len() {
        return Err(Error::InvalidParams(format!(
            "{} bases but {} digits",
            bases.len(),
            digits.len()
        )));
    }
    if !params.chunk_bits.is_multiple_of(word_bits) {
        return Err(Error::InvalidParams(format!(
            "refill width {} is not a multiple of the {word_bits}-bit word",
            params.chunk_bits
        )));
    }
    let width = params.chunk_bits / word_bits;
    let mut out = WordDeque::new(word_bits)?;
    let mut x = x;
    for (&base, &digit) in bases.iter().zip(digits) {
        let step = ibemr_step(x, base, digit, params)?;
        if let Some(chunk) = step.emitted {
            out.push_chunk(End::B, ChunkValue::new(chunk, width))?;
        }
        x = step.state;
    }
    Ok((out, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p84() -> BemrParams {
        BemrParams::new(8, 4).unwrap()
    }

    #[test]
    fn step_without_refill() {
        let mut src = WordDeque::from_words(4, [9]).unwrap();
        let s = bemr_step(200, 10, &p84(), &mut src, false).unwrap();
        assert_eq!((s.digit, s.state, s.refill), (0, 20, None));
        assert_eq!(src.word_count(), 1);
    }

    #[test]
    fn step_with_refill() {
        let mut src = WordDeque::from_words(4, [5]).unwrap();
        let s = bemr_step(20, 10, &p84(), &mut src, false).unwrap();
        assert_eq!(
            (s.digit, s.state, s.refill, s.widened),
            (5, 32, Some(5), 325)
        );
        assert!(src.is_empty());
    }

    #[test]
    fn unit_base_is_identity() {
        let mut src = WordDeque::new(4).unwrap();
        for x in 16..256 {
            let s = bemr_step(x, 1, &p84(), &mut src, false).unwrap();
            assert_eq!((s.digit, s.state, s.refill), (0, x, None));
            let inv = ibemr_step(x, 1, 0, &p84()).unwrap();
            assert_eq!((inv.state, inv.emitted), (x, None));
        }
    }

    #[test]
    fn convert_two_digits() {
        let mut src = WordDeque::from_words(4, [5]).unwrap();
        let (digits, x) = bemr_convert(200, &[10, 10], &p84(), &mut src, false).unwrap();
        assert_eq!(digits, vec![5, 0]);
        assert_eq!(x, 32);

        let (emitted, x) = ibemr_convert(32, &[10, 10], &[5, 0], &p84(), 4).unwrap();
        assert_eq!(emitted.to_vec(), vec![5]);
        assert_eq!(x, 200);
    }

    #[test]
    fn inverse_steps() {
        let s = ibemr_step(32, 10, 5, &p84()).unwrap();
        assert_eq!((s.emitted, s.state), (Some(5), 20));
        let s = ibemr_step(20, 10, 0, &p84()).unwrap();
        assert_eq!((s.emitted, s.state), (None, 200));
    }

    #[test]
    fn empty_sequences() {
        let mut src = WordDeque::new(4).unwrap();
        assert_eq!(
            bemr_convert(77, &[], &p84(), &mut src, false).unwrap(),
            (vec![], 77)
        );
        let (d, x) = ibemr_convert(77, &[], &[], &p84(), 4).unwrap();
        assert!(d.is_empty());
        assert_eq!(x, 77);
    }

    #[test]
    fn binary_bases_extract_low_bits() {
        let params = BemrParams::new(8, 2).unwrap();
        let mut src = WordDeque::from_words(1, [1, 0]).unwrap();
        let (digits, x) = bemr_convert(0b1011_0110, &[2; 3], &params, &mut src, false).unwrap();
        // r_3 = low bit of 182; 91 then refills to 0b1_0110_1101 = 365; r_1 = low bit of 182
        assert_eq!(digits, vec![0, 1, 0]);
        assert_eq!(x, 91);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut src = WordDeque::new(4).unwrap();
        assert!(matches!(
            bemr_step(100, 17, &p84(), &mut src, false),
            Err(Error::BaseOutOfRange { .. })
        ));
        assert!(matches!(
            bemr_step(100, 0, &p84(), &mut src, false),
            Err(Error::BaseOutOfRange { .. })
        ));
        assert!(matches!(
            bemr_step(20, 10, &p84(), &mut src, false),
            Err(Error::Underflow { .. })
        ));
        assert!(matches!(
            ibemr_step(20, 10, 10, &p84()),
            Err(Error::DigitOutOfRange { .. })
        ));
        assert!(BemrParams::new(8, 9).is_err());
        assert!(BemrParams::new(64, 4).is_err());
        assert!(BemrParams::new(8, 0).is_err());
        // the base bound also respects the machine word
        assert_eq!(BemrParams::new(48, 48).unwrap().max_base(), 1 << 16);
    }

    #[test]
    fn base_at_upper_bound() {
        let params = p84();
        let mut src = WordDeque::from_words(4, [0xF]).unwrap();
        let s = bemr_step(16, 16, &params, &mut src, false).unwrap();
        assert_eq!(s.refill, Some(0xF));
        assert!(params.contains(s.state));
        let inv = ibemr_step(s.state, 16, s.digit, &params).unwrap();
        assert_eq!((inv.emitted, inv.state), (Some(0xF), 16));
    }
}
