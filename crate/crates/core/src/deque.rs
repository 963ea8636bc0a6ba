//! A double-ended queue of fixed-width words.
//!
//! Every coder in this crate moves whole words: a symbol digit is one word
//! and a renormalization refill is `v` words. Multi-word chunks follow one
//! layout rule at both ends: the word nearest the end being pushed to (or
//! popped from) carries the most significant bits of the chunk.
//!
//! With the words listed from end `A` to end `B`:
//!
//! * push at `A` prepends `[MSW .. LSW]`
//! * pop at `A` of `u1 .. uk` returns `u1·2^((k-1)n) + … + uk`
//! * push at `B` appends `[LSW .. MSW]`
//! * pop at `B` of `y1 .. yk` returns `yk·2^((k-1)n) + … + y1`

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// One of the two ends of a [`WordDeque`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    A,
    B,
}

/// A value spanning `width_words` consecutive words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChunkValue {
    pub value: u64,
    pub width_words: u32,
}

impl ChunkValue {
    pub fn new(value: u64, width_words: u32) -> Self {
        Self { value, width_words }
    }

    pub fn word(value: u64) -> Self {
        Self::new(value, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordDeque {
    word_bits: u32,
    words: VecDeque<u32>,
    pad_count: u64,
}

impl WordDeque {
    pub const MAX_WORD_BITS: u32 = 32;

    pub fn new(word_bits: u32) -> Result<Self> {
        Self::with_capacity(word_bits, 0)
    }

    pub fn with_capacity(word_bits: u32, capacity: usize) -> Result<Self> {
        if word_bits == 0 || word_bits > Self::MAX_WORD_BITS {
            return Err(Error::InvalidParams(format!(
                "word width {word_bits} outside 1..={}",
                Self::MAX_WORD_BITS
            )));
        }
        Ok(Self {
            word_bits,
            words: VecDeque::with_capacity(capacity),
            pad_count: 0,
        })
    }

    /// Builds a deque from words listed in `A → B` order.
    pub fn from_words<I: IntoIterator<Item = u32>>(word_bits: u32, words: I) -> Result<Self> {
        let mut deque = Self::new(word_bits)?;
        for w in words {
            deque.check_fits(u64::from(w), word_bits)?;
            deque.words.push_back(w);
        }
        Ok(deque)
    }

    #[inline]
    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    #[inline]
    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of zero words synthesized by padded pops at end `B`.
    #[inline]
    pub fn pad_count(&self) -> u64 {
        self.pad_count
    }

    pub fn peek_word(&self, index_from_a: usize) -> Result<u32> {
        self.words
            .get(index_from_a)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: index_from_a,
                len: self.words.len(),
            })
    }

    /// Words in `A → B` order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = u32> + '_ {
        self.words.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.words.iter().copied().collect()
    }

    fn check_fits(&self, value: u64, bits: u32) -> Result<()> {
        if bits < 64 && value >> bits != 0 {
            return Err(Error::ValueOutOfRange { value, bits });
        }
        Ok(())
    }

    fn chunk_bits(&self, width_words: u32) -> Result<u32> {
        let bits = width_words as u64 * self.word_bits as u64;
        if width_words == 0 || bits > 64 {
            return Err(Error::InvalidParams(format!(
                "chunk of {width_words} words of {} bits",
                self.word_bits
            )));
        }
        Ok(bits as u32)
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.word_bits) - 1
    }

    pub fn push_chunk(&mut self, end: End, chunk: ChunkValue) -> Result<()> {
        let bits = self.chunk_bits(chunk.width_words)?;
        self.check_fits(chunk.value, bits)?;
        let mask = self.mask();
        // Emit least significant word first so that the most significant
        // word ends up nearest `end`.
        for i in 0..chunk.width_words {
            let w = ((chunk.value >> (i * self.word_bits)) & mask) as u32;
            match end {
                End::A => self.words.push_front(w),
                End::B => self.words.push_back(w),
            }
        }
        Ok(())
    }

    /// Pops `width_words` words at `end`.
    ///
    /// With `padding` set, an underflow at end `B` is completed with zero
    /// words in the most significant positions and counted in
    /// [`pad_count`](Self::pad_count). End `A` never pads.
    pub fn pop_chunk(&mut self, end: End, width_words: u32, padding: bool) -> Result<ChunkValue> {
        self.chunk_bits(width_words)?;
        let k = width_words as usize;
        let available = self.words.len();
        if available < k && !(padding && end == End::B) {
            return Err(Error::Underflow {
                requested: k,
                available,
            });
        }
        let take = k.min(available);
        self.pad_count += (k - take) as u64;
        let mut value = 0u64;
        for _ in 0..take {
            let w = match end {
                End::A => self.words.pop_front(),
                End::B => self.words.pop_back(),
            };
            // take <= len, so the pop cannot fail
            value = (value << self.word_bits) | u64::from(w.unwrap_or(0));
        }
        Ok(ChunkValue::new(value, width_words))
    }

    #[inline]
    pub fn push_word(&mut self, end: End, word: u32) -> Result<()> {
        self.push_chunk(end, ChunkValue::word(u64::from(word)))
    }

    #[inline]
    pub fn pop_word(&mut self, end: End) -> Result<u32> {
        Ok(self.pop_chunk(end, 1, false)?.value as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn push_layout_msw_nearest_end() {
        let mut d = WordDeque::new(4).unwrap();
        d.push_chunk(End::A, ChunkValue::new(0x5A, 2)).unwrap();
        assert_eq!(d.to_vec(), vec![0x5, 0xA]);

        let mut d = WordDeque::new(4).unwrap();
        d.push_chunk(End::B, ChunkValue::new(0x5A, 2)).unwrap();
        assert_eq!(d.to_vec(), vec![0xA, 0x5]);
    }

    #[test]
    fn pop_at_a_inverts_push() {
        let mut d = WordDeque::from_words(4, [0x5, 0xA]).unwrap();
        assert_eq!(d.pop_chunk(End::A, 2, false).unwrap().value, 0x5A);
        assert!(d.is_empty());
    }

    #[test]
    fn micro_trace_words() {
        // single-word pushes and pops at end B
        let mut d = WordDeque::from_words(2, [3]).unwrap();
        d.push_chunk(End::B, ChunkValue::word(0)).unwrap();
        assert_eq!(d.to_vec(), vec![3, 0]);

        let mut d = WordDeque::from_words(2, [3, 0]).unwrap();
        assert_eq!(d.pop_chunk(End::B, 1, false).unwrap().value, 0);
        assert_eq!(d.to_vec(), vec![3]);
    }

    #[test]
    fn padding_only_at_b() {
        let mut d = WordDeque::new(2).unwrap();
        assert_eq!(d.pop_chunk(End::B, 1, true).unwrap().value, 0);
        assert_eq!(d.pad_count(), 1);

        let mut d = WordDeque::from_words(4, [0x3]).unwrap();
        // one real word in the LSW slot, two zero words above it
        assert_eq!(d.pop_chunk(End::B, 3, true).unwrap().value, 0x3);
        assert_eq!(d.pad_count(), 2);

        let mut d = WordDeque::new(2).unwrap();
        assert!(matches!(
            d.pop_chunk(End::A, 1, true),
            Err(Error::Underflow { .. })
        ));
        assert!(matches!(
            d.pop_chunk(End::B, 1, false),
            Err(Error::Underflow { .. })
        ));
        assert_eq!(d.pad_count(), 0);
    }

    #[test]
    fn peek_and_count() {
        let d = WordDeque::from_words(4, [0x5, 0xA]).unwrap();
        assert_eq!(d.peek_word(0).unwrap(), 0x5);
        assert_eq!(d.word_count(), 2);
        assert!(d.peek_word(2).is_err());
        assert_eq!(WordDeque::new(4).unwrap().word_count(), 0);
    }

    #[test]
    fn rejects_oversized_values() {
        let mut d = WordDeque::new(4).unwrap();
        assert!(matches!(
            d.push_chunk(End::A, ChunkValue::new(0x100, 2)),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(d.push_chunk(End::A, ChunkValue::new(0, 17)).is_err());
        assert!(WordDeque::from_words(2, [4]).is_err());
        assert!(WordDeque::new(0).is_err());
        assert!(WordDeque::new(33).is_err());
    }

    #[test]
    fn full_width_chunk() {
        let mut d = WordDeque::new(16).unwrap();
        d.push_chunk(End::B, ChunkValue::new(u64::MAX, 4)).unwrap();
        assert_eq!(d.pop_chunk(End::B, 4, false).unwrap().value, u64::MAX);
    }

    #[test]
    fn cross_end_fifo() {
        let mut d = WordDeque::new(8).unwrap();
        for w in [0x11, 0x22, 0x33] {
            d.push_word(End::A, w).unwrap();
        }
        assert_eq!(d.pop_chunk(End::B, 2, false).unwrap().value, 0x1122);
        assert_eq!(d.to_vec(), vec![0x33]);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push(bool, u64, u32),
        Pop(bool, u32, bool),
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (any::<bool>(), any::<u64>(), 1u32..=4).prop_map(|(a, v, k)| Op::Push(a, v, k)),
            (any::<bool>(), 1u32..=4, any::<bool>()).prop_map(|(a, k, p)| Op::Pop(a, k, p)),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_restores_sequence(
            bits in 1u32..=16,
            prefix in proptest::collection::vec(any::<u32>(), 0..20),
            value in any::<u64>(),
            k in 1u32..=4,
            at_a in any::<bool>(),
        ) {
            let mask = (1u64 << bits) - 1;
            let mut d = WordDeque::from_words(bits, prefix.iter().map(|&w| (w as u64 & mask) as u32)).unwrap();
            let before = d.to_vec();
            let kb = k * bits;
            let v = if kb >= 64 { value } else { value & ((1u64 << kb) - 1) };
            let end = if at_a { End::A } else { End::B };
            d.push_chunk(end, ChunkValue::new(v, k)).unwrap();
            prop_assert_eq!(d.pop_chunk(end, k, false).unwrap().value, v);
            prop_assert_eq!(d.to_vec(), before);
        }

        #[test]
        fn conservation(ops in proptest::collection::vec(op(), 0..60)) {
            let bits = 5;
            let mut d = WordDeque::new(bits).unwrap();
            let (mut pushed, mut popped) = (0u64, 0u64);
            for op in ops {
                match op {
                    Op::Push(a, v, k) => {
                        let v = v & ((1u64 << (k * bits)) - 1);
                        d.push_chunk(if a { End::A } else { End::B }, ChunkValue::new(v, k)).unwrap();
                        pushed += k as u64;
                    }
                    Op::Pop(a, k, pad) => {
                        if d.pop_chunk(if a { End::A } else { End::B }, k, pad).is_ok() {
                            popped += k as u64;
                        }
                    }
                }
                // every word ever popped is either a pushed word or a pad
                prop_assert_eq!(d.word_count() as u64 + popped, pushed + d.pad_count());
                prop_assert!(d.iter().all(|w| w < (1 << bits)));
            }
        }
    }
}
