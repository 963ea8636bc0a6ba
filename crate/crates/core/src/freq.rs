//! Static byte frequency tables with a power-of-two total.

use crate::error::{Error, Result};

pub const ALPHABET: usize = 256;

/// Largest supported table precision.
pub const MAX_PRECISION: u32 = 24;

/// Precision up to which [`FreqTable::quantize`] builds a dense slot table.
pub const DENSE_LOOKUP_MAX_PRECISION: u32 = 16;

pub fn count_frequencies(data: &[u8]) -> [u64; ALPHABET] {
    let mut counts = [0u64; ALPHABET];
    for &b in data {
        counts[b as usize] += 1;
    }
    counts
}

/// How a slot is resolved to its symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
enum SlotLookup {
    /// One entry per slot.
    Dense(Vec<u8>),
    /// Binary search over the cumulative table of present symbols.
    Search { starts: Vec<u32>, symbols: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqTable {
    precision: u32,
    freq: [u32; ALPHABET],
    cdf: [u32; ALPHABET],
    lookup: SlotLookup,
}

impl FreqTable {
    /// Builds a table from quantized frequencies that must sum to `2^precision`.
    pub fn from_frequencies(freq: [u32; ALPHABET], precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let total = 1u64 << precision;
        let sum: u64 = freq.iter().map(|&f| u64::from(f)).sum();
        if sum != total {
            return Err(Error::TableSum {
                sum,
                expected: total,
            });
        }
        let mut cdf = [0u32; ALPHABET];
        let mut acc = 0u32;
        for s in 0..ALPHABET {
            cdf[s] = acc;
            acc += freq[s];
        }
        let lookup = if precision <= DENSE_LOOKUP_MAX_PRECISION {
            dense_lookup(&freq, total as usize)
        } else {
            search_lookup(&freq, &cdf)
        };
        Ok(Self {
            precision,
            freq,
            cdf,
            lookup,
        })
    }

    /// Scales raw counts to a total of `2^precision`.
    ///
    /// Each present symbol starts at `max(1, round(count·M/total))`; the
    /// residual is then settled one unit at a time on the symbol whose
    /// quantized value is furthest below (or above) its exact share, lowest
    /// symbol first on ties, never letting a present symbol drop below 1.
    pub fn quantize(counts: &[u64; ALPHABET], precision: u32) -> Result<Self> {
        check_precision(precision)?;
        let total: u128 = counts.iter().map(|&c| u128::from(c)).sum();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        let present = counts.iter().filter(|&&c| c > 0).count();
        let m = 1u128 << precision;
        if present as u128 > m {
            return Err(Error::TooManySymbols {
                symbols: present,
                precision,
            });
        }

        let mut freq = [0u32; ALPHABET];
        for (f, &c) in freq.iter_mut().zip(counts) {
            if c > 0 {
                let c = u128::from(c);
                *f = ((2 * c * m + total) / (2 * total)).max(1) as u32;
            }
        }
        // (exact share - f) scaled by `total`
        let shortfall = |s: usize, f: u32| -> i128 {
            (u128::from(counts[s]) * m) as i128 - i128::from(f) * total as i128
        };
        let mut sum: u128 = freq.iter().map(|&f| u128::from(f)).sum();
        while sum != m {
            if sum < m {
                let s = (0..ALPHABET)
                    .filter(|&s| counts[s] > 0)
                    .max_by(|&a, &b| {
                        shortfall(a, freq[a])
                            .cmp(&shortfall(b, freq[b]))
                            .then(b.cmp(&a))
                    })
                    .expect("at least one present symbol");
                freq[s] += 1;
                sum += 1;
            } else {
                let s = (0..ALPHABET)
                    .filter(|&s| freq[s] > 1)
                    .min_by(|&a, &b| {
                        shortfall(a, freq[a])
                            .cmp(&shortfall(b, freq[b]))
                            .then(a.cmp(&b))
                    })
                    .expect("sum above M implies a symbol above 1");
                freq[s] -= 1;
                sum -= 1;
            }
        }
        Self::from_frequencies(freq, precision)
    }

    /// Counts `data` and quantizes in one go.
    pub fn from_data(data: &[u8], precision: u32) -> Result<Self> {
        Self::quantize(&count_frequencies(data), precision)
    }

    /// Switches slot resolution to binary search, trading speed for memory.
    pub fn with_search_lookup(mut self) -> Self {
        self.lookup = search_lookup(&self.freq, &self.cdf);
        self
    }

    #[inline]
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `M = 2^precision`.
    #[inline]
    pub fn total(&self) -> u32 {
        1 << self.precision
    }

    #[inline]
    pub fn freq(&self, symbol: u8) -> u32 {
        self.freq[symbol as usize]
    }

    #[inline]
    pub fn cdf(&self, symbol: u8) -> u32 {
        self.cdf[symbol as usize]
    }

    pub fn frequencies(&self) -> &[u32; ALPHABET] {
        &self.freq
    }

    /// Present symbols in ascending order.
    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&s| self.freq[s as usize] > 0)
    }

    pub fn alphabet_size(&self) -> usize {
        self.freq.iter().filter(|&&f| f > 0).count()
    }

    pub fn uses_dense_lookup(&self) -> bool {
        matches!(self.lookup, SlotLookup::Dense(_))
    }

    /// Symbol whose slot range `[cdf_s, cdf_s + f_s)` holds `slot`, with its
    /// cumulative count and frequency.
    pub fn symbol_at(&self, slot: u64) -> Result<(u8, u32, u32)> {
        if slot >= u64::from(self.total()) {
            return Err(Error::SlotOutOfRange {
                slot,
                total: u64::from(self.total()),
            });
        }
        let s = self.symbol_of(slot as u32);
        Ok((s, self.cdf(s), self.freq(s)))
    }

    /// Unchecked variant of [`symbol_at`](Self::symbol_at) for hot loops;
    /// `slot` must be below `M`.
    #[inline(always)]
    pub fn symbol_of(&self, slot: u32) -> u8 {
        match &self.lookup {
            SlotLookup::Dense(table) => table[slot as usize],
            SlotLookup::Search { starts, symbols } => {
                let i = starts.partition_point(|&c| c <= slot) - 1;
                symbols[i]
            }
        }
    }

    /// Dense slot table, if this table uses one.
    #[inline]
    pub(crate) fn dense_slots(&self) -> Option<&[u8]> {
        match &self.lookup {
            SlotLookup::Dense(t) => Some(t),
            SlotLookup::Search { .. } => None,
        }
    }

    /// Ideal coded size in bits under this table for the given counts.
    pub fn cross_entropy_bits(&self, counts: &[u64; ALPHABET]) -> f64 {
        let m = f64::from(self.total());
        counts
            .iter()
            .zip(&self.freq)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &f)| c as f64 * (m / f64::from(f)).log2())
            .sum()
    }
}

fn check_precision(precision: u32) -> Result<()> {
    if precision == 0 || precision > MAX_PRECISION {
        return Err(Error::InvalidParams(format!(
            "table precision {precision} outside 1..={MAX_PRECISION}"
        )));
    }
    Ok(())
}

fn dense_lookup(freq: &[u32; ALPHABET], total: usize) -> SlotLookup {
    let mut table = Vec::with_capacity(total);
    for (s, &f) in freq.iter().enumerate() {
        table.extend(std::iter::repeat_n(s as u8, f as usize));
    }
    SlotLookup::Dense(table)
}

fn search_lookup(freq: &[u32; ALPHABET], cdf: &[u32; ALPHABET]) -> SlotLookup {
    let (starts, symbols) = (0..ALPHABET)
        .filter(|&s| freq[s] > 0)
        .map(|s| (cdf[s], s as u8))
        .unzip();
    SlotLookup::Search { starts, symbols }
}
