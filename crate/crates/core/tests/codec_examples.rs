use bemr::baseline::{baseline_decode, baseline_encode, interleaved2_decode, interleaved2_encode};
use bemr::freq::ALPHABET;
use bemr::synth::{generate, Flavor};
use bemr::variant::{decode, decode_traced, direct_access, encode, encode_traced};
use bemr::{table_for, BaselineParams, CoderParams, FreqTable, TraceEvent};
use proptest::prelude::*;

fn baabc_table() -> FreqTable {
    let mut f = [0u32; ALPHABET];
    f[b'a' as usize] = 96;
    f[b'b' as usize] = 96;
    f[b'c' as usize] = 64;
    FreqTable::from_frequencies(f, 8).unwrap()
}

#[test]
fn baabc_round_trip_and_placement() {
    let table = baabc_table();
    let params = CoderParams::new(8, 2, 24).unwrap();
    let (stream, trace) = encode_traced(b"baabc", &table, params).unwrap();
    assert_eq!(decode(&stream).unwrap(), b"baabc");
    assert_eq!(stream.pad_words, 0);
    assert!(stream.final_state >= params.low() && stream.final_state < params.high());

    // digits are pushed at end A in the order S[5], .., S[1]
    let digits: Vec<u32> = trace
        .events
        .iter()
        .filter_map(|e| match e {
            TraceEvent::Digit(d) => Some(*d),
            _ => None,
        })
        .collect();
    let symbols: Vec<u8> = digits
        .iter()
        .map(|&d| table.symbol_at(u64::from(d)).unwrap().0)
        .collect();
    assert_eq!(symbols, b"cbaab");
    for (&d, &s) in digits.iter().zip(&symbols) {
        assert!(d >= table.cdf(s) && d < table.cdf(s) + table.freq(s));
    }
    // surviving words are the newest digits, newest first
    let l = stream.payload.len();
    let newest: Vec<u32> = digits.iter().rev().take(l).copied().collect();
    assert!(l > 0);
    assert_eq!(stream.payload, newest);
    for j in 1..=l as u64 {
        assert_eq!(direct_access(&stream, j).unwrap(), b"baabc"[j as usize - 1]);
    }
    let (_, dec) = decode_traced(&stream).unwrap();
    assert_eq!(dec, trace.reversed());
}

/// Straight evaluation of C(s, x) with a renormalizing flush, on u128.
fn eq3_oracle(msg: &[u8], table: &FreqTable, word_bits: u32, lower_bits: u32) -> (Vec<u32>, u64) {
    let n = table.precision();
    let m = 1u128 << n;
    let mut x = 1u128 << lower_bits;
    let mut emitted = Vec::new();
    for &s in msg.iter().rev() {
        let f = u128::from(table.freq(s));
        // keep the post-step state below 2^b·L
        while (m * (x / f) + u128::from(table.cdf(s)) + x % f) >> (lower_bits + word_bits) != 0 {
            emitted.push((x & ((1 << word_bits) - 1)) as u32);
            x >>= word_bits;
        }
        x = m * (x / f) + u128::from(table.cdf(s)) + x % f;
    }
    emitted.reverse();
    (emitted, x as u64)
}

#[test]
fn baseline_micro_ab() {
    let mut f = [0u32; ALPHABET];
    f[b'a' as usize] = 3;
    f[b'b' as usize] = 1;
    let table = FreqTable::from_frequencies(f, 2).unwrap();
    let params = BaselineParams::new(2, 2).unwrap();
    let stream = baseline_encode(b"ab", &table, params).unwrap();
    let (words, x) = eq3_oracle(b"ab", &table, 2, 2);
    assert_eq!(stream.words, words);
    assert_eq!(stream.final_state, x);
    assert_eq!(baseline_decode(&stream).unwrap(), b"ab");
}

#[test]
fn baseline_matches_eq3_on_text() {
    let data = generate(Flavor::News, 20_000, 3);
    for (precision, word_bits, lower_bits) in [(16, 16, 16), (12, 8, 16), (10, 4, 12)] {
        let table = FreqTable::from_data(&data, precision).unwrap();
        let params = BaselineParams::new(word_bits, lower_bits).unwrap();
        let stream = baseline_encode(&data, &table, params).unwrap();
        let (words, x) = eq3_oracle(&data, &table, word_bits, lower_bits);
        assert_eq!(stream.final_state, x);
        assert_eq!(stream.words, words);
    }
}

#[test]
fn interleaved_size_close_to_single_lane() {
    // L well above M; at L = M the rounding loss of x / f alone moves the
    // two layouts apart by far more than a state
    let data = generate(Flavor::Records, 1 << 20, 11);
    let table = FreqTable::from_data(&data, 16).unwrap();
    let params = BaselineParams::new(8, 24).unwrap();
    let one = baseline_encode(&data, &table, params).unwrap();
    let two = interleaved2_encode(&data, &table, params).unwrap();
    assert_eq!(interleaved2_decode(&two).unwrap(), data);
    let diff = two.words.len() as i64 - one.words.len() as i64;
    // one 4-byte state flush, doubled
    assert!(diff.abs() <= 2 * 4, "{diff}");
}

fn message() -> impl Strategy<Value = Vec<u8>> {
    (1usize..=40).prop_flat_map(|k| proptest::collection::vec(0u8..k as u8, 0..3000))
}

fn params() -> impl Strategy<Value = CoderParams> {
    (6u32..=24).prop_flat_map(|n| {
        (Just(n), 1u32..=((64 - n) / n)).prop_flat_map(move |(n, v)| {
            (v * n..=64 - n).prop_map(move |t| CoderParams::new(n, v, t).unwrap())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn variant_round_trips(msg in message(), p in params()) {
        let table = table_for(&msg, p.digit_bits()).unwrap();
        let stream = encode(&msg, &table, p).unwrap();
        prop_assert_eq!(decode(&stream).unwrap(), msg.clone());
        for w in &stream.payload {
            prop_assert!(*w < table.total());
        }
    }

    #[test]
    fn baseline_round_trips(msg in message(), n in 6u32..=16) {
        let table = table_for(&msg, n).unwrap();
        let params = BaselineParams::new(16, 16).unwrap();
        let one = baseline_encode(&msg, &table, params).unwrap();
        prop_assert_eq!(baseline_decode(&one).unwrap(), msg.clone());
        let two = interleaved2_encode(&msg, &table, params).unwrap();
        prop_assert_eq!(interleaved2_decode(&two).unwrap(), msg);
    }
}
