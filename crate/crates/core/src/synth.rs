//! Deterministic synthetic corpus with the flavour of the Calgary files:
//! English prose, troff-ish markup, news articles, a sparse bitmap, packed
//! numeric records and object code. Used by tests and benchmarks when no
//! real corpus is at hand.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Prose,
    Markup,
    News,
    Bitmap,
    Records,
    Object,
}

#[derive(Debug, Clone)]
pub struct SynthFile {
    pub name: &'static str,
    pub data: Vec<u8>,
}

/// The eight stand-ins, named and sized after the Calgary files they imitate.
pub const CALGARY_LIKE: [(&str, Flavor, usize); 8] = [
    ("book1", Flavor::Prose, 768_771),
    ("book2", Flavor::Markup, 610_856),
    ("paper1", Flavor::Markup, 53_161),
    ("paper2", Flavor::Prose, 82_199),
    ("news", Flavor::News, 377_109),
    ("pic", Flavor::Bitmap, 513_216),
    ("geo", Flavor::Records, 102_400),
    ("obj1", Flavor::Object, 21_504),
];

pub fn calgary_like_corpus() -> Vec<SynthFile> {
    CALGARY_LIKE
        .iter()
        .enumerate()
        .map(|(i, &(name, flavor, len))| SynthFile {
            name,
            data: generate(flavor, len, 0x5eed_0000 + i as u64),
        })
        .collect()
}

const WORDS: &[&str] = &[
    "the",
    "of",
    "and",
    "to",
    "a",
    "in",
    "that",
    "he",
    "was",
    "it",
    "his",
    "her",
    "with",
    "as",
    "had",
    "for",
    "she",
    "not",
    "at",
    "but",
    "by",
    "on",
    "be",
    "which",
    "you",
    "from",
    "him",
    "they",
    "all",
    "this",
    "were",
    "have",
    "said",
    "is",
    "there",
    "one",
    "so",
    "been",
    "what",
    "would",
    "or",
    "an",
    "no",
    "their",
    "when",
    "my",
    "if",
    "more",
    "them",
    "some",
    "could",
    "into",
    "then",
    "out",
    "very",
    "upon",
    "little",
    "now",
    "time",
    "about",
    "man",
    "like",
    "old",
    "before",
    "great",
    "over",
    "only",
    "any",
    "other",
    "see",
    "know",
    "down",
    "never",
    "came",
    "made",
    "well",
    "must",
    "again",
    "after",
    "should",
    "good",
    "through",
    "much",
    "long",
    "first",
    "thought",
    "himself",
    "way",
    "away",
    "eyes",
    "face",
    "night",
    "house",
    "hand",
    "still",
    "room",
    "without",
    "might",
    "while",
    "place",
    "heard",
    "water",
    "young",
    "against",
    "head",
    "life",
    "looked",
    "door",
    "nothing",
    "world",
    "under",
    "light",
    "voice",
    "morning",
    "because",
    "another",
    "mother",
    "country",
    "between",
    "something",
    "quite",
    "answered",
    "towards",
    "garden",
    "anything",
    "strange",
    "quickly",
    "village",
    "journey",
    "yesterday",
    "wizard",
    "program",
    "system",
    "function",
    "memory",
    "computer",
    "data",
    "result",
    "value",
    "section",
    "figure",
    "table",
    "method",
    "number",
    "each",
    "which",
    "following",
    "example",
    "compression",
    "model",
    "text",
    "order",
    "probability",
];

const MARKUP: &[&str] = &[
    ".PP", ".sp", ".LP", ".NH", ".ft B", ".ft R", ".EQ", ".EN", "\\fI", "\\fR", "\\(em", ".br",
];

const NEWS_HEADERS: &[&str] = &[
    "Path: ",
    "From: ",
    "Newsgroups: comp.",
    "Subject: Re: ",
    "Message-ID: <",
    "Date: ",
    "Organization: ",
    "Lines: ",
];

pub fn generate(flavor: Flavor, len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len + 64);
    match flavor {
        Flavor::Prose => prose(&mut rng, &mut out, len, 0),
        Flavor::Markup => prose(&mut rng, &mut out, len, 8),
        Flavor::News => news(&mut rng, &mut out, len),
        Flavor::Bitmap => bitmap(&mut rng, &mut out, len),
        Flavor::Records => records(&mut rng, &mut out, len),
        Flavor::Object => object(&mut rng, &mut out, len),
    }
    out.truncate(len);
    out
}

fn zipf(n: usize) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| 1.0 / (r as f64).powf(1.05))).expect("positive weights")
}

fn prose(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, len: usize, markup_every: u32) {
    let words = zipf(WORDS.len());
    let mut col = 0usize;
    let mut sentence_start = true;
    while out.len() < len {
        if markup_every > 0 && sentence_start && rng.gen_ratio(1, markup_every) {
            out.push(b'\n');
            out.extend_from_slice(MARKUP[rng.gen_range(0..MARKUP.len())].as_bytes());
            out.push(b'\n');
            col = 0;
        }
        let w = WORDS[words.sample(rng)].as_bytes();
        if sentence_start {
            out.push(w[0].to_ascii_uppercase());
            out.extend_from_slice(&w[1..]);
        } else {
            out.extend_from_slice(w);
        }
        col += w.len();
        sentence_start = false;
        match rng.gen_range(0..100) {
            0..=6 => {
                out.extend_from_slice(if rng.gen_bool(0.1) { b"?" } else { b"." });
                sentence_start = true;
            }
            7..=12 => out.push(b','),
            13 => out.push(b';'),
            14 if rng.gen_bool(0.3) => {
                out.extend_from_slice(format!(" {}", rng.gen_range(1..2000)).as_bytes())
            }
            _ => {}
        }
        if col > 60 + rng.gen_range(0..12) {
            out.push(b'\n');
            col = 0;
        } else {
            out.push(b' ');
            col += 1;
        }
    }
}

fn news(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, len: usize) {
    while out.len() < len {
        for h in NEWS_HEADERS {
            out.extend_from_slice(h.as_bytes());
            for _ in 0..rng.gen_range(6..30) {
                let c = match rng.gen_range(0..10) {
                    0 => b'.',
                    1 => b'@',
                    2..=3 => rng.gen_range(b'0'..=b'9'),
                    _ => rng.gen_range(b'a'..=b'z'),
                };
                out.push(c);
            }
            out.push(b'\n');
        }
        out.push(b'\n');
        let body = rng.gen_range(400..3000);
        let start = out.len();
        prose(rng, out, start + body, 0);
        out.extend_from_slice(b"\n> ");
        prose(rng, out, out.len() + body / 4, 0);
        out.extend_from_slice(b"\n-- \n");
    }
}

fn bitmap(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, len: usize) {
    // Mostly white scan lines with a few dark strokes.
    let row = 216;
    while out.len() < len {
        let mut line = vec![0u8; row];
        if rng.gen_ratio(1, 3) {
            for _ in 0..rng.gen_range(1..5) {
                let start = rng.gen_range(0..row);
                let run = rng.gen_range(1..12).min(row - start);
                for b in &mut line[start..start + run] {
                    *b = if rng.gen_ratio(4, 5) { 0xFF } else { rng.gen() };
                }
            }
        }
        out.extend_from_slice(&line);
    }
}

fn records(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, len: usize) {
    // Big-endian 32-bit samples of a slowly varying signal.
    let mut level = 0.0f64;
    while out.len() < len {
        level += rng.gen_range(-1.0..1.0);
        let sample = (level * 1000.0) as i32 + rng.gen_range(-300..300);
        let exp = if sample == 0 {
            0x40
        } else {
            0x41 + (sample.unsigned_abs().ilog2() / 4) as u8
        };
        out.push(if sample < 0 { exp | 0x80 } else { exp });
        out.extend_from_slice(&sample.unsigned_abs().to_be_bytes()[1..]);
    }
}

fn object(rng: &mut ChaCha8Rng, out: &mut Vec<u8>, len: usize) {
    let opcodes = zipf(256);
    while out.len() < len {
        match rng.gen_range(0..10) {
            0 => out.extend(std::iter::repeat_n(0, rng.gen_range(1..16))),
            1 => out.extend_from_slice(b"_main\0_printf\0"),
            _ => {
                out.push(opcodes.sample(rng) as u8);
                out.push(rng.gen());
            }
        }
    }
}

/// Uniformly random bytes, the incompressible case.
pub fn random_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen()).collect()
}
