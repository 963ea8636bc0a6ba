//! Ratio and decode-throughput comparison of the three coders.

use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::container::{CodedStream, CoderKind};
use crate::error::{Error, Result};
use crate::variant::CoderParams;
use crate::{compress, decompress, CodecConfig};

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub params: CoderParams,
    /// Timed decodes per coder; the fastest is reported.
    pub reps: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            params: CoderParams::default(),
            reps: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub file: String,
    pub alphabet: usize,
    pub len: u64,
    /// Input size over container size (header and table included).
    pub ratio_base: f64,
    pub ratio_ours: f64,
    /// Input size over payload plus the 8-byte final state.
    pub stream_ratio_base: f64,
    pub stream_ratio_ours: f64,
    pub mbps_base: f64,
    pub mbps_ours: f64,
    pub mbps_interleaved: f64,
    pub pad_words: u32,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.mbps_ours / self.mbps_base
    }
}

/// Size in bytes over compressed size; zero for an empty input.
pub fn ratio(len: u64, compressed: u64) -> f64 {
    if len == 0 {
        0.0
    } else {
        len as f64 / compressed as f64
    }
}

pub fn stream_ratio(stream: &CodedStream) -> f64 {
    ratio(stream.len(), stream.payload_bytes() + 8)
}

/// Fastest of `reps` runs of `f`.
pub fn best_of<T, F: FnMut() -> T>(reps: usize, mut f: F) -> Duration {
    (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            black_box(f());
            start.elapsed()
        })
        .min()
        .expect("at least one repetition")
}

pub fn throughput_mbps(len: u64, elapsed: Duration) -> f64 {
    len as f64 / 1e6 / elapsed.as_secs_f64().max(1e-9)
}

fn timed_decode(stream: &CodedStream, data: &[u8], reps: usize) -> Result<f64> {
    if decompress(stream)? != data {
        return Err(Error::Io(format!(
            "{} round trip mismatch",
            stream.kind().name()
        )));
    }
    let elapsed = best_of(reps, || decompress(stream));
    Ok(throughput_mbps(data.len() as u64, elapsed))
}

pub fn bench_file(name: &str, data: &[u8], config: &BenchConfig) -> Result<BenchRow> {
    let ours = compress(
        data,
        &CodecConfig::with_params(CoderKind::Variant, config.params),
    )?;
    let base = compress(
        data,
        &CodecConfig::with_params(CoderKind::Baseline, config.params),
    )?;
    let inter = compress(
        data,
        &CodecConfig::with_params(CoderKind::Interleaved2, config.params),
    )?;
    let pad_words = match &ours {
        CodedStream::Variant(s) => s.pad_words,
        _ => unreachable!("variant config yields a variant stream"),
    };
    let len = data.len() as u64;
    Ok(BenchRow {
        file: name.to_string(),
        alphabet: ours.table().alphabet_size(),
        len,
        ratio_base: ratio(len, base.serialized_len()),
        ratio_ours: ratio(len, ours.serialized_len()),
        stream_ratio_base: stream_ratio(&base),
        stream_ratio_ours: stream_ratio(&ours),
        mbps_base: timed_decode(&base, data, config.reps)?,
        mbps_ours: timed_decode(&ours, data, config.reps)?,
        mbps_interleaved: timed_decode(&inter, data, config.reps)?,
        pad_words,
    })
}

pub fn bench_corpus<S: AsRef<str>, D: AsRef<[u8]>>(
    files: &[(S, D)],
    config: &BenchConfig,
) -> Result<Vec<BenchRow>> {
    if files.is_empty() {
        return Err(Error::InvalidParams("empty corpus".into()));
    }
    files
        .iter()
        .map(|(name, data)| bench_file(name.as_ref(), data.as_ref(), config))
        .collect()
}

const COLUMNS: [&str; 13] = [
    "file",
    "alphabet",
    "N",
    "ratio_base",
    "ratio_ours",
    "stream_ratio_base",
    "stream_ratio_ours",
    "mbps_base",
    "mbps_ours",
    "mbps_interleaved2",
    "speedup",
    "pad_words",
    "",
];

fn fields(r: &BenchRow) -> [String; 12] {
    [
        r.file.clone(),
        r.alphabet.to_string(),
        r.len.to_string(),
        format!("{:.3}", r.ratio_base),
        format!("{:.3}", r.ratio_ours),
        format!("{:.3}", r.stream_ratio_base),
        format!("{:.3}", r.stream_ratio_ours),
        format!("{:.1}", r.mbps_base),
        format!("{:.1}", r.mbps_ours),
        format!("{:.1}", r.mbps_interleaved),
        format!("{:.2}", r.speedup()),
        r.pad_words.to_string(),
    ]
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&COLUMNS[..12]).expect("in-memory write");
    for r in rows {
        w.write_record(fields(r)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
}

pub fn render_text(rows: &[BenchRow]) -> String {
    let header: Vec<String> = COLUMNS[..12].iter().map(|s| s.to_string()).collect();
    let body: Vec<[String; 12]> = rows.iter().map(fields).collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in &body {
        for (w, f) in widths.iter_mut().zip(row) {
            *w = (*w).max(f.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(&header);
    out.push('\n');
    for row in &body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
