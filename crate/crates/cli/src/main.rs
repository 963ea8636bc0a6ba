use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bemr::container::{from_bytes, to_bytes, VERSION};
use bemr::harness::{bench_corpus, render_csv, render_text, BenchConfig};
use bemr::synth::calgary_like_corpus;
use bemr::variant::direct_access;
use bemr::{compress, decompress, CodecConfig, CodedStream, CoderKind, CoderParams};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bemr",
    version,
    about = "rANS variant with direct symbol access"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file into a .bmrx container.
    Compress {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Coder::Variant)]
        coder: Coder,
    },
    /// Restore the original bytes, verifying the stream end state.
    Decompress { input: PathBuf, output: PathBuf },
    /// Print symbol `j` (1-based) straight from its payload digit.
    Access { input: PathBuf, j: u64 },
    /// Dump the container header.
    Inspect { input: PathBuf },
    /// Compare ratio and decode throughput of the three coders.
    Bench {
        /// Directory of corpus files.
        #[arg(required_unless_present = "synthetic")]
        dir: Option<PathBuf>,
        /// Use the built-in synthetic stand-in corpus instead of a directory.
        #[arg(long, conflicts_with = "dir")]
        synthetic: bool,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Emit CSV instead of an aligned table.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Digit width, also the table precision.
    #[arg(long, default_value_t = 16)]
    n: u32,
    /// Words per renormalization.
    #[arg(long, default_value_t = 3)]
    v: u32,
    /// State bound exponent.
    #[arg(long = "T", default_value_t = 48)]
    t: u32,
}

impl ParamArgs {
    fn params(&self) -> Result<CoderParams> {
        Ok(CoderParams::new(self.n, self.v, self.t)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Coder {
    Variant,
    Baseline,
    Interleaved2,
}

impl From<Coder> for CoderKind {
    fn from(c: Coder) -> Self {
        match c {
            Coder::Variant => CoderKind::Variant,
            Coder::Baseline => CoderKind::Baseline,
            Coder::Interleaved2 => CoderKind::Interleaved2,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<CodedStream> {
    let bytes = read(path)?;
    from_bytes(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_compress(input: &Path, output: &Path, params: CoderParams, coder: Coder) -> Result<()> {
    let data = read(input)?;
    let stream = compress(&data, &CodecConfig::with_params(coder.into(), params))?;
    let bytes = to_bytes(&stream)?;
    write(output, &bytes)?;
    let ratio = if data.is_empty() {
        "n/a (empty input)".to_string()
    } else {
        format!("{:.3}", data.len() as f64 / bytes.len() as f64)
    };
    let pads = match &stream {
        CodedStream::Variant(s) => s.pad_words,
        _ => 0,
    };
    println!(
        "{} -> {}: {} -> {} bytes, ratio {ratio}, pad_words {pads}",
        input.display(),
        output.display(),
        data.len(),
        bytes.len()
    );
    Ok(())
}

fn cmd_decompress(input: &Path, output: &Path) -> Result<()> {
    let stream = load(input)?;
    let data = decompress(&stream)?;
    write(output, &data)?;
    println!(
        "{} -> {}: {} bytes",
        input.display(),
        output.display(),
        data.len()
    );
    Ok(())
}

fn cmd_access(input: &Path, j: u64) -> Result<()> {
    let CodedStream::Variant(stream) = load(input)? else {
        bail!("direct access needs a variant stream");
    };
    let s = direct_access(&stream, j)?;
    println!("{s} {:?}", char::from(s));
    Ok(())
}

fn cmd_inspect(input: &Path) -> Result<()> {
    let stream = load(input)?;
    println!("format      BMRX v{VERSION}");
    println!("coder       {}", stream.kind().name());
    match &stream {
        CodedStream::Variant(s) => {
            let p = s.params;
            println!(
                "params      n={} v={} T={}",
                p.digit_bits(),
                p.refill_words(),
                p.state_bits()
            );
            println!("final_x     {}", s.final_state);
            println!("pad_words   {}", s.pad_words);
            println!("payload     {} words", s.payload.len());
        }
        CodedStream::Baseline(s) => {
            let p = s.params;
            println!(
                "params      n={} b={} L=2^{}",
                s.table.precision(),
                p.word_bits(),
                p.lower_bits()
            );
            println!("final_x     {}", s.final_state);
            println!("payload     {} words", s.words.len());
        }
        CodedStream::Interleaved2(s) => {
            let p = s.params;
            println!(
                "params      n={} b={} L=2^{}",
                s.table.precision(),
                p.word_bits(),
                p.lower_bits()
            );
            println!("final_x     {} {}", s.final_states[0], s.final_states[1]);
            println!("payload     {} words", s.words.len());
        }
    }
    println!("N           {}", stream.len());
    println!("alphabet    {}", stream.table().alphabet_size());
    println!("size        {} bytes", stream.serialized_len());
    Ok(())
}

fn corpus_dir(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("listing {}", dir.display()))?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            Ok((name, read(&p)?))
        })
        .collect()
}

fn cmd_bench(dir: Option<&Path>, reps: usize, csv: bool, params: CoderParams) -> Result<()> {
    let files = match dir {
        Some(dir) => corpus_dir(dir)?,
        None => calgary_like_corpus()
            .into_iter()
            .map(|f| (f.name.to_string(), f.data))
            .collect(),
    };
    let rows = bench_corpus(&files, &BenchConfig { params, reps })?;
    print!(
        "{}",
        if csv {
            render_csv(&rows)
        } else {
            render_text(&rows)
        }
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compress {
            input,
            output,
            params,
            coder,
        } => cmd_compress(&input, &output, params.params()?, coder),
        Command::Decompress { input, output } => cmd_decompress(&input, &output),
        Command::Access { input, j } => cmd_access(&input, j),
        Command::Inspect { input } => cmd_inspect(&input),
        Command::Bench {
            dir,
            synthetic: _,
            reps,
            csv,
            params,
        } => cmd_bench(dir.as_deref(), reps, csv, params.params()?),
    }
}

/// 2 for I/O failures, 3 for damaged streams, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<bemr::Error>() {
            return match e {
                bemr::Error::Io(_) => 2,
                e if e.is_integrity() => 3,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
