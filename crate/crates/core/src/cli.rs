//! Command-line front end. `run` does all the work against injected writers
//! so the binary stays a one-liner and tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::bench::{run_bench, write_csv};
use crate::isotope::{
    top_peaks, ExpandOptions, IsotopeTable, PeakOptions, DEFAULT_CONFIGURATION_CAP,
};
use crate::selection::Engine;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cartesian-topk",
    version,
    about = "Top-k values of Cartesian sums of vectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Largest k sums from a vectors file, one TSV row per value.
    Topk(TopkArgs),
    /// Most abundant isotope peaks of a molecular formula.
    Isotopes(IsotopesArgs),
    /// Time and count the engines on random m x m instances, writing CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Tree,
    Tensor,
    Oracle,
}

impl From<Method> for Engine {
    fn from(m: Method) -> Engine {
        match m {
            Method::Tree => Engine::Tree,
            Method::Tensor => Engine::Tensor,
            Method::Oracle => Engine::Oracle,
        }
    }
}

#[derive(Debug, Args)]
struct TopkArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "tree")]
    method: Method,
    /// Append a `# pushes=.. pops=.. peak_fringe=..` line.
    #[arg(long)]
    counters: bool,
}

#[derive(Debug, Args)]
struct IsotopesArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Isotope table TSV; the built-in table when omitted.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Rescale element abundances that do not sum to 1 instead of rejecting the table.
    #[arg(long)]
    renormalize: bool,
    /// Drop per-element compositions more than this many log units below the best one.
    #[arg(long)]
    prune_delta: Option<f64>,
    #[arg(long, value_enum, default_value = "tree")]
    method: Method,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    sizes: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "tree,tensor")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per (size, method); the fastest wall time is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Failures caused by the data handed to a command (exit code 3).
#[derive(Debug, Error)]
enum DataError {
    #[error("{0}")]
    Message(String),
}

fn data_err(e: impl std::fmt::Display) -> DataError {
    DataError::Message(e.to_string())
}

/// Parses a vectors file: one comma-separated vector per line, `#` comments
/// and blank lines ignored.
pub fn parse_vectors(text: &str) -> Result<Vec<Vec<f64>>, String> {
    let mut vectors = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                field
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        format!(
                            "line {}: value {} is not a finite number: {field:?}",
                            n + 1,
                            col + 1
                        )
                    })
            })
            .collect::<Result<Vec<f64>, String>>()?;
        vectors.push(values);
    }
    if vectors.is_empty() {
        return Err("no vectors in input".to_string());
    }
    Ok(vectors)
}

/// Formats like C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn cmd_topk(args: &TopkArgs, out: &mut String) -> Result<(), DataError> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| data_err(format!("{}: {e}", args.input.display())))?;
    let vectors = parse_vectors(&text).map_err(data_err)?;
    let result = Engine::from(args.method)
        .top_k(&vectors, args.k)
        .map_err(data_err)?;
    for (rank, item) in result.items.iter().enumerate() {
        let indices: Vec<String> = item.indices.iter().map(u32::to_string).collect();
        writeln!(out, "{}\t{}\t{}", rank + 1, item.value, indices.join(",")).unwrap();
    }
    if args.counters {
        let c = result.counters;
        writeln!(
            out,
            "# pushes={} pops={} peak_fringe={}",
            c.heap_pushes, c.heap_pops, c.peak_fringe_entries
        )
        .unwrap();
    }
    Ok(())
}

fn cmd_isotopes(args: &IsotopesArgs, out: &mut String) -> Result<(), DataError> {
    let table = match &args.data {
        Some(path) => IsotopeTable::from_path(path, args.renormalize).map_err(data_err)?,
        None => IsotopeTable::builtin(),
    };
    let options = PeakOptions {
        expand: ExpandOptions {
            prune_delta: args.prune_delta,
            cap: DEFAULT_CONFIGURATION_CAP,
        },
        engine: args.method.into(),
    };
    let k = usize::try_from(args.k).unwrap_or(usize::MAX);
    let peaks = top_peaks(&args.formula, k, &table, options).map_err(data_err)?;
    for (rank, peak) in peaks.iter().enumerate() {
        let config: Vec<String> = peak
            .configuration
            .iter()
            .map(|(symbol, counts)| {
                let counts: Vec<String> = counts.iter().map(u32::to_string).collect();
                format!("{symbol}[{}]", counts.join(","))
            })
            .collect();
        writeln!(
            out,
            "{}\t{:.6}\t{}\t{}",
            rank + 1,
            peak.mass,
            format_significant(peak.abundance, 12),
            config.join(";")
        )
        .unwrap();
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), DataError> {
    if args.sizes.contains(&0) {
        return Err(data_err("sizes must be at least 1"));
    }
    let methods: Vec<Engine> = args.methods.iter().map(|&m| m.into()).collect();
    let rows = run_bench(&args.sizes, &methods, args.seed, args.repeats).map_err(data_err)?;
    let file =
        File::create(&args.out).map_err(|e| data_err(format!("{}: {e}", args.out.display())))?;
    let mut writer = BufWriter::new(file);
    write_csv(&mut writer, &rows)
        .and_then(|_| writer.flush())
        .map_err(|e| data_err(format!("{}: {e}", args.out.display())))
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };

    let mut out = String::new();
    let outcome = match &cli.command {
        Command::Topk(args) => cmd_topk(args, &mut out),
        Command::Isotopes(args) => cmd_isotopes(args, &mut out),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(()) => {
            let _ = stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_DATA
        }
    }
}
