//! Command-line front end.
//!
//! ```text
//! coordtrie build WORDLIST [--alphabet bytes|file:PATH] [--capacity N] [--alpha F]
//! coordtrie query WORDLIST [same options] QUERY...
//! coordtrie bench --workload uniform|adversarial|wordlist [...]
//! ```
//!
//! Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 I/O or configuration error, 2 capacity too small.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::analyzer;
use crate::bench::{self, BenchConfig, BenchError, Workload};
use crate::edge_table::DEFAULT_LOAD_FACTOR;
use crate::string_set::{self, StringSet};

pub const SCHEMA_VERSION: u32 = 1;
const ADVERSARIAL_DEFAULT_CAPACITY: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "coordtrie", version, about = "Coordinate hash trie tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a set from a wordlist and print its statistics as JSON.
    Build(SetArgs),
    /// Build a set and test each query for membership.
    Query {
        #[command(flatten)]
        set: SetArgs,
        /// Words to look up.
        queries: Vec<String>,
    },
    /// Run a benchmark workload; prints one JSON object per trial.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct SetArgs {
    /// UTF-8 file, one word per line.
    wordlist: PathBuf,
    /// `bytes` or `file:PATH` (one symbol per line).
    #[arg(long, default_value = "bytes")]
    alphabet: AlphabetSpec,
    /// Node capacity; defaults to the wordlist's size in bytes plus one.
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_LOAD_FACTOR)]
    alpha: f64,
}

#[derive(Clone, Debug)]
enum AlphabetSpec {
    Bytes,
    File(PathBuf),
}

impl FromStr for AlphabetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bytes" => Ok(AlphabetSpec::Bytes),
            _ => s
                .strip_prefix("file:")
                .filter(|p| !p.is_empty())
                .map(|p| AlphabetSpec::File(p.into()))
                .ok_or_else(|| format!("expected `bytes` or `file:PATH`, got `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WorkloadKind {
    Uniform,
    Adversarial,
    Wordlist,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "uniform")]
    workload: WorkloadKind,
    #[arg(long, default_value_t = 1000)]
    strings: usize,
    #[arg(long, default_value_t = 8)]
    length: usize,
    #[arg(long, default_value_t = 26)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Node capacity; uniform and wordlist workloads default to an exact fit.
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_LOAD_FACTOR)]
    alpha: f64,
    /// Wordlist file for `--workload wordlist`.
    #[arg(long)]
    path: Option<PathBuf>,
}

/// Statistics of a built set, emitted by `build`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsDocument {
    pub schema_version: u32,
    pub n_max: usize,
    pub m: usize,
    pub alpha: f64,
    #[serde(rename = "H")]
    pub slot_count: usize,
    #[serde(rename = "G")]
    pub g: u64,
    pub node_count: usize,
    pub edge_count: usize,
    pub member_count: usize,
    pub max_occupancy: usize,
    pub theorem2_bound: u64,
    pub histogram: Vec<usize>,
    pub bytes_total: usize,
}

impl StatsDocument {
    pub fn of(set: &StringSet) -> Self {
        let trie = set.trie();
        let report = analyzer::report(trie.edges());
        Self {
            schema_version: SCHEMA_VERSION,
            n_max: trie.n_max(),
            m: trie.alphabet_size(),
            alpha: trie.edges().load_factor(),
            slot_count: report.slot_count,
            g: report.g,
            node_count: set.node_count(),
            edge_count: set.edge_count(),
            member_count: set.len(),
            max_occupancy: report.max_occupancy,
            theorem2_bound: report.theorem2_bound,
            histogram: report.histogram,
            bytes_total: trie.footprint().total(),
        }
    }

    /// Canonical JSON: sorted keys, no whitespace.
    pub fn to_json(&self) -> String {
        canonical_json(self)
    }
}

fn canonical_json<T: Serialize>(v: &T) -> String {
    // serde_json's Map is a BTreeMap without `preserve_order`, so keys come out sorted
    let value = serde_json::to_value(v).expect("plain data serializes");
    serde_json::to_string(&value).expect("plain data serializes")
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn capacity(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::CapacityExhausted { .. } => Failure::capacity(e.to_string()),
            other => Failure::config(other.to_string()),
        }
    }
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Build(args) => cmd_build(&args, out),
        Command::Query { set, queries } => cmd_query(&set, &queries, out),
        Command::Bench(args) => cmd_bench(&args, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "coordtrie: {}", f.message);
            f.code
        }
    }
}

fn build_set(args: &SetArgs) -> Result<StringSet, Failure> {
    let alphabet = match &args.alphabet {
        AlphabetSpec::Bytes => Alphabet::bytes(),
        AlphabetSpec::File(p) => Alphabet::from_file(p)
            .map_err(|e| Failure::config(format!("alphabet {}: {e}", p.display())))?,
    };
    let input_bytes = std::fs::metadata(&args.wordlist)
        .map_err(|e| Failure::config(format!("reading {}: {e}", args.wordlist.display())))?
        .len() as usize;
    let words = bench::load_wordlist(&args.wordlist)?;
    let capacity = args.capacity.unwrap_or(input_bytes + 1);
    let required = string_set::required_nodes(&alphabet, words.iter().map(String::as_str))
        .map_err(|e| Failure::config(format!("{}: {e}", args.wordlist.display())))?;
    if required > capacity {
        return Err(Failure::capacity(format!(
            "capacity {capacity} too small: the wordlist needs {required} nodes"
        )));
    }
    let mut set = StringSet::new(alphabet, capacity, args.alpha)
        .map_err(|e| Failure::config(e.to_string()))?;
    for w in &words {
        set.insert(w)
            .expect("capacity and symbols were checked up front");
    }
    Ok(set)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::config(format!("writing output: {e}")))
}

fn cmd_build(args: &SetArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let set = build_set(args)?;
    write_out(out, &format!("{}\n", StatsDocument::of(&set).to_json()))
}

fn cmd_query(args: &SetArgs, queries: &[String], out: &mut dyn Write) -> Result<(), Failure> {
    let set = build_set(args)?;
    let mut text = String::new();
    for q in queries {
        text.push_str(&format!("{q}\t{}\n", set.contains(q)));
    }
    write_out(out, &text)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (workload, n_max) = match args.workload {
        WorkloadKind::Uniform => (
            Workload::UniformRandom {
                strings: args.strings,
                length: args.length,
            },
            args.capacity,
        ),
        WorkloadKind::Adversarial => (
            Workload::Adversarial,
            Some(args.capacity.unwrap_or(ADVERSARIAL_DEFAULT_CAPACITY)),
        ),
        WorkloadKind::Wordlist => {
            let path = args
                .path
                .clone()
                .ok_or_else(|| Failure::config("--workload wordlist needs --path"))?;
            (Workload::Wordlist(path), args.capacity)
        }
    };
    let config = BenchConfig {
        workload,
        n_max,
        m: args.m,
        alpha: args.alpha,
        seed: args.seed,
        trials: args.trials,
    };
    let mut text = String::new();
    for r in bench::run_bench(&config)? {
        text.push_str(&r.to_json());
        text.push('\n');
    }
    write_out(out, &text)
}
