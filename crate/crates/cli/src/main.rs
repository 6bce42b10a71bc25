use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use atlab_core::bench::{self, BenchError};
use atlab_core::codecs::{self, Scheme};
use atlab_core::ensemble::{self, EnsembleError, SelectionConfig};
use atlab_core::grammar::{self, GrammarError};
use atlab_core::sat::{self, CanonicalEnumerator, SatError};
use atlab_core::{
    assembly_index_exact, assembly_index_split_branch, ExactLimits, IndexError, IndexResult, ObjectError, ObjectString,
};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

// Stdout writes ignore errors so a closed pipe (`atlab ... | head`) ends
// quietly instead of panicking.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(io::stdout(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        let _ = write!(io::stdout(), $($t)*);
    }};
}

#[derive(Debug, Parser)]
#[command(name = "atlab", version, about = "Assembly indices, assembly grammars and baseline codecs for strings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assembly index of a string with a minimal (or upper-bound) witness.
    Index {
        object: String,
        #[arg(long, conflicts_with = "split_branch")]
        exact: bool,
        #[arg(long)]
        split_branch: bool,
        #[arg(long)]
        json: bool,
        /// Longest object accepted by exact search.
        #[arg(long, default_value_t = atlab_core::index::DEFAULT_MAX_LEN)]
        max_len: usize,
        /// Exact-search timeout in seconds.
        #[arg(long, default_value_t = 60)]
        timeout: u64,
    },
    /// Straight-line grammar read off the exact witness.
    Grammar {
        object: String,
        /// Also write the witness as a Graphviz file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Run one baseline codec.
    Compress {
        #[arg(long, value_enum)]
        scheme: CodecArg,
        object: String,
    },
    /// Encode an object's minimal witness as an S_AT stream, or decode one.
    Sat {
        #[arg(value_enum)]
        mode: SatMode,
        /// Input file (object text for encode, SAT1 file for decode); stdin if absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assembly numbers of a catalog of ensembles, or their prefix code.
    Ensemble {
        #[arg(value_enum)]
        mode: EnsembleMode,
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Biased-selection ensemble simulation.
    Simulate {
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        bias: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Basis symbols to combine.
        #[arg(long, default_value = "01")]
        pool: String,
    },
    /// Per-object metrics over a corpus, with correlations.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long, default_value_t = atlab_core::index::DEFAULT_MAX_LEN)]
        max_len: usize,
    },
    /// Lower bound on the index of concatenated binary numerals against a
    /// short description of them.
    Diverge {
        #[arg(long)]
        n_max: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CodecArg {
    Lz77,
    Lz78,
    Lzw,
    Rle,
    Huffman,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SatMode {
    Encode,
    Decode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EnsembleMode {
    Stats,
    Code,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Guard(_) => 3,
            CliError::Input(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<ObjectError> for CliError {
    fn from(e: ObjectError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        CliError::Guard(e.to_string())
    }
}

impl From<SatError> for CliError {
    fn from(e: SatError) -> Self {
        match e {
            SatError::Guard { .. } | SatError::Budget { .. } | SatError::Index(_) => CliError::Guard(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GrammarError> for CliError {
    fn from(e: GrammarError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, CliError> {
    match path {
        Some(p) => read_file(p),
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).map_err(|source| CliError::Io { path: "stdin".into(), source })?;
            Ok(buf)
        }
    }
}

fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialise")
}

fn print_index(r: &IndexResult, json: bool) {
    let w = &r.witness;
    if json {
        let mut v = w.to_json_value();
        v["exact"] = r.exact.into();
        out!("{}", json_text(&v));
        return;
    }
    out!("object: {}", w.terminal_object());
    out!("index: {} ({})", r.index, if r.exact { "exact" } else { "split-branch upper bound" });
    out!("gamma_min: {}  gamma_max: {}", w.gamma_min.len(), w.gamma_max.len());
    for e in &w.space.edges {
        out!("  {} + {} -> {}", w.space.vertices[e.source], w.space.vertices[e.label], w.space.vertices[e.target]);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Index { object, exact: _, split_branch, json, max_len, timeout } => {
            let x: ObjectString = object.parse()?;
            let r = if split_branch {
                assembly_index_split_branch(&x)
            } else {
                let limits = ExactLimits { max_len, timeout: Duration::from_secs(timeout) };
                match assembly_index_exact(&x, limits) {
                    Ok(r) => r,
                    Err(IndexError::Timeout { best_upper_bound, witness }) => {
                        print_index(&IndexResult { index: best_upper_bound, exact: false, witness: *witness }, json);
                        return Err(CliError::Guard(format!(
                            "exact search timed out; best known upper bound is {best_upper_bound}"
                        )));
                    }
                    Err(e) => return Err(e.into()),
                }
            };
            print_index(&r, json);
        }
        Command::Grammar { object, dot } => {
            let x: ObjectString = object.parse()?;
            let w = assembly_index_exact(&x, ExactLimits::default())?.witness;
            let g = grammar::space_to_cfg(&w)?;
            out_raw!("{g}");
            let m = grammar::grammar_metrics(&w)?;
            out!(
                "# rules {} (pruned {}), basis {}, index {}, identity {}",
                m.raw_size,
                m.pruned_size,
                m.basis_size,
                m.index,
                if m.identity { "holds" } else { "FAILS" }
            );
            if let Some(path) = dot {
                write_file(&path, w.space.to_dot().as_bytes())?;
            }
        }
        Command::Compress { scheme, object } => {
            let x: ObjectString = object.parse()?;
            compress(scheme, &x);
        }
        Command::Sat { mode, input, out } => {
            let data = read_input(input.as_deref())?;
            let mut en = CanonicalEnumerator::default();
            match mode {
                SatMode::Encode => {
                    let text = String::from_utf8(data).map_err(|_| CliError::Input("input is not text".into()))?;
                    let x: ObjectString = text.trim().parse()?;
                    let w = assembly_index_exact(&x, ExactLimits::default())?.witness;
                    let code = sat::encode_sat(&w, &mut en)?;
                    let sw = sat::size_sandwich(&code, w.index);
                    eprintln!(
                        "t = {}, L = {}, tuples = {}, bits = {} (bounds {:.0} ..= {:.3e})",
                        code.t,
                        code.gamma_max_len,
                        code.tuples.len(),
                        code.bit_len,
                        sw.lower,
                        sw.upper_by_index
                    );
                    match out {
                        Some(p) => write_file(&p, &code.to_file_bytes())?,
                        None => out!("{}", code.to_hex()),
                    }
                }
                SatMode::Decode => {
                    let bytes = sat::read_sat_file(&data)?;
                    let y = sat::decode_sat(bytes, &mut en)?;
                    match out {
                        Some(p) => write_file(&p, format!("{y}\n").as_bytes())?,
                        None => out!("{y}"),
                    }
                }
            }
        }
        Command::Ensemble { mode, catalog } => {
            let text = String::from_utf8(read_file(&catalog)?).map_err(|_| CliError::Input("catalog is not UTF-8".into()))?;
            let cat = ensemble::catalog_from_json(&text)?;
            match mode {
                EnsembleMode::Stats => {
                    out!("object_set_hash,unique,total,assembly_number,normalized");
                    for e in &cat {
                        out!(
                            "{},{},{},{:.6},{:.6}",
                            e.object_set_hash(),
                            e.unique(),
                            e.total(),
                            ensemble::assembly_number(e),
                            ensemble::assembly_number_normalized(e, &cat)?
                        );
                    }
                }
                EnsembleMode::Code => {
                    let code = ensemble::ensemble_prefix_code(&cat, &ensemble::catalog_measure(&cat))?;
                    out_raw!("{}", ensemble::code_table_csv(&code));
                    eprintln!("kraft sum {:.6}, k0 {}", code.kraft_sum, ensemble::monotonicity_threshold(&code));
                }
            }
        }
        Command::Simulate { steps, bias, seed, pool } => {
            if !(bias >= 0.0 && bias.is_finite()) {
                return Err(CliError::Input("bias must be a non-negative number".into()));
            }
            if pool.is_empty() || !pool.is_ascii() {
                return Err(CliError::Input("pool must be non-empty ASCII".into()));
            }
            let mut symbols = pool.into_bytes();
            symbols.sort_unstable();
            symbols.dedup();
            let e = ensemble::simulate_selection(&SelectionConfig { pool: symbols, steps, bias, seed })?;
            let v = serde_json::json!({
                "steps": steps,
                "bias": bias,
                "seed": seed,
                "assembly_number": ensemble::assembly_number(&e),
                "items": e.items,
            });
            out!("{}", json_text(&v));
        }
        Command::Bench { corpus, out, plot, max_len } => {
            let text = String::from_utf8(read_file(&corpus)?).map_err(|_| CliError::Input("corpus is not UTF-8".into()))?;
            let lines = bench::parse_corpus(&text);
            let limits = ExactLimits { max_len: max_len.min(atlab_core::index::MAX_EXACT_LEN), ..Default::default() };
            let rows = bench::corpus_metrics(&lines, limits)?;
            write_file(&out, bench::rows_to_csv(&rows)?.as_bytes())?;
            let corr = bench::correlation(&rows).ok();
            match &corr {
                Some(c) => {
                    out!("column,pearson,spearman (against assembly_index, n = {})", c.n);
                    let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |r| format!("{r:.4}"));
                    for col in &c.columns[1..] {
                        out!(
                            "{col},{},{}",
                            fmt(c.pearson_of("assembly_index", col)),
                            fmt(c.spearman_of("assembly_index", col))
                        );
                    }
                }
                None => out!("fewer than 3 evaluated rows; no correlations"),
            }
            if let Some(p) = plot {
                write_file(&p, bench::scatter_svg(&rows, corr.as_ref()).as_bytes())?;
            }
        }
        Command::Diverge { n_max } => {
            if n_max < 4 {
                return Err(CliError::Input("--n-max must be at least 4".into()));
            }
            out!("n,length,lz77_factors,basis_size,index_lower_bound,description_bits");
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for r in bench::divergence_demo(n_max) {
                let _ = writeln!(
                    lock,
                    "{},{},{},{},{},{}",
                    r.n, r.length, r.lz77_factors, r.basis_size, r.index_lower_bound, r.description_bits
                );
            }
        }
    }
    Ok(())
}

fn compress(scheme: CodecArg, x: &ObjectString) {
    let lz = |s: Scheme| {
        let f = codecs::factorize(x, s);
        out!("scheme: {s}");
        out!("factors: {}", f.factor_count);
        out!("bits: {}", f.bit_length);
        out!("hex: {}", f.pack().to_hex());
    };
    match scheme {
        CodecArg::Lz77 => lz(Scheme::Lz77),
        CodecArg::Lz78 => lz(Scheme::Lz78),
        CodecArg::Lzw => lz(Scheme::Lzw),
        CodecArg::Rle => {
            let r = codecs::rle_encode(x);
            out!("scheme: rle");
            let runs: Vec<String> = r.runs.iter().map(|&(b, n)| format!("{}x{n}", b as char)).collect();
            out!("runs: {}", runs.join(" "));
            out!("bits: {}", r.summary.size_bits);
        }
        CodecArg::Huffman => {
            let h = codecs::huffman_length(x);
            out!("scheme: huffman");
            for (b, c) in &h.codes {
                out!("  {} {c}", *b as char);
            }
            out!("bits: {}", h.summary.size_bits);
            out!("entropy bits: {:.4}", codecs::empirical_entropy(x).size_bits);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("atlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
