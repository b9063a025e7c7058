//! `po2`: factorize matrices into sparse power-of-two factors, apply and
//! inspect PO2F files, and regenerate the benchmark and theory tables.

mod matrix_text;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_po2::bench::{
    emit_csv, emit_fig1, read_csv, run_table1, run_table2, run_table3, BenchmarkResult,
    BenchmarkSpec,
};
use sparse_po2::engine::{deserialize, serialize, Encoding};
use sparse_po2::reference;
use sparse_po2::theory::{fig1_markers, SnrRow, TheoryReport};
use sparse_po2::{apply_factorization, factorize, snr_db, FactorConfig, QuantizerConfig, Rate};

use matrix_text::{format_matrix, parse_matrix, parse_vector};

#[derive(Parser, Debug)]
#[command(
    name = "po2",
    version,
    about = "Sparse power-of-two matrix factorization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factorize a text matrix (`N K` header, N ≤ K) into a PO2F file
    Factorize(FactorizeArgs),
    /// Multiply a vector read from stdin by a stored factorization
    Apply {
        /// PO2F file
        fact: PathBuf,
    },
    /// SNR (dB) of a stored factorization against its source matrix
    Snr {
        /// Text matrix
        matrix: PathBuf,
        /// PO2F file
        fact: PathBuf,
    },
    /// Monte Carlo SNR tables as CSV on stdout
    Bench(BenchArgs),
    /// Analytic predictions as CSV on stdout
    Theory {
        #[command(subcommand)]
        command: TheoryCommand,
    },
    /// Check that a PO2F file decodes and re-encodes to the same bytes
    Roundtrip {
        /// PO2F file
        fact: PathBuf,
    },
    /// Print an iid standard Gaussian N×K text matrix
    Gen {
        n: usize,
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct QuantizerArgs {
    /// Smallest exponent a nonzero entry may take
    #[arg(long, default_value_t = -126, allow_hyphen_values = true)]
    e_min: i32,
    /// Largest exponent an entry may take
    #[arg(long, default_value_t = 127, allow_hyphen_values = true)]
    e_max: i32,
}

impl QuantizerArgs {
    fn config(&self) -> Result<QuantizerConfig> {
        Ok(QuantizerConfig::new(self.e_min, self.e_max)?)
    }
}

#[derive(Args, Debug)]
struct FactorizeArgs {
    /// Text matrix
    input: PathBuf,
    /// Number of factors
    #[arg(long)]
    q: usize,
    /// Sparsification rate, e.g. 1, 1/2
    #[arg(long, default_value = "1")]
    r: Rate,
    /// Output PO2F file
    #[arg(long)]
    out: PathBuf,
    /// Write the text encoding instead of binary
    #[arg(long)]
    text: bool,
    /// Nonzeros per column of the later factors (default round(R·N))
    #[arg(long)]
    budget: Option<usize>,
    /// Stored in the file for provenance
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    quantizer: QuantizerArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Table {
    Table1,
    Table2,
    Table3,
}

#[derive(Args, Debug)]
struct BenchArgs {
    table: Table,
    /// Minimum trials per cell
    #[arg(long)]
    trials: Option<usize>,
    /// Minimum matrix entries aggregated per cell
    #[arg(long)]
    min_entries: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Matrix sizes for table1, e.g. 2x4,3x8
    #[arg(long, value_delimiter = ',', value_parser = parse_size)]
    sizes: Option<Vec<(usize, usize)>>,
    /// Column counts K for table2 and table3
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<usize>>,
    /// Sparsification rates for table2 and table3, e.g. 1,1/2,1/3
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<Rate>>,
    /// Additions budgets for table3, e.g. 1/2,1,2
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<Rate>>,
    /// Largest number of factors for table1 and table2
    #[arg(long)]
    q_max: Option<usize>,
    #[command(flatten)]
    quantizer: QuantizerArgs,
}

#[derive(Subcommand, Debug)]
enum TheoryCommand {
    /// Information curve and measured markers (kind,aspect_ratio,bits)
    Fig1 {
        /// CSV from `po2 bench table1`; the tabulated reference values otherwise
        #[arg(long)]
        table1: Option<PathBuf>,
    },
    /// Predicted behaviour of a K-column block
    Predict {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "1")]
        r: Rate,
        #[command(flatten)]
        quantizer: QuantizerArgs,
    },
}

fn parse_size(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, k) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size {s:?} is not of the form NxK"))?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| format!("bad row count in {s:?}"))?;
    let k = k
        .trim()
        .parse()
        .map_err(|_| format!("bad column count in {s:?}"))?;
    Ok((n, k))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_fact(path: &Path) -> Result<(Vec<u8>, sparse_po2::Factorization)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let fact = deserialize(&bytes).with_context(|| format!("{}", path.display()))?;
    Ok((bytes, fact))
}

fn run_factorize(args: FactorizeArgs) -> Result<()> {
    let m = parse_matrix(&read_text(&args.input)?)
        .with_context(|| format!("{}", args.input.display()))?;
    let cfg = FactorConfig {
        factors: args.q,
        rate: args.r,
        column_budget: args.budget,
        quantizer: args.quantizer.config()?,
        seed: args.seed,
    };
    let fact = factorize(&m, &cfg)?;
    let encoding = if args.text {
        Encoding::Text
    } else {
        Encoding::Binary
    };
    fs::write(&args.out, serialize(&fact, encoding)?)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    let snr = snr_db(&m, &fact.reconstruct())?;
    let ledger = sparse_po2::engine::factorization_ledger(&fact);
    eprintln!(
        "{}x{}, Q = {}, R = {}: SNR {snr:.2} dB, {:.3} additions per entry",
        m.rows(),
        m.cols(),
        args.q,
        args.r,
        ledger.per_entry()
    );
    Ok(())
}

fn run_apply(path: &Path) -> Result<()> {
    let (_, fact) = read_fact(path)?;
    let mut input = String::new();
    io::stdin()
        .read_to_string(&mut input)
        .context("cannot read stdin")?;
    let x = parse_vector(&input)?;
    let (y, ledger) = apply_factorization(&fact, &x)?;
    let mut out = io::stdout().lock();
    for v in y {
        writeln!(out, "{v}")?;
    }
    eprintln!("additions {} shifts {}", ledger.additions, ledger.shifts);
    Ok(())
}

fn run_snr(matrix: &Path, fact: &Path) -> Result<()> {
    let m = parse_matrix(&read_text(matrix)?).with_context(|| format!("{}", matrix.display()))?;
    let (_, fact) = read_fact(fact)?;
    println!("{}", snr_db(&m, &fact.reconstruct())?);
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let mut spec = match args.table {
        Table::Table1 => BenchmarkSpec::table1(),
        Table::Table2 => BenchmarkSpec::table2(),
        Table::Table3 => BenchmarkSpec::table3(),
    };
    spec.seed = args.seed;
    spec.quantizer = args.quantizer.config()?;
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(e) = args.min_entries {
        spec.min_entries = e;
    }
    if let Some(s) = args.sizes {
        spec.sizes = s;
    }
    if let Some(c) = args.columns {
        spec.columns = c;
    }
    if let Some(r) = args.rates {
        spec.rates = r;
    }
    if let Some(b) = args.budgets {
        spec.budgets = b;
    }
    if let Some(q) = args.q_max {
        spec.q_max = q;
    }
    let result = match args.table {
        Table::Table1 => run_table1(&spec)?,
        Table::Table2 => run_table2(&spec)?,
        Table::Table3 => run_table3(&spec)?,
    };
    for note in &result.notes {
        eprintln!("note: {note}");
    }
    emit_csv(&result, io::stdout().lock())?;
    Ok(())
}

fn run_theory(command: TheoryCommand) -> Result<()> {
    match command {
        TheoryCommand::Fig1 { table1 } => {
            let rows = match table1 {
                Some(path) => {
                    let file = fs::File::open(&path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    BenchmarkResult {
                        cells: read_csv(file)?,
                        notes: Vec::new(),
                    }
                    .snr_rows()
                }
                None => reference::TABLE1
                    .iter()
                    .map(|(n, k, snr)| SnrRow {
                        n: *n,
                        k: *k,
                        snr_db: snr.to_vec(),
                    })
                    .collect(),
            };
            emit_fig1(&fig1_markers(&rows)?, io::stdout().lock())?;
        }
        TheoryCommand::Predict { k, q, r, quantizer } => {
            let t = TheoryReport::evaluate(k, q, r, &quantizer.config()?)?;
            let mut out = io::stdout().lock();
            writeln!(
                out,
                "K,Q,R,N,info_bits,cos2_alpha,sin2_alpha,gamma,predicted_snr_db,conjectured_snr_db,collision_bound"
            )?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                t.k,
                t.q,
                t.rate,
                t.n,
                t.info_bits,
                t.cos2_alpha,
                t.sin2_alpha,
                t.gamma,
                t.predicted_snr_db,
                t.conjectured_snr_db,
                t.collision_bound
            )?;
        }
    }
    Ok(())
}

fn run_roundtrip(path: &Path) -> Result<()> {
    let (bytes, fact) = read_fact(path)?;
    let encoding = Encoding::detect(&bytes).context("unrecognized PO2F preamble")?;
    if serialize(&fact, encoding)? != bytes {
        bail!(
            "{}: re-encoding does not reproduce the file",
            path.display()
        );
    }
    let other = match encoding {
        Encoding::Binary => Encoding::Text,
        Encoding::Text => Encoding::Binary,
    };
    if deserialize(&serialize(&fact, other)?)? != fact {
        bail!("{}: {other:?} encoding does not roundtrip", path.display());
    }
    let nnz: usize = fact.factors().iter().map(|f| f.nnz()).sum();
    println!(
        "ok: {encoding:?}, {}x{}, {} factors, {nnz} nonzeros",
        fact.rows(),
        fact.cols(),
        fact.factors().len()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Factorize(args) => run_factorize(args),
        Command::Apply { fact } => run_apply(&fact),
        Command::Snr { matrix, fact } => run_snr(&matrix, &fact),
        Command::Bench(args) => run_bench(args),
        Command::Theory { command } => run_theory(command),
        Command::Roundtrip { fact } => run_roundtrip(&fact),
        Command::Gen { n, k, seed } => {
            if n == 0 || k == 0 {
                bail!("matrix dimensions must be positive, got {n}x{k}");
            }
            let m = sparse_po2::bench::gen_gaussian(n, k, seed);
            io::stdout()
                .lock()
                .write_all(format_matrix(&m).as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("po2: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
