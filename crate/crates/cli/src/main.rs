//! Command line front end: bucket counts, bounds, censuses, brute-force
//! checks, sequence scanning and regression fits, emitted as CSV or JSON
//! lines.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use mincount::alphabet::Alphabet;
use mincount::picount::{
    self, log_base, normalized_point, pi_bounds, pi_exact, regress_slope, PartitionMode, PiResult,
};
use mincount::preprocess::build_tables;
use mincount::scan::{self, EmpiricalPartition, ScanConfig};
use mincount::{oracle, Error, Word};

#[derive(Debug, Parser)]
#[command(name = "mincount", version, about = "Count k-mers per lexicographic minimizer")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Alphabet symbols in increasing order.
    #[arg(long, global = true, default_value = "ACGT")]
    alphabet: String,

    /// Complement pairs (e.g. "AT,CG"); "none" disables reverse-complement
    /// operations.
    #[arg(long, global = true, default_value = "AT,CG")]
    complement: String,

    /// Worker threads (default: MINCOUNT_THREADS env var, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Bounds,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(name = "json-lines")]
    JsonLines,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact bucket count and bounds for one minimizer: "exact lower upper".
    Count {
        #[arg(short = 'w', long)]
        word: String,
        #[arg(short)]
        k: usize,
    },
    /// Bounds only, skipping the exact dynamic program: "lower upper".
    Bounds {
        #[arg(short = 'w', long)]
        word: String,
        #[arg(short)]
        k: usize,
    },
    /// Census over every minimizer of length m, in lexicographic order.
    Table {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Override the enumeration budget guard.
        #[arg(long)]
        force: bool,
    },
    /// Dump the preprocessing tables of one minimizer.
    Inspect {
        #[arg(short = 'w', long)]
        word: String,
    },
    /// Brute-force partition by enumerating all k-mers.
    Oracle {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        k: usize,
        /// Only count k-mers not exceeding their reverse complement.
        #[arg(long)]
        canonical: bool,
        /// Override the enumeration budget guard.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Bucket the k-mers of FASTA/FASTQ files by their minimizer.
    Scan {
        #[arg(short)]
        k: usize,
        #[arg(short)]
        m: usize,
        /// Input files; .gz files decompress transparently.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Count distinct k-mers instead of occurrences.
        #[arg(long)]
        distinct: bool,
    },
    /// Join a saved scan census with theoretical bucket counts.
    Compare {
        /// Census produced by `mincount scan`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Fit log bucket size against k over a range of k.
    Regress {
        #[arg(short = 'w', long)]
        word: String,
        #[arg(long)]
        k_from: usize,
        #[arg(long)]
        k_to: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = cli.global.threads.or_else(|| {
        std::env::var("MINCOUNT_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: failed to size the thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidInput(_) | Error::Unsupported(_) => 1,
                Error::Parse(_) | Error::Io(_) => 2,
                Error::BudgetExceeded(_) => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let alphabet = build_alphabet(&cli.global)?;
    match cli.command {
        Command::Count { word, k } => {
            let w = Word::parse(&alphabet, &word)?;
            let exact = pi_exact(&w, k)?;
            let (lower, upper) = pi_bounds(&w, k)?;
            println!("{exact} {lower} {upper}");
            Ok(())
        }
        Command::Bounds { word, k } => {
            let w = Word::parse(&alphabet, &word)?;
            let (lower, upper) = pi_bounds(&w, k)?;
            println!("{lower} {upper}");
            Ok(())
        }
        Command::Table { m, k, mode, out, format, force } => {
            let rows = (alphabet.size() as u64).checked_pow(m.try_into().unwrap_or(u32::MAX));
            if !force && rows.is_none_or(|r| r > 1 << 26) {
                return Err(Error::BudgetExceeded(format!(
                    "census over sigma^{m} minimizers; pass --force to run it anyway"
                )));
            }
            let mode = match mode {
                ModeArg::Exact => PartitionMode::Exact,
                ModeArg::Bounds => PartitionMode::Bounds,
                ModeArg::Both => PartitionMode::Both,
            };
            let mut sink = output_writer(out.as_deref())?;
            if format == FormatArg::Csv {
                write_census_header(&mut sink, false)?;
            }
            let sigma = alphabet.size();
            picount::pi_partition(&alphabet, m, k, mode, |row| {
                write_census_row(&mut sink, format, sigma, m, &row, None)
            })?;
            sink.flush()?;
            Ok(())
        }
        Command::Inspect { word } => {
            let w = Word::parse(&alphabet, &word)?;
            let tables = build_tables(&w)?;
            print!("{}", tables.render());
            Ok(())
        }
        Command::Oracle { m, k, canonical, force, out, format } => {
            let partition = oracle::brute_force_partition(&alphabet, m, k, canonical, force)?;
            let mut sink = output_writer(out.as_deref())?;
            if format == FormatArg::Csv {
                write_census_header(&mut sink, true)?;
            }
            let sigma = alphabet.size();
            for (word, count) in partition.iter() {
                let beta_max = build_tables(&word)?.beta_max(k)?;
                let row = PiResult {
                    word,
                    k,
                    exact: Some(BigUint::from(count)),
                    lower: None,
                    upper: None,
                    beta_max,
                };
                write_census_row(&mut sink, format, sigma, m, &row, Some("brute"))?;
            }
            sink.flush()?;
            Ok(())
        }
        Command::Scan { k, m, inputs, out, distinct } => {
            let mut config = ScanConfig::new(&alphabet, k, m)?;
            config.count_distinct = distinct;
            // one record stream over all inputs so the distinct-k-mer set is
            // global; parse warnings get their file name prepended
            let mut streams: Vec<Box<dyn Iterator<Item = Result<scan::SequenceRecord, Error>>>> =
                Vec::new();
            for path in &inputs {
                let display = path.display().to_string();
                let reader = scan::read_fastx(path)?;
                streams.push(Box::new(reader.map(move |item| {
                    item.map_err(|e| match e {
                        Error::Parse(msg) => Error::Parse(format!("{display}: {msg}")),
                        other => other,
                    })
                })));
            }
            let outcome = scan::scan_sequences(&config, streams.into_iter().flatten())?;
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            let partition = outcome.partition;
            eprintln!(
                "scanned {} records, {} k-mers, {} distinct minimizers",
                outcome.records,
                partition.total_kmers(),
                partition.distinct_minimizers()
            );
            let mut sink = output_writer(out.as_deref())?;
            writeln!(
                sink,
                "# mincount-scan k={k} m={m} alphabet={} complement={} total={} distinct={distinct}",
                cli.global.alphabet,
                cli.global.complement,
                partition.total_kmers()
            )?;
            writeln!(sink, "minimizer,pi_hat")?;
            for (word, count) in partition.iter() {
                writeln!(sink, "{word},{count}")?;
            }
            sink.flush()?;
            Ok(())
        }
        Command::Compare { input, out, format } => {
            let partition = read_scan_census(&input)?;
            let sigma_name = log_column_base(&partition);
            let mut sink = output_writer(out.as_deref())?;
            if format == FormatArg::Csv {
                writeln!(
                    sink,
                    "minimizer,rank_phi,pi_hat,pi_exact,log{sigma_name}_f_hat,log{sigma_name}_f_theory"
                )?;
            }
            scan::compare(&partition, |row| {
                match format {
                    FormatArg::Csv => writeln!(
                        sink,
                        "{},{},{},{},{:.6},{:.6}",
                        row.word,
                        row.rank_phi,
                        row.pi_hat,
                        row.pi_exact,
                        row.log_f_hat,
                        row.log_f_theory
                    )?,
                    FormatArg::JsonLines => {
                        let value = serde_json::json!({
                            "minimizer": row.word.to_string(),
                            "rank_phi": row.rank_phi.to_string(),
                            "pi_hat": row.pi_hat,
                            "pi_exact": row.pi_exact.to_string(),
                            "log_f_hat": row.log_f_hat,
                            "log_f_theory": row.log_f_theory,
                        });
                        writeln!(sink, "{value}")?;
                    }
                }
                Ok(())
            })?;
            sink.flush()?;
            Ok(())
        }
        Command::Regress { word, k_from, k_to } => {
            let w = Word::parse(&alphabet, &word)?;
            let fit = regress_slope(&w, k_from, k_to)?;
            if fit.degenerate {
                println!("slope 0.000000");
                println!("intercept 0.000000");
                println!("r_squared undefined (constant bucket size)");
            } else {
                println!("slope {:.6}", fit.slope);
                println!("intercept {:.6}", fit.intercept);
                println!("r_squared {:.6}", fit.r_squared.expect("non-degenerate"));
            }
            Ok(())
        }
    }
}

fn build_alphabet(global: &GlobalArgs) -> Result<Arc<Alphabet>, Error> {
    let alphabet = if global.complement.is_empty() || global.complement == "none" {
        Alphabet::new(&global.alphabet)?
    } else {
        Alphabet::with_complement(&global.alphabet, &global.complement)?
    };
    Ok(Arc::new(alphabet))
}

fn output_writer(out: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// The log column is named after the alphabet size (log4 for DNA).
fn log_column_base(partition: &EmpiricalPartition) -> usize {
    partition.iter().next().map_or(4, |(w, _)| w.alphabet().size())
}

fn write_census_header(sink: &mut dyn Write, with_source: bool) -> Result<(), Error> {
    let base = "minimizer,rank_phi,k,m,pi_exact,pi_lower,pi_upper,beta_max,log4_pi,norm_x,norm_y";
    if with_source {
        writeln!(sink, "{base},source")?;
    } else {
        writeln!(sink, "{base}")?;
    }
    Ok(())
}

fn write_census_row(
    sink: &mut dyn Write,
    format: FormatArg,
    sigma: usize,
    m: usize,
    row: &PiResult,
    source: Option<&str>,
) -> Result<(), Error> {
    let rank = row.word.rank_phi()?;
    // empty buckets occur in canonical brute-force censuses; they have no
    // log-scale coordinates
    let (log_pi, norm) = match &row.exact {
        Some(pi) if *pi != BigUint::ZERO => {
            let point = normalized_point(&row.word, row.k, pi)?;
            (Some(log_base(pi, sigma)), Some(point))
        }
        _ => (None, None),
    };
    match format {
        FormatArg::Csv => {
            let fmt_big = |v: &Option<BigUint>| v.as_ref().map_or(String::new(), |b| b.to_string());
            let fmt_f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
            write!(
                sink,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.word,
                rank,
                row.k,
                m,
                fmt_big(&row.exact),
                fmt_big(&row.lower),
                fmt_big(&row.upper),
                row.beta_max,
                fmt_f(log_pi),
                fmt_f(norm.map(|p| p.x)),
                fmt_f(norm.map(|p| p.y)),
            )?;
            match source {
                Some(s) => writeln!(sink, ",{s}")?,
                None => writeln!(sink)?,
            }
        }
        FormatArg::JsonLines => {
            let mut value = serde_json::json!({
                "minimizer": row.word.to_string(),
                "rank_phi": rank.to_string(),
                "k": row.k,
                "m": m,
                "pi_exact": row.exact.as_ref().map(|b| b.to_string()),
                "pi_lower": row.lower.as_ref().map(|b| b.to_string()),
                "pi_upper": row.upper.as_ref().map(|b| b.to_string()),
                "beta_max": row.beta_max,
                "log_pi": log_pi,
                "norm_x": norm.map(|p| p.x),
                "norm_y": norm.map(|p| p.y),
            });
            if let Some(s) = source {
                value["source"] = serde_json::json!(s);
            }
            writeln!(sink, "{value}")?;
        }
    }
    Ok(())
}

/// Parse a census written by `mincount scan` back into a partition.
fn read_scan_census(path: &Path) -> Result<EmpiricalPartition, Error> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let mut lines = text.lines();
    let meta = lines
        .next()
        .ok_or_else(|| Error::Parse("empty scan census".into()))?;
    if !meta.starts_with("# mincount-scan ") {
        return Err(Error::Parse(
            "scan census must start with a '# mincount-scan ...' metadata line".into(),
        ));
    }
    let mut k = None;
    let mut m = None;
    let mut alphabet_symbols = None;
    let mut complement = None;
    for field in meta.trim_start_matches("# mincount-scan ").split_whitespace() {
        let Some((key, value)) = field.split_once('=') else { continue };
        match key {
            "k" => k = value.parse::<usize>().ok(),
            "m" => m = value.parse::<usize>().ok(),
            "alphabet" => alphabet_symbols = Some(value.to_string()),
            "complement" => complement = Some(value.to_string()),
            _ => {}
        }
    }
    let (Some(k), Some(m), Some(symbols)) = (k, m, alphabet_symbols) else {
        return Err(Error::Parse("scan census metadata is missing k, m or alphabet".into()));
    };
    let alphabet = build_alphabet(&GlobalArgs {
        alphabet: symbols,
        complement: complement.unwrap_or_else(|| "none".into()),
        threads: None,
    })?;
    let config = ScanConfig::new(&alphabet, k, m)?;
    let mut partition = EmpiricalPartition::new(&config);

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("scan census has no header row".into()))?;
    if header != "minimizer,pi_hat" {
        return Err(Error::Parse(format!("unexpected scan census header: {header}")));
    }
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let Some((word, count)) = line.split_once(',') else {
            return Err(Error::Parse(format!("row {}: expected 'minimizer,count'", idx + 3)));
        };
        let word = Word::parse(&alphabet, word)?;
        let count: u64 = count
            .parse()
            .map_err(|e| Error::Parse(format!("row {}: bad count: {e}", idx + 3)))?;
        partition.add_count(&word, count)?;
    }
    Ok(partition)
}
