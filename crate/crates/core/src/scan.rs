//! Empirical bucket counting over sequence data.
//!
//! Streams FASTA/FASTQ records (optionally gzip-compressed), buckets every
//! valid length-k window by its minimizer, and joins the observed counts
//! with the theoretical bucket sizes.
//!
//! A window is valid when all its symbols belong to the alphabet; windows
//! containing anything else (e.g. `N`) are skipped. Soft-masked lowercase
//! symbols count as their uppercase letter. Counting is of k-mer
//! occurrences: every valid window contributes 1, duplicates included. An
//! optional distinct mode counts each distinct k-mer once instead.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::picount::{self, log_base};
use crate::preprocess::build_tables;

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub alphabet: Arc<Alphabet>,
    pub k: usize,
    pub m: usize,
    /// Count each distinct k-mer once instead of once per occurrence.
    pub count_distinct: bool,
}

impl ScanConfig {
    pub fn new(alphabet: &Arc<Alphabet>, k: usize, m: usize) -> Result<Self> {
        if m == 0 || k < m {
            return Err(Error::invalid(format!("need 1 <= m <= k, got m={m} k={k}")));
        }
        Ok(ScanConfig {
            alphabet: Arc::clone(alphabet),
            k,
            m,
            count_distinct: false,
        })
    }
}

/// Observed bucket sizes: minimizer -> number of k-mers, plus the total.
#[derive(Debug, Clone)]
pub struct EmpiricalPartition {
    alphabet: Arc<Alphabet>,
    k: usize,
    m: usize,
    counts: BTreeMap<Vec<u8>, u64>,
    total: u64,
}

impl EmpiricalPartition {
    pub fn new(config: &ScanConfig) -> Self {
        EmpiricalPartition {
            alphabet: Arc::clone(&config.alphabet),
            k: config.k,
            m: config.m,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn total_kmers(&self) -> u64 {
        self.total
    }

    pub fn distinct_minimizers(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, w: &Word) -> u64 {
        self.counts.get(w.letters()).copied().unwrap_or(0)
    }

    /// Observed minimizers in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Word, u64)> + '_ {
        self.counts
            .iter()
            .map(|(letters, &count)| {
                (
                    Word::from_letters(&self.alphabet, letters.clone()).expect("validated letters"),
                    count,
                )
            })
    }

    pub(crate) fn add(&mut self, minimizer: &[u8], n: u64) {
        *self.counts.entry(minimizer.to_vec()).or_insert(0) += n;
        self.total += n;
    }

    /// Record `n` observed k-mers for one minimizer; used when rebuilding a
    /// partition from a saved census. Zero counts are dropped so every
    /// stored minimizer has a defined log frequency.
    pub fn add_count(&mut self, w: &Word, n: u64) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        if w.len() != self.m {
            return Err(Error::invalid(format!(
                "minimizer {} has length {}, partition expects m={}",
                w,
                w.len(),
                self.m
            )));
        }
        if !crate::alphabet::same_alphabet(w.alphabet(), &self.alphabet) {
            return Err(Error::invalid("minimizer is over a different alphabet"));
        }
        self.add(w.letters(), n);
        Ok(())
    }

    pub fn merge(&mut self, other: EmpiricalPartition) {
        for (letters, count) in other.counts {
            *self.counts.entry(letters).or_insert(0) += count;
        }
        self.total += other.total;
    }
}

/// One parsed sequence record.
#[derive(Debug, Clone)]
pub struct SequenceRecord {
    pub name: String,
    pub sequence: Vec<u8>,
    /// Line number of the record header, for error reporting.
    pub line: usize,
}

/// Result of a scan: the partition plus per-record problems that were
/// skipped over.
#[derive(Debug)]
pub struct ScanOutcome {
    pub partition: EmpiricalPartition,
    pub warnings: Vec<String>,
    pub records: u64,
}

/// Bucket every valid window of every record. Record-level parse errors are
/// reported in `warnings` and skipped; I/O errors abort.
pub fn scan_sequences<I>(config: &ScanConfig, records: I) -> Result<ScanOutcome>
where
    I: IntoIterator<Item = Result<SequenceRecord>>,
{
    let mut partition = EmpiricalPartition::new(config);
    let mut warnings = Vec::new();
    let mut n_records = 0u64;
    let mut seen_kmers: Option<HashSet<Vec<u8>>> = config.count_distinct.then(HashSet::new);

    let mut batch: Vec<SequenceRecord> = Vec::new();
    let batch_goal = 64usize;

    let flush = |batch: &mut Vec<SequenceRecord>,
                     partition: &mut EmpiricalPartition,
                     seen: &mut Option<HashSet<Vec<u8>>>| {
        if batch.is_empty() {
            return;
        }
        if let Some(seen) = seen {
            // distinct counting needs one global k-mer set: sequential
            for record in batch.drain(..) {
                count_record(config, &record.sequence, partition, Some(seen));
            }
        } else {
            use rayon::prelude::*;
            let parts: Vec<EmpiricalPartition> = batch
                .par_drain(..)
                .map(|record| {
                    let mut local = EmpiricalPartition::new(config);
                    count_record(config, &record.sequence, &mut local, None);
                    local
                })
                .collect();
            for part in parts {
                partition.merge(part);
            }
        }
    };

    for item in records {
        match item {
            Ok(record) => {
                n_records += 1;
                batch.push(record);
                if batch.len() >= batch_goal {
                    flush(&mut batch, &mut partition, &mut seen_kmers);
                }
            }
            Err(Error::Parse(message)) => warnings.push(message),
            Err(fatal) => return Err(fatal),
        }
    }
    flush(&mut batch, &mut partition, &mut seen_kmers);

    Ok(ScanOutcome { partition, warnings, records: n_records })
}

/// Count the valid windows of one sequence into `partition`.
fn count_record(
    config: &ScanConfig,
    sequence: &[u8],
    partition: &mut EmpiricalPartition,
    mut seen: Option<&mut HashSet<Vec<u8>>>,
) {
    let k = config.k;
    let m = config.m;
    if sequence.len() < k {
        return;
    }
    // maximal runs of alphabet symbols; windows never span invalid symbols
    let mut letters: Vec<u8> = Vec::with_capacity(sequence.len());
    let flush_run = |letters: &mut Vec<u8>, partition: &mut EmpiricalPartition,
                         seen: &mut Option<&mut HashSet<Vec<u8>>>| {
        if letters.len() >= k {
            count_run(letters, k, m, partition, seen.as_deref_mut());
        }
        letters.clear();
    };
    for &byte in sequence {
        match config.alphabet.try_index(byte as char) {
            Some(letter) => letters.push(letter),
            None => flush_run(&mut letters, partition, &mut seen),
        }
    }
    flush_run(&mut letters, partition, &mut seen);
}

/// Slide length-k windows over one clean run, maintaining the window minimum
/// with a monotone queue of m-mer start positions (leftmost wins ties).
fn count_run(
    letters: &[u8],
    k: usize,
    m: usize,
    partition: &mut EmpiricalPartition,
    mut seen: Option<&mut HashSet<Vec<u8>>>,
) {
    let mmer = |p: usize| &letters[p..p + m];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for p in 0..=(letters.len() - m) {
        while let Some(&back) = queue.back() {
            if mmer(back) > mmer(p) {
                queue.pop_back();
            } else {
                break;
            }
        }
        queue.push_back(p);
        if p + m >= k {
            let window_start = p + m - k;
            while *queue.front().expect("nonempty") < window_start {
                queue.pop_front();
            }
            if let Some(seen) = seen.as_deref_mut() {
                if !seen.insert(letters[window_start..window_start + k].to_vec()) {
                    continue;
                }
            }
            partition.add(mmer(*queue.front().expect("nonempty")), 1);
        }
    }
}

/// Open a sequence file, transparently decompressing gzip by extension, and
/// sniff FASTA vs FASTQ from the first byte.
pub fn read_fastx(path: &Path) -> Result<FastxReader<Box<dyn BufRead>>> {
    let file = File::open(path)?;
    let gz = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    let inner: Box<dyn Read> = if gz {
        Box::new(flate2::read::GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    FastxReader::new(Box::new(BufReader::new(inner)) as Box<dyn BufRead>)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FastxFormat {
    Fasta,
    Fastq,
}

/// Streaming FASTA/FASTQ reader. Yields one `Result<SequenceRecord>` per
/// record; malformed FASTQ records yield a `Parse` error and the reader
/// resyncs at the next plausible record start.
pub struct FastxReader<R: BufRead> {
    reader: R,
    format: FastxFormat,
    line: usize,
    pending: Option<String>,
    eof: bool,
}

impl<R: BufRead> FastxReader<R> {
    pub fn new(reader: R) -> Result<Self> {
        let mut this = FastxReader {
            reader,
            format: FastxFormat::Fasta,
            line: 0,
            pending: None,
            eof: false,
        };
        // sniff the first non-blank line
        loop {
            match this.read_line()? {
                None => {
                    this.eof = true;
                    break;
                }
                Some(line) if line.trim().is_empty() => continue,
                Some(line) => {
                    this.format = match line.as_bytes().first() {
                        Some(b'>') => FastxFormat::Fasta,
                        Some(b'@') => FastxFormat::Fastq,
                        _ => {
                            return Err(Error::Parse(format!(
                                "line {}: expected '>' or '@' at start of sequence file",
                                this.line
                            )))
                        }
                    };
                    this.pending = Some(line);
                    break;
                }
            }
        }
        Ok(this)
    }

    fn read_line(&mut self) -> Result<Option<String>> {
        if let Some(line) = self.pending.take() {
            return Ok(Some(line));
        }
        let mut buf = String::new();
        let n = self.reader.read_line(&mut buf)?;
        if n == 0 {
            return Ok(None);
        }
        self.line += 1;
        while buf.ends_with('\n') || buf.ends_with('\r') {
            buf.pop();
        }
        Ok(Some(buf))
    }

    fn next_fasta(&mut self) -> Result<Option<SequenceRecord>> {
        let header = loop {
            match self.read_line()? {
                None => return Ok(None),
                Some(line) if line.trim().is_empty() => continue,
                Some(line) => break line,
            }
        };
        let header_line = self.line;
        if !header.starts_with('>') {
            return Err(Error::Parse(format!(
                "line {header_line}: expected FASTA header starting with '>'"
            )));
        }
        let name = header[1..].split_whitespace().next().unwrap_or("").to_string();
        let mut sequence = Vec::new();
        loop {
            match self.read_line()? {
                None => break,
                Some(line) if line.starts_with('>') => {
                    self.pending = Some(line);
                    break;
                }
                Some(line) => {
                    sequence.extend(line.bytes().filter(|b| !b.is_ascii_whitespace()));
                }
            }
        }
        Ok(Some(SequenceRecord { name, sequence, line: header_line }))
    }

    fn next_fastq(&mut self) -> Result<Option<SequenceRecord>> {
        let header = loop {
            match self.read_line()? {
                None => return Ok(None),
                Some(line) if line.trim().is_empty() => continue,
                Some(line) => break line,
            }
        };
        let header_line = self.line;
        if !header.starts_with('@') {
            self.resync_fastq()?;
            return Err(Error::Parse(format!(
                "line {header_line}: expected FASTQ header starting with '@'"
            )));
        }
        let name = header[1..].split_whitespace().next().unwrap_or("").to_string();
        let Some(sequence) = self.read_line()? else {
            return Err(Error::Parse(format!(
                "line {header_line}: FASTQ record truncated before sequence"
            )));
        };
        let Some(plus) = self.read_line()? else {
            return Err(Error::Parse(format!(
                "line {header_line}: FASTQ record truncated before '+'"
            )));
        };
        if !plus.starts_with('+') {
            self.resync_fastq()?;
            return Err(Error::Parse(format!(
                "line {}: expected '+' separator in FASTQ record",
                self.line
            )));
        }
        let Some(quality) = self.read_line()? else {
            return Err(Error::Parse(format!(
                "line {header_line}: FASTQ record truncated before quality"
            )));
        };
        if quality.len() != sequence.len() {
            return Err(Error::Parse(format!(
                "line {}: quality length {} does not match sequence length {}",
                self.line,
                quality.len(),
                sequence.len()
            )));
        }
        Ok(Some(SequenceRecord {
            name,
            sequence: sequence.into_bytes(),
            line: header_line,
        }))
    }

    /// After a structural error, skip to the next line that can plausibly
    /// start a record ('@' followed two lines later by '+').
    fn resync_fastq(&mut self) -> Result<()> {
        loop {
            let Some(line) = self.read_line()? else { return Ok(()) };
            if line.starts_with('@') {
                self.pending = Some(line);
                return Ok(());
            }
        }
    }
}

impl<R: BufRead> Iterator for FastxReader<R> {
    type Item = Result<SequenceRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.eof {
            return None;
        }
        let result = match self.format {
            FastxFormat::Fasta => self.next_fasta(),
            FastxFormat::Fastq => self.next_fastq(),
        };
        match result {
            Ok(Some(record)) => Some(Ok(record)),
            Ok(None) => {
                self.eof = true;
                None
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// Observed and theoretical sides of one minimizer, ready for CSV emission.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub word: Word,
    pub rank_phi: BigUint,
    pub pi_hat: u64,
    pub pi_exact: BigUint,
    /// log_σ of the observed frequency pi_hat / total.
    pub log_f_hat: f64,
    /// log_σ of the theoretical frequency pi_exact / σ^k.
    pub log_f_theory: f64,
}

/// Join observed buckets with theory, one row per observed minimizer in
/// lexicographic order. Theory is computed only for observed minimizers.
pub fn compare<F>(partition: &EmpiricalPartition, mut emit: F) -> Result<()>
where
    F: FnMut(ComparisonRow) -> Result<()>,
{
    let sigma = partition.alphabet.size();
    let k = partition.k;
    let log_total = log_base(&BigUint::from(partition.total.max(1)), sigma);
    for (word, pi_hat) in partition.iter() {
        let pi_exact = if word.letters()[0] == partition.alphabet.max_letter() {
            BigUint::from(1u32)
        } else {
            let tables = build_tables(&word)?;
            picount::pi_exact_with_tables(&tables, k)?
        };
        let row = ComparisonRow {
            rank_phi: word.rank_phi()?,
            log_f_hat: log_base(&BigUint::from(pi_hat), sigma) - log_total,
            log_f_theory: log_base(&pi_exact, sigma) - k as f64,
            word,
            pi_hat,
            pi_exact,
        };
        emit(row)?;
    }
    Ok(())
}
