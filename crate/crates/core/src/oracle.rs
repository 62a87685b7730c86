//! Brute-force ground truth.
//!
//! Everything here enumerates words explicitly and checks definitions
//! literally; no shortcuts, no shared state with the dynamic programs it
//! verifies. Enumerations iterate an integer counter decoded in base σ, so
//! ranges can be split across workers and merged associatively.

use std::cmp::Ordering;
use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};

/// Default refusal threshold: σ^k may not exceed 2^28 words unless forced.
pub const DEFAULT_BUDGET_BITS: u32 = 28;

/// Where the smallest window of a word sits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimizerHit {
    pub minimizer: Word,
    /// 1-based position of the leftmost occurrence.
    pub position: usize,
}

/// Scan all windows of `x` and return the smallest, leftmost on ties.
pub fn minimizer_of(x: &Word, m: usize) -> Result<MinimizerHit> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    if x.len() < m {
        return Err(Error::invalid(format!(
            "word of length {} has no window of length {m}",
            x.len()
        )));
    }
    let letters = x.letters();
    let mut best = 0usize;
    for start in 1..=(letters.len() - m) {
        if letters[start..start + m] < letters[best..best + m] {
            best = start;
        }
    }
    Ok(MinimizerHit {
        minimizer: Word::from_letters(x.alphabet(), letters[best..best + m].to_vec())?,
        position: best + 1,
    })
}

/// Bucket sizes of every m-mer after enumerating all σ^k k-mers (or only the
/// canonical ones). Dense over the lexicographic ranks of the m-mers.
#[derive(Debug, Clone)]
pub struct BruteForcePartition {
    alphabet: Arc<Alphabet>,
    m: usize,
    k: usize,
    counts: Vec<u64>,
    total: u64,
}

impl BruteForcePartition {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum over all buckets: σ^k, or the number of canonical k-mers.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bucket(&self, w: &Word) -> Result<u64> {
        if w.len() != self.m {
            return Err(Error::invalid(format!(
                "bucket word has length {}, partition was built for m={}",
                w.len(),
                self.m
            )));
        }
        if !crate::alphabet::same_alphabet(w.alphabet(), &self.alphabet) {
            return Err(Error::invalid("bucket word is over a different alphabet"));
        }
        Ok(self.counts[lex_rank(w.letters(), self.alphabet.size())])
    }

    pub fn bucket_at_rank(&self, rank: u64) -> u64 {
        self.counts[rank as usize]
    }

    /// Buckets in lexicographic order of their minimizer.
    pub fn iter(&self) -> impl Iterator<Item = (Word, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(move |(rank, &count)| (Word::unrank(&self.alphabet, self.m, rank as u64), count))
    }
}

fn lex_rank(letters: &[u8], sigma: usize) -> usize {
    letters
        .iter()
        .fold(0usize, |acc, &l| acc * sigma + l as usize)
}

fn check_budget(sigma: usize, n: usize, force: bool) -> Result<u64> {
    let total = (sigma as u64)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::BudgetExceeded(format!("sigma^{n} does not fit in 64 bits")))?;
    if !force && total > 1u64 << DEFAULT_BUDGET_BITS {
        return Err(Error::BudgetExceeded(format!(
            "sigma^{n} = {total} words exceeds the 2^{DEFAULT_BUDGET_BITS} cap; pass force to override"
        )));
    }
    Ok(total)
}

/// Count every k-mer (or only those `x <= rc(x)` when `canonical_only`) into
/// the bucket of its minimizer.
pub fn brute_force_partition(
    alphabet: &Arc<Alphabet>,
    m: usize,
    k: usize,
    canonical_only: bool,
    force: bool,
) -> Result<BruteForcePartition> {
    if m == 0 || k < m {
        return Err(Error::invalid(format!("need 1 <= m <= k, got m={m} k={k}")));
    }
    if canonical_only && !alphabet.has_complement() {
        return Err(Error::Unsupported(
            "canonical counting needs a complement involution".into(),
        ));
    }
    let sigma = alphabet.size();
    let total_kmers = check_budget(sigma, k, force)?;
    let buckets = (sigma as u64)
        .checked_pow(m as u32)
        .filter(|&b| b <= 1 << 26)
        .ok_or_else(|| Error::BudgetExceeded(format!("sigma^{m} buckets do not fit in memory")))?
        as usize;

    let workers = rayon::current_num_threads().max(1) as u64;
    let slice_len = total_kmers.div_ceil(workers).max(1);
    let slices: Vec<(u64, u64)> = (0..workers)
        .map(|w| (w * slice_len, ((w + 1) * slice_len).min(total_kmers)))
        .filter(|(s, e)| s < e)
        .collect();

    let partials: Vec<(Vec<u64>, u64)> = slices
        .into_par_iter()
        .map(|(start, end)| {
            let mut counts = vec![0u64; buckets];
            let mut counted = 0u64;
            let mut kmer = crate::alphabet::decode_base_sigma(sigma, k, start);
            let mut rc = vec![0u8; k];
            for _ in start..end {
                let include = if canonical_only {
                    for (slot, &l) in rc.iter_mut().zip(kmer.iter().rev()) {
                        *slot = alphabet.complement_letter(l).expect("checked above");
                    }
                    kmer <= rc
                } else {
                    true
                };
                if include {
                    let mut best = 0usize;
                    for s in 1..=(k - m) {
                        if kmer[s..s + m] < kmer[best..best + m] {
                            best = s;
                        }
                    }
                    counts[lex_rank(&kmer[best..best + m], sigma)] += 1;
                    counted += 1;
                }
                increment(&mut kmer, sigma);
            }
            (counts, counted)
        })
        .collect();

    let mut counts = vec![0u64; buckets];
    let mut total = 0u64;
    for (partial, counted) in partials {
        for (acc, v) in counts.iter_mut().zip(partial) {
            *acc += v;
        }
        total += counted;
    }

    Ok(BruteForcePartition { alphabet: Arc::clone(alphabet), m, k, counts, total })
}

fn increment(letters: &mut [u8], sigma: usize) {
    let max = (sigma - 1) as u8;
    for slot in letters.iter_mut().rev() {
        if *slot < max {
            *slot += 1;
            return;
        }
        *slot = 0;
    }
}

/// Is `y` admissible before `w`: every window of `y·w` but the final one
/// must be strictly greater than `w`.
pub fn is_antemer(y: &Word, w: &Word) -> Result<bool> {
    if !crate::alphabet::same_alphabet(y.alphabet(), w.alphabet()) {
        return Err(Error::invalid("words are over different alphabets"));
    }
    if w.is_empty() {
        return Err(Error::invalid("minimizer must have length >= 1"));
    }
    let mut buf = y.letters().to_vec();
    buf.extend_from_slice(w.letters());
    Ok(windows_admissible(&buf, w.letters(), y.len(), true))
}

/// Is `z` admissible as a suffix: every window of `z` (anchored: of `w·z`)
/// must be `>= w`.
pub fn is_postmer(z: &Word, w: &Word, anchored: bool) -> Result<bool> {
    if !crate::alphabet::same_alphabet(z.alphabet(), w.alphabet()) {
        return Err(Error::invalid("words are over different alphabets"));
    }
    if w.is_empty() {
        return Err(Error::invalid("minimizer must have length >= 1"));
    }
    let buf: Vec<u8> = if anchored {
        w.letters().iter().chain(z.letters()).copied().collect()
    } else {
        z.letters().to_vec()
    };
    let windows = (buf.len() + 1).saturating_sub(w.len());
    Ok(windows_admissible(&buf, w.letters(), windows, false))
}

/// Check the first `windows` windows of `buf` against `w`: strictly greater
/// when `strict`, otherwise at least equal.
fn windows_admissible(buf: &[u8], w: &[u8], windows: usize, strict: bool) -> bool {
    let m = w.len();
    (0..windows).all(|p| match buf[p..p + m].cmp(w) {
        Ordering::Greater => true,
        Ordering::Equal => !strict,
        Ordering::Less => false,
    })
}

/// Count admissible prefix words of length `alpha` by enumeration,
/// stratified by the exact length of the prefix shared with `w`.
pub fn brute_force_antemers(w: &Word, alpha: usize) -> Result<(u64, Vec<u64>)> {
    if w.is_empty() {
        return Err(Error::invalid("minimizer must have length >= 1"));
    }
    let sigma = w.alphabet().size();
    let total = check_budget(sigma, alpha, false)?;
    let m = w.len();
    let mut by_prefix = vec![0u64; m];
    let mut count = 0u64;

    let mut buf = vec![0u8; alpha + m];
    buf[alpha..].copy_from_slice(w.letters());
    for _ in 0..total {
        if windows_admissible(&buf, w.letters(), alpha, true) {
            count += 1;
            let shared = buf[..alpha]
                .iter()
                .zip(w.letters())
                .take_while(|(a, b)| a == b)
                .count();
            debug_assert!(shared < m, "an admissible prefix word cannot contain w");
            by_prefix[shared.min(m - 1)] += 1;
        }
        increment(&mut buf[..alpha], sigma);
    }
    Ok((count, by_prefix))
}

/// Count admissible suffix words of length `beta` by enumeration.
pub fn brute_force_postmers(w: &Word, beta: usize, anchored: bool) -> Result<u64> {
    if w.is_empty() {
        return Err(Error::invalid("minimizer must have length >= 1"));
    }
    let sigma = w.alphabet().size();
    let total = check_budget(sigma, beta, false)?;
    let m = w.len();

    let (mut buf, skip) = if anchored {
        let mut buf = vec![0u8; m + beta];
        buf[..m].copy_from_slice(w.letters());
        (buf, m)
    } else {
        (vec![0u8; beta], 0)
    };
    let windows = (buf.len() + 1).saturating_sub(m);

    let mut count = 0u64;
    for _ in 0..total {
        if windows_admissible(&buf, w.letters(), windows, false) {
            count += 1;
        }
        increment(&mut buf[skip..], sigma);
    }
    Ok(count)
}
