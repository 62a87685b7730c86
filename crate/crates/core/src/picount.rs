//! Assembly of the per-minimizer bucket count and its bounds, plus the
//! whole-partition census, normalized curve points, relative errors and the
//! growth-rate regression.
//!
//! The bucket size of `w` over all `σ^k` k-mers splits by the position of
//! the leftmost minimizer occurrence: `antemers(k-m-beta) ·
//! anchored_postmers(beta+m)` summed over the admissible number of free
//! letters `beta` after the minimizer.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::alphabet::{Alphabet, Word};
use crate::antemer::{compute_antemer_bounds, compute_antemers};
use crate::error::{Error, Result};
use crate::postmer::{compute_postmer_bounds, compute_postmers};
use crate::preprocess::{build_tables, AutocorrTables};

/// One census row: the minimizer, its bucket count and/or bounds.
#[derive(Debug, Clone)]
pub struct PiResult {
    pub word: Word,
    pub k: usize,
    pub exact: Option<BigUint>,
    pub lower: Option<BigUint>,
    pub upper: Option<BigUint>,
    pub beta_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    Exact,
    Bounds,
    Both,
}

fn validate_k_m(m: usize, k: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be >= 1"));
    }
    if k < m {
        return Err(Error::invalid(format!("k={k} must be >= m={m}")));
    }
    Ok(())
}

/// Exact number of k-mers whose minimizer is `w`. O(km) space, O(km²) time;
/// O(1) when `w` starts with the greatest letter (the bucket is the single
/// k-mer `max(Σ)^(k-m)·w`).
pub fn pi_exact(w: &Word, k: usize) -> Result<BigUint> {
    validate_k_m(w.len(), k)?;
    if w.letters()[0] == w.alphabet().max_letter() {
        return Ok(BigUint::one());
    }
    let tables = build_tables(w)?;
    pi_exact_with_tables(&tables, k)
}

/// Exact count from prebuilt tables (no short-circuit).
pub fn pi_exact_with_tables(tables: &AutocorrTables, k: usize) -> Result<BigUint> {
    let m = tables.m();
    validate_k_m(m, k)?;
    let beta_max = tables.beta_max(k)?;
    let antemers = compute_antemers(tables, k - m);
    let postmers = compute_postmers(tables, beta_max + m);
    let mut sum = BigUint::zero();
    for beta in 0..=beta_max {
        sum += antemers.total(k - m - beta) * postmers.anchored(beta + m);
    }
    Ok(sum)
}

/// Debug route: the same count as the full convolution over every split of
/// the free letters, without the beta cutoff. Quadratically slower; kept to
/// cross-check that the truncated terms really vanish.
pub fn pi_exact_full_sum(tables: &AutocorrTables, k: usize) -> Result<BigUint> {
    let m = tables.m();
    validate_k_m(m, k)?;
    let free = k - m;
    let antemers = compute_antemers(tables, free);
    let postmers = compute_postmers(tables, k);
    let mut sum = BigUint::zero();
    for beta in 0..=free {
        sum += antemers.total(free - beta) * postmers.anchored(beta + m);
    }
    Ok(sum)
}

/// `(beta_max + 1) · σ^(k-m)`, the cap every bucket count obeys.
pub fn trivial_cap(tables: &AutocorrTables, k: usize) -> Result<BigUint> {
    let beta_max = tables.beta_max(k)?;
    Ok(BigUint::from(beta_max as u64 + 1)
        * BigUint::from(tables.sigma()).pow((k - tables.m()) as u32))
}

/// Lower and upper bounds on the bucket count. O(k) space, O(km) time.
pub fn pi_bounds(w: &Word, k: usize) -> Result<(BigUint, BigUint)> {
    validate_k_m(w.len(), k)?;
    let tables = build_tables(w)?;
    pi_bounds_with_tables(&tables, k)
}

pub fn pi_bounds_with_tables(tables: &AutocorrTables, k: usize) -> Result<(BigUint, BigUint)> {
    let m = tables.m();
    validate_k_m(m, k)?;
    let beta_max = tables.beta_max(k)?;
    let antemer_bounds = compute_antemer_bounds(tables, k - m);
    let postmer_bounds = compute_postmer_bounds(tables, beta_max + m);
    let mut lower = BigUint::zero();
    let mut upper = BigUint::zero();
    for beta in 0..=beta_max {
        lower += antemer_bounds.lower(k - m - beta) * postmer_bounds.anchored_lower(beta + m);
        upper += antemer_bounds.upper(k - m - beta) * postmer_bounds.anchored_upper(beta + m);
    }
    let lower = lower.max(BigUint::one());
    let upper = upper.min(trivial_cap(tables, k)?);
    Ok((lower, upper))
}

/// Enumerate every m-mer in lexicographic order and hand its census row to
/// `emit`. Rows are computed in parallel on the ambient rayon pool; the
/// emission order is deterministic under any thread count.
pub fn pi_partition<F>(
    alphabet: &Arc<Alphabet>,
    m: usize,
    k: usize,
    mode: PartitionMode,
    mut emit: F,
) -> Result<()>
where
    F: FnMut(PiResult) -> Result<()>,
{
    validate_k_m(m, k)?;
    let sigma = alphabet.size() as u64;
    let total = sigma
        .checked_pow(m.try_into().unwrap_or(u32::MAX))
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("cannot enumerate sigma^m minimizers for m={m}"))
        })?;

    let chunk_len: u64 = 4096;
    let chunks = total.div_ceil(chunk_len);
    let wave = (rayon::current_num_threads() as u64 * 4).max(4);

    let mut next_chunk: u64 = 0;
    while next_chunk < chunks {
        let wave_end = (next_chunk + wave).min(chunks);
        let blocks: Vec<Vec<PiResult>> = (next_chunk..wave_end)
            .into_par_iter()
            .map(|ci| {
                let start = ci * chunk_len;
                let end = ((ci + 1) * chunk_len).min(total);
                (start..end)
                    .map(|rank| partition_row(alphabet, m, k, mode, rank))
                    .collect()
            })
            .collect();
        for block in blocks {
            for row in block {
                emit(row)?;
            }
        }
        next_chunk = wave_end;
    }
    Ok(())
}

fn partition_row(
    alphabet: &Arc<Alphabet>,
    m: usize,
    k: usize,
    mode: PartitionMode,
    rank: u64,
) -> PiResult {
    let word = Word::unrank(alphabet, m, rank);
    let tables = build_tables(&word).expect("m >= 1");
    let beta_max = tables.beta_max(k).expect("k >= m");
    let exact = match mode {
        PartitionMode::Bounds => None,
        _ => {
            if word.letters()[0] == alphabet.max_letter() {
                Some(BigUint::one())
            } else {
                Some(pi_exact_with_tables(&tables, k).expect("k >= m"))
            }
        }
    };
    let (lower, upper) = match mode {
        PartitionMode::Exact => (None, None),
        _ => {
            let (lo, hi) = pi_bounds_with_tables(&tables, k).expect("k >= m");
            (Some(lo), Some(hi))
        }
    };
    PiResult { word, k, exact, lower, upper, beta_max }
}

/// `log2` of a positive big natural, exact to the precision of the 64 most
/// significant bits (relative error far below 1e-12).
fn log2_big(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits <= 64 {
        (value.to_u64().expect("fits") as f64).log2()
    } else {
        let shift = bits - 64;
        let top: BigUint = value >> shift;
        (top.to_u64().expect("64 bits") as f64).log2() + shift as f64
    }
}

/// Logarithm of a positive big natural in the given base.
pub fn log_base(value: &BigUint, base: usize) -> f64 {
    debug_assert!(!value.is_zero(), "log of zero");
    log2_big(value) / (base as f64).log2()
}

/// A minimizer mapped into the unit square: decreasing-rank position against
/// normalized log bucket size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPoint {
    pub x: f64,
    pub y: f64,
}

pub fn normalized_point(w: &Word, k: usize, pi: &BigUint) -> Result<NormalizedPoint> {
    let m = w.len();
    validate_k_m(m, k)?;
    if pi.is_zero() {
        return Err(Error::invalid("bucket count must be >= 1"));
    }
    let sigma = w.alphabet().size();
    let denom_x = BigUint::from(sigma).pow(m as u32) - BigUint::one();
    let x = if denom_x.is_zero() {
        0.0
    } else {
        w.rank_phi()?.to_f64().unwrap_or(f64::INFINITY) / denom_x.to_f64().unwrap_or(f64::INFINITY)
    };
    let log_pi = log_base(pi, sigma);
    let y = if log_pi == 0.0 {
        0.0
    } else {
        let denom_y = (k - m) as f64 + ((k - m + 1) as f64).ln() / (sigma as f64).ln();
        log_pi / denom_y
    };
    Ok(NormalizedPoint { x, y })
}

/// Relative log-scale errors of the two bounds; zero exactly when the
/// corresponding bound is tight. The ratio is independent of the log base.
pub fn relative_errors(
    exact: &BigUint,
    lower: &BigUint,
    upper: &BigUint,
) -> Result<(f64, f64)> {
    if exact <= &BigUint::one() {
        return Err(Error::invalid(
            "relative errors are undefined for bucket counts <= 1",
        ));
    }
    if lower > exact || exact > upper {
        return Err(Error::invalid("bounds must sandwich the exact count"));
    }
    let le = log2_big(exact);
    let eta_minus = (le - log2_big(lower)) / le;
    let eta_plus = (log2_big(upper) - le) / le;
    Ok((eta_minus, eta_plus))
}

/// Ordinary least squares fit of the log bucket size against k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// None when the response is constant (e.g. minimizers starting with the
    /// greatest letter, whose bucket size is identically 1).
    pub r_squared: Option<f64>,
    pub degenerate: bool,
}

/// Least squares over `(x, y)` samples. At least 3 samples with distinct x.
pub fn fit_line(points: &[(f64, f64)]) -> Result<RegressionFit> {
    let n = points.len();
    if n < 3 {
        return Err(Error::invalid("regression needs at least 3 samples"));
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("regression needs distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if ss_tot == 0.0 {
        return Ok(RegressionFit { slope, intercept, r_squared: None, degenerate: true });
    }
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    Ok(RegressionFit {
        slope,
        intercept,
        r_squared: Some(1.0 - ss_res / ss_tot),
        degenerate: false,
    })
}

/// Fit `log_σ bucket(k) = slope·k + intercept` over `k ∈ [k_from, k_to]`.
/// One preprocessing pass serves every k.
pub fn regress_slope(w: &Word, k_from: usize, k_to: usize) -> Result<RegressionFit> {
    let m = w.len();
    validate_k_m(m, k_from)?;
    if k_to < k_from + 2 {
        return Err(Error::invalid("regression range needs at least 3 values of k"));
    }
    if w.letters()[0] == w.alphabet().max_letter() {
        // bucket size is identically 1; the fit is a flat line with no
        // variance to explain
        return Ok(RegressionFit { slope: 0.0, intercept: 0.0, r_squared: None, degenerate: true });
    }
    let sigma = w.alphabet().size();
    let tables = build_tables(w)?;
    let max_free = k_to - m;
    let beta_cap = match tables.beta_max_raw() {
        Some(raw) => raw.min(max_free),
        None => max_free,
    };
    let antemers = compute_antemers(&tables, max_free);
    let postmers = compute_postmers(&tables, beta_cap + m);
    let points: Vec<(f64, f64)> = (k_from..=k_to)
        .map(|k| {
            let beta_max = tables.beta_max(k).expect("k >= m");
            let mut pi = BigUint::zero();
            for beta in 0..=beta_max {
                pi += antemers.total(k - m - beta) * postmers.anchored(beta + m);
            }
            (k as f64, log_base(&pi, sigma))
        })
        .collect();
    fit_line(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dna_word(s: &str) -> Word {
        Word::parse(&Alphabet::dna(), s).unwrap()
    }

    fn as_u64(v: &BigUint) -> u64 {
        u64::try_from(v).unwrap()
    }

    #[test]
    fn golden_exact_rows() {
        let w1 = dna_word("ACACAA");
        let got1: Vec<u64> = (6..=16).map(|k| as_u64(&pi_exact(&w1, k).unwrap())).collect();
        assert_eq!(
            got1,
            [1, 7, 24, 93, 351, 1332, 5049, 19143, 72576, 275157, 1043199]
        );

        let w2 = dna_word("ACACAC");
        let got2: Vec<u64> = (6..=16).map(|k| as_u64(&pi_exact(&w2, k).unwrap())).collect();
        assert_eq!(
            got2,
            [1, 7, 38, 191, 911, 4202, 18923, 82889, 356478, 1511583, 6337559]
        );
    }

    #[test]
    fn golden_bound_rows() {
        let w1 = dna_word("ACACAA");
        let rows1: Vec<(u64, u64)> = (6..=16)
            .map(|k| {
                let (lo, hi) = pi_bounds(&w1, k).unwrap();
                (as_u64(&lo), as_u64(&hi))
            })
            .collect();
        let lower1: Vec<u64> = rows1.iter().map(|r| r.0).collect();
        let upper1: Vec<u64> = rows1.iter().map(|r| r.1).collect();
        assert_eq!(
            lower1,
            [1, 7, 23, 86, 327, 1239, 4698, 17808, 67495, 255826, 969659]
        );
        assert_eq!(
            upper1,
            [1, 7, 24, 93, 353, 1355, 5195, 19922, 76384, 292873, 1122932]
        );

        let w2 = dna_word("ACACAC");
        let rows2: Vec<(u64, u64)> = (6..=16)
            .map(|k| {
                let (lo, hi) = pi_bounds(&w2, k).unwrap();
                (as_u64(&lo), as_u64(&hi))
            })
            .collect();
        let lower2: Vec<u64> = rows2.iter().map(|r| r.0).collect();
        let upper2: Vec<u64> = rows2.iter().map(|r| r.1).collect();
        assert_eq!(
            lower2,
            [1, 7, 35, 170, 795, 3615, 16110, 69873, 298273, 1257505, 5247521]
        );
        assert_eq!(
            upper2,
            [1, 7, 48, 256, 1280, 6144, 28672, 131072, 589824, 2621440, 11534336]
        );
    }

    #[test]
    fn bucket_of_k_equals_m_is_one() {
        for s in ["A", "ACGT", "GGC", "TTT"] {
            let w = dna_word(s);
            assert_eq!(pi_exact(&w, w.len()).unwrap(), BigUint::one(), "{s}");
        }
    }

    #[test]
    fn greatest_letter_prefix_has_singleton_bucket() {
        let w = dna_word("TGCA");
        for k in [4, 7, 12, 31] {
            assert_eq!(pi_exact(&w, k).unwrap(), BigUint::one());
            let (lo, hi) = pi_bounds(&w, k).unwrap();
            assert_eq!(lo, BigUint::one());
            assert_eq!(hi, BigUint::one());
        }
        // the dynamic programs agree with the shortcut
        let tables = build_tables(&w).unwrap();
        assert_eq!(pi_exact_with_tables(&tables, 9).unwrap(), BigUint::one());
    }

    #[test]
    fn invalid_k_is_rejected() {
        let w = dna_word("ACACAA");
        assert!(pi_exact(&w, 5).is_err());
        assert!(pi_bounds(&w, 5).is_err());
    }

    #[test]
    fn partition_sums_to_all_kmers() {
        let dna = Alphabet::dna();
        for (m, k) in [(1usize, 5usize), (2, 7), (3, 8), (4, 12)] {
            let mut sum = BigUint::zero();
            pi_partition(&dna, m, k, PartitionMode::Exact, |row| {
                sum += row.exact.as_ref().unwrap();
                Ok(())
            })
            .unwrap();
            assert_eq!(sum, BigUint::from(4u64.pow(k as u32)), "m={m} k={k}");
        }
    }

    #[test]
    fn partition_sums_exactly_far_beyond_machine_range() {
        // the disjoint-union identity is an end-to-end check of every grid
        // cell at word sizes where the counts have hundreds of bits
        let dna = Alphabet::dna();
        for (m, k) in [(2usize, 101usize), (3, 64)] {
            let mut sum = BigUint::zero();
            pi_partition(&dna, m, k, PartitionMode::Exact, |row| {
                sum += row.exact.as_ref().unwrap();
                Ok(())
            })
            .unwrap();
            assert_eq!(sum, BigUint::from(4u64).pow(k as u32), "m={m} k={k}");
        }
    }

    #[test]
    fn partition_rows_are_lexicographic_and_thread_invariant() {
        let dna = Alphabet::dna();
        let collect = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut rows = Vec::new();
                pi_partition(&dna, 3, 7, PartitionMode::Both, |row| {
                    rows.push((
                        row.word.to_string(),
                        row.exact.clone().unwrap(),
                        row.lower.clone().unwrap(),
                        row.upper.clone().unwrap(),
                    ));
                    Ok(())
                })
                .unwrap();
                rows
            })
        };
        let one = collect(1);
        let many = collect(4);
        assert_eq!(one, many);
        let words: Vec<&String> = one.iter().map(|r| &r.0).collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words.len(), 64);
    }

    #[test]
    fn full_convolution_agrees_with_cutoff_sum() {
        let mut rng = StdRng::seed_from_u64(3);
        let dna = Alphabet::dna();
        for _ in 0..100 {
            let m = rng.random_range(1..=6);
            let k = rng.random_range(m..=m + 10);
            let letters: Vec<u8> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let w = Word::from_letters(&dna, letters).unwrap();
            let tables = build_tables(&w).unwrap();
            assert_eq!(
                pi_exact_with_tables(&tables, k).unwrap(),
                pi_exact_full_sum(&tables, k).unwrap(),
                "w={w} k={k}"
            );
        }
    }

    #[test]
    fn bounds_sandwich_with_cap() {
        let mut rng = StdRng::seed_from_u64(19);
        let dna = Alphabet::dna();
        for _ in 0..200 {
            let m = rng.random_range(1..=8);
            let k = rng.random_range(m..=m.max(20));
            let letters: Vec<u8> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let w = Word::from_letters(&dna, letters).unwrap();
            let tables = build_tables(&w).unwrap();
            let pi = pi_exact(&w, k).unwrap();
            let (lo, hi) = pi_bounds(&w, k).unwrap();
            let cap = trivial_cap(&tables, k).unwrap();
            assert!(BigUint::one() <= lo, "w={w} k={k}");
            assert!(lo <= pi, "w={w} k={k}");
            assert!(pi <= hi, "w={w} k={k}");
            assert!(hi <= cap, "w={w} k={k}");
        }
    }

    #[test]
    fn monotone_growth_off_the_greatest_letter() {
        let mut rng = StdRng::seed_from_u64(23);
        let dna = Alphabet::dna();
        for _ in 0..100 {
            let m = rng.random_range(1..=6);
            let mut letters: Vec<u8> = (0..m).map(|_| rng.random_range(0..4)).collect();
            letters[0] = rng.random_range(0..3); // avoid the greatest letter
            let w = Word::from_letters(&dna, letters).unwrap();
            let mut prev = pi_exact(&w, m).unwrap();
            for k in m + 1..=m + 8 {
                let next = pi_exact(&w, k).unwrap();
                assert!(next >= prev, "w={w} k={k}");
                prev = next;
            }
        }
    }

    #[test]
    fn normalized_point_extremes() {
        let tt = dna_word("TTT");
        let p = normalized_point(&tt, 9, &BigUint::one()).unwrap();
        assert_eq!((p.x, p.y), (0.0, 0.0));

        let aa = dna_word("AAA");
        let pi = pi_exact(&aa, 9).unwrap();
        let p = normalized_point(&aa, 9, &pi).unwrap();
        assert_eq!(p.x, 1.0);
        assert!(p.y > 0.0 && p.y <= 1.0);

        assert!(normalized_point(&aa, 9, &BigUint::zero()).is_err());
    }

    #[test]
    fn normalized_point_worked_value() {
        // direct evaluation of the formula on the k=16 bucket of ACACAC
        let w = dna_word("ACACAC");
        let pi = pi_exact(&w, 16).unwrap();
        assert_eq!(as_u64(&pi), 6337559);
        let p = normalized_point(&w, 16, &pi).unwrap();
        assert!((p.y - 0.963173200855974).abs() < 1e-9, "y={}", p.y);
        let x_expected = 3822.0 / 4095.0;
        assert!((p.x - x_expected).abs() < 1e-12);
    }

    #[test]
    fn relative_error_values() {
        let exact = BigUint::from(1043199u64);
        let lower = BigUint::from(969659u64);
        let upper = BigUint::from(1122932u64);
        let (em, ep) = relative_errors(&exact, &lower, &upper).unwrap();
        assert!((ep - 0.005314779754441).abs() < 1e-9, "eta_plus={ep}");
        assert!((em - 0.005275206456666).abs() < 1e-9, "eta_minus={em}");

        let (em0, _) = relative_errors(&exact, &exact, &upper).unwrap();
        assert_eq!(em0, 0.0);
        let (_, ep0) = relative_errors(&exact, &lower, &exact).unwrap();
        assert_eq!(ep0, 0.0);

        assert!(relative_errors(&BigUint::one(), &BigUint::one(), &BigUint::one()).is_err());
    }

    #[test]
    fn regression_recovers_exact_line() {
        let points: Vec<(f64, f64)> = (6..=30).map(|k| (k as f64, 0.5 * k as f64 + 1.0)).collect();
        let fit = fit_line(&points).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, Some(1.0));
        assert!(!fit.degenerate);
    }

    #[test]
    fn regression_residual_orthogonality() {
        let w = dna_word("ACACAC");
        let fit = regress_slope(&w, 6, 30).unwrap();
        let points: Vec<(f64, f64)> = (6..=30)
            .map(|k| (k as f64, log_base(&pi_exact(&w, k).unwrap(), 4)))
            .collect();
        let (mut s0, mut s1) = (0.0f64, 0.0f64);
        for (x, y) in points {
            let r = y - (fit.slope * x + fit.intercept);
            s0 += r;
            s1 += r * x;
        }
        assert!(s0.abs() < 1e-9, "sum residuals {s0}");
        assert!(s1.abs() < 1e-7, "sum residuals*k {s1}");
    }

    #[test]
    fn regression_on_real_buckets_is_nearly_linear() {
        let fit = regress_slope(&dna_word("ACACAC"), 6, 106).unwrap();
        assert!(fit.r_squared.unwrap() >= 0.99, "{fit:?}");
        assert!(fit.slope > 0.0);
    }

    #[test]
    fn regression_degenerate_for_greatest_letter_prefix() {
        let fit = regress_slope(&dna_word("TACGTA"), 6, 30).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, None);
    }

    #[test]
    fn small_census_counts_tight_bounds() {
        // tiny analogue of the bound-tightness census
        let dna = Alphabet::dna();
        let mut tight = 0usize;
        let mut equal = 0usize;
        let mut rows = 0usize;
        pi_partition(&dna, 2, 6, PartitionMode::Both, |row| {
            let pi = row.exact.as_ref().unwrap();
            let lo = row.lower.as_ref().unwrap();
            let hi = row.upper.as_ref().unwrap();
            assert!(lo <= pi && pi <= hi);
            if lo == hi {
                equal += 1;
                assert_eq!(row.word.letters()[0], 3, "only T-words collapse: {}", row.word);
            }
            if lo == pi || hi == pi {
                tight += 1;
            }
            rows += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(rows, 16);
        assert_eq!(equal, 4);
        assert!(tight >= equal);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn bounds_always_sandwich_the_exact_count(
                letters in proptest::collection::vec(0u8..4, 1..=6),
                extra in 0usize..10,
            ) {
                let dna = Alphabet::dna();
                let w = Word::from_letters(&dna, letters).unwrap();
                let k = w.len() + extra;
                let exact = pi_exact(&w, k).unwrap();
                let (lower, upper) = pi_bounds(&w, k).unwrap();
                let cap = trivial_cap(&build_tables(&w).unwrap(), k).unwrap();
                prop_assert!(BigUint::one() <= lower);
                prop_assert!(lower <= exact);
                prop_assert!(exact <= upper);
                prop_assert!(upper <= cap);
            }
        }
    }

    #[test]
    fn log_base_matches_f64_for_small_values() {
        for v in [1u64, 2, 3, 10, 65536, 1043199] {
            let b = BigUint::from(v);
            assert!((log_base(&b, 4) - (v as f64).log(4.0)).abs() < 1e-12);
        }
        // 2^200: exactly representable exponent arithmetic
        let big = BigUint::from(1u32) << 200;
        assert!((log_base(&big, 4) - 100.0).abs() < 1e-9);
    }
}
