//! Counting the words that can follow the minimizer.
//!
//! A postmer of length `beta` is a word whose every window is `>= w`. The
//! quantity consumed by the final assembly is the anchored row: postmers of
//! length `beta` that share a prefix of the full `m` letters with `w`, i.e.
//! words `w·z` all of whose windows are `>= w`.
//!
//! Rows containing a `<` in the autocorrelation matrix are forced to zero
//! once the word is long enough for the offending window to fit
//! ([`AutocorrTables::zero_threshold`]); the recursions below only describe
//! the cells before that cutoff, so the cutoff is applied explicitly.

use num_bigint::BigUint;
use num_traits::{CheckedSub, One, Zero};

use crate::alphabet::ExtLetter;
use crate::preprocess::AutocorrTables;

/// Dense postmer counts: `by_prefix(i, beta)` for `0 <= i <= m`, totals, and
/// the anchored row.
#[derive(Debug, Clone)]
pub struct PostmerTable {
    beta_limit: usize,
    grid: Vec<Vec<BigUint>>,
    totals: Vec<BigUint>,
    anchored: Vec<BigUint>,
}

impl PostmerTable {
    pub fn beta_limit(&self) -> usize {
        self.beta_limit
    }

    /// Total number of postmers of length `beta`.
    pub fn total(&self, beta: usize) -> &BigUint {
        &self.totals[beta]
    }

    /// Postmers of length `beta` sharing a prefix of exactly `i` letters
    /// with the minimizer, `0 <= i <= m`.
    pub fn by_prefix(&self, i: usize, beta: usize) -> &BigUint {
        &self.grid[i][beta]
    }

    /// Words `w·z` of total length `beta` whose windows are all `>= w`.
    pub fn anchored(&self, beta: usize) -> &BigUint {
        &self.anchored[beta]
    }
}

/// Fill the stratified postmer grid up to length `beta_limit`.
/// O(beta_limit·m²) time, O(beta_limit·m) space.
pub fn compute_postmers(tables: &AutocorrTables, beta_limit: usize) -> PostmerTable {
    let m = tables.m();
    let sigma = tables.sigma();
    let zero_from: Vec<Option<usize>> = (1..=m).map(|i| tables.zero_threshold(i)).collect();

    let mut grid: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); beta_limit + 1]; m + 1];
    let mut totals: Vec<BigUint> = Vec::with_capacity(beta_limit + 1);

    for beta in 0..=beta_limit {
        for i in 0..=m {
            let dead = i >= 1 && zero_from[i - 1].is_some_and(|z| beta >= z);
            let value = if i > beta || dead {
                BigUint::zero()
            } else if beta < m {
                // No window fits yet; only the shared-prefix structure counts.
                if i == beta {
                    BigUint::one()
                } else if i == 0 {
                    &totals[beta - 1] * (sigma as u64 - 1)
                } else {
                    let mut value =
                        &totals[beta - (i + 1)] * (tables.free_letters(i).len() as u64);
                    for &a in tables.restart_letters(i) {
                        let offset = tables.restart_offset(i, a);
                        let shorter = beta + 1 - offset;
                        for row in grid.iter().take(shorter.min(m) + 1).skip(i + 2 - offset) {
                            value += &row[shorter];
                        }
                    }
                    value
                }
            } else if beta == m {
                // The word is a single window that must be >= w.
                if i == m {
                    BigUint::one()
                } else {
                    let choices = tables.phi(tables.letter(i + 1));
                    BigUint::from(choices) * BigUint::from(sigma).pow((m - (i + 1)) as u32)
                }
            } else if i == 0 {
                &totals[beta - 1] * (tables.phi(tables.letter(1)) as u64)
            } else {
                let greatest = tables.max_restart_letter_at(i, beta);
                let next = tables.letter_or_epsilon(i + 1);
                let choices = tables.phi_ext(next).min(tables.phi_ext(greatest)) as u64;
                let mut value = &totals[beta - (i + 1)] * choices;
                if greatest > next {
                    let ExtLetter::Letter(l) = greatest else { unreachable!() };
                    let offset = tables.restart_offset_at(i, l, beta);
                    let shorter = beta + 1 - offset;
                    for row in grid.iter().take(m + 1).skip(i + 2 - offset) {
                        value += &row[shorter];
                    }
                }
                value
            };
            grid[i][beta] = value;
        }
        let mut total = BigUint::zero();
        for row in &grid {
            total += &row[beta];
        }
        totals.push(total);
    }

    let anchored = grid[m].clone();
    PostmerTable { beta_limit, grid, totals, anchored }
}

/// Lower/upper envelopes of the postmer totals and of the anchored row.
/// O(beta_limit·m) time, O(beta_limit) space.
#[derive(Debug, Clone)]
pub struct PostmerBounds {
    m: usize,
    lower: Vec<BigUint>,
    upper: Vec<BigUint>,
    anchored_lower: Vec<BigUint>,
    anchored_upper: Vec<BigUint>,
}

impl PostmerBounds {
    pub fn beta_limit(&self) -> usize {
        self.lower.len() - 1
    }

    pub fn lower(&self, beta: usize) -> &BigUint {
        &self.lower[beta]
    }

    pub fn upper(&self, beta: usize) -> &BigUint {
        &self.upper[beta]
    }

    /// Lower envelope of the anchored row; defined from `beta = m` on.
    pub fn anchored_lower(&self, beta: usize) -> &BigUint {
        debug_assert!(beta >= self.m);
        &self.anchored_lower[beta]
    }

    pub fn anchored_upper(&self, beta: usize) -> &BigUint {
        debug_assert!(beta >= self.m);
        &self.anchored_upper[beta]
    }
}

pub fn compute_postmer_bounds(tables: &AutocorrTables, beta_limit: usize) -> PostmerBounds {
    let m = tables.m();
    let sigma = tables.sigma();
    let phi_first = tables.phi(tables.letter(1)) as u64;
    // Rows past their zero cutoff contribute nothing, exactly; folding that
    // into both envelopes keeps them true bounds. The cutoffs all sit beyond
    // the lengths the bucket-bound assembly reads, so this only tightens the
    // sequences past that point.
    let zero_from: Vec<Option<usize>> = (1..=m).map(|i| tables.zero_threshold(i)).collect();

    let mut lower: Vec<BigUint> = Vec::with_capacity(beta_limit + 1);
    let mut upper: Vec<BigUint> = Vec::with_capacity(beta_limit + 1);
    for beta in 0..=beta_limit.min(m.saturating_sub(1)) {
        let v = BigUint::from(sigma).pow(beta as u32);
        lower.push(v.clone());
        upper.push(v);
    }
    if beta_limit >= m {
        let rank_based = BigUint::one() + tables.word().rank_phi().expect("m >= 1");
        lower.push(rank_based.clone());
        upper.push(rank_based);
    }

    for beta in (m + 1)..=beta_limit {
        let mut lo = &lower[beta - 1] * phi_first;
        let mut hi = &upper[beta - 1] * phi_first;
        for i in 1..=m {
            if zero_from[i - 1].is_some_and(|z| beta >= z) {
                continue;
            }
            let greatest = tables.max_restart_letter_at(i, beta);
            let next = tables.letter_or_epsilon(i + 1);
            let choices = tables.phi_ext(next).min(tables.phi_ext(greatest)) as u64;
            lo += &lower[beta - (i + 1)] * choices;
            hi += &upper[beta - (i + 1)] * choices;
            if greatest > next {
                let ExtLetter::Letter(l) = greatest else { unreachable!() };
                let offset = tables.restart_offset_at(i, l, beta);
                let head = upper[beta + 1 - offset].clone();
                let tail = &upper[beta - offset] * phi_first;
                hi += head
                    .checked_sub(&tail)
                    .expect("upper envelope dominates its own first term");
            }
        }
        lower.push(lo);
        upper.push(hi);
    }

    // Anchored envelopes derive from the totals' envelopes in O(1) per entry.
    // The zero cutoff of the anchored row is known exactly, so both
    // envelopes are pinned to zero there.
    let anchored_cutoff = tables.zero_threshold(m);
    let mut anchored_lower = vec![BigUint::zero(); beta_limit + 1];
    let mut anchored_upper = vec![BigUint::zero(); beta_limit + 1];
    if beta_limit >= m {
        anchored_lower[m] = BigUint::one();
        anchored_upper[m] = BigUint::one();
    }
    for beta in (m + 1)..=beta_limit {
        if anchored_cutoff.is_some_and(|z| beta >= z) {
            continue;
        }
        let greatest = tables.max_restart_letter_at(m, beta);
        let phi_g = tables.phi_ext(greatest) as u64;
        anchored_lower[beta] = &lower[beta - (m + 1)] * phi_g;
        let mut hi = &upper[beta - (m + 1)] * phi_g;
        if let ExtLetter::Letter(l) = greatest {
            let offset = tables.restart_offset_at(m, l, beta);
            let head = upper[beta + 1 - offset].clone();
            let tail = &upper[beta - offset] * phi_first;
            hi += head
                .checked_sub(&tail)
                .expect("upper envelope dominates its own first term");
        }
        anchored_upper[beta] = hi;
    }

    PostmerBounds { m, lower, upper, anchored_lower, anchored_upper }
}
