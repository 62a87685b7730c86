//! Counting the words that can precede the minimizer.
//!
//! An antemer of length `alpha` is a word `y` such that every window of
//! `y·w` except the final one (which is `w` itself) is strictly greater than
//! `w`. The table stratifies counts by the exact length of the prefix shared
//! with `w`; rows at or past the prefix limit are identically zero and are
//! not stored.

use num_bigint::BigUint;
use num_traits::{CheckedSub, One, Zero};
use std::cmp::Ordering;

use crate::preprocess::AutocorrTables;

/// Dense antemer counts: `by_prefix(i, alpha)` for `0 <= i < prefix_limit`,
/// plus the totals over `i`.
#[derive(Debug, Clone)]
pub struct AntemerTable {
    max_len: usize,
    grid: Vec<Vec<BigUint>>,
    totals: Vec<BigUint>,
    zero: BigUint,
}

impl AntemerTable {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of stratified rows stored (the prefix limit of the minimizer).
    pub fn prefix_rows(&self) -> usize {
        self.grid.len()
    }

    /// Total number of antemers of length `alpha`.
    pub fn total(&self, alpha: usize) -> &BigUint {
        &self.totals[alpha]
    }

    /// Antemers of length `alpha` sharing a prefix of exactly `i` letters
    /// with the minimizer. Zero for `i` at or past the prefix limit.
    pub fn by_prefix(&self, i: usize, alpha: usize) -> &BigUint {
        self.grid.get(i).map_or(&self.zero, |row| &row[alpha])
    }
}

/// Lower/upper envelopes of the antemer totals, computable in O(alpha·m)
/// time and O(alpha) space instead of the full grid.
#[derive(Debug, Clone)]
pub struct AntemerBounds {
    lower: Vec<BigUint>,
    upper: Vec<BigUint>,
}

impl AntemerBounds {
    pub fn lower(&self, alpha: usize) -> &BigUint {
        &self.lower[alpha]
    }

    pub fn upper(&self, alpha: usize) -> &BigUint {
        &self.upper[alpha]
    }

    pub fn max_len(&self) -> usize {
        self.lower.len() - 1
    }
}

/// Fill the stratified antemer grid up to length `max_len`.
///
/// Cells are filled in increasing `alpha`; every recursion reads strictly
/// smaller lengths, so one pass suffices. O(max_len·m²) time, O(max_len·m)
/// space.
pub fn compute_antemers(tables: &AutocorrTables, max_len: usize) -> AntemerTable {
    let rows = tables.prefix_limit();
    let mut grid: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); max_len + 1]; rows];
    let mut totals: Vec<BigUint> = Vec::with_capacity(max_len + 1);

    let phi_first = tables.phi(tables.letter(1)) as u64;

    for alpha in 0..=max_len {
        for i in 0..rows {
            let value = match i.cmp(&alpha) {
                Ordering::Greater => BigUint::zero(),
                Ordering::Equal => {
                    if i == 0 || fixed_antemer_is_valid(tables, i) {
                        BigUint::one()
                    } else {
                        BigUint::zero()
                    }
                }
                Ordering::Less => {
                    if i == 0 {
                        &totals[alpha - 1] * phi_first
                    } else {
                        let greatest = tables.max_restart_letter(i);
                        let next = tables.letter(i + 1);
                        let choices =
                            tables.phi(greatest).min(tables.phi(next)) as u64;
                        let mut value = &totals[alpha - (i + 1)] * choices;
                        if greatest > next {
                            let offset = tables.restart_offset(i, greatest);
                            let shorter = alpha + 1 - offset;
                            for row in grid.iter().take(rows).skip(i + 2 - offset) {
                                value += &row[shorter];
                            }
                        }
                        value
                    }
                }
            };
            grid[i][alpha] = value;
        }
        let mut total = BigUint::zero();
        for row in &grid {
            total += &row[alpha];
        }
        totals.push(total);
    }

    AntemerTable { max_len, grid, totals, zero: BigUint::zero() }
}

/// Whether the single candidate antemer of length `i` equal to `a_1…a_i`
/// is admissible: every window of `a_1…a_i·w` but the last must beat `w`.
fn fixed_antemer_is_valid(tables: &AutocorrTables, i: usize) -> bool {
    let m = tables.m();
    (1..=i).all(|j| match tables.cmp(i, j) {
        Ordering::Greater => true,
        Ordering::Equal => tables.cmp(m, i - j + 2) == Ordering::Less,
        Ordering::Less => false,
    })
}

/// Compute the antemer bound sequences up to length `max_len`.
pub fn compute_antemer_bounds(tables: &AutocorrTables, max_len: usize) -> AntemerBounds {
    let rows = tables.prefix_limit();
    let phi_first = tables.phi(tables.letter(1)) as u64;

    struct Term {
        choices: u64,
        restart: Option<usize>,
    }
    let terms: Vec<Term> = (1..rows)
        .map(|i| {
            let greatest = tables.max_restart_letter(i);
            let next = tables.letter(i + 1);
            Term {
                choices: tables.phi(greatest).min(tables.phi(next)) as u64,
                restart: (greatest > next).then(|| tables.restart_offset(i, greatest)),
            }
        })
        .collect();

    let mut lower = vec![BigUint::one()];
    let mut upper = vec![BigUint::one()];
    for alpha in 1..=max_len {
        let mut lo = &lower[alpha - 1] * phi_first;
        let mut hi = &upper[alpha - 1] * phi_first;
        for (i, term) in terms.iter().enumerate().map(|(i0, t)| (i0 + 1, t)) {
            if alpha > i {
                lo += &lower[alpha - (i + 1)] * term.choices;
                hi += &upper[alpha - (i + 1)] * term.choices;
            }
            if let Some(offset) = term.restart {
                // surplus bounded by A⁺(alpha-offset+1) - phi₁·A⁺(alpha-offset)
                if alpha >= offset - 1 {
                    let head = upper[alpha + 1 - offset].clone();
                    let tail = if alpha >= offset {
                        &upper[alpha - offset] * phi_first
                    } else {
                        BigUint::zero()
                    };
                    hi += head
                        .checked_sub(&tail)
                        .expect("upper envelope dominates its own first term");
                }
            }
        }
        lower.push(lo);
        upper.push(hi);
    }

    AntemerBounds { lower, upper }
}
