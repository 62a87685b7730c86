//! Counting k-mers per lexicographic minimizer.
//!
//! For an ordered alphabet and a fixed minimizer length `m`, every k-mer is
//! assigned to the bucket of its smallest m-mer (leftmost on ties). This
//! crate computes, for a given bucket word `w`:
//!
//! - the exact bucket size over all `σ^k` k-mers ([`picount::pi_exact`]),
//! - cheap lower/upper bounds on it ([`picount::pi_bounds`]),
//! - the whole-partition census over every m-mer ([`picount::pi_partition`]),
//! - empirical bucket sizes observed in FASTA/FASTQ data ([`scan`]),
//! - and brute-force ground truth for all of the above ([`oracle`]).
//!
//! The exact count factors through two one-sided counting problems solved by
//! dynamic programming over an autocorrelation analysis of `w` (see
//! [`preprocess`], [`antemer`], [`postmer`]). All exact counts are
//! arbitrary-precision naturals.

pub mod alphabet;
pub mod antemer;
mod error;
pub mod oracle;
pub mod picount;
pub mod postmer;
pub mod preprocess;
pub mod scan;

pub use alphabet::{Alphabet, ExtLetter, Word};
pub use error::{Error, Result};
