//! Ordered alphabets and words over them.
//!
//! The order of the symbol string given to [`Alphabet::new`] IS the total
//! order used everywhere: letters are stored as indices into it, so a
//! non-standard order such as `CATG` costs nothing at comparison time.
//! Display symbols only matter at I/O boundaries.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// An ordered set of distinct symbols, optionally with a complement
/// involution (for DNA: A↔T, C↔G).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<char>,
    complement: Option<Vec<u8>>,
}

impl Alphabet {
    /// Build an alphabet from its symbols in increasing order.
    pub fn new(symbols: &str) -> Result<Self> {
        let symbols: Vec<char> = symbols.chars().collect();
        if symbols.len() < 2 {
            return Err(Error::invalid("alphabet needs at least 2 symbols"));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::invalid("alphabet is limited to 255 symbols"));
        }
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(Error::invalid(format!("duplicate symbol '{c}'")));
            }
        }
        Ok(Alphabet { symbols, complement: None })
    }

    /// Build an alphabet with a complement involution given as comma-separated
    /// symbol pairs, e.g. `"AT,CG"`. A single-symbol group is a fixed point.
    /// Every symbol must be covered.
    pub fn with_complement(symbols: &str, pairs: &str) -> Result<Self> {
        let mut alphabet = Self::new(symbols)?;
        let mut map: Vec<Option<u8>> = vec![None; alphabet.size()];
        for group in pairs.split(',') {
            let group: Vec<char> = group.chars().collect();
            let (a, b) = match group.as_slice() {
                [a] => (*a, *a),
                [a, b] => (*a, *b),
                _ => {
                    return Err(Error::invalid(format!(
                        "complement group '{}' must have 1 or 2 symbols",
                        group.iter().collect::<String>()
                    )))
                }
            };
            let ia = alphabet.index(a)?;
            let ib = alphabet.index(b)?;
            for (x, y) in [(ia, ib), (ib, ia)] {
                match map[x as usize] {
                    Some(prev) if prev != y => {
                        return Err(Error::invalid(format!(
                            "symbol '{}' appears in two complement groups",
                            alphabet.symbol(x)
                        )))
                    }
                    _ => map[x as usize] = Some(y),
                }
            }
        }
        let complement: Option<Vec<u8>> = map.into_iter().collect();
        match complement {
            Some(c) => {
                alphabet.complement = Some(c);
                Ok(alphabet)
            }
            None => Err(Error::invalid("complement pairs must cover every symbol")),
        }
    }

    /// The DNA alphabet `A < C < G < T` with the usual complement.
    pub fn dna() -> Arc<Self> {
        Arc::new(Self::with_complement("ACGT", "AT,CG").expect("DNA alphabet is well formed"))
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    /// The greatest letter of the alphabet.
    pub fn max_letter(&self) -> u8 {
        (self.symbols.len() - 1) as u8
    }

    /// Letter index of a symbol; falls back to its ASCII uppercase form so
    /// soft-masked sequence data parses.
    pub fn index(&self, symbol: char) -> Result<u8> {
        let pos = self
            .symbols
            .iter()
            .position(|&s| s == symbol)
            .or_else(|| {
                let up = symbol.to_ascii_uppercase();
                self.symbols.iter().position(|&s| s == up)
            });
        match pos {
            Some(i) => Ok(i as u8),
            None => Err(Error::invalid(format!("symbol '{symbol}' is not in the alphabet"))),
        }
    }

    /// Like [`Alphabet::index`] but without the error path, for scanners that
    /// skip invalid symbols instead of failing.
    pub fn try_index(&self, symbol: char) -> Option<u8> {
        self.index(symbol).ok()
    }

    pub fn symbol(&self, letter: u8) -> char {
        self.symbols[letter as usize]
    }

    pub fn complement_letter(&self, letter: u8) -> Result<u8> {
        match &self.complement {
            Some(map) => Ok(map[letter as usize]),
            None => Err(Error::Unsupported(
                "alphabet has no complement involution configured".into(),
            )),
        }
    }

    pub fn has_complement(&self) -> bool {
        self.complement.is_some()
    }

    /// Number of letters strictly greater than `a`; `σ` for ε. Restricted to
    /// Σ ∪ {ε} this is a bijection onto [0, σ].
    pub fn phi_gt(&self, a: ExtLetter) -> Result<usize> {
        match a {
            ExtLetter::Epsilon => Ok(self.size()),
            ExtLetter::Letter(l) => {
                if (l as usize) < self.size() {
                    Ok(self.size() - 1 - l as usize)
                } else {
                    Err(Error::invalid(format!("letter index {l} out of range")))
                }
            }
        }
    }

    pub(crate) fn phi_letter(&self, letter: u8) -> usize {
        self.size() - 1 - letter as usize
    }
}

/// A letter extended with ε, which compares below every real letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtLetter {
    Epsilon,
    Letter(u8),
}

impl ExtLetter {
    pub fn is_epsilon(self) -> bool {
        self == ExtLetter::Epsilon
    }
}

/// A word over an [`Alphabet`], stored as letter indices. Length 0 is ε.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    letters: Vec<u8>,
}

impl Word {
    pub fn from_letters(alphabet: &Arc<Alphabet>, letters: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l as usize >= alphabet.size()) {
            return Err(Error::invalid(format!(
                "letter index {bad} out of range for alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(Word { alphabet: Arc::clone(alphabet), letters })
    }

    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self> {
        let letters = text
            .chars()
            .map(|c| alphabet.index(c))
            .collect::<Result<Vec<u8>>>()?;
        Ok(Word { alphabet: Arc::clone(alphabet), letters })
    }

    /// The `rank`-th word of length `m` in increasing lexicographic order.
    pub fn unrank(alphabet: &Arc<Alphabet>, m: usize, rank: u64) -> Self {
        Word {
            alphabet: Arc::clone(alphabet),
            letters: decode_base_sigma(alphabet.size(), m, rank),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Total lexicographic order; a proper prefix is smaller. Errors when the
    /// two words live over different alphabets.
    pub fn lex_compare(&self, other: &Word) -> Result<Ordering> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::invalid("cannot compare words over different alphabets"));
        }
        Ok(self.letters.cmp(&other.letters))
    }

    /// The base-σ number with digits `φ_>(a_1) … φ_>(a_m)`; equals the count
    /// of equal-length words strictly greater than `self`.
    pub fn rank_phi(&self) -> Result<BigUint> {
        if self.letters.is_empty() {
            return Err(Error::invalid("rank is undefined for the empty word"));
        }
        let sigma = BigUint::from(self.alphabet.size());
        let mut acc = BigUint::from(0u32);
        for &a in &self.letters {
            acc = acc * &sigma + BigUint::from(self.alphabet.phi_letter(a));
        }
        Ok(acc)
    }

    /// Reversed, letter-complemented word; requires a complement involution.
    pub fn reverse_complement(&self) -> Result<Word> {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|&l| self.alphabet.complement_letter(l))
            .collect::<Result<Vec<u8>>>()?;
        Ok(Word { alphabet: Arc::clone(&self.alphabet), letters })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", self.alphabet.symbol(l))?;
        }
        Ok(())
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn decode_base_sigma(sigma: usize, m: usize, mut rank: u64) -> Vec<u8> {
    let mut letters = vec![0u8; m];
    for slot in letters.iter_mut().rev() {
        *slot = (rank % sigma as u64) as u8;
        rank /= sigma as u64;
    }
    letters
}

/// All `σ^m` words of length `m` in increasing lexicographic order.
pub fn enumerate_words(alphabet: &Arc<Alphabet>, m: usize) -> WordEnumerator {
    WordEnumerator {
        alphabet: Arc::clone(alphabet),
        current: vec![0; m],
        done: false,
    }
}

pub struct WordEnumerator {
    alphabet: Arc<Alphabet>,
    current: Vec<u8>,
    done: bool,
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let word = Word {
            alphabet: Arc::clone(&self.alphabet),
            letters: self.current.clone(),
        };
        // odometer increment
        let max = self.alphabet.max_letter();
        let mut pos = self.current.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.current[pos] < max {
                self.current[pos] += 1;
                break;
            }
            self.current[pos] = 0;
        }
        Some(word)
    }
}
