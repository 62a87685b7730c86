//! Per-minimizer precomputation.
//!
//! Everything the counting recursions need is derived from one
//! autocorrelation pass over the word `w = a_1…a_m`: a lower-triangular
//! matrix comparing each substring `a_j…a_i` against the equal-length prefix
//! of `w`, plus the tables read off it (restart offsets, letter partitions,
//! and their length-gated variants used on the suffix side).
//!
//! Indices `i`, `j` in this module are 1-based, matching the usual
//! presentation of autocorrelation tables.

use std::cmp::Ordering;

use crate::alphabet::{ExtLetter, Word};
use crate::error::{Error, Result};

/// A step function value gated by a minimum word length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GatedOffset {
    /// Smallest `beta` at which the offset applies.
    pub threshold: usize,
    pub offset: usize,
}

/// Piecewise-constant, nondecreasing map `beta -> ExtLetter`, stored as
/// breakpoints. At most σ+1 pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterSteps {
    steps: Vec<(usize, ExtLetter)>,
}

impl LetterSteps {
    pub fn eval(&self, beta: usize) -> ExtLetter {
        let mut value = ExtLetter::Epsilon;
        for &(threshold, letter) in &self.steps {
            if beta < threshold {
                break;
            }
            value = letter;
        }
        value
    }

    /// Breakpoints as `(threshold, value-from-threshold-on)` pairs.
    pub fn pieces(&self) -> &[(usize, ExtLetter)] {
        &self.steps
    }
}

/// All autocorrelation-derived tables of one minimizer, immutable after
/// construction. Built in O(m²) time and space by [`build_tables`].
#[derive(Debug, Clone)]
pub struct AutocorrTables {
    word: Word,
    phi: Vec<usize>,
    /// `rows[i-1][j-1]`: how `a_j…a_i` compares to `a_1…a_{i-j+1}`.
    rows: Vec<Vec<Ordering>>,
    prefix_limit: usize,
    beta_max_raw: Option<usize>,
    /// `restart[i-1][a]`: length of the prefix restart triggered by extending
    /// a length-`i` common prefix with letter `a`; 0 when extension by `a`
    /// leaves no prefix alive.
    restart: Vec<Vec<usize>>,
    max_restart_letter: Vec<u8>,
    free_letters: Vec<Vec<u8>>,
    restart_letters: Vec<Vec<u8>>,
    gated_restart: Vec<Vec<Option<GatedOffset>>>,
    gated_max_letter: Vec<LetterSteps>,
}

/// Run the autocorrelation pass over `w` and derive every table.
pub fn build_tables(w: &Word) -> Result<AutocorrTables> {
    let m = w.len();
    if m == 0 {
        return Err(Error::invalid("minimizer must have length >= 1"));
    }
    let sigma = w.alphabet().size();
    let a = w.letters(); // 0-based

    let mut rows: Vec<Vec<Ordering>> = (1..=m).map(|i| vec![Ordering::Equal; i]).collect();
    let mut prefix_limit = m;
    let mut beta_max_raw: Option<usize> = None;
    let mut restart: Vec<Vec<usize>> = vec![vec![0; sigma]; m];

    for j in 2..=m {
        // Column j compares a_j…a_i against a_1…a_{i-j+1}; while the two are
        // equal the verdict extends letter by letter, and once it tips it
        // stays fixed for every longer i.
        let mut decided: Option<Ordering> = None;
        for i in j..=m {
            let cell = match decided {
                Some(o) => o,
                None => a[i - 1].cmp(&a[i - j]),
            };
            rows[i - 1][j - 1] = cell;
            match cell {
                Ordering::Equal => {
                    let continuation = a[i - j + 1]; // a_{i-j+2}
                    let slot = &mut restart[i - 1][continuation as usize];
                    if *slot == 0 {
                        *slot = j;
                    }
                }
                Ordering::Less => {
                    if decided.is_none() {
                        decided = Some(cell);
                        prefix_limit = prefix_limit.min(i);
                        beta_max_raw = Some(beta_max_raw.map_or(j - 2, |b| b.min(j - 2)));
                    }
                }
                Ordering::Greater => {
                    if decided.is_none() {
                        decided = Some(cell);
                    }
                }
            }
        }
    }

    // Letters that never continue an inner prefix still restart a fresh one
    // when they equal a_1.
    for (i, row) in restart.iter_mut().enumerate() {
        let first = a[0] as usize;
        if row[first] == 0 {
            row[first] = i + 2; // (i+1)+1 in 1-based terms
        }
    }

    let max_restart_letter: Vec<u8> = restart
        .iter()
        .map(|row| {
            (0..sigma)
                .rev()
                .find(|&l| row[l] != 0)
                .expect("the first letter of w always restarts") as u8
        })
        .collect();

    let mut free_letters = Vec::with_capacity(m);
    let mut restart_letters = Vec::with_capacity(m);
    for i in 1..=m {
        let excluded = if i < m { Some(a[i]) } else { None };
        let mut free = Vec::new();
        let mut restarting = Vec::new();
        for l in 0..sigma as u8 {
            if excluded == Some(l) {
                continue;
            }
            if restart[i - 1][l as usize] == 0 {
                free.push(l);
            } else {
                restarting.push(l);
            }
        }
        free_letters.push(free);
        restart_letters.push(restarting);
    }

    let gated_restart: Vec<Vec<Option<GatedOffset>>> = restart
        .iter()
        .map(|row| {
            row.iter()
                .map(|&t| (t != 0).then(|| GatedOffset { threshold: m - 1 + t, offset: t }))
                .collect()
        })
        .collect();

    let gated_max_letter: Vec<LetterSteps> = (0..m)
        .map(|i0| {
            let mut pairs: Vec<(usize, u8)> = (0..sigma as u8)
                .filter(|&l| restart[i0][l as usize] != 0)
                .map(|l| (m - 1 + restart[i0][l as usize], l))
                .collect();
            pairs.sort_unstable();
            let mut steps = vec![(0usize, ExtLetter::Epsilon)];
            let mut best = ExtLetter::Epsilon;
            for (threshold, letter) in pairs {
                let candidate = ExtLetter::Letter(letter);
                if candidate > best {
                    best = candidate;
                    steps.push((threshold, best));
                }
            }
            LetterSteps { steps }
        })
        .collect();

    Ok(AutocorrTables {
        phi: (0..sigma as u8).map(|l| sigma - 1 - l as usize).collect(),
        word: w.clone(),
        rows,
        prefix_limit,
        beta_max_raw,
        restart,
        max_restart_letter,
        free_letters,
        restart_letters,
        gated_restart,
        gated_max_letter,
    })
}

impl AutocorrTables {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn m(&self) -> usize {
        self.word.len()
    }

    pub fn sigma(&self) -> usize {
        self.phi.len()
    }

    /// 1-based letter `a_i` of the minimizer.
    pub fn letter(&self, i: usize) -> u8 {
        self.word.letters()[i - 1]
    }

    /// `a_i` extended with ε past the end of the word.
    pub fn letter_or_epsilon(&self, i: usize) -> ExtLetter {
        if i <= self.m() {
            ExtLetter::Letter(self.letter(i))
        } else {
            ExtLetter::Epsilon
        }
    }

    /// Autocorrelation cell: how `a_j…a_i` compares to `a_1…a_{i-j+1}`,
    /// for `1 <= j <= i <= m`.
    pub fn cmp(&self, i: usize, j: usize) -> Ordering {
        self.rows[i - 1][j - 1]
    }

    /// Smallest prefix length at which a `<` appears (else m): no antemer can
    /// share a prefix of that length or more with the minimizer.
    pub fn prefix_limit(&self) -> usize {
        self.prefix_limit
    }

    /// k-independent part of `beta_max`; `None` means unbounded.
    pub fn beta_max_raw(&self) -> Option<usize> {
        self.beta_max_raw
    }

    /// Largest number of free letters allowed after the minimizer in a k-mer.
    pub fn beta_max(&self, k: usize) -> Result<usize> {
        if k < self.m() {
            return Err(Error::invalid(format!("k={k} must be >= m={}", self.m())));
        }
        let free = k - self.m();
        Ok(match self.beta_max_raw {
            Some(raw) => raw.min(free),
            None => free,
        })
    }

    /// Restart offset triggered by extending a length-`i` common prefix with
    /// letter `a` (0 when none). 1-based `i`.
    pub fn restart_offset(&self, i: usize, a: u8) -> usize {
        self.restart[i - 1][a as usize]
    }

    /// Greatest letter with a nonzero restart offset at prefix length `i`.
    pub fn max_restart_letter(&self, i: usize) -> u8 {
        self.max_restart_letter[i - 1]
    }

    /// Letters (other than `a_{i+1}`) whose extension leaves no prefix alive.
    pub fn free_letters(&self, i: usize) -> &[u8] {
        &self.free_letters[i - 1]
    }

    /// Letters (other than `a_{i+1}`) whose extension restarts a prefix.
    pub fn restart_letters(&self, i: usize) -> &[u8] {
        &self.restart_letters[i - 1]
    }

    /// Length-gated restart offset: the plain offset once the word is long
    /// enough for the corresponding constraint to fit, 0 below.
    pub fn restart_offset_at(&self, i: usize, a: u8, beta: usize) -> usize {
        match self.gated_restart[i - 1][a as usize] {
            Some(g) if beta >= g.threshold => g.offset,
            _ => 0,
        }
    }

    pub fn gated_restart(&self, i: usize, a: u8) -> Option<GatedOffset> {
        self.gated_restart[i - 1][a as usize]
    }

    /// Greatest letter whose gated restart is active at length `beta`
    /// (ε when none is).
    pub fn max_restart_letter_at(&self, i: usize, beta: usize) -> ExtLetter {
        self.gated_max_letter[i - 1].eval(beta)
    }

    pub fn max_restart_letter_steps(&self, i: usize) -> &LetterSteps {
        &self.gated_max_letter[i - 1]
    }

    /// Smallest word length from which row `i` of the suffix DP is forced to
    /// zero by a `<` cell, if any (`m - 1 + j` for the leftmost `<` at
    /// column `j >= 2`).
    pub fn zero_threshold(&self, i: usize) -> Option<usize> {
        (2..=i)
            .find(|&j| self.cmp(i, j) == Ordering::Less)
            .map(|j| self.m() - 1 + j)
    }

    pub fn phi(&self, a: u8) -> usize {
        self.phi[a as usize]
    }

    pub fn phi_ext(&self, a: ExtLetter) -> usize {
        match a {
            ExtLetter::Epsilon => self.sigma(),
            ExtLetter::Letter(l) => self.phi[l as usize],
        }
    }

    /// Multi-line debug rendering of the tables, aligned like the usual
    /// matrix presentation.
    pub fn render(&self) -> String {
        use std::fmt::Write;
        let m = self.m();
        let ab = self.word.alphabet();
        let mut out = String::new();
        writeln!(out, "word: {}  (m={}, sigma={})", self.word, m, self.sigma()).unwrap();
        writeln!(
            out,
            "prefix_limit: {}   beta_max_raw: {}",
            self.prefix_limit,
            match self.beta_max_raw {
                Some(b) => b.to_string(),
                None => "inf".into(),
            }
        )
        .unwrap();
        writeln!(out, "autocorrelation matrix (rows i=1..m):").unwrap();
        for i in 1..=m {
            let mut line = format!("  {i:>3} |");
            for j in 1..=i {
                let c = match self.cmp(i, j) {
                    Ordering::Less => '<',
                    Ordering::Equal => '=',
                    Ordering::Greater => '>',
                };
                line.push(' ');
                line.push(c);
            }
            writeln!(out, "{line}").unwrap();
        }
        let header: String = (0..self.sigma() as u8)
            .map(|l| format!("{:>4}", ab.symbol(l)))
            .collect();
        writeln!(out, "restart offsets (rows i=1..m):{header}").unwrap();
        for i in 1..=m {
            let mut line = format!("  {i:>3} |");
            for l in 0..self.sigma() as u8 {
                line.push_str(&format!("{:>4}", self.restart_offset(i, l)));
            }
            line.push_str(&format!(
                "   max: {}",
                ab.symbol(self.max_restart_letter(i))
            ));
            writeln!(out, "{line}").unwrap();
        }
        writeln!(out, "gated max letter (threshold:value pieces):").unwrap();
        for i in 1..=m {
            let pieces: Vec<String> = self.max_restart_letter_steps(i)
                .pieces()
                .iter()
                .map(|&(t, l)| {
                    let sym = match l {
                        ExtLetter::Epsilon => "eps".to_string(),
                        ExtLetter::Letter(x) => ab.symbol(x).to_string(),
                    };
                    format!("{t}:{sym}")
                })
                .collect();
            writeln!(out, "  {i:>3} | {}", pieces.join("  ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{enumerate_words, Alphabet};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dna_tables(s: &str) -> AutocorrTables {
        build_tables(&Word::parse(&Alphabet::dna(), s).unwrap()).unwrap()
    }

    fn row(t: &AutocorrTables, i: usize) -> String {
        (1..=i)
            .map(|j| match t.cmp(i, j) {
                Ordering::Less => '<',
                Ordering::Equal => '=',
                Ordering::Greater => '>',
            })
            .collect()
    }

    #[test]
    fn autocorrelation_matrix_examples() {
        let t1 = dna_tables("ACACAA");
        assert_eq!(row(&t1, 1), "=");
        assert_eq!(row(&t1, 2), "=>");
        assert_eq!(row(&t1, 3), "=>=");
        assert_eq!(row(&t1, 4), "=>=>");
        assert_eq!(row(&t1, 5), "=>=>=");
        assert_eq!(row(&t1, 6), "=><><=");

        let t2 = dna_tables("ACACAC");
        assert_eq!(row(&t2, 6), "=>=>=>");
    }

    #[test]
    fn prefix_limit_and_beta_max_examples() {
        let t1 = dna_tables("ACACAA");
        assert_eq!(t1.prefix_limit(), 6);
        assert_eq!(t1.beta_max_raw(), Some(1));
        assert_eq!(t1.beta_max(12).unwrap(), 1);

        let t2 = dna_tables("ACACAC");
        assert_eq!(t2.prefix_limit(), 6);
        assert_eq!(t2.beta_max_raw(), None);
        assert_eq!(t2.beta_max(12).unwrap(), 6);

        // min with k-m
        assert_eq!(t1.beta_max(6).unwrap(), 0);
        assert!(t1.beta_max(5).is_err());
    }

    #[test]
    fn restart_offsets_match_worked_examples() {
        // rows i=1..6, columns A,C,G,T
        let t1 = dna_tables("ACACAA");
        let expected1 = [
            [2, 0, 0, 0],
            [3, 0, 0, 0],
            [4, 3, 0, 0],
            [3, 0, 0, 0],
            [6, 3, 0, 0],
            [7, 6, 0, 0],
        ];
        for i in 1..=6 {
            for a in 0..4u8 {
                assert_eq!(
                    t1.restart_offset(i, a),
                    expected1[i - 1][a as usize],
                    "ACACAA i={i} a={a}"
                );
            }
        }

        let t2 = dna_tables("ACACAC");
        let expected2 = [
            [2, 0, 0, 0],
            [3, 0, 0, 0],
            [4, 3, 0, 0],
            [3, 0, 0, 0],
            [6, 3, 0, 0],
            [3, 0, 0, 0],
        ];
        for i in 1..=6 {
            for a in 0..4u8 {
                assert_eq!(
                    t2.restart_offset(i, a),
                    expected2[i - 1][a as usize],
                    "ACACAC i={i} a={a}"
                );
            }
        }
    }

    #[test]
    fn max_restart_letter_examples() {
        let sym = |t: &AutocorrTables, i: usize| {
            t.word().alphabet().symbol(t.max_restart_letter(i))
        };
        let t1 = dna_tables("ACACAA");
        let got1: String = (1..=6).map(|i| sym(&t1, i)).collect();
        assert_eq!(got1, "AACACC");

        let t2 = dna_tables("ACACAC");
        let got2: String = (1..=6).map(|i| sym(&t2, i)).collect();
        assert_eq!(got2, "AACACA");
    }

    #[test]
    fn letter_partitions_match_worked_example() {
        // ACACAC, i = 1..4: free letters / restarting letters excluding a_{i+1}
        let t = dna_tables("ACACAC");
        let assert_sets = |i: usize, free: &[u8], restarting: &[u8]| {
            assert_eq!(t.free_letters(i), free, "free i={i}");
            assert_eq!(t.restart_letters(i), restarting, "restart i={i}");
        };
        assert_sets(1, &[2, 3], &[0]); // {G,T} / {A}
        assert_sets(2, &[1, 2, 3], &[]); // {C,G,T} / {}
        assert_sets(3, &[2, 3], &[0]);
        assert_sets(4, &[1, 2, 3], &[]);
        for i in 1..=5 {
            assert_eq!(t.free_letters(i).len() + t.restart_letters(i).len(), 3);
        }
    }

    #[test]
    fn gated_tables_match_worked_example() {
        // ACACAC, i=5: offset for A gated at 11, for C gated at 8; the
        // max-letter curve is eps below 8 and C from 8 on (running max).
        let t = dna_tables("ACACAC");
        assert_eq!(t.restart_offset_at(5, 0, 10), 0);
        assert_eq!(t.restart_offset_at(5, 0, 11), 6);
        assert_eq!(t.restart_offset_at(5, 1, 7), 0);
        assert_eq!(t.restart_offset_at(5, 1, 8), 3);
        for beta in 0..8 {
            assert_eq!(t.max_restart_letter_at(5, beta), ExtLetter::Epsilon);
        }
        for beta in 8..20 {
            assert_eq!(t.max_restart_letter_at(5, beta), ExtLetter::Letter(1));
        }
        assert_eq!(
            t.max_restart_letter_steps(5).pieces(),
            &[(0, ExtLetter::Epsilon), (8, ExtLetter::Letter(1))]
        );
    }

    #[test]
    fn degenerate_single_letter_word() {
        let t = dna_tables("C");
        assert_eq!(t.m(), 1);
        assert_eq!(row(&t, 1), "=");
        assert_eq!(t.prefix_limit(), 1);
        assert_eq!(t.beta_max_raw(), None);
        assert_eq!(t.restart_offset(1, 1), 2); // a_1 itself
        assert_eq!(t.restart_offset(1, 0), 0);
        assert_eq!(t.max_restart_letter(1), 1);
    }

    #[test]
    fn empty_word_is_rejected() {
        let w = Word::parse(&Alphabet::dna(), "").unwrap();
        assert!(build_tables(&w).is_err());
    }

    #[test]
    fn max_letter_prefix_facts() {
        // T followed by a smaller letter forces the earliest possible cutoff.
        let dna = Alphabet::dna();
        for m in 2..=6usize {
            for w in enumerate_words(&dna, m) {
                if w.letters()[0] != 3 {
                    continue;
                }
                let t = build_tables(&w).unwrap();
                if w.letters()[1] < 3 {
                    assert_eq!(t.prefix_limit(), 2, "{w}");
                    assert_eq!(t.beta_max_raw(), Some(0), "{w}");
                }
                // a T-run prefix delays the first `<` accordingly
                let run = w.letters().iter().take_while(|&&l| l == 3).count();
                if run < m {
                    assert_eq!(t.prefix_limit(), run + 1, "{w}");
                }
            }
        }
    }

    #[test]
    fn first_column_is_equal_and_columns_propagate() {
        let mut rng = StdRng::seed_from_u64(0xC0FFEE);
        let dna = Alphabet::dna();
        for _ in 0..500 {
            let m = rng.random_range(1..=8);
            let letters: Vec<u8> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let w = Word::from_letters(&dna, letters).unwrap();
            let t = build_tables(&w).unwrap();
            for i in 1..=m {
                assert_eq!(t.cmp(i, 1), Ordering::Equal);
                for j in 2..=i {
                    if t.cmp(i, j) != Ordering::Equal {
                        for i2 in i..=m {
                            assert_eq!(t.cmp(i2, j), t.cmp(i, j));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_matches_direct_comparison_oracle() {
        let mut rng = StdRng::seed_from_u64(42);
        let dna = Alphabet::dna();
        for _ in 0..2_000 {
            let m = rng.random_range(1..=8);
            let letters: Vec<u8> = (0..m).map(|_| rng.random_range(0..4)).collect();
            let w = Word::from_letters(&dna, letters.clone()).unwrap();
            let t = build_tables(&w).unwrap();
            for i in 1..=m {
                for j in 1..=i {
                    let substring = Word::from_letters(&dna, letters[j - 1..i].to_vec()).unwrap();
                    let prefix = Word::from_letters(&dna, letters[..i - j + 1].to_vec()).unwrap();
                    assert_eq!(
                        t.cmp(i, j),
                        substring.lex_compare(&prefix).unwrap(),
                        "w={w} i={i} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn restart_offset_bounds_hold_exhaustively() {
        let dna = Alphabet::dna();
        for m in 1..=5usize {
            for w in enumerate_words(&dna, m) {
                let t = build_tables(&w).unwrap();
                for i in 1..=m {
                    let a1 = w.letters()[0];
                    assert_ne!(t.restart_offset(i, a1), 0);
                    assert!(t.max_restart_letter(i) >= a1);
                    for a in 0..4u8 {
                        let r = t.restart_offset(i, a);
                        assert!(r == 0 || (2 <= r && r <= i + 1), "{w} i={i} a={a} r={r}");
                        if r == i + 1 {
                            assert_eq!(a, a1);
                        }
                    }
                    // once every gate is open the gated maximum saturates at
                    // the plain maximum
                    let all_open = m - 1
                        + (0..4u8).map(|a| t.restart_offset(i, a)).max().unwrap();
                    assert_eq!(
                        t.max_restart_letter_at(i, all_open),
                        ExtLetter::Letter(t.max_restart_letter(i)),
                        "{w} i={i}"
                    );
                    assert_eq!(
                        t.max_restart_letter_at(i, 10_000),
                        ExtLetter::Letter(t.max_restart_letter(i)),
                        "{w} i={i}"
                    );
                }
            }
        }
    }
}
