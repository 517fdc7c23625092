//! Permutations of fixed-length words with prescribed letters at
//! prescribed positions.
//!
//! Words of length `b` over the alphabet `[k]` are ranked lexicographically
//! with letter 1 smallest, and every table here is indexed by rank. The
//! domain of a permutation is a formally tagged copy of the codomain
//! (written with hats in the construction notes); both sides share the
//! [`Word`] representation.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum WeaveError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("letter {letter} outside 1..={k}")]
    LetterOutOfRange { letter: usize, k: usize },
    #[error("expected {expected} entries, found {found}")]
    TableLength { expected: usize, found: usize },
    #[error("forward table is not a bijection: codomain rank {0} repeats")]
    NotABijection(usize),
    #[error("sub-permutation {index} has shape (k={k}, b={b}), expected (k={expected_k}, b={expected_b})")]
    SubPermutationShape { index: usize, k: usize, b: usize, expected_k: usize, expected_b: usize },
    #[error("prescription at word rank {rank} position {position} violates the placeholder pattern")]
    PrescriptionPattern { rank: usize, position: usize },
    #[error("prescription table has {found} positions for word rank {rank}, expected {expected}")]
    PrescriptionWidth { rank: usize, expected: usize, found: usize },
}

/// A word over the alphabet `[k]`, letters 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    k: usize,
    letters: Vec<usize>,
}

impl Word {
    pub fn new(k: usize, letters: Vec<usize>) -> Result<Self, WeaveError> {
        if k == 0 {
            return Err(WeaveError::EmptyAlphabet);
        }
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l > k) {
            return Err(WeaveError::LetterOutOfRange { letter, k });
        }
        Ok(Word { k, letters })
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Lexicographic rank, first letter most significant.
    pub fn rank(&self) -> usize {
        self.letters.iter().fold(0, |acc, &l| acc * self.k + (l - 1))
    }

    pub fn from_rank(k: usize, b: usize, mut rank: usize) -> Word {
        let mut letters = vec![1; b];
        for i in (0..b).rev() {
            letters[i] = rank % k + 1;
            rank /= k;
        }
        Word { k, letters }
    }

    /// New word with `letter` prepended.
    pub fn prepend(&self, letter: usize) -> Result<Word, WeaveError> {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(&self.letters);
        Word::new(self.k, letters)
    }
}

/// All `k^b` words of length `b`, in rank order.
pub fn all_words(k: usize, b: usize) -> impl Iterator<Item = Word> {
    let count = k.checked_pow(b as u32).expect("word space fits in usize");
    (0..count).map(move |r| Word::from_rank(k, b, r))
}

/// A bijection from tagged words of length `b` to plain words of length
/// `b`, stored as a rank-indexed forward table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPermutation {
    k: usize,
    b: usize,
    forward: Vec<usize>,
}

impl WordPermutation {
    pub fn new(k: usize, b: usize, forward: Vec<usize>) -> Result<Self, WeaveError> {
        if k == 0 {
            return Err(WeaveError::EmptyAlphabet);
        }
        let size = k.checked_pow(b as u32).expect("word space fits in usize");
        if forward.len() != size {
            return Err(WeaveError::TableLength { expected: size, found: forward.len() });
        }
        let mut seen = vec![false; size];
        for &image in &forward {
            if image >= size || seen[image] {
                return Err(WeaveError::NotABijection(image));
            }
            seen[image] = true;
        }
        Ok(WordPermutation { k, b, forward })
    }

    pub fn identity(k: usize, b: usize) -> WordPermutation {
        let size = k.checked_pow(b as u32).expect("word space fits in usize");
        WordPermutation { k, b, forward: (0..size).collect() }
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn word_len(&self) -> usize {
        self.b
    }

    pub fn table(&self) -> &[usize] {
        &self.forward
    }

    pub fn apply_rank(&self, rank: usize) -> usize {
        self.forward[rank]
    }

    pub fn apply(&self, word: &Word) -> Word {
        Word::from_rank(self.k, self.b, self.forward[word.rank()])
    }

    fn inverse_table(&self) -> Vec<usize> {
        let mut inv = vec![0; self.forward.len()];
        for (pre, &post) in self.forward.iter().enumerate() {
            inv[post] = pre;
        }
        inv
    }
}

/// Prescribed letters: for each tagged word and 1-based position, either a
/// forced output letter (exactly where the word has letter 1) or none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prescription {
    k: usize,
    b: usize,
    table: Vec<Vec<Option<usize>>>,
}

impl Prescription {
    pub fn new(k: usize, b: usize, table: Vec<Vec<Option<usize>>>) -> Result<Self, WeaveError> {
        if k == 0 {
            return Err(WeaveError::EmptyAlphabet);
        }
        let size = k.checked_pow(b as u32).expect("word space fits in usize");
        if table.len() != size {
            return Err(WeaveError::TableLength { expected: size, found: table.len() });
        }
        for (rank, row) in table.iter().enumerate() {
            if row.len() != b {
                return Err(WeaveError::PrescriptionWidth { rank, expected: b, found: row.len() });
            }
            let word = Word::from_rank(k, b, rank);
            for (pos, entry) in row.iter().enumerate() {
                match *entry {
                    Some(_) if word.letters()[pos] != 1 => {
                        return Err(WeaveError::PrescriptionPattern { rank, position: pos + 1 });
                    }
                    Some(letter) if letter == 0 || letter > k => {
                        return Err(WeaveError::LetterOutOfRange { letter, k });
                    }
                    None if word.letters()[pos] == 1 => {
                        return Err(WeaveError::PrescriptionPattern { rank, position: pos + 1 });
                    }
                    _ => {}
                }
            }
        }
        Ok(Prescription { k, b, table })
    }

    /// Builds the table from a closure over (tagged word, 1-based position).
    pub fn from_fn(
        k: usize,
        b: usize,
        mut f: impl FnMut(&Word, usize) -> Option<usize>,
    ) -> Result<Self, WeaveError> {
        let table = all_words(k, b)
            .map(|w| (1..=b).map(|i| f(&w, i)).collect())
            .collect();
        Prescription::new(k, b, table)
    }

    pub fn get(&self, rank: usize, position: usize) -> Option<usize> {
        self.table[rank][position - 1]
    }
}

/// Merges `k` permutations of length-`b` words into one permutation of
/// length-`b+1` words, steered by `rho` (rank-indexed, values in `[k]`).
///
/// The result `phi` satisfies, for every letter `x` and tagged word `w`:
/// the last `b` letters of `phi(xw)` equal `phi_x(w)`, and
/// `phi(1w) = rho(w) . phi_1(w)`. The three-case closed form resolves the
/// collisions the second condition would otherwise create.
pub fn merge_permutations(subs: &[WordPermutation], rho: &[usize]) -> Result<WordPermutation, WeaveError> {
    let k = subs.len();
    if k == 0 {
        return Err(WeaveError::EmptyAlphabet);
    }
    let b = subs[0].word_len();
    for (index, sub) in subs.iter().enumerate() {
        if sub.alphabet() != k || sub.word_len() != b {
            return Err(WeaveError::SubPermutationShape {
                index: index + 1,
                k: sub.alphabet(),
                b: sub.word_len(),
                expected_k: k,
                expected_b: b,
            });
        }
    }
    let size = subs[0].table().len();
    if rho.len() != size {
        return Err(WeaveError::TableLength { expected: size, found: rho.len() });
    }
    if let Some(&letter) = rho.iter().find(|&&v| v == 0 || v > k) {
        return Err(WeaveError::LetterOutOfRange { letter, k });
    }

    let inv_first = subs[0].inverse_table();
    let mut forward = vec![0; size * k];
    for (w_rank, &steer) in rho.iter().enumerate() {
        forward[w_rank] = (steer - 1) * size + subs[0].apply_rank(w_rank);
    }
    for x in 2..=k {
        for w_rank in 0..size {
            let image = subs[x - 1].apply_rank(w_rank);
            let first_letter = if rho[inv_first[image]] == x { 1 } else { x };
            forward[(x - 1) * size + w_rank] = (first_letter - 1) * size + image;
        }
    }
    WordPermutation::new(k, b + 1, forward)
}

/// Builds a permutation realizing the prescription: wherever a tagged word
/// has letter 1, the output word carries the prescribed letter at that
/// position. Recursive: strip the first letter, build the `k`
/// sub-permutations, then merge them steered by the first-position
/// prescriptions.
pub fn build_permutation(prescription: &Prescription) -> WordPermutation {
    let k = prescription.k;
    let b = prescription.b;
    if b == 0 {
        return WordPermutation::identity(k, 0);
    }
    let sub_size = k.pow(b as u32 - 1);
    let subs: Vec<WordPermutation> = (1..=k)
        .map(|x| {
            let table = (0..sub_size)
                .map(|rank| {
                    (0..b - 1)
                        .map(|i| prescription.table[(x - 1) * sub_size + rank][i + 1])
                        .collect()
                })
                .collect();
            let sub = Prescription { k, b: b - 1, table };
            build_permutation(&sub)
        })
        .collect();
    let rho: Vec<usize> = (0..sub_size)
        .map(|rank| prescription.table[rank][0].expect("first letter of a 1-headed word is prescribed"))
        .collect();
    merge_permutations(&subs, &rho).expect("shapes agree by construction")
}
