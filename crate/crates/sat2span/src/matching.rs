//! Complete bipartite graphs whose perfect-matching weight set realizes a
//! selector-sum family, plus the common-matching-weight oracle.
//!
//! The encoding is where the instance shrinks: an `a`-row, `k`-column table
//! becomes a graph on `k^b` vertices per side for the smallest `b` with
//! `b * k^(b-1) >= a`, so the vertex count is logarithmically smaller than
//! the row count.

use crate::budget::{Budget, BudgetExceeded};
use crate::cnf::CnfFormula;
use crate::family::{cnf_to_families, FamilyError, FamilyFunction, Selector, WeightSet};
use crate::weave::{all_words, build_permutation, Prescription};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("weight matrix must be square and nonempty, row {row} has {found} entries for side {side}")]
    NotSquare { row: usize, side: usize, found: usize },
    #[error("encoded graph side is too large: {0}")]
    ReductionTooLarge(BudgetExceeded),
    #[error("matching enumeration is too large: {0}")]
    OracleTooLarge(BudgetExceeded),
    #[error("selector has {found} entries, trace expects {expected}")]
    SelectorLength { expected: usize, found: usize },
    #[error("selector entry {value} at row {row} outside 1..={columns}")]
    SelectorOutOfRange { row: usize, value: usize, columns: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Complete weighted bipartite graph with equal sides; `weight[i][j]` is
/// the edge between left vertex `i` and right vertex `j` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBipartiteGraph {
    weights: Vec<Vec<BigUint>>,
}

impl WeightedBipartiteGraph {
    pub fn new(weights: Vec<Vec<BigUint>>) -> Result<Self, MatchingError> {
        let side = weights.len();
        for (i, row) in weights.iter().enumerate() {
            if row.len() != side {
                return Err(MatchingError::NotSquare { row: i + 1, side, found: row.len() });
            }
        }
        Ok(WeightedBipartiteGraph { weights })
    }

    pub fn from_u64_rows(rows: &[&[u64]]) -> Result<Self, MatchingError> {
        WeightedBipartiteGraph::new(
            rows.iter().map(|r| r.iter().map(|&v| BigUint::from(v)).collect()).collect(),
        )
    }

    pub fn side(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, left: usize, right: usize) -> &BigUint {
        &self.weights[left][right]
    }

    pub fn max_weight(&self) -> BigUint {
        self.weights
            .iter()
            .flat_map(|row| row.iter())
            .max()
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Weight of the perfect matching pairing left `i` with right `perm[i]`.
    pub fn matching_weight(&self, perm: &[usize]) -> BigUint {
        perm.iter().enumerate().map(|(i, &j)| &self.weights[i][j]).sum()
    }
}

/// Sorted set of all perfect matching weights; `side!` permutations.
pub fn matching_weight_set(g: &WeightedBipartiteGraph, budget: Budget) -> Result<WeightSet, MatchingError> {
    Ok(WeightSet::from_values(matching_weight_map(g, budget)?.into_keys()))
}

/// Matching weights with, for each, the lexicographically least witnessing
/// permutation (as a left-to-right assignment vector).
pub fn matching_weight_map(
    g: &WeightedBipartiteGraph,
    budget: Budget,
) -> Result<BTreeMap<BigUint, Vec<usize>>, MatchingError> {
    budget
        .admits_factorial("perfect matching enumeration", g.side() as u64)
        .map_err(MatchingError::OracleTooLarge)?;
    let side = g.side();
    if side == 0 {
        let mut map = BTreeMap::new();
        map.insert(BigUint::zero(), Vec::new());
        return Ok(map);
    }
    // weights fitting 64 bits take a fast integer path; the matrix walk is
    // identical either way
    let bound: BigUint = g
        .weights
        .iter()
        .map(|row| row.iter().max().cloned().unwrap_or_else(BigUint::zero))
        .sum();
    if u64::try_from(&bound).is_ok() {
        let weights: Vec<Vec<u64>> = g
            .weights
            .iter()
            .map(|row| row.iter().map(|w| u64::try_from(w).expect("within bound")).collect())
            .collect();
        let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        let mut perm: Vec<usize> = (0..side).collect();
        loop {
            let weight = perm.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
            map.entry(weight).or_insert_with(|| perm.clone());
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(map.into_iter().map(|(w, p)| (BigUint::from(w), p)).collect())
    } else {
        let mut map: BTreeMap<BigUint, Vec<usize>> = BTreeMap::new();
        let mut perm: Vec<usize> = (0..side).collect();
        loop {
            let weight = g.matching_weight(&perm);
            map.entry(weight).or_insert_with(|| perm.clone());
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(map)
    }
}

/// Advances to the lexicographically next permutation in place; `false`
/// once the sequence wraps.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Smallest common matching weight with its two witness permutations.
pub type CommonWeight = (BigUint, Vec<usize>, Vec<usize>);

/// Decides whether two graphs admit equal-weight perfect matchings; on
/// success returns the smallest common weight and the two witnesses.
pub fn cmw_oracle(
    g1: &WeightedBipartiteGraph,
    g2: &WeightedBipartiteGraph,
    budget: Budget,
) -> Result<Option<CommonWeight>, MatchingError> {
    let map1 = matching_weight_map(g1, budget)?;
    let map2 = matching_weight_map(g2, budget)?;
    for (weight, perm1) in &map1 {
        if let Some(perm2) = map2.get(weight) {
            return Ok(Some((weight.clone(), perm1.clone(), perm2.clone())));
        }
    }
    Ok(None)
}

/// How a family was packed into a graph: word shape `(k, b)`, extended row
/// count `c = b * k^(b-1)`, and the assignment `beta` of rows to the
/// letter-1 slots of the left-side words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    k: usize,
    b: usize,
    c: usize,
    /// `beta[rank][i]` is the 1-based row fed by position `i+1` of the
    /// left word with that rank, present exactly where the word has letter 1.
    beta: Vec<Vec<Option<usize>>>,
}

impl ReductionTrace {
    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn word_len(&self) -> usize {
        self.b
    }

    pub fn extended_rows(&self) -> usize {
        self.c
    }

    pub fn side(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self, rank: usize, position: usize) -> Option<usize> {
        self.beta[rank][position - 1]
    }

    /// Re-checks the structural invariants; used by the stats reporter.
    pub fn check(&self, original_rows: usize) -> bool {
        let b = self.b as u32;
        let minimal = self.b >= 1
            && self.c == self.b * self.k.pow(b - 1)
            && original_rows <= self.c
            && (self.b == 1 || (self.b - 1) * self.k.pow(b - 2) < original_rows);
        let mut used = vec![false; self.c];
        let mut pattern_ok = true;
        for (rank, row) in self.beta.iter().enumerate() {
            let word = crate::weave::Word::from_rank(self.k, self.b, rank);
            for (i, entry) in row.iter().enumerate() {
                match entry {
                    Some(value) => {
                        if word.letters()[i] != 1 || *value == 0 || *value > self.c || used[*value - 1] {
                            pattern_ok = false;
                        } else {
                            used[*value - 1] = true;
                        }
                    }
                    None => {
                        if word.letters()[i] == 1 {
                            pattern_ok = false;
                        }
                    }
                }
            }
        }
        minimal && pattern_ok && used.iter().all(|&u| u)
    }
}

/// Smallest `b >= 1` with `b * k^(b-1) >= a`.
fn minimal_word_len(a: usize, k: usize) -> (usize, usize) {
    let mut b = 1u32;
    loop {
        let capacity = (b as u128) * (k as u128).pow(b - 1);
        if capacity >= a as u128 {
            return (b as usize, capacity as usize);
        }
        b += 1;
    }
}

/// Encodes a family as a complete bipartite graph whose matching weight
/// set equals the family set exactly.
///
/// Rows are handed out to letter-1 slots in word-rank order, positions
/// ascending, after padding the table with zero rows up to `c`.
pub fn family_to_graph(
    f: &FamilyFunction,
    budget: Budget,
) -> Result<(WeightedBipartiteGraph, ReductionTrace), MatchingError> {
    let k = f.columns();
    let a = f.rows();
    let (b, c) = minimal_word_len(a, k);
    budget
        .admits_power("encoded graph side", k as u64, b as u32)
        .map_err(MatchingError::ReductionTooLarge)?;

    let mut next_row = 1;
    let beta: Vec<Vec<Option<usize>>> = all_words(k, b)
        .map(|word| {
            word.letters()
                .iter()
                .map(|&letter| {
                    (letter == 1).then(|| {
                        let row = next_row;
                        next_row += 1;
                        row
                    })
                })
                .collect()
        })
        .collect();
    debug_assert_eq!(next_row, c + 1, "every extended row is assigned exactly once");

    let extended = f.extended_with_zero_rows(c);
    let right_words: Vec<Vec<usize>> = all_words(k, b).map(|w| w.letters().to_vec()).collect();
    let weights = beta
        .iter()
        .map(|row| {
            let sources: Vec<(usize, usize)> = row
                .iter()
                .enumerate()
                .filter_map(|(i, entry)| entry.map(|value| (i, value)))
                .collect();
            right_words
                .iter()
                .map(|u| sources.iter().map(|&(i, value)| extended.value(value, u[i])).sum())
                .collect()
        })
        .collect();

    let graph = WeightedBipartiteGraph { weights };
    let trace = ReductionTrace { k, b, c, beta };
    debug_assert_eq!(graph.side(), k.pow(b as u32));
    debug_assert!(trace.check(a));
    Ok((graph, trace))
}

/// Turns a selector over the extended rows into a perfect matching of the
/// encoded graph with exactly the selector's sum as its weight; the word
/// permutation is forced by prescribing `selector(beta(w, i))` at every
/// letter-1 slot.
pub fn selector_to_matching(trace: &ReductionTrace, selector: &Selector) -> Result<Vec<usize>, MatchingError> {
    if selector.0.len() != trace.c {
        return Err(MatchingError::SelectorLength { expected: trace.c, found: selector.0.len() });
    }
    for (i, &col) in selector.0.iter().enumerate() {
        if col == 0 || col > trace.k {
            return Err(MatchingError::SelectorOutOfRange { row: i + 1, value: col, columns: trace.k });
        }
    }
    let table = trace
        .beta
        .iter()
        .map(|row| row.iter().map(|entry| entry.map(|value| selector.0[value - 1])).collect())
        .collect();
    let prescription = Prescription::new(trace.k, trace.b, table).expect("beta follows the letter-1 pattern");
    Ok(build_permutation(&prescription).table().to_vec())
}

/// The two encoded graphs (and traces) for a formula's family pair.
#[derive(Debug, Clone)]
pub struct CmwStage {
    pub consistency_graph: WeightedBipartiteGraph,
    pub consistency_trace: ReductionTrace,
    pub satisfaction_graph: WeightedBipartiteGraph,
    pub satisfaction_trace: ReductionTrace,
}

/// Composes the family encoding with the graph encoding: the two graphs
/// admit equal-weight perfect matchings exactly when the formula is
/// satisfiable.
pub fn cnf_to_cmw(formula: &CnfFormula, budget: Budget) -> Result<CmwStage, MatchingError> {
    let (f, g) = cnf_to_families(formula);
    let (consistency_graph, consistency_trace) = family_to_graph(&f, budget)?;
    let (satisfaction_graph, satisfaction_trace) = family_to_graph(&g, budget)?;
    Ok(CmwStage { consistency_graph, consistency_trace, satisfaction_graph, satisfaction_trace })
}
