//! CNF formulas with fixed clause width, occurrence indexing, and a
//! brute-force satisfiability oracle.
//!
//! Occurrences are numbered clause-major: occurrence `width*(i-1)+p` is
//! position `p` of clause `i`, both 1-based. Two occurrences of the same
//! variable stay distinct; only the occurrence index ties them back together.

use crate::budget::{Budget, BudgetExceeded};
use thiserror::Error;

/// A literal: 1-based variable index plus polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn positive(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn negative(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// Value of the literal under `value` for its variable.
    pub fn evaluate(&self, value: bool) -> bool {
        value != self.negated
    }
}

/// A CNF formula in which every clause has exactly `width` literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    variable_count: usize,
    width: usize,
    clauses: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause width must be 1, 2 or 3, got {0}")]
    InvalidWidth(usize),
    #[error("clause {clause} has {found} literals, expected {expected}")]
    WrongClauseWidth { clause: usize, expected: usize, found: usize },
    #[error("clause {clause} references variable {var}, but the formula has {variable_count} variables")]
    VariableOutOfRange { clause: usize, var: usize, variable_count: usize },
    #[error("clause index {0} out of range, formula has {1} clauses")]
    ClauseIndexOutOfRange(usize, usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// DIMACS parse failure, tagged with the 1-based input line.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: clause found before the `p cnf` header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: {source}")]
    BadLiteral {
        line: usize,
        #[source]
        source: std::num::ParseIntError,
    },
    #[error("line {line}: clause has {found} literals, expected {expected}")]
    WrongClauseWidth { line: usize, expected: usize, found: usize },
    #[error("line {line}: variable {var} out of range 1..={variable_count}")]
    VariableOutOfRange { line: usize, var: usize, variable_count: usize },
    #[error("line {line}: missing terminating 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: trailing tokens after the terminating 0")]
    TrailingTokens { line: usize },
    #[error("line {line}: found {found} clauses, header declared {declared}")]
    ClauseCountMismatch { line: usize, declared: usize, found: usize },
    #[error("{0}")]
    Formula(#[from] CnfError),
}

impl CnfFormula {
    /// Builds a formula, validating width and literal ranges.
    pub fn new(variable_count: usize, width: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, CnfError> {
        if !(1..=3).contains(&width) {
            return Err(CnfError::InvalidWidth(width));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if clause.len() != width {
                return Err(CnfError::WrongClauseWidth {
                    clause: i + 1,
                    expected: width,
                    found: clause.len(),
                });
            }
            for lit in clause {
                if lit.var == 0 || lit.var > variable_count {
                    return Err(CnfError::VariableOutOfRange {
                        clause: i + 1,
                        var: lit.var,
                        variable_count,
                    });
                }
            }
        }
        Ok(CnfFormula { variable_count, width, clauses })
    }

    /// Parses DIMACS CNF text. Every clause must have exactly `width`
    /// literals; comments (`c` lines) and blank lines are skipped.
    pub fn parse_dimacs(text: &str, width: usize) -> Result<Self, DimacsError> {
        if !(1..=3).contains(&width) {
            return Err(CnfError::InvalidWidth(width).into());
        }
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<Vec<Literal>> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
                continue;
            }
            if trimmed.starts_with('p') {
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                    return Err(DimacsError::MalformedHeader { line });
                }
                let vars = fields[2].parse().map_err(|_| DimacsError::MalformedHeader { line })?;
                let ncl = fields[3].parse().map_err(|_| DimacsError::MalformedHeader { line })?;
                header = Some((vars, ncl));
                continue;
            }
            let (variable_count, _) = header.ok_or(DimacsError::ClauseBeforeHeader { line })?;
            let mut clause = Vec::new();
            let mut terminated = false;
            for token in trimmed.split_whitespace() {
                if terminated {
                    return Err(DimacsError::TrailingTokens { line });
                }
                let value: i64 = token.parse().map_err(|source| DimacsError::BadLiteral { line, source })?;
                if value == 0 {
                    terminated = true;
                    continue;
                }
                let var = value.unsigned_abs() as usize;
                if var > variable_count {
                    return Err(DimacsError::VariableOutOfRange { line, var, variable_count });
                }
                clause.push(Literal { var, negated: value < 0 });
            }
            if !terminated {
                return Err(DimacsError::MissingTerminator { line });
            }
            if clause.len() != width {
                return Err(DimacsError::WrongClauseWidth { line, expected: width, found: clause.len() });
            }
            clauses.push(clause);
        }
        let (variable_count, declared) = header.ok_or(DimacsError::MalformedHeader { line: last_line.max(1) })?;
        if clauses.len() != declared {
            return Err(DimacsError::ClauseCountMismatch {
                line: last_line,
                declared,
                found: clauses.len(),
            });
        }
        Ok(CnfFormula::new(variable_count, width, clauses)?)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Total number of occurrences, `width * clause_count`.
    pub fn occurrence_count(&self) -> usize {
        self.width * self.clauses.len()
    }

    /// Variable sitting at the 1-based occurrence position.
    pub fn occurrence_literal(&self, occurrence: usize) -> Literal {
        let idx = occurrence - 1;
        self.clauses[idx / self.width][idx % self.width]
    }

    /// True when `assignment` (indexed by variable - 1) satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|clause| clause.iter().any(|lit| lit.evaluate(assignment[lit.var - 1])))
    }
}

/// Occurrence positions grouped by variable (`I_i`) and by clause (`J_i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceIndex {
    pub total_occurrences: usize,
    /// `var_occurrences[i]` lists the positions of variable `i+1`, ascending.
    pub var_occurrences: Vec<Vec<usize>>,
    /// `clause_occurrences[i]` is the contiguous block of clause `i+1`.
    pub clause_occurrences: Vec<Vec<usize>>,
}

/// Groups the clause-major occurrence positions by variable and by clause.
pub fn occurrence_index(formula: &CnfFormula) -> OccurrenceIndex {
    let width = formula.width();
    let mut var_occurrences = vec![Vec::new(); formula.variable_count()];
    let mut clause_occurrences = Vec::with_capacity(formula.clause_count());
    for (ci, clause) in formula.clauses().iter().enumerate() {
        let base = width * ci;
        clause_occurrences.push((base + 1..=base + width).collect());
        for (p, lit) in clause.iter().enumerate() {
            var_occurrences[lit.var - 1].push(base + p + 1);
        }
    }
    OccurrenceIndex {
        total_occurrences: formula.occurrence_count(),
        var_occurrences,
        clause_occurrences,
    }
}

/// All subsets `K` of clause `clause_index`'s occurrence block whose induced
/// assignment (occurrence in `K` means value 1) satisfies the clause,
/// treating repeated variables as independent occurrences.
///
/// Returned in ascending characteristic value, where occurrence `j`
/// contributes bit `j-1`. Always `2^width - 1` subsets.
pub fn satisfying_subsets(formula: &CnfFormula, clause_index: usize) -> Result<Vec<Vec<usize>>, CnfError> {
    let m = formula.clause_count();
    if clause_index == 0 || clause_index > m {
        return Err(CnfError::ClauseIndexOutOfRange(clause_index, m));
    }
    let width = formula.width();
    let clause = &formula.clauses()[clause_index - 1];
    let base = width * (clause_index - 1);
    let mut subsets = Vec::new();
    // mask bit p = value of occurrence at clause position p+1; iterating masks
    // ascending is exactly ascending characteristic value because position p
    // maps to global bit base+p.
    for mask in 0u32..1 << width {
        let satisfied = clause
            .iter()
            .enumerate()
            .any(|(p, lit)| lit.evaluate(mask >> p & 1 == 1));
        if satisfied {
            subsets.push((0..width).filter(|p| mask >> p & 1 == 1).map(|p| base + p + 1).collect());
        }
    }
    debug_assert_eq!(subsets.len(), (1 << width) - 1);
    Ok(subsets)
}

/// Exhaustive satisfiability check. Returns the lexicographically first
/// satisfying assignment (variable 1 most significant, false < true).
pub fn sat_oracle(formula: &CnfFormula, budget: Budget) -> Result<Option<Vec<bool>>, CnfError> {
    let n = formula.variable_count();
    budget.admits_power("SAT assignment enumeration", 2, n as u32)?;
    let mut assignment = vec![false; n];
    loop {
        if formula.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
        // increment as a binary counter with variable n as the low bit
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            if assignment[pos] {
                assignment[pos] = false;
            } else {
                assignment[pos] = true;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example1() -> CnfFormula {
        CnfFormula::parse_dimacs("p cnf 3 2\n1 2 0\n-1 3 0\n", 2).unwrap()
    }

    #[test]
    fn parses_width_one_unsat_pair() {
        let f = CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n-1 0\n", 1).unwrap();
        assert_eq!(f.variable_count(), 1);
        assert_eq!(f.clause_count(), 2);
        assert_eq!(f.clauses()[0], vec![Literal::positive(1)]);
        assert_eq!(f.clauses()[1], vec![Literal::negative(1)]);
    }

    #[test]
    fn parses_example1_with_comments() {
        let f = CnfFormula::parse_dimacs("c two clauses\np cnf 3 2\n1 2 0\n-1 3 0\n", 2).unwrap();
        assert_eq!(f, example1());
    }

    #[test]
    fn empty_clause_line_is_reported_with_line_number() {
        let err = CnfFormula::parse_dimacs("p cnf 2 2\n1 2 0\n0\n", 2).unwrap_err();
        assert_eq!(err, DimacsError::WrongClauseWidth { line: 3, expected: 2, found: 0 });
    }

    #[test]
    fn header_and_range_errors_carry_line_numbers() {
        assert_eq!(
            CnfFormula::parse_dimacs("p dnf 2 1\n1 2 0\n", 2).unwrap_err(),
            DimacsError::MalformedHeader { line: 1 }
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 5 0\n", 2).unwrap_err(),
            DimacsError::VariableOutOfRange { line: 2, var: 5, variable_count: 2 }
        );
        assert_eq!(
            CnfFormula::parse_dimacs("1 2 0\np cnf 2 1\n", 2).unwrap_err(),
            DimacsError::ClauseBeforeHeader { line: 1 }
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 2\n1 2 0\n", 2).unwrap_err(),
            DimacsError::ClauseCountMismatch { line: 2, declared: 2, found: 1 }
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2\n", 2).unwrap_err(),
            DimacsError::MissingTerminator { line: 2 }
        );
        assert_eq!(
            CnfFormula::parse_dimacs("p cnf 2 1\n1 2 0 1 0\n", 2).unwrap_err(),
            DimacsError::TrailingTokens { line: 2 }
        );
    }

    #[test]
    fn occurrence_index_of_example1() {
        let idx = occurrence_index(&example1());
        assert_eq!(idx.total_occurrences, 4);
        assert_eq!(idx.var_occurrences, vec![vec![1, 3], vec![2], vec![4]]);
        assert_eq!(idx.clause_occurrences, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn occurrence_index_keeps_repeated_literals_distinct() {
        let f = CnfFormula::new(
            2,
            3,
            vec![vec![Literal::positive(1), Literal::positive(1), Literal::positive(2)]],
        )
        .unwrap();
        let idx = occurrence_index(&f);
        assert_eq!(idx.var_occurrences, vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn occurrence_index_of_empty_formula() {
        let f = CnfFormula::new(3, 3, vec![]).unwrap();
        let idx = occurrence_index(&f);
        assert_eq!(idx.total_occurrences, 0);
        assert_eq!(idx.var_occurrences, vec![Vec::<usize>::new(); 3]);
        assert!(idx.clause_occurrences.is_empty());
    }

    #[test]
    fn satisfying_subsets_of_example1() {
        let f = example1();
        assert_eq!(satisfying_subsets(&f, 1).unwrap(), vec![vec![1], vec![2], vec![1, 2]]);
        assert_eq!(satisfying_subsets(&f, 2).unwrap(), vec![vec![], vec![4], vec![3, 4]]);
        assert_eq!(
            satisfying_subsets(&f, 3).unwrap_err(),
            CnfError::ClauseIndexOutOfRange(3, 2)
        );
    }

    #[test]
    fn width_three_clause_has_seven_subsets() {
        let f = CnfFormula::parse_dimacs("p cnf 3 1\n1 -2 3 0\n", 3).unwrap();
        assert_eq!(satisfying_subsets(&f, 1).unwrap().len(), 7);
    }

    #[test]
    fn oracle_finds_lexicographically_first_assignment() {
        let sat = sat_oracle(&example1(), Budget::default()).unwrap();
        assert_eq!(sat, Some(vec![false, true, false]));
    }

    #[test]
    fn oracle_rejects_unsat_and_accepts_empty() {
        let unsat = CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n-1 0\n", 1).unwrap();
        assert_eq!(sat_oracle(&unsat, Budget::default()).unwrap(), None);
        let empty = CnfFormula::new(0, 3, vec![]).unwrap();
        assert_eq!(sat_oracle(&empty, Budget::default()).unwrap(), Some(vec![]));
    }

    #[test]
    fn oracle_respects_budget() {
        let f = CnfFormula::new(30, 3, vec![]).unwrap();
        assert!(matches!(sat_oracle(&f, Budget(1 << 10)), Err(CnfError::Budget(_))));
    }
}
