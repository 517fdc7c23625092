//! Selector-sum families and the encoding of a CNF formula as a pair of
//! families whose intersection mirrors satisfiability.
//!
//! A table `f` with `a` rows and `b` columns generates the family
//! `X_f = { sum_i f(i, s(i)) }` over all selectors `s` picking one column
//! per row. Values are arbitrary-precision: the CNF encoding packs
//! occurrence characteristic vectors into integers up to `2^(width*m)`.

use crate::budget::{Budget, BudgetExceeded};
use crate::cnf::{occurrence_index, satisfying_subsets, CnfFormula};
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family table must have at least one column")]
    NoColumns,
    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("selector entry {value} at row {row} outside 1..={columns}")]
    SelectorOutOfRange { row: usize, value: usize, columns: usize },
    #[error("selector has {found} entries, table has {expected} rows")]
    SelectorLength { expected: usize, found: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// A nonnegative integer table `f : [rows] x [columns] -> N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyFunction {
    columns: usize,
    values: Vec<Vec<BigUint>>,
}

/// One column choice per row, entries 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Selector(pub Vec<usize>);

/// Sorted, deduplicated set of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSet(Vec<BigUint>);

impl FamilyFunction {
    pub fn new(columns: usize, values: Vec<Vec<BigUint>>) -> Result<Self, FamilyError> {
        if columns == 0 {
            return Err(FamilyError::NoColumns);
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != columns {
                return Err(FamilyError::RaggedRow { row: i + 1, expected: columns, found: row.len() });
            }
        }
        Ok(FamilyFunction { columns, values })
    }

    pub fn from_u64_rows(rows: &[&[u64]]) -> Result<Self, FamilyError> {
        let columns = rows.first().map_or(1, |r| r.len());
        FamilyFunction::new(
            columns,
            rows.iter().map(|r| r.iter().map(|&v| BigUint::from(v)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Value at 1-based `(row, column)`.
    pub fn value(&self, row: usize, column: usize) -> &BigUint {
        &self.values[row - 1][column - 1]
    }

    /// Appends all-zero rows until the table has `rows` rows. The family
    /// set is unchanged because the new rows contribute empty bit support.
    pub fn extended_with_zero_rows(&self, rows: usize) -> FamilyFunction {
        let mut values = self.values.clone();
        while values.len() < rows {
            values.push(vec![BigUint::zero(); self.columns]);
        }
        FamilyFunction { columns: self.columns, values }
    }

    /// Sum of the row maxima: the largest element any selector can reach.
    pub fn max_selector_sum(&self) -> BigUint {
        self.values
            .iter()
            .map(|row| row.iter().max().cloned().unwrap_or_else(BigUint::zero))
            .sum()
    }

    /// Same table with every value's low `bit_len` bits reversed; converts
    /// between the least-significant-bit-first occurrence packing and the
    /// left-to-right display convention.
    pub fn bit_reversed(&self, bit_len: usize) -> FamilyFunction {
        FamilyFunction {
            columns: self.columns,
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(|v| reverse_bits(v, bit_len)).collect())
                .collect(),
        }
    }

    /// Sum along a selector.
    pub fn selector_sum(&self, selector: &Selector) -> Result<BigUint, FamilyError> {
        self.validate_selector(selector)?;
        Ok(selector
            .0
            .iter()
            .enumerate()
            .map(|(i, &col)| self.value(i + 1, col))
            .sum())
    }

    pub fn validate_selector(&self, selector: &Selector) -> Result<(), FamilyError> {
        if selector.0.len() != self.rows() {
            return Err(FamilyError::SelectorLength { expected: self.rows(), found: selector.0.len() });
        }
        for (i, &col) in selector.0.iter().enumerate() {
            if col == 0 || col > self.columns {
                return Err(FamilyError::SelectorOutOfRange { row: i + 1, value: col, columns: self.columns });
            }
        }
        Ok(())
    }
}

impl WeightSet {
    pub fn from_values(values: impl IntoIterator<Item = BigUint>) -> WeightSet {
        let mut v: Vec<BigUint> = values.into_iter().collect();
        v.sort();
        v.dedup();
        WeightSet(v)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        self.0.binary_search(value).is_ok()
    }

    pub fn max(&self) -> Option<&BigUint> {
        self.0.last()
    }

    /// Ascending common values of two sets.
    pub fn intersection(&self, other: &WeightSet) -> WeightSet {
        WeightSet(self.0.iter().filter(|v| other.contains(v)).cloned().collect())
    }

    /// Set with the low `bit_len` bits of every element reversed.
    pub fn bit_reversed(&self, bit_len: usize) -> WeightSet {
        WeightSet::from_values(self.0.iter().map(|v| reverse_bits(v, bit_len)))
    }

    pub fn from_u64s(values: &[u64]) -> WeightSet {
        WeightSet::from_values(values.iter().map(|&v| BigUint::from(v)))
    }
}

/// Reverses the low `bit_len` bits of `value`; bits at or above `bit_len`
/// must be clear.
pub fn reverse_bits(value: &BigUint, bit_len: usize) -> BigUint {
    assert!(
        value.bits() as usize <= bit_len,
        "value {value} does not fit in {bit_len} bits"
    );
    let mut out = BigUint::zero();
    for i in 0..bit_len as u64 {
        if value.bit(i) {
            out.set_bit(bit_len as u64 - 1 - i, true);
        }
    }
    out
}

/// The family `X_f` as a sorted set. `rows == 0` yields `{0}` (empty sum).
pub fn family_set(f: &FamilyFunction, budget: Budget) -> Result<WeightSet, FamilyError> {
    Ok(WeightSet(family_map(f, budget)?.into_keys().collect()))
}

/// `X_f` together with, for each element, the lexicographically first
/// selector reaching it.
pub fn family_map(f: &FamilyFunction, budget: Budget) -> Result<BTreeMap<BigUint, Selector>, FamilyError> {
    budget.admits_power("family selector enumeration", f.columns() as u64, f.rows() as u32)?;
    let mut map = BTreeMap::new();
    let mut choice = Vec::with_capacity(f.rows());
    fill_family_map(f, &mut choice, &BigUint::zero(), &mut map);
    Ok(map)
}

fn fill_family_map(
    f: &FamilyFunction,
    choice: &mut Vec<usize>,
    sum: &BigUint,
    map: &mut BTreeMap<BigUint, Selector>,
) {
    let row = choice.len();
    if row == f.rows() {
        map.entry(sum.clone()).or_insert_with(|| Selector(choice.clone()));
        return;
    }
    for col in 1..=f.columns() {
        choice.push(col);
        fill_family_map(f, choice, &(sum + f.value(row + 1, col)), map);
        choice.pop();
    }
}

/// Decides whether `X_f` and `X_g` intersect; on success returns the
/// smallest common value and witnessing selectors.
pub fn family_intersect(
    f: &FamilyFunction,
    g: &FamilyFunction,
    budget: Budget,
) -> Result<Option<(BigUint, Selector, Selector)>, FamilyError> {
    let map_f = family_map(f, budget)?;
    let map_g = family_map(g, budget)?;
    for (value, sel_f) in &map_f {
        if let Some(sel_g) = map_g.get(value) {
            return Ok(Some((value.clone(), sel_f.clone(), sel_g.clone())));
        }
    }
    Ok(None)
}

/// Encodes a formula as the pair `(f, g)`: selectors of `f` are the
/// consistent occurrence assignments (row `i` packs variable `i`'s
/// occurrence bits, or zero), selectors of `g` are the clause-satisfying
/// occurrence assignments. The families intersect exactly when the formula
/// is satisfiable.
pub fn cnf_to_families(formula: &CnfFormula) -> (FamilyFunction, FamilyFunction) {
    let index = occurrence_index(formula);
    let f_rows = index
        .var_occurrences
        .iter()
        .map(|occs| vec![characteristic_value(occs), BigUint::zero()])
        .collect();
    let f = FamilyFunction::new(2, f_rows).expect("two columns");

    let g_columns = (1usize << formula.width()) - 1;
    let g_rows = (1..=formula.clause_count())
        .map(|ci| {
            satisfying_subsets(formula, ci)
                .expect("clause index in range")
                .iter()
                .map(|subset| characteristic_value(subset))
                .collect()
        })
        .collect();
    let g = FamilyFunction::new(g_columns, g_rows).expect("satisfying subsets fill every column");
    (f, g)
}

/// `sum of 2^(j-1)` over the 1-based positions in `occurrences`.
pub fn characteristic_value(occurrences: &[usize]) -> BigUint {
    let mut v = BigUint::zero();
    for &j in occurrences {
        v.set_bit(j as u64 - 1, true);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::sat_oracle;

    fn example1() -> CnfFormula {
        CnfFormula::parse_dimacs("p cnf 3 2\n1 2 0\n-1 3 0\n", 2).unwrap()
    }

    #[test]
    fn family_set_of_lsb_example1_f() {
        let f = FamilyFunction::from_u64_rows(&[&[5, 0], &[2, 0], &[8, 0]]).unwrap();
        let set = family_set(&f, Budget::default()).unwrap();
        assert_eq!(set, WeightSet::from_u64s(&[0, 2, 5, 7, 8, 10, 13, 15]));
    }

    #[test]
    fn family_set_of_msb_example1_f_matches_displayed_values() {
        let f = FamilyFunction::from_u64_rows(&[&[10, 0], &[4, 0], &[1, 0]]).unwrap();
        let set = family_set(&f, Budget::default()).unwrap();
        assert_eq!(set, WeightSet::from_u64s(&[0, 1, 4, 5, 10, 11, 14, 15]));
    }

    #[test]
    fn family_set_of_zero_table_and_empty_table() {
        let zero = FamilyFunction::from_u64_rows(&[&[0, 0], &[0, 0], &[0, 0]]).unwrap();
        assert_eq!(family_set(&zero, Budget::default()).unwrap(), WeightSet::from_u64s(&[0]));
        let empty = FamilyFunction::new(2, vec![]).unwrap();
        assert_eq!(family_set(&empty, Budget::default()).unwrap(), WeightSet::from_u64s(&[0]));
    }

    #[test]
    fn intersect_reports_smallest_common_value_with_witnesses() {
        // display-convention tables of the two-clause walkthrough; the
        // common values are {4, 5, 11, 15}, so the smallest is 4.
        let f = FamilyFunction::from_u64_rows(&[&[10, 0], &[4, 0], &[1, 0]]).unwrap();
        let g = FamilyFunction::from_u64_rows(&[&[8, 4, 12], &[0, 1, 3]]).unwrap();
        let (value, sel_f, sel_g) = family_intersect(&f, &g, Budget::default()).unwrap().unwrap();
        assert_eq!(value, BigUint::from(4u32));
        assert_eq!(f.selector_sum(&sel_f).unwrap(), value);
        assert_eq!(g.selector_sum(&sel_g).unwrap(), value);
    }

    #[test]
    fn intersect_identity_and_disjoint_cases() {
        let f = FamilyFunction::from_u64_rows(&[&[5, 9]]).unwrap();
        let (value, _, _) = family_intersect(&f, &f, Budget::default()).unwrap().unwrap();
        assert_eq!(value, BigUint::from(5u32));

        let zeros = FamilyFunction::from_u64_rows(&[&[0, 0]]).unwrap();
        let positive = FamilyFunction::from_u64_rows(&[&[3, 7]]).unwrap();
        assert_eq!(family_intersect(&zeros, &positive, Budget::default()).unwrap(), None);
    }

    #[test]
    fn cnf_to_families_on_example1() {
        let (f, g) = cnf_to_families(&example1());
        assert_eq!(f, FamilyFunction::from_u64_rows(&[&[5, 0], &[2, 0], &[8, 0]]).unwrap());
        assert_eq!(g, FamilyFunction::from_u64_rows(&[&[1, 2, 3], &[0, 8, 12]]).unwrap());
    }

    #[test]
    fn cnf_to_families_on_width_one_unsat_pair() {
        let formula = CnfFormula::parse_dimacs("p cnf 1 2\n1 0\n-1 0\n", 1).unwrap();
        let (f, g) = cnf_to_families(&formula);
        assert_eq!(f, FamilyFunction::from_u64_rows(&[&[3, 0]]).unwrap());
        assert_eq!(g, FamilyFunction::from_u64_rows(&[&[1], &[0]]).unwrap());
        let xf = family_set(&f, Budget::default()).unwrap();
        let xg = family_set(&g, Budget::default()).unwrap();
        assert_eq!(xf, WeightSet::from_u64s(&[0, 3]));
        assert_eq!(xg, WeightSet::from_u64s(&[1]));
        assert!(xf.intersection(&xg).is_empty());
        assert_eq!(family_intersect(&f, &g, Budget::default()).unwrap(), None);
        assert_eq!(sat_oracle(&formula, Budget::default()).unwrap(), None);
    }

    #[test]
    fn distinct_single_occurrences_give_full_power_set() {
        // three variables, each occurring once
        let formula = CnfFormula::parse_dimacs("p cnf 3 1\n1 2 3 0\n", 3).unwrap();
        let (f, _) = cnf_to_families(&formula);
        let set = family_set(&f, Budget::default()).unwrap();
        assert_eq!(set.len(), 1 << 3);
        assert_eq!(set, WeightSet::from_u64s(&[0, 1, 2, 3, 4, 5, 6, 7]));
    }

    #[test]
    fn bit_reversal_round_trips_and_matches_display() {
        let v = BigUint::from(13u32);
        assert_eq!(reverse_bits(&v, 4), BigUint::from(11u32));
        assert_eq!(reverse_bits(&reverse_bits(&v, 4), 4), v);
        let set = WeightSet::from_u64s(&[0, 2, 5, 7, 8, 10, 13, 15]).bit_reversed(4);
        assert_eq!(set, WeightSet::from_u64s(&[0, 1, 4, 5, 10, 11, 14, 15]));
    }

    #[test]
    fn budget_guards_selector_enumeration() {
        let f = FamilyFunction::from_u64_rows(&[&[1, 2], &[3, 4], &[5, 6]]).unwrap();
        assert!(matches!(family_set(&f, Budget(7)), Err(FamilyError::Budget(_))));
    }

    #[test]
    fn selector_validation() {
        let f = FamilyFunction::from_u64_rows(&[&[1, 2], &[3, 4]]).unwrap();
        assert!(f.selector_sum(&Selector(vec![1, 2])).is_ok());
        assert!(matches!(
            f.selector_sum(&Selector(vec![1])),
            Err(FamilyError::SelectorLength { .. })
        ));
        assert!(matches!(
            f.selector_sum(&Selector(vec![1, 3])),
            Err(FamilyError::SelectorOutOfRange { .. })
        ));
    }
}
