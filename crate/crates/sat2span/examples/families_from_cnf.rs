//! First reduction step on a two-clause formula: occurrences, the two
//! selector-sum families, and their intersection as a satisfiability test.
//!
//! ```bash
//! cargo run -p sat2span --example families_from_cnf
//! ```

use sat2span::budget::Budget;
use sat2span::cnf::{occurrence_index, sat_oracle, CnfFormula};
use sat2span::family::{cnf_to_families, family_intersect, family_set};

fn main() {
    // (x1 v x2) and (!x1 v x3), clause width 2
    let formula = CnfFormula::parse_dimacs("p cnf 3 2\n1 2 0\n-1 3 0\n", 2).unwrap();
    println!("formula: (x1 v x2) and (!x1 v x3)");
    println!("{} variables, {} clauses, {} occurrences\n", formula.variable_count(), formula.clause_count(), formula.occurrence_count());

    let index = occurrence_index(&formula);
    for (i, occs) in index.var_occurrences.iter().enumerate() {
        println!("variable x{} occupies occurrence slots {:?}", i + 1, occs);
    }

    let (consistency, satisfaction) = cnf_to_families(&formula);
    println!("\nconsistency table (row i packs the occurrence bits of x_i):");
    for row in 1..=consistency.rows() {
        println!("  row {row}: {} {}", consistency.value(row, 1), consistency.value(row, 2));
    }
    println!("satisfaction table (row i lists clause i's satisfying occurrence patterns):");
    for row in 1..=satisfaction.rows() {
        let cells: Vec<String> =
            (1..=satisfaction.columns()).map(|c| satisfaction.value(row, c).to_string()).collect();
        println!("  row {row}: {}", cells.join(" "));
    }

    let budget = Budget::default();
    let x_f = family_set(&consistency, budget).unwrap();
    let x_g = family_set(&satisfaction, budget).unwrap();
    let bits = formula.occurrence_count();
    println!("\nconsistent-assignment family:  {:?}", x_f.values());
    println!("  (left-to-right bit display:  {:?})", x_f.bit_reversed(bits).values());
    println!("clause-satisfying family:      {:?}", x_g.values());
    println!("  (left-to-right bit display:  {:?})", x_g.bit_reversed(bits).values());

    match family_intersect(&consistency, &satisfaction, budget).unwrap() {
        Some((value, sel_f, sel_g)) => {
            println!("\nfamilies intersect at {value} (selectors {:?} / {:?})", sel_f.0, sel_g.0);
            let assignment: Vec<bool> = (0..formula.variable_count()).map(|i| sel_f.0[i] == 1).collect();
            println!("decoded assignment: {assignment:?}");
            assert!(formula.satisfied_by(&assignment));
        }
        None => println!("\nfamilies are disjoint: the formula is unsatisfiable"),
    }

    let oracle = sat_oracle(&formula, budget).unwrap();
    println!("assignment oracle agrees: {:?}", oracle);
    assert!(oracle.is_some());
}
