//! The whole chain at once: a satisfiable and an unsatisfiable formula
//! pushed through every stage, with per-stage oracles cross-checked and
//! the satisfiable case certified by an explicit coloring.
//!
//! ```bash
//! cargo run -p sat2span --example full_pipeline
//! ```

use sat2span::budget::Budget;
use sat2span::cnf::CnfFormula;
use sat2span::pipeline::{stats, verify};

fn main() {
    let cases = [
        ("(x1 v x2) and (!x1 v x3)", "p cnf 3 2\n1 2 0\n-1 3 0\n", 2usize),
        ("all four clauses over two variables", "p cnf 2 4\n1 2 0\n1 -2 0\n-1 2 0\n-1 -2 0\n", 2),
    ];

    for (label, text, width) in cases {
        let formula = CnfFormula::parse_dimacs(text, width).unwrap();
        println!("=== {label} ===");
        let report = verify(&formula, Budget::default()).unwrap();
        print!("{report}");
        assert!(report.agreed());

        let sizes = stats(&formula, Budget::default()).unwrap();
        print!("{sizes}");
        assert!(sizes.violated.is_empty());
        println!();
    }
}
