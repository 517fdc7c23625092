//! Encoding a weighted bipartite graph as a rigid channel assignment
//! gadget: canonical colorings, permutation extraction, and the offset
//! census at the middle vertex.
//!
//! ```bash
//! cargo run -p sat2span --example matching_gadget
//! ```

use num_bigint::BigUint;
use sat2span::budget::Budget;
use sat2span::channel::{span_of, solve_exact, SolveOutcome};
use sat2span::gadget::{
    canonical_coloring, extract_permutation, matchings_to_ca, matching_weight_of_intervals, offset_probe,
};
use sat2span::matching::{matching_weight_set, WeightedBipartiteGraph};

fn main() {
    let graph = WeightedBipartiteGraph::from_u64_rows(&[&[3, 1], &[0, 2]]).unwrap();
    let gadget = matchings_to_ca(&graph).unwrap();
    let c = &gadget.constants;
    println!("source graph side {}, max weight {}", c.side, c.max_weight);
    println!(
        "gadget: {} vertices, unit {}, middle offset base {}, forced span {}",
        gadget.instance.vertex_count(),
        c.unit,
        c.base_offset,
        c.span
    );

    for perm in [[0usize, 1], [1, 0]] {
        let coloring = canonical_coloring(&gadget, &perm).unwrap();
        assert!(gadget.instance.is_proper(&coloring).unwrap());
        assert_eq!(span_of(&coloring).unwrap(), c.span);
        let offset = coloring.get(&gadget.v_mid()).unwrap() - coloring.get(&gadget.v_left()).unwrap();
        let weight = matching_weight_of_intervals(&graph, &perm);
        println!(
            "\npermutation {perm:?}: proper, span {}, middle offset {} = base + matching weight {}",
            c.span, offset, weight
        );
        assert_eq!(offset, &c.base_offset + &weight);
        assert_eq!(extract_permutation(&gadget, &coloring).unwrap(), perm.to_vec());
        println!("extraction recovers {perm:?} from the colors alone");
    }

    // which middle offsets are achievable at all? probe each candidate by
    // pinning the offset and asking the exact solver
    let weights = matching_weight_set(&graph, Budget::default()).unwrap();
    println!("\nmatching weight set: {:?}", weights.values());
    print!("achievable offsets above the base:");
    for delta in 0..=6u64 {
        let probe = offset_probe(&gadget, &BigUint::from(delta)).unwrap();
        let feasible = matches!(
            solve_exact(&probe, &c.span, Budget(10_000_000)).unwrap(),
            SolveOutcome::Solved { .. }
        );
        if feasible {
            print!(" {delta}");
        }
        assert_eq!(feasible, weights.contains(&BigUint::from(delta)));
    }
    println!("\nexactly the matching weights are achievable");
}
