//! The compression step: a 4-row table becomes a complete bipartite graph
//! on 4 vertices per side whose perfect-matching weights are exactly the
//! family, and any selector is realized by an explicit matching.
//!
//! ```bash
//! cargo run -p sat2span --example compress_family
//! ```

use sat2span::budget::Budget;
use sat2span::family::{family_set, FamilyFunction, Selector};
use sat2span::matching::{family_to_graph, matching_weight_set, selector_to_matching};
use sat2span::weave::Word;

fn main() {
    let f = FamilyFunction::from_u64_rows(&[&[5, 0], &[2, 0], &[8, 0], &[1, 3]]).unwrap();
    println!("table with {} rows and {} columns", f.rows(), f.columns());

    let budget = Budget::default();
    let (graph, trace) = family_to_graph(&f, budget).unwrap();
    println!(
        "encoded as words of length {} over [{}]: {} vertices per side, {} slots",
        trace.word_len(),
        trace.alphabet(),
        graph.side(),
        trace.extended_rows()
    );

    println!("\nrow-to-slot assignment and edge weights:");
    for rank in 0..graph.side() {
        let word = Word::from_rank(trace.alphabet(), trace.word_len(), rank);
        let slots: Vec<String> = (1..=trace.word_len())
            .map(|i| trace.beta(rank, i).map_or("-".into(), |row| row.to_string()))
            .collect();
        let weights: Vec<String> =
            (0..graph.side()).map(|j| graph.weight(rank, j).to_string()).collect();
        println!("  left {:?} feeds rows [{}] | weights {}", word.letters(), slots.join(","), weights.join(" "));
    }

    let family = family_set(&f, budget).unwrap();
    let weights = matching_weight_set(&graph, budget).unwrap();
    println!("\nfamily set:          {:?}", family.values());
    println!("matching weight set: {:?}", weights.values());
    assert_eq!(family, weights, "the two sets must be identical");

    let selector = Selector(vec![1, 2, 1, 2]);
    let matching = selector_to_matching(&trace, &selector).unwrap();
    let weight = graph.matching_weight(&matching);
    println!("\nselector {:?} -> matching {:?} of weight {weight}", selector.0, matching);
    assert_eq!(weight, f.selector_sum(&selector).unwrap());
    println!("the matching weight equals the selector sum");
}
