//! The ordering-based exact solver: greedy left-packing along orderings,
//! branch-and-bound for the minimal span, and the YES-coloring census.
//!
//! ```bash
//! cargo run -p sat2span --example exact_solver
//! ```

use num_bigint::BigUint;
use sat2span::budget::Budget;
use sat2span::channel::{
    check_spanned, enumerate_yes_colorings, greedy_for_order, span_of, solve_exact, CaInstance,
    SolveOutcome,
};
use sat2span::gadget::matchings_to_ca;
use sat2span::matching::WeightedBipartiteGraph;

fn main() {
    // a 3-vertex path: the ordering matters
    let mut path = CaInstance::new(vec!["a".into(), "b".into(), "c".into()], BigUint::from(10u32)).unwrap();
    path.set_distance("a", "b", BigUint::from(2u32)).unwrap();
    path.set_distance("b", "c", BigUint::from(2u32)).unwrap();

    for order in [["a", "b", "c"], ["a", "c", "b"]] {
        let names: Vec<String> = order.iter().map(|s| s.to_string()).collect();
        let coloring = greedy_for_order(&path, &names).unwrap();
        let colors: Vec<String> = order.iter().map(|v| coloring.get(v).unwrap().to_string()).collect();
        println!("greedy along {order:?}: colors {colors:?}, span {}", span_of(&coloring).unwrap());
    }

    match solve_exact(&path, &BigUint::from(10u32), Budget::default()).unwrap() {
        SolveOutcome::Solved { span, ordering, nodes, .. } => {
            println!("exact minimum: span {span} via ordering {ordering:?} ({nodes} nodes)")
        }
        SolveOutcome::ExceedsCap { .. } => unreachable!("cap 10 is generous"),
    }

    // a single-edge gadget is rigid: exactly one normalized YES-coloring,
    // and the anchors always sit at the extremes
    let gadget = matchings_to_ca(&WeightedBipartiteGraph::from_u64_rows(&[&[2]]).unwrap()).unwrap();
    println!(
        "\ngadget on {} vertices with forced span {}",
        gadget.instance.vertex_count(),
        gadget.constants.span
    );
    let census = enumerate_yes_colorings(
        &gadget.instance,
        Some((&gadget.v_left(), &gadget.v_right())),
        Budget::default(),
    )
    .unwrap();
    println!("normalized YES-colorings: {} (rigid: {})", census.colorings.len(), census.rigid);
    for coloring in &census.colorings {
        let rendered: Vec<String> = coloring.iter().map(|(v, c)| format!("{v}={c}")).collect();
        println!("  {}", rendered.join(" "));
    }
    let spanned =
        check_spanned(&gadget.instance, &gadget.v_left(), &gadget.v_right(), Budget::default()).unwrap();
    println!("anchors pinned to the extremes in every YES-coloring: {spanned}");
    assert!(spanned);

    match solve_exact(&gadget.instance, &gadget.constants.span, Budget::default()).unwrap() {
        SolveOutcome::Solved { span, nodes, .. } => {
            println!("branch-and-bound confirms minimal span {span} ({nodes} nodes)")
        }
        SolveOutcome::ExceedsCap { .. } => unreachable!("the canonical coloring exists"),
    }
}
