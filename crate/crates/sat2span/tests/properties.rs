//! Property tests for the structural invariants of every stage.

mod common;

use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;
use sat2span::budget::Budget;
use sat2span::channel::{greedy_for_order, solve_exact, CaInstance, SolveOutcome};
use sat2span::cnf::{occurrence_index, sat_oracle, satisfying_subsets, CnfFormula, Literal};
use sat2span::family::{cnf_to_families, family_intersect, family_set, FamilyFunction, Selector};
use sat2span::formats::{
    read_ca, read_cmw, read_family, write_ca, write_cmw, write_family, CaFile, HandleRole,
};
use sat2span::matching::{
    cmw_oracle, cnf_to_cmw, family_to_graph, matching_weight_set, selector_to_matching,
    WeightedBipartiteGraph,
};
use sat2span::weave::{all_words, build_permutation, merge_permutations, Prescription, WordPermutation};

fn formula_strategy(max_vars: usize, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    (1usize..=max_vars).prop_flat_map(move |n| {
        let clause = prop::collection::vec((1usize..=n, any::<bool>()), 3);
        prop::collection::vec(clause, 0..=max_clauses).prop_map(move |clauses| {
            let clauses = clauses
                .into_iter()
                .map(|lits| lits.into_iter().map(|(var, negated)| Literal { var, negated }).collect())
                .collect();
            CnfFormula::new(n, 3, clauses).expect("generated literals are in range")
        })
    })
}

fn family_strategy(max_rows: usize, max_value: u64) -> impl Strategy<Value = FamilyFunction> {
    (1usize..=3).prop_flat_map(move |k| {
        prop::collection::vec(prop::collection::vec(0..=max_value, k), 0..=max_rows).prop_map(move |rows| {
            FamilyFunction::new(
                k,
                rows.into_iter().map(|r| r.into_iter().map(BigUint::from).collect()).collect(),
            )
            .expect("rows have k entries")
        })
    })
}

fn instance_strategy(max_vertices: usize, max_weight: u64) -> impl Strategy<Value = CaInstance> {
    (2usize..=max_vertices).prop_flat_map(move |n| {
        prop::collection::vec(0..=max_weight, n * (n - 1) / 2).prop_map(move |weights| {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let bound: u64 = 1 + weights.iter().sum::<u64>();
            let mut instance = CaInstance::new(names.clone(), BigUint::from(bound.max(1))).unwrap();
            let mut it = weights.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    instance.set_distance(&names[i], &names[j], BigUint::from(it.next().unwrap())).unwrap();
                }
            }
            instance
        })
    })
}

fn permutation_strategy(size: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..size).collect::<Vec<usize>>()).prop_shuffle()
}

/// Up to five vertices; weights shrink with the vertex count so the direct
/// coloring enumeration stays small.
fn small_weight_instances() -> impl Strategy<Value = CaInstance> {
    (2usize..=5).prop_flat_map(|n| {
        let max_weight: u64 = if n == 5 { 1 } else { 2 };
        prop::collection::vec(0..=max_weight, n * (n - 1) / 2).prop_map(move |weights| {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let bound: u64 = 1 + weights.iter().sum::<u64>();
            let mut instance = CaInstance::new(names.clone(), BigUint::from(bound.max(1))).unwrap();
            let mut it = weights.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    instance.set_distance(&names[i], &names[j], BigUint::from(it.next().unwrap())).unwrap();
                }
            }
            instance
        })
    })
}

proptest! {
    #[test]
    fn occurrence_sets_partition_the_occurrences(formula in formula_strategy(4, 3)) {
        let index = occurrence_index(&formula);
        let total = formula.occurrence_count();
        let mut seen = vec![false; total];
        for occs in &index.var_occurrences {
            for &j in occs {
                prop_assert!(j >= 1 && j <= total);
                prop_assert!(!seen[j - 1], "occurrence {} assigned twice", j);
                seen[j - 1] = true;
            }
        }
        prop_assert!(seen.into_iter().all(|s| s), "every occurrence belongs to a variable");
        for (i, block) in index.clause_occurrences.iter().enumerate() {
            let expected: Vec<usize> = (3 * i + 1..=3 * i + 3).collect();
            prop_assert_eq!(block, &expected);
        }
    }

    #[test]
    fn satisfying_subsets_are_exactly_the_satisfying_assignments(formula in formula_strategy(4, 3)) {
        let width = formula.width();
        for ci in 1..=formula.clause_count() {
            let subsets = satisfying_subsets(&formula, ci).unwrap();
            prop_assert_eq!(subsets.len(), (1 << width) - 1);
            let clause = &formula.clauses()[ci - 1];
            let base = width * (ci - 1);
            for mask in 0u32..1 << width {
                let satisfied = clause.iter().enumerate().any(|(p, lit)| lit.evaluate(mask >> p & 1 == 1));
                let as_subset: Vec<usize> =
                    (0..width).filter(|p| mask >> p & 1 == 1).map(|p| base + p + 1).collect();
                prop_assert_eq!(subsets.contains(&as_subset), satisfied);
            }
        }
    }

    #[test]
    fn family_set_size_and_maximum(f in family_strategy(4, 63)) {
        let set = family_set(&f, Budget::default()).unwrap();
        let selectors = (f.columns() as u64).pow(f.rows() as u32);
        prop_assert!(set.len() as u64 <= selectors.max(1));
        prop_assert_eq!(set.max().cloned().unwrap(), f.max_selector_sum());
    }

    #[test]
    fn family_intersection_matches_the_oracle_and_decodes(formula in formula_strategy(4, 3)) {
        let (f, g) = cnf_to_families(&formula);
        let limit = BigUint::from(1u32) << formula.occurrence_count();
        for table in [&f, &g] {
            for row in 1..=table.rows() {
                for col in 1..=table.columns() {
                    prop_assert!(table.value(row, col) < &limit);
                }
            }
        }

        let intersection = family_intersect(&f, &g, Budget::default()).unwrap();
        let satisfiable = sat_oracle(&formula, Budget::default()).unwrap();
        prop_assert_eq!(intersection.is_some(), satisfiable.is_some());

        if let Some((value, sel_f, sel_g)) = intersection {
            prop_assert_eq!(f.selector_sum(&sel_f).unwrap(), value.clone());
            prop_assert_eq!(g.selector_sum(&sel_g).unwrap(), value.clone());
            // decode the bits as an occurrence assignment: consistent and satisfying
            let occ_value: Vec<bool> =
                (0..formula.occurrence_count()).map(|j| value.bit(j as u64)).collect();
            let index = occurrence_index(&formula);
            for occs in &index.var_occurrences {
                for pair in occs.windows(2) {
                    prop_assert_eq!(occ_value[pair[0] - 1], occ_value[pair[1] - 1], "inconsistent occurrences");
                }
            }
            for (ci, clause) in formula.clauses().iter().enumerate() {
                let satisfied = clause
                    .iter()
                    .enumerate()
                    .any(|(p, lit)| lit.evaluate(occ_value[3 * ci + p]));
                prop_assert!(satisfied, "clause {} falsified by the decoded value", ci + 1);
            }
        }
    }

    #[test]
    fn built_permutations_honor_prescriptions(
        (k, b) in (1usize..=3, 0usize..=3).prop_filter("word space", |(k, b)| k.pow(*b as u32) <= 27),
        choices in prop::collection::vec(1usize..=3, 128),
    ) {
        let mut cursor = 0;
        let prescription = Prescription::from_fn(k, b, |w, i| {
            (w.letters()[i - 1] == 1).then(|| {
                let letter = (choices[cursor % choices.len()] - 1) % k + 1;
                cursor += 1;
                letter
            })
        })
        .unwrap();
        let phi = build_permutation(&prescription);
        let mut hit = vec![false; k.pow(b as u32)];
        for w in all_words(k, b) {
            let image = phi.apply(&w);
            prop_assert!(!hit[image.rank()], "not a bijection");
            hit[image.rank()] = true;
            for i in 1..=b {
                if w.letters()[i - 1] == 1 {
                    prop_assert_eq!(Some(image.letters()[i - 1]), prescription.get(w.rank(), i));
                }
            }
        }
        // determinism: rebuilding gives the identical table
        let rebuilt = build_permutation(&prescription);
        prop_assert_eq!(phi.table(), rebuilt.table());
    }

    #[test]
    fn merged_permutations_satisfy_both_conditions(
        (k, b) in (1usize..=3, 0usize..=2).prop_filter("word space", |(k, b)| k.pow(*b as u32) <= 9),
        tables in prop::collection::vec(permutation_strategy(9), 3),
        steering in prop::collection::vec(1usize..=3, 9),
    ) {
        let size = k.pow(b as u32);
        let subs: Vec<WordPermutation> = (0..k)
            .map(|x| {
                let mut table: Vec<usize> = tables[x % tables.len()].iter().map(|&v| v % size).collect();
                table.truncate(size);
                // repair into a permutation deterministically
                let mut seen = vec![false; size];
                for slot in table.iter_mut() {
                    if seen[*slot] {
                        *slot = (0..size).find(|&c| !seen[c]).unwrap();
                    }
                    seen[*slot] = true;
                }
                WordPermutation::new(k, b, table).unwrap()
            })
            .collect();
        let rho: Vec<usize> = (0..size).map(|i| (steering[i % steering.len()] - 1) % k + 1).collect();
        let merged = merge_permutations(&subs, &rho).unwrap();

        let mut hit = vec![false; k.pow(b as u32 + 1)];
        for x in 1..=k {
            for w in all_words(k, b) {
                let input = w.prepend(x).unwrap();
                let image = merged.apply(&input);
                prop_assert!(!hit[image.rank()]);
                hit[image.rank()] = true;
                // (i): the tail is the sub-permutation's image
                let tail = subs[x - 1].apply(&w);
                prop_assert_eq!(&image.letters()[1..], tail.letters());
                // (ii): a leading 1 maps to the steering letter
                if x == 1 {
                    prop_assert_eq!(image.letters()[0], rho[w.rank()]);
                }
            }
        }
    }

    #[test]
    fn matching_weight_set_equals_the_family_set(f in family_strategy(3, 31)) {
        let (graph, trace) = family_to_graph(&f, Budget::default()).unwrap();
        prop_assert!(trace.check(f.rows()), "trace invariants");
        prop_assert!(
            trace.side() <= trace.alphabet() * trace.alphabet() * f.rows().max(1),
            "side within the coarse envelope"
        );
        let weights = matching_weight_set(&graph, Budget::default()).unwrap();
        let family = family_set(&f, Budget::default()).unwrap();
        prop_assert_eq!(weights, family);
    }

    #[test]
    fn every_selector_yields_a_matching_of_its_sum(f in family_strategy(2, 15)) {
        let (graph, trace) = family_to_graph(&f, Budget::default()).unwrap();
        let c = trace.extended_rows();
        let k = trace.alphabet();
        prop_assume!(k.pow(c as u32) <= 729 && trace.side() <= 9);
        let extended = f.extended_with_zero_rows(c);
        let mut selector = vec![1usize; c];
        'all: loop {
            let sel = Selector(selector.clone());
            let matching = selector_to_matching(&trace, &sel).unwrap();
            prop_assert_eq!(graph.matching_weight(&matching), extended.selector_sum(&sel).unwrap());
            let mut pos = c;
            loop {
                if pos == 0 {
                    break 'all;
                }
                pos -= 1;
                if selector[pos] < k {
                    selector[pos] += 1;
                    break;
                }
                selector[pos] = 1;
            }
        }
    }

    #[test]
    fn greedy_is_always_proper(instance in instance_strategy(5, 4), seed in any::<u64>()) {
        let mut order: Vec<String> = instance.vertices().to_vec();
        // cheap deterministic shuffle
        let n = order.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let coloring = greedy_for_order(&instance, &order).unwrap();
        prop_assert!(instance.is_proper(&coloring).unwrap());
        let vector = common::coloring_vector(&instance, &coloring);
        prop_assert_eq!(vector.iter().min().copied(), Some(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn cmw_encoding_matches_the_assignment_oracle(formula in two_literal_formulas()) {
        let stage = cnf_to_cmw(&formula, Budget::default()).unwrap();
        let shared =
            cmw_oracle(&stage.consistency_graph, &stage.satisfaction_graph, Budget::default()).unwrap();
        let satisfiable = sat_oracle(&formula, Budget::default()).unwrap();
        prop_assert_eq!(shared.is_some(), satisfiable.is_some());
        if let (Some((weight, perm1, perm2)), Some(_)) = (&shared, &satisfiable) {
            prop_assert_eq!(&stage.consistency_graph.matching_weight(perm1), weight);
            prop_assert_eq!(&stage.satisfaction_graph.matching_weight(perm2), weight);
        }
    }
}

fn two_literal_formulas() -> impl Strategy<Value = CnfFormula> {
    (1usize..=3).prop_flat_map(|n| {
        let clause = prop::collection::vec((1usize..=n, any::<bool>()), 2);
        prop::collection::vec(clause, 0..=2).prop_map(move |clauses| {
            let clauses = clauses
                .into_iter()
                .map(|lits| lits.into_iter().map(|(var, negated)| Literal { var, negated }).collect())
                .collect();
            CnfFormula::new(n, 2, clauses).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn solver_agrees_with_direct_enumeration(instance in instance_strategy(3, 4)) {
        let bound = u64::try_from(instance.span_bound()).unwrap().min(6);
        let mut capped = instance.clone();
        capped.set_span_bound(BigUint::from(bound)).unwrap();
        let direct = common::direct_min_span(&capped, bound);
        match solve_exact(&capped, &BigUint::from(bound), Budget::default()).unwrap() {
            SolveOutcome::Solved { span, ordering, coloring, .. } => {
                prop_assert_eq!(Some(u64::try_from(&span).unwrap()), direct);
                prop_assert!(capped.is_proper(&coloring).unwrap());
                prop_assert_eq!(greedy_for_order(&capped, &ordering).unwrap(), coloring);
            }
            SolveOutcome::ExceedsCap { .. } => prop_assert_eq!(direct, None),
        }
    }

    #[test]
    fn some_ordering_reaches_the_direct_optimum(instance in small_weight_instances()) {
        let limit = 1 + instance
            .nonzero_distances()
            .map(|(_, _, d)| u64::try_from(d).unwrap())
            .sum::<u64>();
        let direct = common::direct_min_span(&instance, limit).expect("limit is reachable");

        let names: Vec<String> = instance.vertices().to_vec();
        let mut best: Option<u64> = None;
        let mut order: Vec<usize> = (0..names.len()).collect();
        loop {
            let ordering: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
            let coloring = greedy_for_order(&instance, &ordering).unwrap();
            let span = common::span_u64(&common::coloring_vector(&instance, &coloring));
            best = Some(best.map_or(span, |b: u64| b.min(span)));
            if !next_perm(&mut order) {
                break;
            }
        }
        prop_assert_eq!(best, Some(direct));
    }

    #[test]
    fn solver_is_monotone_in_the_cap(instance in instance_strategy(4, 3), extra in 0u64..4) {
        let low = u64::try_from(instance.span_bound()).unwrap().min(8);
        let high = low + extra;
        let low_result = solve_exact(&instance, &BigUint::from(low), Budget::default()).unwrap();
        let high_result = solve_exact(&instance, &BigUint::from(high), Budget::default()).unwrap();
        match (low_result, high_result) {
            (SolveOutcome::Solved { span: s1, .. }, SolveOutcome::Solved { span: s2, .. }) => {
                prop_assert!(s2 <= s1);
            }
            (SolveOutcome::Solved { .. }, SolveOutcome::ExceedsCap { .. }) => {
                prop_assert!(false, "raising the cap lost the solution");
            }
            (SolveOutcome::ExceedsCap { .. }, _) => {}
        }
    }

    #[test]
    fn family_files_round_trip(f in family_strategy(4, u64::MAX)) {
        prop_assert_eq!(read_family(&write_family(&f)).unwrap(), f);
    }

    #[test]
    fn cmw_files_round_trip(
        rows1 in prop::collection::vec(prop::collection::vec(any::<u64>(), 3), 3),
        rows2 in prop::collection::vec(prop::collection::vec(any::<u64>(), 2), 2),
    ) {
        let g1 = WeightedBipartiteGraph::new(
            rows1.into_iter().map(|r| r.into_iter().map(BigUint::from).collect()).collect(),
        )
        .unwrap();
        let g2 = WeightedBipartiteGraph::new(
            rows2.into_iter().map(|r| r.into_iter().map(BigUint::from).collect()).collect(),
        )
        .unwrap();
        let (h1, h2) = read_cmw(&write_cmw(&g1, &g2)).unwrap();
        prop_assert_eq!(h1, g1);
        prop_assert_eq!(h2, g2);
    }

    #[test]
    fn ca_files_round_trip(instance in instance_strategy(5, 9)) {
        let mut handles = std::collections::BTreeMap::new();
        handles.insert(HandleRole::VLeft, instance.vertices()[0].clone());
        handles.insert(HandleRole::VRight, instance.vertices()[1].clone());
        let file = CaFile { instance, handles };
        prop_assert_eq!(read_ca(&write_ca(&file)).unwrap(), file);
    }
}

fn next_perm(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[test]
fn zero_column_family_is_rejected() {
    assert!(FamilyFunction::new(0, vec![]).is_err());
    let zero = FamilyFunction::new(1, vec![vec![BigUint::zero()]]).unwrap();
    assert_eq!(family_set(&zero, Budget::default()).unwrap().values(), &[BigUint::zero()]);
}
