#![allow(dead_code)] // each test binary uses a different subset

//! Shared brute-force oracles, deliberately independent of the library's
//! greedy and branch-and-bound paths: properness is re-evaluated from the
//! distance table directly.

use num_bigint::BigUint;
use sat2span::channel::{CaInstance, Coloring};

/// All proper colorings with colors in `[1, limit]`, as u64 vectors in
/// instance vertex order.
pub fn all_proper_colorings(instance: &CaInstance, limit: u64) -> Vec<Vec<u64>> {
    let n = instance.vertex_count();
    let dist = distance_table(instance);
    let mut out = Vec::new();
    let mut colors = vec![1u64; n];
    loop {
        if is_proper_u64(&dist, &colors) {
            out.push(colors.clone());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if colors[pos] < limit {
                colors[pos] += 1;
                break;
            }
            colors[pos] = 1;
        }
    }
}

/// All YES-colorings with colors in `[1, span bound]`.
pub fn all_yes_colorings(instance: &CaInstance) -> Vec<Vec<u64>> {
    let bound = u64::try_from(instance.span_bound()).expect("desk-scale bound");
    all_proper_colorings(instance, bound)
        .into_iter()
        .filter(|colors| span_u64(colors) <= bound)
        .collect()
}

/// Minimal span over all proper colorings with colors in `[1, cap]`.
pub fn direct_min_span(instance: &CaInstance, cap: u64) -> Option<u64> {
    all_proper_colorings(instance, cap)
        .into_iter()
        .map(|colors| span_u64(&colors))
        .filter(|&span| span <= cap)
        .min()
}

pub fn span_u64(colors: &[u64]) -> u64 {
    colors.iter().max().unwrap() - colors.iter().min().unwrap() + 1
}

pub fn distance_table(instance: &CaInstance) -> Vec<Vec<u64>> {
    let names = instance.vertices();
    names
        .iter()
        .map(|x| {
            names
                .iter()
                .map(|y| {
                    if x == y {
                        0
                    } else {
                        u64::try_from(instance.distance(x, y).unwrap()).expect("desk-scale distance")
                    }
                })
                .collect()
        })
        .collect()
}

pub fn is_proper_u64(dist: &[Vec<u64>], colors: &[u64]) -> bool {
    for i in 0..colors.len() {
        for j in i + 1..colors.len() {
            if colors[i].abs_diff(colors[j]) < dist[i][j] {
                return false;
            }
        }
    }
    true
}

/// Vector view of a `Coloring` in instance vertex order.
pub fn coloring_vector(instance: &CaInstance, coloring: &Coloring) -> Vec<u64> {
    instance
        .vertices()
        .iter()
        .map(|v| u64::try_from(coloring.get(v).expect("total coloring")).expect("desk-scale color"))
        .collect()
}

/// Builds a `Coloring` from a u64 vector in instance vertex order.
pub fn vector_coloring(instance: &CaInstance, colors: &[u64]) -> Coloring {
    let mut coloring = Coloring::new();
    for (name, &color) in instance.vertices().iter().zip(colors) {
        coloring.set(name.clone(), BigUint::from(color));
    }
    coloring
}
