//! Encoding a weighted bipartite graph as a rigid channel assignment
//! gadget, plus the extend and merge combinators that splice two encoded
//! graphs into a single instance sharing one middle vertex.
//!
//! For a graph with side `n` and maximum weight `m` the gadget uses
//! `M = n*m + 1` as the spacing unit, forces total span `s = (8n-1)*M`,
//! and pins the middle vertex `l = (4n-1)*M` plus one matching weight
//! above the left anchor. YES-colorings then correspond one-to-one to
//! perfect matchings of the source graph.

use crate::channel::{CaInstance, ChannelError, Coloring};
use crate::matching::WeightedBipartiteGraph;
use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("source graph must have at least one vertex per side")]
    EmptySourceGraph,
    #[error("permutation is invalid: {0}")]
    NotAPermutation(String),
    #[error("coloring places {found} a-vertices strictly inside interval {interval}, expected exactly one")]
    IntervalOccupancy { interval: usize, found: usize },
    #[error("coloring does not satisfy the left-before-right orientation")]
    NotOriented,
    #[error("span bounds differ: {left} vs {right}")]
    SpanBoundMismatch { left: String, right: String },
    #[error("vertex {0:?} is shared but was not declared for identification")]
    UnintendedCollision(String),
    #[error("vertex {0:?} was declared shared but is missing from a side")]
    MissingSharedVertex(String),
    #[error("matching weights differ: {left} vs {right}")]
    WeightMismatch { left: String, right: String },
    #[error("offset {offset} outside 0..={max}")]
    OffsetOutOfRange { offset: String, max: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The derived quantities of a gadget: spacing unit, forced middle offset,
/// and forced span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetConstants {
    /// Side size of the source graph.
    pub side: usize,
    /// Largest edge weight of the source graph.
    pub max_weight: BigUint,
    /// `M = side * max_weight + 1`: strictly dominates any single weight.
    pub unit: BigUint,
    /// `l = (4n - 1) * M`: the forced left-anchor-to-middle base offset.
    pub base_offset: BigUint,
    /// `s = (8n - 1) * M`: the forced span of every YES-coloring.
    pub span: BigUint,
}

impl GadgetConstants {
    pub fn for_graph(graph: &WeightedBipartiteGraph) -> Result<GadgetConstants, GadgetError> {
        let n = graph.side();
        if n == 0 {
            return Err(GadgetError::EmptySourceGraph);
        }
        let max_weight = graph.max_weight();
        let unit = BigUint::from(n as u64) * &max_weight + 1u32;
        let base_offset = BigUint::from(4 * n as u64 - 1) * &unit;
        let span = BigUint::from(8 * n as u64 - 1) * &unit;
        let constants = GadgetConstants { side: n, max_weight, unit, base_offset, span };
        // the walk along the canonical vertex sequence sums to exactly s - 1
        assert_eq!(
            BigUint::from(4 * n as u64 - 1) * (&constants.unit * 2u32)
                + BigUint::from(n as u64) * &constants.max_weight,
            &constants.span - 1u32,
            "gadget constants identity"
        );
        Ok(constants)
    }
}

/// A channel assignment instance encoding one bipartite graph, with named
/// anchor handles.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub instance: CaInstance,
    pub constants: GadgetConstants,
    source: WeightedBipartiteGraph,
    prefix: String,
    mid_name: String,
}

impl Gadget {
    pub fn source(&self) -> &WeightedBipartiteGraph {
        &self.source
    }

    pub fn side(&self) -> usize {
        self.constants.side
    }

    /// Left anchor `v1`.
    pub fn v_left(&self) -> String {
        self.v(1)
    }

    /// Right anchor `v{4n}`.
    pub fn v_right(&self) -> String {
        self.v(4 * self.side())
    }

    /// Middle vertex (originally `w{n}`, possibly renamed).
    pub fn v_mid(&self) -> String {
        self.mid_name.clone()
    }

    pub fn v(&self, i: usize) -> String {
        format!("{}v{}", self.prefix, i)
    }

    pub fn w(&self, i: usize) -> String {
        let name = format!("{}w{}", self.prefix, i);
        if i == self.side() && name != self.mid_name {
            self.mid_name.clone()
        } else {
            name
        }
    }

    pub fn a(&self, i: usize) -> String {
        format!("{}a{}", self.prefix, i)
    }

    pub fn b(&self, i: usize) -> String {
        format!("{}b{}", self.prefix, i)
    }

    /// Renames the middle vertex, e.g. to identify it across two gadgets.
    pub fn rename_mid(&mut self, new_name: &str) -> Result<(), GadgetError> {
        self.instance.rename_vertex(&self.mid_name.clone(), new_name)?;
        self.mid_name = new_name.to_string();
        Ok(())
    }
}

fn diff(a: usize, b: usize) -> usize {
    a.max(b) - a.min(b)
}

/// Builds the gadget for `graph` with unprefixed vertex names.
pub fn matchings_to_ca(graph: &WeightedBipartiteGraph) -> Result<Gadget, GadgetError> {
    matchings_to_ca_prefixed(graph, "")
}

/// Builds the gadget with every vertex name carrying `prefix`, so two
/// gadgets can coexist in one instance.
pub fn matchings_to_ca_prefixed(graph: &WeightedBipartiteGraph, prefix: &str) -> Result<Gadget, GadgetError> {
    let constants = GadgetConstants::for_graph(graph)?;
    let n = constants.side;
    let unit = &constants.unit;
    let two_units = unit * 2u32;
    let four_units = unit * 4u32;

    let v = |i: usize| format!("{prefix}v{i}");
    let w = |i: usize| format!("{prefix}w{i}");
    let a = |i: usize| format!("{prefix}a{i}");
    let b = |i: usize| format!("{prefix}b{i}");

    let mut names: Vec<String> = Vec::with_capacity(8 * n - 1);
    names.extend((1..=4 * n).map(v));
    names.extend((1..=2 * n - 1).map(w));
    names.extend((1..=n).map(a));
    names.extend((1..=n).map(b));
    assert_eq!(names.len(), 8 * n - 1, "gadget vertex count");

    let mut instance = CaInstance::new(names, constants.span.clone())?;

    for i in 1..=4 * n {
        for j in i + 1..=4 * n {
            let d = if (i, j) == (1, 4 * n) {
                &constants.span - 1u32
            } else {
                BigUint::from(diff(i, j) as u64) * &two_units
            };
            instance.set_distance(&v(i), &v(j), d)?;
        }
    }
    for i in 1..=2 * n - 1 {
        for j in 1..=4 * n {
            let d = BigUint::from(diff(4 * i + 1, 2 * j) as u64) * unit;
            instance.set_distance(&w(i), &v(j), d)?;
        }
    }
    for i in 1..=n {
        for j in 1..=4 * n {
            let d = if j <= 2 * n {
                if j % 2 == 0 {
                    unit + graph.weight(i - 1, j / 2 - 1)
                } else {
                    unit.clone()
                }
            } else {
                BigUint::from((j - 2 * n) as u64) * &two_units + unit
            };
            instance.set_distance(&a(i), &v(j), d)?;
        }
        for j in 1..=2 * n - 1 {
            instance.set_distance(&a(i), &w(j), two_units.clone())?;
        }
        for j in i + 1..=n {
            instance.set_distance(&a(i), &a(j), four_units.clone())?;
        }
    }
    for i in 1..=n {
        for j in 1..=4 * n {
            let d = if j <= 2 * n {
                BigUint::from((2 * n - j + 1) as u64) * &two_units + unit
            } else if j % 2 == 0 {
                unit + &constants.max_weight - graph.weight(i - 1, j / 2 - n - 1)
            } else {
                unit.clone()
            };
            instance.set_distance(&b(i), &v(j), d)?;
        }
        for j in 1..=2 * n - 1 {
            instance.set_distance(&b(i), &w(j), two_units.clone())?;
        }
        for j in i + 1..=n {
            instance.set_distance(&b(i), &b(j), four_units.clone())?;
        }
        instance.set_distance(&a(i), &b(i), BigUint::from(n as u64) * &four_units)?;
    }

    Ok(Gadget {
        instance,
        mid_name: w(n),
        constants,
        source: graph.clone(),
        prefix: prefix.to_string(),
    })
}

/// The canonical increasing vertex sequence for a permutation: interval `i`
/// hosts `a[perm[i]]` on the left half and `b[perm[i]]` on the right half.
fn canonical_sequence(gadget: &Gadget, perm: &[usize]) -> Vec<String> {
    let n = gadget.side();
    let mut seq = Vec::with_capacity(8 * n - 1);
    for i in 1..=n {
        seq.push(gadget.v(2 * i - 1));
        seq.push(gadget.a(perm[i - 1] + 1));
        seq.push(gadget.v(2 * i));
        seq.push(gadget.w(i));
    }
    for i in 1..=n {
        seq.push(gadget.v(2 * n + 2 * i - 1));
        seq.push(gadget.b(perm[i - 1] + 1));
        seq.push(gadget.v(2 * n + 2 * i));
        if i < n {
            seq.push(gadget.w(n + i));
        }
    }
    seq
}

fn validate_permutation(n: usize, perm: &[usize]) -> Result<(), GadgetError> {
    if perm.len() != n {
        return Err(GadgetError::NotAPermutation(format!("{} entries for side {}", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(GadgetError::NotAPermutation(format!("entry {p} repeats or is out of range")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// The unique YES-coloring whose interval occupancy realizes `perm`
/// (0-based: interval `i` hosts a-vertex `perm[i]`): colors walk the
/// canonical sequence with every consecutive gap tight. Its middle offset
/// is the base offset plus the matching weight `sum_i w(perm[i], i)`.
pub fn canonical_coloring(gadget: &Gadget, perm: &[usize]) -> Result<Coloring, GadgetError> {
    validate_permutation(gadget.side(), perm)?;
    let seq = canonical_sequence(gadget, perm);
    let mut coloring = Coloring::new();
    let mut color = BigUint::one();
    coloring.set(seq[0].clone(), color.clone());
    for pair in seq.windows(2) {
        color += gadget.instance.distance(&pair[0], &pair[1])?;
        coloring.set(pair[1].clone(), color.clone());
    }
    Ok(coloring)
}

/// Reads the permutation back off a YES-coloring: interval `i` (between
/// the colors of `v{2i-1}` and `v{2i}`) must contain exactly one a-vertex.
pub fn extract_permutation(gadget: &Gadget, coloring: &Coloring) -> Result<Vec<usize>, GadgetError> {
    let n = gadget.side();
    let left = coloring
        .get(&gadget.v_left())
        .ok_or_else(|| ChannelError::PartialColoring(gadget.v_left()))?;
    let right = coloring
        .get(&gadget.v_right())
        .ok_or_else(|| ChannelError::PartialColoring(gadget.v_right()))?;
    if left > right {
        return Err(GadgetError::NotOriented);
    }
    let mut perm = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for i in 1..=n {
        let lo = coloring
            .get(&gadget.v(2 * i - 1))
            .ok_or_else(|| ChannelError::PartialColoring(gadget.v(2 * i - 1)))?;
        let hi = coloring
            .get(&gadget.v(2 * i))
            .ok_or_else(|| ChannelError::PartialColoring(gadget.v(2 * i)))?;
        let mut inside = Vec::new();
        for j in 1..=n {
            let c = coloring
                .get(&gadget.a(j))
                .ok_or_else(|| ChannelError::PartialColoring(gadget.a(j)))?;
            if c > lo && c < hi {
                inside.push(j - 1);
            }
        }
        if inside.len() != 1 {
            return Err(GadgetError::IntervalOccupancy { interval: i, found: inside.len() });
        }
        let j = inside[0];
        if seen[j] {
            return Err(GadgetError::IntervalOccupancy { interval: i, found: 2 });
        }
        seen[j] = true;
        perm.push(j);
    }
    Ok(perm)
}

/// Instance probing whether some YES-coloring puts the middle vertex
/// exactly `base offset + delta` above the left anchor: both middle gaps
/// are raised so the offset is pinned, and the probe is YES exactly when
/// `delta` is an achievable matching weight.
pub fn offset_probe(gadget: &Gadget, delta: &BigUint) -> Result<CaInstance, GadgetError> {
    let max = BigUint::from(gadget.side() as u64) * &gadget.constants.max_weight;
    if delta > &max {
        return Err(GadgetError::OffsetOutOfRange { offset: delta.to_string(), max: max.to_string() });
    }
    let mut probe = gadget.instance.clone();
    let lower = &gadget.constants.base_offset + delta;
    let upper = &gadget.constants.span - 1u32 - &lower;
    probe.raise_distance(&gadget.v_left(), &gadget.v_mid(), lower)?;
    probe.raise_distance(&gadget.v_mid(), &gadget.v_right(), upper)?;
    Ok(probe)
}

/// Adds outer anchors `w_left`/`w_right` at distances `l`/`r` from every
/// original vertex, stretching the span bound to `l + s + r`. YES-colorings
/// of the result restrict to YES-colorings of the original with the inner
/// anchors offset by exactly `l` and `r`.
///
/// Two extra anchor distances pin the inner orientation: `w_left` sits
/// `l + s - 1` from `v_right` and `w_right` sits `s - 1 + r` from `v_left`,
/// both exactly tight for co-oriented colorings. Without them a mirrored
/// inner coloring also fits between the anchors, which would let two merged
/// gadgets disagree about which end is left and break the offset readout
/// at the shared middle vertex.
pub fn ca_extend(
    instance: &CaInstance,
    v_left: &str,
    v_right: &str,
    l: &BigUint,
    r: &BigUint,
    w_left: &str,
    w_right: &str,
) -> Result<CaInstance, GadgetError> {
    for handle in [v_left, v_right] {
        if !instance.contains_vertex(handle) {
            return Err(ChannelError::UnknownVertex(handle.to_string()).into());
        }
    }
    let mut names: Vec<String> = instance.vertices().to_vec();
    names.push(w_left.to_string());
    names.push(w_right.to_string());
    let bound = l + instance.span_bound() + r;
    let spanning = instance.span_bound() - 1u32;
    let mut extended = CaInstance::new(names, bound)?;
    for (x, y, d) in instance.nonzero_distances() {
        extended.set_distance(x, y, d.clone())?;
    }
    for x in instance.vertices() {
        extended.set_distance(w_left, x, l.clone())?;
        extended.set_distance(w_right, x, r.clone())?;
    }
    extended.set_distance(w_left, w_right, l + &spanning + r)?;
    extended.set_distance(w_left, v_right, l + &spanning)?;
    extended.set_distance(w_right, v_left, &spanning + r)?;
    Ok(extended)
}

/// Merges two instances with equal span bounds into one over the vertex
/// union, pinning all four cross end-pairs to `s - 1`; `shared` declares
/// exactly which identifiers are meant to coincide (their distances merge
/// by maximum).
pub fn ca_merge(
    first: &CaInstance,
    first_ends: (&str, &str),
    second: &CaInstance,
    second_ends: (&str, &str),
    shared: &[&str],
) -> Result<CaInstance, GadgetError> {
    if first.span_bound() != second.span_bound() {
        return Err(GadgetError::SpanBoundMismatch {
            left: first.span_bound().to_string(),
            right: second.span_bound().to_string(),
        });
    }
    for name in shared {
        if !first.contains_vertex(name) || !second.contains_vertex(name) {
            return Err(GadgetError::MissingSharedVertex(name.to_string()));
        }
    }
    for name in second.vertices() {
        if first.contains_vertex(name) && !shared.contains(&name.as_str()) {
            return Err(GadgetError::UnintendedCollision(name.clone()));
        }
    }
    for ends in [first_ends, second_ends] {
        for handle in [ends.0, ends.1] {
            if !first.contains_vertex(handle) && !second.contains_vertex(handle) {
                return Err(ChannelError::UnknownVertex(handle.to_string()).into());
            }
        }
    }

    let mut names: Vec<String> = first.vertices().to_vec();
    names.extend(second.vertices().iter().filter(|v| !first.contains_vertex(v)).cloned());
    let mut merged = CaInstance::new(names, first.span_bound().clone())?;
    for (x, y, d) in first.nonzero_distances() {
        merged.set_distance(x, y, d.clone())?;
    }
    // shared pairs pick up the maximum of the two tables
    for (x, y, d) in second.nonzero_distances() {
        merged.raise_distance(x, y, d.clone())?;
    }
    let spanning = merged.span_bound() - 1u32;
    for left in [first_ends.0, second_ends.0] {
        for right in [first_ends.1, second_ends.1] {
            merged.set_distance(left, right, spanning.clone())?;
        }
    }
    Ok(merged)
}

/// Two gadgets spliced into one instance sharing the middle vertex.
#[derive(Debug, Clone)]
pub struct MergedGadget {
    pub instance: CaInstance,
    /// First gadget (prefix `g1.`), middle renamed to the shared name.
    pub left: Gadget,
    /// Second gadget (prefix `g2.`).
    pub right: Gadget,
    /// `max(l1, l2)`: the common middle offset after extension.
    pub base_offset: BigUint,
    /// Span bound of the merged instance.
    pub span: BigUint,
    pub w_left_1: String,
    pub w_right_1: String,
    pub w_left_2: String,
    pub w_right_2: String,
    pub v_mid: String,
}

/// Full reduction from a pair of graphs: encode both, align their middle
/// offsets by extension, identify the middle vertices, merge, and cap the
/// distances at the final span bound. The result has a YES-coloring exactly
/// when the graphs admit equal-weight perfect matchings, and has
/// `8*n1 + 8*n2 + 1` vertices.
pub fn cmw_to_ca(g1: &WeightedBipartiteGraph, g2: &WeightedBipartiteGraph) -> Result<MergedGadget, GadgetError> {
    let mut left = matchings_to_ca_prefixed(g1, "g1.")?;
    let mut right = matchings_to_ca_prefixed(g2, "g2.")?;
    let v_mid = "vM".to_string();
    left.rename_mid(&v_mid)?;
    right.rename_mid(&v_mid)?;

    let l1 = &left.constants.base_offset;
    let l2 = &right.constants.base_offset;
    let s1 = &left.constants.span;
    let s2 = &right.constants.span;
    let base_offset = l1.max(l2).clone();
    let reach1 = s1 - l1;
    let reach2 = s2 - l2;
    let span = &base_offset + reach1.clone().max(reach2.clone());

    let ext1 = ca_extend(
        &left.instance,
        &left.v_left(),
        &left.v_right(),
        &(&base_offset - l1),
        &(&span - &base_offset - &reach1),
        "g1.wL",
        "g1.wR",
    )?;
    let ext2 = ca_extend(
        &right.instance,
        &right.v_left(),
        &right.v_right(),
        &(&base_offset - l2),
        &(&span - &base_offset - &reach2),
        "g2.wL",
        "g2.wR",
    )?;
    let mut instance = ca_merge(&ext1, ("g1.wL", "g1.wR"), &ext2, ("g2.wL", "g2.wR"), &[&v_mid])?;
    instance.clamp_distances(&span);
    assert_eq!(
        instance.vertex_count(),
        8 * left.side() + 8 * right.side() + 1,
        "merged vertex count"
    );

    Ok(MergedGadget {
        instance,
        left,
        right,
        base_offset,
        span,
        w_left_1: "g1.wL".into(),
        w_right_1: "g1.wR".into(),
        w_left_2: "g2.wL".into(),
        w_right_2: "g2.wR".into(),
        v_mid,
    })
}

impl MergedGadget {
    /// Composes canonical colorings for two equal-weight matchings into an
    /// explicit YES-coloring of the merged instance: each side is shifted
    /// so its outer left anchor sits at color 1 and its outer right anchor
    /// at the span bound, which makes the shared middle colors coincide.
    pub fn compose_coloring(&self, left_perm: &[usize], right_perm: &[usize]) -> Result<Coloring, GadgetError> {
        let left_weight = matching_weight_of_intervals(self.left.source(), left_perm);
        let right_weight = matching_weight_of_intervals(self.right.source(), right_perm);
        if left_weight != right_weight {
            return Err(GadgetError::WeightMismatch {
                left: left_weight.to_string(),
                right: right_weight.to_string(),
            });
        }
        let mut coloring = Coloring::new();
        for (gadget, w_left, w_right, perm) in [
            (&self.left, &self.w_left_1, &self.w_right_1, left_perm),
            (&self.right, &self.w_left_2, &self.w_right_2, right_perm),
        ] {
            let side = canonical_coloring(gadget, perm)?;
            let shift = &self.base_offset - &gadget.constants.base_offset;
            for (vertex, color) in side.iter() {
                coloring.set(vertex.clone(), color + &shift);
            }
            coloring.set(w_left.clone(), BigUint::one());
            coloring.set(w_right.clone(), self.span.clone());
        }
        Ok(coloring)
    }
}

/// Weight of the matching in which interval `i` hosts row `perm[i]`:
/// `sum_i w(perm[i], i)`.
pub fn matching_weight_of_intervals(graph: &WeightedBipartiteGraph, perm: &[usize]) -> BigUint {
    perm.iter().enumerate().map(|(i, &row)| graph.weight(row, i)).sum()
}
