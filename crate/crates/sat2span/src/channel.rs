//! Channel assignment instances, proper colorings, and exact solvers used
//! as verification oracles.
//!
//! The solver enumerates vertex orderings and left-packs colors greedily;
//! some ordering (sort any optimal coloring by color) reproduces the
//! optimum, so branch-and-bound over orderings is exact. It is deliberately
//! a verification oracle, not a competitive solver.

use crate::budget::{Budget, BudgetExceeded};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ChannelError {
    #[error("duplicate vertex identifier {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("distance from {0:?} to itself must stay zero")]
    SelfDistance(String),
    #[error("span bound must be positive")]
    ZeroSpanBound,
    #[error("coloring misses vertex {0:?}")]
    PartialColoring(String),
    #[error("coloring is empty")]
    EmptyColoring,
    #[error("ordering is not a permutation of the vertex set: {0}")]
    NotAPermutation(String),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("enumeration found slack (a greedy coloring with span below the bound); the coloring census is only a lower bound")]
    NotRigid,
}

/// A channel assignment instance: named vertices, a symmetric minimum
/// distance table with zero diagonal (zero for unlisted pairs), and a
/// span bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaInstance {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    dist: Vec<Vec<BigUint>>,
    span_bound: BigUint,
}

impl CaInstance {
    pub fn new(vertices: Vec<String>, span_bound: BigUint) -> Result<Self, ChannelError> {
        if span_bound.is_zero() {
            return Err(ChannelError::ZeroSpanBound);
        }
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(ChannelError::DuplicateVertex(v.clone()));
            }
        }
        let n = vertices.len();
        Ok(CaInstance { vertices, index, dist: vec![vec![BigUint::zero(); n]; n], span_bound })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn span_bound(&self) -> &BigUint {
        &self.span_bound
    }

    pub fn set_span_bound(&mut self, span_bound: BigUint) -> Result<(), ChannelError> {
        if span_bound.is_zero() {
            return Err(ChannelError::ZeroSpanBound);
        }
        self.span_bound = span_bound;
        Ok(())
    }

    fn vertex_id(&self, name: &str) -> Result<usize, ChannelError> {
        self.index.get(name).copied().ok_or_else(|| ChannelError::UnknownVertex(name.to_string()))
    }

    pub fn distance(&self, x: &str, y: &str) -> Result<&BigUint, ChannelError> {
        Ok(&self.dist[self.vertex_id(x)?][self.vertex_id(y)?])
    }

    /// Sets the symmetric minimum distance between two distinct vertices.
    pub fn set_distance(&mut self, x: &str, y: &str, value: BigUint) -> Result<(), ChannelError> {
        let xi = self.vertex_id(x)?;
        let yi = self.vertex_id(y)?;
        if xi == yi {
            return Err(ChannelError::SelfDistance(x.to_string()));
        }
        self.dist[xi][yi] = value.clone();
        self.dist[yi][xi] = value;
        Ok(())
    }

    /// Raises the distance to `value` if the current entry is smaller.
    pub fn raise_distance(&mut self, x: &str, y: &str, value: BigUint) -> Result<(), ChannelError> {
        if self.distance(x, y)? < &value {
            self.set_distance(x, y, value)?;
        }
        Ok(())
    }

    /// Caps every distance at `limit`. Any distance at or above the span
    /// bound is unsatisfiable either way, so capping at the bound keeps the
    /// YES/NO answer.
    pub fn clamp_distances(&mut self, limit: &BigUint) {
        for row in &mut self.dist {
            for d in row {
                if &*d > limit {
                    *d = limit.clone();
                }
            }
        }
    }

    pub fn max_distance(&self) -> BigUint {
        self.dist.iter().flatten().max().cloned().unwrap_or_else(BigUint::zero)
    }

    /// Nonzero distances as `(x, y, d)` with `x` before `y` in vertex order.
    pub fn nonzero_distances(&self) -> impl Iterator<Item = (&str, &str, &BigUint)> {
        self.dist.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().enumerate().skip(i + 1).filter(|(_, d)| !d.is_zero()).map(move |(j, d)| {
                (self.vertices[i].as_str(), self.vertices[j].as_str(), d)
            })
        })
    }

    pub fn rename_vertex(&mut self, old: &str, new: &str) -> Result<(), ChannelError> {
        let id = self.vertex_id(old)?;
        if self.index.contains_key(new) {
            return Err(ChannelError::DuplicateVertex(new.to_string()));
        }
        self.index.remove(old);
        self.index.insert(new.to_string(), id);
        self.vertices[id] = new.to_string();
        Ok(())
    }

    /// Checks the coloring against every pair; `None` means proper,
    /// otherwise the first violating pair in vertex order is returned.
    pub fn check_proper(&self, coloring: &Coloring) -> Result<Option<Violation>, ChannelError> {
        let colors: Vec<&BigUint> = self
            .vertices
            .iter()
            .map(|v| coloring.get(v).ok_or_else(|| ChannelError::PartialColoring(v.clone())))
            .collect::<Result<_, _>>()?;
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                let required = &self.dist[i][j];
                if required.is_zero() {
                    continue;
                }
                let gap = abs_diff(colors[i], colors[j]);
                if &gap < required {
                    return Ok(Some(Violation {
                        x: self.vertices[i].clone(),
                        y: self.vertices[j].clone(),
                        required: required.clone(),
                        gap,
                    }));
                }
            }
        }
        Ok(None)
    }

    pub fn is_proper(&self, coloring: &Coloring) -> Result<bool, ChannelError> {
        Ok(self.check_proper(coloring)?.is_none())
    }

    /// Proper and within the span bound.
    pub fn is_yes_coloring(&self, coloring: &Coloring) -> Result<bool, ChannelError> {
        Ok(self.is_proper(coloring)? && span_of(coloring)? <= self.span_bound)
    }
}

/// First pair whose color gap falls short of the required distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub x: String,
    pub y: String,
    pub required: BigUint,
    pub gap: BigUint,
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        b - a
    }
}

/// A total color assignment, vertex name to color.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coloring(BTreeMap<String, BigUint>);

impl Coloring {
    pub fn new() -> Coloring {
        Coloring::default()
    }

    pub fn set(&mut self, vertex: impl Into<String>, color: BigUint) {
        self.0.insert(vertex.into(), color);
    }

    pub fn get(&self, vertex: &str) -> Option<&BigUint> {
        self.0.get(vertex)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigUint)> {
        self.0.iter()
    }

    /// Same coloring with every color increased by `offset`.
    pub fn shifted(&self, offset: &BigUint) -> Coloring {
        Coloring(self.0.iter().map(|(v, c)| (v.clone(), c + offset)).collect())
    }

    /// Union with another coloring; shared vertices must agree.
    pub fn merged_with(&self, other: &Coloring) -> Option<Coloring> {
        let mut out = self.0.clone();
        for (v, c) in &other.0 {
            match out.get(v) {
                Some(existing) if existing != c => return None,
                _ => {
                    out.insert(v.clone(), c.clone());
                }
            }
        }
        Some(Coloring(out))
    }
}

/// `max - min + 1` over the assigned colors.
pub fn span_of(coloring: &Coloring) -> Result<BigUint, ChannelError> {
    let max = coloring.0.values().max().ok_or(ChannelError::EmptyColoring)?;
    let min = coloring.0.values().min().expect("nonempty");
    Ok(max - min + 1u32)
}

/// Left-packed placement along an ordering: the first vertex gets color 1,
/// each next vertex the smallest color satisfying all constraints towards
/// already placed vertices. A vertex with no positive distance into the
/// prefix drops to color 1.
pub fn greedy_for_order(instance: &CaInstance, ordering: &[String]) -> Result<Coloring, ChannelError> {
    let ids = ordering_ids(instance, ordering)?;
    let mut colors: Vec<BigUint> = Vec::with_capacity(ids.len());
    for (pos, &v) in ids.iter().enumerate() {
        let mut color = BigUint::one();
        for (prev_pos, &u) in ids[..pos].iter().enumerate() {
            let d = &instance.dist[u][v];
            if !d.is_zero() {
                let candidate = &colors[prev_pos] + d;
                if candidate > color {
                    color = candidate;
                }
            }
        }
        colors.push(color);
    }
    let mut coloring = Coloring::new();
    for (pos, &v) in ids.iter().enumerate() {
        coloring.set(instance.vertices[v].clone(), colors[pos].clone());
    }
    Ok(coloring)
}

fn ordering_ids(instance: &CaInstance, ordering: &[String]) -> Result<Vec<usize>, ChannelError> {
    if ordering.len() != instance.vertex_count() {
        return Err(ChannelError::NotAPermutation(format!(
            "{} names for {} vertices",
            ordering.len(),
            instance.vertex_count()
        )));
    }
    let mut seen = vec![false; instance.vertex_count()];
    let mut ids = Vec::with_capacity(ordering.len());
    for name in ordering {
        let id = instance.vertex_id(name)?;
        if seen[id] {
            return Err(ChannelError::NotAPermutation(format!("{name:?} repeats")));
        }
        seen[id] = true;
        ids.push(id);
    }
    Ok(ids)
}

/// Result of the exact solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Minimal span within the cap, with the witnessing ordering and its
    /// greedy coloring (lexicographically least optimal ordering).
    Solved { span: BigUint, ordering: Vec<String>, coloring: Coloring, nodes: u64 },
    /// Every ordering exceeds the cap.
    ExceedsCap { nodes: u64 },
}

/// Exact minimal span up to `cap` by depth-first branch-and-bound over
/// vertex orderings, exploring candidates in identifier order. The node
/// budget counts vertex placements; exhausting it is an error distinct
/// from [`SolveOutcome::ExceedsCap`].
pub fn solve_exact(instance: &CaInstance, cap: &BigUint, budget: Budget) -> Result<SolveOutcome, ChannelError> {
    let n = instance.vertex_count();
    if n == 0 {
        return Ok(SolveOutcome::Solved {
            span: BigUint::one(),
            ordering: Vec::new(),
            coloring: Coloring::new(),
            nodes: 0,
        });
    }
    let mut slots: Vec<usize> = (0..n).collect();
    slots.sort_by(|&a, &b| instance.vertices[a].cmp(&instance.vertices[b]));

    // fast path when every quantity fits in 64 bits; u128 arithmetic keeps
    // single additions overflow-free
    let fits = u64::try_from(cap).is_ok()
        && instance.dist.iter().flatten().all(|d| u64::try_from(d).is_ok());
    let (best, nodes) = if fits {
        let dist: Vec<Vec<u128>> = slots
            .iter()
            .map(|&a| slots.iter().map(|&b| u128::try_from(&instance.dist[a][b]).unwrap()).collect())
            .collect();
        let cap128 = u128::try_from(cap).unwrap();
        let (best, nodes) = branch_and_bound(&dist, &cap128, budget.0)?;
        (
            best.map(|(span, order, colors)| {
                (BigUint::from(span), order, colors.into_iter().map(BigUint::from).collect())
            }),
            nodes,
        )
    } else {
        let dist: Vec<Vec<BigUint>> = slots
            .iter()
            .map(|&a| slots.iter().map(|&b| instance.dist[a][b].clone()).collect())
            .collect();
        branch_and_bound(&dist, cap, budget.0)?
    };

    match best {
        None => Ok(SolveOutcome::ExceedsCap { nodes }),
        Some((span, order, colors)) => {
            let ordering: Vec<String> = order.iter().map(|&s| instance.vertices[slots[s]].clone()).collect();
            let mut coloring = Coloring::new();
            for (slot, color) in colors.into_iter().enumerate() {
                coloring.set(instance.vertices[slots[slot]].clone(), color);
            }
            Ok(SolveOutcome::Solved { span, ordering, coloring, nodes })
        }
    }
}

/// Number abstraction so the search runs on `u128` when the instance fits
/// and on `BigUint` otherwise.
trait SolveNum: Clone + Ord {
    fn first_color() -> Self;
    fn is_zero_ref(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
}

impl SolveNum for u128 {
    fn first_color() -> Self {
        1
    }
    fn is_zero_ref(&self) -> bool {
        *self == 0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
}

impl SolveNum for BigUint {
    fn first_color() -> Self {
        One::one()
    }
    fn is_zero_ref(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
}

type Best<T> = Option<(T, Vec<usize>, Vec<T>)>;

struct Search<'a, T> {
    dist: &'a [Vec<T>],
    cap: &'a T,
    budget: u64,
    nodes: u64,
    placement: Vec<usize>,
    placed: Vec<bool>,
    colors: Vec<Option<T>>,
    /// For unplaced `u`: the greedy color `u` would receive right now,
    /// which lower-bounds its eventual color.
    lb: Vec<T>,
    best: Best<T>,
}

fn branch_and_bound<T: SolveNum>(
    dist: &[Vec<T>],
    cap: &T,
    budget: u64,
) -> Result<(Best<T>, u64), BudgetExceeded> {
    let n = dist.len();
    let mut search = Search {
        dist,
        cap,
        budget,
        nodes: 0,
        placement: Vec::with_capacity(n),
        placed: vec![false; n],
        colors: vec![None; n],
        lb: vec![T::first_color(); n],
        best: None,
    };
    search.descend(&T::first_color())?;
    Ok((search.best, search.nodes))
}

impl<T: SolveNum> Search<'_, T> {
    fn descend(&mut self, max_color: &T) -> Result<(), BudgetExceeded> {
        let n = self.dist.len();
        if self.placement.len() == n {
            // greedy colors start at one, so the span equals the max color
            let better = match &self.best {
                Some((span, _, _)) => max_color < span,
                None => max_color <= self.cap,
            };
            if better && max_color <= self.cap {
                let colors = self.colors.iter().map(|c| c.clone().expect("all placed")).collect();
                self.best = Some((max_color.clone(), self.placement.clone(), colors));
            }
            return Ok(());
        }
        for v in 0..n {
            if self.placed[v] {
                continue;
            }
            // placing v right after a zero-distance predecessor with a larger
            // slot commutes to a lexicographically smaller ordering with the
            // identical coloring, which is explored elsewhere
            if let Some(&last) = self.placement.last() {
                if v < last && self.dist[last][v].is_zero_ref() {
                    continue;
                }
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BudgetExceeded {
                    task: "ordering branch and bound",
                    required: format!("{}", self.nodes),
                    limit: self.budget,
                });
            }
            let color = self.lb[v].clone();
            let new_max = if &color > max_color { color.clone() } else { max_color.clone() };
            if &new_max > self.cap || self.beaten(&new_max) {
                continue;
            }
            // place v, lifting the lower bounds of its unplaced neighbours
            self.placed[v] = true;
            self.colors[v] = Some(color.clone());
            self.placement.push(v);
            let mut undo: Vec<(usize, T)> = Vec::new();
            for u in 0..n {
                if self.placed[u] {
                    continue;
                }
                let d = &self.dist[v][u];
                if !d.is_zero_ref() {
                    let candidate = color.add_ref(d);
                    if candidate > self.lb[u] {
                        undo.push((u, std::mem::replace(&mut self.lb[u], candidate)));
                    }
                }
            }
            if !self.beaten(&self.bound(&new_max)) {
                self.descend(&new_max)?;
            }
            for (u, old) in undo.into_iter().rev() {
                self.lb[u] = old;
            }
            self.placement.pop();
            self.colors[v] = None;
            self.placed[v] = false;
        }
        Ok(())
    }

    /// True when `value` cannot improve on the incumbent or the cap.
    fn beaten(&self, value: &T) -> bool {
        if value > self.cap {
            return true;
        }
        match &self.best {
            Some((span, _, _)) => value >= span,
            None => false,
        }
    }

    /// Admissible span lower bound: the running max, every unplaced
    /// vertex's pending greedy color, and for unplaced pairs at positive
    /// distance the smaller pending color plus the distance.
    fn bound(&self, max_color: &T) -> T {
        let n = self.dist.len();
        let mut bound = max_color.clone();
        let unplaced: Vec<usize> = (0..n).filter(|&u| !self.placed[u]).collect();
        for &u in &unplaced {
            if self.lb[u] > bound {
                bound = self.lb[u].clone();
            }
        }
        for (i, &u) in unplaced.iter().enumerate() {
            for &w in &unplaced[i + 1..] {
                let d = &self.dist[u][w];
                if d.is_zero_ref() {
                    continue;
                }
                let lower = if self.lb[u] <= self.lb[w] { &self.lb[u] } else { &self.lb[w] };
                let reach = lower.add_ref(d);
                if reach > bound {
                    bound = reach;
                }
            }
        }
        bound
    }
}

/// All normalized YES-colorings reachable by greedy placement, plus a
/// rigidity flag.
///
/// Greedy enumeration is complete exactly when YES-colorings have no slack
/// (every consecutive gap tight); `rigid == false` means some greedy
/// coloring landed strictly below the span bound, so the census is only a
/// lower bound.
#[derive(Debug, Clone)]
pub struct YesEnumeration {
    pub colorings: Vec<Coloring>,
    pub rigid: bool,
}

/// Enumerates greedy colorings over all vertex orderings, keeping those
/// with span at most the bound. When `orientation` names two handles, only
/// colorings with `c(first) <= c(second)` are kept.
pub fn enumerate_yes_colorings(
    instance: &CaInstance,
    orientation: Option<(&str, &str)>,
    budget: Budget,
) -> Result<YesEnumeration, ChannelError> {
    budget.admits_factorial("ordering enumeration", instance.vertex_count() as u64)?;
    let oriented = match orientation {
        Some((x, y)) => Some((instance.vertex_id(x)?, instance.vertex_id(y)?)),
        None => None,
    };
    let n = instance.vertex_count();
    let mut collected: BTreeSet<Vec<BigUint>> = BTreeSet::new();
    let mut rigid = true;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut colors: Vec<Option<BigUint>> = vec![None; n];
    enumerate_orders(
        instance,
        &mut order,
        &mut used,
        &mut colors,
        &BigUint::zero(),
        &mut |colors, max_color| {
            let span = max_color.clone();
            if &span < instance.span_bound() {
                rigid = false;
            }
            if &span <= instance.span_bound() {
                let snapshot: Vec<BigUint> =
                    colors.iter().map(|c| c.clone().expect("complete")).collect();
                if let Some((x, y)) = oriented {
                    if snapshot[x] > snapshot[y] {
                        return;
                    }
                }
                collected.insert(snapshot);
            }
        },
    );
    let colorings = collected
        .into_iter()
        .map(|snapshot| {
            let mut coloring = Coloring::new();
            for (i, color) in snapshot.into_iter().enumerate() {
                coloring.set(instance.vertices[i].clone(), color);
            }
            coloring
        })
        .collect();
    Ok(YesEnumeration { colorings, rigid })
}

fn enumerate_orders(
    instance: &CaInstance,
    order: &mut Vec<usize>,
    used: &mut [bool],
    colors: &mut [Option<BigUint>],
    max_color: &BigUint,
    sink: &mut impl FnMut(&[Option<BigUint>], &BigUint),
) {
    let n = instance.vertex_count();
    if order.len() == n {
        sink(colors, max_color);
        return;
    }
    for v in 0..n {
        if used[v] {
            continue;
        }
        let mut color = BigUint::one();
        for &u in order.iter() {
            let d = &instance.dist[u][v];
            if !d.is_zero() {
                let candidate = colors[u].as_ref().expect("placed") + d;
                if candidate > color {
                    color = candidate;
                }
            }
        }
        // completions only grow the max, so a prefix beyond the bound is dead
        if &color > instance.span_bound() {
            continue;
        }
        let new_max = if &color > max_color { color.clone() } else { max_color.clone() };
        used[v] = true;
        colors[v] = Some(color);
        order.push(v);
        enumerate_orders(instance, order, used, colors, &new_max, sink);
        order.pop();
        colors[v] = None;
        used[v] = false;
    }
}

/// True when every YES-coloring places `x` and `y` exactly `span bound - 1`
/// apart. Requires a rigid enumeration to certify the positive answer; a
/// single counterexample decides the negative one regardless.
pub fn check_spanned(instance: &CaInstance, x: &str, y: &str, budget: Budget) -> Result<bool, ChannelError> {
    let xi = instance.vertex_id(x)?;
    let yi = instance.vertex_id(y)?;
    let target = instance.span_bound() - 1u32;
    let enumeration = enumerate_yes_colorings(instance, None, budget)?;
    for coloring in &enumeration.colorings {
        let cx = coloring.get(&instance.vertices[xi]).expect("total");
        let cy = coloring.get(&instance.vertices[yi]).expect("total");
        if abs_diff(cx, cy) != target {
            return Ok(false);
        }
    }
    if !enumeration.rigid {
        return Err(ChannelError::NotRigid);
    }
    Ok(true)
}
