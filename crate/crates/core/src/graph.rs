//! Simple undirected graphs and the exact subroutines used on them: induced
//! matchings, distance-2 independent sets, perfect elimination orderings and
//! maximum-weight independent sets on chordal graphs.

use std::collections::VecDeque;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{check_limit, Error, Result};

/// Capacity of the bitset-based exact searches (induced matching edges,
/// distance-2 independent set vertices).
pub const EXACT_SEARCH_LIMIT: usize = 128;

/// Vertex bound for [`brute_mwis`].
pub const BRUTE_MWIS_LIMIT: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph::with_labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        Graph {
            labels,
            adj: vec![Vec::new(); n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.labels.push(label.into());
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop on vertex {u}");
        if let Err(i) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(i, v);
        }
        if let Err(i) = self.adj[v].binary_search(&u) {
            self.adj[v].insert(i, u);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if let Ok(i) = self.adj[u].binary_search(&v) {
            self.adj[u].remove(i);
        }
        if let Ok(i) = self.adj[v].binary_search(&u) {
            self.adj[v].remove(i);
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    /// The subgraph induced by `keep`, with vertices renumbered in order.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph {
        let mut g = Graph::with_labels(keep.iter().map(|&v| self.labels[v].clone()).collect());
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

/// `L(G)`: one vertex per edge of `G` (in [`Graph::edges`] order), adjacent
/// when the edges share an endpoint.
pub fn line_graph(g: &Graph) -> (Graph, Vec<(usize, usize)>) {
    let edges = g.edges();
    let labels = edges
        .iter()
        .map(|&(u, v)| format!("{{{},{}}}", g.label(u), g.label(v)))
        .collect();
    let mut l = Graph::with_labels(labels);
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if a == c || a == d || b == c || b == d {
                l.add_edge(i, j);
            }
        }
    }
    (l, edges)
}

/// Size of a maximum independent set in the graph given by bitmask adjacency
/// rows, restricted to the candidate set `cand`.
fn max_independent_set(adj: &[u128], cand: u128) -> usize {
    if cand == 0 {
        return 0;
    }
    let mut min_v = usize::MAX;
    let mut min_d = u32::MAX;
    let mut max_v = usize::MAX;
    let mut max_d = 0;
    let mut bits = cand;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let d = (adj[v] & cand).count_ones();
        if d < min_d {
            min_d = d;
            min_v = v;
        }
        if d > max_d {
            max_d = d;
            max_v = v;
        }
    }
    if min_d <= 1 {
        // some maximum independent set contains a vertex of degree <= 1
        return 1 + max_independent_set(adj, cand & !(adj[min_v] | 1u128 << min_v));
    }
    let with = 1 + max_independent_set(adj, cand & !(adj[max_v] | 1u128 << max_v));
    let without = max_independent_set(adj, cand & !(1u128 << max_v));
    with.max(without)
}

/// `mim(G)`: the size of a maximum induced matching, by exact search over a
/// conflict graph on the edges of `G`.
pub fn max_induced_matching(g: &Graph) -> Result<usize> {
    let edges = g.edges();
    check_limit("induced matching edges", edges.len(), EXACT_SEARCH_LIMIT)?;
    let touches = |x: usize, y: usize| x == y || g.adjacent(x, y);
    let mut adj = vec![0u128; edges.len()];
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if touches(a, c) || touches(a, d) || touches(b, c) || touches(b, d) {
                adj[i] |= 1u128 << j;
                adj[j] |= 1u128 << i;
            }
        }
    }
    let all = if edges.len() == 128 {
        u128::MAX
    } else {
        (1u128 << edges.len()) - 1
    };
    Ok(max_independent_set(&adj, all))
}

/// `mim(G[V1, V2])` for disjoint vertex sets.
pub fn mim_cut(g: &Graph, v1: &[usize], v2: &[usize]) -> Result<usize> {
    let mut side = vec![0u8; g.num_vertices()];
    for &v in v1 {
        side[v] = 1;
    }
    for &v in v2 {
        if side[v] == 1 {
            return Err(Error::InvalidDecomposition(format!(
                "vertex {} lies on both sides of the cut",
                g.label(v)
            )));
        }
        side[v] = 2;
    }
    let mut cut = Graph::new(g.num_vertices());
    for (u, v) in g.edges() {
        if side[u] != 0 && side[v] != 0 && side[u] != side[v] {
            cut.add_edge(u, v);
        }
    }
    max_induced_matching(&cut)
}

/// `α²(G)`: the largest set of vertices pairwise at distance more than 2.
pub fn distance2_independent_max(g: &Graph) -> Result<usize> {
    let n = g.num_vertices();
    check_limit("distance-2 independent set vertices", n, EXACT_SEARCH_LIMIT)?;
    let mut adj = vec![0u128; n];
    for v in 0..n {
        for &u in g.neighbors(v) {
            adj[v] |= 1u128 << u;
            for &w in g.neighbors(u) {
                if w != v {
                    adj[v] |= 1u128 << w;
                }
            }
        }
    }
    let all = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };
    Ok(max_independent_set(&adj, all))
}

/// Outcome of the chordality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeoResult {
    /// A perfect elimination ordering (first vertex eliminated first).
    Ordering(Vec<usize>),
    /// A chordless cycle of length at least four, in cycle order.
    NotChordal(Vec<usize>),
}

impl PeoResult {
    pub fn ordering(self) -> Option<Vec<usize>> {
        match self {
            PeoResult::Ordering(o) => Some(o),
            PeoResult::NotChordal(_) => None,
        }
    }
}

/// Maximum cardinality search; ties go to the smallest vertex index. The
/// reverse visit order is checked as a perfect elimination ordering.
pub fn peo(g: &Graph) -> PeoResult {
    let n = g.num_vertices();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = usize::MAX;
        for v in 0..n {
            if !visited[v] && (best == usize::MAX || weight[v] > weight[best]) {
                best = v;
            }
        }
        visited[best] = true;
        visit.push(best);
        for &u in g.neighbors(best) {
            if !visited[u] {
                weight[u] += 1;
            }
        }
    }
    visit.reverse();
    match peo_violation(g, &visit) {
        None => PeoResult::Ordering(visit),
        Some((v, u, w)) => {
            let cycle = chordless_cycle_through(g, v, u, w)
                .or_else(|| find_chordless_cycle(g))
                .expect("a failed maximum cardinality search implies a hole");
            PeoResult::NotChordal(cycle)
        }
    }
}

/// Returns `(v, u, w)` where `u`, `w` are non-adjacent later neighbours of `v`,
/// or `None` when `order` is a perfect elimination ordering.
fn peo_violation(g: &Graph, order: &[usize]) -> Option<(usize, usize, usize)> {
    let n = g.num_vertices();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let later: Vec<usize> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] > pos[v])
            .collect();
        if let Some(&first) = later.iter().min_by_key(|&&u| pos[u]) {
            for &w in &later {
                if w != first && !g.adjacent(first, w) {
                    return Some((v, first, w));
                }
            }
        }
    }
    None
}

pub fn is_peo(g: &Graph, order: &[usize]) -> bool {
    let n = g.num_vertices();
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    peo_violation(g, order).is_none()
}

/// A shortest `u`–`w` path avoiding `v` and the other neighbours of `v`,
/// closed through `v`. With `u`, `w` non-adjacent this is a chordless cycle.
fn chordless_cycle_through(g: &Graph, v: usize, u: usize, w: usize) -> Option<Vec<usize>> {
    let n = g.num_vertices();
    let mut blocked = vec![false; n];
    blocked[v] = true;
    for &x in g.neighbors(v) {
        blocked[x] = x != u && x != w;
    }
    let mut prev = vec![usize::MAX; n];
    let mut queue = VecDeque::from([u]);
    blocked[u] = true;
    while let Some(x) = queue.pop_front() {
        if x == w {
            let mut path = vec![w];
            let mut cur = w;
            while cur != u {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            let mut cycle = vec![v];
            cycle.extend(path);
            return Some(cycle);
        }
        for &y in g.neighbors(x) {
            if !blocked[y] {
                blocked[y] = true;
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

fn find_chordless_cycle(g: &Graph) -> Option<Vec<usize>> {
    for v in 0..g.num_vertices() {
        let ns = g.neighbors(v);
        for (i, &u) in ns.iter().enumerate() {
            for &w in &ns[i + 1..] {
                if !g.adjacent(u, w) {
                    if let Some(c) = chordless_cycle_through(g, v, u, w) {
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

/// Chordality by definition: no induced cycle on four or more vertices.
/// Enumerates all vertex subsets, so only usable on small graphs.
pub fn is_chordal_brute(g: &Graph) -> Result<bool> {
    let n = g.num_vertices();
    check_limit("brute-force chordality vertices", n, BRUTE_MWIS_LIMIT)?;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() < 4 {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub = g.induced_subgraph(&keep);
        if (0..sub.num_vertices()).all(|v| sub.neighbors(v).len() == 2) && is_connected(&sub) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_connected(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

#[derive(Clone, Debug)]
pub struct WeightedGraph {
    pub graph: Graph,
    pub weights: Vec<BigRational>,
}

impl WeightedGraph {
    pub fn new(graph: Graph, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != graph.num_vertices() {
            return Err(Error::InvalidDecomposition(format!(
                "{} weights for {} vertices",
                weights.len(),
                graph.num_vertices()
            )));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidDecomposition("negative vertex weight".into()));
        }
        Ok(WeightedGraph { graph, weights })
    }

    pub fn weight_of(&self, set: &[usize]) -> BigRational {
        set.iter()
            .fold(BigRational::zero(), |a, &v| a + &self.weights[v])
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| !self.graph.adjacent(u, v)))
    }
}

/// Maximum-weight independent set of a chordal graph along a perfect
/// elimination ordering: residual weights are pushed forward along the
/// ordering, then vertices with positive residual are picked greedily in
/// reverse. Returns the weight and the chosen vertices, sorted.
pub fn chordal_mwis(g: &WeightedGraph, order: &[usize]) -> Result<(BigRational, Vec<usize>)> {
    let graph = &g.graph;
    let n = graph.num_vertices();
    if !is_peo(graph, order) {
        return Err(Error::InvalidPeo(
            "ordering is not a perfect elimination ordering of the graph".into(),
        ));
    }
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut residual = g.weights.clone();
    let mut red = vec![false; n];
    for &v in order {
        if residual[v].is_positive() {
            red[v] = true;
            let r = residual[v].clone();
            for &u in graph.neighbors(v) {
                if pos[u] > pos[v] {
                    residual[u] -= &r;
                    if residual[u].is_negative() {
                        residual[u] = BigRational::zero();
                    }
                }
            }
        }
    }
    let mut blocked = vec![false; n];
    let mut chosen = Vec::new();
    for &v in order.iter().rev() {
        if red[v] && !blocked[v] {
            chosen.push(v);
            for &u in graph.neighbors(v) {
                blocked[u] = true;
            }
        }
    }
    chosen.sort_unstable();
    Ok((g.weight_of(&chosen), chosen))
}

/// Maximum-weight independent set by enumeration. Among optimal sets the
/// lexicographically least (as sorted vertex lists) is returned.
pub fn brute_mwis(g: &WeightedGraph) -> Result<(BigRational, Vec<usize>)> {
    let n = g.graph.num_vertices();
    check_limit("brute-force MWIS vertices", n, BRUTE_MWIS_LIMIT)?;
    let adj: Vec<u32> = (0..n)
        .map(|v| g.graph.neighbors(v).iter().fold(0u32, |a, &u| a | 1 << u))
        .collect();
    let mut best = (BigRational::zero(), Vec::new());
    for mask in 0u32..(1u32 << n) {
        if (0..n).any(|v| mask >> v & 1 == 1 && adj[v] & mask != 0) {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let w = g.weight_of(&set);
        if w > best.0 || (w == best.0 && set < best.1) {
            best = (w, set);
        }
    }
    Ok(best)
}
