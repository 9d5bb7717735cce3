//! Hypergraphs with named edges, points, restrictions and cover numbers.
//!
//! Vertices and edges are addressed by their index in lexicographic order of
//! their names, so every iteration over indices is also an iteration in name
//! order. Vertex and edge sets are 64-bit masks; a hypergraph holds at most 64
//! vertices and 64 edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_limit, Error, Result};
use crate::graph::{self, Graph};

pub const MAX_VERTICES: usize = 64;
pub const MAX_EDGES: usize = 64;

/// Default bound on the number of sets for exhaustive subset searches.
pub const SUBSET_SEARCH_LIMIT: usize = 20;

/// A set of at most 64 indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Set64(pub u64);

pub type VertexSet = Set64;
pub type EdgeSet = Set64;

impl Set64 {
    pub const EMPTY: Set64 = Set64(0);

    pub const fn from_mask(mask: u64) -> Self {
        Set64(mask)
    }

    pub fn singleton(i: usize) -> Self {
        Set64(1u64 << i)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            Set64(u64::MAX)
        } else {
            Set64((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Set64::EMPTY, |s, i| s.with(i))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        Set64(self.0 | 1u64 << i)
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        Set64(self.0 & !(1u64 << i))
    }

    #[inline]
    pub fn union(self, o: Self) -> Self {
        Set64(self.0 | o.0)
    }

    #[inline]
    pub fn intersection(self, o: Self) -> Self {
        Set64(self.0 & o.0)
    }

    #[inline]
    pub fn difference(self, o: Self) -> Self {
        Set64(self.0 & !o.0)
    }

    #[inline]
    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for Set64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A total order of the vertices, first element least.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl VertexOrder {
    pub fn new(order: Vec<usize>) -> Self {
        let mut position = vec![usize::MAX; order.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        VertexOrder { order, position }
    }

    pub fn from_names(h: &Hypergraph, names: &[impl AsRef<str>]) -> Result<Self> {
        let order: Vec<usize> = names
            .iter()
            .map(|n| h.vertex_index(n.as_ref()))
            .collect::<Result<_>>()?;
        if order.len() != h.num_vertices()
            || order.iter().collect::<BTreeSet<_>>().len() != order.len()
        {
            return Err(Error::InvalidHypergraph(
                "order must list every vertex exactly once".into(),
            ));
        }
        Ok(VertexOrder::new(order))
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// `V(H)_{≥x}`.
    pub fn at_least(&self, x: usize) -> VertexSet {
        VertexSet::from_indices(self.order[self.position[x]..].iter().copied())
    }

    /// `V(H)_{≤x}`.
    pub fn at_most(&self, x: usize) -> VertexSet {
        VertexSet::from_indices(self.order[..=self.position[x]].iter().copied())
    }

    /// The `<_β`-least member of a nonempty set.
    pub fn min_of(&self, s: VertexSet) -> Option<usize> {
        s.iter().min_by_key(|&v| self.position[v])
    }

    /// `s` as a bitmask over order positions, so that comparing two masks
    /// compares their `<_β`-largest differing element.
    pub(crate) fn key(&self, s: VertexSet) -> u64 {
        s.iter().fold(0, |m, v| m | 1 << self.position[v])
    }

    /// The greatest vertex.
    pub fn last(&self) -> Option<usize> {
        self.order.last().copied()
    }

    pub fn names(&self, h: &Hypergraph) -> Vec<String> {
        self.order
            .iter()
            .map(|&v| h.vertex_name(v).to_string())
            .collect()
    }
}

/// A point `(v, e)`: vertex `v` seen through edge `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub vertex: usize,
    pub edge: usize,
}

/// A set of points of a fixed hypergraph, stored per edge as the mask of
/// vertices `v` with `(v, e)` in the set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointSet {
    by_edge: Vec<VertexSet>,
}

impl PointSet {
    pub fn empty(num_edges: usize) -> Self {
        PointSet {
            by_edge: vec![Set64::EMPTY; num_edges],
        }
    }

    pub fn insert(&mut self, p: Point) {
        self.by_edge[p.edge] = self.by_edge[p.edge].with(p.vertex);
    }

    pub fn remove(&mut self, p: Point) {
        self.by_edge[p.edge] = self.by_edge[p.edge].without(p.vertex);
    }

    pub fn contains(&self, p: Point) -> bool {
        self.by_edge[p.edge].contains(p.vertex)
    }

    /// Vertices `v` with `(v, e)` in the set.
    pub fn on_edge(&self, e: usize) -> VertexSet {
        self.by_edge[e]
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            by_edge: self
                .by_edge
                .iter()
                .zip(&other.by_edge)
                .map(|(a, b)| a.union(*b))
                .collect(),
        }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            by_edge: self
                .by_edge
                .iter()
                .zip(&other.by_edge)
                .map(|(a, b)| a.intersection(*b))
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.by_edge
            .iter()
            .zip(&other.by_edge)
            .all(|(a, b)| a.is_subset(*b))
    }

    pub fn len(&self) -> usize {
        self.by_edge.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_edge.iter().all(|s| s.is_empty())
    }

    /// Points sorted by `(vertex, edge)`, which is name order.
    pub fn points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self
            .by_edge
            .iter()
            .enumerate()
            .flat_map(|(e, vs)| vs.iter().map(move |v| Point { vertex: v, edge: e }))
            .collect();
        out.sort();
        out
    }
}

/// A collapsed set-of-sets view: distinct nonempty vertex sets, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SetSystem {
    sets: Vec<VertexSet>,
}

impl SetSystem {
    pub fn new<I: IntoIterator<Item = VertexSet>>(sets: I) -> Self {
        let set: BTreeSet<VertexSet> = sets.into_iter().filter(|s| !s.is_empty()).collect();
        SetSystem {
            sets: set.into_iter().collect(),
        }
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn vertices(&self) -> VertexSet {
        self.sets.iter().fold(Set64::EMPTY, |a, s| a.union(*s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    edges: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    edges: BTreeMap<String, Vec<String>>,
}

impl Hypergraph {
    /// Builds a hypergraph from named edges, rejecting empty edges and
    /// duplicate vertex sets.
    pub fn new<K, V, I>(edges: I) -> Result<Self>
    where
        K: Into<String>,
        V: Into<String>,
        I: IntoIterator<Item = (K, Vec<V>)>,
    {
        let mut named: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (k, vs) in edges {
            let k = k.into();
            let mut set = BTreeSet::new();
            for v in vs {
                let v = v.into();
                if !set.insert(v.clone()) {
                    return Err(Error::InvalidHypergraph(format!(
                        "edge `{k}` lists vertex `{v}` twice"
                    )));
                }
            }
            if set.is_empty() {
                return Err(Error::InvalidHypergraph(format!("edge `{k}` is empty")));
            }
            if named.insert(k.clone(), set).is_some() {
                return Err(Error::InvalidHypergraph(format!(
                    "edge `{k}` defined twice"
                )));
            }
        }
        let vertex_names: Vec<String> = named
            .values()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        check_limit("hypergraph vertices", vertex_names.len(), MAX_VERTICES)?;
        check_limit("hypergraph edges", named.len(), MAX_EDGES)?;
        let index: BTreeMap<&str, usize> = vertex_names
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut seen: BTreeMap<VertexSet, &str> = BTreeMap::new();
        let mut edge_names = Vec::with_capacity(named.len());
        let mut masks = Vec::with_capacity(named.len());
        for (k, vs) in &named {
            let mask = Set64::from_indices(vs.iter().map(|v| index[v.as_str()]));
            if let Some(other) = seen.insert(mask, k) {
                return Err(Error::InvalidHypergraph(format!(
                    "edges `{other}` and `{k}` have the same vertex set"
                )));
            }
            edge_names.push(k.clone());
            masks.push(mask);
        }
        Ok(Hypergraph {
            vertex_names,
            edge_names,
            edges: masks,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: HypergraphJson = serde_json::from_str(s)?;
        Hypergraph::new(raw.edges)
    }

    pub fn to_json(&self) -> String {
        let raw = HypergraphJson {
            edges: self
                .edge_names
                .iter()
                .zip(&self.edges)
                .map(|(k, e)| (k.clone(), self.vertex_names_of(*e)))
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.vertex_names
            .binary_search_by(|v| v.as_str().cmp(name))
            .map_err(|_| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_index(&self, name: &str) -> Result<usize> {
        self.edge_names
            .binary_search_by(|v| v.as_str().cmp(name))
            .map_err(|_| Error::UnknownEdge(name.to_string()))
    }

    pub fn edge(&self, e: usize) -> VertexSet {
        self.edges[e]
    }

    pub fn edges(&self) -> &[VertexSet] {
        &self.edges
    }

    pub fn all_edges(&self) -> EdgeSet {
        Set64::full(self.edges.len())
    }

    pub fn vertices(&self) -> VertexSet {
        Set64::full(self.vertex_names.len())
    }

    /// Edges containing `v`.
    pub fn incident(&self, v: usize) -> EdgeSet {
        Set64::from_indices((0..self.edges.len()).filter(|&e| self.edges[e].contains(v)))
    }

    /// `V(H')` for the subhypergraph `H'` given as an edge set.
    pub fn vertices_of(&self, sub: EdgeSet) -> VertexSet {
        sub.iter().fold(Set64::EMPTY, |a, e| a.union(self.edges[e]))
    }

    pub fn vertex_names_of(&self, s: VertexSet) -> Vec<String> {
        s.iter().map(|v| self.vertex_names[v].clone()).collect()
    }

    pub fn edge_names_of(&self, s: EdgeSet) -> Vec<String> {
        s.iter().map(|e| self.edge_names[e].clone()).collect()
    }

    pub fn vertex_set(&self, names: &[impl AsRef<str>]) -> Result<VertexSet> {
        names.iter().try_fold(Set64::EMPTY, |s, n| {
            Ok(s.with(self.vertex_index(n.as_ref())?))
        })
    }

    pub fn edge_set(&self, names: &[impl AsRef<str>]) -> Result<EdgeSet> {
        names.iter().try_fold(
            Set64::EMPTY,
            |s, n| Ok(s.with(self.edge_index(n.as_ref())?)),
        )
    }

    pub fn point(&self, vertex: &str, edge: &str) -> Result<Point> {
        let v = self.vertex_index(vertex)?;
        let e = self.edge_index(edge)?;
        if !self.edges[e].contains(v) {
            return Err(Error::InvalidDecomposition(format!(
                "({vertex},{edge}) is not a point: `{vertex}` is not in `{edge}`"
            )));
        }
        Ok(Point { vertex: v, edge: e })
    }

    /// All points `P(H)`.
    pub fn points(&self) -> PointSet {
        PointSet {
            by_edge: self.edges.clone(),
        }
    }

    /// `P(H')` for a subhypergraph.
    pub fn points_of(&self, sub: EdgeSet) -> PointSet {
        let mut p = PointSet::empty(self.num_edges());
        for e in sub.iter() {
            p.by_edge[e] = self.edges[e];
        }
        p
    }

    pub fn empty_points(&self) -> PointSet {
        PointSet::empty(self.num_edges())
    }

    /// `e|_P = {v ∈ e : (v, e) ∈ P}`.
    pub fn restrict_edge(&self, e: usize, p: &PointSet) -> VertexSet {
        self.edges[e].intersection(p.on_edge(e))
    }

    /// `H|_P` keyed by edge, with empty restrictions dropped.
    pub fn restrict_hypergraph(&self, p: &PointSet) -> BTreeMap<usize, VertexSet> {
        (0..self.num_edges())
            .map(|e| (e, self.restrict_edge(e, p)))
            .filter(|(_, s)| !s.is_empty())
            .collect()
    }

    /// The collapsed set view of `H|_P`.
    pub fn restricted_sets(&self, p: &PointSet) -> SetSystem {
        SetSystem::new((0..self.num_edges()).map(|e| self.restrict_edge(e, p)))
    }

    /// `V(H'|_P)`.
    pub fn restricted_vertices(&self, sub: EdgeSet, p: &PointSet) -> VertexSet {
        sub.iter()
            .fold(Set64::EMPTY, |a, e| a.union(self.restrict_edge(e, p)))
    }

    /// `H[X] = {e ∩ X : e ∈ H, e ∩ X ≠ ∅}`, collapsed.
    pub fn induced(&self, x: VertexSet) -> SetSystem {
        SetSystem::new(self.edges.iter().map(|e| e.intersection(x)))
    }

    pub fn set_system(&self) -> SetSystem {
        SetSystem::new(self.edges.iter().copied())
    }

    /// Bipartite incidence graph. Graph vertices `0..|V(H)|` are the
    /// hypergraph vertices, followed by one graph vertex per edge.
    pub fn incidence_graph(&self) -> Graph {
        let nv = self.num_vertices();
        let mut labels: Vec<String> = self.vertex_names.iter().map(|v| format!("v:{v}")).collect();
        labels.extend(self.edge_names.iter().map(|e| format!("e:{e}")));
        let mut g = Graph::with_labels(labels);
        for (j, e) in self.edges.iter().enumerate() {
            for v in e.iter() {
                g.add_edge(v, nv + j);
            }
        }
        g
    }

    /// Point graph on `P(H)`: points are adjacent when they share a vertex or
    /// an edge. Graph vertex `i` is `self.points().points()[i]`.
    pub fn point_graph(&self) -> Graph {
        let pts = self.points().points();
        let labels = pts
            .iter()
            .map(|p| {
                format!(
                    "({},{})",
                    self.vertex_names[p.vertex], self.edge_names[p.edge]
                )
            })
            .collect();
        let mut g = Graph::with_labels(labels);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].vertex == pts[j].vertex || pts[i].edge == pts[j].edge {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

/// `ρ(H)`: the least number of sets whose union is `V(H)`, by search over
/// subsets in increasing size.
pub fn cover_number(h: &SetSystem) -> Result<usize> {
    cover_number_with_limit(h, SUBSET_SEARCH_LIMIT)
}

pub fn cover_number_with_limit(h: &SetSystem, limit: usize) -> Result<usize> {
    check_limit("cover number subset search", h.len(), limit)?;
    let target = h.vertices();
    let sets = h.sets();
    for k in 0..=sets.len() {
        if covers_with(sets, target, k, 0, Set64::EMPTY) {
            return Ok(k);
        }
    }
    unreachable!("the full set system covers its vertices")
}

fn covers_with(
    sets: &[VertexSet],
    target: VertexSet,
    k: usize,
    from: usize,
    acc: VertexSet,
) -> bool {
    if acc == target {
        return true;
    }
    if k == 0 {
        return false;
    }
    (from..sets.len()).any(|i| covers_with(sets, target, k - 1, i + 1, acc.union(sets[i])))
}

/// `β-cn(H)` computed as the maximum induced matching of the incidence graph.
pub fn beta_cover_number(h: &SetSystem) -> Result<usize> {
    if h.is_empty() {
        return Ok(0);
    }
    let nv_names: Vec<usize> = h.vertices().iter().collect();
    let mut g = Graph::new(nv_names.len() + h.len());
    for (j, s) in h.sets().iter().enumerate() {
        for v in s.iter() {
            let i = nv_names.binary_search(&v).expect("vertex of the system");
            g.add_edge(i, nv_names.len() + j);
        }
    }
    graph::max_induced_matching(&g)
}

/// `β-cn(H)` by its definition: the maximum cover number over all
/// subhypergraphs.
pub fn beta_cover_number_exhaustive(h: &SetSystem) -> Result<usize> {
    check_limit("subhypergraph enumeration", h.len(), SUBSET_SEARCH_LIMIT)?;
    let sets = h.sets();
    let mut best = 0;
    for mask in 0u64..(1u64 << sets.len()) {
        let sub = SetSystem::new(Set64(mask).iter().map(|i| sets[i]));
        best = best.max(cover_number(&sub)?);
    }
    Ok(best)
}
