//! β-elimination orders and the width-1 point decomposition of a β-acyclic
//! hypergraph.

use std::collections::{BTreeSet, VecDeque};

use crate::decomposition::{PointDecomposition, RootedTree, SubBag};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeSet, Hypergraph, Point, VertexOrder, VertexSet};

pub type BetaOrder = VertexOrder;

/// Whether the sets restricted to `alive` and containing `v` form a chain.
fn is_nest_point(h: &Hypergraph, v: usize, alive: VertexSet) -> bool {
    let sets: Vec<VertexSet> = h
        .incident(v)
        .iter()
        .map(|e| h.edge(e).intersection(alive))
        .collect();
    sets.iter()
        .all(|a| sets.iter().all(|b| a.is_subset(*b) || b.is_subset(*a)))
}

/// Greedy nest-point elimination, least vertex index first. The eliminated
/// vertices are listed in elimination order. `None` when `H` is not
/// β-acyclic.
pub fn beta_elimination_order(h: &Hypergraph) -> Option<BetaOrder> {
    let mut alive = h.vertices();
    let mut order = Vec::with_capacity(h.num_vertices());
    while !alive.is_empty() {
        let v = alive.iter().find(|&v| is_nest_point(h, v, alive))?;
        order.push(v);
        alive = alive.without(v);
    }
    let order = BetaOrder::new(order);
    debug_assert!(verify_beta_order(h, &order));
    Some(order)
}

/// The definition checked literally: for every `x_i` and every pair of edges
/// through it, one tail `e ∩ {x_j : j ≥ i}` is inside the other edge.
pub fn verify_beta_order(h: &Hypergraph, order: &BetaOrder) -> bool {
    if order.order().len() != h.num_vertices() {
        return false;
    }
    h.vertices().iter().all(|x| {
        let tail = order.at_least(x);
        let through: Vec<VertexSet> = h.incident(x).iter().map(|e| h.edge(e)).collect();
        through.iter().all(|&e| {
            through
                .iter()
                .all(|&f| e.intersection(tail).is_subset(f) || f.intersection(tail).is_subset(e))
        })
    })
}

/// Edges sorted by `<_H`, least first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl EdgeOrder {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    pub fn less_eq(&self, a: usize, b: usize) -> bool {
        self.position[a] <= self.position[b]
    }
}

/// `e1 <_H e2` iff the `<_β`-largest vertex of `e1 Δ e2` lies in `e2`.
pub fn edge_order(h: &Hypergraph, beta: &BetaOrder) -> EdgeOrder {
    let mut order: Vec<usize> = (0..h.num_edges()).collect();
    order.sort_by_key(|&e| beta.key(h.edge(e)));
    let mut position = vec![0; order.len()];
    for (i, &e) in order.iter().enumerate() {
        position[e] = i;
    }
    EdgeOrder { order, position }
}

/// `H^x_e`: edges reachable from `e` by walks using vertices `≤_β x` and
/// edges `≤_H e`.
pub fn reachable_edges(
    h: &Hypergraph,
    beta: &BetaOrder,
    edges: &EdgeOrder,
    x: usize,
    e: usize,
) -> EdgeSet {
    let low = beta.at_most(x);
    let mut seen = EdgeSet::singleton(e);
    let mut queue = VecDeque::from([e]);
    while let Some(f) = queue.pop_front() {
        for v in h.edge(f).intersection(low).iter() {
            for g in h.incident(v).iter() {
                if !seen.contains(g) && edges.less_eq(g, e) {
                    seen = seen.with(g);
                    queue.push_back(g);
                }
            }
        }
    }
    seen
}

pub const BOTTOM: &str = "t_bot";

pub fn node_name(h: &Hypergraph, v: usize) -> String {
    format!("t:{}", h.vertex_name(v))
}

/// The path decomposition `t_{x_1} → … → t_{x_n} → t_⊥` with bags
/// `{(y,e) : x ∈ e, x ≤_β y}` and the arcs given by the single-vertex and
/// multi-vertex rules plus the arcs to `(t_⊥, ∅)`.
pub fn build_beta_pd(h: &Hypergraph, beta: &BetaOrder) -> Result<PointDecomposition> {
    if !verify_beta_order(h, beta) {
        return Err(Error::InvalidDecomposition(
            "not a β-elimination order".into(),
        ));
    }
    let n = h.num_vertices();
    let mut names: Vec<String> = beta.order().iter().map(|&v| node_name(h, v)).collect();
    names.push(BOTTOM.to_string());
    let parent: Vec<Option<usize>> = (0..=n)
        .map(|i| if i == n { None } else { Some(i + 1) })
        .collect();
    let tree = RootedTree::from_parents(names.clone(), parent)?;
    let node = |i: usize| tree.index(&names[i]).expect("node exists");
    let bottom = node(n);

    let mut bags = vec![h.empty_points(); n + 1];
    for (i, &x) in beta.order().iter().enumerate() {
        let tail = beta.at_least(x);
        for e in h.incident(x).iter() {
            for y in h.edge(e).intersection(tail).iter() {
                bags[node(i)].insert(Point { vertex: y, edge: e });
            }
        }
    }

    let edges = edge_order(h, beta);
    // For every vertex, the sub-bags `e ∩ V(H)_{≥x}` with the edges producing them.
    let tails: Vec<Vec<(VertexSet, Vec<usize>)>> = beta
        .order()
        .iter()
        .map(|&x| {
            let tail = beta.at_least(x);
            let mut by_set: Vec<(VertexSet, Vec<usize>)> = Vec::new();
            for e in h.incident(x).iter() {
                let s = h.edge(e).intersection(tail);
                match by_set.iter_mut().find(|(t, _)| *t == s) {
                    Some((_, es)) => es.push(e),
                    None => by_set.push((s, vec![e])),
                }
            }
            by_set
        })
        .collect();

    let mut arcs = BTreeSet::new();
    for (i, &x) in beta.order().iter().enumerate() {
        for (sx, es) in &tails[i] {
            if sx.len() == 1 {
                arcs.insert((
                    SubBag::new(node(i), *sx),
                    SubBag::new(bottom, VertexSet::EMPTY),
                ));
            }
            let cap = beta.min_of(sx.without(x)).map(|z| beta.position(z));
            for (j, &y) in beta.order().iter().enumerate().skip(i + 1) {
                if cap.is_some_and(|c| j > c) {
                    break;
                }
                for (sy, fs) in &tails[j] {
                    let linked = fs.iter().any(|&f| {
                        let reach = reachable_edges(h, beta, &edges, y, f);
                        es.iter().any(|&e| reach.contains(e))
                    });
                    if linked {
                        arcs.insert((SubBag::new(node(i), *sx), SubBag::new(node(j), *sy)));
                    }
                }
            }
        }
    }
    Ok(PointDecomposition { tree, bags, arcs })
}
