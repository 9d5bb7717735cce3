//! Coverwidth of vertex orderings and the simplified point decomposition an
//! ordering induces.

use crate::decomposition::{RootedTree, SimplifiedPointDecomposition};
use crate::error::{check_limit, Result};
use crate::exec::Exec;
use crate::hypergraph::{
    beta_cover_number, EdgeSet, Hypergraph, Point, SetSystem, VertexOrder, VertexSet,
};

pub type CoverOrder = VertexOrder;

/// Largest vertex count for which every ordering is tried.
pub const EXHAUSTIVE_ORDER_LIMIT: usize = 8;

/// `H^x`: edges reachable from `x` by walks through vertices `≤ x`.
pub fn reachable_edges_cover(h: &Hypergraph, order: &CoverOrder, x: usize) -> EdgeSet {
    let low = order.at_most(x);
    let mut reached = VertexSet::singleton(x);
    let mut frontier = vec![x];
    while let Some(v) = frontier.pop() {
        for e in h.incident(v).iter() {
            for w in h.edge(e).intersection(low).difference(reached).iter() {
                reached = reached.with(w);
                frontier.push(w);
            }
        }
    }
    reached
        .iter()
        .fold(EdgeSet::EMPTY, |acc, v| acc.union(h.incident(v)))
}

/// `H^x[≥x]`.
pub fn upper_part(h: &Hypergraph, order: &CoverOrder, x: usize) -> SetSystem {
    let hx = reachable_edges_cover(h, order, x);
    let upper = h.vertices_of(hx).intersection(order.at_least(x));
    SetSystem::new(hx.iter().map(|e| h.edge(e).intersection(upper)))
}

/// `max_x β-cn(H^x[≥x])`.
pub fn coverwidth_of_order(h: &Hypergraph, order: &CoverOrder) -> Result<usize> {
    h.vertices().iter().try_fold(0, |m, x| {
        Ok(m.max(beta_cover_number(&upper_part(h, order, x))?))
    })
}

/// The least coverwidth over all orderings, with the first ordering (in
/// lexicographic order of vertex index sequences) attaining it.
pub fn exhaustive_coverwidth(h: &Hypergraph, exec: Exec) -> Result<(usize, CoverOrder)> {
    let n = h.num_vertices();
    check_limit(
        "vertices for exhaustive coverwidth",
        n,
        EXHAUSTIVE_ORDER_LIMIT,
    )?;
    let total: u64 = (1..=n as u64).product();
    let widths = exec.map_range(total, |rank| {
        let order = CoverOrder::new(nth_permutation(n, rank));
        coverwidth_of_order(h, &order).map(|w| (w, order))
    });
    let mut best: Option<(usize, CoverOrder)> = None;
    for w in widths {
        let (w, o) = w?;
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, o));
        }
    }
    Ok(best.unwrap_or((0, CoverOrder::new(Vec::new()))))
}

/// The `rank`-th permutation of `0..n` in lexicographic order.
fn nth_permutation(n: usize, mut rank: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f: u64 = (1..=i as u64).product();
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    out
}

/// Nodes `t:{x}`, rooted at the greatest vertex; `t_x` hangs below
/// `t_{min(V(H^x[≥x]) \ {x})}` or below the root when that set is empty.
/// `B_{t_x} = {(y, e) : e ∈ H^x, y ∈ e, y ≥ x}`.
pub fn build_spd_from_order(
    h: &Hypergraph,
    order: &CoverOrder,
) -> Result<SimplifiedPointDecomposition> {
    let verts = order.order();
    let names: Vec<String> = verts
        .iter()
        .map(|&v| format!("t:{}", h.vertex_name(v)))
        .collect();
    let Some(top) = order.last() else {
        return Ok(SimplifiedPointDecomposition {
            tree: RootedTree::single("t_empty"),
            bags: vec![h.empty_points()],
        });
    };
    let mut parent = Vec::with_capacity(verts.len());
    let mut bags = Vec::with_capacity(verts.len());
    for &x in verts {
        let hx = reachable_edges_cover(h, order, x);
        let upper = h.vertices_of(hx).intersection(order.at_least(x));
        parent.push(if x == top {
            None
        } else {
            let p = order.min_of(upper.without(x)).unwrap_or(top);
            Some(order.position(p))
        });
        let mut bag = h.empty_points();
        for e in hx.iter() {
            for y in h.edge(e).intersection(order.at_least(x)).iter() {
                bag.insert(Point { vertex: y, edge: e });
            }
        }
        bags.push(bag);
    }
    let original = names.clone();
    let tree = RootedTree::from_parents(names, parent)?;
    let mut sorted = vec![h.empty_points(); bags.len()];
    for (i, b) in bags.into_iter().enumerate() {
        sorted[tree.index(&original[i])?] = b;
    }
    Ok(SimplifiedPointDecomposition { tree, bags: sorted })
}
