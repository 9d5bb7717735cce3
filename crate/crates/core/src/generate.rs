//! Seeded generators for hypergraphs, instances, branch decompositions and
//! graphs, plus exhaustive enumerations of small hypergraph families.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::beta::beta_elimination_order;
use crate::csp::{MaxCspInstance, NamedConstraint};
use crate::decomposition::RootedTree;
use crate::error::Result;
use crate::graph::Graph;
use crate::hypergraph::{Hypergraph, VertexOrder};
use crate::mim::{BranchDecomposition, Leaf};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a hypergraph over `v0, v1, …` from vertex masks, edges named
/// `f0, f1, …` in the given order.
pub fn from_masks(masks: &[u32]) -> Hypergraph {
    let edges = masks.iter().enumerate().map(|(i, &m)| {
        let vs: Vec<String> = (0..32)
            .filter(|b| m >> b & 1 == 1)
            .map(|b| format!("v{b}"))
            .collect();
        (format!("f{i}"), vs)
    });
    Hypergraph::new(edges).expect("distinct nonempty masks")
}

/// Between 1 and `max_edges` distinct edges over at most `max_vertices`
/// vertices.
pub fn random_hypergraph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Hypergraph {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(1..=max_edges).min((1usize << n) - 1);
    let mut masks = BTreeSet::new();
    while masks.len() < m {
        let size = rng.gen_range(1..=n);
        let mut vs: Vec<u32> = (0..n as u32).collect();
        vs.shuffle(rng);
        masks.insert(vs[..size].iter().fold(0u32, |a, &v| a | 1 << v));
    }
    let masks: Vec<u32> = masks.into_iter().collect();
    from_masks(&masks)
}

/// Rejection sampling of [`random_hypergraph`] until it is β-acyclic.
pub fn random_beta_acyclic(
    rng: &mut impl Rng,
    max_vertices: usize,
    max_edges: usize,
) -> Hypergraph {
    loop {
        let h = random_hypergraph(rng, max_vertices, max_edges);
        if beta_elimination_order(&h).is_some() {
            return h;
        }
    }
}

/// Grows a β-acyclic hypergraph on `n ≤ 64` vertices by adding each new
/// vertex as a nest point: it joins a random chain of existing edges, each
/// either extended in place or copied, and possibly a singleton edge.
/// The edge count stays at most `max_edges`.
pub fn grow_beta_acyclic(rng: &mut impl Rng, n: usize, max_edges: usize) -> Hypergraph {
    assert!((1..=64).contains(&n) && max_edges >= 1);
    let mut edges: Vec<u64> = vec![1];
    for x in 1..n {
        let bit = 1u64 << x;
        let mut pool: Vec<usize> = (0..edges.len()).collect();
        pool.shuffle(rng);
        pool.sort_by_key(|&i| edges[i].count_ones());
        let mut chain: Vec<usize> = Vec::new();
        let want = rng.gen_range(1..=3);
        for i in pool {
            if chain.len() == want {
                break;
            }
            if chain
                .last()
                .is_none_or(|&l| edges[l] & edges[i] == edges[l])
            {
                chain.push(i);
            }
        }
        for &i in &chain {
            if edges.len() < max_edges && rng.gen_bool(0.4) {
                edges.push(edges[i] | bit);
            } else {
                edges[i] |= bit;
            }
        }
        if edges.len() < max_edges && rng.gen_bool(0.1) {
            edges.push(bit);
        }
        edges.sort_unstable();
        edges.dedup();
    }
    let named = edges.iter().enumerate().map(|(i, &m)| {
        let vs: Vec<String> = (0..64)
            .filter(|b| m >> b & 1 == 1)
            .map(|b| format!("v{b:02}"))
            .collect();
        (format!("f{i:02}"), vs)
    });
    Hypergraph::new(named).expect("distinct nonempty edges")
}

/// A random instance on `h` with domain `0..domain`, one table per edge with
/// between 1 and `max_rows` distinct rows of positive value `p/q`,
/// `1 ≤ p ≤ 9`, `1 ≤ q ≤ 4`.
pub fn random_instance(
    rng: &mut impl Rng,
    h: &Hypergraph,
    domain: usize,
    max_rows: usize,
) -> MaxCspInstance {
    let dom: Vec<String> = (0..domain).map(|d| d.to_string()).collect();
    let cons: Vec<NamedConstraint> = (0..h.num_edges())
        .map(|e| {
            let scope = h.vertex_names_of(h.edge(e));
            let space = domain.pow(scope.len() as u32);
            let rows = rng.gen_range(1..=max_rows.min(space));
            let mut picks: Vec<usize> = (0..space).collect();
            picks.shuffle(rng);
            let table = picks[..rows]
                .iter()
                .map(|&code| {
                    let mut c = code;
                    let tuple = (0..scope.len())
                        .map(|_| {
                            let d = c % domain;
                            c /= domain;
                            dom[d].clone()
                        })
                        .collect();
                    let value =
                        BigRational::new(rng.gen_range(1..=9).into(), rng.gen_range(1..=4).into());
                    (tuple, value)
                })
                .collect();
            (h.edge_name(e).to_string(), scope, table)
        })
        .collect();
    MaxCspInstance::new(h.vertex_names().to_vec(), dom, cons)
        .expect("generated instance is well formed")
}

pub fn random_order(rng: &mut impl Rng, h: &Hypergraph) -> VertexOrder {
    let mut order: Vec<usize> = (0..h.num_vertices()).collect();
    order.shuffle(rng);
    VertexOrder::new(order)
}

/// Merges randomly chosen subtrees until one remains.
pub fn random_branch(rng: &mut impl Rng, h: &Hypergraph) -> Result<BranchDecomposition> {
    let leaves: Vec<Leaf> = (0..h.num_vertices())
        .map(Leaf::Vertex)
        .chain((0..h.num_edges()).map(Leaf::Edge))
        .collect();
    let mut names: Vec<String> = (0..leaves.len()).map(|i| format!("l{i}")).collect();
    let mut parent: Vec<Option<usize>> = vec![None; leaves.len()];
    let mut roots: Vec<usize> = (0..leaves.len()).collect();
    while roots.len() > 1 {
        let a = roots.swap_remove(rng.gen_range(0..roots.len()));
        let b = roots.swap_remove(rng.gen_range(0..roots.len()));
        let node = names.len();
        names.push(format!("n{}", node - leaves.len()));
        parent.push(None);
        parent[a] = Some(node);
        parent[b] = Some(node);
        roots.push(node);
    }
    let original = names.clone();
    let tree = RootedTree::from_parents(names, parent)?;
    let mut map = vec![None; tree.len()];
    for (i, &l) in leaves.iter().enumerate() {
        map[tree.index(&original[i])?] = Some(l);
    }
    BranchDecomposition::new(h, tree, map)
}

/// A random chordal graph grown backwards along a random elimination order:
/// each vertex attaches to a random subset of `{u} ∪ N⁺(u)` for a random
/// later vertex `u`, which is a clique.
pub fn random_chordal_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let mut peo: Vec<usize> = (0..n).collect();
    peo.shuffle(rng);
    let mut later: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut g = Graph::new(n);
    let p: f64 = rng.gen_range(0.2..0.9);
    for i in (0..n.saturating_sub(1)).rev() {
        if rng.gen_bool(0.1) {
            continue;
        }
        let v = peo[i];
        let u = peo[rng.gen_range(i + 1..n)];
        let mut nb = vec![u];
        nb.extend(later[u].iter().copied().filter(|_| rng.gen_bool(p)));
        for &w in &nb {
            g.add_edge(v, w);
        }
        later[v] = nb;
    }
    g
}

/// A random graph on `n ≥ 4` vertices containing a planted chordless cycle
/// of length at least 4; returns the graph and the cycle.
pub fn graph_with_hole(rng: &mut impl Rng, n: usize) -> (Graph, Vec<usize>) {
    assert!(n >= 4, "a hole needs four vertices");
    let len = rng.gen_range(4..=n.min(8));
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(rng);
    let cycle: Vec<usize> = vs[..len].to_vec();
    let on_cycle: BTreeSet<usize> = cycle.iter().copied().collect();
    let mut g = Graph::new(n);
    for i in 0..len {
        g.add_edge(cycle[i], cycle[(i + 1) % len]);
    }
    let p: f64 = rng.gen_range(0.1..0.6);
    for a in 0..n {
        for b in a + 1..n {
            if on_cycle.contains(&a) && on_cycle.contains(&b) {
                continue;
            }
            if !g.adjacent(a, b) && rng.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    (g, cycle)
}

/// Every hypergraph on vertices `v0..v{n-1}` (not all need occur) with
/// between 1 and `max_edges` edges, as sorted mask lists.
pub fn all_hypergraph_masks(n: usize, max_edges: usize) -> Vec<Vec<u32>> {
    let subsets: Vec<u32> = (1..1u32 << n).collect();
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(
        subsets: &[u32],
        start: usize,
        max: usize,
        pick: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if !pick.is_empty() {
            out.push(pick.clone());
        }
        if pick.len() == max {
            return;
        }
        for i in start..subsets.len() {
            pick.push(subsets[i]);
            rec(subsets, i + 1, max, pick, out);
            pick.pop();
        }
    }
    rec(&subsets, 0, max_edges, &mut pick, &mut out);
    out
}

/// Every hypergraph with at most `n` vertices and at most `max_edges` edges.
pub fn all_small_hypergraphs(n: usize, max_edges: usize) -> Vec<Hypergraph> {
    all_hypergraph_masks(n, max_edges)
        .iter()
        .map(|m| from_masks(m))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for i in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(i, n - 1);
            out.push(p);
        }
    }
    out
}

/// The least relabelling of a mask list under vertex permutations.
pub fn canonical_form(masks: &[u32], n: usize, perms: &[Vec<usize>]) -> Vec<u32> {
    let mut best: Option<Vec<u32>> = None;
    for p in perms {
        let mut image: Vec<u32> = masks
            .iter()
            .map(|&m| {
                (0..n)
                    .filter(|&b| m >> b & 1 == 1)
                    .fold(0u32, |a, b| a | 1 << p[b])
            })
            .collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.unwrap_or_default()
}

/// One representative per isomorphism class of β-acyclic hypergraphs with
/// exactly `n` vertices, as sorted canonical mask lists.
///
/// Every β-acyclic hypergraph has a nest point `x` whose removal leaves a
/// β-acyclic hypergraph, so the classes on `n` vertices are obtained by
/// adding a nest point to the representatives on `n - 1` vertices: the edges
/// through `x` are a chain `C_1 ⊂ … ⊂ C_k` of old edges (or `∅`) each
/// extended by `x`, and every old edge in the chain may or may not survive
/// without `x`.
pub fn beta_acyclic_classes(n: usize) -> Vec<Vec<u32>> {
    let mut level: BTreeSet<Vec<u32>> = BTreeSet::from([Vec::new()]);
    for size in 1..=n {
        let perms = permutations(size);
        let x = 1u32 << (size - 1);
        let mut next = BTreeSet::new();
        for rep in &level {
            let mut pool: Vec<u32> = rep.clone();
            pool.push(0);
            pool.sort_by_key(|m| m.count_ones());
            for chain in chains(&pool) {
                let old: Vec<u32> = chain.iter().copied().filter(|&c| c != 0).collect();
                for keep in 0..1u32 << old.len() {
                    let mut masks: Vec<u32> = rep
                        .iter()
                        .copied()
                        .filter(|m| !old.contains(m))
                        .chain(
                            old.iter()
                                .enumerate()
                                .filter(|(i, _)| keep >> i & 1 == 1)
                                .map(|(_, &m)| m),
                        )
                        .chain(chain.iter().map(|&c| c | x))
                        .collect();
                    masks.sort_unstable();
                    next.insert(canonical_form(&masks, size, &perms));
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Nonempty chains under strict inclusion, drawn from `pool` sorted by size.
fn chains(pool: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn extend(pool: &[u32], from: usize, chain: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(chain.clone());
        for i in from..pool.len() {
            let last = *chain.last().expect("nonempty");
            if pool[i] != last && pool[i] & last == last && pool[i].count_ones() > last.count_ones()
            {
                chain.push(pool[i]);
                extend(pool, i + 1, chain, out);
                chain.pop();
            }
        }
    }
    for i in 0..pool.len() {
        let mut chain = vec![pool[i]];
        extend(pool, i + 1, &mut chain, &mut out);
    }
    out
}

/// Representatives of all β-acyclic isomorphism classes with at most `n`
/// vertices.
pub fn all_beta_acyclic_up_to(n: usize) -> Vec<Hypergraph> {
    (1..=n)
        .flat_map(beta_acyclic_classes)
        .map(|m| from_masks(&m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_chordal_brute, peo, PeoResult};

    fn brute_classes(n: usize) -> BTreeSet<Vec<u32>> {
        let perms = permutations(n);
        let full = (1u32 << n) - 1;
        let mut out = BTreeSet::new();
        let subsets = (1u32 << n) - 1;
        for family in 1u64..1 << subsets {
            let masks: Vec<u32> = (0..subsets)
                .filter(|i| family >> i & 1 == 1)
                .map(|i| i + 1)
                .collect();
            if masks.iter().fold(0, |a, m| a | m) != full {
                continue;
            }
            if beta_elimination_order(&from_masks(&masks)).is_some() {
                out.insert(canonical_form(&masks, n, &perms));
            }
        }
        out
    }

    #[test]
    fn class_counts_match_brute_force() {
        for n in 1..=3 {
            let fast: BTreeSet<Vec<u32>> = beta_acyclic_classes(n).into_iter().collect();
            assert_eq!(fast, brute_classes(n), "n={n}");
        }
        assert_eq!(beta_acyclic_classes(1).len(), 1);
        assert_eq!(beta_acyclic_classes(2).len(), 4);
        assert_eq!(beta_acyclic_classes(3).len(), 26);
        assert_eq!(beta_acyclic_classes(4).len(), 456);
    }

    #[test]
    fn classes_are_beta_acyclic_and_cover_all_vertices() {
        for masks in beta_acyclic_classes(4) {
            let h = from_masks(&masks);
            assert_eq!(h.num_vertices(), 4);
            assert!(beta_elimination_order(&h).is_some());
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_hypergraph(&mut rng(7), 6, 5).to_json();
        let b = random_hypergraph(&mut rng(7), 6, 5).to_json();
        assert_eq!(a, b);
        let h = random_beta_acyclic(&mut rng(3), 6, 5);
        assert!(beta_elimination_order(&h).is_some());
        let i1 = random_instance(&mut rng(1), &h, 3, 8).to_json();
        let i2 = random_instance(&mut rng(1), &h, 3, 8).to_json();
        assert_eq!(i1, i2);
    }

    #[test]
    fn grown_hypergraphs_are_beta_acyclic() {
        let mut r = rng(9);
        for n in 1..=30 {
            let h = grow_beta_acyclic(&mut r, n, 2 * n);
            assert_eq!(h.num_vertices(), n);
            assert!(h.num_edges() <= 2 * n);
            assert!(beta_elimination_order(&h).is_some());
        }
    }

    #[test]
    fn random_branch_is_binary_bijection() {
        let mut r = rng(11);
        for _ in 0..20 {
            let h = random_hypergraph(&mut r, 6, 5);
            let bd = random_branch(&mut r, &h).unwrap();
            assert_eq!(bd.tree.len(), 2 * (h.num_vertices() + h.num_edges()) - 1);
        }
    }

    #[test]
    fn chordal_and_hole_generators() {
        let mut r = rng(5);
        for _ in 0..50 {
            let n = r.gen_range(1..=10);
            let g = random_chordal_graph(&mut r, n);
            assert!(is_chordal_brute(&g).unwrap());
            let (g, cycle) = graph_with_hole(&mut r, n.max(4));
            assert!(!is_chordal_brute(&g).unwrap(), "{cycle:?}");
            assert!(matches!(peo(&g), PeoResult::NotChordal(_)));
        }
    }

    #[test]
    fn small_hypergraph_count() {
        // C(15,1) + C(15,2) + C(15,3) + C(15,4)
        assert_eq!(all_hypergraph_masks(4, 4).len(), 15 + 105 + 455 + 1365);
    }
}
