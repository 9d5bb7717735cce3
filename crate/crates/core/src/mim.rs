//! Branch decompositions of the incidence graph, the simplified point
//! decomposition they induce, flattening into a point decomposition, and the
//! `H_n` family separating MIM-width from coverwidth.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::decomposition::{
    lattice, PointDecomposition, RootedTree, SimplifiedPointDecomposition, SubBag, TreeJson,
};
use crate::error::{check_limit, Error, Result};
use crate::exec::Exec;
use crate::graph::mim_cut;
use crate::hypergraph::{EdgeSet, Hypergraph, Point, PointSet, VertexSet, SUBSET_SEARCH_LIMIT};
use crate::solver::guards_of;

/// A vertex of the incidence graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Leaf {
    Vertex(usize),
    Edge(usize),
}

impl Leaf {
    /// Index in `inc(H)`: vertices first, then edges.
    pub fn incidence_index(self, h: &Hypergraph) -> usize {
        match self {
            Leaf::Vertex(v) => v,
            Leaf::Edge(e) => h.num_vertices() + e,
        }
    }
}

/// A binary rooted tree whose leaves are in bijection with `V(inc(H))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchDecomposition {
    pub tree: RootedTree,
    /// `leaves[t]` is set exactly for the leaves of the tree.
    pub leaves: Vec<Option<Leaf>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeafJson {
    kind: String,
    id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchJson {
    tree: TreeJson,
    leaves: BTreeMap<String, LeafJson>,
}

impl BranchDecomposition {
    pub fn new(h: &Hypergraph, tree: RootedTree, leaves: Vec<Option<Leaf>>) -> Result<Self> {
        let bd = BranchDecomposition { tree, leaves };
        bd.check(h)?;
        Ok(bd)
    }

    fn check(&self, h: &Hypergraph) -> Result<()> {
        let bad = |m: String| Error::InvalidDecomposition(m);
        if self.leaves.len() != self.tree.len() {
            return Err(bad("leaf map does not cover the tree".into()));
        }
        let mut seen = BTreeSet::new();
        for t in 0..self.tree.len() {
            let kids = self.tree.children(t).len();
            match (kids, self.leaves[t]) {
                (0, Some(l)) => {
                    let ok = match l {
                        Leaf::Vertex(v) => v < h.num_vertices(),
                        Leaf::Edge(e) => e < h.num_edges(),
                    };
                    if !ok || !seen.insert(l) {
                        return Err(bad(format!(
                            "leaf `{}` is out of range or repeated",
                            self.tree.name(t)
                        )));
                    }
                }
                (0, None) => {
                    return Err(bad(format!("leaf `{}` is not mapped", self.tree.name(t))))
                }
                (2, None) => {}
                (2, Some(_)) => {
                    return Err(bad(format!(
                        "internal node `{}` is mapped",
                        self.tree.name(t)
                    )))
                }
                _ => {
                    return Err(bad(format!(
                        "node `{}` has {kids} children",
                        self.tree.name(t)
                    )))
                }
            }
        }
        if seen.len() != h.num_vertices() + h.num_edges() {
            return Err(bad("leaves do not cover every vertex and edge".into()));
        }
        Ok(())
    }

    pub fn from_json(h: &Hypergraph, s: &str) -> Result<Self> {
        let raw: BranchJson = serde_json::from_str(s)?;
        let tree = RootedTree::from_json_parts(&raw.tree)?;
        let mut leaves = vec![None; tree.len()];
        for (name, l) in &raw.leaves {
            let t = tree.index(name)?;
            leaves[t] = Some(match l.kind.as_str() {
                "vertex" => Leaf::Vertex(h.vertex_index(&l.id)?),
                "edge" => Leaf::Edge(h.edge_index(&l.id)?),
                other => return Err(Error::Parse(format!("unknown leaf kind `{other}`"))),
            });
        }
        BranchDecomposition::new(h, tree, leaves)
    }

    pub fn to_json(&self, h: &Hypergraph) -> String {
        let leaves = (0..self.tree.len())
            .filter_map(|t| {
                self.leaves[t].map(|l| {
                    let (kind, id) = match l {
                        Leaf::Vertex(v) => ("vertex", h.vertex_name(v)),
                        Leaf::Edge(e) => ("edge", h.edge_name(e)),
                    };
                    (
                        self.tree.name(t).to_string(),
                        LeafJson {
                            kind: kind.into(),
                            id: id.into(),
                        },
                    )
                })
            })
            .collect();
        serde_json::to_string(&BranchJson {
            tree: self.tree.to_json_parts(),
            leaves,
        })
        .expect("serializable")
    }

    /// `V_t`, the incidence-graph vertices mapped below `t`.
    pub fn below(&self, t: usize) -> BTreeSet<Leaf> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            if let Some(l) = self.leaves[u] {
                out.insert(l);
            }
            stack.extend(self.tree.children(u));
        }
        out
    }
}

/// `max_t mim(inc(H)[V_t, V \ V_t])`.
pub fn mim_width_of_branch(h: &Hypergraph, bd: &BranchDecomposition, exec: Exec) -> Result<usize> {
    let inc = h.incidence_graph();
    let all = h.num_vertices() + h.num_edges();
    let nodes: Vec<usize> = (0..bd.tree.len()).collect();
    let widths = exec.map(&nodes, |&t| {
        let inside: Vec<usize> = bd
            .below(t)
            .into_iter()
            .map(|l| l.incidence_index(h))
            .collect();
        let outside: Vec<usize> = (0..all).filter(|i| !inside.contains(i)).collect();
        mim_cut(&inc, &inside, &outside)
    });
    widths.into_iter().try_fold(0, |m, w| Ok(m.max(w?)))
}

/// `C_t`: the points `(v, e)` with exactly one of `v`, `e` mapped below `t`.
pub fn cut_points(h: &Hypergraph, bd: &BranchDecomposition, t: usize) -> PointSet {
    let below = bd.below(t);
    let mut out = h.empty_points();
    for p in h.points().points() {
        if below.contains(&Leaf::Vertex(p.vertex)) != below.contains(&Leaf::Edge(p.edge)) {
            out.insert(p);
        }
    }
    out
}

/// `B_t = C_t` at leaves and `C_t ∪ (C_{t1} ∩ C_{t2})` elsewhere.
pub fn build_simplified_from_branch(
    h: &Hypergraph,
    bd: &BranchDecomposition,
) -> SimplifiedPointDecomposition {
    let cuts: Vec<PointSet> = (0..bd.tree.len()).map(|t| cut_points(h, bd, t)).collect();
    let bags = (0..bd.tree.len())
        .map(|t| match bd.tree.children(t) {
            [a, b] => cuts[t].union(&cuts[*a].intersection(&cuts[*b])),
            _ => cuts[t].clone(),
        })
        .collect();
    SimplifiedPointDecomposition {
        tree: bd.tree.clone(),
        bags,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConsistencyMode {
    /// Two witnesses, each a guard of at most `k` edges.
    Fast,
    /// Every subhypergraph.
    Oracle,
}

/// Whether some `H'` has `V(H'|_{B_t}) = S1` and `V(H'|_{B_{t'}}) = S2`,
/// for `s1 = (t, S1)`, `s2 = (t', S2)`.
pub fn consistent_subbags(
    spd: &SimplifiedPointDecomposition,
    h: &Hypergraph,
    s1: &SubBag,
    s2: &SubBag,
    k: usize,
    mode: ConsistencyMode,
) -> Result<bool> {
    let (b1, b2) = (&spd.bags[s1.node], &spd.bags[s2.node]);
    match mode {
        ConsistencyMode::Fast => {
            let r1: Vec<VertexSet> = (0..h.num_edges()).map(|e| h.restrict_edge(e, b1)).collect();
            let r2: Vec<VertexSet> = (0..h.num_edges()).map(|e| h.restrict_edge(e, b2)).collect();
            let reach =
                |g: EdgeSet, r: &[VertexSet]| g.iter().fold(VertexSet::EMPTY, |a, e| a.union(r[e]));
            Ok(guards_of(&r1, s1.set, Some(k))
                .into_iter()
                .any(|g| reach(g, &r2).is_subset(s2.set))
                && guards_of(&r2, s2.set, Some(k))
                    .into_iter()
                    .any(|g| reach(g, &r1).is_subset(s1.set)))
        }
        ConsistencyMode::Oracle => {
            check_limit(
                "edges for exhaustive consistency",
                h.num_edges(),
                SUBSET_SEARCH_LIMIT,
            )?;
            Ok((0..1u64 << h.num_edges())
                .map(EdgeSet::from_mask)
                .any(|sub| {
                    h.restricted_vertices(sub, b1) == s1.set
                        && h.restricted_vertices(sub, b2) == s2.set
                }))
        }
    }
}

/// The flat point decomposition on the same tree and bags, with an arc from
/// each child sub-bag to each consistent sub-bag of its parent. `k` bounds
/// the witnesses of the fast consistency check and should be at least the
/// width of `spd`.
pub fn flatten(
    spd: &SimplifiedPointDecomposition,
    h: &Hypergraph,
    k: usize,
    exec: Exec,
) -> Result<PointDecomposition> {
    let lattices: Vec<Vec<VertexSet>> = spd
        .bags
        .iter()
        .map(|b| lattice(h, b))
        .collect::<Result<_>>()?;
    let children: Vec<usize> = (0..spd.tree.len())
        .filter(|&t| spd.tree.parent(t).is_some())
        .collect();
    let per_child = exec.map(&children, |&t| -> Result<Vec<(SubBag, SubBag)>> {
        let p = spd.tree.parent(t).expect("non-root");
        let mut arcs = Vec::new();
        for &a in &lattices[t] {
            for &b in &lattices[p] {
                let (s1, s2) = (SubBag::new(t, a), SubBag::new(p, b));
                if consistent_subbags(spd, h, &s1, &s2, k, ConsistencyMode::Fast)? {
                    arcs.push((s1, s2));
                }
            }
        }
        Ok(arcs)
    });
    let mut arcs = BTreeSet::new();
    for part in per_child {
        arcs.extend(part?);
    }
    Ok(PointDecomposition {
        tree: spd.tree.clone(),
        bags: spd.bags.clone(),
        arcs,
    })
}

/// `H_n` with the branch decomposition of MIM-width at most 2.
#[derive(Clone, Debug)]
pub struct HnFamily {
    pub hypergraph: Hypergraph,
    pub branch: BranchDecomposition,
    /// For `n = 1` the two edges coincide and only one is kept.
    pub collapsed: bool,
}

/// `H_n` over `X = {x1..xn}`, `Y = {y1..yn}`, with edges `ex{i} = Y ∪ {x_i}`
/// and `ey{i} = X ∪ {y_i}`.
pub fn gen_hn(n: usize) -> Result<HnFamily> {
    if n == 0 {
        return Err(Error::InvalidHypergraph("H_n needs n ≥ 1".into()));
    }
    let xs: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    if n == 1 {
        let h = Hypergraph::new([("e1", vec!["x1", "y1"])])?;
        let names = ["r", "a", "lx", "ly", "le"].map(String::from).to_vec();
        let tree = RootedTree::from_parents(names, vec![None, Some(0), Some(1), Some(1), Some(0)])?;
        let mut leaves = vec![None; 5];
        leaves[tree.index("lx")?] = Some(Leaf::Vertex(h.vertex_index("x1")?));
        leaves[tree.index("ly")?] = Some(Leaf::Vertex(h.vertex_index("y1")?));
        leaves[tree.index("le")?] = Some(Leaf::Edge(0));
        let branch = BranchDecomposition::new(&h, tree, leaves)?;
        return Ok(HnFamily {
            hypergraph: h,
            branch,
            collapsed: true,
        });
    }
    let mut edges = Vec::new();
    for i in 0..n {
        let mut ex = ys.clone();
        ex.push(xs[i].clone());
        edges.push((format!("ex{}", i + 1), ex));
        let mut ey = xs.clone();
        ey.push(ys[i].clone());
        edges.push((format!("ey{}", i + 1), ey));
    }
    let h = Hypergraph::new(edges)?;

    let mut path = Vec::new();
    for side in ["t", "s"] {
        for i in 1..=n {
            for j in 1..=2 {
                path.push(format!("{side}{i}.{j}"));
            }
        }
    }
    let mut names = path.clone();
    let mut parent: Vec<Option<usize>> = (0..path.len()).map(|i| i.checked_sub(1)).collect();
    let mut mapped: Vec<(usize, Leaf)> = Vec::new();
    let v = |name: &str| h.vertex_index(name);
    let e = |name: String| h.edge_index(&name);
    let mut attach =
        |on: usize, leaf: Leaf, names: &mut Vec<String>, parent: &mut Vec<Option<usize>>| {
            names.push(format!("{}'", path[on]));
            parent.push(Some(on));
            mapped.push((names.len() - 1, leaf));
        };
    for i in 0..n {
        attach(2 * i, Leaf::Vertex(v(&xs[i])?), &mut names, &mut parent);
        attach(
            2 * i + 1,
            Leaf::Edge(e(format!("ex{}", i + 1))?),
            &mut names,
            &mut parent,
        );
    }
    let s = |i: usize, j: usize| 2 * n + 2 * i + j;
    for i in 0..n {
        attach(s(i, 0), Leaf::Vertex(v(&ys[i])?), &mut names, &mut parent);
        if i + 1 < n {
            attach(
                s(i, 1),
                Leaf::Edge(e(format!("ey{}", i + 1))?),
                &mut names,
                &mut parent,
            );
        }
    }
    mapped.push((s(n - 1, 1), Leaf::Edge(e(format!("ey{n}"))?)));

    // from_parents renames by sorted order; map through names.
    let original = names.clone();
    let tree = RootedTree::from_parents(names, parent)?;
    let mut leaves = vec![None; tree.len()];
    for (i, leaf) in mapped {
        leaves[tree.index(&original[i])?] = Some(leaf);
    }
    let branch = BranchDecomposition::new(&h, tree, leaves)?;
    Ok(HnFamily {
        hypergraph: h,
        branch,
        collapsed: false,
    })
}

/// Points of `H` as a set, for building bags by hand.
pub fn points_from(h: &Hypergraph, pts: &[(usize, usize)]) -> PointSet {
    let mut out = h.empty_points();
    for &(vertex, edge) in pts {
        out.insert(Point { vertex, edge });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::tests::fan;
    use crate::decomposition::{
        is_flat, validate_pd, validate_spd, width_of_bags, width_of_pd, ValidationMode,
    };
    use crate::graph::max_induced_matching;

    /// A caterpillar: leaves attached one by one along a spine.
    fn caterpillar(h: &Hypergraph, leaves: &[Leaf]) -> BranchDecomposition {
        let m = leaves.len();
        assert!(m >= 2);
        let mut names = Vec::new();
        let mut parent = Vec::new();
        let mut mapped = Vec::new();
        // spine c0 (root) .. c{m-2}; c{m-2} holds the last two leaves
        for i in 0..m - 1 {
            names.push(format!("c{i:02}"));
            parent.push(i.checked_sub(1));
        }
        for (i, &l) in leaves.iter().enumerate() {
            names.push(format!("l{i:02}"));
            parent.push(Some(i.min(m - 2)));
            mapped.push((names.len() - 1, l));
        }
        let original = names.clone();
        let tree = RootedTree::from_parents(names, parent).unwrap();
        let mut map = vec![None; tree.len()];
        for (i, l) in mapped {
            map[tree.index(&original[i]).unwrap()] = Some(l);
        }
        BranchDecomposition::new(h, tree, map).unwrap()
    }

    fn all_leaves(h: &Hypergraph) -> Vec<Leaf> {
        (0..h.num_vertices())
            .map(Leaf::Vertex)
            .chain((0..h.num_edges()).map(Leaf::Edge))
            .collect()
    }

    /// The definition over raw cuts: induced matchings found by subset search.
    fn brute_mim_width(h: &Hypergraph, bd: &BranchDecomposition) -> usize {
        let pts = h.points().points();
        (0..bd.tree.len())
            .map(|t| {
                let below = bd.below(t);
                let cut: Vec<Point> = pts
                    .iter()
                    .copied()
                    .filter(|p| {
                        below.contains(&Leaf::Vertex(p.vertex))
                            != below.contains(&Leaf::Edge(p.edge))
                    })
                    .collect();
                let mut best = 0;
                for m in 0..1u64 << cut.len() {
                    let chosen: Vec<Point> = (0..cut.len())
                        .filter(|i| m >> i & 1 == 1)
                        .map(|i| cut[i])
                        .collect();
                    let vs: BTreeSet<usize> = chosen.iter().map(|p| p.vertex).collect();
                    let es: BTreeSet<usize> = chosen.iter().map(|p| p.edge).collect();
                    if vs.len() != chosen.len() || es.len() != chosen.len() {
                        continue;
                    }
                    let induced = cut
                        .iter()
                        .filter(|p| vs.contains(&p.vertex) && es.contains(&p.edge))
                        .count();
                    if induced == chosen.len() {
                        best = best.max(chosen.len());
                    }
                }
                best
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn json_round_trip() {
        let hn = gen_hn(2).unwrap();
        let j = hn.branch.to_json(&hn.hypergraph);
        let back = BranchDecomposition::from_json(&hn.hypergraph, &j).unwrap();
        assert_eq!(back, hn.branch);
        assert_eq!(back.to_json(&hn.hypergraph), j);
    }

    #[test]
    fn non_binary_trees_are_rejected() {
        let h = Hypergraph::new([("e", vec!["a"])]).unwrap();
        let j = r#"{"tree":{"root":"r","parent":{"a":"r","b":"r","c":"r"}},
            "leaves":{"a":{"kind":"vertex","id":"a"},"b":{"kind":"edge","id":"e"},"c":{"kind":"edge","id":"e"}}}"#;
        assert!(BranchDecomposition::from_json(&h, j).is_err());
    }

    #[test]
    fn single_edge_caterpillar_has_width_one() {
        let h = Hypergraph::new([("e", vec!["a", "b"])]).unwrap();
        let bd = caterpillar(&h, &all_leaves(&h));
        assert_eq!(mim_width_of_branch(&h, &bd, Exec::Sequential).unwrap(), 1);
        let spd = build_simplified_from_branch(&h, &bd);
        assert_eq!(width_of_bags(&h, &spd.bags).unwrap(), 1);
    }

    #[test]
    fn hn_branch_widths() {
        for n in 2..=4 {
            let hn = gen_hn(n).unwrap();
            assert!(!hn.collapsed);
            assert_eq!(hn.hypergraph.num_edges(), 2 * n);
            assert_eq!(hn.hypergraph.num_vertices(), 2 * n);
            let w = mim_width_of_branch(&hn.hypergraph, &hn.branch, Exec::Sequential).unwrap();
            assert!(w <= 2, "n={n}: {w}");
        }
        assert_eq!(
            mim_width_of_branch(
                &gen_hn(2).unwrap().hypergraph,
                &gen_hn(2).unwrap().branch,
                Exec::Parallel
            )
            .unwrap(),
            brute_mim_width(&gen_hn(2).unwrap().hypergraph, &gen_hn(2).unwrap().branch)
        );
    }

    #[test]
    fn hn_one_collapses() {
        let hn = gen_hn(1).unwrap();
        assert!(hn.collapsed);
        assert_eq!(hn.hypergraph.num_edges(), 1);
        assert_eq!(
            mim_width_of_branch(&hn.hypergraph, &hn.branch, Exec::Sequential).unwrap(),
            1
        );
    }

    #[test]
    fn cut_points_examples() {
        let hn = gen_hn(2).unwrap();
        let (h, bd) = (&hn.hypergraph, &hn.branch);
        assert!(cut_points(h, bd, bd.tree.root()).is_empty());
        let x1 = h.vertex_index("x1").unwrap();
        let leaf = (0..bd.tree.len())
            .find(|&t| bd.leaves[t] == Some(Leaf::Vertex(x1)))
            .unwrap();
        let expected: Vec<(usize, usize)> = h.incident(x1).iter().map(|e| (x1, e)).collect();
        assert_eq!(cut_points(h, bd, leaf), points_from(h, &expected));
    }

    #[test]
    fn fan_random_caterpillars_match_brute_force() {
        let h = fan();
        let mut leaves = all_leaves(&h);
        for shift in 0..leaves.len() {
            leaves.rotate_left(1);
            if shift % 2 == 0 {
                leaves.swap(0, 3);
            }
            let bd = caterpillar(&h, &leaves);
            assert_eq!(
                mim_width_of_branch(&h, &bd, Exec::Sequential).unwrap(),
                brute_mim_width(&h, &bd)
            );
        }
    }

    #[test]
    fn hn_pipeline() {
        let hn = gen_hn(2).unwrap();
        let (h, bd) = (&hn.hypergraph, &hn.branch);
        let mimw = mim_width_of_branch(h, bd, Exec::Sequential).unwrap();
        let spd = build_simplified_from_branch(h, bd);
        let w = width_of_bags(h, &spd.bags).unwrap();
        assert!(w <= 2 * mimw);
        assert!(validate_spd(h, &spd).unwrap().valid);
        let pd = flatten(&spd, h, w, Exec::Sequential).unwrap();
        assert!(is_flat(&pd));
        assert_eq!(pd.bags, spd.bags);
        assert_eq!(width_of_pd(h, &pd).unwrap(), w);
        let report = validate_pd(h, &pd, ValidationMode::Exhaustive, Exec::Parallel, 0).unwrap();
        assert!(report.valid, "{}", report.to_json());
    }

    #[test]
    fn consistency_modes_agree() {
        let h = fan();
        let mut leaves = all_leaves(&h);
        for round in 0..4 {
            leaves.rotate_left(3);
            let bd = caterpillar(&h, &leaves);
            let spd = build_simplified_from_branch(&h, &bd);
            let k = width_of_bags(&h, &spd.bags).unwrap();
            for t in 0..spd.tree.len() {
                let Some(p) = spd.tree.parent(t) else {
                    continue;
                };
                for a in lattice(&h, &spd.bags[t]).unwrap() {
                    for b in lattice(&h, &spd.bags[p]).unwrap() {
                        let (s1, s2) = (SubBag::new(t, a), SubBag::new(p, b));
                        let fast = consistent_subbags(&spd, &h, &s1, &s2, k, ConsistencyMode::Fast)
                            .unwrap();
                        let oracle =
                            consistent_subbags(&spd, &h, &s1, &s2, k, ConsistencyMode::Oracle)
                                .unwrap();
                        assert_eq!(fast, oracle, "round {round}");
                        // the union of all admissible edges is the largest witness
                        let closure = (0..h.num_edges())
                            .filter(|&e| {
                                h.restrict_edge(e, &spd.bags[t]).is_subset(a)
                                    && h.restrict_edge(e, &spd.bags[p]).is_subset(b)
                            })
                            .fold(EdgeSet::EMPTY, |s, e| s.with(e));
                        let third = h.restricted_vertices(closure, &spd.bags[t]) == a
                            && h.restricted_vertices(closure, &spd.bags[p]) == b;
                        assert_eq!(fast, third);
                    }
                }
            }
        }
    }

    #[test]
    fn consistency_trivial_cases() {
        let h = fan();
        let bd = caterpillar(&h, &all_leaves(&h));
        let spd = build_simplified_from_branch(&h, &bd);
        let k = width_of_bags(&h, &spd.bags).unwrap();
        for t in 0..spd.tree.len() {
            let Some(p) = spd.tree.parent(t) else {
                continue;
            };
            let full = |u: usize| h.restricted_vertices(h.all_edges(), &spd.bags[u]);
            let (s1, s2) = (SubBag::new(t, full(t)), SubBag::new(p, full(p)));
            assert!(consistent_subbags(&spd, &h, &s1, &s2, k, ConsistencyMode::Fast).unwrap());
            for e in 0..h.num_edges() {
                let one = EdgeSet::singleton(e);
                let s1 = SubBag::new(t, h.restricted_vertices(one, &spd.bags[t]));
                let s2 = SubBag::new(p, h.restricted_vertices(one, &spd.bags[p]));
                assert!(consistent_subbags(&spd, &h, &s1, &s2, k, ConsistencyMode::Fast).unwrap());
            }
        }
    }

    #[test]
    fn single_node_spd_flattens_to_itself() {
        let h = fan();
        let spd = SimplifiedPointDecomposition {
            tree: RootedTree::single("r"),
            bags: vec![h.points()],
        };
        let pd = flatten(&spd, &h, 1, Exec::Sequential).unwrap();
        assert!(pd.arcs.is_empty());
        let report = validate_pd(&h, &pd, ValidationMode::Exhaustive, Exec::Sequential, 0).unwrap();
        assert!(report.valid);
    }

    #[test]
    fn cut_bags_have_mim_at_most_twice_the_cut() {
        let h = fan();
        let bd = caterpillar(&h, &all_leaves(&h));
        let spd = build_simplified_from_branch(&h, &bd);
        let mimw = mim_width_of_branch(&h, &bd, Exec::Sequential).unwrap();
        for b in &spd.bags {
            let sub = h.restricted_sets(b);
            let g = Hypergraph::new(
                sub.sets()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (format!("f{i}"), h.vertex_names_of(*s))),
            )
            .unwrap();
            assert!(max_induced_matching(&g.incidence_graph()).unwrap() <= 2 * mimw);
        }
    }
}
