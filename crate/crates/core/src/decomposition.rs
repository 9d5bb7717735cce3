//! Rooted trees, point decompositions and their simplified form: sub-bag
//! lattices, T-structures, realisations, validation and width.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_limit, Error, Result};
use crate::exec::Exec;
use crate::hypergraph::{
    beta_cover_number, EdgeSet, Hypergraph, PointSet, VertexSet, SUBSET_SEARCH_LIMIT,
};

/// Largest sub-bag lattice computed for a single bag.
pub const LATTICE_LIMIT: usize = 1 << 20;

/// Realisations enumerated before exhaustive validation falls back to sampling.
pub const REALISATION_BUDGET: u64 = 1_000_000;

/// Random realisations (and random subhypergraphs) examined when sampling.
pub const SAMPLE_COUNT: usize = 10_000;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidDecomposition(msg.into())
}

/// A growable bitset over tree nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeSet(Vec<u64>);

impl NodeSet {
    pub fn new(n: usize) -> Self {
        NodeSet(vec![0; n.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, o: &NodeSet) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    pub fn intersects(&self, o: &NodeSet) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    names: Vec<String>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TreeJson {
    root: String,
    parent: BTreeMap<String, String>,
}

impl RootedTree {
    /// Nodes are the root plus every name in `parent`.
    pub fn new(root: &str, parent: &BTreeMap<String, String>) -> Result<Self> {
        let mut names: BTreeSet<String> = BTreeSet::from([root.to_string()]);
        for (c, p) in parent {
            names.insert(c.clone());
            names.insert(p.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut par = vec![None; names.len()];
        for (c, p) in parent {
            if c == p {
                return Err(invalid(format!("node `{c}` is its own parent")));
            }
            par[index[c.as_str()]] = Some(index[p.as_str()]);
        }
        let root = index[root];
        if par[root].is_some() {
            return Err(invalid("the root has a parent"));
        }
        RootedTree::from_parents(names, par)
    }

    /// `names` in any order; `parent[i]` refers to positions in `names`.
    pub fn from_parents(names: Vec<String>, parent: Vec<Option<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(invalid("a tree needs at least one node"));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| names[a].cmp(&names[b]));
        if perm.windows(2).any(|w| names[w[0]] == names[w[1]]) {
            return Err(invalid("duplicate node name"));
        }
        let mut new_of_old = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            new_of_old[old] = new;
        }
        let sorted_names: Vec<String> = perm.iter().map(|&o| names[o].clone()).collect();
        let par: Vec<Option<usize>> = perm
            .iter()
            .map(|&o| parent[o].map(|p| new_of_old[p]))
            .collect();
        let roots: Vec<usize> = (0..n).filter(|&i| par[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(invalid(format!("expected one root, found {}", roots.len())));
        }
        let root = roots[0];
        let mut children = vec![Vec::new(); n];
        for (c, p) in par.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(c);
            }
        }
        let mut depth = vec![usize::MAX; n];
        depth[root] = 0;
        let mut stack = vec![root];
        let mut reached = 1;
        while let Some(t) = stack.pop() {
            for &c in &children[t] {
                depth[c] = depth[t] + 1;
                reached += 1;
                stack.push(c);
            }
        }
        if reached != n {
            return Err(invalid("parent map has a cycle"));
        }
        Ok(RootedTree {
            names: sorted_names,
            parent: par,
            children,
            depth,
            root,
        })
    }

    pub fn single(name: &str) -> Self {
        RootedTree::from_parents(vec![name.to_string()], vec![None]).expect("one node is a tree")
    }

    pub(crate) fn from_json_parts(j: &TreeJson) -> Result<Self> {
        RootedTree::new(&j.root, &j.parent)
    }

    pub(crate) fn to_json_parts(&self) -> TreeJson {
        TreeJson {
            root: self.names[self.root].clone(),
            parent: (0..self.len())
                .filter_map(|t| {
                    self.parent[t].map(|p| (self.names[t].clone(), self.names[p].clone()))
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn name(&self, t: usize) -> &str {
        &self.names[t]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map_err(|_| invalid(format!("unknown tree node `{name}`")))
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    pub fn depth(&self, t: usize) -> usize {
        self.depth[t]
    }

    pub fn is_leaf(&self, t: usize) -> bool {
        self.children[t].is_empty()
    }

    /// `a <_T b`: `a` is a strict descendant of `b`.
    pub fn is_descendant(&self, a: usize, b: usize) -> bool {
        let mut x = a;
        while self.depth[x] > self.depth[b] {
            x = self.parent[x].expect("non-root has a parent");
        }
        x == b && a != b
    }

    /// Children before parents, children in name order.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in self.children[t].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Parents before children, children in name order.
    pub fn pre_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(t) = stack.pop() {
            out.push(t);
            for &c in self.children[t].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Tree edges as `(child, parent)` name pairs, sorted.
    pub fn edge_names(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = (0..self.len())
            .filter_map(|t| self.parent[t].map(|p| (self.names[t].clone(), self.names[p].clone())))
            .collect();
        out.sort();
        out
    }

    /// Whether `set` (nonempty) induces a connected subtree.
    pub fn is_connected(&self, set: &NodeSet) -> bool {
        let tops = set
            .iter()
            .filter(|&t| self.parent[t].is_none_or(|p| !set.contains(p)))
            .count();
        tops <= 1
    }
}

/// A sub-bag `(t, S)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubBag {
    pub node: usize,
    pub set: VertexSet,
}

impl SubBag {
    pub fn new(node: usize, set: VertexSet) -> Self {
        SubBag { node, set }
    }
}

type SubBagJson = (String, Vec<String>);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PdJson {
    tree: TreeJson,
    bags: BTreeMap<String, Vec<(String, String)>>,
    arcs: Vec<(SubBagJson, SubBagJson)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpdJson {
    tree: TreeJson,
    bags: BTreeMap<String, Vec<(String, String)>>,
}

fn bags_from_json(
    h: &Hypergraph,
    tree: &RootedTree,
    bags: &BTreeMap<String, Vec<(String, String)>>,
) -> Result<Vec<PointSet>> {
    let mut out = vec![h.empty_points(); tree.len()];
    for (t, pts) in bags {
        let t = tree.index(t)?;
        for (v, e) in pts {
            out[t].insert(h.point(v, e)?);
        }
    }
    Ok(out)
}

fn bags_to_json(
    h: &Hypergraph,
    tree: &RootedTree,
    bags: &[PointSet],
) -> BTreeMap<String, Vec<(String, String)>> {
    (0..tree.len())
        .map(|t| {
            let mut pts: Vec<(String, String)> = bags[t]
                .points()
                .into_iter()
                .map(|p| {
                    (
                        h.vertex_name(p.vertex).to_string(),
                        h.edge_name(p.edge).to_string(),
                    )
                })
                .collect();
            pts.sort();
            (tree.name(t).to_string(), pts)
        })
        .collect()
}

pub fn subbag_to_names(h: &Hypergraph, tree: &RootedTree, s: &SubBag) -> (String, Vec<String>) {
    (tree.name(s.node).to_string(), h.vertex_names_of(s.set))
}

fn subbag_from_names(h: &Hypergraph, tree: &RootedTree, s: &SubBagJson) -> Result<SubBag> {
    let mut uniq: Vec<&String> = s.1.iter().collect();
    uniq.sort();
    uniq.dedup();
    if uniq.len() != s.1.len() {
        return Err(Error::Parse(format!(
            "sub-bag of `{}` repeats a vertex",
            s.0
        )));
    }
    Ok(SubBag::new(tree.index(&s.0)?, h.vertex_set(&s.1)?))
}

pub fn format_subbag(h: &Hypergraph, tree: &RootedTree, s: &SubBag) -> String {
    format!(
        "({},{{{}}})",
        tree.name(s.node),
        h.vertex_names_of(s.set).join(",")
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDecomposition {
    pub tree: RootedTree,
    pub bags: Vec<PointSet>,
    pub arcs: BTreeSet<(SubBag, SubBag)>,
}

impl PointDecomposition {
    /// Parses and checks that every arc endpoint is a genuine sub-bag.
    pub fn from_json(h: &Hypergraph, s: &str) -> Result<Self> {
        let j: PdJson = serde_json::from_str(s)?;
        let tree = RootedTree::from_json_parts(&j.tree)?;
        let bags = bags_from_json(h, &tree, &j.bags)?;
        let arcs = j
            .arcs
            .iter()
            .map(|(a, b)| {
                Ok((
                    subbag_from_names(h, &tree, a)?,
                    subbag_from_names(h, &tree, b)?,
                ))
            })
            .collect::<Result<BTreeSet<_>>>()?;
        let pd = PointDecomposition { tree, bags, arcs };
        let lattices = pd.lattices(h)?;
        for (a, b) in &pd.arcs {
            for s in [a, b] {
                if lattices[s.node].binary_search(&s.set).is_err() {
                    return Err(invalid(format!(
                        "{} is not a sub-bag",
                        format_subbag(h, &pd.tree, s)
                    )));
                }
            }
        }
        Ok(pd)
    }

    pub fn to_json(&self, h: &Hypergraph) -> String {
        let mut arcs: Vec<(SubBagJson, SubBagJson)> = self
            .arcs
            .iter()
            .map(|(a, b)| {
                (
                    subbag_to_names(h, &self.tree, a),
                    subbag_to_names(h, &self.tree, b),
                )
            })
            .collect();
        arcs.sort();
        let j = PdJson {
            tree: self.tree.to_json_parts(),
            bags: bags_to_json(h, &self.tree, &self.bags),
            arcs,
        };
        serde_json::to_string_pretty(&j).expect("decomposition serializes")
    }

    pub fn lattices(&self, h: &Hypergraph) -> Result<Vec<Vec<VertexSet>>> {
        self.bags.iter().map(|b| lattice(h, b)).collect()
    }

    pub fn without_arcs(&self) -> SimplifiedPointDecomposition {
        SimplifiedPointDecomposition {
            tree: self.tree.clone(),
            bags: self.bags.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplifiedPointDecomposition {
    pub tree: RootedTree,
    pub bags: Vec<PointSet>,
}

impl SimplifiedPointDecomposition {
    pub fn from_json(h: &Hypergraph, s: &str) -> Result<Self> {
        let j: SpdJson = serde_json::from_str(s)?;
        let tree = RootedTree::from_json_parts(&j.tree)?;
        let bags = bags_from_json(h, &tree, &j.bags)?;
        Ok(SimplifiedPointDecomposition { tree, bags })
    }

    pub fn to_json(&self, h: &Hypergraph) -> String {
        let j = SpdJson {
            tree: self.tree.to_json_parts(),
            bags: bags_to_json(h, &self.tree, &self.bags),
        };
        serde_json::to_string_pretty(&j).expect("decomposition serializes")
    }
}

/// `L(H|_B)`: every `V(H'|_B)`, including `∅`, sorted. Computed as the union
/// closure of the restricted edges.
pub fn lattice(h: &Hypergraph, bag: &PointSet) -> Result<Vec<VertexSet>> {
    let mut all: BTreeSet<VertexSet> = BTreeSet::from([VertexSet::EMPTY]);
    for r in h.restricted_sets(bag).sets() {
        let grown: Vec<VertexSet> = all.iter().map(|s| s.union(*r)).collect();
        all.extend(grown);
        check_limit("sub-bag lattice", all.len(), LATTICE_LIMIT)?;
    }
    Ok(all.into_iter().collect())
}

/// Unions of at most `k` restricted edges.
pub fn lattice_bounded(h: &Hypergraph, bag: &PointSet, k: usize) -> Vec<VertexSet> {
    let sets = h.restricted_sets(bag);
    let mut layer: BTreeSet<VertexSet> = BTreeSet::from([VertexSet::EMPTY]);
    let mut all = layer.clone();
    for _ in 0..k {
        layer = layer
            .iter()
            .flat_map(|s| sets.sets().iter().map(move |r| s.union(*r)))
            .filter(|s| !all.contains(s))
            .collect();
        if layer.is_empty() {
            break;
        }
        all.extend(layer.iter().copied());
    }
    all.into_iter().collect()
}

/// `V(H'|_B)` over every subhypergraph `H'`.
pub fn lattice_exhaustive(h: &Hypergraph, bag: &PointSet) -> Result<Vec<VertexSet>> {
    check_limit(
        "subhypergraph enumeration",
        h.num_edges(),
        SUBSET_SEARCH_LIMIT,
    )?;
    let all: BTreeSet<VertexSet> = (0..1u64 << h.num_edges())
        .map(|m| h.restricted_vertices(EdgeSet::from_mask(m), bag))
        .collect();
    Ok(all.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeMode {
    Closure,
    Bounded(usize),
    Exhaustive,
}

pub fn enumerate_subbags(
    h: &Hypergraph,
    bags: &[PointSet],
    t: usize,
    mode: LatticeMode,
) -> Result<Vec<VertexSet>> {
    match mode {
        LatticeMode::Closure => lattice(h, &bags[t]),
        LatticeMode::Bounded(k) => Ok(lattice_bounded(h, &bags[t], k)),
        LatticeMode::Exhaustive => lattice_exhaustive(h, &bags[t]),
    }
}

/// Indexed view of a T-structure: every sub-bag gets an id, sorted by
/// `(node, set)`, with arc adjacency in both directions.
#[derive(Clone, Debug)]
pub struct TStructure {
    pub subbags: Vec<SubBag>,
    pub by_node: Vec<Vec<usize>>,
    pub out: Vec<Vec<usize>>,
    pub inn: Vec<Vec<usize>>,
    /// `restricted[t][e] = e|_{B_t}`.
    pub restricted: Vec<Vec<VertexSet>>,
    index: HashMap<SubBag, usize>,
    arcs: HashSet<(usize, usize)>,
}

impl TStructure {
    /// Fails when an arc endpoint is not a sub-bag or an arc does not go from
    /// a node to a strict ancestor.
    pub fn new(h: &Hypergraph, pd: &PointDecomposition) -> Result<Self> {
        let lattices = pd.lattices(h)?;
        let mut subbags = Vec::new();
        let mut by_node = vec![Vec::new(); pd.tree.len()];
        for (t, lat) in lattices.iter().enumerate() {
            for &s in lat {
                by_node[t].push(subbags.len());
                subbags.push(SubBag::new(t, s));
            }
        }
        let index: HashMap<SubBag, usize> =
            subbags.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut out = vec![Vec::new(); subbags.len()];
        let mut inn = vec![Vec::new(); subbags.len()];
        let mut arcs = HashSet::new();
        for (a, b) in &pd.arcs {
            let lookup = |s: &SubBag| {
                index.get(s).copied().ok_or_else(|| {
                    invalid(format!(
                        "{} is not a sub-bag",
                        format_subbag(h, &pd.tree, s)
                    ))
                })
            };
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if !pd.tree.is_descendant(a.node, b.node) {
                return Err(invalid(format!(
                    "arc {} -> {} does not point to a strict ancestor",
                    format_subbag(h, &pd.tree, a),
                    format_subbag(h, &pd.tree, b)
                )));
            }
            out[ia].push(ib);
            inn[ib].push(ia);
            arcs.insert((ia, ib));
        }
        let restricted = pd
            .bags
            .iter()
            .map(|b| (0..h.num_edges()).map(|e| h.restrict_edge(e, b)).collect())
            .collect();
        Ok(TStructure {
            subbags,
            by_node,
            out,
            inn,
            restricted,
            index,
            arcs,
        })
    }

    pub fn len(&self) -> usize {
        self.subbags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subbags.is_empty()
    }

    pub fn id(&self, s: &SubBag) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.arcs.contains(&(a, b))
    }

    pub fn node(&self, id: usize) -> usize {
        self.subbags[id].node
    }

    pub fn set(&self, id: usize) -> VertexSet {
        self.subbags[id].set
    }

    /// `V(H'|_{B_t})`.
    pub fn restricted_vertices(&self, t: usize, sub: EdgeSet) -> VertexSet {
        sub.iter()
            .fold(VertexSet::EMPTY, |a, e| a.union(self.restricted[t][e]))
    }
}

/// A pair of co-headed arcs `(s1,s)`, `(s2,s)` violating decomposability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposabilityViolation {
    pub head: SubBag,
    pub first: SubBag,
    pub second: SubBag,
}

/// For every sub-bag, the tree nodes owning a sub-bag that reaches it by a
/// (possibly empty) directed path.
pub fn reaching_nodes(st: &TStructure, tree: &RootedTree) -> Vec<NodeSet> {
    let mut reach = vec![NodeSet::new(tree.len()); st.len()];
    for t in tree.post_order() {
        for &id in &st.by_node[t] {
            let mut r = NodeSet::new(tree.len());
            r.insert(t);
            for &src in &st.inn[id] {
                r.union_with(&reach[src]);
            }
            reach[id] = r;
        }
    }
    reach
}

pub fn find_decomposability_violation(
    st: &TStructure,
    tree: &RootedTree,
) -> Option<DecomposabilityViolation> {
    let reach = reaching_nodes(st, tree);
    for s in 0..st.len() {
        let ins = &st.inn[s];
        for (i, &a) in ins.iter().enumerate() {
            for &b in &ins[i + 1..] {
                if st.node(a) != st.node(b)
                    && reach[a].intersects(&reach[b])
                    && !st.has_arc(a, b)
                    && !st.has_arc(b, a)
                {
                    return Some(DecomposabilityViolation {
                        head: st.subbags[s],
                        first: st.subbags[a],
                        second: st.subbags[b],
                    });
                }
            }
        }
    }
    None
}

pub fn check_decomposable(
    h: &Hypergraph,
    pd: &PointDecomposition,
) -> Result<Option<DecomposabilityViolation>> {
    let st = TStructure::new(h, pd)?;
    Ok(find_decomposability_violation(&st, &pd.tree))
}

/// `V(A[H']_∅)`.
pub fn restrict_tstructure(
    h: &Hypergraph,
    pd: &PointDecomposition,
    sub: EdgeSet,
) -> BTreeSet<SubBag> {
    let tree = &pd.tree;
    let members: Vec<SubBag> = (0..tree.len())
        .map(|t| SubBag::new(t, h.restricted_vertices(sub, &pd.bags[t])))
        .collect();
    let mut uf = UnionFind::new(tree.len());
    for (a, b) in &pd.arcs {
        if members[a.node] == *a && members[b.node] == *b {
            uf.union(a.node, b.node);
        }
    }
    let mut keep = vec![false; tree.len()];
    for t in 0..tree.len() {
        if t == tree.root() || !members[t].set.is_empty() {
            keep[uf.find(t)] = true;
        }
    }
    members
        .into_iter()
        .filter(|s| keep[uf.find(s.node)])
        .collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

fn sinks(pd: &PointDecomposition, x: &BTreeSet<SubBag>) -> Vec<SubBag> {
    x.iter()
        .filter(|s| !pd.arcs.iter().any(|(a, b)| a == *s && x.contains(b)))
        .copied()
        .collect()
}

fn at_most_one_per_node(x: &BTreeSet<SubBag>) -> bool {
    let nodes: BTreeSet<usize> = x.iter().map(|s| s.node).collect();
    nodes.len() == x.len()
}

pub fn is_realisation(pd: &PointDecomposition, x: &BTreeSet<SubBag>) -> bool {
    if !at_most_one_per_node(x) {
        return false;
    }
    let s = sinks(pd, x);
    s.len() == 1 && s[0].node == pd.tree.root()
}

/// `T_{A'}` for a realisation or partial realisation, over node names.
pub fn tree_of(pd: &PointDecomposition, x: &BTreeSet<SubBag>) -> Result<RootedTree> {
    if !at_most_one_per_node(x) {
        return Err(invalid("two sub-bags of the same node"));
    }
    if sinks(pd, x).len() != 1 {
        return Err(invalid("not exactly one sink"));
    }
    let members: Vec<&SubBag> = x.iter().collect();
    let mut parents = Vec::with_capacity(members.len());
    for s in &members {
        let heads = pd
            .arcs
            .iter()
            .filter(|(a, b)| a == *s && x.contains(b))
            .map(|(_, b)| b.node);
        let mut least: Option<usize> = None;
        for t in heads {
            least = match least {
                None => Some(t),
                Some(l) if pd.tree.is_descendant(t, l) => Some(t),
                Some(l) if pd.tree.is_descendant(l, t) => Some(l),
                Some(_) => return Err(invalid("arc heads are not comparable")),
            };
        }
        parents.push(least.map(|t| {
            members
                .iter()
                .position(|m| m.node == t)
                .expect("head is a member")
        }));
    }
    RootedTree::from_parents(
        members
            .iter()
            .map(|s| pd.tree.name(s.node).to_string())
            .collect(),
        parents,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    Fast,
    Exhaustive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Every quantified condition was checked over its full range.
    pub complete: bool,
    pub status: String,
    pub violations: Vec<Violation>,
    pub subhypergraphs_checked: u64,
    pub realisations_checked: u64,
    pub sampled_realisations: u64,
}

impl ValidationReport {
    fn finish(mut self) -> Self {
        self.valid = self.violations.is_empty();
        self.status = if !self.valid {
            "invalid".into()
        } else if self.complete {
            "valid".into()
        } else {
            "partially validated".into()
        };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A connectivity failure found while growing a realisation.
#[derive(Clone, Debug)]
struct Disconnected {
    vertex: usize,
    members: Vec<usize>,
}

struct Walker<'a> {
    st: &'a TStructure,
    tree: &'a RootedTree,
    order: Vec<usize>,
}

enum Walk {
    Done,
    OverBudget,
    Fault(Disconnected),
}

impl<'a> Walker<'a> {
    fn new(st: &'a TStructure, tree: &'a RootedTree) -> Self {
        Walker {
            st,
            tree,
            order: tree.pre_order(),
        }
    }

    /// Deepest chosen head of an arc leaving `id`, i.e. its parent in `T_{A'}`.
    fn parent_in(&self, id: usize, chosen: &[Option<usize>]) -> Option<usize> {
        self.st.out[id]
            .iter()
            .copied()
            .filter(|&h| chosen[self.st.node(h)] == Some(h))
            .max_by_key(|&h| self.tree.depth(self.st.node(h)))
    }

    /// Vertices of `id` not in its parent's sub-bag.
    fn tops(&self, id: usize, parent: Option<usize>) -> VertexSet {
        let s = self.st.set(id);
        parent.map_or(s, |p| s.difference(self.st.set(p)))
    }

    fn fault(&self, chosen: &[Option<usize>], seen_dup: VertexSet) -> Disconnected {
        Disconnected {
            vertex: seen_dup.min().expect("a duplicated top"),
            members: chosen.iter().flatten().copied().collect(),
        }
    }

    /// Depth-first enumeration of all realisations extending `chosen` from
    /// position `i` of the pre-order.
    fn enumerate(
        &self,
        i: usize,
        chosen: &mut Vec<Option<usize>>,
        seen: VertexSet,
        count: &mut u64,
        budget: u64,
    ) -> Walk {
        if i == self.order.len() {
            *count += 1;
            return if *count > budget {
                Walk::OverBudget
            } else {
                Walk::Done
            };
        }
        let t = self.order[i];
        match self.enumerate(i + 1, chosen, seen, count, budget) {
            Walk::Done => {}
            other => return other,
        }
        for &id in &self.st.by_node[t] {
            let Some(p) = self.parent_in(id, chosen) else {
                continue;
            };
            let tops = self.tops(id, Some(p));
            chosen[t] = Some(id);
            let dup = tops.intersection(seen);
            let r = if dup.is_empty() {
                self.enumerate(i + 1, chosen, seen.union(tops), count, budget)
            } else {
                Walk::Fault(self.fault(chosen, dup))
            };
            chosen[t] = None;
            match r {
                Walk::Done => {}
                other => return other,
            }
        }
        Walk::Done
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<Disconnected> {
        let mut chosen = vec![None; self.tree.len()];
        let mut seen = VertexSet::EMPTY;
        for (i, &t) in self.order.iter().enumerate() {
            let options: Vec<(usize, Option<usize>)> = self.st.by_node[t]
                .iter()
                .filter_map(|&id| {
                    if i == 0 {
                        Some((id, None))
                    } else {
                        self.parent_in(id, &chosen).map(|p| (id, Some(p)))
                    }
                })
                .collect();
            let skip = usize::from(i != 0);
            let pick = rng.gen_range(0..options.len() + skip);
            if pick < skip {
                continue;
            }
            let (id, p) = options[pick - skip];
            let tops = self.tops(id, p);
            chosen[t] = Some(id);
            let dup = tops.intersection(seen);
            if !dup.is_empty() {
                return Some(self.fault(&chosen, dup));
            }
            seen = seen.union(tops);
        }
        None
    }
}

enum SubFault {
    Sink(usize),
    Disconnected(Disconnected),
}

/// Conditions (ii) and (iii) on `A[H']_∅` for one subhypergraph.
fn check_subhypergraph(st: &TStructure, tree: &RootedTree, sub: EdgeSet) -> Option<SubFault> {
    let n = tree.len();
    let ids: Vec<usize> = (0..n)
        .map(|t| {
            st.id(&SubBag::new(t, st.restricted_vertices(t, sub)))
                .expect("V(H'|B_t) lies in the lattice")
        })
        .collect();
    let mut uf = UnionFind::new(n);
    for t in 0..n {
        for &h in &st.out[ids[t]] {
            if ids[st.node(h)] == h {
                uf.union(t, st.node(h));
            }
        }
    }
    let mut keep_root = vec![false; n];
    for t in 0..n {
        if t == tree.root() || !st.set(ids[t]).is_empty() {
            keep_root[uf.find(t)] = true;
        }
    }
    let mut chosen: Vec<Option<usize>> = (0..n)
        .map(|t| keep_root[uf.find(t)].then_some(ids[t]))
        .collect();
    let walker = Walker::new(st, tree);
    let mut seen = VertexSet::EMPTY;
    let mut placed = vec![None; n];
    for &t in &walker.order {
        let Some(id) = chosen[t] else { continue };
        let parent = if t == tree.root() {
            None
        } else {
            match walker.parent_in(id, &chosen) {
                Some(p) => Some(p),
                None => return Some(SubFault::Sink(id)),
            }
        };
        let tops = walker.tops(id, parent);
        placed[t] = Some(id);
        let dup = tops.intersection(seen);
        if !dup.is_empty() {
            chosen = placed;
            return Some(SubFault::Disconnected(walker.fault(&chosen, dup)));
        }
        seen = seen.union(tops);
    }
    None
}

fn describe_members(
    h: &Hypergraph,
    st: &TStructure,
    tree: &RootedTree,
    members: &[usize],
) -> String {
    members
        .iter()
        .map(|&id| format_subbag(h, tree, &st.subbags[id]))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Checks a point decomposition against its definition. Exhaustive mode
/// sweeps every subhypergraph and every realisation (falling back to
/// sampling past [`REALISATION_BUDGET`]); fast mode samples realisations.
pub fn validate_pd(
    h: &Hypergraph,
    pd: &PointDecomposition,
    mode: ValidationMode,
    exec: Exec,
    seed: u64,
) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        valid: true,
        complete: true,
        status: String::new(),
        violations: Vec::new(),
        subhypergraphs_checked: 0,
        realisations_checked: 0,
        sampled_realisations: 0,
    };
    let tree = &pd.tree;
    let lattices = pd.lattices(h)?;
    for (a, b) in &pd.arcs {
        for s in [a, b] {
            if lattices[s.node].binary_search(&s.set).is_err() {
                report.violations.push(Violation {
                    condition: "sub-bag".into(),
                    detail: format!("{} is not a sub-bag", format_subbag(h, tree, s)),
                });
            }
        }
        if !tree.is_descendant(a.node, b.node) {
            report.violations.push(Violation {
                condition: "T-structure".into(),
                detail: format!(
                    "arc {} -> {} does not point to a strict ancestor",
                    format_subbag(h, tree, a),
                    format_subbag(h, tree, b)
                ),
            });
        }
    }
    if !report.violations.is_empty() {
        return Ok(report.finish());
    }
    let st = TStructure::new(h, pd)?;

    for e in 0..h.num_edges() {
        let pe = h.points_of(EdgeSet::singleton(e));
        if !pd.bags.iter().any(|b| pe.is_subset(b)) {
            report.violations.push(Violation {
                condition: "edge coverage".into(),
                detail: format!("no bag contains all points of edge {}", h.edge_name(e)),
            });
        }
    }

    if let Some(v) = find_decomposability_violation(&st, tree) {
        report.violations.push(Violation {
            condition: "decomposability".into(),
            detail: format!(
                "arcs {} -> {} and {} -> {} share a head, reach from a common node, and are not joined by an arc",
                format_subbag(h, tree, &v.first),
                format_subbag(h, tree, &v.head),
                format_subbag(h, tree, &v.second),
                format_subbag(h, tree, &v.head)
            ),
        });
    }

    let m = h.num_edges();
    let subs: Vec<u64> = if m <= SUBSET_SEARCH_LIMIT {
        (0..1u64 << m).collect()
    } else if mode == ValidationMode::Exhaustive {
        check_limit("subhypergraph enumeration", m, SUBSET_SEARCH_LIMIT)?;
        unreachable!()
    } else {
        report.complete = false;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..SAMPLE_COUNT)
            .map(|_| rng.gen::<u64>() & ((1u64 << m) - 1))
            .collect()
    };
    report.subhypergraphs_checked = subs.len() as u64;
    let faults = exec.map(&subs, |&mask| {
        check_subhypergraph(&st, tree, EdgeSet::from_mask(mask)).map(|f| (mask, f))
    });
    if let Some((mask, fault)) = faults.into_iter().flatten().next() {
        let names = h.edge_names_of(EdgeSet::from_mask(mask)).join(",");
        report.violations.push(match fault {
            SubFault::Sink(id) => Violation {
                condition: "unique sink".into(),
                detail: format!(
                    "for H' = {{{names}}}, A[H']_∅ has the non-root sink {}",
                    format_subbag(h, tree, &st.subbags[id])
                ),
            },
            SubFault::Disconnected(d) => Violation {
                condition: "connectivity".into(),
                detail: format!(
                    "vertex {} is disconnected in A[H']_∅ for H' = {{{names}}}: {}",
                    h.vertex_name(d.vertex),
                    describe_members(h, &st, tree, &d.members)
                ),
            },
        });
    }

    let walker = Walker::new(&st, tree);
    let mut fault = None;
    let mut sample = mode == ValidationMode::Fast;
    if mode == ValidationMode::Exhaustive {
        let roots = &st.by_node[tree.root()];
        let results = exec.map(roots, |&r| {
            let mut chosen = vec![None; tree.len()];
            chosen[tree.root()] = Some(r);
            let mut count = 0;
            let walk = walker.enumerate(1, &mut chosen, st.set(r), &mut count, REALISATION_BUDGET);
            (walk, count)
        });
        let mut total = 0u64;
        for (walk, count) in results {
            total += count;
            match walk {
                Walk::Fault(d) if fault.is_none() => fault = Some(d),
                Walk::OverBudget => sample = true,
                _ => {}
            }
        }
        if total > REALISATION_BUDGET {
            sample = true;
        }
        report.realisations_checked = total.min(REALISATION_BUDGET);
    }
    if sample && fault.is_none() {
        report.complete = false;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLE_COUNT {
            report.sampled_realisations += 1;
            if let Some(d) = walker.sample(&mut rng) {
                fault = Some(d);
                break;
            }
        }
    }
    if let Some(d) = fault {
        report.violations.push(Violation {
            condition: "connectivity".into(),
            detail: format!(
                "vertex {} is disconnected in the realisation {}",
                h.vertex_name(d.vertex),
                describe_members(h, &st, tree, &d.members)
            ),
        });
    }
    Ok(report.finish())
}

/// Every realisation, as sub-bag sets. Fails past `limit` realisations.
pub fn enumerate_realisations(
    h: &Hypergraph,
    pd: &PointDecomposition,
    limit: usize,
) -> Result<Vec<BTreeSet<SubBag>>> {
    let st = TStructure::new(h, pd)?;
    let walker = Walker::new(&st, &pd.tree);
    let mut out = Vec::new();
    let mut chosen = vec![None; pd.tree.len()];
    collect_realisations(&walker, 0, &mut chosen, &mut out, limit)?;
    Ok(out)
}

fn collect_realisations(
    w: &Walker,
    i: usize,
    chosen: &mut Vec<Option<usize>>,
    out: &mut Vec<BTreeSet<SubBag>>,
    limit: usize,
) -> Result<()> {
    if i == w.order.len() {
        out.push(
            chosen
                .iter()
                .flatten()
                .map(|&id| w.st.subbags[id])
                .collect(),
        );
        return check_limit("realisations", out.len(), limit);
    }
    let t = w.order[i];
    if i > 0 {
        collect_realisations(w, i + 1, chosen, out, limit)?;
    }
    for &id in &w.st.by_node[t] {
        if i > 0 && w.parent_in(id, chosen).is_none() {
            continue;
        }
        chosen[t] = Some(id);
        collect_realisations(w, i + 1, chosen, out, limit)?;
        chosen[t] = None;
    }
    Ok(())
}

/// Checks a simplified point decomposition: every edge fits in a bag, and
/// for every subhypergraph `H'` and vertex `v` the nodes whose restricted
/// bag contains `v` form a subtree.
pub fn validate_spd(
    h: &Hypergraph,
    spd: &SimplifiedPointDecomposition,
) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        valid: true,
        complete: true,
        status: String::new(),
        violations: Vec::new(),
        subhypergraphs_checked: 0,
        realisations_checked: 0,
        sampled_realisations: 0,
    };
    let tree = &spd.tree;
    for e in 0..h.num_edges() {
        let pe = h.points_of(EdgeSet::singleton(e));
        if !spd.bags.iter().any(|b| pe.is_subset(b)) {
            report.violations.push(Violation {
                condition: "edge coverage".into(),
                detail: format!("no bag contains all points of edge {}", h.edge_name(e)),
            });
        }
    }
    // holders[v][i]: nodes whose bag holds (v, e_i) for the i-th edge at v
    let mut disconnected: Option<(usize, EdgeSet)> = None;
    'vertices: for v in 0..h.num_vertices() {
        let inc: Vec<usize> = h.incident(v).iter().collect();
        let holders: Vec<NodeSet> = inc
            .iter()
            .map(|&e| {
                let mut s = NodeSet::new(tree.len());
                for (t, b) in spd.bags.iter().enumerate() {
                    if b.on_edge(e).contains(v) {
                        s.insert(t);
                    }
                }
                s
            })
            .collect();
        for (i, a) in holders.iter().enumerate() {
            if !tree.is_connected(a) {
                disconnected = Some((v, EdgeSet::singleton(inc[i])));
                break 'vertices;
            }
            for (j, b) in holders.iter().enumerate().skip(i + 1) {
                let mut u = a.clone();
                u.union_with(b);
                if !tree.is_connected(&u) {
                    disconnected = Some((v, EdgeSet::from_indices([inc[i], inc[j]])));
                    break 'vertices;
                }
            }
        }
        check_limit("edges at one vertex", inc.len(), SUBSET_SEARCH_LIMIT)?;
        for mask in 1u64..1 << inc.len() {
            let mut u = NodeSet::new(tree.len());
            let mut sub = EdgeSet::EMPTY;
            for (i, s) in holders.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    u.union_with(s);
                    sub = sub.with(inc[i]);
                }
            }
            report.subhypergraphs_checked += 1;
            if !tree.is_connected(&u) {
                disconnected = Some((v, sub));
                break 'vertices;
            }
        }
    }
    if let Some((v, sub)) = disconnected {
        report.violations.push(Violation {
            condition: "connectivity".into(),
            detail: format!(
                "nodes holding vertex {} for H' = {{{}}} are not connected",
                h.vertex_name(v),
                h.edge_names_of(sub).join(",")
            ),
        });
    }
    Ok(report.finish())
}

pub fn width_of_bags(h: &Hypergraph, bags: &[PointSet]) -> Result<usize> {
    bags.iter().try_fold(0, |w, b| {
        Ok(w.max(beta_cover_number(&h.restricted_sets(b))?))
    })
}

pub fn width_of_pd(h: &Hypergraph, pd: &PointDecomposition) -> Result<usize> {
    width_of_bags(h, &pd.bags)
}

pub fn is_flat(pd: &PointDecomposition) -> bool {
    pd.arcs
        .iter()
        .all(|(a, b)| pd.tree.parent(a.node) == Some(b.node))
}
