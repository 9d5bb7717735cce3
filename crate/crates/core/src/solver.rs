//! Bottom-up dynamic programming over a point decomposition.
//!
//! For every sub-bag `s = (t, S)` and every `s`-valid assignment `ψ` the
//! solver computes `val(s, ψ)`: the local value of the edges inside `S` plus a
//! maximum weight independent set in a chordal graph built from the arcs
//! entering `s`. The optimum is the best cell of the root.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;

use crate::csp::{column_positions, join, Assignment, MaxCspInstance, Value};
use crate::decomposition::{format_subbag, tree_of, PointDecomposition, SubBag, TStructure};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{chordal_mwis, peo, Graph, PeoResult, WeightedGraph};
use crate::hypergraph::{EdgeSet, Hypergraph, VertexSet};

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Upper bound on guard size. `None` enumerates every guard.
    pub width: Option<usize>,
    /// Keep back-pointers and return an optimal assignment.
    pub witness: bool,
    pub exec: Exec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub opt: BigRational,
    pub witness: Option<Assignment>,
}

#[derive(Clone, Debug)]
struct Cell {
    value: BigRational,
    /// Chosen in-neighbours and the assignment picked for each.
    choice: Vec<(usize, Vec<Value>)>,
}

/// `val(s, ψ)` for every sub-bag and every `s`-valid assignment.
#[derive(Clone, Debug)]
pub struct CellTable {
    subbags: Vec<SubBag>,
    index: HashMap<SubBag, usize>,
    cells: Vec<BTreeMap<Vec<Value>, Cell>>,
}

impl CellTable {
    pub fn value(&self, s: &SubBag, psi: &Assignment) -> Option<&BigRational> {
        let id = *self.index.get(s)?;
        let t = psi.tuple_over(s.set)?;
        if psi.domain() != s.set {
            return None;
        }
        self.cells[id].get(&t).map(|c| &c.value)
    }

    /// All cells, sub-bags in structure order and assignments in tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (SubBag, Assignment, &BigRational)> + '_ {
        self.subbags.iter().zip(&self.cells).flat_map(|(s, cells)| {
            cells
                .iter()
                .map(move |(t, c)| (*s, Assignment::from_tuple(s.set, t), &c.value))
        })
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `e|_{B_t}` for every edge.
fn restrictions(h: &Hypergraph, pd: &PointDecomposition, t: usize) -> Vec<VertexSet> {
    (0..h.num_edges())
        .map(|e| h.restrict_edge(e, &pd.bags[t]))
        .collect()
}

pub(crate) fn guards_of(
    restricted: &[VertexSet],
    set: VertexSet,
    k: Option<usize>,
) -> Vec<EdgeSet> {
    let candidates: Vec<usize> = (0..restricted.len())
        .filter(|&e| !restricted[e].is_empty() && restricted[e].is_subset(set))
        .collect();
    let limit = k.unwrap_or(usize::MAX);
    let mut found = BTreeSet::new();
    let mut stack = vec![(set, EdgeSet::EMPTY)];
    // Branch on the edges covering the least uncovered vertex. Every minimal
    // cover is reached by always choosing one of its own edges.
    while let Some((uncovered, chosen)) = stack.pop() {
        let Some(v) = uncovered.min() else {
            found.insert(chosen);
            continue;
        };
        if chosen.len() >= limit {
            continue;
        }
        for &e in &candidates {
            if restricted[e].contains(v) && !chosen.contains(e) {
                stack.push((uncovered.difference(restricted[e]), chosen.with(e)));
            }
        }
    }
    let mut minimal: Vec<EdgeSet> = found
        .into_iter()
        .filter(|c| {
            c.iter().all(|e| {
                let others = c
                    .without(e)
                    .iter()
                    .fold(VertexSet::EMPTY, |a, f| a.union(restricted[f]));
                !restricted[e].is_subset(others)
            })
        })
        .collect();
    minimal.sort_by_key(|c| (c.len(), c.0));
    minimal
}

/// Inclusion-minimal subhypergraphs `H'` with `V(H'|_{B_t}) = S`, of at most
/// `k` edges when a bound is given, ordered by size and then edge mask.
pub fn guards(
    h: &Hypergraph,
    pd: &PointDecomposition,
    s: &SubBag,
    k: Option<usize>,
) -> Vec<EdgeSet> {
    guards_of(&restrictions(h, pd, s.node), s.set, k)
}

fn valid_tuples(
    inst: &MaxCspInstance,
    restricted: &[VertexSet],
    set: VertexSet,
    k: Option<usize>,
) -> BTreeSet<Vec<Value>> {
    let mut out = BTreeSet::new();
    for guard in guards_of(restricted, set, k) {
        let parts: Vec<_> = guard
            .iter()
            .map(|e| inst.projected_support(e, set))
            .collect();
        let joined = join(&parts);
        debug_assert_eq!(joined.vars, set);
        out.extend(joined.rows);
    }
    out
}

/// Assignments to `S` satisfying some guard of `s`.
pub fn valid_assignments(
    inst: &MaxCspInstance,
    pd: &PointDecomposition,
    s: &SubBag,
    k: Option<usize>,
) -> Vec<Assignment> {
    let r = restrictions(inst.hypergraph(), pd, s.node);
    valid_tuples(inst, &r, s.set, k)
        .iter()
        .map(|t| Assignment::from_tuple(s.set, t))
        .collect()
}

/// Edges inside `within`, with their columns in a tuple over `of`.
fn edges_inside(h: &Hypergraph, within: VertexSet, of: VertexSet) -> Vec<(usize, Vec<usize>)> {
    (0..h.num_edges())
        .filter(|&e| h.edge(e).is_subset(within))
        .map(|e| (e, column_positions(of, h.edge(e))))
        .collect()
}

fn sum_edges(inst: &MaxCspInstance, edges: &[(usize, Vec<usize>)], tuple: &[Value]) -> BigRational {
    let mut total = BigRational::zero();
    for (e, cols) in edges {
        let t: Vec<Value> = cols.iter().map(|&i| tuple[i]).collect();
        if let Some(v) = inst.constraint(*e).value_sorted(&t) {
            total += v;
        }
    }
    total
}

fn project(tuple: &[Value], cols: &[usize]) -> Vec<Value> {
    cols.iter().map(|&i| tuple[i]).collect()
}

/// Best `val(s', ψ')` per restriction of `ψ'` to the shared variables, with
/// the first maximiser in tuple order.
type BestMap = HashMap<Vec<Value>, (BigRational, Vec<Value>)>;

struct Dp<'a> {
    inst: &'a MaxCspInstance,
    pd: &'a PointDecomposition,
    st: TStructure,
    valid: Vec<Vec<Vec<Value>>>,
    inside: Vec<Vec<(usize, Vec<usize>)>>,
    cells: Vec<BTreeMap<Vec<Value>, Cell>>,
    best: HashMap<(usize, VertexSet), BestMap>,
    witness: bool,
}

impl<'a> Dp<'a> {
    fn new(
        inst: &'a MaxCspInstance,
        pd: &'a PointDecomposition,
        opts: &SolveOptions,
    ) -> Result<Self> {
        let h = inst.hypergraph();
        let st = TStructure::new(h, pd)?;
        let ids: Vec<usize> = (0..st.len()).collect();
        let valid = opts.exec.map(&ids, |&id| {
            let s = st.subbags[id];
            valid_tuples(inst, &st.restricted[s.node], s.set, opts.width)
                .into_iter()
                .collect::<Vec<_>>()
        });
        let inside = ids
            .iter()
            .map(|&id| edges_inside(h, st.set(id), st.set(id)))
            .collect();
        Ok(Dp {
            inst,
            pd,
            cells: vec![BTreeMap::new(); st.len()],
            st,
            valid,
            inside,
            best: HashMap::new(),
            witness: opts.witness,
        })
    }

    fn best_map(&self, child: usize, shared: VertexSet) -> BestMap {
        let cols = column_positions(self.st.set(child), shared);
        let mut best: BestMap = HashMap::new();
        for (t, cell) in &self.cells[child] {
            let key = project(t, &cols);
            match best.get(&key) {
                Some((v, _)) if *v >= cell.value => {}
                _ => {
                    best.insert(key, (cell.value.clone(), t.clone()));
                }
            }
        }
        best
    }

    fn cell(&self, id: usize, psi: &[Value]) -> Result<Cell> {
        let set = self.st.set(id);
        let local = sum_edges(self.inst, &self.inside[id], psi);
        let mut members = Vec::new();
        let mut weights = Vec::new();
        let mut picks = Vec::new();
        for &child in &self.st.inn[id] {
            let shared = set.intersection(self.st.set(child));
            let key = project(psi, &column_positions(set, shared));
            let Some((v, arg)) = self.best[&(child, shared)].get(&key) else {
                continue;
            };
            let overlap = edges_inside(self.inst.hypergraph(), shared, set);
            members.push(child);
            weights.push(v - sum_edges(self.inst, &overlap, psi));
            picks.push(arg);
        }
        let mut g = Graph::new(members.len());
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let (a, b) = (members[i], members[j]);
                if self.st.node(a) == self.st.node(b)
                    || self.st.has_arc(a, b)
                    || self.st.has_arc(b, a)
                {
                    g.add_edge(i, j);
                }
            }
        }
        let order = match peo(&g) {
            PeoResult::Ordering(o) => o,
            PeoResult::NotChordal(cycle) => {
                let h = self.inst.hypergraph();
                let names: Vec<String> = cycle
                    .iter()
                    .map(|&i| format_subbag(h, &self.pd.tree, &self.st.subbags[members[i]]))
                    .collect();
                return Err(Error::InvalidDecomposition(format!(
                    "cell graph of {} is not chordal: hole {}",
                    format_subbag(h, &self.pd.tree, &self.st.subbags[id]),
                    names.join(" ")
                )));
            }
        };
        let (best, chosen) = chordal_mwis(&WeightedGraph::new(g, weights)?, &order)?;
        let choice = if self.witness {
            chosen
                .iter()
                .map(|&i| (members[i], picks[i].clone()))
                .collect()
        } else {
            Vec::new()
        };
        Ok(Cell {
            value: local + best,
            choice,
        })
    }

    fn run(&mut self, exec: Exec) -> Result<()> {
        for t in self.pd.tree.post_order() {
            let heads = self.st.by_node[t].clone();
            let mut needed = BTreeSet::new();
            for &id in &heads {
                for &child in &self.st.inn[id] {
                    needed.insert((child, self.st.set(id).intersection(self.st.set(child))));
                }
            }
            let needed: Vec<_> = needed
                .into_iter()
                .filter(|k| !self.best.contains_key(k))
                .collect();
            let maps = exec.map(&needed, |&(child, shared)| self.best_map(child, shared));
            self.best.extend(needed.into_iter().zip(maps));

            let jobs: Vec<(usize, usize)> = heads
                .iter()
                .flat_map(|&id| (0..self.valid[id].len()).map(move |j| (id, j)))
                .collect();
            let this = &*self;
            let results = exec.map(&jobs, |&(id, j)| this.cell(id, &this.valid[id][j]));
            for ((id, j), cell) in jobs.into_iter().zip(results) {
                let psi = self.valid[id][j].clone();
                self.cells[id].insert(psi, cell?);
            }
        }
        Ok(())
    }

    fn traceback(&self, root: usize, psi: &[Value]) -> Result<Assignment> {
        let mut out = Assignment::default();
        let mut stack = vec![(root, psi.to_vec())];
        while let Some((id, t)) = stack.pop() {
            let part = Assignment::from_tuple(self.st.set(id), &t);
            out = out.merge(&part).ok_or_else(|| {
                Error::InvalidDecomposition("traceback assignments disagree".into())
            })?;
            stack.extend(self.cells[id][&t].choice.iter().cloned());
        }
        for v in 0..self.inst.num_variables() {
            out.0.entry(v).or_insert(0);
        }
        Ok(out)
    }
}

/// Every cell `val(s, ψ)`.
pub fn solve_cells(
    inst: &MaxCspInstance,
    pd: &PointDecomposition,
    opts: &SolveOptions,
) -> Result<CellTable> {
    let mut dp = Dp::new(inst, pd, opts)?;
    dp.run(opts.exec)?;
    Ok(CellTable {
        index: dp
            .st
            .subbags
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, i))
            .collect(),
        subbags: dp.st.subbags,
        cells: dp.cells.into_iter().collect(),
    })
}

/// The optimum of `inst`, given a point decomposition of its hypergraph.
/// Validity of the decomposition is the caller's responsibility; a cell graph
/// that is not chordal is reported as an invalid decomposition.
pub fn solve(
    inst: &MaxCspInstance,
    pd: &PointDecomposition,
    opts: &SolveOptions,
) -> Result<Solution> {
    let mut dp = Dp::new(inst, pd, opts)?;
    dp.run(opts.exec)?;
    let root = pd.tree.root();
    let mut best: Option<(usize, &Vec<Value>, &BigRational)> = None;
    for &id in &dp.st.by_node[root] {
        for (t, c) in &dp.cells[id] {
            if best.is_none_or(|(_, _, v)| c.value > *v) {
                best = Some((id, t, &c.value));
            }
        }
    }
    let (id, t, v) =
        best.ok_or_else(|| Error::InvalidDecomposition("no valid assignment at the root".into()))?;
    let witness = if opts.witness {
        Some(dp.traceback(id, t)?)
    } else {
        None
    };
    Ok(Solution {
        opt: v.clone(),
        witness,
    })
}

/// A partial realisation together with a consistent assignment.
#[derive(Clone, Debug)]
pub struct PartialRealisation {
    pub subbags: BTreeSet<SubBag>,
    pub sink: SubBag,
    pub phi: BTreeMap<SubBag, Assignment>,
    /// The union of all `φ(s)`.
    pub glued: Assignment,
    /// `tvalue(φ, A')`.
    pub value: BigRational,
}

/// `Σ f_e(ψ)` over the edges inside some member of `x`.
pub fn realisation_value(
    inst: &MaxCspInstance,
    x: &BTreeSet<SubBag>,
    glued: &Assignment,
) -> BigRational {
    let h = inst.hypergraph();
    (0..h.num_edges())
        .filter(|&e| x.iter().any(|s| h.edge(e).is_subset(s.set)))
        .filter_map(|e| inst.edge_value(e, glued))
        .fold(BigRational::zero(), |a, v| a + v)
}

/// `A'[s]`: the members of `x` with a directed path inside `x` to `s`.
pub fn upstream(pd: &PointDecomposition, x: &BTreeSet<SubBag>, s: &SubBag) -> BTreeSet<SubBag> {
    let mut seen = BTreeSet::from([*s]);
    let mut stack = vec![*s];
    while let Some(b) = stack.pop() {
        for (a, head) in &pd.arcs {
            if head == &b && x.contains(a) && seen.insert(*a) {
                stack.push(*a);
            }
        }
    }
    seen
}

/// Every partial realisation with every consistent assignment. `limit` caps
/// both the candidate sub-bag selections and the pairs produced.
pub fn enumerate_partial_realisations(
    inst: &MaxCspInstance,
    pd: &PointDecomposition,
    k: Option<usize>,
    limit: usize,
) -> Result<Vec<PartialRealisation>> {
    let h = inst.hypergraph();
    let st = TStructure::new(h, pd)?;
    let n = pd.tree.len();
    let selections = (0..n).try_fold(1usize, |acc, t| acc.checked_mul(st.by_node[t].len() + 1));
    let selections = selections.filter(|&c| c <= limit).ok_or(Error::SizeLimit {
        what: "sub-bag selections",
        limit,
        actual: selections.unwrap_or(usize::MAX),
    })?;

    let mut to_root = vec![false; st.len()];
    let mut stack: Vec<usize> = st.by_node[pd.tree.root()].clone();
    for &id in &stack {
        to_root[id] = true;
    }
    while let Some(b) = stack.pop() {
        for &a in &st.inn[b] {
            if !to_root[a] {
                to_root[a] = true;
                stack.push(a);
            }
        }
    }
    let valid: Vec<Vec<Vec<Value>>> = (0..st.len())
        .map(|id| {
            let s = st.subbags[id];
            valid_tuples(inst, &st.restricted[s.node], s.set, k)
                .into_iter()
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for code in 1..selections {
        let mut rest = code;
        let mut chosen = Vec::new();
        for t in 0..n {
            let base = st.by_node[t].len() + 1;
            let pick = rest % base;
            rest /= base;
            if pick > 0 {
                chosen.push(st.by_node[t][pick - 1]);
            }
        }
        let sinks: Vec<usize> = chosen
            .iter()
            .copied()
            .filter(|&a| !st.out[a].iter().any(|b| chosen.contains(b)))
            .collect();
        if sinks.len() != 1 || !to_root[sinks[0]] {
            continue;
        }
        let x: BTreeSet<SubBag> = chosen.iter().map(|&i| st.subbags[i]).collect();
        let tree = tree_of(pd, &x)?;
        let node_of = |i: usize| pd.tree.index(tree.name(i));
        let mut adjacent = Vec::new();
        for i in 0..tree.len() {
            if let Some(p) = tree.parent(i) {
                adjacent.push((node_of(i)?, node_of(p)?));
            }
        }
        let by_node: HashMap<usize, usize> = chosen.iter().map(|&i| (st.node(i), i)).collect();
        let pairs: Vec<(usize, usize)> = adjacent
            .iter()
            .map(|(a, b)| (by_node[a], by_node[b]))
            .collect();

        let mut picks = vec![0usize; chosen.len()];
        assign(&st, &valid, &chosen, &pairs, 0, &mut picks, &mut |picks| {
            if out.len() >= limit {
                return Err(Error::SizeLimit {
                    what: "partial realisations",
                    limit,
                    actual: limit + 1,
                });
            }
            let mut phi = BTreeMap::new();
            let mut glued = Assignment::default();
            for (slot, &id) in chosen.iter().enumerate() {
                let a = Assignment::from_tuple(st.set(id), &valid[id][picks[slot]]);
                glued = glued.merge(&a).ok_or_else(|| {
                    Error::InvalidDecomposition("consistent assignment does not glue".into())
                })?;
                phi.insert(st.subbags[id], a);
            }
            out.push(PartialRealisation {
                value: realisation_value(inst, &x, &glued),
                sink: st.subbags[sinks[0]],
                subbags: x.clone(),
                phi,
                glued,
            });
            Ok(())
        })?;
    }
    Ok(out)
}

fn assign(
    st: &TStructure,
    valid: &[Vec<Vec<Value>>],
    chosen: &[usize],
    pairs: &[(usize, usize)],
    slot: usize,
    picks: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if slot == chosen.len() {
        return emit(picks);
    }
    let id = chosen[slot];
    'next: for j in 0..valid[id].len() {
        let mine = Assignment::from_tuple(st.set(id), &valid[id][j]);
        for &(a, b) in pairs {
            let other = if a == id {
                b
            } else if b == id {
                a
            } else {
                continue;
            };
            let Some(o) = chosen[..slot].iter().position(|&c| c == other) else {
                continue;
            };
            let theirs = Assignment::from_tuple(st.set(other), &valid[other][picks[o]]);
            let shared = st.set(id).intersection(st.set(other));
            if mine.restrict(shared) != theirs.restrict(shared) {
                continue 'next;
            }
        }
        picks[slot] = j;
        assign(st, valid, chosen, pairs, slot + 1, picks, emit)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{brute_force_opt, partial_value, satisfies_edge};
    use crate::decomposition::tests::{fan, fan_pd};

    fn sb(h: &Hypergraph, pd: &PointDecomposition, t: &str, vs: &[&str]) -> SubBag {
        SubBag::new(pd.tree.index(t).unwrap(), h.vertex_set(vs).unwrap())
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn all_ones(h: &Hypergraph) -> MaxCspInstance {
        let cons = (0..h.num_edges())
            .map(|e| {
                let scope = h.vertex_names_of(h.edge(e));
                let rows = (0..1u32 << scope.len())
                    .map(|m| {
                        let t = (0..scope.len())
                            .map(|i| ((m >> i) & 1).to_string())
                            .collect();
                        (t, r(1, 1))
                    })
                    .collect();
                (h.edge_name(e).to_string(), scope, rows)
            })
            .collect();
        MaxCspInstance::new(
            h.vertex_names().to_vec(),
            vec!["0".into(), "1".into()],
            cons,
        )
        .unwrap()
    }

    fn fan_instance(rows: &[(&str, Vec<(Vec<&str>, BigRational)>)]) -> MaxCspInstance {
        let h = fan();
        let cons = (0..h.num_edges())
            .map(|e| {
                let name = h.edge_name(e);
                let scope = h.vertex_names_of(h.edge(e));
                let rows = rows
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, rs)| {
                        rs.iter()
                            .map(|(t, v)| (t.iter().map(|s| s.to_string()).collect(), v.clone()))
                            .collect()
                    })
                    .unwrap_or_else(|| {
                        (0..1u32 << scope.len())
                            .map(|m| {
                                (
                                    (0..scope.len())
                                        .map(|i| ((m >> i) & 1).to_string())
                                        .collect(),
                                    r(1, 1),
                                )
                            })
                            .collect()
                    });
                (name.to_string(), scope, rows)
            })
            .collect();
        MaxCspInstance::new(
            h.vertex_names().to_vec(),
            vec!["0".into(), "1".into()],
            cons,
        )
        .unwrap()
    }

    #[test]
    fn guards_on_fan() {
        let h = fan();
        let pd = fan_pd(&h);
        let e1 = h.edge_set(&["e1"]).unwrap();
        assert_eq!(
            guards(&h, &pd, &sb(&h, &pd, "t4", &["x1", "x0"]), None),
            vec![e1]
        );
        assert_eq!(
            guards(&h, &pd, &sb(&h, &pd, "t0", &[]), None),
            vec![EdgeSet::EMPTY]
        );
        // oracle: minimal subsets among all 2^|H| with the right restriction
        for &(t, vs) in &[
            ("t2", &["x0", "x3"][..]),
            ("t3", &["x0", "x2", "x3"][..]),
            ("t4", &["x0", "x1", "x2", "x3"][..]),
        ] {
            let s = sb(&h, &pd, t, vs);
            let b = &pd.bags[s.node];
            let covers: Vec<EdgeSet> = (0..1u64 << h.num_edges())
                .map(EdgeSet::from_mask)
                .filter(|c| h.restricted_vertices(*c, b) == s.set)
                .collect();
            let mut minimal: Vec<EdgeSet> = covers
                .iter()
                .copied()
                .filter(|c| !covers.iter().any(|d| d != c && d.is_subset(*c)))
                .collect();
            minimal.sort_by_key(|c| (c.len(), c.0));
            assert_eq!(guards(&h, &pd, &s, None), minimal, "{t}");
        }
    }

    #[test]
    fn guard_size_bound_drops_large_guards() {
        let h = fan();
        let pd = fan_pd(&h);
        let s = sb(&h, &pd, "t4", &["x0", "x1", "x2", "x3"]);
        let all = guards(&h, &pd, &s, None);
        let small = guards(&h, &pd, &s, Some(1));
        assert!(small.iter().all(|g| g.len() <= 1));
        assert!(small.iter().all(|g| all.contains(g)));
    }

    #[test]
    fn valid_assignments_examples() {
        let inst = fan_instance(&[("e1", vec![(vec!["0", "1"], r(1, 1))])]);
        let h = inst.hypergraph();
        let pd = fan_pd(h);
        let root = sb(h, &pd, "t0", &[]);
        assert_eq!(
            valid_assignments(&inst, &pd, &root, None),
            vec![Assignment::default()]
        );
        let s = sb(h, &pd, "t4", &["x1", "x0"]);
        let scope = &inst.constraint(h.edge_index("e1").unwrap()).scope;
        let mut expected = Assignment::default();
        expected.0.insert(scope[0], 0);
        expected.0.insert(scope[1], 1);
        assert_eq!(valid_assignments(&inst, &pd, &s, None), vec![expected]);
    }

    #[test]
    fn valid_assignments_match_definition() {
        let inst = fan_instance(&[
            (
                "e1",
                vec![(vec!["0", "1"], r(1, 1)), (vec!["1", "1"], r(2, 1))],
            ),
            ("e3", vec![(vec!["1", "0"], r(1, 2))]),
        ]);
        let h = inst.hypergraph();
        let pd = fan_pd(h);
        let st = TStructure::new(h, &pd).unwrap();
        for s in &st.subbags {
            let gs = guards(h, &pd, s, None);
            let mut expected = Vec::new();
            for m in 0..1u32 << s.set.len() {
                let tuple: Vec<Value> = (0..s.set.len()).map(|i| ((m >> i) & 1) as Value).collect();
                let a = Assignment::from_tuple(s.set, &tuple);
                if gs
                    .iter()
                    .any(|g| g.iter().all(|e| satisfies_edge(&inst, &a, e)))
                {
                    expected.push(a);
                }
            }
            expected.sort();
            assert_eq!(valid_assignments(&inst, &pd, s, None), expected);
        }
    }

    #[test]
    fn fan_all_ones_optimum_is_four() {
        let h = fan();
        let inst = all_ones(&h);
        let pd = fan_pd(inst.hypergraph());
        let (brute, _) = brute_force_opt(&inst, Exec::Sequential).unwrap();
        assert_eq!(brute, r(4, 1));
        for exec in [Exec::Sequential, Exec::Parallel] {
            let opts = SolveOptions {
                exec,
                witness: true,
                ..Default::default()
            };
            let sol = solve(&inst, &pd, &opts).unwrap();
            assert_eq!(sol.opt, brute);
            assert_eq!(partial_value(&inst, sol.witness.as_ref().unwrap()), brute);
        }
    }

    #[test]
    fn fan_weighted_matches_brute_force() {
        let inst = fan_instance(&[
            (
                "e1",
                vec![(vec!["0", "1"], r(3, 1)), (vec!["1", "1"], r(1, 2))],
            ),
            (
                "e2",
                vec![(vec!["1", "0"], r(2, 1)), (vec!["0", "0"], r(1, 3))],
            ),
            ("e3", vec![(vec!["1", "1"], r(5, 4))]),
            (
                "e",
                vec![
                    (vec!["0", "1", "0", "0"], r(1, 1)),
                    (vec!["1", "1", "1", "1"], r(7, 2)),
                ],
            ),
        ]);
        let pd = fan_pd(inst.hypergraph());
        let (brute, _) = brute_force_opt(&inst, Exec::Sequential).unwrap();
        let sol = solve(
            &inst,
            &pd,
            &SolveOptions {
                witness: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(sol.opt, brute);
        assert_eq!(partial_value(&inst, sol.witness.as_ref().unwrap()), brute);
    }

    #[test]
    fn single_constraint_single_bag() {
        let inst = MaxCspInstance::new(
            vec!["a".into(), "b".into()],
            vec!["0".into(), "1".into()],
            vec![(
                "c".into(),
                vec!["a".into(), "b".into()],
                vec![
                    (vec!["0".into(), "1".into()], r(2, 3)),
                    (vec!["1".into(), "1".into()], r(5, 7)),
                ],
            )],
        )
        .unwrap();
        let h = inst.hypergraph();
        let pd = PointDecomposition::from_json(
            h,
            r#"{"tree":{"root":"r","parent":{}},"bags":{"r":[["a","c"],["b","c"]]},"arcs":[]}"#,
        )
        .unwrap();
        assert_eq!(
            solve(&inst, &pd, &SolveOptions::default()).unwrap().opt,
            r(5, 7)
        );
    }

    #[test]
    fn cells_equal_partial_realisation_maxima() {
        let inst = fan_instance(&[
            (
                "e1",
                vec![(vec!["0", "1"], r(1, 1)), (vec!["1", "0"], r(2, 1))],
            ),
            (
                "e3",
                vec![(vec!["1", "1"], r(1, 2)), (vec!["0", "0"], r(1, 1))],
            ),
        ]);
        let h = inst.hypergraph();
        let pd = fan_pd(h);
        let cells = solve_cells(&inst, &pd, &SolveOptions::default()).unwrap();
        let all = enumerate_partial_realisations(&inst, &pd, None, 1_000_000).unwrap();
        let mut best: BTreeMap<(SubBag, Assignment), BigRational> = BTreeMap::new();
        for p in &all {
            for (s, a) in &p.phi {
                assert_eq!(&p.glued.restrict(s.set), a);
            }
            let key = (p.sink, p.phi[&p.sink].clone());
            let v = cells.value(&p.sink, &key.1).expect("cell exists");
            assert!(p.value <= *v);
            let e = best.entry(key).or_insert_with(BigRational::zero);
            if p.value > *e {
                *e = p.value.clone();
            }
        }
        for ((s, a), v) in &best {
            assert_eq!(cells.value(s, a), Some(v));
        }
        assert!(all
            .iter()
            .any(|p| p.subbags == BTreeSet::from([sb(h, &pd, "t0", &[])])));
    }

    #[test]
    fn fan_realisations_appear_in_enumeration() {
        let h = fan();
        let inst = all_ones(&h);
        let pd = fan_pd(inst.hypergraph());
        let all = enumerate_partial_realisations(&inst, &pd, None, 1_000_000).unwrap();
        let a1 = crate::decomposition::tests::a1(inst.hypergraph(), &pd);
        let a2 = crate::decomposition::tests::a2(inst.hypergraph(), &pd);
        assert!(all.iter().any(|p| p.subbags == a1));
        assert!(all.iter().any(|p| p.subbags == a2));
    }

    #[test]
    fn enumeration_limit_is_reported() {
        let h = fan();
        let inst = all_ones(&h);
        let pd = fan_pd(inst.hypergraph());
        assert!(matches!(
            enumerate_partial_realisations(&inst, &pd, None, 3),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn non_chordal_cell_graph_is_an_error() {
        // four children each pointing into the root, with arcs forming a 4-cycle
        let inst = MaxCspInstance::new(
            vec!["a".into()],
            vec!["0".into()],
            vec![(
                "e".into(),
                vec!["a".into()],
                vec![(vec!["0".into()], r(1, 1))],
            )],
        )
        .unwrap();
        let json = r#"{"tree":{"root":"r","parent":{"p":"r","q":"p","u":"q","w":"u"}},
            "bags":{"r":[],"p":[["a","e"]],"q":[["a","e"]],"u":[["a","e"]],"w":[["a","e"]]},
            "arcs":[[["p",["a"]],["r",[]]],[["q",["a"]],["r",[]]],[["u",["a"]],["r",[]]],[["w",["a"]],["r",[]]],
                    [["q",["a"]],["p",["a"]]],[["u",["a"]],["q",["a"]]],[["w",["a"]],["u",["a"]]],[["w",["a"]],["p",["a"]]]]}"#;
        let pd = PointDecomposition::from_json(inst.hypergraph(), json).unwrap();
        // p-q-u-w-p is a hole in the cell graph of (r, ∅)
        assert!(matches!(
            solve(&inst, &pd, &SolveOptions::default()),
            Err(Error::InvalidDecomposition(_))
        ));
    }
}
