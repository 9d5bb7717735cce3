//! Max-CSP instances in positive representation, assignments, relations and
//! the brute-force optimum.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_limit, Error, Result};
use crate::exec::Exec;
use crate::hypergraph::{Hypergraph, VertexSet};

/// A domain value, stored as its index in the instance domain.
pub type Value = u8;

/// Largest assignment space [`brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 10_000_000;

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Always `p/q` in lowest terms, including `q = 1`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub id: String,
    /// Scope as listed in the instance, by vertex index.
    pub scope: Vec<usize>,
    /// Table keyed by tuples in scope order.
    pub table: BTreeMap<Vec<Value>, BigRational>,
    /// The same table keyed by tuples in increasing vertex order.
    sorted: HashMap<Vec<Value>, BigRational>,
}

impl Constraint {
    pub fn support_is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `f_e` at a tuple listed in increasing vertex order.
    pub fn value_sorted(&self, tuple: &[Value]) -> Option<&BigRational> {
        self.sorted.get(tuple)
    }

    /// The support as tuples in increasing vertex order.
    pub fn sorted_support(&self) -> impl Iterator<Item = &Vec<Value>> {
        self.sorted.keys()
    }
}

/// A set of tuples over a vertex set, columns in increasing vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pub vars: VertexSet,
    pub rows: BTreeSet<Vec<Value>>,
}

impl Relation {
    /// The relation over no variables holding the empty tuple.
    pub fn unit() -> Self {
        Relation {
            vars: VertexSet::EMPTY,
            rows: BTreeSet::from([Vec::new()]),
        }
    }

    pub fn project(&self, onto: VertexSet) -> Relation {
        let keep = onto.intersection(self.vars);
        let cols = column_positions(self.vars, keep);
        Relation {
            vars: keep,
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&i| r[i]).collect())
                .collect(),
        }
    }

    pub fn join(&self, other: &Relation) -> Relation {
        let vars = self.vars.union(other.vars);
        let shared = self.vars.intersection(other.vars);
        let mine = column_positions(self.vars, shared);
        let theirs = column_positions(other.vars, shared);
        let mut index: HashMap<Vec<Value>, Vec<&Vec<Value>>> = HashMap::new();
        for r in &other.rows {
            index
                .entry(theirs.iter().map(|&i| r[i]).collect())
                .or_default()
                .push(r);
        }
        let mut rows = BTreeSet::new();
        for a in &self.rows {
            let key: Vec<Value> = mine.iter().map(|&i| a[i]).collect();
            if let Some(matches) = index.get(&key) {
                for b in matches {
                    rows.insert(merge_row(self.vars, a, other.vars, b, vars));
                }
            }
        }
        Relation { vars, rows }
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        match a.tuple_over(self.vars) {
            Some(t) => self.rows.contains(&t),
            None => false,
        }
    }

    pub fn assignments(&self) -> Vec<Assignment> {
        self.rows
            .iter()
            .map(|r| Assignment::from_tuple(self.vars, r))
            .collect()
    }
}

/// Positions of the members of `sub` within the sorted members of `of`.
pub fn column_positions(of: VertexSet, sub: VertexSet) -> Vec<usize> {
    of.iter()
        .enumerate()
        .filter(|&(_, v)| sub.contains(v))
        .map(|(i, _)| i)
        .collect()
}

fn merge_row(
    av: VertexSet,
    a: &[Value],
    bv: VertexSet,
    b: &[Value],
    vars: VertexSet,
) -> Vec<Value> {
    let mut ai = av.iter().zip(a.iter().copied()).peekable();
    let mut bi = bv.iter().zip(b.iter().copied()).peekable();
    let mut out = Vec::with_capacity(vars.len());
    for v in vars.iter() {
        let mut val = None;
        if ai.peek().map(|p| p.0) == Some(v) {
            val = ai.next().map(|p| p.1);
        }
        if bi.peek().map(|p| p.0) == Some(v) {
            val = bi.next().map(|p| p.1);
        }
        out.push(val.expect("merged variable comes from one side"));
    }
    out
}

/// `R_1 ⋈ … ⋈ R_n`; the unit relation for `n = 0`.
pub fn join(relations: &[Relation]) -> Relation {
    let mut iter = relations.iter();
    match iter.next() {
        None => Relation::unit(),
        Some(first) => iter.fold(first.clone(), |acc, r| acc.join(r)),
    }
}

/// A partial assignment, variable index to domain value index.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub BTreeMap<usize, Value>);

impl Assignment {
    pub fn from_tuple(vars: VertexSet, tuple: &[Value]) -> Self {
        Assignment(vars.iter().zip(tuple.iter().copied()).collect())
    }

    pub fn domain(&self) -> VertexSet {
        VertexSet::from_indices(self.0.keys().copied())
    }

    pub fn get(&self, v: usize) -> Option<Value> {
        self.0.get(&v).copied()
    }

    /// The values on `vars`, or `None` if some variable is unbound.
    pub fn tuple_over(&self, vars: VertexSet) -> Option<Vec<Value>> {
        vars.iter().map(|v| self.get(v)).collect()
    }

    pub fn restrict(&self, vars: VertexSet) -> Assignment {
        Assignment(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(**v))
                .map(|(&v, &d)| (v, d))
                .collect(),
        )
    }

    /// Union of two assignments, or `None` if they disagree somewhere.
    pub fn merge(&self, other: &Assignment) -> Option<Assignment> {
        let mut out = self.0.clone();
        for (&v, &d) in &other.0 {
            if *out.entry(v).or_insert(d) != d {
                return None;
            }
        }
        Some(Assignment(out))
    }

    pub fn named(&self, inst: &MaxCspInstance) -> BTreeMap<String, String> {
        self.0
            .iter()
            .map(|(&v, &d)| (inst.variables[v].clone(), inst.domain[d as usize].clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct MaxCspInstance {
    /// Constrained variables first, in hypergraph vertex order, then the
    /// unconstrained ones sorted by name.
    variables: Vec<String>,
    domain: Vec<String>,
    /// Indexed like the hypergraph edges.
    constraints: Vec<Constraint>,
    hypergraph: Hypergraph,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    variables: Vec<String>,
    domain: Vec<String>,
    constraints: BTreeMap<String, ConstraintFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintFile {
    scope: Vec<String>,
    table: Vec<RowFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    tuple: Vec<String>,
    value: String,
}

/// A constraint given by names: id, scope, and `(tuple, value)` rows.
pub type NamedConstraint = (String, Vec<String>, Vec<(Vec<String>, BigRational)>);

impl MaxCspInstance {
    pub fn new(
        variables: Vec<String>,
        domain: Vec<String>,
        constraints: Vec<NamedConstraint>,
    ) -> Result<Self> {
        let invalid = |m: String| Error::InvalidInstance(m);
        let declared: BTreeSet<&String> = variables.iter().collect();
        if declared.len() != variables.len() {
            return Err(invalid("duplicate variable".into()));
        }
        if domain.iter().collect::<BTreeSet<_>>().len() != domain.len() {
            return Err(invalid("duplicate domain value".into()));
        }
        if domain.is_empty() {
            return Err(invalid("empty domain".into()));
        }
        check_limit("domain size", domain.len(), Value::MAX as usize + 1)?;
        let mut seen_ids = BTreeSet::new();
        for (id, scope, _) in &constraints {
            if !seen_ids.insert(id) {
                return Err(invalid(format!("duplicate constraint id `{id}`")));
            }
            if scope.iter().collect::<BTreeSet<_>>().len() != scope.len() {
                return Err(invalid(format!(
                    "constraint `{id}` repeats a scope variable"
                )));
            }
            for x in scope {
                if !declared.contains(x) {
                    return Err(Error::UnknownVertex(x.clone()));
                }
            }
        }
        let hypergraph = Hypergraph::new(
            constraints
                .iter()
                .map(|(id, scope, _)| (id.clone(), scope.clone())),
        )
        .map_err(|e| match e {
            Error::InvalidHypergraph(m) => invalid(m),
            other => other,
        })?;
        let mut vars: Vec<String> = hypergraph.vertex_names().to_vec();
        let mut isolated: Vec<String> = variables
            .iter()
            .filter(|v| hypergraph.vertex_index(v).is_err())
            .cloned()
            .collect();
        isolated.sort();
        vars.extend(isolated);
        check_limit("variables", vars.len(), 64)?;

        let dom_index: HashMap<&str, Value> = domain
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i as Value))
            .collect();
        let mut by_edge: Vec<Option<Constraint>> = vec![None; hypergraph.num_edges()];
        for (id, scope, rows) in constraints {
            let e = hypergraph.edge_index(&id)?;
            let scope_idx: Vec<usize> = scope
                .iter()
                .map(|x| hypergraph.vertex_index(x))
                .collect::<Result<_>>()?;
            let mut order: Vec<usize> = (0..scope_idx.len()).collect();
            order.sort_by_key(|&i| scope_idx[i]);
            let mut table = BTreeMap::new();
            let mut sorted = HashMap::new();
            for (tuple, value) in rows {
                if tuple.len() != scope.len() {
                    return Err(invalid(format!("constraint `{id}`: tuple arity mismatch")));
                }
                if !value.is_positive() {
                    return Err(invalid(format!(
                        "constraint `{id}`: value {} is not positive",
                        format_rational(&value)
                    )));
                }
                let t: Vec<Value> = tuple
                    .iter()
                    .map(|d| {
                        dom_index
                            .get(d.as_str())
                            .copied()
                            .ok_or_else(|| invalid(format!("value `{d}` not in the domain")))
                    })
                    .collect::<Result<_>>()?;
                let st: Vec<Value> = order.iter().map(|&i| t[i]).collect();
                if table.insert(t, value.clone()).is_some() {
                    return Err(invalid(format!("constraint `{id}`: duplicate tuple")));
                }
                sorted.insert(st, value);
            }
            by_edge[e] = Some(Constraint {
                id,
                scope: scope_idx,
                table,
                sorted,
            });
        }
        Ok(MaxCspInstance {
            variables: vars,
            domain,
            constraints: by_edge
                .into_iter()
                .map(|c| c.expect("every edge has a constraint"))
                .collect(),
            hypergraph,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(s)?;
        let constraints = file
            .constraints
            .into_iter()
            .map(|(id, c)| {
                let rows = c
                    .table
                    .into_iter()
                    .map(|r| Ok((r.tuple, parse_rational(&r.value)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok((id, c.scope, rows))
            })
            .collect::<Result<Vec<_>>>()?;
        MaxCspInstance::new(file.variables, file.domain, constraints)
    }

    pub fn to_json(&self) -> String {
        let mut variables = self.variables.clone();
        variables.sort();
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                let scope = c.scope.iter().map(|&v| self.variables[v].clone()).collect();
                let table = c
                    .table
                    .iter()
                    .map(|(t, val)| RowFile {
                        tuple: t.iter().map(|&d| self.domain[d as usize].clone()).collect(),
                        value: format_rational(val),
                    })
                    .collect();
                (c.id.clone(), ConstraintFile { scope, table })
            })
            .collect();
        let file = InstanceFile {
            variables,
            domain: self.domain.clone(),
            constraints,
        };
        serde_json::to_string_pretty(&file).expect("instance serializes")
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, e: usize) -> &Constraint {
        &self.constraints[e]
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    /// `f_e` evaluated on an assignment binding every variable of `e`.
    pub fn edge_value(&self, e: usize, a: &Assignment) -> Option<BigRational> {
        let t = a.tuple_over(self.hypergraph.edge(e))?;
        Some(
            self.constraints[e]
                .sorted
                .get(&t)
                .cloned()
                .unwrap_or_else(BigRational::zero),
        )
    }

    /// `R_e|_{e ∩ onto}`.
    pub fn projected_support(&self, e: usize, onto: VertexSet) -> Relation {
        let full = Relation {
            vars: self.hypergraph.edge(e),
            rows: self.constraints[e].sorted.keys().cloned().collect(),
        };
        full.project(onto)
    }
}

pub fn hypergraph_of(inst: &MaxCspInstance) -> &Hypergraph {
    inst.hypergraph()
}

/// Sum of `f_e(ψ)` over the edges entirely inside the domain of `ψ`.
pub fn partial_value(inst: &MaxCspInstance, a: &Assignment) -> BigRational {
    let dom = a.domain();
    let h = inst.hypergraph();
    (0..h.num_edges())
        .filter(|&e| h.edge(e).is_subset(dom))
        .filter_map(|e| inst.edge_value(e, a))
        .fold(BigRational::zero(), |acc, v| acc + v)
}

/// `f_I(ψ)` for a total assignment.
pub fn value_of(inst: &MaxCspInstance, a: &Assignment) -> Result<BigRational> {
    if let Some(v) = (0..inst.num_variables()).find(|&v| a.get(v).is_none()) {
        return Err(Error::InvalidInstance(format!(
            "assignment leaves `{}` unbound",
            inst.variables()[v]
        )));
    }
    Ok(partial_value(inst, a))
}

/// Whether `ψ|_{X' ∩ e}` lies in `R_e|_{X' ∩ e}`. With `X' ∩ e = ∅` this holds
/// exactly when the support of `e` is nonempty.
pub fn satisfies(inst: &MaxCspInstance, a: &Assignment, e: &str) -> Result<bool> {
    let e = inst
        .hypergraph()
        .edge_index(e)
        .map_err(|_| Error::UnknownEdge(e.to_string()))?;
    Ok(satisfies_edge(inst, a, e))
}

pub fn satisfies_edge(inst: &MaxCspInstance, a: &Assignment, e: usize) -> bool {
    let on = a.domain().intersection(inst.hypergraph().edge(e));
    inst.projected_support(e, on).contains(a)
}

/// Exact optimum by enumerating every total assignment. Among optimal
/// assignments the lexicographically least (variables in index order,
/// values in domain order) is returned.
pub fn brute_force_opt(inst: &MaxCspInstance, exec: Exec) -> Result<(BigRational, Assignment)> {
    let n = inst.num_variables();
    let d = inst.domain_size();
    let space = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > BRUTE_FORCE_LIMIT as u128 {
        return Err(Error::SizeLimit {
            what: "brute-force assignment space",
            limit: BRUTE_FORCE_LIMIT,
            actual: usize::try_from(space).unwrap_or(usize::MAX),
        });
    }
    let space = space as u64;
    let scaled = ScaledTables::new(inst);
    let decode = |mut idx: u64| {
        let mut vals = vec![0 as Value; n];
        for slot in vals.iter_mut().rev() {
            *slot = (idx % d as u64) as Value;
            idx /= d as u64;
        }
        vals
    };
    let chunk = 4096u64;
    let chunks = space.div_ceil(chunk);
    let best_per_chunk = exec.map_range(chunks, |c| {
        let mut best: Option<(BigInt, u64)> = None;
        for idx in c * chunk..((c + 1) * chunk).min(space) {
            let vals = decode(idx);
            let v = scaled.value(&vals);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, idx));
            }
        }
        best
    });
    let (num, idx) = best_per_chunk
        .into_iter()
        .flatten()
        .fold(None::<(BigInt, u64)>, |acc, (v, i)| match acc {
            Some((b, j)) if b >= v => Some((b, j)),
            _ => Some((v, i)),
        })
        .expect("assignment space is nonempty");
    let vals = decode(idx);
    let witness = Assignment(vals.into_iter().enumerate().collect());
    Ok((BigRational::new(num, scaled.denominator.clone()), witness))
}

/// All tables over a common denominator, densely indexed by tuple.
struct ScaledTables {
    denominator: BigInt,
    edges: Vec<(Vec<usize>, Vec<BigInt>)>,
    domain: usize,
}

impl ScaledTables {
    fn new(inst: &MaxCspInstance) -> Self {
        let denominator = inst
            .constraints()
            .iter()
            .flat_map(|c| c.table.values())
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let d = inst.domain_size();
        let h = inst.hypergraph();
        let edges = (0..h.num_edges())
            .map(|e| {
                let vars: Vec<usize> = h.edge(e).iter().collect();
                let mut dense = vec![BigInt::zero(); d.pow(vars.len() as u32)];
                for (t, v) in &inst.constraint(e).sorted {
                    let idx = t.iter().fold(0usize, |a, &x| a * d + x as usize);
                    dense[idx] = (v * BigRational::from_integer(denominator.clone())).to_integer();
                }
                (vars, dense)
            })
            .collect();
        ScaledTables {
            denominator,
            edges,
            domain: d,
        }
    }

    fn value(&self, vals: &[Value]) -> BigInt {
        let mut total = BigInt::zero();
        for (vars, dense) in &self.edges {
            let idx = vars
                .iter()
                .fold(0usize, |a, &v| a * self.domain + vals[v] as usize);
            total += &dense[idx];
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn s(x: &str) -> String {
        x.to_string()
    }

    fn unary() -> MaxCspInstance {
        MaxCspInstance::new(
            vec![s("x")],
            vec![s("0"), s("1")],
            vec![(
                s("f"),
                vec![s("x")],
                vec![(vec![s("0")], rat(1, 2)), (vec![s("1")], rat(3, 1))],
            )],
        )
        .unwrap()
    }

    fn fan_all_ones() -> MaxCspInstance {
        let scopes: [(&str, &[&str]); 4] = [
            ("e", &["x0", "x1", "x2", "x3"]),
            ("e1", &["x0", "x1"]),
            ("e2", &["x0", "x2"]),
            ("e3", &["x0", "x3"]),
        ];
        let constraints = scopes
            .iter()
            .map(|(id, scope)| {
                let k = scope.len();
                let rows = (0..1u32 << k)
                    .map(|m| {
                        let t = (0..k).map(|i| (m >> i & 1).to_string()).collect();
                        (t, rat(1, 1))
                    })
                    .collect();
                (s(id), scope.iter().map(|x| s(x)).collect(), rows)
            })
            .collect();
        MaxCspInstance::new(
            ["x0", "x1", "x2", "x3"].iter().map(|x| s(x)).collect(),
            vec![s("0"), s("1")],
            constraints,
        )
        .unwrap()
    }

    #[test]
    fn rationals_round_trip() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn unary_optimum() {
        let inst = unary();
        let (opt, w) = brute_force_opt(&inst, Exec::Sequential).unwrap();
        assert_eq!(opt, rat(3, 1));
        assert_eq!(w.named(&inst)["x"], "1");
    }

    #[test]
    fn empty_tables_give_zero() {
        let inst = MaxCspInstance::new(
            vec![s("a"), s("b")],
            vec![s("0"), s("1")],
            vec![(s("f"), vec![s("a"), s("b")], vec![])],
        )
        .unwrap();
        let (opt, w) = brute_force_opt(&inst, Exec::default()).unwrap();
        assert!(opt.is_zero());
        assert_eq!(w, Assignment(BTreeMap::from([(0, 0), (1, 0)])));
    }

    #[test]
    fn fan_optimum_is_four() {
        let inst = fan_all_ones();
        assert_eq!(inst.hypergraph().num_edges(), 4);
        assert_eq!(
            brute_force_opt(&inst, Exec::Sequential).unwrap().0,
            rat(4, 1)
        );
        assert_eq!(brute_force_opt(&inst, Exec::Parallel).unwrap().0, rat(4, 1));
    }

    #[test]
    fn rejects_bad_instances() {
        let dup_scope = MaxCspInstance::new(
            vec![s("a"), s("b")],
            vec![s("0")],
            vec![
                (s("f"), vec![s("a"), s("b")], vec![]),
                (s("g"), vec![s("b"), s("a")], vec![]),
            ],
        );
        assert!(dup_scope.is_err());
        let zero = MaxCspInstance::new(
            vec![s("a")],
            vec![s("0")],
            vec![(s("f"), vec![s("a")], vec![(vec![s("0")], rat(0, 1))])],
        );
        assert!(zero.is_err());
        let repeated = MaxCspInstance::new(
            vec![s("a")],
            vec![s("0")],
            vec![(s("f"), vec![s("a"), s("a")], vec![])],
        );
        assert!(repeated.is_err());
        let none = MaxCspInstance::new(vec![], vec![s("0")], vec![]).unwrap();
        assert_eq!(none.hypergraph().num_edges(), 0);
    }

    #[test]
    fn partial_values_and_satisfaction() {
        let inst = fan_all_ones();
        assert!(partial_value(&inst, &Assignment::default()).is_zero());
        let a = Assignment(BTreeMap::from([(0, 1), (1, 0)]));
        assert_eq!(partial_value(&inst, &a), rat(1, 1));
        assert!(satisfies(&inst, &a, "e").unwrap());
        assert!(satisfies(&inst, &Assignment::default(), "e3").unwrap());
        assert!(satisfies(&inst, &a, "nope").is_err());

        let empty = MaxCspInstance::new(
            vec![s("a")],
            vec![s("0")],
            vec![(s("f"), vec![s("a")], vec![])],
        )
        .unwrap();
        assert!(!satisfies(&empty, &Assignment::default(), "f").unwrap());
    }

    #[test]
    fn joins() {
        let a = Relation {
            vars: VertexSet::singleton(0),
            rows: BTreeSet::from([vec![0]]),
        };
        let b = Relation {
            vars: VertexSet::singleton(1),
            rows: BTreeSet::from([vec![1]]),
        };
        let ab = join(&[a.clone(), b]);
        assert_eq!(
            ab.assignments(),
            vec![Assignment(BTreeMap::from([(0, 0), (1, 1)]))]
        );
        let c = Relation {
            vars: VertexSet::singleton(0),
            rows: BTreeSet::from([vec![1]]),
        };
        assert!(join(&[a.clone(), c]).rows.is_empty());
        assert_eq!(join(std::slice::from_ref(&a)), a);
        assert_eq!(join(&[]), Relation::unit());
    }

    #[test]
    fn json_round_trip() {
        let inst = fan_all_ones();
        let js = inst.to_json();
        let back = MaxCspInstance::from_json(&js).unwrap();
        assert_eq!(back.to_json(), js);
        assert!(MaxCspInstance::from_json("{\"variables\": [}").is_err());
    }

    #[test]
    fn scope_order_is_respected() {
        let inst = MaxCspInstance::new(
            vec![s("a"), s("b")],
            vec![s("0"), s("1")],
            vec![(
                s("f"),
                vec![s("b"), s("a")],
                vec![(vec![s("1"), s("0")], rat(5, 1))],
            )],
        )
        .unwrap();
        let a = Assignment(BTreeMap::from([(0, 0), (1, 1)]));
        assert_eq!(partial_value(&inst, &a), rat(5, 1));
    }
}
