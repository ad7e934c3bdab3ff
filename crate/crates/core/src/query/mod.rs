//! Basic graph pattern queries: `SELECT ... WHERE { ... } FILTER(...)`.

mod bench;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::store::{Graph, Term, TermId};

pub use bench::{bench, BenchError, BenchReport, BenchRow, QuerySummary, COMBINED};
pub use parse::{parse_query, parse_query_with, QueryError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QTerm {
    Var(String),
    Const(Term),
}

impl QTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            QTerm::Var(v) => Some(v),
            QTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for QTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QTerm::Var(v) => write!(f, "?{v}"),
            QTerm::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: QTerm,
    pub p: QTerm,
    pub o: QTerm,
}

impl TriplePattern {
    pub fn new(s: QTerm, p: QTerm, o: QTerm) -> TriplePattern {
        TriplePattern { s, p, o }
    }

    pub fn positions(&self) -> [&QTerm; 3] {
        [&self.s, &self.p, &self.o]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.positions().into_iter().filter_map(QTerm::var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CompareOp {
    Eq,
    Ne,
}

/// `?left = right` or `?left != right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Filter {
    pub left: String,
    pub op: CompareOp,
    pub right: QTerm,
}

impl Filter {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.left.as_str()).chain(self.right.var())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
}

impl Query {
    /// Distinct pattern variables in order of first appearance.
    pub fn pattern_variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.patterns.iter().flat_map(TriplePattern::variables) {
            if !out.iter().any(|x| x == v) {
                out.push(v.to_string());
            }
        }
        out
    }
}

/// Projected solutions. Rows are sorted and distinct, and each row holds one
/// term per header variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl SolutionTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let i = self.header.iter().position(|h| h == var)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Tab-separated with a `?var` header line.
    pub fn to_tsv(&self) -> String {
        let mut out = self.header.iter().map(|h| format!("?{h}")).collect::<Vec<_>>().join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Var(usize),
    Id(TermId),
    /// A constant absent from the graph.
    Missing,
}

struct Plan {
    patterns: Vec<[Slot; 3]>,
    /// Filters to test right after each pattern in `patterns` is joined.
    filters_after: Vec<Vec<(usize, CompareOp, Slot)>>,
}

fn slot(term: &QTerm, vars: &[String], graph: &Graph) -> Slot {
    match term {
        QTerm::Var(v) => Slot::Var(vars.iter().position(|x| x == v).expect("variable collected")),
        QTerm::Const(t) => graph.term_id(t).map_or(Slot::Missing, Slot::Id),
    }
}

/// Left-deep join order: fewest unbound positions first, then fewest
/// matching triples.
fn plan(query: &Query, vars: &[String], graph: &Graph) -> Plan {
    let slots: Vec<[Slot; 3]> = query.patterns.iter().map(|p| p.positions().map(|t| slot(t, vars, graph))).collect();
    let mut bound = vec![false; vars.len()];
    let mut remaining: Vec<usize> = (0..slots.len()).collect();
    let mut ordered = Vec::new();
    while !remaining.is_empty() {
        let cost = |&i: &usize| {
            let free = slots[i].iter().filter(|s| matches!(s, Slot::Var(v) if !bound[*v])).count();
            let fixed = |s: Slot| match s {
                Slot::Id(id) => Some(id),
                _ => None,
            };
            let [s, p, o] = slots[i];
            let count = if slots[i].iter().any(|s| matches!(s, Slot::Missing)) {
                0
            } else {
                graph.count_ids(fixed(s), fixed(p), fixed(o))
            };
            (free, count, i)
        };
        let pos = (0..remaining.len()).min_by_key(|&k| cost(&remaining[k])).expect("non-empty");
        let next = remaining.remove(pos);
        for s in slots[next] {
            if let Slot::Var(v) = s {
                bound[v] = true;
            }
        }
        ordered.push(next);
    }

    let mut seen = vec![false; vars.len()];
    let mut pending: Vec<&Filter> = query.filters.iter().collect();
    let mut filters_after = Vec::new();
    for &i in &ordered {
        for s in slots[i] {
            if let Slot::Var(v) = s {
                seen[v] = true;
            }
        }
        let index = |name: &str| vars.iter().position(|x| x == name).expect("validated");
        let (ready, rest): (Vec<&Filter>, Vec<&Filter>) =
            pending.into_iter().partition(|f| f.variables().all(|v| seen[index(v)]));
        pending = rest;
        filters_after.push(ready.into_iter().map(|f| (index(&f.left), f.op, slot(&f.right, vars, graph))).collect());
    }
    Plan { patterns: ordered.into_iter().map(|i| slots[i]).collect(), filters_after }
}

fn join(plan: &Plan, graph: &Graph, depth: usize, binding: &mut Vec<Option<TermId>>, out: &mut BTreeSet<Vec<TermId>>) {
    if depth == plan.patterns.len() {
        out.insert(binding.iter().map(|b| b.expect("all pattern variables bound")).collect());
        return;
    }
    let pattern = plan.patterns[depth];
    let value = |s: Slot, binding: &[Option<TermId>]| match s {
        Slot::Var(v) => binding[v],
        Slot::Id(id) => Some(id),
        Slot::Missing => None,
    };
    if pattern.iter().any(|s| matches!(s, Slot::Missing)) {
        return;
    }
    let [s, p, o] = pattern.map(|s| value(s, binding));
    for triple in graph.match_ids(s, p, o) {
        let mut trail = Vec::new();
        let mut ok = true;
        for (slot, id) in pattern.iter().zip(triple) {
            if let Slot::Var(v) = *slot {
                match binding[v] {
                    Some(existing) if existing != id => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        binding[v] = Some(id);
                        trail.push(v);
                    }
                }
            }
        }
        if ok {
            ok = plan.filters_after[depth].iter().all(|&(left, op, right)| {
                let l = binding[left];
                let r = value(right, binding);
                let equal = l.is_some() && l == r;
                match op {
                    CompareOp::Eq => equal,
                    CompareOp::Ne => !equal,
                }
            });
        }
        if ok {
            join(plan, graph, depth + 1, binding, out);
        }
        for v in trail {
            binding[v] = None;
        }
    }
}

/// All solutions of `query` over `graph`, projected onto the select list.
pub fn execute(query: &Query, graph: &Graph) -> SolutionTable {
    let vars = query.pattern_variables();
    let plan = plan(query, &vars, graph);
    let mut solutions = BTreeSet::new();
    if !query.patterns.is_empty() {
        join(&plan, graph, 0, &mut vec![None; vars.len()], &mut solutions);
    }
    let columns: Vec<usize> =
        query.select.iter().map(|v| vars.iter().position(|x| x == v).expect("validated")).collect();
    let rows: BTreeSet<Vec<Term>> =
        solutions.into_iter().map(|row| columns.iter().map(|&c| graph.term(row[c]).clone()).collect()).collect();
    SolutionTable { header: query.select.clone(), rows: rows.into_iter().collect() }
}
