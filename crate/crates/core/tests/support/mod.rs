//! Random instance generators and brute-force reference implementations
//! shared by the property tests and the acceptance run. Nothing here calls
//! the engine, the query planner or the ontology code it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use vbd_core::query::{CompareOp, Filter, QTerm, Query, TriplePattern};
use vbd_core::rules::{Arg, Atom, AtomKind, Rule, RuleSource};
use vbd_core::store::{Datatype, Graph, Term, Triple};

pub const NS: &str = "http://example.org/t#";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

pub fn iri(local: &str) -> Term {
    Term::iri(format!("{NS}{local}"))
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ------------------------------------------------------------------ graphs

pub const ENTITIES: usize = 8;
pub const PROPERTIES: usize = 4;
pub const CLASSES: usize = 5;
/// Subclass edges of the test hierarchy, (sub, super).
pub const SUBCLASS_EDGES: [(usize, usize); 3] = [(1, 0), (2, 0), (3, 1)];

pub fn schema_turtle() -> String {
    let mut out = format!("@prefix : <{NS}> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n");
    for c in 0..CLASSES {
        out.push_str(&format!(":C{c} a owl:Class .\n"));
    }
    for (sub, sup) in SUBCLASS_EDGES {
        out.push_str(&format!(":C{sub} rdfs:subClassOf :C{sup} .\n"));
    }
    out
}

fn entity(rng: &mut StdRng) -> Term {
    iri(&format!("e{}", rng.random_range(0..ENTITIES)))
}

fn property(rng: &mut StdRng) -> String {
    format!("{NS}p{}", rng.random_range(0..PROPERTIES))
}

fn class(rng: &mut StdRng) -> String {
    format!("{NS}C{}", rng.random_range(0..CLASSES))
}

fn literal(rng: &mut StdRng) -> Term {
    match rng.random_range(0..3) {
        0 => Term::integer(rng.random_range(0..3)),
        1 => Term::string(*["a", "A", "b"].choose(rng).unwrap()),
        _ => Term::boolean(rng.random_bool(0.5)),
    }
}

fn object(rng: &mut StdRng) -> Term {
    if rng.random_bool(0.6) {
        entity(rng)
    } else {
        literal(rng)
    }
}

/// Up to `max` triples over a small vocabulary, so joins are dense.
pub fn small_graph(rng: &mut StdRng, max: usize) -> Vec<Triple> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                Triple::new(entity(rng), Term::iri(RDF_TYPE), Term::iri(class(rng)))
            } else {
                Triple::new(entity(rng), Term::iri(property(rng)), object(rng))
            }
        })
        .collect()
}

pub fn to_graph(triples: &[Triple]) -> Graph {
    let mut g = Graph::new();
    for t in triples {
        g.insert(t.clone()).unwrap();
    }
    g
}

/// Characters that stress escaping: quotes, backslashes, controls,
/// whitespace of several kinds and non-ASCII letters.
const AWKWARD: &[char] = &[
    'a', 'Z', '0', '"', '\\', '\n', '\t', '\r', ' ', '\u{85}', '\u{a0}', 'é', 'ß', '中', '>', '<', '{', '#', '/', '.',
    ':', '-', '_', '%', '\u{1}',
];

fn awkward_string(rng: &mut StdRng, max: usize) -> String {
    (0..rng.random_range(0..=max)).map(|_| *AWKWARD.choose(rng).unwrap()).collect()
}

fn wide_iri(rng: &mut StdRng) -> Term {
    match rng.random_range(0..4) {
        0 => iri(&format!("n{}", rng.random_range(0..20))),
        1 => iri(&format!("{}-x.{}", rng.random_range(0..9), rng.random_range(0..9))),
        2 => Term::iri(format!(
            "http://example.org/raw/{}",
            awkward_string(rng, 6).replace(['<', '>', '"', '{', '\\'], "")
        )),
        _ => Term::iri(format!("_:b{}", rng.random_range(0..6))),
    }
}

/// A graph of up to `max` triples mixing prefixable, raw and blank-node
/// IRIs with every literal datatype.
pub fn wide_graph(rng: &mut StdRng, max: usize) -> Graph {
    let mut g = Graph::new();
    for _ in 0..rng.random_range(0..=max) {
        let p = if rng.random_bool(0.1) { Term::iri(RDF_TYPE) } else { iri(&format!("q{}", rng.random_range(0..6))) };
        let o = match rng.random_range(0..6) {
            0 | 1 => wide_iri(rng),
            2 => Term::string(awkward_string(rng, 12)),
            3 => Term::integer(rng.random_range(i64::MIN..=i64::MAX)),
            4 => Term::boolean(rng.random_bool(0.5)),
            _ => Term::decimal(&format!("{}.{}", rng.random_range(-1000..1000), rng.random_range(0..1000))).unwrap(),
        };
        g.insert(Triple::new(wide_iri(rng), p, o)).unwrap();
    }
    g
}

// ------------------------------------------------------------------ rules

const VARS: [&str; 4] = ["x", "y", "z", "w"];

fn var(rng: &mut StdRng) -> Arg {
    Arg::Var(VARS.choose(rng).unwrap().to_string())
}

fn pick_bound(rng: &mut StdRng, bound: &BTreeSet<String>) -> Arg {
    let all: Vec<&String> = bound.iter().collect();
    Arg::Var((*all.choose(rng).unwrap()).clone())
}

/// A safe, connected rule: every body atom after the first shares a
/// variable with an earlier one, and every head and builtin variable occurs
/// in a class or property atom of the body.
pub fn random_rule(rng: &mut StdRng, id: usize) -> Rule {
    let mut body: Vec<Atom> = Vec::new();
    for i in 0..rng.random_range(1..=3) {
        let earlier: BTreeSet<String> = body.iter().flat_map(|a| a.variables().map(str::to_string)).collect();
        let linked = |rng: &mut StdRng| if earlier.is_empty() { var(rng) } else { pick_bound(rng, &earlier) };
        if rng.random_bool(0.2) {
            let arg = linked(rng);
            body.push(Atom::class(class(rng), arg));
        } else {
            let link_subject = i == 0 || rng.random_bool(0.6);
            let s = if link_subject {
                linked(rng)
            } else if rng.random_bool(0.7) {
                var(rng)
            } else {
                Arg::Const(entity(rng))
            };
            let o = if !link_subject {
                linked(rng)
            } else {
                match rng.random_range(0..10) {
                    0..6 => var(rng),
                    6..8 => Arg::Const(entity(rng)),
                    _ => Arg::Const(literal(rng)),
                }
            };
            body.push(Atom::property(property(rng), s, o));
        }
    }
    let bound: BTreeSet<String> = body.iter().flat_map(|a: &Atom| a.variables().map(str::to_string)).collect();
    if rng.random_bool(0.3) {
        let left = pick_bound(rng, &bound);
        let right = if rng.random_bool(0.5) { pick_bound(rng, &bound) } else { Arg::Const(object(rng)) };
        body.push(Atom::equal(left, right));
    }
    let mut head = Vec::new();
    for _ in 0..rng.random_range(1..=2) {
        if rng.random_bool(0.2) {
            head.push(Atom::class(class(rng), pick_bound(rng, &bound)));
        } else {
            let s = if rng.random_bool(0.85) { pick_bound(rng, &bound) } else { Arg::Const(entity(rng)) };
            let o = if rng.random_bool(0.7) { pick_bound(rng, &bound) } else { Arg::Const(object(rng)) };
            head.push(Atom::property(property(rng), s, o));
        }
    }
    let mut rule = Rule {
        id: format!("R{id}"),
        body,
        head,
        source: RuleSource::User,
        note: None,
        text: String::new(),
        line: id + 1,
    };
    rule.text = rule.to_string();
    rule
}

pub fn random_rules(rng: &mut StdRng, max: usize) -> Vec<Rule> {
    (0..rng.random_range(1..=max)).map(|i| random_rule(rng, i)).collect()
}

// ------------------------------------------------------------------ fixpoint oracle

/// Reflexive-transitive subclasses of each test class, by breadth-first
/// search over the edge list.
pub fn descendants(edges: &[(String, String)], class: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([class.to_string()]);
    let mut queue = VecDeque::from([class.to_string()]);
    while let Some(c) = queue.pop_front() {
        for (sub, sup) in edges {
            if *sup == c && seen.insert(sub.clone()) {
                queue.push_back(sub.clone());
            }
        }
    }
    seen
}

pub fn test_edges() -> Vec<(String, String)> {
    SUBCLASS_EDGES.iter().map(|(a, b)| (format!("{NS}C{a}"), format!("{NS}C{b}"))).collect()
}

fn fold(t: &Term) -> Option<String> {
    match t {
        Term::Literal(l) if l.datatype() == Datatype::String => Some(l.lexical().to_lowercase()),
        _ => None,
    }
}

/// Equality as rule bodies see it: identical terms, or string literals that
/// agree ignoring case.
pub fn rule_equal(a: &Term, b: &Term) -> bool {
    a == b || matches!((fold(a), fold(b)), (Some(x), Some(y)) if x == y)
}

type Env = BTreeMap<String, Term>;

fn bind(arg: &Arg, value: &Term, env: &mut Env, fold_const: bool) -> bool {
    match arg {
        Arg::Const(c) if fold_const => rule_equal(c, value),
        Arg::Const(c) => c == value,
        Arg::Var(v) => match env.get(v) {
            Some(existing) => existing == value,
            None => {
                env.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn value(arg: &Arg, env: &Env) -> Option<Term> {
    match arg {
        Arg::Const(c) => Some(c.clone()),
        Arg::Var(v) => env.get(v).cloned(),
    }
}

/// Whether `atom` holds for `t` under `env`, extending `env`. `classes`
/// holds the atom's class and its subclasses.
fn atom_matches(atom: &Atom, classes: &BTreeSet<String>, t: &Triple, env: &mut Env) -> bool {
    match atom.kind {
        AtomKind::Class => {
            t.predicate == Term::iri(RDF_TYPE)
                && t.object.as_iri().is_some_and(|c| classes.contains(c))
                && bind(&atom.args[0], &t.subject, env, false)
        }
        AtomKind::Property => {
            t.predicate == Term::iri(atom.predicate.clone())
                && bind(&atom.args[0], &t.subject, env, false)
                && bind(&atom.args[1], &t.object, env, true)
        }
        AtomKind::Builtin => unreachable!(),
    }
}

/// Every variable assignment satisfying the body, by scanning every triple
/// for every atom in written order.
pub fn body_matches(rule: &Rule, facts: &BTreeSet<Triple>, edges: &[(String, String)]) -> Vec<Env> {
    let atoms: Vec<&Atom> = rule.body.iter().filter(|a| a.kind != AtomKind::Builtin).collect();
    let mut envs = vec![Env::new()];
    for atom in atoms {
        let classes = descendants(edges, &atom.predicate);
        let mut next = Vec::new();
        for env in &envs {
            for t in facts {
                let mut e = env.clone();
                if atom_matches(atom, &classes, t, &mut e) {
                    next.push(e);
                }
            }
        }
        envs = next;
    }
    envs.retain(|env| {
        rule.body.iter().filter(|a| a.kind == AtomKind::Builtin).all(
            |a| matches!((value(&a.args[0], env), value(&a.args[1], env)), (Some(x), Some(y)) if rule_equal(&x, &y)),
        )
    });
    envs
}

/// Head triples of `rule` under `env`; heads with a literal subject are
/// dropped.
pub fn instantiate(rule: &Rule, env: &Env) -> Vec<Triple> {
    rule.head
        .iter()
        .filter_map(|a| {
            let s = value(&a.args[0], env)?;
            if !s.is_iri() {
                return None;
            }
            Some(match a.kind {
                AtomKind::Class => Triple::new(s, Term::iri(RDF_TYPE), Term::iri(a.predicate.clone())),
                _ => Triple::new(s, Term::iri(a.predicate.clone()), value(&a.args[1], env)?),
            })
        })
        .collect()
}

/// Naive bottom-up evaluation: apply every rule to everything known until
/// a round adds nothing.
pub fn naive_fixpoint(facts: &[Triple], rules: &[Rule], edges: &[(String, String)]) -> BTreeSet<Triple> {
    let mut known: BTreeSet<Triple> = facts.iter().cloned().collect();
    loop {
        let mut next = known.clone();
        for rule in rules {
            for env in body_matches(rule, &known, edges) {
                next.extend(instantiate(rule, &env));
            }
        }
        if next.len() == known.len() {
            return known;
        }
        known = next;
    }
}

// ------------------------------------------------------------------ queries

const QVARS: [&str; 4] = ["a", "b", "c", "d"];

fn qvar(rng: &mut StdRng) -> QTerm {
    QTerm::Var(QVARS.choose(rng).unwrap().to_string())
}

pub fn random_query(rng: &mut StdRng) -> Query {
    let mut patterns = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let s = if rng.random_bool(0.6) { qvar(rng) } else { QTerm::Const(entity(rng)) };
        let p = match rng.random_range(0..8) {
            0 | 1 => qvar(rng),
            2 => QTerm::Const(Term::iri(RDF_TYPE)),
            _ => QTerm::Const(Term::iri(property(rng))),
        };
        let o = match rng.random_range(0..10) {
            0..5 => qvar(rng),
            5..7 => QTerm::Const(entity(rng)),
            7 => QTerm::Const(Term::iri(class(rng))),
            _ => QTerm::Const(literal(rng)),
        };
        patterns.push(TriplePattern::new(s, p, o));
    }
    let mut vars: Vec<String> = Vec::new();
    for v in patterns.iter().flat_map(|p| p.variables()) {
        if !vars.iter().any(|x| x == v) {
            vars.push(v.to_string());
        }
    }
    if vars.is_empty() {
        patterns[0].s = QTerm::Var("a".into());
        vars.push("a".into());
    }
    let mut select: Vec<String> = vars.iter().filter(|_| rng.random_bool(0.6)).cloned().collect();
    if select.is_empty() {
        select.push(vars[0].clone());
    }
    let mut filters = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        let left = vars.choose(rng).unwrap().clone();
        let right = if rng.random_bool(0.4) {
            QTerm::Var(vars.choose(rng).unwrap().clone())
        } else {
            QTerm::Const(object(rng))
        };
        let op = if rng.random_bool(0.5) { CompareOp::Eq } else { CompareOp::Ne };
        filters.push(Filter { left, op, right });
    }
    Query { select, patterns, filters }
}

fn qbind(term: &QTerm, value: &Term, env: &mut BTreeMap<String, Term>) -> bool {
    match term {
        QTerm::Const(c) => c == value,
        QTerm::Var(v) => match env.get(v) {
            Some(existing) => existing == value,
            None => {
                env.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

/// Every combination of triples, one per pattern, that agrees on shared
/// variables and passes the filters, projected and deduplicated.
pub fn brute_force_query(query: &Query, facts: &[Triple]) -> BTreeSet<Vec<Term>> {
    let mut envs = vec![BTreeMap::new()];
    for p in &query.patterns {
        let mut next = Vec::new();
        for env in &envs {
            for t in facts {
                let mut e = env.clone();
                if qbind(&p.s, &t.subject, &mut e)
                    && qbind(&p.p, &t.predicate, &mut e)
                    && qbind(&p.o, &t.object, &mut e)
                {
                    next.push(e);
                }
            }
        }
        envs = next;
    }
    envs.into_iter()
        .filter(|env| {
            query.filters.iter().all(|f| {
                let l = &env[&f.left];
                let r = match &f.right {
                    QTerm::Var(v) => env[v].clone(),
                    QTerm::Const(c) => c.clone(),
                };
                match f.op {
                    CompareOp::Eq => *l == r,
                    CompareOp::Ne => *l != r,
                }
            })
        })
        .map(|env| query.select.iter().map(|v| env[v].clone()).collect())
        .collect()
}

// ------------------------------------------------------------------ text

/// Textbook edit distance over characters with a full table.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Replaces, inserts or deletes one letter inside a word of at least four
/// letters, retrying until the result is not itself a dictionary word.
pub fn typo(rng: &mut StdRng, word: &str, is_word: impl Fn(&str) -> bool) -> Option<String> {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() < 4 || !chars.iter().all(|c| c.is_ascii_lowercase()) {
        return None;
    }
    for _ in 0..20 {
        let mut c = chars.clone();
        let i = rng.random_range(0..c.len());
        let letter = rng.random_range(b'a'..=b'z') as char;
        match rng.random_range(0..3) {
            0 => c[i] = letter,
            1 => c.insert(i, letter),
            _ => {
                c.remove(i);
            }
        }
        let out: String = c.into_iter().collect();
        if out != word && !is_word(&out) {
            return Some(out);
        }
    }
    None
}
