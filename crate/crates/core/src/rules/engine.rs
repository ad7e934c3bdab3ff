//! Bottom-up evaluation to the least fixpoint.
//!
//! Semi-naive by default: in round `k` every rule is evaluated once per body
//! atom `i`, with atom `i` restricted to the triples first seen in round
//! `k-1`, atoms before `i` restricted to older triples and atoms after `i`
//! unrestricted. Each ground body instance is therefore enumerated in exactly
//! one round. Rules within a round are evaluated independently (in parallel
//! when enabled) and their firings merged in rule order.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::consistency::check_consistency;
use super::{Arg, AtomKind, Bindings, Rule, Violation};
use crate::ontology::OntologySchema;
use crate::par::{self, ExecMode};
use crate::store::{Datatype, Graph, IdTriple, Term, TermId, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    SemiNaive,
    /// Re-evaluates every rule against the whole graph each round.
    Naive,
}

/// How plain string literals compare in rule bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StringMatch {
    /// `"Negative"` matches `"negative"`, both in `swrlb:equal` and in
    /// string constants of property atoms.
    #[default]
    CaseInsensitive,
    Strict,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EngineOptions {
    pub strategy: Strategy,
    pub exec: ExecMode,
    pub string_match: StringMatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Provenance {
    pub rule_id: String,
    pub bindings: Bindings,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedFact {
    pub triple: Triple,
    /// Distinct (rule, bindings) pairs, in discovery order.
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone)]
pub struct InferenceResult {
    /// Input plus every derived triple.
    pub graph: Graph,
    /// Derived (never asserted) triples in order of first derivation.
    pub derived: Vec<DerivedFact>,
    pub violations: Vec<Violation>,
    pub rules: Vec<Rule>,
    pub rounds: usize,
    index: HashMap<Triple, usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplainError {
    #[error("{0} is asserted, not derived")]
    Asserted(Triple),
    #[error("{0} is not in the graph")]
    Absent(Triple),
}

impl InferenceResult {
    pub fn derived_fact(&self, triple: &Triple) -> Option<&DerivedFact> {
        self.index.get(triple).map(|&i| &self.derived[i])
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn is_derived(&self, triple: &Triple) -> bool {
        self.index.contains_key(triple)
    }
}

/// Every (rule, bindings) pair that derives `fact`.
pub fn explain<'r>(result: &'r InferenceResult, fact: &Triple) -> Result<Vec<(&'r Rule, &'r Bindings)>, ExplainError> {
    match result.derived_fact(fact) {
        Some(derived) => Ok(derived
            .provenance
            .iter()
            .map(|p| (result.rule(&p.rule_id).expect("provenance names a known rule"), &p.bindings))
            .collect()),
        None if result.graph.contains(fact) => Err(ExplainError::Asserted(fact.clone())),
        None => Err(ExplainError::Absent(fact.clone())),
    }
}

/// Applies `rules` to `graph` with default options.
pub fn apply_rules(graph: &Graph, rules: &[Rule], schema: &OntologySchema) -> InferenceResult {
    apply_rules_with(graph, rules, schema, &EngineOptions::default())
}

#[derive(Debug, Clone, Copy)]
enum CArg {
    Var(usize),
    Const(TermId),
}

#[derive(Debug, Clone)]
enum CAtom {
    /// Matches `(x, rdf:type, C)` for `C` in `classes`.
    Class {
        classes: Vec<TermId>,
        arg: CArg,
    },
    /// `folded` holds the lowercased object constant when it is a string
    /// compared case-insensitively.
    Prop {
        pred: TermId,
        s: CArg,
        o: CArg,
        folded: Option<String>,
    },
    Equal {
        a: CArg,
        b: CArg,
    },
}

impl CAtom {
    fn args(&self) -> Vec<CArg> {
        match self {
            CAtom::Class { arg, .. } => vec![*arg],
            CAtom::Prop { s, o, .. } | CAtom::Equal { a: s, b: o } => vec![*s, *o],
        }
    }

    fn vars(&self) -> impl Iterator<Item = usize> {
        self.args().into_iter().filter_map(|a| match a {
            CArg::Var(v) => Some(v),
            CArg::Const(_) => None,
        })
    }
}

struct CompiledRule {
    vars: Vec<String>,
    body: Vec<CAtom>,
    head: Vec<(CArg, TermId, CArg)>,
}

struct Ctx<'a> {
    graph: &'a Graph,
    type_id: TermId,
    /// Round in which each triple entered the graph (0 = asserted).
    round_of: &'a HashMap<IdTriple, usize>,
    string_match: StringMatch,
}

/// Round restriction on one body atom during a semi-naive pass.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Window {
    Any,
    Older(usize),
    Exactly(usize),
}

impl Ctx<'_> {
    fn admits(&self, window: Window, t: &IdTriple) -> bool {
        match window {
            Window::Any => true,
            Window::Older(r) => self.round_of[t] < r,
            Window::Exactly(r) => self.round_of[t] == r,
        }
    }

    fn folded(&self, id: TermId) -> Option<String> {
        match self.graph.term(id) {
            Term::Literal(lit) if lit.datatype() == Datatype::String => Some(lit.lexical().to_lowercase()),
            _ => None,
        }
    }

    fn equal(&self, a: TermId, b: TermId) -> bool {
        if a == b {
            return true;
        }
        self.string_match == StringMatch::CaseInsensitive
            && matches!((self.folded(a), self.folded(b)), (Some(x), Some(y)) if x == y)
    }

    fn estimate(&self, atom: &CAtom, bound: &[bool]) -> usize {
        let fixed = |a: CArg| match a {
            CArg::Const(id) => Some(id),
            CArg::Var(_) => None,
        };
        let is_bound = |a: CArg| match a {
            CArg::Const(_) => true,
            CArg::Var(v) => bound[v],
        };
        match atom {
            CAtom::Class { classes, arg } => {
                if is_bound(*arg) {
                    1
                } else {
                    classes.iter().map(|c| self.graph.count_ids(None, Some(self.type_id), Some(*c))).sum()
                }
            }
            CAtom::Prop { pred, s, o, folded } => {
                let o_fixed = if folded.is_some() { None } else { fixed(*o) };
                let n = self.graph.count_ids(fixed(*s), Some(*pred), o_fixed);
                // Prefer atoms that are already joined to bound variables.
                match (is_bound(*s), is_bound(*o)) {
                    (true, true) => n.min(1),
                    (true, false) | (false, true) => n.min(1 + n / 8),
                    (false, false) => n,
                }
            }
            CAtom::Equal { .. } => 0,
        }
    }

    /// Triples that can satisfy `atom` under the current bindings.
    fn candidates(&self, atom: &CAtom, binding: &[Option<TermId>], delta: Option<&[IdTriple]>) -> Vec<IdTriple> {
        let value = |a: CArg| match a {
            CArg::Const(id) => Some(id),
            CArg::Var(v) => binding[v],
        };
        match atom {
            CAtom::Class { classes, arg } => {
                let s = value(*arg);
                match delta {
                    Some(delta) => delta
                        .iter()
                        .filter(|t| t[1] == self.type_id && classes.contains(&t[2]) && s.is_none_or(|s| t[0] == s))
                        .copied()
                        .collect(),
                    None => {
                        classes.iter().flat_map(|c| self.graph.match_ids(s, Some(self.type_id), Some(*c))).collect()
                    }
                }
            }
            CAtom::Prop { pred, s, o, folded } => {
                let (s, o) = (value(*s), if folded.is_some() { None } else { value(*o) });
                let keep = |t: &IdTriple| match folded {
                    Some(want) => self.folded(t[2]).as_deref() == Some(want.as_str()),
                    None => true,
                };
                match delta {
                    Some(delta) => delta
                        .iter()
                        .filter(|t| t[1] == *pred && s.is_none_or(|s| t[0] == s) && o.is_none_or(|o| t[2] == o))
                        .filter(|t| keep(t))
                        .copied()
                        .collect(),
                    None => self.graph.match_ids(s, Some(*pred), o).into_iter().filter(|t| keep(t)).collect(),
                }
            }
            CAtom::Equal { .. } => Vec::new(),
        }
    }
}

/// Binds `arg` to `value`; false on a clash with an existing binding.
fn unify(arg: CArg, value: TermId, binding: &mut [Option<TermId>], trail: &mut Vec<usize>) -> bool {
    match arg {
        CArg::Const(id) => id == value,
        CArg::Var(v) => match binding[v] {
            Some(existing) => existing == value,
            None => {
                binding[v] = Some(value);
                trail.push(v);
                true
            }
        },
    }
}

struct Pass<'p> {
    order: Vec<usize>,
    windows: Vec<Window>,
    delta_atom: Option<usize>,
    delta: Option<&'p [IdTriple]>,
    /// Builtins to check once the `order` prefix up to each depth is bound.
    checks_after: Vec<Vec<usize>>,
}

fn plan<'p>(
    rule: &CompiledRule,
    ctx: &Ctx<'_>,
    delta_atom: Option<usize>,
    delta: Option<&'p [IdTriple]>,
    windows: Vec<Window>,
) -> Pass<'p> {
    let mut bound = vec![false; rule.vars.len()];
    let mut remaining: Vec<usize> =
        (0..rule.body.len()).filter(|&i| !matches!(rule.body[i], CAtom::Equal { .. })).collect();
    let mut order = Vec::new();
    if let Some(d) = delta_atom {
        remaining.retain(|&i| i != d);
        order.push(d);
        rule.body[d].vars().for_each(|v| bound[v] = true);
    }
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &i)| (ctx.estimate(&rule.body[i], &bound), i))
            .expect("non-empty");
        let next = remaining.remove(pos);
        rule.body[next].vars().for_each(|v| bound[v] = true);
        order.push(next);
    }

    let mut checks_after = vec![Vec::new(); order.len()];
    let mut seen = vec![false; rule.vars.len()];
    let mut pending: Vec<usize> =
        (0..rule.body.len()).filter(|&i| matches!(rule.body[i], CAtom::Equal { .. })).collect();
    for (depth, &atom) in order.iter().enumerate() {
        rule.body[atom].vars().for_each(|v| seen[v] = true);
        pending.retain(|&b| {
            if rule.body[b].vars().all(|v| seen[v]) {
                checks_after[depth].push(b);
                false
            } else {
                true
            }
        });
    }
    if let Some(last) = checks_after.last_mut() {
        last.append(&mut pending);
    }
    Pass { order, windows, delta_atom, delta, checks_after }
}

fn builtin_holds(atom: &CAtom, binding: &[Option<TermId>], ctx: &Ctx<'_>) -> bool {
    let CAtom::Equal { a, b } = atom else { return true };
    let value = |x: CArg| match x {
        CArg::Const(id) => Some(id),
        CArg::Var(v) => binding[v],
    };
    match (value(*a), value(*b)) {
        (Some(x), Some(y)) => ctx.equal(x, y),
        _ => false,
    }
}

fn join(
    rule: &CompiledRule,
    ctx: &Ctx<'_>,
    pass: &Pass<'_>,
    depth: usize,
    binding: &mut Vec<Option<TermId>>,
    out: &mut Vec<Vec<TermId>>,
) {
    if depth == pass.order.len() {
        out.push(binding.iter().map(|b| b.expect("safe rules bind every variable")).collect());
        return;
    }
    let atom_index = pass.order[depth];
    let atom = &rule.body[atom_index];
    let delta = if pass.delta_atom == Some(atom_index) { pass.delta } else { None };
    let window = pass.windows[atom_index];
    for t in ctx.candidates(atom, binding, delta) {
        if delta.is_none() && !ctx.admits(window, &t) {
            continue;
        }
        let mut trail = Vec::new();
        let ok = match atom {
            CAtom::Class { arg, .. } => unify(*arg, t[0], binding, &mut trail),
            CAtom::Prop { s, o, folded, .. } => {
                unify(*s, t[0], binding, &mut trail) && (folded.is_some() || unify(*o, t[2], binding, &mut trail))
            }
            CAtom::Equal { .. } => unreachable!("builtins are never joined"),
        };
        if ok && pass.checks_after[depth].iter().all(|&b| builtin_holds(&rule.body[b], binding, ctx)) {
            join(rule, ctx, pass, depth + 1, binding, out);
        }
        for v in trail {
            binding[v] = None;
        }
    }
}

fn compile(rule: &Rule, graph: &mut Graph, schema: &OntologySchema, string_match: StringMatch) -> CompiledRule {
    let mut vars: Vec<String> = Vec::new();
    let mut arg = |a: &Arg, graph: &mut Graph| match a {
        Arg::Var(name) => CArg::Var(match vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                vars.push(name.clone());
                vars.len() - 1
            }
        }),
        Arg::Const(term) => CArg::Const(graph.intern(term.clone())),
    };
    let mut body = Vec::new();
    for atom in &rule.body {
        let compiled = match atom.kind {
            AtomKind::Class => {
                let classes = match schema.descendants_of(&atom.predicate) {
                    Ok(set) => set.into_iter().collect(),
                    Err(_) => vec![atom.predicate.clone()],
                };
                CAtom::Class {
                    classes: classes.into_iter().map(|c| graph.intern(Term::iri(c))).collect(),
                    arg: arg(&atom.args[0], graph),
                }
            }
            AtomKind::Property => {
                let folded = match (&atom.args[1], string_match) {
                    (Arg::Const(Term::Literal(lit)), StringMatch::CaseInsensitive)
                        if lit.datatype() == Datatype::String =>
                    {
                        Some(lit.lexical().to_lowercase())
                    }
                    _ => None,
                };
                CAtom::Prop {
                    pred: graph.intern(Term::iri(atom.predicate.clone())),
                    s: arg(&atom.args[0], graph),
                    o: arg(&atom.args[1], graph),
                    folded,
                }
            }
            AtomKind::Builtin => CAtom::Equal { a: arg(&atom.args[0], graph), b: arg(&atom.args[1], graph) },
        };
        body.push(compiled);
    }
    let type_id = graph.intern(Term::iri(vocab::RDF_TYPE));
    let head = rule
        .head
        .iter()
        .map(|atom| match atom.kind {
            AtomKind::Class => {
                (arg(&atom.args[0], graph), type_id, CArg::Const(graph.intern(Term::iri(atom.predicate.clone()))))
            }
            _ => {
                (arg(&atom.args[0], graph), graph.intern(Term::iri(atom.predicate.clone())), arg(&atom.args[1], graph))
            }
        })
        .collect();
    CompiledRule { vars, body, head }
}

/// Ground body instances of one rule in one round.
fn fire(rule: &CompiledRule, ctx: &Ctx<'_>, strategy: Strategy, round: usize, delta: &[IdTriple]) -> Vec<Vec<TermId>> {
    let mut out = Vec::new();
    let mut binding = vec![None; rule.vars.len()];
    let joinable: Vec<usize> = (0..rule.body.len()).filter(|&i| !matches!(rule.body[i], CAtom::Equal { .. })).collect();
    if strategy == Strategy::Naive || round == 1 {
        let pass = plan(rule, ctx, None, None, vec![Window::Any; rule.body.len()]);
        join(rule, ctx, &pass, 0, &mut binding, &mut out);
        return out;
    }
    let newest = round - 1;
    for &i in &joinable {
        let windows = (0..rule.body.len())
            .map(|j| match j.cmp(&i) {
                std::cmp::Ordering::Less => Window::Older(newest),
                std::cmp::Ordering::Equal => Window::Exactly(newest),
                std::cmp::Ordering::Greater => Window::Any,
            })
            .collect();
        let pass = plan(rule, ctx, Some(i), Some(delta), windows);
        join(rule, ctx, &pass, 0, &mut binding, &mut out);
    }
    out
}

/// Forward chains `rules` over `graph` to the least fixpoint.
pub fn apply_rules_with(
    graph: &Graph,
    rules: &[Rule],
    schema: &OntologySchema,
    options: &EngineOptions,
) -> InferenceResult {
    let mut work = graph.clone();
    let compiled: Vec<CompiledRule> =
        rules.iter().map(|r| compile(r, &mut work, schema, options.string_match)).collect();
    let type_id = work.intern(Term::iri(vocab::RDF_TYPE));

    let mut round_of: HashMap<IdTriple, usize> = work.iter_ids().map(|t| (t, 0)).collect();
    let mut delta: Vec<IdTriple> = work.iter_ids().collect();
    let mut order: Vec<IdTriple> = Vec::new();
    let mut provenance: HashMap<IdTriple, Vec<(usize, Vec<TermId>)>> = HashMap::new();
    let mut seen_firings: HashSet<(usize, Vec<TermId>)> = HashSet::new();
    let mut round = 0;

    loop {
        round += 1;
        let firings = {
            let ctx = Ctx { graph: &work, type_id, round_of: &round_of, string_match: options.string_match };
            let indices: Vec<usize> = (0..compiled.len()).collect();
            par::map(options.exec, &indices, |&r| fire(&compiled[r], &ctx, options.strategy, round, &delta))
        };

        let mut fresh: Vec<IdTriple> = Vec::new();
        let mut fresh_set: HashSet<IdTriple> = HashSet::new();
        for (r, instances) in firings.into_iter().enumerate() {
            for values in instances {
                if !seen_firings.insert((r, values.clone())) {
                    continue;
                }
                for &(s, p, o) in &compiled[r].head {
                    let get = |a: CArg| match a {
                        CArg::Const(id) => id,
                        CArg::Var(v) => values[v],
                    };
                    let t = [get(s), p, get(o)];
                    if !work.term(t[0]).is_iri() {
                        continue;
                    }
                    if round_of.get(&t) == Some(&0) {
                        continue;
                    }
                    let entry = provenance.entry(t).or_default();
                    if !entry.iter().any(|(rr, vv)| *rr == r && *vv == values) {
                        entry.push((r, values.clone()));
                    }
                    if !round_of.contains_key(&t) && fresh_set.insert(t) {
                        fresh.push(t);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for &t in &fresh {
            work.insert_ids(t);
            round_of.insert(t, round);
            order.push(t);
        }
        delta = fresh;
    }

    let derived: Vec<DerivedFact> = order
        .iter()
        .map(|t| DerivedFact {
            triple: work.resolve(*t),
            provenance: provenance[t]
                .iter()
                .map(|(r, values)| Provenance {
                    rule_id: rules[*r].id.clone(),
                    bindings: compiled[*r]
                        .vars
                        .iter()
                        .zip(values)
                        .map(|(name, id)| (name.clone(), work.term(*id).clone()))
                        .collect::<BTreeMap<_, _>>(),
                })
                .collect(),
        })
        .collect();
    let index = derived.iter().enumerate().map(|(i, d)| (d.triple.clone(), i)).collect();
    let violations = check_consistency(&work, schema);
    InferenceResult { graph: work, derived, violations, rules: rules.to_vec(), rounds: round, index }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::build_schema;
    use crate::rules::parse_rules;
    use crate::turtle::{parse_turtle_into, PrefixTable};

    fn ttl(text: &str) -> Graph {
        parse_turtle_into(text, &mut PrefixTable::standard()).unwrap()
    }

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(vocab::vbd(s)), Term::iri(vocab::vbd(p)), o)
    }

    #[test]
    fn malaria_symptoms_fire() {
        let graph = ttl(":patient a owl:Class .\n:p1 a :patient ; :has_Fever_WithChills true ; :has_Headache true ; :has_Nausea true .");
        let rules = parse_rules("patient(?p) ^ has_Fever_WithChills(?p, true) ^ has_Headache(?p, true) ^has_Nausea(?p, true) -> has_SymptomOf_Malaria(?P, true)").unwrap();
        let result = apply_rules(&graph, &rules, &build_schema(&graph).unwrap());
        let fact = t("p1", "has_SymptomOf_Malaria", Term::boolean(true));
        assert_eq!(result.derived.len(), 1);
        let why = explain(&result, &fact).unwrap();
        assert_eq!(why.len(), 1);
        assert_eq!(why[0].1["p"], Term::iri(vocab::vbd("p1")));
    }

    #[test]
    fn no_match_leaves_graph_unchanged() {
        let graph = ttl(":p1 a :patient .");
        let rules = parse_rules("patient(?p) ^ has_Fever(?p, true) -> sick(?p, true)").unwrap();
        let result = apply_rules(&graph, &rules, &OntologySchema::default());
        assert!(result.derived.is_empty());
        assert_eq!(result.graph, graph);
    }

    #[test]
    fn explain_distinguishes_asserted_and_absent() {
        let graph = ttl(":p1 a :patient .");
        let result = apply_rules(&graph, &[], &OntologySchema::default());
        let asserted =
            Triple::new(Term::iri(vocab::vbd("p1")), Term::iri(vocab::RDF_TYPE), Term::iri(vocab::vbd("patient")));
        assert!(matches!(explain(&result, &asserted), Err(ExplainError::Asserted(_))));
        let absent = t("p1", "x", Term::boolean(true));
        assert!(matches!(explain(&result, &absent), Err(ExplainError::Absent(_))));
    }

    #[test]
    fn two_rules_same_head_give_two_provenance_entries() {
        let graph = ttl(":p1 a :patient ; :a true ; :b true .");
        let rules = parse_rules(
            "rule A: patient(?p) ^ a(?p, true) -> flag(?p, true)\nrule B: patient(?p) ^ b(?p, true) -> flag(?p, true)",
        )
        .unwrap();
        let result = apply_rules(&graph, &rules, &OntologySchema::default());
        let why = explain(&result, &t("p1", "flag", Term::boolean(true))).unwrap();
        let ids: Vec<&str> = why.iter().map(|(r, _)| r.id.as_str()).collect();
        assert_eq!(ids, vec!["A", "B"]);
    }

    #[test]
    fn chains_across_rounds_and_uses_subclasses() {
        let graph = ttl(":inpatient rdfs:subClassOf :patient .\n:p1 a :inpatient ; :has_Fever true .");
        let schema = build_schema(&graph).unwrap();
        let rules = parse_rules(
            "patient(?p) ^ has_Fever(?p, true) -> febrile(?p, true)\nfebrile(?p, true) -> needs_Test(?p, true)\nneeds_Test(?p, true) -> tested_patient(?p)",
        )
        .unwrap();
        let semi = apply_rules(&graph, &rules, &schema);
        assert_eq!(semi.derived.len(), 3);
        assert!(semi.graph.contains(&Triple::new(
            Term::iri(vocab::vbd("p1")),
            Term::iri(vocab::RDF_TYPE),
            Term::iri(vocab::vbd("tested_patient"))
        )));
        let naive = apply_rules_with(
            &graph,
            &rules,
            &schema,
            &EngineOptions { strategy: Strategy::Naive, ..Default::default() },
        );
        assert_eq!(semi.graph, naive.graph);
        assert!(semi.rounds >= 4);
    }

    #[test]
    fn equal_builtin_is_case_insensitive_unless_strict() {
        let graph = ttl(":p2 a :patient ; :has_ME_Result \"Positive\" ; :is_Positive_For_PVivax true .");
        let rules = parse_rules("patient(?p) ^ has_ME_Result(?p, ?v1) ^ is_Positive_For_PVivax(?p, true)^swrlb:equal(?v1, \"positive\") -> has_PVivax_Malaria(?p, true)").unwrap();
        let lenient = apply_rules(&graph, &rules, &OntologySchema::default());
        assert_eq!(lenient.derived.len(), 1);
        let strict = apply_rules_with(
            &graph,
            &rules,
            &OntologySchema::default(),
            &EngineOptions { string_match: StringMatch::Strict, ..Default::default() },
        );
        assert!(strict.derived.is_empty());
    }

    #[test]
    fn string_constants_in_property_atoms_fold_case() {
        let graph = ttl(":p a :patient ; :has_RDT_Result \"negative\" .");
        let rules = parse_rules("patient(?p) ^ has_RDT_Result(?p, \"Negative\") -> flag(?p, true)").unwrap();
        assert_eq!(apply_rules(&graph, &rules, &OntologySchema::default()).derived.len(), 1);
        let strict = apply_rules_with(
            &graph,
            &rules,
            &OntologySchema::default(),
            &EngineOptions { string_match: StringMatch::Strict, ..Default::default() },
        );
        assert!(strict.derived.is_empty());
    }

    #[test]
    fn literal_bound_head_subject_is_skipped() {
        let graph = ttl(":a :p \"x\" .");
        let rules = parse_rules("p(?s, ?o) -> q(?o, ?s)").unwrap();
        let result = apply_rules(&graph, &rules, &OntologySchema::default());
        assert!(result.derived.is_empty());
    }

    #[test]
    fn rederiving_an_asserted_fact_adds_nothing() {
        let graph = ttl(":p a :patient ; :flag true .");
        let rules = parse_rules("patient(?p) -> flag(?p, true)").unwrap();
        let result = apply_rules(&graph, &rules, &OntologySchema::default());
        assert!(result.derived.is_empty());
        assert_eq!(result.graph.len(), 2);
    }

    #[test]
    fn repeated_variables_must_agree() {
        let graph = ttl(":a :knows :a .\n:a :knows :b .");
        let rules = parse_rules("knows(?x, ?x) -> self_aware(?x, true)").unwrap();
        let result = apply_rules(&graph, &rules, &OntologySchema::default());
        assert_eq!(result.derived.len(), 1);
    }
}
