use std::collections::BTreeMap;

use serde::Serialize;

use crate::ontology::OntologySchema;
use crate::store::{Graph, Term, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// An individual falls under two classes declared disjoint.
    DisjointMembership,
    /// A boolean property holds both `true` and `false` for one subject.
    ConflictingBoolean,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub message: String,
    /// The triples that conflict.
    pub triples: Vec<Triple>,
}

/// Contradictions in `graph` with respect to `schema`.
pub fn check_consistency(graph: &Graph, schema: &OntologySchema) -> Vec<Violation> {
    let mut out = Vec::new();

    let rdf_type = Term::iri(vocab::RDF_TYPE);
    let mut types: BTreeMap<String, Vec<Triple>> = BTreeMap::new();
    for t in graph.match_pattern(None, Some(&rdf_type), None) {
        if let (Some(s), Some(_)) = (t.subject.as_iri(), t.object.as_iri()) {
            types.entry(s.to_string()).or_default().push(t);
        }
    }
    for (subject, typed) in &types {
        let under = |class: &str| {
            typed.iter().find(|t| {
                let c = t.object.as_iri().expect("filtered above");
                schema.is_subclass_of(c, class).unwrap_or(false)
            })
        };
        for (a, b) in schema.disjoint_pairs() {
            if let (Some(ta), Some(tb)) = (under(a), under(b)) {
                out.push(Violation {
                    kind: ViolationKind::DisjointMembership,
                    subject: subject.clone(),
                    message: format!(
                        "{} is both {} and {}, which are disjoint",
                        vocab::local_name(subject),
                        vocab::local_name(a),
                        vocab::local_name(b)
                    ),
                    triples: vec![ta.clone(), tb.clone()],
                });
            }
        }
    }

    let (yes, no) = (Term::boolean(true), Term::boolean(false));
    for t in graph.match_pattern(None, None, Some(&yes)) {
        let negated = Triple::new(t.subject.clone(), t.predicate.clone(), no.clone());
        if graph.contains(&negated) {
            let subject = t.subject.as_iri().unwrap_or_default().to_string();
            out.push(Violation {
                kind: ViolationKind::ConflictingBoolean,
                message: format!(
                    "{} is both true and false for {}",
                    vocab::local_name(t.predicate.as_iri().unwrap_or_default()),
                    vocab::local_name(&subject)
                ),
                subject,
                triples: vec![t, negated],
            });
        }
    }
    out
}
