//! Patient cases: an append-only event log, the facts graph it folds to, and
//! the suggestions produced by running the rule corpus over it.

mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{Bucket, KnowledgeBase};
use crate::rules::{apply_rules, InferenceResult, Violation};
use crate::store::{Datatype, Graph, Literal, Term, Triple};
use crate::text::nearest_names;
use crate::vocab;

pub use store::{CaseManager, CaseStore, Derivations, LoadedCase};

#[derive(Debug, Error)]
pub enum DssError {
    #[error("case `{0}` already exists")]
    DuplicateCase(String),
    #[error("case `{0}` not found")]
    NotFound(String),
    #[error("invalid case id `{0}`: use 1 to 64 letters, digits, `-` or `_`")]
    InvalidId(String),
    #[error("unknown predicate `{predicate}`{}", did_you_mean(.suggestions))]
    UnknownPredicate { predicate: String, suggestions: Vec<String> },
    #[error("bad object `{object}`: {message}")]
    BadObject { object: String, message: String },
    #[error("event {0} is not an assertion of this case")]
    NotAnAssertion(u64),
    #[error("event {0} is already retracted")]
    AlreadyRetracted(u64),
    #[error("case `{case}` log is corrupt at event {seq}: {message}")]
    Corrupt { case: String, seq: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn did_you_mean(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", suggestions.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    CaseCreated,
    Assertion,
    RetractionMarker,
    InferenceRun,
}

/// One log record. Objects are stored as an IRI (no datatype) or a literal's
/// lexical form plus its datatype IRI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    /// RFC 3339 UTC timestamp, never earlier than the previous event's.
    pub at: String,
    /// Assertion withdrawn by a retraction marker.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<u64>,
}

impl Event {
    /// The asserted triple, for assertion events.
    pub fn triple(&self) -> Option<Triple> {
        let object = match &self.datatype {
            None => Term::iri(self.o.clone()?),
            Some(dt) => Term::Literal(Literal::new(self.o.as_deref()?, Datatype::from_iri(dt)?).ok()?),
        };
        Some(Triple::new(Term::iri(self.s.clone()?), Term::iri(self.p.clone()?), object))
    }
}

fn split_object(term: &Term) -> (String, Option<String>) {
    match term {
        Term::Iri(iri) => (iri.clone(), None),
        Term::Literal(lit) => (lit.lexical().to_string(), Some(lit.datatype().iri().to_string())),
    }
}

pub fn valid_case_id(id: &str) -> bool {
    (1..=64).contains(&id.len()) && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// A predicate and object as entered by a user, before resolution against
/// the knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub p: String,
    pub o: String,
    /// `iri`, a datatype name (`boolean`, `string`, ...) or an `xsd:` name.
    /// Absent means: follow the property's declared range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
}

impl Observation {
    pub fn new(p: &str, o: &str) -> Observation {
        Observation { p: p.to_string(), o: o.to_string(), datatype: None }
    }

    pub fn resolve(&self, kb: &KnowledgeBase) -> Result<(String, Term), DssError> {
        let predicate = resolve_predicate(kb, &self.p)?;
        let object = resolve_object(kb, &predicate, &self.o, self.datatype.as_deref())?;
        Ok((predicate, object))
    }
}

/// Expands `<iri>`, `prefix:local` or a bare local name.
pub fn expand_name(kb: &KnowledgeBase, name: &str) -> Option<String> {
    let name = name.trim();
    if let Some(iri) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
        return Some(iri.to_string());
    }
    if name.starts_with("http://") || name.starts_with("https://") {
        return Some(name.to_string());
    }
    let (prefix, local) = name.split_once(':').unwrap_or(("", name));
    kb.prefixes.expand(prefix, local)
}

/// Resolves a predicate name to a declared property IRI. Unknown names are
/// reported with up to three close declared names.
pub fn resolve_predicate(kb: &KnowledgeBase, name: &str) -> Result<String, DssError> {
    if let Some(iri) = expand_name(kb, name).filter(|iri| kb.schema.is_property(iri)) {
        return Ok(iri);
    }
    let declared: Vec<&str> = kb
        .schema
        .object_properties()
        .keys()
        .chain(kb.schema.data_properties().keys())
        .map(|iri| vocab::local_name(iri))
        .collect();
    let wanted = vocab::local_name(name.trim().trim_start_matches('<').trim_end_matches('>'));
    let wanted = wanted.rsplit(':').next().unwrap_or(wanted);
    Err(DssError::UnknownPredicate {
        predicate: name.to_string(),
        suggestions: nearest_names(wanted, declared, 3).into_iter().map(str::to_string).collect(),
    })
}

/// Builds the object term for `predicate`. Object properties take IRIs; data
/// properties take literals of their declared range unless `datatype` says
/// otherwise.
pub fn resolve_object(
    kb: &KnowledgeBase,
    predicate: &str,
    object: &str,
    datatype: Option<&str>,
) -> Result<Term, DssError> {
    let bad = |message: String| DssError::BadObject { object: object.to_string(), message };
    let literal = |dt: Datatype| {
        let lexical = if dt == Datatype::Boolean { object.trim().to_lowercase() } else { object.to_string() };
        Literal::new(&lexical, dt).map(Term::Literal).map_err(|e| bad(e.to_string()))
    };
    match datatype {
        Some("iri") => expand_name(kb, object).map(Term::iri).ok_or_else(|| bad("cannot expand IRI".into())),
        Some(name) => {
            let dt = Datatype::from_name(name)
                .or_else(|| expand_name(kb, name).and_then(|iri| Datatype::from_iri(&iri)))
                .ok_or_else(|| bad(format!("unknown datatype `{name}`")))?;
            literal(dt)
        }
        None if kb.schema.object_properties().contains_key(predicate) => {
            expand_name(kb, object).map(Term::iri).ok_or_else(|| bad("cannot expand IRI".into()))
        }
        None => match kb.schema.data_properties().get(predicate).and_then(|d| d.range) {
            Some(dt) => literal(dt),
            None if matches!(object, "true" | "false") => literal(Datatype::Boolean),
            None if object.parse::<i64>().is_ok() => literal(Datatype::Integer),
            None => Ok(Term::string(object)),
        },
    }
}

/// A disease whose symptom rule fired for the patient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuspectedDisease {
    pub disease: String,
    pub label: String,
    pub rule_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecommendedTest {
    pub test: String,
    pub rule_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prescription {
    pub drug: String,
    pub duration_days: Option<i64>,
    pub day: Option<i64>,
    pub rule_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub predicate: String,
    pub value: Term,
    pub rule_ids: Vec<String>,
}

/// Derived facts about the patient, sorted into the knowledge base's
/// suggestion buckets. Every entry names the rules that produced it.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Suggestions {
    pub suspected: Vec<SuspectedDisease>,
    pub recommended_tests: Vec<RecommendedTest>,
    pub prescriptions: Vec<Prescription>,
    pub findings: Vec<Finding>,
    pub violations: Vec<Violation>,
}

impl Suggestions {
    pub fn is_empty(&self) -> bool {
        self.suspected.is_empty()
            && self.recommended_tests.is_empty()
            && self.prescriptions.is_empty()
            && self.findings.is_empty()
            && self.violations.is_empty()
    }

    /// Local names of the suspected diseases.
    pub fn suspected_names(&self) -> BTreeSet<&str> {
        self.suspected.iter().map(|s| vocab::local_name(&s.disease)).collect()
    }

    pub fn test_names(&self) -> BTreeSet<&str> {
        self.recommended_tests.iter().map(|t| vocab::local_name(&t.test)).collect()
    }

    pub fn drug_names(&self) -> BTreeSet<&str> {
        self.prescriptions.iter().map(|p| vocab::local_name(&p.drug)).collect()
    }

    pub fn finding_names(&self) -> BTreeSet<&str> {
        self.findings.iter().map(|f| vocab::local_name(&f.predicate)).collect()
    }
}

fn push_rules(into: &mut Vec<String>, from: impl IntoIterator<Item = String>) {
    for id in from {
        if !into.contains(&id) {
            into.push(id);
        }
    }
}

/// Sorts the derived facts about `patient` into suggestion buckets.
pub fn build_suggestions(result: &InferenceResult, patient: &str, kb: &KnowledgeBase) -> Suggestions {
    let labels: BTreeMap<String, String> = kb.diseases().into_iter().collect();
    let integer_of = |subject: &str, bucket: Bucket| {
        let predicate = kb.buckets.predicate_for(bucket)?;
        result
            .graph
            .match_pattern(Some(&Term::iri(subject)), Some(&Term::iri(predicate)), None)
            .into_iter()
            .filter_map(|t| t.object.as_literal().and_then(Literal::as_integer))
            .min()
    };

    let mut suspected: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut tests: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut drugs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut findings: BTreeMap<(String, Term), Vec<String>> = BTreeMap::new();
    for fact in &result.derived {
        let t = &fact.triple;
        if t.subject.as_iri() != Some(patient) {
            continue;
        }
        let Some(entry) = t.predicate.as_iri().and_then(|p| kb.buckets.get(p)) else { continue };
        let rule_ids = fact.provenance.iter().map(|p| p.rule_id.clone());
        match entry.bucket {
            Bucket::Suspected if t.object == Term::boolean(true) => {
                let disease = entry.disease.clone().expect("suspected rows name a disease");
                push_rules(suspected.entry(disease).or_default(), rule_ids);
            }
            Bucket::RecommendedTests => {
                if let Some(test) = t.object.as_iri() {
                    push_rules(tests.entry(test.to_string()).or_default(), rule_ids);
                }
            }
            Bucket::Prescriptions => {
                if let Some(drug) = t.object.as_iri() {
                    push_rules(drugs.entry(drug.to_string()).or_default(), rule_ids);
                }
            }
            Bucket::Findings => {
                let key = (t.predicate.as_iri().unwrap_or_default().to_string(), t.object.clone());
                push_rules(findings.entry(key).or_default(), rule_ids);
            }
            _ => {}
        }
    }

    Suggestions {
        suspected: suspected
            .into_iter()
            .map(|(disease, rule_ids)| SuspectedDisease {
                label: labels.get(&disease).cloned().unwrap_or_else(|| vocab::local_name(&disease).to_string()),
                disease,
                rule_ids,
            })
            .collect(),
        recommended_tests: tests.into_iter().map(|(test, rule_ids)| RecommendedTest { test, rule_ids }).collect(),
        prescriptions: drugs
            .into_iter()
            .map(|(drug, rule_ids)| Prescription {
                duration_days: integer_of(&drug, Bucket::Duration),
                day: integer_of(&drug, Bucket::DayOfCourse),
                drug,
                rule_ids,
            })
            .collect(),
        findings: findings
            .into_iter()
            .map(|((predicate, value), rule_ids)| Finding { predicate, value, rule_ids })
            .collect(),
        violations: result.violations.clone(),
    }
}

/// A case: its log, the facts the log folds to, and the latest inference.
#[derive(Debug, Clone)]
pub struct PatientCase {
    pub id: String,
    pub patient: String,
    events: Vec<Event>,
    facts: Graph,
    last_inference: Option<Arc<InferenceResult>>,
    suggestions: Option<Suggestions>,
}

fn now_after(previous: Option<&Event>) -> String {
    let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true);
    match previous {
        // Same fixed-width UTC format, so string order is time order.
        Some(e) if e.at > now => e.at.clone(),
        _ => now,
    }
}

impl PatientCase {
    /// A new case for `patient` (default: the case id in the KB namespace)
    /// with its demographic facts.
    pub fn create(
        kb: &KnowledgeBase,
        id: &str,
        patient: Option<&str>,
        demographics: &[Observation],
    ) -> Result<PatientCase, DssError> {
        if !valid_case_id(id) {
            return Err(DssError::InvalidId(id.to_string()));
        }
        let patient = match patient {
            Some(name) => expand_name(kb, name).ok_or_else(|| DssError::BadObject {
                object: name.to_string(),
                message: "cannot expand patient IRI".into(),
            })?,
            None => vocab::vbd(id),
        };
        let resolved = demographics.iter().map(|d| d.resolve(kb)).collect::<Result<Vec<_>, _>>()?;
        let mut case = PatientCase {
            id: id.to_string(),
            patient: patient.clone(),
            events: Vec::new(),
            facts: Graph::new(),
            last_inference: None,
            suggestions: None,
        };
        case.push(EventKind::CaseCreated, Some(patient), None, None, None);
        case.rebuild_facts();
        for (p, o) in resolved {
            case.assert_resolved(p, o);
        }
        Ok(case)
    }

    /// Rebuilds a case by folding `events`.
    pub fn replay(id: &str, events: Vec<Event>) -> Result<PatientCase, DssError> {
        let corrupt =
            |seq: u64, message: &str| DssError::Corrupt { case: id.to_string(), seq, message: message.to_string() };
        let first = events.first().ok_or_else(|| corrupt(1, "empty log"))?;
        if first.kind != EventKind::CaseCreated {
            return Err(corrupt(1, "log does not start with case_created"));
        }
        let patient = first.s.clone().ok_or_else(|| corrupt(1, "case_created without a patient"))?;
        let mut retracted = BTreeSet::new();
        for (i, e) in events.iter().enumerate() {
            let expected = i as u64 + 1;
            if e.seq != expected {
                return Err(corrupt(expected, &format!("found seq {}", e.seq)));
            }
            match e.kind {
                EventKind::CaseCreated if i > 0 => return Err(corrupt(e.seq, "second case_created")),
                EventKind::Assertion if e.triple().is_none() => return Err(corrupt(e.seq, "unreadable triple")),
                EventKind::RetractionMarker => {
                    let target = e.target.ok_or_else(|| corrupt(e.seq, "retraction without target"))?;
                    let ok = target < e.seq && events[target as usize - 1].kind == EventKind::Assertion;
                    if !ok || !retracted.insert(target) {
                        return Err(corrupt(e.seq, "retraction of a non-assertion"));
                    }
                }
                _ => {}
            }
        }
        let mut case = PatientCase {
            id: id.to_string(),
            patient,
            events,
            facts: Graph::new(),
            last_inference: None,
            suggestions: None,
        };
        case.rebuild_facts();
        Ok(case)
    }

    fn rebuild_facts(&mut self) {
        let retracted: BTreeSet<u64> = self.events.iter().filter_map(|e| e.target).collect();
        let mut facts = Graph::new();
        facts
            .insert(Triple::new(
                Term::iri(self.patient.clone()),
                Term::iri(vocab::RDF_TYPE),
                Term::iri(vocab::vbd("patient")),
            ))
            .expect("IRI subject");
        for e in &self.events {
            if e.kind == EventKind::Assertion && !retracted.contains(&e.seq) {
                facts.insert(e.triple().expect("validated on replay")).expect("IRI subject");
            }
        }
        self.facts = facts;
    }

    fn push(
        &mut self,
        kind: EventKind,
        s: Option<String>,
        p: Option<String>,
        object: Option<&Term>,
        target: Option<u64>,
    ) -> &Event {
        let (o, datatype) = match object.map(split_object) {
            Some((o, dt)) => (Some(o), dt),
            None => (None, None),
        };
        let event = Event {
            seq: self.events.len() as u64 + 1,
            kind,
            s,
            p,
            o,
            datatype,
            at: now_after(self.events.last()),
            target,
        };
        self.events.push(event);
        self.events.last().expect("just pushed")
    }

    fn assert_resolved(&mut self, predicate: String, object: Term) -> &Event {
        let triple = Triple::new(Term::iri(self.patient.clone()), Term::iri(predicate.clone()), object.clone());
        self.facts.insert(triple).expect("IRI subject");
        self.push(EventKind::Assertion, Some(self.patient.clone()), Some(predicate), Some(&object), None)
    }

    /// Records `(patient, predicate, object)`. The predicate must be declared
    /// in the knowledge base. Conflicting values are accepted and surface as
    /// violations at the next inference.
    pub fn assert_observation(&mut self, kb: &KnowledgeBase, observation: &Observation) -> Result<&Event, DssError> {
        let (predicate, object) = observation.resolve(kb)?;
        Ok(self.assert_resolved(predicate, object))
    }

    /// Withdraws assertion `seq`. The facts graph is rebuilt from the log
    /// without it.
    pub fn retract(&mut self, seq: u64) -> Result<&Event, DssError> {
        match self.events.get((seq as usize).wrapping_sub(1)) {
            Some(e) if e.kind == EventKind::Assertion => {}
            _ => return Err(DssError::NotAnAssertion(seq)),
        }
        if self.events.iter().any(|e| e.target == Some(seq)) {
            return Err(DssError::AlreadyRetracted(seq));
        }
        self.push(EventKind::RetractionMarker, None, None, None, Some(seq));
        self.rebuild_facts();
        Ok(self.events.last().expect("just pushed"))
    }

    /// Runs the rule corpus over the ontology plus this case's facts.
    pub fn run_inference(&mut self, kb: &KnowledgeBase) -> &Suggestions {
        let result = self.infer(kb);
        let summary = Term::string(format!("derived={} violations={}", result.derived.len(), result.violations.len()));
        self.suggestions = Some(build_suggestions(&result, &self.patient, kb));
        self.last_inference = Some(Arc::new(result));
        self.push(EventKind::InferenceRun, None, None, Some(&summary), None);
        self.suggestions.as_ref().expect("just set")
    }

    /// Inference over the current facts without touching the log.
    pub fn infer(&self, kb: &KnowledgeBase) -> InferenceResult {
        let mut graph = kb.ontology.clone();
        graph.extend_from(&self.facts);
        apply_rules(&graph, &kb.rules, &kb.schema)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn facts(&self) -> &Graph {
        &self.facts
    }

    pub fn last_inference(&self) -> Option<&Arc<InferenceResult>> {
        self.last_inference.as_ref()
    }

    pub fn suggestions(&self) -> Option<&Suggestions> {
        self.suggestions.as_ref()
    }
}
