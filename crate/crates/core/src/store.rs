//! In-memory triple store.
//!
//! Terms are interned to `u32` ids and every triple is kept in three sorted
//! orderings (subject-, predicate- and object-first) so that any pattern with
//! at least one bound position is answered by a range scan.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Bound;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("malformed triple: {0}")]
    MalformedTriple(String),
    #[error("invalid {datatype} literal {lexical:?}")]
    InvalidLiteral { lexical: String, datatype: Datatype },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Boolean,
    Integer,
    Decimal,
}

impl Datatype {
    pub fn iri(self) -> &'static str {
        match self {
            Datatype::String => vocab::XSD_STRING,
            Datatype::Boolean => vocab::XSD_BOOLEAN,
            Datatype::Integer => vocab::XSD_INTEGER,
            Datatype::Decimal => vocab::XSD_DECIMAL,
        }
    }

    pub fn from_iri(iri: &str) -> Option<Datatype> {
        match iri {
            vocab::XSD_STRING => Some(Datatype::String),
            vocab::XSD_BOOLEAN => Some(Datatype::Boolean),
            vocab::XSD_INTEGER => Some(Datatype::Integer),
            vocab::XSD_DECIMAL => Some(Datatype::Decimal),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Boolean => "boolean",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
        }
    }

    pub fn from_name(name: &str) -> Option<Datatype> {
        match name {
            "string" => Some(Datatype::String),
            "boolean" => Some(Datatype::Boolean),
            "integer" => Some(Datatype::Integer),
            "decimal" => Some(Datatype::Decimal),
            _ => None,
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A typed literal. The lexical form is canonicalized on construction, so
/// `"01"^^integer` and `"1"^^integer` are the same literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: &str, datatype: Datatype) -> Result<Literal, StoreError> {
        let invalid = || StoreError::InvalidLiteral { lexical: lexical.to_string(), datatype };
        let lexical = match datatype {
            Datatype::String => lexical.to_string(),
            Datatype::Boolean => match lexical {
                "true" | "1" => "true".to_string(),
                "false" | "0" => "false".to_string(),
                _ => return Err(invalid()),
            },
            Datatype::Integer => lexical.parse::<i64>().map_err(|_| invalid())?.to_string(),
            Datatype::Decimal => canonical_decimal(lexical).ok_or_else(invalid)?,
        };
        Ok(Literal { lexical, datatype })
    }

    pub fn string(value: impl Into<String>) -> Literal {
        Literal { lexical: value.into(), datatype: Datatype::String }
    }

    pub fn boolean(value: bool) -> Literal {
        Literal { lexical: value.to_string(), datatype: Datatype::Boolean }
    }

    pub fn integer(value: i64) -> Literal {
        Literal { lexical: value.to_string(), datatype: Datatype::Integer }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn as_bool(&self) -> Option<bool> {
        match (self.datatype, self.lexical.as_str()) {
            (Datatype::Boolean, "true") => Some(true),
            (Datatype::Boolean, "false") => Some(false),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self.datatype {
            Datatype::Integer => self.lexical.parse().ok(),
            _ => None,
        }
    }
}

fn canonical_decimal(text: &str) -> Option<String> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let int_part = int_part.trim_start_matches('0');
    let frac_part = frac_part.trim_end_matches('0');
    let int_part = if int_part.is_empty() { "0" } else { int_part };
    let frac_part = if frac_part.is_empty() { "0" } else { frac_part };
    let zero = int_part == "0" && frac_part == "0";
    let sign = if negative && !zero { "-" } else { "" };
    Some(format!("{sign}{int_part}.{frac_part}"))
}

/// An RDF term. Labeled blank nodes are carried as IRIs with a `_:` prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Term {
        Term::Iri(iri.into())
    }

    pub fn string(value: impl Into<String>) -> Term {
        Term::Literal(Literal::string(value))
    }

    pub fn boolean(value: bool) -> Term {
        Term::Literal(Literal::boolean(value))
    }

    pub fn integer(value: i64) -> Term {
        Term::Literal(Literal::integer(value))
    }

    pub fn decimal(lexical: &str) -> Result<Term, StoreError> {
        Literal::new(lexical, Datatype::Decimal).map(Term::Literal)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Iri(_) => None,
            Term::Literal(lit) => Some(lit),
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Iri(iri) if iri.starts_with("_:"))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) if iri.starts_with("_:") => f.write_str(iri),
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(lit) => match lit.datatype {
                Datatype::String => write!(f, "{:?}", lit.lexical),
                _ => f.write_str(&lit.lexical),
            },
        }
    }
}

/// JSON form: `{"iri": ...}` or `{"value": ..., "datatype": ...}`.
impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(if self.is_iri() { 1 } else { 2 }))?;
        match self {
            Term::Iri(iri) => map.serialize_entry("iri", iri)?,
            Term::Literal(lit) => {
                map.serialize_entry("value", &lit.lexical)?;
                map.serialize_entry("datatype", &lit.datatype)?;
            }
        }
        map.end()
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Term {
        Term::Literal(lit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Triple {
        Triple { subject, predicate, object }
    }

    /// Checks that subject and predicate are non-empty IRIs and that the
    /// predicate is not a blank node.
    pub fn validate(&self) -> Result<(), StoreError> {
        match &self.subject {
            Term::Literal(_) => return Err(StoreError::MalformedTriple(format!("literal subject {}", self.subject))),
            Term::Iri(iri) if iri.is_empty() => return Err(StoreError::MalformedTriple("empty subject IRI".into())),
            Term::Iri(_) => {}
        }
        match &self.predicate {
            Term::Iri(iri) if iri.is_empty() || iri.starts_with("_:") => {
                Err(StoreError::MalformedTriple(format!("invalid predicate {:?}", iri)))
            }
            Term::Iri(_) => Ok(()),
            Term::Literal(_) => Err(StoreError::MalformedTriple(format!("literal predicate {}", self.predicate))),
        }?;
        if let Term::Iri(iri) = &self.object {
            if iri.is_empty() {
                return Err(StoreError::MalformedTriple("empty object IRI".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

pub type TermId = u32;

/// Id-level triple in subject, predicate, object order.
pub type IdTriple = [TermId; 3];

#[derive(Debug, Clone, Default)]
struct Interner {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl Interner {
    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term table overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }
}

/// A set of triples with subject-, predicate- and object-first indexes.
#[derive(Clone, Default)]
pub struct Graph {
    interner: Interner,
    spo: BTreeSet<IdTriple>,
    pos: BTreeSet<IdTriple>,
    osp: BTreeSet<IdTriple>,
}

fn prefix_range<'a>(set: &'a BTreeSet<IdTriple>, prefix: &[TermId]) -> impl Iterator<Item = &'a IdTriple> {
    let mut lo = [TermId::MIN; 3];
    let mut hi = [TermId::MAX; 3];
    lo[..prefix.len()].copy_from_slice(prefix);
    hi[..prefix.len()].copy_from_slice(prefix);
    set.range((Bound::Included(lo), Bound::Included(hi)))
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    /// Adds a triple; `Ok(true)` when it was not already present.
    pub fn insert(&mut self, triple: Triple) -> Result<bool, StoreError> {
        triple.validate()?;
        let ids = [
            self.interner.intern(triple.subject),
            self.interner.intern(triple.predicate),
            self.interner.intern(triple.object),
        ];
        Ok(self.insert_ids(ids))
    }

    /// Id-level insert. The ids must come from this graph's term table and
    /// form a well-formed triple.
    pub fn insert_ids(&mut self, [s, p, o]: IdTriple) -> bool {
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        match self.ids_of(triple) {
            Some(ids) => self.remove_ids(ids),
            None => false,
        }
    }

    pub fn remove_ids(&mut self, [s, p, o]: IdTriple) -> bool {
        if !self.spo.remove(&[s, p, o]) {
            return false;
        }
        self.pos.remove(&[p, o, s]);
        self.osp.remove(&[o, s, p]);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.ids_of(triple).is_some_and(|ids| self.spo.contains(&ids))
    }

    pub fn contains_ids(&self, ids: IdTriple) -> bool {
        self.spo.contains(&ids)
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    /// Interns a term without adding any triple.
    pub fn intern(&mut self, term: Term) -> TermId {
        self.interner.intern(term)
    }

    pub fn term_id(&self, term: &Term) -> Option<TermId> {
        self.interner.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.interner.terms[id as usize]
    }

    pub fn resolve(&self, [s, p, o]: IdTriple) -> Triple {
        Triple::new(self.term(s).clone(), self.term(p).clone(), self.term(o).clone())
    }

    fn ids_of(&self, triple: &Triple) -> Option<IdTriple> {
        Some([self.term_id(&triple.subject)?, self.term_id(&triple.predicate)?, self.term_id(&triple.object)?])
    }

    /// Id-level pattern match; results are in subject, predicate, object order.
    pub fn match_ids(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> Vec<IdTriple> {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                if self.spo.contains(&[s, p, o]) {
                    vec![[s, p, o]]
                } else {
                    Vec::new()
                }
            }
            (Some(s), Some(p), None) => prefix_range(&self.spo, &[s, p]).copied().collect(),
            (Some(s), None, Some(o)) => prefix_range(&self.osp, &[o, s]).map(|&[o, s, p]| [s, p, o]).collect(),
            (Some(s), None, None) => prefix_range(&self.spo, &[s]).copied().collect(),
            (None, Some(p), Some(o)) => prefix_range(&self.pos, &[p, o]).map(|&[p, o, s]| [s, p, o]).collect(),
            (None, Some(p), None) => prefix_range(&self.pos, &[p]).map(|&[p, o, s]| [s, p, o]).collect(),
            (None, None, Some(o)) => prefix_range(&self.osp, &[o]).map(|&[o, s, p]| [s, p, o]).collect(),
            (None, None, None) => self.spo.iter().copied().collect(),
        }
    }

    /// Number of triples matching an id pattern, without materializing them.
    pub fn count_ids(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => usize::from(self.spo.contains(&[s, p, o])),
            (Some(s), Some(p), None) => prefix_range(&self.spo, &[s, p]).count(),
            (Some(s), None, Some(o)) => prefix_range(&self.osp, &[o, s]).count(),
            (Some(s), None, None) => prefix_range(&self.spo, &[s]).count(),
            (None, Some(p), Some(o)) => prefix_range(&self.pos, &[p, o]).count(),
            (None, Some(p), None) => prefix_range(&self.pos, &[p]).count(),
            (None, None, Some(o)) => prefix_range(&self.osp, &[o]).count(),
            (None, None, None) => self.spo.len(),
        }
    }

    /// Triples agreeing with the pattern on every bound position. A bound
    /// term that never occurs in the graph matches nothing.
    pub fn match_pattern(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Vec<Triple> {
        let lookup = |t: Option<&Term>| match t {
            None => Some(None),
            Some(term) => self.term_id(term).map(Some),
        };
        let (Some(s), Some(p), Some(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return Vec::new();
        };
        self.match_ids(s, p, o).into_iter().map(|ids| self.resolve(ids)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&ids| self.resolve(ids))
    }

    pub fn iter_ids(&self) -> impl Iterator<Item = IdTriple> + '_ {
        self.spo.iter().copied()
    }

    /// All triples in a canonical (term-ordered) set, independent of
    /// interning order.
    pub fn triple_set(&self) -> BTreeSet<Triple> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn extend_from(&mut self, other: &Graph) {
        for ids in other.iter_ids() {
            let [s, p, o] = ids.map(|id| self.interner.intern(other.term(id).clone()));
            self.insert_ids([s, p, o]);
        }
    }

    /// Checks that the three indexes hold exactly the same triples.
    pub fn indexes_consistent(&self) -> bool {
        let from_pos: BTreeSet<IdTriple> = self.pos.iter().map(|&[p, o, s]| [s, p, o]).collect();
        let from_osp: BTreeSet<IdTriple> = self.osp.iter().map(|&[o, s, p]| [s, p, o]).collect();
        from_pos == self.spo && from_osp == self.spo
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Graph) -> bool {
        self.len() == other.len() && self.triple_set() == other.triple_set()
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Triple> for Graph {
    /// Panics on a malformed triple.
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Graph {
        let mut graph = Graph::new();
        for triple in iter {
            graph.insert(triple).expect("well-formed triple");
        }
        graph
    }
}
