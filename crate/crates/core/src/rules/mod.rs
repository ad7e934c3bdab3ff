//! Horn rules in the SWRL surface syntax, forward chained to a fixpoint.
//!
//! A rule is `body -> head` with atoms joined by `^`. One-argument atoms are
//! class atoms, two-argument atoms are property atoms, and `swrlb:equal` is
//! the only builtin. Derivations carry the rule and variable bindings that
//! produced them.

mod consistency;
mod engine;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::store::Term;

pub use consistency::{check_consistency, Violation, ViolationKind};
pub use engine::{
    apply_rules, apply_rules_with, explain, DerivedFact, EngineOptions, ExplainError, InferenceResult, Provenance,
    Strategy, StringMatch,
};
pub use parse::{parse_rules, RuleParseError, RuleParser, RuleWarning};

/// A variable name (lowercased, without `?`) or a constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Const(Term),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(name) => write!(f, "?{name}"),
            Arg::Const(term) => write!(f, "{term}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomKind {
    Class,
    Property,
    Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Builtin {
    Equal,
}

impl Builtin {
    pub const EQUAL_NAME: &'static str = "swrlb:equal";

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Equal => Self::EQUAL_NAME,
        }
    }
}

/// One atom. `predicate` is the class or property IRI, or the builtin name.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub kind: AtomKind,
    pub predicate: String,
    pub args: Vec<Arg>,
}

impl Atom {
    pub fn class(class: impl Into<String>, arg: Arg) -> Atom {
        Atom { kind: AtomKind::Class, predicate: class.into(), args: vec![arg] }
    }

    pub fn property(property: impl Into<String>, subject: Arg, object: Arg) -> Atom {
        Atom { kind: AtomKind::Property, predicate: property.into(), args: vec![subject, object] }
    }

    pub fn equal(left: Arg, right: Arg) -> Atom {
        Atom { kind: AtomKind::Builtin, predicate: Builtin::EQUAL_NAME.to_string(), args: vec![left, right] }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            Arg::Var(v) => Some(v.as_str()),
            Arg::Const(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            AtomKind::Builtin => self.predicate.as_str(),
            _ => crate::vocab::local_name(&self.predicate),
        };
        write!(f, "{name}(")?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match arg {
                Arg::Const(Term::Iri(iri)) => f.write_str(crate::vocab::local_name(iri))?,
                other => write!(f, "{other}")?,
            }
        }
        f.write_str(")")
    }
}

/// Where a rule comes from in the shipped corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSource {
    Table2,
    Table3,
    Table4,
    Prose,
    User,
}

impl RuleSource {
    pub fn from_name(name: &str) -> RuleSource {
        match name {
            "table2" => RuleSource::Table2,
            "table3" => RuleSource::Table3,
            "table4" => RuleSource::Table4,
            "prose" => RuleSource::Prose,
            _ => RuleSource::User,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleSource::Table2 => "table2",
            RuleSource::Table3 => "table3",
            RuleSource::Table4 => "table4",
            RuleSource::Prose => "prose",
            RuleSource::User => "user",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub body: Vec<Atom>,
    pub head: Vec<Atom>,
    pub source: RuleSource,
    /// Comment lines directly above the rule in its file.
    pub note: Option<String>,
    /// The rule line as written, without its label.
    pub text: String,
    /// 1-based line in the source text.
    pub line: usize,
}

impl Rule {
    /// Variables bound by class and property atoms in the body.
    pub fn bound_variables(&self) -> BTreeSet<&str> {
        self.body.iter().filter(|a| a.kind != AtomKind::Builtin).flat_map(Atom::variables).collect()
    }

    pub fn body_variables(&self) -> BTreeSet<&str> {
        self.body.iter().flat_map(Atom::variables).collect()
    }

    /// Class and property IRIs referenced anywhere in the rule.
    pub fn predicates(&self) -> BTreeSet<&str> {
        self.body
            .iter()
            .chain(&self.head)
            .filter(|a| a.kind != AtomKind::Builtin)
            .map(|a| a.predicate.as_str())
            .collect()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |atoms: &[Atom]| atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(" ^ ");
        write!(f, "{} -> {}", join(&self.body), join(&self.head))
    }
}

/// Variable name (without `?`) to bound term.
pub type Bindings = BTreeMap<String, Term>;
