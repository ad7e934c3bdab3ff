//! Decision-support engine for vector-borne disease diagnosis and treatment.
//!
//! Clinical facts live in an indexed RDF [`store`], read and written as
//! Turtle by [`turtle`]. The [`rules`] engine forward-chains Horn rules to a
//! fixpoint with per-fact provenance, [`ontology`] and [`metrics`] describe
//! and score the schema, [`query`] evaluates basic graph patterns, [`text`]
//! turns clinical notes into triples, [`kb`] loads the shipped knowledge base
//! and [`dss`] runs the patient-case workflow on top of all of them.

pub mod dss;
pub mod kb;
pub mod metrics;
pub mod ontology;
pub mod par;
pub mod query;
pub mod rules;
pub mod store;
pub mod text;
pub mod turtle;
pub mod vocab;

pub use store::{Datatype, Graph, Literal, StoreError, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle, PrefixTable, TurtleError};
