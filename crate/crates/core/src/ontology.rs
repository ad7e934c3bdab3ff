//! Schema view over a graph: classes, the subclass hierarchy, properties,
//! individuals and disjointness, plus upper-ontology alignment checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::store::{Datatype, Graph, Term};
use crate::vocab;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("subclass cycle through {}", .0.join(" -> "))]
    SubclassCycle(Vec<String>),
    #[error("unknown class <{0}>")]
    UnknownClass(String),
    #[error("upper-ontology root <{0}> is not declared")]
    MissingRoot(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ObjectProperty {
    pub domain: Option<String>,
    pub range: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DataProperty {
    pub domain: Option<String>,
    pub range: Option<Datatype>,
}

/// Asserted schema of a graph. Ancestor sets are precomputed at build time.
#[derive(Debug, Clone, Default)]
pub struct OntologySchema {
    classes: BTreeSet<String>,
    subclass_edges: BTreeSet<(String, String)>,
    object_properties: BTreeMap<String, ObjectProperty>,
    data_properties: BTreeMap<String, DataProperty>,
    annotation_properties: BTreeSet<String>,
    individuals: BTreeMap<String, BTreeSet<String>>,
    disjoint_pairs: BTreeSet<(String, String)>,
    ancestors: BTreeMap<String, BTreeSet<String>>,
    warnings: Vec<String>,
}

/// Raw counts feeding the quality metrics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MetricCounts {
    pub class_count: usize,
    pub subclassof_count: usize,
    pub object_property_count: usize,
    pub data_property_count: usize,
    pub individual_count: usize,
    pub disjoint_classes_count: usize,
    pub annotation_count: usize,
    pub axiom_count: usize,
    /// Classes with at least one member, counting members of subclasses.
    pub populated_class_count: usize,
    /// Classes with at least one directly asserted member.
    pub populated_class_count_direct: usize,
}

impl MetricCounts {
    /// All properties: object plus data.
    pub fn property_count(&self) -> usize {
        self.object_property_count + self.data_property_count
    }
}

const META_CLASSES: &[&str] = &[
    vocab::OWL_CLASS,
    vocab::OWL_OBJECT_PROPERTY,
    vocab::OWL_DATATYPE_PROPERTY,
    vocab::OWL_ANNOTATION_PROPERTY,
    vocab::OWL_NAMED_INDIVIDUAL,
    vocab::OWL_ONTOLOGY,
];

fn iris_with_type<'g>(graph: &'g Graph, class: &str) -> impl Iterator<Item = String> + 'g {
    graph
        .match_pattern(None, Some(&Term::iri(vocab::RDF_TYPE)), Some(&Term::iri(class)))
        .into_iter()
        .filter_map(|t| t.subject.as_iri().map(str::to_string))
}

fn iri_pairs(graph: &Graph, predicate: &str) -> Vec<(String, String)> {
    graph
        .match_pattern(None, Some(&Term::iri(predicate)), None)
        .into_iter()
        .filter_map(|t| Some((t.subject.as_iri()?.to_string(), t.object.as_iri()?.to_string())))
        .collect()
}

fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Builds the schema view of `graph`.
///
/// Classes are everything declared `owl:Class` plus every IRI appearing on
/// either side of `rdfs:subClassOf` or `owl:disjointWith`. Individuals are
/// subjects typed with a non-meta class. Memberships in undeclared classes are
/// dropped and reported in [`OntologySchema::warnings`].
pub fn build_schema(graph: &Graph) -> Result<OntologySchema, OntologyError> {
    let mut schema = OntologySchema::default();

    schema.classes.extend(iris_with_type(graph, vocab::OWL_CLASS));
    for (child, parent) in iri_pairs(graph, vocab::RDFS_SUBCLASS_OF) {
        schema.classes.insert(child.clone());
        schema.classes.insert(parent.clone());
        schema.subclass_edges.insert((child, parent));
    }
    for (a, b) in iri_pairs(graph, vocab::OWL_DISJOINT_WITH) {
        schema.classes.insert(a.clone());
        schema.classes.insert(b.clone());
        schema.disjoint_pairs.insert(ordered_pair(&a, &b));
    }

    let domain_of = |p: &str| -> Option<String> {
        graph
            .match_pattern(Some(&Term::iri(p)), Some(&Term::iri(vocab::RDFS_DOMAIN)), None)
            .into_iter()
            .find_map(|t| t.object.as_iri().map(str::to_string))
    };
    let range_of = |p: &str| -> Option<String> {
        graph
            .match_pattern(Some(&Term::iri(p)), Some(&Term::iri(vocab::RDFS_RANGE)), None)
            .into_iter()
            .find_map(|t| t.object.as_iri().map(str::to_string))
    };
    for p in iris_with_type(graph, vocab::OWL_OBJECT_PROPERTY) {
        let prop = ObjectProperty { domain: domain_of(&p), range: range_of(&p) };
        schema.object_properties.insert(p, prop);
    }
    for p in iris_with_type(graph, vocab::OWL_DATATYPE_PROPERTY) {
        let range = range_of(&p);
        let range_tag = range.as_deref().and_then(Datatype::from_iri);
        if let (Some(r), None) = (&range, range_tag) {
            schema.warnings.push(format!("data property <{p}> has unsupported range <{r}>"));
        }
        let prop = DataProperty { domain: domain_of(&p), range: range_tag };
        schema.data_properties.insert(p, prop);
    }
    schema.annotation_properties.extend(iris_with_type(graph, vocab::OWL_ANNOTATION_PROPERTY));

    for t in graph.match_pattern(None, Some(&Term::iri(vocab::RDF_TYPE)), None) {
        let (Some(subject), Some(class)) = (t.subject.as_iri(), t.object.as_iri()) else {
            continue;
        };
        if class == vocab::OWL_NAMED_INDIVIDUAL {
            schema.individuals.entry(subject.to_string()).or_default();
            continue;
        }
        if META_CLASSES.contains(&class) {
            continue;
        }
        let entry = schema.individuals.entry(subject.to_string()).or_default();
        if schema.classes.contains(class) {
            entry.insert(class.to_string());
        } else {
            schema.warnings.push(format!("<{subject}> is typed with undeclared class <{class}>"));
        }
    }

    schema.ancestors = closure(&schema.classes, &schema.subclass_edges)?;
    Ok(schema)
}

/// Reflexive-transitive ancestor sets; fails on any cycle.
fn closure(
    classes: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Result<BTreeMap<String, BTreeSet<String>>, OntologyError> {
    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (child, parent) in edges {
        parents.entry(child).or_default().push(parent);
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    fn visit<'a>(
        class: &'a str,
        parents: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        out: &mut BTreeMap<String, BTreeSet<String>>,
        path: &mut Vec<&'a str>,
    ) -> Result<(), OntologyError> {
        match marks.get(class) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => {
                let start = path.iter().position(|c| *c == class).unwrap_or(0);
                let mut cycle: Vec<String> = path[start..].iter().map(|c| c.to_string()).collect();
                cycle.push(class.to_string());
                return Err(OntologyError::SubclassCycle(cycle));
            }
            None => {}
        }
        marks.insert(class, Mark::Active);
        path.push(class);
        let mut set = BTreeSet::from([class.to_string()]);
        for parent in parents.get(class).into_iter().flatten() {
            visit(parent, parents, marks, out, path)?;
            set.extend(out[*parent].iter().cloned());
        }
        path.pop();
        marks.insert(class, Mark::Done);
        out.insert(class.to_string(), set);
        Ok(())
    }

    for class in classes {
        visit(class, &parents, &mut marks, &mut out, &mut Vec::new())?;
    }
    Ok(out)
}

impl OntologySchema {
    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn subclass_edges(&self) -> &BTreeSet<(String, String)> {
        &self.subclass_edges
    }

    pub fn object_properties(&self) -> &BTreeMap<String, ObjectProperty> {
        &self.object_properties
    }

    pub fn data_properties(&self) -> &BTreeMap<String, DataProperty> {
        &self.data_properties
    }

    pub fn annotation_properties(&self) -> &BTreeSet<String> {
        &self.annotation_properties
    }

    /// Individual to its asserted (declared) classes.
    pub fn individuals(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.individuals
    }

    /// Unordered pairs, stored smaller IRI first.
    pub fn disjoint_pairs(&self) -> &BTreeSet<(String, String)> {
        &self.disjoint_pairs
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.classes.contains(class)
    }

    pub fn is_property(&self, iri: &str) -> bool {
        self.object_properties.contains_key(iri) || self.data_properties.contains_key(iri)
    }

    /// Reflexive-transitive subclass test.
    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> Result<bool, OntologyError> {
        let ancestors = self.ancestors_of(sub)?;
        if !self.classes.contains(sup) {
            return Err(OntologyError::UnknownClass(sup.to_string()));
        }
        Ok(ancestors.contains(sup))
    }

    /// `class` and every class above it.
    pub fn ancestors_of(&self, class: &str) -> Result<&BTreeSet<String>, OntologyError> {
        self.ancestors.get(class).ok_or_else(|| OntologyError::UnknownClass(class.to_string()))
    }

    /// `class` and every class below it.
    pub fn descendants_of(&self, class: &str) -> Result<BTreeSet<String>, OntologyError> {
        if !self.classes.contains(class) {
            return Err(OntologyError::UnknownClass(class.to_string()));
        }
        Ok(self.ancestors.iter().filter(|(_, up)| up.contains(class)).map(|(c, _)| c.clone()).collect())
    }

    /// Direct members of `class`, or members of `class` and all its
    /// subclasses when `inferred` is set.
    pub fn instances_of(&self, class: &str, inferred: bool) -> Result<BTreeSet<String>, OntologyError> {
        if !self.classes.contains(class) {
            return Err(OntologyError::UnknownClass(class.to_string()));
        }
        Ok(self
            .individuals
            .iter()
            .filter(|(_, types)| {
                if inferred {
                    types.iter().any(|t| self.ancestors[t].contains(class))
                } else {
                    types.contains(class)
                }
            })
            .map(|(i, _)| i.clone())
            .collect())
    }

    /// Classes with at least one member under the given reading.
    pub fn populated_classes(&self, inferred: bool) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for types in self.individuals.values() {
            for t in types {
                if inferred {
                    out.extend(self.ancestors[t].iter().cloned());
                } else {
                    out.insert(t.clone());
                }
            }
        }
        out
    }

    /// Counts of asserted statements. `graph` must be the graph the schema
    /// was built from.
    pub fn count_metrics(&self, graph: &Graph) -> MetricCounts {
        let annotation_predicates: BTreeSet<&str> = [vocab::RDFS_LABEL, vocab::RDFS_COMMENT]
            .into_iter()
            .chain(self.annotation_properties.iter().map(String::as_str))
            .collect();
        let annotation_count =
            annotation_predicates.iter().map(|p| graph.match_pattern(None, Some(&Term::iri(*p)), None).len()).sum();
        let disjoint_classes_count = graph.match_pattern(None, Some(&Term::iri(vocab::OWL_DISJOINT_WITH)), None).len();
        MetricCounts {
            class_count: self.classes.len(),
            subclassof_count: self.subclass_edges.len(),
            object_property_count: self.object_properties.len(),
            data_property_count: self.data_properties.len(),
            individual_count: self.individuals.len(),
            disjoint_classes_count,
            annotation_count,
            axiom_count: graph.len(),
            populated_class_count: self.populated_classes(true).len(),
            populated_class_count_direct: self.populated_classes(false).len(),
        }
    }

    /// Every class that does not reach `roots.entity` through either
    /// `roots.continuant` or `roots.occurrent`.
    pub fn validate_alignment(&self, roots: &UpperRoots) -> Result<Vec<AlignmentViolation>, OntologyError> {
        for root in [&roots.entity, &roots.continuant, &roots.occurrent] {
            if !self.classes.contains(root) {
                return Err(OntologyError::MissingRoot(root.clone()));
            }
        }
        let branch_ok = |branch: &str| self.ancestors[branch].contains(&roots.entity);
        let continuant_ok = branch_ok(&roots.continuant);
        let occurrent_ok = branch_ok(&roots.occurrent);
        let mut out = Vec::new();
        for class in &self.classes {
            if *class == roots.entity {
                continue;
            }
            let up = &self.ancestors[class];
            let aligned =
                (continuant_ok && up.contains(&roots.continuant)) || (occurrent_ok && up.contains(&roots.occurrent));
            if !aligned {
                out.push(AlignmentViolation {
                    class: class.clone(),
                    parents: self.subclass_edges.iter().filter(|(c, _)| c == class).map(|(_, p)| p.clone()).collect(),
                });
            }
        }
        Ok(out)
    }

    /// Breadth-first reachability, kept alongside the precomputed closure
    /// for diagnostics.
    pub fn path_to(&self, sub: &str, sup: &str) -> Option<Vec<String>> {
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue = VecDeque::from([sub]);
        let mut seen = BTreeSet::from([sub]);
        while let Some(c) = queue.pop_front() {
            if c == sup {
                let mut path = vec![c.to_string()];
                let mut cur = c;
                while let Some(p) = prev.get(cur) {
                    path.push(p.to_string());
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for (child, parent) in &self.subclass_edges {
                if child == c && seen.insert(parent) {
                    prev.insert(parent, c);
                    queue.push_back(parent);
                }
            }
        }
        None
    }
}

/// Alignment check against the knowledge base's upper-ontology roots.
pub fn validate_bfo_alignment(schema: &OntologySchema) -> Result<Vec<AlignmentViolation>, OntologyError> {
    schema.validate_alignment(&UpperRoots::default())
}

/// The three top classes every other class must hang from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperRoots {
    pub entity: String,
    pub continuant: String,
    pub occurrent: String,
}

impl Default for UpperRoots {
    fn default() -> UpperRoots {
        UpperRoots {
            entity: vocab::vbd("entity"),
            continuant: vocab::vbd("continuant"),
            occurrent: vocab::vbd("occurrent"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlignmentViolation {
    pub class: String,
    /// Direct parents, empty for an orphan.
    pub parents: Vec<String>,
}
