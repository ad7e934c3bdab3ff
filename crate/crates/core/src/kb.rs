//! The shipped knowledge base: ontology, rule corpus, lexicon, patient
//! fixtures and the suggestion bucket table, loaded and cross-validated.
//!
//! Layout of a knowledge-base directory:
//!
//! ```text
//! ontology.ttl          schema and individuals
//! rules/<source>.rules  table2, table3, table4, prose
//! lexicon/              dictionary, stopwords, vocabulary, mapping, abbreviations
//! fixtures/*.ttl        named patient graphs
//! buckets.tsv           derived predicate -> suggestion bucket
//! queries/*.rq          benchmark queries (optional)
//! bench/*.ttl           benchmark datasets (optional)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::metrics::{MetricsReport, Population};
use crate::ontology::{build_schema, validate_bfo_alignment, MetricCounts, OntologySchema};
use crate::query::{parse_query_with, Query};
use crate::rules::{AtomKind, Rule, RuleParser, RuleSource};
use crate::store::{Graph, Term};
use crate::text::{Lexicon, LexiconError, MappingTarget};
use crate::turtle::{parse_turtle_into, PrefixTable};
use crate::vocab;

pub const ONTOLOGY_FILE: &str = "ontology.ttl";
pub const RULES_DIR: &str = "rules";
pub const LEXICON_DIR: &str = "lexicon";
pub const FIXTURES_DIR: &str = "fixtures";
pub const BUCKETS_FILE: &str = "buckets.tsv";
pub const QUERIES_DIR: &str = "queries";
pub const BENCH_DIR: &str = "bench";

/// A load failure, located by file and 1-based line (0 when the problem has
/// no single line).
#[derive(Debug, Error)]
#[error("{}{}: {message}", file.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
pub struct KbError {
    pub file: PathBuf,
    pub line: Option<usize>,
    pub message: String,
}

impl KbError {
    fn at(file: &Path, line: Option<usize>, message: impl Into<String>) -> KbError {
        KbError { file: file.to_path_buf(), line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bucket {
    Suspected,
    RecommendedTests,
    Prescriptions,
    Findings,
    Duration,
    DayOfCourse,
}

impl Bucket {
    pub fn from_name(name: &str) -> Option<Bucket> {
        Some(match name {
            "suspected" => Bucket::Suspected,
            "recommended_tests" => Bucket::RecommendedTests,
            "prescriptions" => Bucket::Prescriptions,
            "findings" => Bucket::Findings,
            "duration" => Bucket::Duration,
            "day_of_course" => Bucket::DayOfCourse,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketEntry {
    pub bucket: Bucket,
    /// Disease class, for `suspected` rows.
    pub disease: Option<String>,
}

/// Predicate IRI to suggestion bucket.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BucketTable {
    entries: BTreeMap<String, BucketEntry>,
}

impl BucketTable {
    pub fn parse(text: &str, prefixes: &PrefixTable, file: &Path) -> Result<BucketTable, KbError> {
        let mut table = BucketTable::default();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let expand = |name: &str| {
                expand_curie(name, prefixes)
                    .ok_or_else(|| KbError::at(file, Some(n), format!("cannot expand `{name}`")))
            };
            let (predicate, bucket, disease) = match cols.as_slice() {
                [p, b] => (expand(p)?, *b, None),
                [p, b, d] => (expand(p)?, *b, Some(expand(d)?)),
                _ => return Err(KbError::at(file, Some(n), "expected `predicate<TAB>bucket[<TAB>disease]`")),
            };
            let bucket = Bucket::from_name(bucket)
                .ok_or_else(|| KbError::at(file, Some(n), format!("unknown bucket `{bucket}`")))?;
            if (bucket == Bucket::Suspected) != disease.is_some() {
                return Err(KbError::at(
                    file,
                    Some(n),
                    "a disease column is required for, and only for, suspected rows",
                ));
            }
            if table.entries.insert(predicate.clone(), BucketEntry { bucket, disease }).is_some() {
                return Err(KbError::at(file, Some(n), format!("<{predicate}> is listed twice")));
            }
        }
        Ok(table)
    }

    pub fn get(&self, predicate: &str) -> Option<&BucketEntry> {
        self.entries.get(predicate)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BucketEntry)> {
        self.entries.iter().map(|(p, e)| (p.as_str(), e))
    }

    /// First predicate mapped to `bucket`.
    pub fn predicate_for(&self, bucket: Bucket) -> Option<&str> {
        self.iter().find(|(_, e)| e.bucket == bucket).map(|(p, _)| p)
    }
}

fn expand_curie(text: &str, prefixes: &PrefixTable) -> Option<String> {
    if let Some(iri) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Some(iri.to_string());
    }
    let (prefix, local) = text.split_once(':')?;
    prefixes.expand(prefix, local)
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    pub dir: PathBuf,
    pub ontology: Graph,
    pub prefixes: PrefixTable,
    pub schema: OntologySchema,
    pub rules: Vec<Rule>,
    pub lexicon: Lexicon,
    pub fixtures: BTreeMap<String, Graph>,
    pub buckets: BucketTable,
}

impl KnowledgeBase {
    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// The six disease classes with their labels, sorted by label.
    pub fn diseases(&self) -> Vec<(String, String)> {
        let root = vocab::vbd("vector_borne_disease");
        let label = Term::iri(vocab::RDFS_LABEL);
        let mut out: Vec<(String, String)> = self
            .schema
            .subclass_edges()
            .iter()
            .filter(|(_, parent)| *parent == root)
            .map(|(class, _)| {
                let name = self
                    .ontology
                    .match_pattern(Some(&Term::iri(class)), Some(&label), None)
                    .into_iter()
                    .find_map(|t| t.object.as_literal().map(|l| l.lexical().to_string()))
                    .unwrap_or_else(|| vocab::local_name(class).to_string());
                (class.clone(), name)
            })
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1));
        out
    }

    /// The ontology graph plus every fixture.
    pub fn graph_with_fixtures(&self) -> Graph {
        let mut graph = self.ontology.clone();
        for fixture in self.fixtures.values() {
            graph.extend_from(fixture);
        }
        graph
    }
}

fn read(file: &Path) -> Result<String, KbError> {
    fs::read_to_string(file).map_err(|e| KbError::at(file, None, e.to_string()))
}

/// Files in `dir` with extension `ext`, sorted by name. A missing directory
/// yields an empty list.
fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, KbError> {
    let entries = match fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(KbError::at(dir, None, e.to_string())),
    };
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| KbError::at(dir, None, e.to_string()))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Line of the first occurrence of `needle` in `text`.
fn line_of(text: &str, needle: &str) -> Option<usize> {
    text.lines().position(|l| l.contains(needle)).map(|i| i + 1)
}

fn is_declared(schema: &OntologySchema, iri: &str) -> bool {
    schema.has_class(iri) || schema.is_property(iri)
}

/// Reads and validates the knowledge base under `dir`.
pub fn load_kb(dir: &Path) -> Result<KnowledgeBase, KbError> {
    let ontology_file = dir.join(ONTOLOGY_FILE);
    if !ontology_file.is_file() {
        return Err(KbError::at(&ontology_file, None, "missing ontology file"));
    }
    let ontology_text = read(&ontology_file)?;
    let mut prefixes = PrefixTable::standard();
    let ontology = parse_turtle_into(&ontology_text, &mut prefixes)
        .map_err(|e| KbError::at(&ontology_file, Some(e.line), e.to_string()))?;
    let schema = build_schema(&ontology).map_err(|e| KbError::at(&ontology_file, None, e.to_string()))?;
    if let Some(w) = schema.warnings().first() {
        return Err(KbError::at(&ontology_file, None, w.clone()));
    }
    let misaligned = validate_bfo_alignment(&schema).map_err(|e| KbError::at(&ontology_file, None, e.to_string()))?;
    if let Some(v) = misaligned.first() {
        let local = vocab::local_name(&v.class);
        return Err(KbError::at(
            &ontology_file,
            line_of(&ontology_text, &format!(":{local} ")),
            format!("class <{}> does not descend from continuant or occurrent", v.class),
        ));
    }

    let rules = load_rules(&dir.join(RULES_DIR), &prefixes, &schema)?;

    let lexicon_dir = dir.join(LEXICON_DIR);
    let lexicon = Lexicon::load(&lexicon_dir).map_err(|e| match e {
        LexiconError::Invalid { file, line, message } => KbError::at(&file, Some(line), message),
        LexiconError::Io { file, source } => KbError::at(&file, None, source.to_string()),
    })?;
    let mapping_file = lexicon_dir.join(crate::text::MAPPING_FILE);
    if let Some(concept) = lexicon.unmapped_concepts().into_iter().next() {
        return Err(KbError::at(&mapping_file, None, format!("concept <{concept}> has no mapping")));
    }
    let mapping_text = read(&mapping_file)?;
    for (concept, target) in lexicon.mapping() {
        let (iri, declared) = match target {
            MappingTarget::Property { predicate, .. } => (predicate, schema.is_property(predicate)),
            MappingTarget::Class { class } => (class, schema.has_class(class)),
        };
        if !declared {
            return Err(KbError::at(
                &mapping_file,
                line_of(&mapping_text, vocab::local_name(concept)),
                format!("<{iri}> is not declared in the ontology"),
            ));
        }
    }

    let mut fixtures = BTreeMap::new();
    for file in files_with_extension(&dir.join(FIXTURES_DIR), "ttl")? {
        let text = read(&file)?;
        let graph = parse_turtle_into(&text, &mut prefixes.clone())
            .map_err(|e| KbError::at(&file, Some(e.line), e.to_string()))?;
        check_fixture(&graph, &schema, &text, &file)?;
        fixtures.insert(stem(&file), graph);
    }

    let buckets_file = dir.join(BUCKETS_FILE);
    let buckets_text = read(&buckets_file)?;
    let buckets = BucketTable::parse(&buckets_text, &prefixes, &buckets_file)?;
    for (predicate, entry) in buckets.iter() {
        let line = line_of(&buckets_text, vocab::local_name(predicate));
        if !schema.is_property(predicate) {
            return Err(KbError::at(&buckets_file, line, format!("<{predicate}> is not a declared property")));
        }
        if let Some(d) = &entry.disease {
            if !schema.has_class(d) {
                return Err(KbError::at(&buckets_file, line, format!("<{d}> is not a declared class")));
            }
        }
    }

    Ok(KnowledgeBase { dir: dir.to_path_buf(), ontology, prefixes, schema, rules, lexicon, fixtures, buckets })
}

fn load_rules(dir: &Path, prefixes: &PrefixTable, schema: &OntologySchema) -> Result<Vec<Rule>, KbError> {
    let files = files_with_extension(dir, "rules")?;
    if files.is_empty() {
        return Err(KbError::at(dir, None, "no .rules files"));
    }
    let mut rules: Vec<Rule> = Vec::new();
    let mut ids: BTreeMap<String, PathBuf> = BTreeMap::new();
    for file in files {
        let source = RuleSource::from_name(&stem(&file));
        if source == RuleSource::User {
            return Err(KbError::at(&file, None, "rule files must be named table2, table3, table4 or prose"));
        }
        let text = read(&file)?;
        let (parsed, _) = RuleParser::new(prefixes.clone(), source)
            .parse(&text)
            .map_err(|e| KbError::at(&file, Some(e.line()), e.to_string()))?;
        for rule in parsed {
            let here = Some(rule.line);
            if let Some(previous) = ids.insert(rule.id.clone(), file.clone()) {
                return Err(KbError::at(
                    &file,
                    here,
                    format!("rule id {} is already used in {}", rule.id, previous.display()),
                ));
            }
            for atom in rule.body.iter().chain(&rule.head) {
                let ok = match atom.kind {
                    AtomKind::Class => schema.has_class(&atom.predicate),
                    AtomKind::Property => schema.is_property(&atom.predicate),
                    AtomKind::Builtin => true,
                };
                if !ok {
                    return Err(KbError::at(
                        &file,
                        here,
                        format!("rule {} uses undeclared predicate <{}>", rule.id, atom.predicate),
                    ));
                }
            }
            if source == RuleSource::Prose && rule.note.as_deref().is_none_or(|n| n.trim().is_empty()) {
                return Err(KbError::at(&file, here, format!("prose rule {} has no basis note", rule.id)));
            }
            rules.push(rule);
        }
    }
    Ok(rules)
}

fn check_fixture(graph: &Graph, schema: &OntologySchema, text: &str, file: &Path) -> Result<(), KbError> {
    let rdf_type = vocab::RDF_TYPE;
    for t in graph.iter() {
        let Some(p) = t.predicate.as_iri() else { continue };
        let (iri, ok) = if p == rdf_type {
            match t.object.as_iri() {
                Some(class) => (class, schema.has_class(class)),
                None => (p, false),
            }
        } else {
            (p, is_declared(schema, p))
        };
        if !ok {
            return Err(KbError::at(
                file,
                line_of(text, vocab::local_name(iri)),
                format!("<{iri}> is not declared in the ontology"),
            ));
        }
    }
    Ok(())
}

/// Census of a loaded knowledge base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KbReport {
    pub class_count: usize,
    pub rules_by_source: BTreeMap<String, usize>,
    pub rule_count: usize,
    pub fixtures: Vec<String>,
    pub diseases: Vec<String>,
    pub counts: MetricCounts,
    pub metrics: Option<MetricsReport>,
}

pub fn kb_report(kb: &KnowledgeBase) -> KbReport {
    let mut rules_by_source = BTreeMap::new();
    for rule in &kb.rules {
        *rules_by_source.entry(rule.source.name().to_string()).or_insert(0) += 1;
    }
    let counts = kb.schema.count_metrics(&kb.ontology);
    KbReport {
        class_count: kb.schema.classes().len(),
        rules_by_source,
        rule_count: kb.rules.len(),
        fixtures: kb.fixtures.keys().cloned().collect(),
        diseases: kb.diseases().into_iter().map(|(_, label)| label).collect(),
        counts,
        metrics: MetricsReport::compute(counts, Population::Inferred).ok(),
    }
}

impl fmt::Display for KbReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classes\t{}", self.class_count)?;
        writeln!(f, "rules\t{}", self.rule_count)?;
        for (source, n) in &self.rules_by_source {
            writeln!(f, "rules.{source}\t{n}")?;
        }
        writeln!(f, "fixtures\t{}", self.fixtures.join(","))?;
        writeln!(f, "diseases\t{}", self.diseases.join(","))?;
        if let Some(m) = &self.metrics {
            for (name, value) in m.rows() {
                writeln!(f, "{name}\t{value:.6}")?;
            }
        }
        Ok(())
    }
}

/// Named queries from `dir/*.rq`, sorted by file name.
pub fn load_queries(dir: &Path, prefixes: &PrefixTable) -> Result<Vec<(String, Query)>, KbError> {
    let mut out = Vec::new();
    for file in files_with_extension(dir, "rq")? {
        let text = read(&file)?;
        let query = parse_query_with(&text, &mut prefixes.clone()).map_err(|e| {
            let line = match &e {
                crate::query::QueryError::Syntax { line, .. } => Some(*line),
                _ => None,
            };
            KbError::at(&file, line, e.to_string())
        })?;
        out.push((stem(&file), query));
    }
    Ok(out)
}

/// Named Turtle graphs from `dir/*.ttl`, sorted by file name.
pub fn load_graphs(dir: &Path, prefixes: &PrefixTable) -> Result<Vec<(String, Graph)>, KbError> {
    let mut out = Vec::new();
    for file in files_with_extension(dir, "ttl")? {
        let text = read(&file)?;
        let graph = parse_turtle_into(&text, &mut prefixes.clone())
            .map_err(|e| KbError::at(&file, Some(e.line), e.to_string()))?;
        out.push((stem(&file), graph));
    }
    Ok(out)
}
