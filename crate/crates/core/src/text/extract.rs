use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::segment::{split_sentences, tokenize, Token, TokenKind};
use super::spell::spell_correct;
use super::{expand_name, lexicon_prefixes, Lexicon, MappingTarget};
use crate::par::{self, ExecMode};
use crate::store::{Term, Triple};
use crate::vocab;

/// A vocabulary phrase found in text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityMention {
    pub concept: String,
    /// The vocabulary phrase that matched, words joined by spaces.
    pub phrase: String,
    /// Byte span of the matched tokens.
    pub begin: usize,
    pub end: usize,
    /// True when some token only matched after spell correction.
    pub corrected: bool,
    /// True when the mention falls in the scope of a negation cue, as in
    /// "no rash" or "denies joint pain".
    pub negated: bool,
}

const NEGATION_CUES: &[&str] = &["no", "not", "nor", "never", "without", "denies", "denied", "deny", "absence"];
const SCOPE_BREAKS: &[&str] = &["but", "however", "although", "though", "except", "yet"];
/// Word tokens a cue reaches past itself.
const NEGATION_WINDOW: usize = 5;

/// Marks tokens inside the scope of a preceding negation cue in the same
/// sentence. A scope ends after a few words, at a contrastive conjunction,
/// or at punctuation other than a comma.
fn negation_scope(tokens: &[Token]) -> Vec<bool> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut remaining = 0usize;
    for t in tokens {
        let word = t.text.as_str();
        if t.kind == TokenKind::Word {
            if SCOPE_BREAKS.contains(&word) {
                remaining = 0;
                out.push(false);
            } else if NEGATION_CUES.contains(&word) || word.ends_with("n't") {
                remaining = NEGATION_WINDOW;
                out.push(false);
            } else {
                out.push(remaining > 0);
                remaining = remaining.saturating_sub(1);
            }
        } else {
            if word != "," {
                remaining = 0;
            }
            out.push(remaining > 0);
        }
    }
    out
}

/// Words each token may stand for: itself when known, else its nearest
/// dictionary words.
fn readings(tokens: &[Token], lexicon: &Lexicon) -> Vec<(HashSet<String>, bool)> {
    tokens
        .iter()
        .map(|t| {
            if t.kind != TokenKind::Word || lexicon.contains_word(&t.text) {
                return (HashSet::from([t.text.clone()]), false);
            }
            let candidates = spell_correct(&t.text, lexicon);
            let best = candidates.first().map_or(0, |c| c.distance);
            let words = candidates.into_iter().take_while(|c| c.distance == best).map(|c| c.word).collect();
            (words, true)
        })
        .collect()
}

/// Greedy longest match, left to right, against the phrase vocabulary.
/// Spell correction is consulted for tokens not in the dictionary. Among
/// equally long matches the one needing fewer corrections wins, then the
/// lexicographically first phrase.
pub fn extract_entities(tokens: &[Token], lexicon: &Lexicon) -> Vec<EntityMention> {
    let readings = readings(tokens, lexicon);
    let negated = negation_scope(tokens);
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut best: Option<(usize, usize, &[String], &str)> = None;
        for first in &readings[i].0 {
            for (phrase, concept) in lexicon.phrases_starting_with(first) {
                let n = phrase.len();
                if i + n > tokens.len() {
                    continue;
                }
                let fits = phrase.iter().enumerate().all(|(k, w)| readings[i + k].0.contains(w));
                if !fits {
                    continue;
                }
                let corrections = (i..i + n).filter(|&k| readings[k].1).count();
                let better = match best {
                    None => true,
                    Some((bn, bc, bp, _)) => {
                        (n, std::cmp::Reverse(corrections), std::cmp::Reverse(phrase))
                            > (bn, std::cmp::Reverse(bc), std::cmp::Reverse(bp))
                    }
                };
                if better {
                    best = Some((n, corrections, phrase, concept));
                }
            }
        }
        match best {
            Some((n, corrections, phrase, concept)) => {
                out.push(EntityMention {
                    concept: concept.to_string(),
                    phrase: phrase.join(" "),
                    begin: tokens[i].begin,
                    end: tokens[i + n - 1].end,
                    corrected: corrections > 0,
                    negated: negated[i],
                });
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Mentions across a whole note, with offsets into `text`.
pub fn extract_text(text: &str, lexicon: &Lexicon) -> Vec<EntityMention> {
    split_sentences(text, lexicon)
        .into_iter()
        .flat_map(|s| {
            let tokens = tokenize(&s.text);
            extract_entities(&tokens, lexicon).into_iter().map(move |mut m| {
                m.begin += s.begin;
                m.end += s.begin;
                m
            })
        })
        .collect()
}

/// Drops stopword tokens, except those inside a vocabulary phrase match
/// (the `of` in "loss of appetite").
pub fn remove_stopwords(tokens: &[Token], lexicon: &Lexicon) -> Vec<Token> {
    let protected: Vec<(usize, usize)> =
        extract_entities(tokens, lexicon).into_iter().map(|m| (m.begin, m.end)).collect();
    tokens
        .iter()
        .filter(|t| !lexicon.is_stopword(&t.text) || protected.iter().any(|&(b, e)| t.begin >= b && t.end <= e))
        .cloned()
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmitError {
    #[error("no mapping for concept(s): {}", .0.join(", "))]
    Unmapped(Vec<String>),
}

/// Patient facts for the mentioned concepts: one `rdf:type :patient` triple
/// followed by the mapped triples in sorted order. A concept mentioned only
/// under negation yields `false` for a boolean property and nothing
/// otherwise; one affirmed mention outweighs any negated ones.
pub fn emit_rdf(mentions: &[EntityMention], patient: &str, lexicon: &Lexicon) -> Result<Vec<Triple>, EmitError> {
    let mut concepts: BTreeMap<&str, bool> = BTreeMap::new();
    for m in mentions {
        *concepts.entry(m.concept.as_str()).or_insert(false) |= !m.negated;
    }
    let unmapped: Vec<String> =
        concepts.keys().filter(|c| !lexicon.mapping().contains_key(**c)).map(|c| c.to_string()).collect();
    if !unmapped.is_empty() {
        return Err(EmitError::Unmapped(unmapped));
    }
    let subject = Term::iri(patient);
    let typed = Triple::new(subject.clone(), Term::iri(vocab::RDF_TYPE), Term::iri(vocab::vbd("patient")));
    let facts: BTreeSet<Triple> = concepts
        .into_iter()
        .filter_map(|(c, affirmed)| match &lexicon.mapping()[c] {
            MappingTarget::Property { predicate, value } if affirmed => {
                Some(Triple::new(subject.clone(), Term::iri(predicate.clone()), value.clone()))
            }
            MappingTarget::Property { predicate, value } if *value == Term::boolean(true) => {
                Some(Triple::new(subject.clone(), Term::iri(predicate.clone()), Term::boolean(false)))
            }
            MappingTarget::Class { class } if affirmed => {
                Some(Triple::new(subject.clone(), Term::iri(vocab::RDF_TYPE), Term::iri(class.clone())))
            }
            _ => None,
        })
        .filter(|t| *t != typed)
        .collect();
    Ok(std::iter::once(typed).chain(facts).collect())
}

/// One gold-annotated sentence of the evaluation corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub disease: String,
    pub text: String,
    pub gold: BTreeSet<String>,
}

impl AnnotatedSentence {
    /// Reads `disease TAB sentence TAB concept;concept;...` lines.
    pub fn parse_corpus(text: &str) -> Result<Vec<AnnotatedSentence>, String> {
        let prefixes = lexicon_prefixes();
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [disease, sentence, gold] = cols.as_slice() else {
                return Err(format!("line {}: expected 3 tab-separated columns", n + 1));
            };
            let gold = gold
                .split(';')
                .map(str::trim)
                .filter(|g| !g.is_empty())
                .map(|g| expand_name(g, &prefixes).ok_or_else(|| format!("line {}: cannot expand `{g}`", n + 1)))
                .collect::<Result<_, _>>()?;
            out.push(AnnotatedSentence {
                disease: disease.trim().to_string(),
                text: sentence.trim().to_string(),
                gold,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionRow {
    pub disease: String,
    pub sentences: usize,
    /// Distinct concepts extracted, summed over sentences.
    pub extracted: usize,
    /// Extracted concepts that are in the gold set.
    pub matching: usize,
    pub gold: usize,
    /// `matching / extracted`, in percent.
    pub precision: f64,
    /// `matching / gold`, in percent.
    pub recall: f64,
}

impl ExtractionRow {
    fn new(disease: String) -> ExtractionRow {
        ExtractionRow { disease, sentences: 0, extracted: 0, matching: 0, gold: 0, precision: 100.0, recall: 100.0 }
    }

    fn add(&mut self, extracted: usize, matching: usize, gold: usize) {
        self.sentences += 1;
        self.extracted += extracted;
        self.matching += matching;
        self.gold += gold;
        let pct = |a: usize, b: usize| if b == 0 { 100.0 } else { 100.0 * a as f64 / b as f64 };
        self.precision = pct(self.matching, self.extracted);
        self.recall = pct(self.matching, self.gold);
    }
}

/// Per-disease extraction scores plus an overall row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionReport {
    pub rows: Vec<ExtractionRow>,
    pub total: ExtractionRow,
}

impl fmt::Display for ExtractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<24} {:>9} {:>8} {:>6} {:>10} {:>7}",
            "disease", "extracted", "matching", "gold", "precision%", "recall%"
        )?;
        for r in self.rows.iter().chain(std::iter::once(&self.total)) {
            writeln!(
                f,
                "{:<24} {:>9} {:>8} {:>6} {:>10.1} {:>7.1}",
                r.disease, r.extracted, r.matching, r.gold, r.precision, r.recall
            )?;
        }
        Ok(())
    }
}

/// Scores extraction against gold concept sets, one sentence at a time.
pub fn evaluate_extraction(corpus: &[AnnotatedSentence], lexicon: &Lexicon, exec: ExecMode) -> ExtractionReport {
    let found: Vec<BTreeSet<String>> =
        par::map(exec, corpus, |s| extract_text(&s.text, lexicon).into_iter().map(|m| m.concept).collect());
    let mut rows: BTreeMap<&str, ExtractionRow> = BTreeMap::new();
    let mut total = ExtractionRow::new("all".to_string());
    for (sentence, extracted) in corpus.iter().zip(&found) {
        let matching = extracted.intersection(&sentence.gold).count();
        rows.entry(&sentence.disease).or_insert_with(|| ExtractionRow::new(sentence.disease.clone())).add(
            extracted.len(),
            matching,
            sentence.gold.len(),
        );
        total.add(extracted.len(), matching, sentence.gold.len());
    }
    ExtractionReport { rows: rows.into_values().collect(), total }
}
