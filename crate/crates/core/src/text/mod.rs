//! Clinical note to RDF: sentence splitting, tokenizing, spell correction,
//! dictionary-driven entity extraction and triple emission.

mod extract;
mod segment;
mod spell;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::store::{Datatype, Literal, Term};
use crate::turtle::PrefixTable;
use crate::vocab;

pub use extract::{
    emit_rdf, evaluate_extraction, extract_entities, extract_text, remove_stopwords, AnnotatedSentence, EmitError,
    EntityMention, ExtractionReport, ExtractionRow,
};
pub use segment::{split_sentences, tokenize, Sentence, Token, TokenKind};
pub use spell::{levenshtein, nearest_names, spell_correct, Candidate, MAX_EDIT_DISTANCE};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{}:{line}: {message}", file.display())]
    Invalid { file: PathBuf, line: usize, message: String },
    #[error("{}: {source}", file.display())]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// What an extracted concept becomes in RDF.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MappingTarget {
    /// `(patient, predicate, value)`.
    Property { predicate: String, value: Term },
    /// `(patient, rdf:type, class)`.
    Class { class: String },
}

/// Word lists and the phrase vocabulary. Everything is stored lowercase.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    dictionary: HashMap<String, u64>,
    by_length: BTreeMap<usize, Vec<String>>,
    stopwords: HashSet<String>,
    vocabulary: HashMap<Vec<String>, String>,
    /// Phrases grouped by first word, sorted.
    starts: HashMap<String, Vec<(Vec<String>, String)>>,
    max_phrase_len: usize,
    mapping: BTreeMap<String, MappingTarget>,
    abbreviations: HashSet<String>,
}

/// Raw file contents making up a lexicon.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconSources<'a> {
    /// `word [TAB frequency]` per line.
    pub dictionary: &'a str,
    /// One word per line.
    pub stopwords: &'a str,
    /// `phrase TAB concept` per line.
    pub vocabulary: &'a str,
    /// `concept TAB property TAB predicate [TAB value]` or
    /// `concept TAB class TAB class-iri` per line.
    pub mapping: &'a str,
    /// One abbreviation per line, with or without its final dot.
    pub abbreviations: &'a str,
}

pub const DICTIONARY_FILE: &str = "dictionary.tsv";
pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const VOCABULARY_FILE: &str = "vocabulary.tsv";
pub const MAPPING_FILE: &str = "mapping.tsv";
pub const ABBREVIATIONS_FILE: &str = "abbreviations.txt";

fn lexicon_prefixes() -> PrefixTable {
    let mut prefixes = PrefixTable::standard();
    prefixes.insert("pcd", vocab::PCD);
    prefixes
}

/// Expands `prefix:local` or `<iri>`.
fn expand_name(text: &str, prefixes: &PrefixTable) -> Option<String> {
    if let Some(iri) = text.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
        return Some(iri.to_string());
    }
    let (prefix, local) = text.split_once(':')?;
    prefixes.expand(prefix, local)
}

/// Non-empty, non-comment lines with 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

impl Lexicon {
    /// Reads the five lexicon files from `dir`. The abbreviation list is
    /// optional.
    pub fn load(dir: &Path) -> Result<Lexicon, LexiconError> {
        let read = |name: &str, required: bool| -> Result<String, LexiconError> {
            let file = dir.join(name);
            match fs::read_to_string(&file) {
                Ok(text) => Ok(text),
                Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
                Err(source) => Err(LexiconError::Io { file, source }),
            }
        };
        let dictionary = read(DICTIONARY_FILE, true)?;
        let stopwords = read(STOPWORDS_FILE, true)?;
        let vocabulary = read(VOCABULARY_FILE, true)?;
        let mapping = read(MAPPING_FILE, true)?;
        let abbreviations = read(ABBREVIATIONS_FILE, false)?;
        Lexicon::from_sources(
            LexiconSources {
                dictionary: &dictionary,
                stopwords: &stopwords,
                vocabulary: &vocabulary,
                mapping: &mapping,
                abbreviations: &abbreviations,
            },
            dir,
        )
    }

    /// Builds a lexicon from file contents; `dir` only labels errors.
    pub fn from_sources(src: LexiconSources<'_>, dir: &Path) -> Result<Lexicon, LexiconError> {
        let invalid =
            |name: &str, line: usize, message: String| LexiconError::Invalid { file: dir.join(name), line, message };
        let prefixes = lexicon_prefixes();
        let mut lex = Lexicon::default();

        for (n, line) in lines(src.dictionary) {
            let mut cols = line.split('\t');
            let word = cols.next().unwrap_or_default().trim();
            let freq = match cols.next().map(str::trim) {
                None | Some("") => 1,
                Some(f) => f.parse::<u64>().map_err(|_| invalid(DICTIONARY_FILE, n, format!("bad frequency `{f}`")))?,
            };
            let single = tokenize(word);
            if word != word.to_lowercase() || single.len() != 1 || single[0].kind != TokenKind::Word {
                return Err(invalid(DICTIONARY_FILE, n, format!("`{word}` is not a single lowercase word")));
            }
            if lex.dictionary.insert(word.to_string(), freq).is_none() {
                lex.by_length.entry(word.chars().count()).or_default().push(word.to_string());
            }
        }
        for words in lex.by_length.values_mut() {
            words.sort();
        }

        for (_, line) in lines(src.stopwords) {
            lex.stopwords.insert(line.trim().to_lowercase());
        }
        for (_, line) in lines(src.abbreviations) {
            lex.abbreviations.insert(line.trim().trim_end_matches('.').to_lowercase());
        }

        for (n, line) in lines(src.vocabulary) {
            let Some((phrase, concept)) = line.split_once('\t') else {
                return Err(invalid(VOCABULARY_FILE, n, "expected `phrase<TAB>concept`".into()));
            };
            let concept = expand_name(concept.trim(), &prefixes)
                .ok_or_else(|| invalid(VOCABULARY_FILE, n, format!("cannot expand concept `{}`", concept.trim())))?;
            let tokens = tokenize(phrase);
            if tokens.is_empty() || tokens.iter().any(|t| t.kind != TokenKind::Word) {
                return Err(invalid(VOCABULARY_FILE, n, format!("`{phrase}` must be one or more words")));
            }
            let words: Vec<String> = tokens.into_iter().map(|t| t.text).collect();
            if let Some(w) = words.iter().find(|w| !lex.dictionary.contains_key(*w)) {
                return Err(invalid(VOCABULARY_FILE, n, format!("`{w}` is not in the dictionary")));
            }
            if words.len() == 1 && lex.stopwords.contains(&words[0]) {
                return Err(invalid(VOCABULARY_FILE, n, format!("single-word phrase `{}` is a stopword", words[0])));
            }
            lex.max_phrase_len = lex.max_phrase_len.max(words.len());
            if let Some(previous) = lex.vocabulary.insert(words, concept.clone()) {
                if previous != concept {
                    return Err(invalid(VOCABULARY_FILE, n, format!("`{phrase}` already maps to <{previous}>")));
                }
            }
        }

        for (words, concept) in &lex.vocabulary {
            lex.starts.entry(words[0].clone()).or_default().push((words.clone(), concept.clone()));
        }
        for group in lex.starts.values_mut() {
            group.sort();
        }

        for (n, line) in lines(src.mapping) {
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let expand = |text: &str| {
                expand_name(text, &prefixes).ok_or_else(|| invalid(MAPPING_FILE, n, format!("cannot expand `{text}`")))
            };
            let target = match cols.as_slice() {
                [_, "class", class] => MappingTarget::Class { class: expand(class)? },
                [_, "property", predicate] => {
                    MappingTarget::Property { predicate: expand(predicate)?, value: Term::boolean(true) }
                }
                [_, "property", predicate, value] => {
                    let lit = match *value {
                        "true" | "false" => Literal::new(value, Datatype::Boolean),
                        v if v.parse::<i64>().is_ok() => Literal::new(v, Datatype::Integer),
                        v => Ok(Literal::string(v.trim_matches('"'))),
                    }
                    .map_err(|e| invalid(MAPPING_FILE, n, e.to_string()))?;
                    MappingTarget::Property { predicate: expand(predicate)?, value: Term::Literal(lit) }
                }
                _ => return Err(invalid(MAPPING_FILE, n, "expected `concept<TAB>property|class<TAB>iri`".into())),
            };
            lex.mapping.insert(expand(cols[0])?, target);
        }
        Ok(lex)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.dictionary.contains_key(word)
    }

    pub fn frequency(&self, word: &str) -> Option<u64> {
        self.dictionary.get(word).copied()
    }

    pub fn dictionary_len(&self) -> usize {
        self.dictionary.len()
    }

    pub fn dictionary_words(&self) -> impl Iterator<Item = (&str, u64)> {
        self.dictionary.iter().map(|(w, f)| (w.as_str(), *f))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn is_abbreviation(&self, word: &str) -> bool {
        self.abbreviations.contains(word.trim_end_matches('.'))
    }

    /// Concept for an exact phrase (given as lowercase words).
    pub fn concept_of(&self, words: &[String]) -> Option<&str> {
        self.vocabulary.get(words).map(String::as_str)
    }

    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    /// Phrases as word lists, sorted.
    pub fn phrases(&self) -> BTreeMap<&[String], &str> {
        self.vocabulary.iter().map(|(k, v)| (k.as_slice(), v.as_str())).collect()
    }

    pub fn mapping(&self) -> &BTreeMap<String, MappingTarget> {
        &self.mapping
    }

    /// Vocabulary concepts without a mapping entry.
    pub fn unmapped_concepts(&self) -> BTreeSet<&str> {
        self.vocabulary.values().filter(|c| !self.mapping.contains_key(*c)).map(String::as_str).collect()
    }

    fn phrases_starting_with(&self, word: &str) -> impl Iterator<Item = (&[String], &str)> {
        self.starts.get(word).into_iter().flatten().map(|(p, c)| (p.as_slice(), c.as_str()))
    }

    fn words_of_length(&self, len: usize) -> &[String] {
        self.by_length.get(&len).map_or(&[], Vec::as_slice)
    }
}
