//! Reader and writer for the Turtle subset used by knowledge-base files.
//!
//! Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, `<iri>` references,
//! prefixed names, `a`, labeled blank nodes (`_:x`), string literals with
//! escapes, bare booleans, integers and decimals, `^^` datatypes from the
//! four supported XSD types, `;` and `,` abbreviations and `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::store::{Datatype, Graph, Literal, Term, Triple};
use crate::vocab;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct TurtleError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Prefix label to namespace IRI, plus an optional base for relative IRIs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTable {
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

impl PrefixTable {
    pub fn new() -> PrefixTable {
        PrefixTable::default()
    }

    /// `rdf`, `rdfs`, `owl`, `xsd`, plus the knowledge-base namespace bound to
    /// both `:` and `vbd:`.
    pub fn standard() -> PrefixTable {
        let mut table = PrefixTable::new();
        table.insert("", vocab::VBD);
        table.insert("vbd", vocab::VBD);
        table.insert("rdf", vocab::RDF);
        table.insert("rdfs", vocab::RDFS);
        table.insert("owl", vocab::OWL);
        table.insert("xsd", vocab::XSD);
        table
    }

    /// Binds a label, replacing any previous binding.
    pub fn insert(&mut self, label: &str, namespace: &str) {
        self.prefixes.insert(label.to_string(), namespace.to_string());
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.prefixes.get(label).map(String::as_str)
    }

    pub fn set_base(&mut self, base: Option<String>) {
        self.base = base;
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Shortest prefixed form of `iri`, if some namespace covers it with a
    /// local part the lexer can read back.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.prefixes
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
            .map(|(label, ns)| (label, &iri[ns.len()..]))
            .filter(|(_, local)| is_safe_local(local))
            .min_by_key(|(label, local)| (local.len(), label.len(), label.to_string()))
            .map(|(label, local)| format!("{label}:{local}"))
    }
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

fn is_absolute_iri(iri: &str) -> bool {
    match iri.split_once(':') {
        Some((scheme, _)) => {
            let mut chars = scheme.chars();
            chars.next().is_some_and(|c| c.is_ascii_alphabetic())
                && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    IriRef(String),
    PName(String, String),
    Blank(String),
    Str(String),
    Integer(String),
    Decimal(String),
    Bool(bool),
    A,
    AtPrefix,
    AtBase,
    SparqlPrefix,
    SparqlBase,
    LangTag(String),
    Dot,
    Semicolon,
    Comma,
    Carets,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> TurtleError {
        TurtleError { line, column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, TurtleError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '<' => {
                    self.bump();
                    Tok::IriRef(self.iri_ref(line, column)?)
                }
                '"' => {
                    self.bump();
                    Tok::Str(self.string(line, column)?)
                }
                '.' => {
                    self.bump();
                    match self.peek() {
                        Some(d) if d.is_ascii_digit() => self.number(String::from("."), line, column)?,
                        _ => Tok::Dot,
                    }
                }
                ';' => {
                    self.bump();
                    Tok::Semicolon
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(self.err(line, column, "expected '^^'"));
                    }
                    Tok::Carets
                }
                '@' => {
                    self.bump();
                    let mut word = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '-' {
                            word.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    match word.as_str() {
                        "prefix" => Tok::AtPrefix,
                        "base" => Tok::AtBase,
                        "" => return Err(self.err(line, column, "empty '@' directive")),
                        _ => Tok::LangTag(word),
                    }
                }
                '+' | '-' => {
                    self.bump();
                    self.number(c.to_string(), line, column)?
                }
                d if d.is_ascii_digit() => self.number(String::new(), line, column)?,
                c if c.is_alphabetic() || c == '_' || c == ':' => {
                    let (tok, width, trailing_dot) = self.word(line, column)?;
                    out.push(Spanned { tok, line, column });
                    if trailing_dot {
                        out.push(Spanned { tok: Tok::Dot, line, column: column + width });
                    }
                    continue;
                }
                other => return Err(self.err(line, column, format!("unexpected character {other:?}"))),
            };
            out.push(Spanned { tok, line, column });
        }
        Ok(out)
    }

    fn hex_escape(&mut self, digits: usize, line: usize, column: usize) -> Result<char, TurtleError> {
        let mut code = 0u32;
        for _ in 0..digits {
            let d =
                self.bump().and_then(|c| c.to_digit(16)).ok_or_else(|| self.err(line, column, "bad unicode escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.err(line, column, "escape is not a scalar value"))
    }

    fn iri_ref(&mut self, line: usize, column: usize) -> Result<String, TurtleError> {
        let mut iri = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err(line, column, "unterminated IRI")),
                Some('>') => return Ok(iri),
                Some('\\') => match self.bump() {
                    Some('u') => iri.push(self.hex_escape(4, line, column)?),
                    Some('U') => iri.push(self.hex_escape(8, line, column)?),
                    _ => return Err(self.err(line, column, "bad escape in IRI")),
                },
                Some(c) if c <= ' ' || c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.err(line, column, format!("character {c:?} not allowed in IRI")))
                }
                Some(c) => iri.push(c),
            }
        }
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, TurtleError> {
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return Err(self.err(line, column, "unterminated string literal")),
                Some('"') => return Ok(value),
                Some('\\') => match self.bump() {
                    Some('t') => value.push('\t'),
                    Some('b') => value.push('\u{8}'),
                    Some('n') => value.push('\n'),
                    Some('r') => value.push('\r'),
                    Some('f') => value.push('\u{c}'),
                    Some('"') => value.push('"'),
                    Some('\'') => value.push('\''),
                    Some('\\') => value.push('\\'),
                    Some('u') => value.push(self.hex_escape(4, line, column)?),
                    Some('U') => value.push(self.hex_escape(8, line, column)?),
                    _ => return Err(self.err(line, column, "bad escape in string literal")),
                },
                Some(c) => value.push(c),
            }
        }
    }

    fn number(&mut self, mut text: String, line: usize, column: usize) -> Result<Tok, TurtleError> {
        let mut seen_dot = text.ends_with('.');
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else if c == '.' && !seen_dot {
                // A dot only belongs to the number when a digit follows it.
                let mut ahead = self.chars.clone();
                ahead.next();
                if ahead.next().is_some_and(|d| d.is_ascii_digit()) {
                    seen_dot = true;
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        if !text.bytes().any(|b| b.is_ascii_digit()) {
            return Err(self.err(line, column, format!("malformed number {text:?}")));
        }
        if let Some(c) = self.peek() {
            if c.is_alphabetic() || c == '_' {
                return Err(self.err(line, column, format!("malformed number near {c:?}")));
            }
        }
        Ok(if seen_dot { Tok::Decimal(text) } else { Tok::Integer(text) })
    }

    /// Reads a bare word; also returns its width and whether a statement
    /// terminator was glued to its end.
    fn word(&mut self, line: usize, column: usize) -> Result<(Tok, usize, bool), TurtleError> {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                word.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // A trailing dot terminates the statement rather than the name.
        let mut trailing_dots = 0;
        while word.ends_with('.') {
            word.pop();
            trailing_dots += 1;
        }
        if trailing_dots > 1 {
            return Err(self.err(line, column, "unexpected '..'"));
        }
        let width = word.chars().count();
        let tok = match word.as_str() {
            "a" => Tok::A,
            "true" => Tok::Bool(true),
            "false" => Tok::Bool(false),
            w if w.eq_ignore_ascii_case("prefix") => Tok::SparqlPrefix,
            w if w.eq_ignore_ascii_case("base") => Tok::SparqlBase,
            w if w.starts_with("_:") => {
                let label = &w[2..];
                if label.is_empty() || label.contains(':') {
                    return Err(self.err(line, column, format!("bad blank node label {w:?}")));
                }
                Tok::Blank(w.to_string())
            }
            w => match w.split_once(':') {
                Some((prefix, local)) => {
                    if local.starts_with(['-', '.']) {
                        return Err(self.err(line, column, format!("bad local name in {w:?}")));
                    }
                    Tok::PName(prefix.to_string(), local.to_string())
                }
                None => return Err(self.err(line, column, format!("unexpected bare word {w:?}"))),
            },
        };
        Ok((tok, width, trailing_dots == 1))
    }
}

struct Parser<'p> {
    toks: Vec<Spanned>,
    pos: usize,
    prefixes: &'p mut PrefixTable,
    end: (usize, usize),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.column)).unwrap_or(self.end)
    }

    fn err_here(&self, message: impl Into<String>) -> TurtleError {
        let (line, column) = self.here();
        TurtleError { line, column, message: message.into() }
    }

    fn next(&mut self) -> Result<Tok, TurtleError> {
        let tok = self
            .toks
            .get(self.pos)
            .map(|s| s.tok.clone())
            .ok_or_else(|| self.err_here("unexpected end of document"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), TurtleError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn document(&mut self, graph: &mut Graph) -> Result<(), TurtleError> {
        while let Some(tok) = self.peek() {
            match tok {
                Tok::AtPrefix | Tok::SparqlPrefix => {
                    let at = *tok == Tok::AtPrefix;
                    self.pos += 1;
                    let label = match self.next()? {
                        Tok::PName(label, local) if local.is_empty() => label,
                        _ => {
                            self.pos -= 1;
                            return Err(self.err_here("expected prefix label ending in ':'"));
                        }
                    };
                    let ns = self.iri_ref_value()?;
                    self.prefixes.insert(&label, &ns);
                    if at {
                        self.expect(Tok::Dot, "'.' after @prefix")?;
                    }
                }
                Tok::AtBase | Tok::SparqlBase => {
                    let at = *tok == Tok::AtBase;
                    self.pos += 1;
                    let base = self.iri_ref_value()?;
                    self.prefixes.set_base(Some(base));
                    if at {
                        self.expect(Tok::Dot, "'.' after @base")?;
                    }
                }
                _ => {
                    self.triples(graph)?;
                    self.expect(Tok::Dot, "'.' at end of statement")?;
                }
            }
        }
        Ok(())
    }

    fn iri_ref_value(&mut self) -> Result<String, TurtleError> {
        match self.peek() {
            Some(Tok::IriRef(_)) => {
                let Tok::IriRef(iri) = self.next()? else { unreachable!() };
                self.resolve_relative(iri)
            }
            _ => Err(self.err_here("expected <IRI>")),
        }
    }

    fn resolve_relative(&self, iri: String) -> Result<String, TurtleError> {
        if is_absolute_iri(&iri) {
            return Ok(iri);
        }
        match self.prefixes.base() {
            Some(base) => Ok(format!("{base}{iri}")),
            None => Err(self.err_here(format!("relative IRI <{iri}> without a base"))),
        }
    }

    /// IRI-valued position: `<iri>`, prefixed name or blank node.
    fn resource(&mut self, what: &str) -> Result<Term, TurtleError> {
        let at = self.pos;
        match self.next()? {
            Tok::IriRef(iri) => {
                self.pos = at;
                let iri = self.resolve_relative(iri)?;
                self.pos = at + 1;
                Ok(Term::Iri(iri))
            }
            Tok::PName(prefix, local) => match self.prefixes.expand(&prefix, &local) {
                Some(iri) => Ok(Term::Iri(iri)),
                None => {
                    self.pos = at;
                    Err(self.err_here(format!("undefined prefix '{prefix}:'")))
                }
            },
            Tok::Blank(label) => Ok(Term::Iri(label)),
            _ => {
                self.pos = at;
                Err(self.err_here(format!("expected {what}")))
            }
        }
    }

    fn triples(&mut self, graph: &mut Graph) -> Result<(), TurtleError> {
        let subject = self.resource("subject")?;
        loop {
            let predicate = if self.peek() == Some(&Tok::A) {
                self.pos += 1;
                Term::iri(vocab::RDF_TYPE)
            } else {
                match self.resource("predicate")? {
                    Term::Iri(iri) if iri.starts_with("_:") => {
                        self.pos -= 1;
                        return Err(self.err_here("blank node cannot be a predicate"));
                    }
                    p => p,
                }
            };
            loop {
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), predicate.clone(), object);
                graph.insert(triple).map_err(|e| self.err_here(e.to_string()))?;
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semicolon) {
                while self.peek() == Some(&Tok::Semicolon) {
                    self.pos += 1;
                }
                // A trailing ';' before the terminating '.' is allowed.
                if self.peek() == Some(&Tok::Dot) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        let at = self.pos;
        let lit = |lexical: &str, datatype: Datatype, p: &Self| {
            Literal::new(lexical, datatype).map(Term::Literal).map_err(|e| p.err_here(e.to_string()))
        };
        match self.peek() {
            Some(Tok::Bool(b)) => {
                let b = *b;
                self.pos += 1;
                Ok(Term::boolean(b))
            }
            Some(Tok::Integer(text)) => {
                let text = text.clone();
                let term = lit(&text, Datatype::Integer, self)?;
                self.pos += 1;
                Ok(term)
            }
            Some(Tok::Decimal(text)) => {
                let text = text.clone();
                let term = lit(&text, Datatype::Decimal, self)?;
                self.pos += 1;
                Ok(term)
            }
            Some(Tok::Str(value)) => {
                let value = value.clone();
                self.pos += 1;
                match self.peek() {
                    Some(Tok::Carets) => {
                        self.pos += 1;
                        let dt_at = self.pos;
                        let Term::Iri(dt) = self.resource("datatype IRI")? else { unreachable!() };
                        let Some(datatype) = Datatype::from_iri(&dt) else {
                            self.pos = dt_at;
                            return Err(self.err_here(format!("unsupported datatype <{dt}>")));
                        };
                        self.pos = dt_at;
                        let term = lit(&value, datatype, self)?;
                        self.pos = dt_at + 1;
                        Ok(term)
                    }
                    Some(Tok::LangTag(_)) => Err(self.err_here("language tags are not supported")),
                    _ => Ok(Term::string(value)),
                }
            }
            Some(Tok::A) => Err(self.err_here("'a' is only valid as a predicate")),
            _ => {
                self.pos = at;
                self.resource("object")
            }
        }
    }
}

/// Parses a document into a graph; prefixes declared in it are returned
/// alongside.
pub fn parse_turtle(text: &str) -> Result<(Graph, PrefixTable), TurtleError> {
    let mut prefixes = PrefixTable::new();
    let graph = parse_turtle_into(text, &mut prefixes)?;
    Ok((graph, prefixes))
}

/// Parses with a pre-populated prefix table; declarations in the document
/// are added to it.
pub fn parse_turtle_into(text: &str, prefixes: &mut PrefixTable) -> Result<Graph, TurtleError> {
    let lexer = Lexer::new(text);
    let toks = lexer.tokens()?;
    let end = text.lines().enumerate().last().map(|(i, l)| (i + 1, l.chars().count() + 1)).unwrap_or((1, 1));
    let mut graph = Graph::new();
    let mut parser = Parser { toks, pos: 0, prefixes, end };
    parser.document(&mut graph)?;
    Ok(graph)
}

fn write_iri(out: &mut String, iri: &str, prefixes: &PrefixTable) {
    if iri.starts_with("_:") {
        out.push_str(iri);
        return;
    }
    if let Some(short) = prefixes.compact(iri) {
        out.push_str(&short);
        return;
    }
    out.push('<');
    for c in iri.chars() {
        if c <= ' '
            || c.is_whitespace()
            || c.is_control()
            || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
}

fn write_string(out: &mut String, value: &str) {
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_term(out: &mut String, term: &Term, prefixes: &PrefixTable) {
    match term {
        Term::Iri(iri) => write_iri(out, iri, prefixes),
        Term::Literal(lit) => match lit.datatype() {
            Datatype::String => write_string(out, lit.lexical()),
            _ => out.push_str(lit.lexical()),
        },
    }
}

/// Writes the graph grouped by subject, with `;` between predicates and `,`
/// between objects. Output order is deterministic.
pub fn serialize_turtle(graph: &Graph, prefixes: &PrefixTable) -> String {
    let mut out = String::new();
    if let Some(base) = prefixes.base() {
        let _ = writeln!(out, "@base <{base}> .");
    }
    for (label, ns) in prefixes.iter() {
        let _ = writeln!(out, "@prefix {label}: <{ns}> .");
    }
    let triples = graph.triple_set();
    let mut subject: Option<&Term> = None;
    let mut predicate: Option<&Term> = None;
    for t in &triples {
        if subject != Some(&t.subject) {
            if subject.is_some() {
                out.push_str(" .\n");
            }
            out.push('\n');
            write_term(&mut out, &t.subject, prefixes);
            out.push(' ');
            subject = Some(&t.subject);
            predicate = None;
        }
        if predicate == Some(&t.predicate) {
            out.push_str(", ");
        } else {
            if predicate.is_some() {
                out.push_str(" ;\n    ");
            }
            if t.predicate.as_iri() == Some(vocab::RDF_TYPE) {
                out.push('a');
            } else {
                write_term(&mut out, &t.predicate, prefixes);
            }
            out.push(' ');
            predicate = Some(&t.predicate);
        }
        write_term(&mut out, &t.object, prefixes);
    }
    if subject.is_some() {
        out.push_str(" .\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = "@prefix : <http://ex/> .\n";

    #[test]
    fn parses_type_with_a() {
        let (g, prefixes) = parse_turtle(&format!("{EX}:p1 a :patient .")).unwrap();
        assert_eq!(prefixes.get(""), Some("http://ex/"));
        assert_eq!(
            g.triple_set().into_iter().collect::<Vec<_>>(),
            vec![Triple::new(Term::iri("http://ex/p1"), Term::iri(vocab::RDF_TYPE), Term::iri("http://ex/patient"))]
        );
    }

    #[test]
    fn bare_literals() {
        let (g, _) = parse_turtle(&format!("{EX}:p1 :has_Fever true ; :age 42 ; :temp 101.50 ; :n -3.")).unwrap();
        let objects: Vec<Term> = g.iter().map(|t| t.object).collect();
        assert!(objects.contains(&Term::boolean(true)));
        assert!(objects.contains(&Term::integer(42)));
        assert!(objects.contains(&Term::decimal("101.5").unwrap()));
        assert!(objects.contains(&Term::integer(-3)));
    }

    #[test]
    fn abbreviations_match_expanded_form() {
        let short = format!("{EX}:p1 a :patient ; :has :a, :b ; :age 3 .\n:p2 a :patient .");
        let long = format!("{EX}:p1 a :patient .\n:p1 :has :a .\n:p1 :has :b .\n:p1 :age 3 .\n:p2 a :patient .");
        assert_eq!(parse_turtle(&short).unwrap().0, parse_turtle(&long).unwrap().0);
    }

    #[test]
    fn typed_literals_and_comments() {
        let doc = format!(
            "{EX}@prefix xsd: <{}> .\n# comment\n:x :v \"5\"^^xsd:integer ; # trailing\n :w \"true\"^^xsd:boolean ; :s \"a # b\" .",
            vocab::XSD
        );
        let (g, _) = parse_turtle(&doc).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g.contains(&Triple::new(Term::iri("http://ex/x"), Term::iri("http://ex/v"), Term::integer(5))));
        assert!(g.contains(&Triple::new(Term::iri("http://ex/x"), Term::iri("http://ex/s"), Term::string("a # b"))));
    }

    #[test]
    fn undefined_prefix_reports_position() {
        let err = parse_turtle("@prefix : <http://ex/> .\n:a :b nope:c .").unwrap_err();
        assert_eq!((err.line, err.column), (2, 7));
        assert!(err.message.contains("nope"));
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = parse_turtle(&format!("{EX}:a :b \"oops .\n")).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unterminated"));
    }

    #[test]
    fn missing_dot_is_an_error() {
        assert!(parse_turtle(&format!("{EX}:a :b :c")).is_err());
    }

    #[test]
    fn literal_subject_is_an_error() {
        assert!(parse_turtle(&format!("{EX}\"x\" :b :c .")).is_err());
        assert!(parse_turtle(&format!("{EX}:a :b \"x\"@en .")).is_err());
    }

    #[test]
    fn blank_nodes_and_base() {
        let (g, _) = parse_turtle("@base <http://ex/> .\n_:b1 <p> <o> .").unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::iri("_:b1"));
        assert_eq!(t.predicate, Term::iri("http://ex/p"));
        assert!(parse_turtle("<rel> <http://ex/p> <http://ex/o> .").is_err());
    }

    #[test]
    fn empty_graph_serializes_to_prefixes_only() {
        let text = serialize_turtle(&Graph::new(), &PrefixTable::standard());
        assert!(text.lines().all(|l| l.starts_with("@prefix")));
        assert_eq!(parse_turtle(&text).unwrap().0.len(), 0);
    }

    #[test]
    fn quotes_in_strings_round_trip() {
        let mut g = Graph::new();
        g.insert(Triple::new(
            Term::iri(vocab::vbd("p1")),
            Term::iri(vocab::vbd("note")),
            Term::string("said \"fever\"\\ \n next"),
        ))
        .unwrap();
        let text = serialize_turtle(&g, &PrefixTable::standard());
        assert!(text.contains("\\\"fever\\\""));
        assert_eq!(parse_turtle(&text).unwrap().0, g);
    }

    #[test]
    fn odd_iris_round_trip() {
        let mut g = Graph::new();
        g.insert(Triple::new(Term::iri("http://ex/a b>c"), Term::iri("http://ex/p.q"), Term::iri("urn:x:1"))).unwrap();
        let text = serialize_turtle(&g, &PrefixTable::standard());
        assert_eq!(parse_turtle(&text).unwrap().0, g);
    }
}
