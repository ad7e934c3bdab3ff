use thiserror::Error;

use super::{CompareOp, Filter, QTerm, Query, TriplePattern};
use crate::store::{Datatype, Literal, Term};
use crate::turtle::PrefixTable;
use crate::vocab;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("variable ?{0} is not bound by any pattern")]
    UnboundVariable(String),
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    prefixes: &'a mut PrefixTable,
}

impl Cursor<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, QueryError> {
        self.error_at(self.pos, message)
    }

    fn error_at<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, QueryError> {
        let before = &self.chars[..pos.min(self.chars.len())];
        let line = before.iter().filter(|&&c| c == '\n').count() + 1;
        let column = before.iter().rev().take_while(|&&c| c != '\n').count() + 1;
        Err(QueryError::Syntax { line, column, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.pos += 1;
                }
            } else if c.is_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars[self.pos..].iter().take(n).copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), QueryError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    /// Case-insensitive keyword that is not followed by a name character.
    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let n = kw.len();
        let end = self.pos + n;
        if end > self.chars.len() {
            return false;
        }
        let word: String = self.chars[self.pos..end].iter().collect();
        let boundary = self.chars.get(end).is_none_or(|c| !is_name_char(*c) && *c != ':');
        if word.eq_ignore_ascii_case(kw) && boundary {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn variable(&mut self) -> Result<String, QueryError> {
        self.skip_ws();
        if !matches!(self.peek(), Some('?' | '$')) {
            return self.error("expected a variable");
        }
        self.pos += 1;
        let name = self.take_while(is_name_char);
        if name.is_empty() {
            return self.error("empty variable name");
        }
        Ok(name)
    }

    fn iri_ref(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        self.pos += 1;
        let iri = self.take_while(|c| c != '>' && !c.is_whitespace());
        if self.peek() != Some('>') {
            return self.error_at(start, "unterminated IRI");
        }
        self.pos += 1;
        Ok(iri)
    }

    fn prefixed_name(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        let prefix = self.take_while(is_name_char);
        if self.peek() != Some(':') {
            return self.error_at(start, format!("unexpected `{prefix}`"));
        }
        self.pos += 1;
        let mut local = self.take_while(|c| is_name_char(c) || c == '.');
        while local.ends_with('.') {
            local.pop();
            self.pos -= 1;
        }
        match self.prefixes.expand(&prefix, &local) {
            Some(iri) => Ok(iri),
            None => self.error_at(start, format!("undefined prefix `{prefix}:`")),
        }
    }

    fn term(&mut self) -> Result<QTerm, QueryError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => self.error("unexpected end of query"),
            Some('?' | '$') => self.variable().map(QTerm::Var),
            Some('<') => self.iri_ref().map(|i| QTerm::Const(Term::iri(i))),
            Some('"') => self.string_literal().map(QTerm::Const),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut text = self.take_while(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
                while text.ends_with('.') {
                    text.pop();
                    self.pos -= 1;
                }
                let datatype = if text.contains('.') { Datatype::Decimal } else { Datatype::Integer };
                match Literal::new(&text, datatype) {
                    Ok(lit) => Ok(QTerm::Const(Term::Literal(lit))),
                    Err(e) => self.error_at(start, e.to_string()),
                }
            }
            Some(_) => {
                if self.keyword("a") {
                    return Ok(QTerm::Const(Term::iri(vocab::RDF_TYPE)));
                }
                if self.keyword("true") {
                    return Ok(QTerm::Const(Term::boolean(true)));
                }
                if self.keyword("false") {
                    return Ok(QTerm::Const(Term::boolean(false)));
                }
                self.prefixed_name().map(|i| QTerm::Const(Term::iri(i)))
            }
        }
    }

    fn string_literal(&mut self) -> Result<Term, QueryError> {
        let start = self.pos;
        self.pos += 1;
        let mut value = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => return self.error_at(start, "unterminated string"),
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        _ => return self.error("bad escape in string"),
                    };
                    value.push(c);
                    self.pos += 1;
                }
                Some(c) => {
                    value.push(c);
                    self.pos += 1;
                }
            }
        }
        if self.peek() == Some('@') {
            return self.error("language tags are not supported");
        }
        if self.chars[self.pos..].starts_with(&['^', '^']) {
            self.pos += 2;
            let at = self.pos;
            let iri = if self.peek() == Some('<') { self.iri_ref()? } else { self.prefixed_name()? };
            let Some(datatype) = Datatype::from_iri(&iri) else {
                return self.error_at(at, format!("unsupported datatype <{iri}>"));
            };
            return Literal::new(&value, datatype).map(Term::Literal).or_else(|e| self.error_at(start, e.to_string()));
        }
        Ok(Term::string(value))
    }

    fn filter(&mut self, out: &mut Vec<Filter>) -> Result<(), QueryError> {
        self.expect("(")?;
        loop {
            let start = self.pos;
            let left = self.term()?;
            let op = if self.eat("!=") {
                CompareOp::Ne
            } else if self.eat("=") {
                CompareOp::Eq
            } else {
                return self.error("expected `=` or `!=`");
            };
            let right = self.term()?;
            let (left, right) = match (left, right) {
                (QTerm::Var(v), r) => (v, r),
                (c, QTerm::Var(v)) => (v, c),
                _ => return self.error_at(start, "a comparison needs at least one variable"),
            };
            out.push(Filter { left, op, right });
            if !self.eat("&&") {
                break;
            }
        }
        self.expect(")")
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

/// Parses a query with the standard prefixes predeclared.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    parse_query_with(text, &mut PrefixTable::standard())
}

/// Parses a query; `PREFIX` declarations are added to `prefixes`.
pub fn parse_query_with(text: &str, prefixes: &mut PrefixTable) -> Result<Query, QueryError> {
    let mut cur = Cursor { chars: text.chars().collect(), pos: 0, prefixes };
    while cur.keyword("PREFIX") {
        cur.skip_ws();
        let label = cur.take_while(is_name_char);
        cur.expect(":")?;
        cur.skip_ws();
        if cur.peek() != Some('<') {
            return cur.error("expected a namespace IRI");
        }
        let ns = cur.iri_ref()?;
        cur.prefixes.insert(&label, &ns);
    }
    if !cur.keyword("SELECT") {
        return cur.error("expected SELECT");
    }
    cur.keyword("DISTINCT");
    let mut select = Vec::new();
    let mut select_at = Vec::new();
    let star = cur.eat("*");
    if !star {
        loop {
            cur.skip_ws();
            if !matches!(cur.peek(), Some('?' | '$')) {
                break;
            }
            select_at.push(cur.pos);
            select.push(cur.variable()?);
        }
        if select.is_empty() {
            return cur.error("expected `*` or at least one variable");
        }
    }
    cur.keyword("WHERE");
    cur.expect("{")?;

    let mut patterns = Vec::new();
    let mut filters = Vec::new();
    let mut needs_dot = false;
    loop {
        if cur.eat("}") {
            break;
        }
        if cur.keyword("FILTER") {
            cur.filter(&mut filters)?;
            cur.eat(".");
            needs_dot = false;
            continue;
        }
        if needs_dot {
            return cur.error("expected `.` or `}`");
        }
        let s = cur.term()?;
        let p = cur.term()?;
        if matches!(&p, QTerm::Const(t) if !t.is_iri()) {
            return cur.error("a predicate must be an IRI or a variable");
        }
        let o = cur.term()?;
        patterns.push(TriplePattern::new(s, p, o));
        needs_dot = !cur.eat(".");
    }
    while cur.keyword("FILTER") {
        cur.filter(&mut filters)?;
    }
    cur.skip_ws();
    if cur.peek().is_some() {
        return cur.error("unexpected text after query");
    }
    if patterns.is_empty() {
        return cur.error_at(0, "a query needs at least one triple pattern");
    }

    let query = Query { select: Vec::new(), patterns, filters };
    let bound = query.pattern_variables();
    let select = if star { bound.clone() } else { select };
    for v in select.iter().map(String::as_str).chain(query.filters.iter().flat_map(Filter::variables)) {
        if !bound.iter().any(|b| b == v) {
            return Err(QueryError::UnboundVariable(v.to_string()));
        }
    }
    let mut unique = Vec::new();
    for v in select {
        if !unique.contains(&v) {
            unique.push(v);
        }
    }
    Ok(Query { select: unique, ..query })
}
