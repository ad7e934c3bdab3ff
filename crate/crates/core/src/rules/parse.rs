//! Rule-file reader.
//!
//! One rule per line, `#` comments, optional `rule <id>:` label. Comment
//! lines immediately above a rule become its note. Whitespace around `^`,
//! `->` and inside argument lists is optional.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Arg, Atom, AtomKind, Builtin, Rule, RuleSource};
use crate::store::{Datatype, Literal, Term};
use crate::turtle::PrefixTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: rule {rule_id} is unsafe: variable ?{variable} is not bound by a class or property atom in the body")]
    Unsafe { line: usize, rule_id: String, variable: String },
    #[error("line {line}: duplicate rule id {rule_id}")]
    DuplicateId { line: usize, rule_id: String },
}

impl RuleParseError {
    pub fn line(&self) -> usize {
        match self {
            RuleParseError::Syntax { line, .. }
            | RuleParseError::Unsafe { line, .. }
            | RuleParseError::DuplicateId { line, .. } => *line,
        }
    }
}

/// Non-fatal finding, e.g. one variable spelled with two different cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleWarning {
    pub line: usize,
    pub rule_id: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RuleParser {
    prefixes: PrefixTable,
    source: RuleSource,
}

impl Default for RuleParser {
    fn default() -> RuleParser {
        RuleParser::new(PrefixTable::standard(), RuleSource::User)
    }
}

/// Parses `text` with the standard prefixes, tagging rules as user rules.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>, RuleParseError> {
    RuleParser::default().parse(text).map(|(rules, _)| rules)
}

impl RuleParser {
    /// Bare names resolve against the `:` prefix of `prefixes`.
    pub fn new(prefixes: PrefixTable, source: RuleSource) -> RuleParser {
        RuleParser { prefixes, source }
    }

    pub fn parse(&self, text: &str) -> Result<(Vec<Rule>, Vec<RuleWarning>), RuleParseError> {
        let mut rules: Vec<Rule> = Vec::new();
        let mut warnings = Vec::new();
        let mut note: Vec<String> = Vec::new();
        let mut ids = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                note.clear();
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                note.push(comment.trim().to_string());
                continue;
            }
            let ordinal = rules.len() + 1;
            let mut cursor = Cursor::new(raw, line);
            let (rule, case_warnings) = self.rule(&mut cursor, ordinal)?;
            if ids.insert(rule.id.clone(), line).is_some() {
                return Err(RuleParseError::DuplicateId { line, rule_id: rule.id });
            }
            warnings.extend(case_warnings.into_iter().map(|message| RuleWarning {
                line,
                rule_id: rule.id.clone(),
                message,
            }));
            let note_text = (!note.is_empty()).then(|| note.join("\n"));
            note.clear();
            rules.push(Rule { note: note_text, ..rule });
        }
        Ok((rules, warnings))
    }

    fn rule(&self, cur: &mut Cursor<'_>, ordinal: usize) -> Result<(Rule, Vec<String>), RuleParseError> {
        cur.skip_ws();
        let label = cur.label();
        let id = label.unwrap_or_else(|| format!("{}-{}", self.source.name(), ordinal));
        cur.skip_ws();
        let text_start = cur.pos;

        let mut spellings: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let body = self.atoms(cur, &mut spellings, false)?;
        cur.skip_ws();
        if !cur.eat("->") {
            return Err(cur.error("expected '^' or '->'"));
        }
        let head = self.atoms(cur, &mut spellings, true)?;
        cur.skip_ws();
        if let Some(c) = cur.peek() {
            if c != '#' {
                return Err(cur.error(format!("unexpected {c:?} after rule head")));
            }
        }
        let text = cur.src[text_start..cur.comment_start()].trim().to_string();

        let rule = Rule { id, body, head, source: self.source, note: None, text, line: cur.line };
        check_safety(&rule)?;

        let warnings = spellings
            .into_iter()
            .filter(|(_, forms)| forms.len() > 1)
            .map(|(name, forms)| {
                format!(
                    "variable ?{name} is written as {}; treated as one variable",
                    forms.iter().map(|f| format!("?{f}")).collect::<Vec<_>>().join(" and ")
                )
            })
            .collect();
        Ok((rule, warnings))
    }

    fn atoms(
        &self,
        cur: &mut Cursor<'_>,
        spellings: &mut BTreeMap<String, Vec<String>>,
        head: bool,
    ) -> Result<Vec<Atom>, RuleParseError> {
        let mut atoms = vec![self.atom(cur, spellings, head)?];
        loop {
            cur.skip_ws();
            if cur.eat("^") {
                atoms.push(self.atom(cur, spellings, head)?);
            } else {
                return Ok(atoms);
            }
        }
    }

    fn atom(
        &self,
        cur: &mut Cursor<'_>,
        spellings: &mut BTreeMap<String, Vec<String>>,
        head: bool,
    ) -> Result<Atom, RuleParseError> {
        cur.skip_ws();
        let name_col = cur.column();
        let name = cur.name();
        if name.is_empty() {
            return Err(cur.error("expected an atom"));
        }
        cur.skip_ws();
        if !cur.eat("(") {
            return Err(cur.error(format!("expected '(' after {name}")));
        }
        let mut args = Vec::new();
        loop {
            cur.skip_ws();
            args.push(self.arg(cur, spellings)?);
            cur.skip_ws();
            if cur.eat(",") {
                continue;
            }
            if cur.eat(")") {
                break;
            }
            return Err(cur.error("expected ',' or ')'"));
        }
        let at_name = |message: String| RuleParseError::Syntax { line: cur.line, column: name_col, message };

        if let Some(builtin) = name.strip_prefix("swrlb:") {
            if builtin != "equal" {
                return Err(at_name(format!("unsupported builtin {name}")));
            }
            if head {
                return Err(at_name("builtins are not allowed in rule heads".into()));
            }
            if args.len() != 2 {
                return Err(at_name(format!("{} takes 2 arguments, got {}", Builtin::EQUAL_NAME, args.len())));
            }
            return Ok(Atom { kind: AtomKind::Builtin, predicate: Builtin::EQUAL_NAME.to_string(), args });
        }
        let predicate = self.resolve(&name).ok_or_else(|| at_name(format!("undefined prefix in {name}")))?;
        let kind = match args.len() {
            1 => AtomKind::Class,
            2 => AtomKind::Property,
            n => return Err(at_name(format!("{name} has {n} arguments; atoms take 1 or 2"))),
        };
        if head {
            if let Arg::Const(Term::Literal(_)) = &args[0] {
                return Err(at_name(format!("head atom {name} has a literal subject")));
            }
        }
        Ok(Atom { kind, predicate, args })
    }

    fn arg(&self, cur: &mut Cursor<'_>, spellings: &mut BTreeMap<String, Vec<String>>) -> Result<Arg, RuleParseError> {
        let (line, col) = (cur.line, cur.column());
        let bad = |message: String| RuleParseError::Syntax { line, column: col, message };
        match cur.peek() {
            Some('?') => {
                cur.bump();
                let name = cur.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(bad("empty variable name".into()));
                }
                let key = name.to_lowercase();
                let forms = spellings.entry(key.clone()).or_default();
                if !forms.contains(&name) {
                    forms.push(name);
                }
                Ok(Arg::Var(key))
            }
            Some('"') => {
                cur.bump();
                let mut value = String::new();
                loop {
                    match cur.bump() {
                        None => return Err(bad("unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            Some('n') => value.push('\n'),
                            Some('t') => value.push('\t'),
                            _ => return Err(bad("bad escape in string".into())),
                        },
                        Some(c) => value.push(c),
                    }
                }
                Ok(Arg::Const(Term::string(value)))
            }
            Some('<') => {
                cur.bump();
                let iri = cur.take_while(|c| c != '>' && !c.is_whitespace());
                if !cur.eat(">") || iri.is_empty() {
                    return Err(bad("unterminated IRI".into()));
                }
                Ok(Arg::Const(Term::iri(iri)))
            }
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => {
                let text = cur.take_while(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
                let datatype = if text.contains('.') { Datatype::Decimal } else { Datatype::Integer };
                Literal::new(&text, datatype).map(|l| Arg::Const(Term::Literal(l))).map_err(|e| bad(e.to_string()))
            }
            Some(_) => {
                let name = cur.name();
                match name.as_str() {
                    "" => Err(bad("expected an argument".into())),
                    "true" => Ok(Arg::Const(Term::boolean(true))),
                    "false" => Ok(Arg::Const(Term::boolean(false))),
                    _ => self
                        .resolve(&name)
                        .map(|iri| Arg::Const(Term::iri(iri)))
                        .ok_or_else(|| bad(format!("undefined prefix in {name}"))),
                }
            }
            None => Err(bad("unexpected end of line".into())),
        }
    }

    fn resolve(&self, name: &str) -> Option<String> {
        match name.split_once(':') {
            Some((prefix, local)) => self.prefixes.expand(prefix, local),
            None => self.prefixes.expand("", name),
        }
    }
}

fn check_safety(rule: &Rule) -> Result<(), RuleParseError> {
    let bound = rule.bound_variables();
    let unsafe_var = rule
        .head
        .iter()
        .chain(rule.body.iter().filter(|a| a.kind == AtomKind::Builtin))
        .flat_map(Atom::variables)
        .find(|v| !bound.contains(v));
    match unsafe_var {
        Some(variable) => {
            Err(RuleParseError::Unsafe { line: rule.line, rule_id: rule.id.clone(), variable: variable.to_string() })
        }
        None => Ok(()),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Cursor<'a> {
        Cursor { src, pos: 0, line }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn column(&self) -> usize {
        self.src[..self.pos].chars().count() + 1
    }

    fn error(&self, message: impl Into<String>) -> RuleParseError {
        RuleParseError::Syntax { line: self.line, column: self.column(), message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    /// Atom or constant name. A `-` is part of the name unless it starts `->`.
    fn name(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            let ok =
                c.is_alphanumeric() || matches!(c, '_' | ':' | '.') || (c == '-' && !self.rest().starts_with("->"));
            if !ok {
                break;
            }
            self.bump();
        }
        self.src[start..self.pos].to_string()
    }

    /// Consumes a leading `rule <id>:` label if present.
    fn label(&mut self) -> Option<String> {
        let rest = self.rest();
        let after = rest.strip_prefix("rule")?;
        if !after.starts_with(char::is_whitespace) {
            return None;
        }
        let after = after.trim_start();
        let id_len =
            after.find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))).unwrap_or(after.len());
        if id_len == 0 {
            return None;
        }
        let tail = after[id_len..].trim_start();
        let tail = tail.strip_prefix(':')?;
        let id = after[..id_len].to_string();
        self.pos = self.src.len() - tail.len();
        Some(id)
    }

    /// Byte offset where a trailing `#` comment begins (outside strings).
    fn comment_start(&self) -> usize {
        let mut in_string = false;
        let mut escaped = false;
        for (i, c) in self.src.char_indices() {
            match c {
                _ if escaped => escaped = false,
                '\\' if in_string => escaped = true,
                '"' => in_string = !in_string,
                '#' if !in_string => return i,
                _ => {}
            }
        }
        self.src.len()
    }
}
