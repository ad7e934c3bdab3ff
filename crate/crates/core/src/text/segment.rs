use serde::Serialize;

use super::Lexicon;

/// A sentence and its byte span in the source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sentence {
    pub text: String,
    pub begin: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Number,
    Punct,
}

/// A lowercased token with the byte span it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub begin: usize,
    pub end: usize,
    pub kind: TokenKind,
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']')
}

/// The abbreviation-like word ending right before byte `dot`, e.g. `e.g` in
/// `e.g.`.
fn word_before(text: &str, dot: usize) -> &str {
    let head = &text[..dot];
    let start =
        head.char_indices().rev().take_while(|(_, c)| c.is_alphanumeric() || *c == '.').last().map_or(dot, |(i, _)| i);
    &head[start..]
}

/// Splits at `.`, `!` or `?` followed by whitespace and an uppercase letter,
/// or by the end of the text. A period after a listed abbreviation does not
/// split. Sentences start at their first non-whitespace character.
pub fn split_sentences(text: &str, lexicon: &Lexicon) -> Vec<Sentence> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut start: Option<usize> = None;
    let mut i = 0;
    let push = |begin: usize, end: usize, out: &mut Vec<Sentence>| {
        out.push(Sentence { text: text[begin..end].to_string(), begin, end })
    };
    while i < chars.len() {
        let (at, c) = chars[i];
        if start.is_none() {
            if !c.is_whitespace() {
                start = Some(at);
            } else {
                i += 1;
                continue;
            }
        }
        if is_terminal(c) {
            let mut j = i;
            while j + 1 < chars.len() && (is_terminal(chars[j + 1].1) || is_closing(chars[j + 1].1)) {
                j += 1;
            }
            let end = chars.get(j + 1).map_or(text.len(), |(b, _)| *b);
            let rest = &text[end..];
            let next = rest.trim_start().chars().next();
            let boundary = match next {
                None => true,
                Some(n) => rest.starts_with(char::is_whitespace) && n.is_uppercase(),
            };
            let abbreviation = c == '.' && j == i && lexicon.is_abbreviation(&word_before(text, at).to_lowercase());
            if boundary && !abbreviation {
                push(start.take().expect("inside a sentence"), end, &mut out);
            }
            i = j + 1;
            continue;
        }
        i += 1;
    }
    if let Some(begin) = start {
        let end = begin + text[begin..].trim_end().len();
        push(begin, end, &mut out);
    }
    out
}

/// Words (letters and digits with inner `-` or `'`), numbers (digits with
/// inner `.` or `,`), and single punctuation characters. Whitespace only
/// separates; every token maps back to `sentence[begin..end]`.
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = sentence.char_indices().collect();
    let byte = |k: usize| chars.get(k).map_or(sentence.len(), |(b, _)| *b);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            out.push(Token {
                text: c.to_lowercase().collect(),
                begin: byte(i),
                end: byte(i + 1),
                kind: TokenKind::Punct,
            });
            i += 1;
            continue;
        }
        let mut j = i + 1;
        loop {
            match chars.get(j) {
                Some((_, c)) if c.is_alphanumeric() => j += 1,
                Some((_, c)) if matches!(c, '-' | '\'' | '.' | ',') => {
                    let next = chars.get(j + 1).map(|(_, c)| *c);
                    let prev = chars[j - 1].1;
                    let joins = match c {
                        '-' | '\'' => next.is_some_and(char::is_alphanumeric),
                        _ => prev.is_ascii_digit() && next.is_some_and(|n| n.is_ascii_digit()),
                    };
                    if joins {
                        j += 2;
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        let raw = &sentence[byte(i)..byte(j)];
        out.push(Token {
            text: raw.to_lowercase(),
            begin: byte(i),
            end: byte(j),
            kind: if raw.chars().any(char::is_alphabetic) { TokenKind::Word } else { TokenKind::Number },
        });
        i = j;
    }
    out
}
