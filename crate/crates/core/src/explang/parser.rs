//! Recursive-descent parser for if-then explanation sentences.
//!
//! ```text
//! sentence    := "if" clause [","] "then" consequent ["."]
//! clause      := condition (("and" | "or") condition){0,2}      left-assoc
//! condition   := word+ comparator word+
//! consequent  := [word+ "is"] [quantifier] ["not"] word+
//! ```
//!
//! Keywords match case-insensitively; feature names, values and labels keep
//! their original spelling.

use std::fmt;

use super::ast::{ClauseTree, Comparator, Condition, Connective, Explanation, Value, MAX_BINARY_NODES};
use super::Quantifier;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input where the parser gave up.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: expected ", self.offset)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of [{}]", many.join(", "))?,
        }
        match &self.found {
            Some(tok) => write!(f, ", found {tok:?}"),
            None => write!(f, ", found end of input"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Word,
    Comma,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    start: usize,
    kind: Kind,
}

impl Token<'_> {
    fn is_kw(&self, kw: &str) -> bool {
        self.kind == Kind::Word && self.text.eq_ignore_ascii_case(kw)
    }
}

fn push_chunk<'a>(src: &'a str, s: usize, e: usize, out: &mut Vec<Token<'a>>) {
    let chunk = &src[s..e];
    if chunk == "," {
        out.push(Token { text: chunk, start: s, kind: Kind::Comma });
    } else if let Some(body) = chunk.strip_suffix(',') {
        out.push(Token { text: body, start: s, kind: Kind::Word });
        out.push(Token { text: ",", start: e - 1, kind: Kind::Comma });
    } else {
        out.push(Token { text: chunk, start: s, kind: Kind::Word });
    }
}

fn tokenize(src: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in src.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                push_chunk(src, s, i, &mut out);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        push_chunk(src, s, src.len(), &mut out);
    }
    // Sentence-final period.
    if let Some(last) = out.last_mut() {
        if last.kind == Kind::Word && last.text.ends_with('.') {
            if last.text.len() == 1 {
                out.pop();
            } else {
                last.text = &last.text[..last.text.len() - 1];
            }
        }
    }
    out
}

/// Accepted comparator phrases, longest first so that e.g. "greater than or
/// equal to" wins over "greater than".
const COMPARATOR_PHRASES: &[(&[&str], Comparator)] = &[
    (&["greater", "than", "or", "equal", "to"], Comparator::Geq),
    (&["lesser", "than", "or", "equal", "to"], Comparator::Leq),
    (&["less", "than", "or", "equal", "to"], Comparator::Leq),
    (&["not", "equal", "to"], Comparator::Neq),
    (&["not", "greater", "than"], Comparator::Ngt),
    (&["not", "lesser", "than"], Comparator::Nlt),
    (&["not", "less", "than"], Comparator::Nlt),
    (&["greater", "than"], Comparator::Gt),
    (&["lesser", "than"], Comparator::Lt),
    (&["less", "than"], Comparator::Lt),
    (&["equal", "to"], Comparator::Eq),
];

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.toks.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.src.len(), |t| t.start)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().map(|t| t.text.to_string()),
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t.is_kw(kw) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&[kw])),
        }
    }

    fn comparator_at(&self, pos: usize) -> Option<(Comparator, usize)> {
        COMPARATOR_PHRASES.iter().find_map(|(words, cmp)| {
            let matches = words.iter().enumerate().all(|(k, w)| {
                self.toks.get(pos + k).is_some_and(|t| t.is_kw(w))
            });
            matches.then_some((*cmp, words.len()))
        })
    }

    fn at_connective(&self) -> Option<Connective> {
        match self.peek() {
            Some(t) if t.is_kw("and") => Some(Connective::And),
            Some(t) if t.is_kw("or") => Some(Connective::Or),
            _ => None,
        }
    }

    fn sentence(&mut self) -> Result<Explanation, ParseError> {
        self.expect_kw("if")?;
        let clause = self.clause()?;
        if matches!(self.peek(), Some(t) if t.kind == Kind::Comma) {
            self.pos += 1;
        }
        self.expect_kw("then")?;
        self.consequent(clause)
    }

    fn clause(&mut self) -> Result<ClauseTree, ParseError> {
        let mut tree = ClauseTree::Cond(self.condition()?);
        let mut nodes = 0;
        while let Some(op) = self.at_connective() {
            if nodes == MAX_BINARY_NODES {
                return Err(self.error(&[",", "then"]));
            }
            self.pos += 1;
            let rhs = self.condition()?;
            tree = tree.join(op, ClauseTree::Cond(rhs));
            nodes += 1;
        }
        Ok(tree)
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut feature: Vec<&str> = Vec::new();
        let comparator = loop {
            if !feature.is_empty() {
                if let Some((cmp, len)) = self.comparator_at(self.pos) {
                    self.pos += len;
                    break cmp;
                }
            }
            match self.peek() {
                Some(t) if t.kind == Kind::Word && !t.is_kw("then") => {
                    feature.push(t.text);
                    self.pos += 1;
                }
                _ if feature.is_empty() => return Err(self.error(&["feature name"])),
                _ => return Err(self.error(&["comparator"])),
            }
        };

        let value_start = self.offset();
        let mut value: Vec<&str> = Vec::new();
        while let Some(t) = self.peek() {
            if t.kind != Kind::Word || t.is_kw("then") || self.at_connective().is_some() {
                break;
            }
            value.push(t.text);
            self.pos += 1;
        }
        if value.is_empty() {
            return Err(self.error(&["feature value"]));
        }
        let value = Value::from_token(&value.join(" "));
        if comparator.requires_numeric() && !value.is_numeric() {
            return Err(ParseError {
                offset: value_start,
                expected: vec!["numeric value".to_string()],
                found: Some(value.to_string()),
            });
        }
        Ok(Condition {
            feature: feature.join(" "),
            comparator,
            value,
        })
    }

    fn consequent(&mut self, clause: ClauseTree) -> Result<Explanation, ParseError> {
        let rest: Vec<Token<'a>> = self.toks[self.pos..].to_vec();
        if let Some(pos) = rest.iter().position(|t| t.kind == Kind::Comma) {
            self.pos += pos;
            return Err(self.error(&["label"]));
        }
        if rest.is_empty() {
            return Err(self.error(&["label"]));
        }

        let mut words: &[Token<'a>] = &rest;
        let mut target_name = None;
        if let Some(i) = words.iter().position(|t| t.is_kw("is")) {
            if i >= 1 && i + 1 < words.len() {
                let target = join(&words[..i]);
                if !target.eq_ignore_ascii_case("it") {
                    target_name = Some(target);
                }
                words = &words[i + 1..];
            }
        }
        let mut quantifier = None;
        if words.len() >= 2 {
            if let Ok(q) = Quantifier::from_word(words[0].text) {
                quantifier = Some(q);
                words = &words[1..];
            }
        }
        let mut label_negated = false;
        if words.len() >= 2 && words[0].is_kw("not") {
            label_negated = true;
            words = &words[1..];
        }
        self.pos = self.toks.len();
        Ok(Explanation {
            clause,
            quantifier,
            label: join(words),
            label_negated,
            target_name,
        })
    }
}

fn join(toks: &[Token<'_>]) -> String {
    toks.iter().map(|t| t.text).collect::<Vec<_>>().join(" ")
}

/// Parses one explanation sentence.
pub fn parse(text: &str) -> Result<Explanation, ParseError> {
    let mut p = Parser {
        src: text,
        toks: tokenize(text),
        pos: 0,
    };
    let expl = p.sentence()?;
    debug_assert_eq!(p.pos, p.toks.len());
    Ok(expl)
}
