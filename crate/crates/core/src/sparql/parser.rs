use std::collections::BTreeMap;

use super::{QueryPlan, QueryTerm, SparqlError, TriplePattern};
use crate::uri::{self, UriMapping};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    Iri(String),
    PName { prefix: String, local: String },
    Str(String),
    Number(String),
    Caret2,
    LangTag,
    Word(String),
    Punct(char),
    Eof,
}

struct Token {
    tok: Tok,
    pos: usize,
}

/// Keywords that belong to SPARQL but not to the supported fragment.
const UNSUPPORTED: &[&str] = &[
    "OPTIONAL",
    "FILTER",
    "UNION",
    "LIMIT",
    "OFFSET",
    "ORDER",
    "GROUP",
    "HAVING",
    "MINUS",
    "BIND",
    "VALUES",
    "SERVICE",
    "GRAPH",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "REDUCED",
    "BASE",
    "NOT",
    "EXISTS",
    "INSERT",
    "DELETE",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "WITH",
];

fn syntax(text: &[char], pos: usize, message: impl Into<String>) -> SparqlError {
    let before = &text[..pos.min(text.len())];
    let line = before.iter().filter(|c| **c == '\n').count() + 1;
    let column = before.iter().rev().take_while(|c| **c != '\n').count() + 1;
    SparqlError::Syntax {
        position: pos,
        line,
        column,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn lex(text: &[char]) -> Result<Vec<Token>, SparqlError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let c = text[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < text.len() && text[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = match c {
            '?' | '$' => {
                i += 1;
                let n = text[i..].iter().take_while(|c| is_name_char(**c)).count();
                if n == 0 {
                    return Err(syntax(text, start, "empty variable name"));
                }
                i += n;
                Tok::Var(text[start + 1..i].iter().collect())
            }
            '<' => {
                i += 1;
                let mut iri = String::new();
                loop {
                    match text.get(i) {
                        None => return Err(syntax(text, start, "unterminated IRI")),
                        Some('>') => break,
                        Some(c) if c.is_whitespace() => return Err(syntax(text, i, "whitespace in IRI")),
                        Some(c) => iri.push(*c),
                    }
                    i += 1;
                }
                i += 1;
                Tok::Iri(iri)
            }
            '"' | '\'' => {
                let quote = c;
                i += 1;
                let mut value = String::new();
                loop {
                    match text.get(i) {
                        None | Some('\n') => return Err(syntax(text, start, "unterminated string")),
                        Some(c) if *c == quote => break,
                        Some('\\') => {
                            let escaped = match text.get(i + 1) {
                                Some('t') => '\t',
                                Some('n') => '\n',
                                Some('r') => '\r',
                                Some('b') => '\u{8}',
                                Some('f') => '\u{c}',
                                Some('"') => '"',
                                Some('\'') => '\'',
                                Some('\\') => '\\',
                                _ => return Err(syntax(text, i, "invalid escape")),
                            };
                            value.push(escaped);
                            i += 1;
                        }
                        Some(c) => value.push(*c),
                    }
                    i += 1;
                }
                i += 1;
                Tok::Str(value)
            }
            '^' if text.get(i + 1) == Some(&'^') => {
                i += 2;
                Tok::Caret2
            }
            '@' => {
                i += 1;
                i += text[i..]
                    .iter()
                    .take_while(|c| c.is_alphanumeric() || **c == '-')
                    .count();
                Tok::LangTag
            }
            c if c.is_ascii_digit() => {
                i += text[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                Tok::Number(text[start..i].iter().collect())
            }
            c if is_name_char(c) || c == ':' => {
                let n = text[i..].iter().take_while(|c| is_name_char(**c)).count();
                i += n;
                let name: String = text[start..i].iter().collect();
                if text.get(i) == Some(&':') {
                    i += 1;
                    let mut end = i;
                    while end < text.len() && (is_name_char(text[end]) || text[end] == '.') {
                        end += 1;
                    }
                    while end > i && text[end - 1] == '.' {
                        end -= 1;
                    }
                    let local: String = text[i..end].iter().collect();
                    i = end;
                    Tok::PName { prefix: name, local }
                } else {
                    Tok::Word(name)
                }
            }
            c => {
                i += 1;
                Tok::Punct(c)
            }
        };
        out.push(Token { tok, pos: start });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: text.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    text: &'a [char],
    toks: Vec<Token>,
    at: usize,
    prefixes: BTreeMap<String, String>,
    undeclared: Vec<String>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> SparqlError {
        syntax(self.text, self.pos(), message)
    }

    fn word_is(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    /// Fails loudly on a keyword or token of a construct outside the fragment.
    fn reject_unsupported(&self) -> Result<(), SparqlError> {
        match self.peek() {
            Tok::Word(w) => {
                let upper = w.to_ascii_uppercase();
                if UNSUPPORTED.contains(&upper.as_str()) {
                    return Err(SparqlError::UnsupportedFeature(upper));
                }
            }
            Tok::Punct('[') => return Err(SparqlError::UnsupportedFeature("blank node syntax".into())),
            Tok::Punct('(') => return Err(SparqlError::UnsupportedFeature("expressions".into())),
            Tok::PName { prefix, .. } if prefix == "_" => {
                return Err(SparqlError::UnsupportedFeature("blank nodes".into()))
            }
            Tok::Punct('/' | '|' | '^' | '+' | '*' | '!') => {
                return Err(SparqlError::UnsupportedFeature("property paths".into()))
            }
            Tok::Punct('{') => return Err(SparqlError::UnsupportedFeature("nested group patterns".into())),
            Tok::LangTag => return Err(SparqlError::UnsupportedFeature("language tags".into())),
            _ => {}
        }
        Ok(())
    }

    fn expect_punct(&mut self, c: char) -> Result<(), SparqlError> {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            self.reject_unsupported()?;
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn resolve(&mut self, prefix: String, local: String) -> QueryTerm {
        match self.prefixes.get(&prefix) {
            Some(ns) => QueryTerm::Iri(format!("{ns}{local}")),
            None => {
                self.undeclared.push(prefix.clone());
                QueryTerm::Prefixed { prefix, local }
            }
        }
    }

    fn prologue(&mut self) -> Result<(), SparqlError> {
        while self.word_is("PREFIX") {
            self.bump();
            let prefix = match self.bump() {
                Tok::PName { prefix, local } if local.is_empty() => prefix,
                _ => {
                    self.at -= 1;
                    return Err(self.err("expected a prefix name such as `ex:`"));
                }
            };
            match self.bump() {
                Tok::Iri(iri) => {
                    self.prefixes.insert(prefix, iri);
                }
                _ => {
                    self.at -= 1;
                    return Err(self.err("expected an IRI in angle brackets"));
                }
            }
        }
        Ok(())
    }

    fn term(&mut self, position: &str) -> Result<QueryTerm, SparqlError> {
        self.reject_unsupported()?;
        let pos = self.pos();
        let term = match self.bump() {
            Tok::Var(v) => QueryTerm::Var(v),
            Tok::Iri(iri) => QueryTerm::Iri(iri),
            Tok::PName { prefix, local } => self.resolve(prefix, local),
            Tok::Word(w) if w == "a" && position == "predicate" => QueryTerm::Iri(uri::RDF_TYPE.to_owned()),
            Tok::Str(value) => {
                let datatype = if *self.peek() == Tok::Caret2 {
                    self.bump();
                    match self.bump() {
                        Tok::Iri(iri) => Some(QueryTerm::Iri(iri)),
                        Tok::PName { prefix, local } => Some(self.resolve(prefix, local)),
                        _ => {
                            self.at -= 1;
                            return Err(self.err("expected a datatype IRI after `^^`"));
                        }
                    }
                } else {
                    self.reject_unsupported()?;
                    None
                };
                match datatype {
                    None => QueryTerm::Literal { value, datatype: None },
                    Some(QueryTerm::Iri(dt)) => QueryTerm::Literal {
                        value,
                        datatype: Some(dt),
                    },
                    Some(unresolved) => {
                        let prefix = prefix_of(&unresolved);
                        self.undeclared.push(prefix.clone());
                        QueryTerm::Literal {
                            value,
                            datatype: Some(unresolved.to_string()),
                        }
                    }
                }
            }
            Tok::Number(n) => QueryTerm::Literal {
                value: n,
                datatype: Some(format!("{}integer", uri::XSD_NS)),
            },
            Tok::Word(w) if w == "true" || w == "false" => QueryTerm::Literal {
                value: w,
                datatype: Some(format!("{}boolean", uri::XSD_NS)),
            },
            other => {
                self.at -= 1;
                return Err(syntax(
                    self.text,
                    pos,
                    format!("expected {position}, found {}", describe(&other)),
                ));
            }
        };
        if position != "object" && matches!(term, QueryTerm::Literal { .. }) {
            return Err(syntax(self.text, pos, format!("a literal cannot be the {position}")));
        }
        Ok(term)
    }

    fn triples(&mut self) -> Result<Vec<TriplePattern>, SparqlError> {
        let mut patterns = Vec::new();
        loop {
            self.reject_unsupported()?;
            if matches!(self.peek(), Tok::Punct('}')) {
                return Ok(patterns);
            }
            let subject = self.term("subject")?;
            loop {
                let predicate = self.term("predicate")?;
                loop {
                    let object = self.term("object")?;
                    patterns.push(TriplePattern {
                        subject: subject.clone(),
                        predicate: predicate.clone(),
                        object,
                    });
                    if *self.peek() == Tok::Punct(',') {
                        self.bump();
                    } else {
                        break;
                    }
                }
                if *self.peek() == Tok::Punct(';') {
                    while *self.peek() == Tok::Punct(';') {
                        self.bump();
                    }
                    if matches!(self.peek(), Tok::Punct('.') | Tok::Punct('}')) {
                        break;
                    }
                } else {
                    break;
                }
            }
            match self.peek() {
                Tok::Punct('.') => {
                    self.bump();
                }
                Tok::Punct('}') => {}
                _ => {
                    self.reject_unsupported()?;
                    return Err(self.err("expected `.`, `;`, `,` or `}`"));
                }
            }
        }
    }
}

fn prefix_of(term: &QueryTerm) -> String {
    match term {
        QueryTerm::Prefixed { prefix, .. } => prefix.clone(),
        other => other.to_string(),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Var(v) => format!("?{v}"),
        Tok::Iri(i) => format!("<{i}>"),
        Tok::PName { prefix, local } => format!("{prefix}:{local}"),
        Tok::Str(s) => format!("{s:?}"),
        Tok::Number(n) => n.clone(),
        Tok::Caret2 => "`^^`".into(),
        Tok::LangTag => "language tag".into(),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::Eof => "end of query".into(),
    }
}

/// Parses query text. Prefixes of `uris` (orkgr, orkgp, orkgc, rdf, rdfs,
/// xsd, ...) are predeclared; `PREFIX` lines may override them.
pub fn parse_query(text: &str, uris: &UriMapping) -> Result<QueryPlan, SparqlError> {
    let chars: Vec<char> = text.chars().collect();
    let toks = lex(&chars)?;
    let mut p = Parser {
        text: &chars,
        toks,
        at: 0,
        prefixes: uris.prefixes().into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
        undeclared: Vec::new(),
    };
    p.prologue()?;
    if !p.word_is("SELECT") {
        p.reject_unsupported()?;
        return Err(p.err("expected SELECT"));
    }
    p.bump();
    let mut distinct = false;
    if p.word_is("DISTINCT") {
        p.bump();
        distinct = true;
    }
    let mut projection = Vec::new();
    let mut star = false;
    if *p.peek() == Tok::Punct('*') {
        p.bump();
        star = true;
    } else {
        while let Tok::Var(v) = p.peek() {
            let v = v.clone();
            p.bump();
            if !projection.contains(&v) {
                projection.push(v);
            }
        }
        if projection.is_empty() {
            p.reject_unsupported()?;
            return Err(p.err("expected at least one variable after SELECT"));
        }
    }
    if *p.peek() != Tok::Punct('{') {
        p.reject_unsupported()?;
    }
    if p.word_is("WHERE") {
        p.bump();
    }
    p.expect_punct('{')?;
    let patterns = p.triples()?;
    p.expect_punct('}')?;
    if *p.peek() != Tok::Eof {
        p.reject_unsupported()?;
        return Err(p.err("unexpected content after the query"));
    }
    let mut plan = QueryPlan {
        prefixes: p.prefixes,
        undeclared: p.undeclared,
        projection,
        distinct,
        patterns,
    };
    if star {
        plan.projection = plan.variables();
    }
    let vars = plan.variables();
    if let Some(missing) = plan.projection.iter().find(|v| !vars.contains(v)) {
        return Err(SparqlError::UnboundProjection(missing.clone()));
    }
    Ok(plan)
}
