//! N-Triples and Turtle export, N-Triples import.
//!
//! Export adds, beyond the stored statements, an `rdfs:label` for every
//! referenced entity owned by this graph, `fabio:ReviewArticle` typing for
//! review articles and `doco:Section` typing for sections. Import drops
//! those derived triples again, so export ∘ import ∘ export is a fixed
//! point.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{EntityId, EntityKind, Literal, Provenance, Statement, Term, TripleValue};
use crate::store::{GraphStore, NewEntity};
use crate::uri::{self, UriMapping};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RdfFormat {
    #[default]
    NTriples,
    Turtle,
}

impl RdfFormat {
    pub fn media_type(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "application/n-triples",
            RdfFormat::Turtle => "text/turtle",
        }
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" | "application/n-triples" => Ok(RdfFormat::NTriples),
            "ttl" | "turtle" | "text/turtle" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown RDF format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExportOptions {
    pub format: RdfFormat,
    /// Adds reified provenance (statement author and time) for each statement.
    pub provenance: bool,
    pub uris: UriMapping,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Object {
    Iri(String),
    Literal { value: String, datatype: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Triple {
    subject: String,
    predicate: String,
    object: Object,
}

fn iri_of(uris: &UriMapping, id: &EntityId) -> String {
    uris.iri(id).expect("non-literal entity")
}

fn object_of(store: &GraphStore, uris: &UriMapping, id: &EntityId) -> Object {
    match store.literal(id) {
        Some(lit) => Object::Literal {
            value: lit.value.clone(),
            datatype: uris.datatype_iri(&lit.datatype),
        },
        None => Object::Iri(iri_of(uris, id)),
    }
}

fn string_literal(value: &str) -> Object {
    Object::Literal {
        value: value.to_owned(),
        datatype: format!("{}string", uri::XSD_NS),
    }
}

fn collect(store: &GraphStore, statements: &[Statement], options: &ExportOptions) -> BTreeSet<Triple> {
    let uris = &options.uris;
    let mut triples = BTreeSet::new();
    let mut referenced: BTreeSet<&EntityId> = BTreeSet::new();
    for s in statements {
        triples.insert(Triple {
            subject: iri_of(uris, &s.subject),
            predicate: iri_of(uris, &s.predicate),
            object: object_of(store, uris, &s.object),
        });
        referenced.extend([&s.subject, &s.predicate]);
        if s.object.kind != EntityKind::Literal {
            referenced.insert(&s.object);
        }
        if s.predicate.key == vocab::TYPE && s.object.key == vocab::SMART_REVIEW {
            triples.insert(Triple {
                subject: iri_of(uris, &s.subject),
                predicate: uri::RDF_TYPE.into(),
                object: Object::Iri(uri::REVIEW_WORK_CLASS.into()),
            });
        }
        if s.predicate.key == vocab::HAS_SECTION {
            triples.insert(Triple {
                subject: iri_of(uris, &s.object),
                predicate: uri::RDF_TYPE.into(),
                object: Object::Iri(uri::SECTION_CLASS.into()),
            });
        }
        if options.provenance {
            let node = format!("{}{}", uris.statement_base, s.id);
            let mut add = |p: String, o: Object| {
                triples.insert(Triple {
                    subject: node.clone(),
                    predicate: p,
                    object: o,
                });
            };
            add(uri::RDF_TYPE.into(), Object::Iri(format!("{}Statement", uri::RDF_NS)));
            add(format!("{}subject", uri::RDF_NS), Object::Iri(iri_of(uris, &s.subject)));
            add(
                format!("{}predicate", uri::RDF_NS),
                Object::Iri(iri_of(uris, &s.predicate)),
            );
            add(format!("{}object", uri::RDF_NS), object_of(store, uris, &s.object));
            add(
                format!("{}wasAttributedTo", uri::PROV_NS),
                Object::Iri(format!("{}{}", uris.user_base, s.provenance.user_id)),
            );
            add(
                format!("{}generatedAtTime", uri::PROV_NS),
                Object::Literal {
                    value: s.provenance.timestamp_string(),
                    datatype: format!("{}dateTime", uri::XSD_NS),
                },
            );
        }
    }
    for id in referenced {
        if uris.is_external(id) {
            continue;
        }
        triples.insert(Triple {
            subject: iri_of(uris, id),
            predicate: uri::RDFS_LABEL.into(),
            object: string_literal(store.label(id)),
        });
    }
    triples
}

/// Serializes `statements` (entities resolved against `store`).
pub fn export_statements(store: &GraphStore, statements: &[Statement], options: &ExportOptions) -> String {
    let triples = collect(store, statements, options);
    match options.format {
        RdfFormat::NTriples => {
            let mut lines: Vec<String> = triples.iter().map(ntriples_line).collect();
            lines.sort();
            lines.dedup();
            let mut out = String::new();
            for line in lines {
                out.push_str(&line);
                out.push('\n');
            }
            out
        }
        RdfFormat::Turtle => turtle(&triples, &options.uris),
    }
}

/// The whole head graph.
pub fn export_full(store: &GraphStore, options: &ExportOptions) -> String {
    let statements: Vec<Statement> = store.all_statements().cloned().collect();
    export_statements(store, &statements, options)
}

fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn escape_iri(iri: &str) -> String {
    let mut out = String::with_capacity(iri.len());
    for c in iri.chars() {
        if c <= ' ' || "<>\"{}|^`\\".contains(c) {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out
}

fn ntriples_object(o: &Object) -> String {
    match o {
        Object::Iri(iri) => format!("<{}>", escape_iri(iri)),
        Object::Literal { value, datatype } => {
            format!("\"{}\"^^<{}>", escape_literal(value), escape_iri(datatype))
        }
    }
}

fn ntriples_line(t: &Triple) -> String {
    format!(
        "<{}> <{}> {} .",
        escape_iri(&t.subject),
        escape_iri(&t.predicate),
        ntriples_object(&t.object)
    )
}

fn turtle_name(iri: &str, prefixes: &[(&str, String)]) -> String {
    if iri == uri::RDF_TYPE {
        return "a".into();
    }
    for (prefix, ns) in prefixes {
        if let Some(local) = iri.strip_prefix(ns.as_str()) {
            let ok = local
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if ok {
                return format!("{prefix}:{local}");
            }
        }
    }
    format!("<{}>", escape_iri(iri))
}

fn turtle(triples: &BTreeSet<Triple>, uris: &UriMapping) -> String {
    let prefixes = uris.prefixes();
    let mut out = String::new();
    for (prefix, ns) in &prefixes {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    let mut by_subject: BTreeMap<&str, BTreeMap<&str, Vec<&Object>>> = BTreeMap::new();
    for t in triples {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry(&t.predicate)
            .or_default()
            .push(&t.object);
    }
    let object = |o: &Object| match o {
        Object::Iri(iri) => turtle_name(iri, &prefixes),
        Object::Literal { value, datatype } => {
            format!("\"{}\"^^{}", escape_literal(value), turtle_name(datatype, &prefixes))
        }
    };
    for (subject, predicates) in by_subject {
        out.push('\n');
        out.push_str(&turtle_name(subject, &prefixes));
        let count = predicates.len();
        for (i, (predicate, objects)) in predicates.into_iter().enumerate() {
            let objects: Vec<String> = objects.into_iter().map(object).collect();
            let _ = write!(
                out,
                "\n    {} {}{}",
                turtle_name(predicate, &prefixes),
                objects.join(", "),
                if i + 1 == count { " ." } else { " ;" }
            );
        }
        out.push('\n');
    }
    out
}

// ---- import --------------------------------------------------------------------

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| *c == ' ' || *c == '\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn escape(&mut self) -> Result<char> {
        let c = self.peek().ok_or_else(|| self.err("unterminated escape"))?;
        self.pos += 1;
        let hex = |me: &mut Self, n: usize| -> Result<char> {
            let digits: String = me
                .chars
                .get(me.pos..me.pos + n)
                .ok_or_else(|| me.err("short \\u escape"))?
                .iter()
                .collect();
            me.pos += n;
            u32::from_str_radix(&digits, 16)
                .ok()
                .and_then(char::from_u32)
                .ok_or_else(|| me.err(format!("bad escape \\u{digits}")))
        };
        Ok(match c {
            't' => '\t',
            'b' => '\u{8}',
            'n' => '\n',
            'r' => '\r',
            'f' => '\u{c}',
            '"' => '"',
            '\'' => '\'',
            '\\' => '\\',
            'u' => hex(self, 4)?,
            'U' => hex(self, 8)?,
            other => return Err(self.err(format!("unknown escape \\{other}"))),
        })
    }

    fn iri(&mut self) -> Result<String> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated IRI")),
                Some('>') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    out.push(self.escape()?);
                }
                Some(c) if c <= ' ' => return Err(self.err("whitespace in IRI")),
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn subject_or_predicate(&mut self) -> Result<String> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => Err(self.err("blank nodes are not supported")),
            _ => Err(self.err("expected an IRI")),
        }
    }

    fn object(&mut self) -> Result<Object> {
        match self.peek() {
            Some('<') => Ok(Object::Iri(self.iri()?)),
            Some('"') => {
                self.pos += 1;
                let mut value = String::new();
                loop {
                    match self.peek() {
                        None => return Err(self.err("unterminated literal")),
                        Some('"') => {
                            self.pos += 1;
                            break;
                        }
                        Some('\\') => {
                            self.pos += 1;
                            value.push(self.escape()?);
                        }
                        Some(c) => {
                            value.push(c);
                            self.pos += 1;
                        }
                    }
                }
                let datatype = match self.peek() {
                    Some('^') => {
                        self.expect('^')?;
                        self.expect('^')?;
                        self.iri()?
                    }
                    Some('@') => return Err(self.err("language-tagged literals are not supported")),
                    _ => format!("{}string", uri::XSD_NS),
                };
                Ok(Object::Literal { value, datatype })
            }
            Some('_') => Err(self.err("blank nodes are not supported")),
            _ => Err(self.err("expected an IRI or literal")),
        }
    }
}

fn parse_ntriples(doc: &str) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (index, line) in doc.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cur = Cursor {
            chars: trimmed.chars().collect(),
            pos: 0,
            line: index + 1,
        };
        let subject = cur.subject_or_predicate()?;
        cur.skip_ws();
        let predicate = cur.subject_or_predicate()?;
        cur.skip_ws();
        let object = cur.object()?;
        cur.skip_ws();
        cur.expect('.')?;
        cur.skip_ws();
        if cur.peek().is_some_and(|c| c != '#') {
            return Err(cur.err("trailing content after `.`"));
        }
        triples.push(Triple {
            subject,
            predicate,
            object,
        });
    }
    Ok(triples)
}

fn is_derived(t: &Triple, uris: &UriMapping) -> bool {
    t.subject.starts_with(&uris.statement_base)
        || (t.predicate == uri::RDF_TYPE
            && matches!(&t.object, Object::Iri(o) if o == uri::REVIEW_WORK_CLASS || o == uri::SECTION_CLASS))
}

/// Imports an N-Triples document in one batch attributed to the import
/// account. Returns the number of statements added; triples already present
/// (by value) are skipped. On any error nothing is imported.
pub fn import_ntriples(store: &mut GraphStore, doc: &str, uris: &UriMapping) -> Result<usize> {
    let triples = parse_ntriples(doc)?;
    let lookup = |iri: &str| uris.entity(iri).ok_or_else(|| Error::UnknownUriBase(iri.to_owned()));

    let mut labels: HashMap<EntityId, String> = HashMap::new();
    let mut content: Vec<(EntityId, EntityId, Term)> = Vec::new();
    for t in &triples {
        if is_derived(t, uris) {
            continue;
        }
        let subject = lookup(&t.subject)?;
        if t.predicate == uri::RDFS_LABEL {
            match &t.object {
                Object::Literal { value, .. } => {
                    labels.insert(subject, value.clone());
                }
                Object::Iri(_) => return Err(Error::Validation(format!("label of {} is not a literal", t.subject))),
            }
            continue;
        }
        let predicate = lookup(&t.predicate)?;
        if predicate.kind != EntityKind::Predicate {
            return Err(Error::Validation(format!("{} is not a predicate IRI", t.predicate)));
        }
        let object = match &t.object {
            Object::Iri(iri) => Term::Entity(lookup(iri)?),
            Object::Literal { value, datatype } => {
                Term::Literal(Literal::new(value.clone(), uris.datatype_from_iri(datatype)))
            }
        };
        content.push((subject, predicate, object));
    }

    let prov = Provenance::now(vocab::IMPORT_USER);
    store.write(|tx| {
        let ensure = |tx: &mut crate::store::Tx<'_>, id: &EntityId| -> Result<()> {
            if tx.contains(id) {
                return Ok(());
            }
            let label = labels.get(id).cloned().unwrap_or_else(|| id.key.clone());
            let spec = match id.kind {
                EntityKind::Resource => NewEntity::resource(label),
                EntityKind::Predicate => NewEntity::predicate(label),
                EntityKind::Class => NewEntity::class(label),
                EntityKind::Literal => unreachable!("literals never appear as IRIs"),
            };
            tx.create_entity(spec.with_key(id.key.clone()), &prov)?;
            Ok(())
        };
        let mut labelled: Vec<&EntityId> = labels.keys().collect();
        labelled.sort();
        for id in labelled {
            ensure(tx, id)?;
        }
        let mut existing: BTreeSet<TripleValue> = tx.all_statements().map(|s| tx.triple_value(s)).collect();
        let mut added = 0;
        for (subject, predicate, object) in content {
            ensure(tx, &subject)?;
            ensure(tx, &predicate)?;
            if let Term::Entity(o) = &object {
                ensure(tx, o)?;
            }
            let value = TripleValue {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object: object.clone(),
            };
            if !existing.insert(value) {
                continue;
            }
            let object = match object {
                Term::Entity(id) => id,
                Term::Literal(lit) => tx.new_literal(lit, &prov)?,
            };
            tx.add_statement(&subject, &predicate, &object, &prov)?;
            added += 1;
        }
        Ok(added)
    })
}
