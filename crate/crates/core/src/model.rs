//! Entities, statements and provenance: the storage atoms of the graph.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};

/// The four entity kinds. Resources, predicates and classes mirror the
/// `orkgr:`, `orkgp:` and `orkgc:` namespaces; literals carry a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityKind {
    Resource,
    Predicate,
    Class,
    Literal,
}

impl EntityKind {
    pub const ALL: [EntityKind; 4] = [
        EntityKind::Resource,
        EntityKind::Predicate,
        EntityKind::Class,
        EntityKind::Literal,
    ];

    /// Prefix used for auto-generated keys.
    pub fn key_prefix(self) -> char {
        match self {
            EntityKind::Resource => 'R',
            EntityKind::Predicate => 'P',
            EntityKind::Class => 'C',
            EntityKind::Literal => 'L',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Resource => "Resource",
            EntityKind::Predicate => "Predicate",
            EntityKind::Class => "Class",
            EntityKind::Literal => "Literal",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Resource" | "resource" => Ok(EntityKind::Resource),
            "Predicate" | "predicate" => Ok(EntityKind::Predicate),
            "Class" | "class" => Ok(EntityKind::Class),
            "Literal" | "literal" => Ok(EntityKind::Literal),
            other => Err(format!("unknown entity kind `{other}`")),
        }
    }
}

/// Returns true when `key` is usable as an entity key.
///
/// Keys are restricted to `[A-Za-z0-9_-]+` so that they double as citation
/// keys and as Turtle local names.
pub fn is_valid_key(key: &str) -> bool {
    !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId {
    pub kind: EntityKind,
    pub key: String,
}

impl EntityId {
    pub fn new(kind: EntityKind, key: impl Into<String>) -> Self {
        Self { kind, key: key.into() }
    }

    pub fn resource(key: impl Into<String>) -> Self {
        Self::new(EntityKind::Resource, key)
    }

    pub fn predicate(key: impl Into<String>) -> Self {
        Self::new(EntityKind::Predicate, key)
    }

    pub fn class(key: impl Into<String>) -> Self {
        Self::new(EntityKind::Class, key)
    }

    pub fn literal(key: impl Into<String>) -> Self {
        Self::new(EntityKind::Literal, key)
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn is_literal(&self) -> bool {
        self.kind == EntityKind::Literal
    }
}

/// `Kind:key`, the form used in the statement log.
impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.key)
    }
}

impl FromStr for EntityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, key) = s
            .split_once(':')
            .ok_or_else(|| format!("expected Kind:key, got `{s}`"))?;
        if !is_valid_key(key) {
            return Err(format!("invalid key `{key}`"));
        }
        Ok(EntityId::new(kind.parse()?, key))
    }
}

/// A literal value with its datatype identifier (`xsd:string`, or an absolute IRI).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    pub datatype: String,
}

impl Literal {
    pub fn new(value: impl Into<String>, datatype: impl Into<String>) -> Self {
        Self {
            value: value.into(),
            datatype: datatype.into(),
        }
    }

    pub fn string(value: impl Into<String>) -> Self {
        Self::new(value, crate::vocab::XSD_STRING)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub label: String,
    /// Present iff the entity is a literal.
    pub literal: Option<Literal>,
}

/// A value as it appears in a statement's object position, compared by content.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Entity(EntityId),
    Literal(Literal),
}

impl Term {
    pub fn as_entity(&self) -> Option<&EntityId> {
        match self {
            Term::Entity(id) => Some(id),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Entity(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Entity(id) => f.write_str(&id.key),
            Term::Literal(lit) => write!(f, "\"{}\"^^{}", lit.value, lit.datatype),
        }
    }
}

/// Monotonic statement identifier, displayed as `S<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatementId(pub u64);

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

impl FromStr for StatementId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('S')
            .and_then(|n| n.parse().ok())
            .map(StatementId)
            .ok_or_else(|| format!("invalid statement id `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
}

impl Provenance {
    /// Stamps `user_id` with the current time truncated to milliseconds.
    pub fn now(user_id: impl Into<String>) -> Self {
        Self::at(user_id, Utc::now())
    }

    pub fn at(user_id: impl Into<String>, timestamp: DateTime<Utc>) -> Self {
        let millis = timestamp.timestamp_millis();
        Self {
            user_id: user_id.into(),
            timestamp: Utc.timestamp_millis_opt(millis).single().unwrap_or(timestamp),
        }
    }

    pub fn timestamp_string(&self) -> String {
        self.timestamp.to_rfc3339_opts(SecondsFormat::Millis, true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub id: StatementId,
    pub subject: EntityId,
    pub predicate: EntityId,
    pub object: EntityId,
    pub provenance: Provenance,
}

/// Content of a statement with identity and provenance stripped. Two users
/// asserting the same triple produce equal values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleValue {
    pub subject: EntityId,
    pub predicate: EntityId,
    pub object: Term,
}

impl PartialOrd for TripleValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TripleValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.subject, &self.predicate, &self.object).cmp(&(&other.subject, &other.predicate, &other.object))
    }
}

impl fmt::Display for TripleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject.key, self.predicate.key, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_id_parses_log_form() {
        let id: EntityId = "Resource:R278".parse().unwrap();
        assert_eq!(id, EntityId::resource("R278"));
        assert_eq!(id.to_string(), "Resource:R278");
        assert!("Resource:".parse::<EntityId>().is_err());
        assert!("Thing:R1".parse::<EntityId>().is_err());
        assert!("R1".parse::<EntityId>().is_err());
    }

    #[test]
    fn key_charset() {
        assert!(is_valid_key("HasSection"));
        assert!(is_valid_key("R135360"));
        assert!(is_valid_key("a_b-c"));
        assert!(!is_valid_key(""));
        assert!(!is_valid_key("two words"));
        assert!(!is_valid_key("orkg:R1"));
    }

    #[test]
    fn provenance_truncates_to_millis() {
        let t = Utc.timestamp_opt(1_700_000_000, 123_456_789).unwrap();
        let p = Provenance::at("u", t);
        assert_eq!(p.timestamp.timestamp_subsec_nanos(), 123_000_000);
        assert_eq!(p.timestamp_string(), "2023-11-14T22:13:20.123Z");
    }

    #[test]
    fn statement_ids_order_numerically() {
        assert!(StatementId(999_999) < StatementId(1_000_000));
        assert_eq!("S100000".parse::<StatementId>().unwrap(), StatementId(100_000));
    }
}
