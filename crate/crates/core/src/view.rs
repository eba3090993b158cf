//! Read access shared by the live head graph and frozen snapshots.

use std::collections::HashMap;

use crate::model::{Entity, EntityId, Literal, Statement, Term, TripleValue};
use crate::store::GraphStore;
use crate::vocab;

pub trait GraphView {
    /// Outgoing statements of `subject`, in statement id order.
    fn outgoing(&self, subject: &EntityId) -> Vec<&Statement>;

    fn entity(&self, id: &EntityId) -> Option<&Entity>;

    /// Every statement visible through this view, in id order.
    fn statements(&self) -> Vec<&Statement>;

    fn objects(&self, subject: &EntityId, predicate_key: &str) -> Vec<&EntityId> {
        self.outgoing(subject)
            .into_iter()
            .filter(|s| s.predicate.key == predicate_key)
            .map(|s| &s.object)
            .collect()
    }

    fn object(&self, subject: &EntityId, predicate_key: &str) -> Option<&EntityId> {
        self.objects(subject, predicate_key).into_iter().next()
    }

    fn literal(&self, id: &EntityId) -> Option<&Literal> {
        self.entity(id).and_then(|e| e.literal.as_ref())
    }

    fn literal_value(&self, subject: &EntityId, predicate_key: &str) -> Option<&str> {
        self.objects(subject, predicate_key)
            .into_iter()
            .find_map(|o| self.literal(o))
            .map(|l| l.value.as_str())
    }

    fn integer_value(&self, subject: &EntityId, predicate_key: &str) -> Option<i64> {
        self.literal_value(subject, predicate_key)
            .and_then(|v| v.trim().parse().ok())
    }

    fn classes_of(&self, id: &EntityId) -> Vec<&EntityId> {
        self.objects(id, vocab::TYPE)
    }

    fn has_class(&self, id: &EntityId, class_key: &str) -> bool {
        self.classes_of(id).iter().any(|c| c.key == class_key)
    }

    fn label<'a>(&'a self, id: &'a EntityId) -> &'a str {
        self.entity(id).map_or(id.key.as_str(), |e| e.label.as_str())
    }

    fn term(&self, id: &EntityId) -> Term {
        match self.literal(id) {
            Some(lit) => Term::Literal(lit.clone()),
            None => Term::Entity(id.clone()),
        }
    }

    fn triple_value(&self, s: &Statement) -> TripleValue {
        TripleValue {
            subject: s.subject.clone(),
            predicate: s.predicate.clone(),
            object: self.term(&s.object),
        }
    }

    /// Human-readable rendering of a value: labels for entities, lexical
    /// form for literals.
    fn display(&self, id: &EntityId) -> String {
        match self.literal(id) {
            Some(lit) => lit.value.clone(),
            None => self.label(id).to_owned(),
        }
    }
}

impl GraphView for GraphStore {
    fn outgoing(&self, subject: &EntityId) -> Vec<&Statement> {
        self.matching(Some(subject), None, None)
    }

    fn entity(&self, id: &EntityId) -> Option<&Entity> {
        GraphStore::entity(self, id)
    }

    fn statements(&self) -> Vec<&Statement> {
        self.all_statements().collect()
    }
}

/// A fixed set of statements resolved against the store's (immutable)
/// entity table.
pub struct SubgraphView<'a> {
    entities: &'a GraphStore,
    statements: Vec<&'a Statement>,
    by_subject: HashMap<&'a EntityId, Vec<&'a Statement>>,
}

impl<'a> SubgraphView<'a> {
    pub fn new(entities: &'a GraphStore, statements: impl IntoIterator<Item = &'a Statement>) -> Self {
        let mut all: Vec<&Statement> = statements.into_iter().collect();
        all.sort_by_key(|s| s.id);
        all.dedup_by_key(|s| s.id);
        let mut by_subject: HashMap<&EntityId, Vec<&Statement>> = HashMap::new();
        for s in &all {
            by_subject.entry(&s.subject).or_default().push(s);
        }
        Self {
            entities,
            statements: all,
            by_subject,
        }
    }
}

impl GraphView for SubgraphView<'_> {
    fn outgoing(&self, subject: &EntityId) -> Vec<&Statement> {
        self.by_subject.get(subject).cloned().unwrap_or_default()
    }

    fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.entity(id)
    }

    fn statements(&self) -> Vec<&Statement> {
        self.statements.clone()
    }
}
