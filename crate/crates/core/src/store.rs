//! Embedded statement store: every entity and provenance-stamped statement.
//!
//! The head graph is the fold of an append-only event log. Mutations run
//! through [`GraphStore::write`], which applies a closure's changes as one
//! batch: either all of them land (and are appended to the log together)
//! or none do.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::ops::Deref;
use std::path::Path;

use crate::error::{Error, Result};
use crate::log::{self, AccountRecord, Event, LogWriter};
use crate::model::{
    is_valid_key, Entity, EntityId, EntityKind, Literal, Provenance, Statement, StatementId, Term, TripleValue,
};
use crate::vocab;

const FIRST_COUNTER: u64 = 100_000;
const SUGGESTION_LIMIT: usize = 10;

/// A removed statement kept for history.
#[derive(Debug, Clone, PartialEq)]
pub struct Tombstone {
    pub statement: Statement,
    pub removal: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Account {
    pub user_id: String,
    pub display_name: String,
    pub token_hash: Option<String>,
}

#[derive(Debug, Default)]
pub struct GraphStore {
    entities: BTreeMap<EntityId, Entity>,
    shared: HashSet<EntityId>,
    vocabulary: HashSet<EntityId>,
    statements: BTreeMap<StatementId, Statement>,
    tombstones: Vec<Tombstone>,
    by_subject: HashMap<EntityId, BTreeSet<StatementId>>,
    by_predicate: HashMap<EntityId, BTreeSet<StatementId>>,
    by_object: HashMap<EntityId, BTreeSet<StatementId>>,
    counters: HashMap<EntityKind, u64>,
    next_statement: u64,
    next_account: u64,
    accounts: BTreeMap<String, Account>,
    events: u64,
    log: Option<LogWriter>,
}

impl GraphStore {
    /// A store with only the well-known vocabulary, not backed by a file.
    pub fn in_memory() -> Self {
        let mut store = GraphStore {
            next_statement: FIRST_COUNTER,
            next_account: FIRST_COUNTER,
            ..Default::default()
        };
        for kind in EntityKind::ALL {
            store.counters.insert(kind, FIRST_COUNTER);
        }
        for (id, label, shared) in vocab::entries() {
            store.vocabulary.insert(id.clone());
            if shared {
                store.shared.insert(id.clone());
            }
            store.entities.insert(
                id.clone(),
                Entity {
                    id,
                    label,
                    literal: None,
                },
            );
        }
        for user in [vocab::SYSTEM_USER, vocab::IMPORT_USER] {
            store.accounts.insert(
                user.to_owned(),
                Account {
                    user_id: user.to_owned(),
                    display_name: user.to_owned(),
                    token_hash: None,
                },
            );
        }
        store
    }

    /// Opens (or creates) a log-backed store, replaying existing events.
    pub fn open(path: &Path) -> Result<Self> {
        let mut store = Self::in_memory();
        for (index, event) in log::read_all(path)?.into_iter().enumerate() {
            store.replay(event).map_err(|message| Error::CorruptLog {
                line: index + 1,
                message,
            })?;
        }
        store.log = Some(LogWriter::open(path)?);
        Ok(store)
    }

    fn replay(&mut self, event: Event) -> std::result::Result<(), String> {
        match event {
            Event::Entity(entity) => {
                if self.entities.contains_key(&entity.id) {
                    return Err(format!("entity {} defined twice", entity.id));
                }
                self.bump_counter(&entity.id);
                self.entities.insert(entity.id.clone(), entity);
            }
            Event::Account(record) => {
                if let Some(n) = record.user_id.strip_prefix('U').and_then(|n| n.parse::<u64>().ok()) {
                    self.next_account = self.next_account.max(n + 1);
                }
                self.insert_account(record);
            }
            Event::Add(statement) => {
                for id in [&statement.subject, &statement.predicate, &statement.object] {
                    if !self.entities.contains_key(id) {
                        return Err(format!("statement {} references unknown {id}", statement.id));
                    }
                }
                if self.statements.contains_key(&statement.id) {
                    return Err(format!("statement {} added twice", statement.id));
                }
                self.next_statement = self.next_statement.max(statement.id.0 + 1);
                self.insert_statement(statement);
            }
            Event::Remove { statement, removal } => {
                let removed = self
                    .unindex_statement(statement.id)
                    .ok_or_else(|| format!("removal of absent statement {}", statement.id))?;
                self.tombstones.push(Tombstone {
                    statement: removed,
                    removal,
                });
            }
        }
        self.events += 1;
        Ok(())
    }

    fn bump_counter(&mut self, id: &EntityId) {
        if let Some(n) = id
            .key
            .strip_prefix(id.kind.key_prefix())
            .and_then(|n| n.parse::<u64>().ok())
        {
            let counter = self.counters.entry(id.kind).or_insert(FIRST_COUNTER);
            *counter = (*counter).max(n + 1);
        }
    }

    fn insert_account(&mut self, record: AccountRecord) {
        self.accounts.insert(
            record.user_id.clone(),
            Account {
                user_id: record.user_id,
                display_name: record.display_name,
                token_hash: record.token_hash,
            },
        );
    }

    fn insert_statement(&mut self, statement: Statement) {
        let id = statement.id;
        self.by_subject.entry(statement.subject.clone()).or_default().insert(id);
        self.by_predicate
            .entry(statement.predicate.clone())
            .or_default()
            .insert(id);
        self.by_object.entry(statement.object.clone()).or_default().insert(id);
        self.statements.insert(id, statement);
    }

    fn unindex_statement(&mut self, id: StatementId) -> Option<Statement> {
        let statement = self.statements.remove(&id)?;
        for (index, key) in [
            (&mut self.by_subject, &statement.subject),
            (&mut self.by_predicate, &statement.predicate),
            (&mut self.by_object, &statement.object),
        ] {
            if let Some(set) = index.get_mut(key) {
                set.remove(&id);
                if set.is_empty() {
                    index.remove(key);
                }
            }
        }
        Some(statement)
    }

    /// Runs `f` as one write batch.
    pub fn write<T>(&mut self, f: impl FnOnce(&mut Tx<'_>) -> Result<T>) -> Result<T> {
        let mut tx = Tx {
            store: self,
            undo: Vec::new(),
            pending: Vec::new(),
        };
        match f(&mut tx) {
            Ok(value) => {
                tx.commit()?;
                Ok(value)
            }
            Err(e) => {
                tx.rollback();
                Err(e)
            }
        }
    }

    // ---- reads -------------------------------------------------------------

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.get(id)
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn require(&self, id: &EntityId) -> Result<&Entity> {
        self.entities
            .get(id)
            .ok_or_else(|| Error::UnknownEntity(id.to_string()))
    }

    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    /// Label of an entity, or its key when unknown.
    pub fn label<'a>(&'a self, id: &'a EntityId) -> &'a str {
        self.entities.get(id).map_or(id.key.as_str(), |e| e.label.as_str())
    }

    pub fn is_shared(&self, id: &EntityId) -> bool {
        self.shared.contains(id)
    }

    pub fn is_vocabulary(&self, id: &EntityId) -> bool {
        self.vocabulary.contains(id)
    }

    pub fn term(&self, id: &EntityId) -> Term {
        match self.entities.get(id).and_then(|e| e.literal.as_ref()) {
            Some(lit) => Term::Literal(lit.clone()),
            None => Term::Entity(id.clone()),
        }
    }

    pub fn literal(&self, id: &EntityId) -> Option<&Literal> {
        self.entities.get(id).and_then(|e| e.literal.as_ref())
    }

    pub fn triple_value(&self, s: &Statement) -> TripleValue {
        TripleValue {
            subject: s.subject.clone(),
            predicate: s.predicate.clone(),
            object: self.term(&s.object),
        }
    }

    pub fn statement(&self, id: StatementId) -> Option<&Statement> {
        self.statements.get(&id)
    }

    pub fn statement_count(&self) -> usize {
        self.statements.len()
    }

    /// All head statements in id order.
    pub fn all_statements(&self) -> impl Iterator<Item = &Statement> {
        self.statements.values()
    }

    pub fn tombstones(&self) -> &[Tombstone] {
        &self.tombstones
    }

    /// Number of events applied since the store was created, including replayed ones.
    pub fn event_count(&self) -> u64 {
        self.events
    }

    /// Exact-match lookup on each supplied filter, in statement id order.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&EntityId>,
        predicate: Option<&EntityId>,
        object: Option<&EntityId>,
    ) -> Vec<&'a Statement> {
        let candidates: Vec<&BTreeSet<StatementId>> = [
            subject.map(|s| self.by_subject.get(s)),
            predicate.map(|p| self.by_predicate.get(p)),
            object.map(|o| self.by_object.get(o)),
        ]
        .into_iter()
        .flatten()
        .map(|set| set.map_or(&EMPTY, |s| s))
        .collect();
        let filter = |s: &&Statement| {
            subject.is_none_or(|x| &s.subject == x)
                && predicate.is_none_or(|x| &s.predicate == x)
                && object.is_none_or(|x| &s.object == x)
        };
        match candidates.iter().min_by_key(|set| set.len()) {
            Some(smallest) => smallest
                .iter()
                .filter_map(|id| self.statements.get(id))
                .filter(filter)
                .collect(),
            None => self.statements.values().collect(),
        }
    }

    pub fn get_statements(
        &self,
        subject: Option<&EntityId>,
        predicate: Option<&EntityId>,
        object: Option<&EntityId>,
    ) -> Vec<Statement> {
        self.matching(subject, predicate, object).into_iter().cloned().collect()
    }

    /// Objects of `subject --predicate-->`, in statement order.
    pub fn objects(&self, subject: &EntityId, predicate_key: &str) -> Vec<&EntityId> {
        self.matching(Some(subject), Some(&EntityId::predicate(predicate_key)), None)
            .into_iter()
            .map(|s| &s.object)
            .collect()
    }

    pub fn classes_of(&self, id: &EntityId) -> Vec<&EntityId> {
        self.objects(id, vocab::TYPE)
    }

    pub fn has_class(&self, id: &EntityId, class_key: &str) -> bool {
        self.classes_of(id).iter().any(|c| c.key == class_key)
    }

    /// First literal value of `subject --predicate-->`.
    pub fn literal_value(&self, subject: &EntityId, predicate_key: &str) -> Option<&str> {
        self.objects(subject, predicate_key)
            .into_iter()
            .find_map(|o| self.literal(o))
            .map(|l| l.value.as_str())
    }

    /// Statements reachable from `root` over outgoing edges, breadth first.
    ///
    /// Only resources are expanded; predicates, classes, literals and shared
    /// vocabulary are referenced but never walked into.
    pub fn traverse_subgraph(&self, root: &EntityId) -> Result<Vec<Statement>> {
        self.require(root)?;
        let mut visited: HashSet<&EntityId> = HashSet::from([root]);
        let mut queue: VecDeque<&EntityId> = VecDeque::from([root]);
        let mut found: BTreeMap<StatementId, &Statement> = BTreeMap::new();
        while let Some(node) = queue.pop_front() {
            for statement in self.matching(Some(node), None, None) {
                found.insert(statement.id, statement);
                let object = &statement.object;
                if object.kind == EntityKind::Resource && !self.shared.contains(object) && visited.insert(object) {
                    queue.push_back(object);
                }
            }
        }
        Ok(found.into_values().cloned().collect())
    }

    /// Case-insensitive label search: exact, then prefix, then substring.
    pub fn suggest_entities(&self, kind: EntityKind, query: &str) -> Vec<&Entity> {
        let needle = query.trim().to_lowercase();
        if needle.is_empty() {
            return Vec::new();
        }
        let mut ranked: Vec<(u8, &Entity)> = self
            .entities
            .values()
            .filter(|e| e.id.kind == kind)
            .filter_map(|e| {
                let label = e.label.to_lowercase();
                let rank = if label == needle {
                    0
                } else if label.starts_with(&needle) {
                    1
                } else if label.contains(&needle) {
                    2
                } else {
                    return None;
                };
                Some((rank, e))
            })
            .collect();
        ranked.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.id.key.cmp(&b.1.id.key)));
        ranked.into_iter().take(SUGGESTION_LIMIT).map(|(_, e)| e).collect()
    }

    // ---- accounts ------------------------------------------------------------

    pub fn account(&self, user_id: &str) -> Option<&Account> {
        self.accounts.get(user_id)
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn display_name<'a>(&'a self, user_id: &'a str) -> &'a str {
        self.accounts.get(user_id).map_or(user_id, |a| a.display_name.as_str())
    }

    fn next_free_key(&self, kind: EntityKind) -> (String, u64) {
        let mut n = self.counters.get(&kind).copied().unwrap_or(FIRST_COUNTER);
        loop {
            let key = format!("{}{n}", kind.key_prefix());
            let id = EntityId::new(kind, key.clone());
            let reserved = vocab::RESERVED_KEYS.iter().any(|(k, r)| *k == kind && *r == key);
            if !self.entities.contains_key(&id) && !reserved {
                return (key, n + 1);
            }
            n += 1;
        }
    }
}

static EMPTY: BTreeSet<StatementId> = BTreeSet::new();

enum Undo {
    Entity(EntityId, u64),
    Add(StatementId, u64),
    Remove(Statement),
    Account(String, u64),
}

/// An open write batch. Reads see the batch's own changes.
pub struct Tx<'a> {
    store: &'a mut GraphStore,
    undo: Vec<Undo>,
    pending: Vec<Event>,
}

impl Deref for Tx<'_> {
    type Target = GraphStore;

    fn deref(&self) -> &GraphStore {
        self.store
    }
}

/// Fields of a new entity.
#[derive(Debug, Clone, Default)]
pub struct NewEntity {
    pub kind: Option<EntityKind>,
    /// Explicit key; auto-generated when absent.
    pub key: Option<String>,
    pub label: String,
    pub literal: Option<Literal>,
    pub classes: Vec<EntityId>,
}

impl NewEntity {
    pub fn resource(label: impl Into<String>) -> Self {
        Self {
            kind: Some(EntityKind::Resource),
            label: label.into(),
            ..Default::default()
        }
    }

    pub fn predicate(label: impl Into<String>) -> Self {
        Self {
            kind: Some(EntityKind::Predicate),
            label: label.into(),
            ..Default::default()
        }
    }

    pub fn class(label: impl Into<String>) -> Self {
        Self {
            kind: Some(EntityKind::Class),
            label: label.into(),
            ..Default::default()
        }
    }

    pub fn literal(literal: Literal) -> Self {
        Self {
            kind: Some(EntityKind::Literal),
            label: literal.value.clone(),
            literal: Some(literal),
            ..Default::default()
        }
    }

    pub fn with_key(mut self, key: impl Into<String>) -> Self {
        self.key = Some(key.into());
        self
    }

    pub fn with_class(mut self, class_key: &str) -> Self {
        self.classes.push(EntityId::class(class_key));
        self
    }
}

impl Tx<'_> {
    fn record(&mut self, event: Event) {
        self.pending.push(event);
        self.store.events += 1;
    }

    /// Creates an entity; class memberships become type statements stamped with `prov`.
    pub fn create_entity(&mut self, spec: NewEntity, prov: &Provenance) -> Result<EntityId> {
        let kind = spec
            .kind
            .ok_or_else(|| Error::InvalidKind("entity kind is required".into()))?;
        match (kind, &spec.literal) {
            (EntityKind::Literal, None) => {
                return Err(Error::InvalidKind("a literal needs a value and datatype".into()))
            }
            (EntityKind::Literal, Some(lit))
                if lit.datatype.trim().is_empty() || lit.datatype.chars().any(char::is_whitespace) =>
            {
                return Err(Error::InvalidKind(format!("invalid datatype `{}`", lit.datatype)))
            }
            (k, Some(_)) if k != EntityKind::Literal => {
                return Err(Error::InvalidKind(format!("{k} cannot carry a literal value")))
            }
            _ => {}
        }
        if kind != EntityKind::Literal && spec.label.trim().is_empty() {
            return Err(Error::InvalidKind("label must not be empty".into()));
        }
        if kind != EntityKind::Resource && !spec.classes.is_empty() {
            return Err(Error::InvalidKind("only resources have classes".into()));
        }
        for class in &spec.classes {
            if class.kind != EntityKind::Class {
                return Err(Error::InvalidKind(format!("{class} is not a class")));
            }
            self.store.require(class)?;
        }
        if !spec.classes.is_empty() {
            self.require_user(&prov.user_id)?;
        }
        let previous_counter = self.store.counters[&kind];
        let key = match spec.key {
            Some(key) => {
                if !is_valid_key(&key) {
                    return Err(Error::InvalidKind(format!("invalid key `{key}`")));
                }
                let id = EntityId::new(kind, key.clone());
                if self.store.entities.contains_key(&id) {
                    return Err(Error::DuplicateKey(id));
                }
                key
            }
            None => {
                let (key, next) = self.store.next_free_key(kind);
                self.store.counters.insert(kind, next);
                key
            }
        };
        let id = EntityId::new(kind, key);
        let label = match &spec.literal {
            Some(lit) => lit.value.clone(),
            None => spec.label.trim().to_owned(),
        };
        let entity = Entity {
            id: id.clone(),
            label,
            literal: spec.literal,
        };
        self.store.entities.insert(id.clone(), entity.clone());
        // Explicit keys advance the counter exactly as replay does.
        self.store.bump_counter(&id);
        self.undo.push(Undo::Entity(id.clone(), previous_counter));
        self.record(Event::Entity(entity));
        for class in spec.classes {
            self.add_statement(&id, &vocab::type_predicate(), &class, prov)?;
        }
        Ok(id)
    }

    pub fn new_literal(&mut self, literal: Literal, prov: &Provenance) -> Result<EntityId> {
        self.create_entity(NewEntity::literal(literal), prov)
    }

    fn require_user(&self, user_id: &str) -> Result<()> {
        if self.store.accounts.contains_key(user_id) {
            Ok(())
        } else {
            Err(Error::UnknownUser(user_id.to_owned()))
        }
    }

    pub fn add_statement(
        &mut self,
        subject: &EntityId,
        predicate: &EntityId,
        object: &EntityId,
        prov: &Provenance,
    ) -> Result<Statement> {
        self.store.require(subject)?;
        self.store.require(predicate)?;
        self.store.require(object)?;
        if subject.kind == EntityKind::Literal {
            return Err(Error::InvalidSubjectKind(subject.clone()));
        }
        if predicate.kind != EntityKind::Predicate {
            return Err(Error::InvalidKind(format!("{predicate} is not a predicate")));
        }
        if predicate.key == vocab::TYPE && object.kind != EntityKind::Class {
            return Err(Error::InvalidKind(format!("{object} is not a class")));
        }
        self.require_user(&prov.user_id)?;
        let previous = self.store.next_statement;
        let statement = Statement {
            id: StatementId(previous),
            subject: subject.clone(),
            predicate: predicate.clone(),
            object: object.clone(),
            provenance: prov.clone(),
        };
        self.store.next_statement += 1;
        self.store.insert_statement(statement.clone());
        self.undo.push(Undo::Add(statement.id, previous));
        self.record(Event::Add(statement.clone()));
        Ok(statement)
    }

    /// Adds `subject --predicate--> "value"^^datatype` with a fresh literal.
    pub fn add_literal(
        &mut self,
        subject: &EntityId,
        predicate_key: &str,
        literal: Literal,
        prov: &Provenance,
    ) -> Result<Statement> {
        let object = self.new_literal(literal, prov)?;
        self.add_statement(subject, &EntityId::predicate(predicate_key), &object, prov)
    }

    pub fn remove_statement(&mut self, id: StatementId, prov: &Provenance) -> Result<Statement> {
        if !self.store.statements.contains_key(&id) {
            return Err(Error::UnknownStatement(id));
        }
        self.require_user(&prov.user_id)?;
        let statement = self.store.unindex_statement(id).expect("presence checked above");
        self.store.tombstones.push(Tombstone {
            statement: statement.clone(),
            removal: prov.clone(),
        });
        self.undo.push(Undo::Remove(statement.clone()));
        self.record(Event::Remove {
            statement: statement.clone(),
            removal: prov.clone(),
        });
        Ok(statement)
    }

    /// Makes `subject --predicate-->` hold exactly `desired`, compared by value.
    /// Statements already matching are kept; the rest are removed or added.
    pub fn reconcile(
        &mut self,
        subject: &EntityId,
        predicate_key: &str,
        desired: &[ObjectSpec],
        prov: &Provenance,
    ) -> Result<()> {
        let predicate = EntityId::predicate(predicate_key);
        let current: Vec<(StatementId, Term)> = self
            .store
            .matching(Some(subject), Some(&predicate), None)
            .into_iter()
            .map(|s| (s.id, self.store.term(&s.object)))
            .collect();
        let mut wanted: Vec<Term> = desired.iter().map(ObjectSpec::term).collect();
        for (id, term) in current {
            match wanted.iter().position(|w| *w == term) {
                Some(i) => {
                    wanted.remove(i);
                }
                None => {
                    self.remove_statement(id, prov)?;
                }
            }
        }
        for term in wanted {
            let object = match term {
                Term::Entity(id) => id,
                Term::Literal(lit) => self.new_literal(lit, prov)?,
            };
            self.add_statement(subject, &predicate, &object, prov)?;
        }
        Ok(())
    }

    pub fn register_account(&mut self, display_name: &str, token_hash: Option<String>) -> Result<Account> {
        let name = display_name.trim();
        if name.is_empty() {
            return Err(Error::InvalidName);
        }
        let previous = self.store.next_account;
        let user_id = format!("U{previous}");
        self.store.next_account += 1;
        let record = AccountRecord {
            user_id: user_id.clone(),
            token_hash,
            display_name: name.to_owned(),
        };
        self.store.insert_account(record.clone());
        self.undo.push(Undo::Account(user_id.clone(), previous));
        self.record(Event::Account(record));
        Ok(self.store.accounts[&user_id].clone())
    }

    fn literal_for(&self, event: &Event) -> Option<Literal> {
        match event {
            Event::Add(s) | Event::Remove { statement: s, .. } => self.store.literal(&s.object).cloned(),
            _ => None,
        }
    }

    fn commit(mut self) -> Result<()> {
        let lines: Vec<String> = self
            .pending
            .iter()
            .map(|e| log::encode(e, self.literal_for(e).as_ref()))
            .collect();
        let result = match self.store.log.as_mut() {
            Some(writer) => writer.append(&lines),
            None => Ok(()),
        };
        if result.is_err() {
            self.rollback_in_place();
        }
        result
    }

    fn rollback(mut self) {
        self.rollback_in_place();
    }

    fn rollback_in_place(&mut self) {
        let store = &mut *self.store;
        while let Some(step) = self.undo.pop() {
            match step {
                Undo::Entity(id, counter) => {
                    store.counters.insert(id.kind, counter);
                    store.entities.remove(&id);
                }
                Undo::Add(id, counter) => {
                    store.unindex_statement(id);
                    store.next_statement = counter;
                }
                Undo::Remove(statement) => {
                    store.tombstones.pop();
                    store.insert_statement(statement);
                }
                Undo::Account(user_id, counter) => {
                    store.accounts.remove(&user_id);
                    store.next_account = counter;
                }
            }
        }
        store.events -= self.pending.len() as u64;
        self.pending.clear();
    }
}

/// Desired object of a statement: an existing entity or a literal to create.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectSpec {
    Entity(EntityId),
    Literal(Literal),
}

impl ObjectSpec {
    pub fn term(&self) -> Term {
        match self {
            ObjectSpec::Entity(id) => Term::Entity(id.clone()),
            ObjectSpec::Literal(lit) => Term::Literal(lit.clone()),
        }
    }

    pub fn string(value: impl Into<String>) -> Self {
        ObjectSpec::Literal(Literal::string(value))
    }
}

impl From<EntityId> for ObjectSpec {
    fn from(id: EntityId) -> Self {
        ObjectSpec::Entity(id)
    }
}

impl GraphStore {
    /// Keeps auto keys of `kind` at or above `next`, so a batch of explicit
    /// keys can be created later without colliding with generated ones.
    pub fn reserve_keys(&mut self, kind: EntityKind, next: u64) {
        let counter = self.counters.entry(kind).or_insert(FIRST_COUNTER);
        *counter = (*counter).max(next);
    }

    pub fn create_entity(&mut self, spec: NewEntity, prov: &Provenance) -> Result<EntityId> {
        self.write(|tx| tx.create_entity(spec, prov))
    }

    pub fn add_statement(
        &mut self,
        subject: &EntityId,
        predicate: &EntityId,
        object: &EntityId,
        prov: &Provenance,
    ) -> Result<Statement> {
        self.write(|tx| tx.add_statement(subject, predicate, object, prov))
    }

    pub fn remove_statement(&mut self, id: StatementId, prov: &Provenance) -> Result<Statement> {
        self.write(|tx| tx.remove_statement(id, prov))
    }

    pub fn register_account(&mut self, display_name: &str, token_hash: Option<String>) -> Result<Account> {
        self.write(|tx| tx.register_account(display_name, token_hash))
    }

    pub fn log_path(&self) -> Option<&Path> {
        self.log.as_ref().map(LogWriter::path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (GraphStore, Provenance) {
        let mut store = GraphStore::in_memory();
        let user = store.register_account("Ada", None).unwrap();
        (store, Provenance::now(user.user_id))
    }

    #[test]
    fn create_resource_with_class() {
        let (mut store, prov) = setup();
        let id = store
            .create_entity(
                NewEntity::resource("Scholarly Knowledge Graphs").with_class(vocab::SMART_REVIEW),
                &prov,
            )
            .unwrap();
        assert_eq!(id.kind, EntityKind::Resource);
        assert_eq!(id.key, "R100000");
        assert!(store.has_class(&id, vocab::SMART_REVIEW));
        assert_eq!(store.label(&id), "Scholarly Knowledge Graphs");
    }

    #[test]
    fn create_literal() {
        let (mut store, prov) = setup();
        let id = store
            .create_entity(NewEntity::literal(Literal::string("T")), &prov)
            .unwrap();
        assert_eq!(id.key, "L100000");
        assert_eq!(store.literal(&id), Some(&Literal::new("T", "xsd:string")));
    }

    #[test]
    fn create_entity_validation() {
        let (mut store, prov) = setup();
        assert!(matches!(
            store.create_entity(NewEntity::resource(""), &prov),
            Err(Error::InvalidKind(_))
        ));
        let mut bad = NewEntity::resource("x");
        bad.literal = Some(Literal::string("v"));
        assert!(matches!(store.create_entity(bad, &prov), Err(Error::InvalidKind(_))));
        let no_value = NewEntity {
            kind: Some(EntityKind::Literal),
            ..Default::default()
        };
        assert!(matches!(
            store.create_entity(no_value, &prov),
            Err(Error::InvalidKind(_))
        ));
        assert!(matches!(
            store.create_entity(NewEntity::predicate("dup").with_key("P30"), &prov),
            Err(Error::DuplicateKey(_))
        ));
        assert!(matches!(
            store.create_entity(NewEntity::resource("x").with_key("has space"), &prov),
            Err(Error::InvalidKind(_))
        ));
    }

    #[test]
    fn auto_keys_skip_reserved_and_taken() {
        let (mut store, prov) = setup();
        store
            .create_entity(NewEntity::resource("taken").with_key("R100000"), &prov)
            .unwrap();
        let id = store.create_entity(NewEntity::resource("next"), &prov).unwrap();
        assert_eq!(id.key, "R100001");
        store.counters.insert(EntityKind::Resource, 135_360);
        let id = store.create_entity(NewEntity::resource("skip"), &prov).unwrap();
        assert_eq!(id.key, "R135361");
    }

    #[test]
    fn add_then_get() {
        let (mut store, prov) = setup();
        let r1 = store.create_entity(NewEntity::resource("a"), &prov).unwrap();
        let field = EntityId::resource(vocab::INFORMATION_SCIENCE);
        let p30 = EntityId::predicate(vocab::RESEARCH_FIELD);
        let s = store.add_statement(&r1, &p30, &field, &prov).unwrap();
        assert_eq!(store.get_statements(Some(&r1), None, None), vec![s.clone()]);
        assert_eq!(store.get_statements(None, Some(&p30), Some(&field)), vec![s]);
        assert!(store.get_statements(Some(&field), None, None).is_empty());
    }

    #[test]
    fn literal_subject_rejected() {
        let (mut store, prov) = setup();
        let lit = store
            .create_entity(NewEntity::literal(Literal::string("x")), &prov)
            .unwrap();
        let err = store
            .add_statement(
                &lit,
                &EntityId::predicate(vocab::RESEARCH_FIELD),
                &EntityId::resource(vocab::INFORMATION_SCIENCE),
                &prov,
            )
            .unwrap_err();
        assert!(matches!(err, Error::InvalidSubjectKind(_)));
    }

    #[test]
    fn unknown_entities_and_users() {
        let (mut store, prov) = setup();
        let r = store.create_entity(NewEntity::resource("a"), &prov).unwrap();
        let err = store
            .add_statement(&r, &EntityId::predicate("P1"), &r, &prov)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownEntity(_)));
        let stranger = Provenance::now("nobody");
        let err = store
            .add_statement(&r, &EntityId::predicate(vocab::RESEARCH_FIELD), &r, &stranger)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownUser(_)));
    }

    #[test]
    fn remove_twice() {
        let (mut store, prov) = setup();
        let r = store.create_entity(NewEntity::resource("a"), &prov).unwrap();
        let s = store
            .add_statement(&r, &EntityId::predicate(vocab::RESEARCH_FIELD), &r, &prov)
            .unwrap();
        store.remove_statement(s.id, &prov).unwrap();
        assert!(store.get_statements(Some(&r), None, None).is_empty());
        assert!(matches!(
            store.remove_statement(s.id, &prov),
            Err(Error::UnknownStatement(_))
        ));
        assert_eq!(store.tombstones().len(), 1);
    }

    #[test]
    fn failed_batch_leaves_no_trace() {
        let (mut store, prov) = setup();
        let events = store.event_count();
        let err = store.write(|tx| {
            let r = tx.create_entity(NewEntity::resource("a"), &prov)?;
            tx.add_statement(&r, &EntityId::predicate("nope"), &r, &prov)
        });
        assert!(err.is_err());
        assert_eq!(store.event_count(), events);
        assert_eq!(store.statement_count(), 0);
        let r = store.create_entity(NewEntity::resource("b"), &prov).unwrap();
        assert_eq!(r.key, "R100000");
    }

    #[test]
    fn traversal_cases() {
        let (mut store, prov) = setup();
        let a = store.create_entity(NewEntity::resource("a"), &prov).unwrap();
        assert!(store.traverse_subgraph(&a).unwrap().is_empty());
        let b = store.create_entity(NewEntity::resource("b"), &prov).unwrap();
        let p = EntityId::predicate(vocab::RESEARCH_PROBLEM);
        let ab = store.add_statement(&a, &p, &b, &prov).unwrap();
        let ba = store.add_statement(&b, &p, &a, &prov).unwrap();
        let got = store.traverse_subgraph(&a).unwrap();
        assert_eq!(got, vec![ab.clone(), ba.clone()]);
        assert_eq!(store.traverse_subgraph(&a).unwrap(), got);

        // shared vocabulary is referenced, not expanded
        let field = EntityId::resource(vocab::INFORMATION_SCIENCE);
        let to_field = store.add_statement(&b, &p, &field, &prov).unwrap();
        let other = store.create_entity(NewEntity::resource("c"), &prov).unwrap();
        store.add_statement(&field, &p, &other, &prov).unwrap();
        let got = store.traverse_subgraph(&a).unwrap();
        assert_eq!(got, vec![ab, ba, to_field]);
        assert!(matches!(
            store.traverse_subgraph(&EntityId::resource("R9")),
            Err(Error::UnknownEntity(_))
        ));
    }

    #[test]
    fn suggestions_rank_exact_prefix_substring() {
        let (mut store, prov) = setup();
        store
            .create_entity(NewEntity::predicate("field of research"), &prov)
            .unwrap();
        store
            .create_entity(NewEntity::predicate("research field notes"), &prov)
            .unwrap();
        let got: Vec<&str> = store
            .suggest_entities(EntityKind::Predicate, "research field")
            .iter()
            .map(|e| e.id.key.as_str())
            .collect();
        assert_eq!(got, vec!["P30", "P100001"]);
        let got: Vec<&str> = store
            .suggest_entities(EntityKind::Predicate, "RES")
            .iter()
            .map(|e| e.id.key.as_str())
            .collect();
        // prefix matches (P100001, P30, P32 by key) before substring ones
        assert_eq!(&got[..3], &["P100001", "P30", "P32"]);
        assert!(got.contains(&"P100000"));
        assert!(store.suggest_entities(EntityKind::Resource, "zzz-nomatch").is_empty());
        let many = store.suggest_entities(EntityKind::Class, "e");
        assert_eq!(many.len(), 10);
    }

    #[test]
    fn log_replay_restores_state() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.log");
        let (r, s2) = {
            let mut store = GraphStore::open(&path).unwrap();
            let user = store.register_account("Ada", Some("ab".into())).unwrap();
            let prov = Provenance::now(&user.user_id);
            let r = store
                .create_entity(NewEntity::resource("x y").with_class(vocab::PAPER), &prov)
                .unwrap();
            let s = store
                .write(|tx| tx.add_literal(&r, vocab::TITLE, Literal::string("T"), &prov))
                .unwrap();
            store.remove_statement(s.id, &prov).unwrap();
            let s2 = store
                .write(|tx| tx.add_literal(&r, vocab::TITLE, Literal::string("U"), &prov))
                .unwrap();
            (r, s2)
        };
        let store = GraphStore::open(&path).unwrap();
        assert_eq!(store.label(&r), "x y");
        assert!(store.has_class(&r, vocab::PAPER));
        assert_eq!(store.literal_value(&r, vocab::TITLE), Some("U"));
        assert_eq!(store.tombstones().len(), 1);
        assert_eq!(store.statement(s2.id), Some(&s2));
        assert_eq!(store.account("U100000").unwrap().token_hash.as_deref(), Some("ab"));
        let mut store = store;
        let prov = Provenance::now("U100000");
        let next = store.create_entity(NewEntity::resource("n"), &prov).unwrap();
        assert_eq!(next.key, "R100001");
    }
}
