//! Snapshot immutability and diff algebra under random edit scripts.
//!
//! The oracle replays each script into a multiset of triple values; the
//! head is the support of that multiset, and the expected diff is plain
//! set difference against the published snapshot.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use smartreview::article::SectionBody;
use smartreview::versioning::{VersionRef, VersionStore};
use smartreview::{EntityId, GraphStore, Literal, NewEntity, Provenance, StatementId, Term, TripleValue};

pub const EDIT_PREDICATES: [&str; 3] = ["Pe1", "Pe2", "Pe3"];
const VALUES: [&str; 3] = ["a", "b", "c"];

#[derive(Debug, Clone)]
pub enum Op {
    /// subject index, predicate index, object index (literals, then a shared resource)
    Add(usize, usize, usize),
    /// index into the currently removable statements
    Remove(usize),
}

fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => (0..2usize, 0..EDIT_PREDICATES.len(), 0..=VALUES.len()).prop_map(|(s, p, o)| Op::Add(s, p, o)),
        2 => any::<usize>().prop_map(Op::Remove),
    ]
}

pub fn script() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(op_strategy(), 0..=20)
}

pub struct Session {
    pub store: GraphStore,
    pub versions: VersionStore,
    pub article: EntityId,
    /// Resources inside the article subgraph that edits may touch.
    pub subjects: [EntityId; 2],
    pub prov: Provenance,
}

pub fn session() -> Session {
    let mut store = GraphStore::in_memory();
    let user = store.register_account("Ada", None).unwrap();
    let prov = Provenance::now(user.user_id);
    for p in EDIT_PREDICATES {
        store.create_entity(NewEntity::predicate(p).with_key(p), &prov).unwrap();
    }
    let article = store
        .create_article("Review", &EntityId::resource("R278"), &prov)
        .unwrap();
    let body = SectionBody::NaturalText {
        deo_type: "Introduction".into(),
        markdown: "First line\nsecond line".into(),
    };
    let section = store.add_section(&article.id, 0, "Intro", body, &prov).unwrap();
    Session {
        store,
        versions: VersionStore::in_memory(),
        subjects: [article.contribution.clone(), section.id],
        article: article.id,
        prov,
    }
}

fn object_term(o: usize) -> Term {
    match VALUES.get(o) {
        Some(v) => Term::Literal(Literal::string(*v)),
        None => Term::Entity(EntityId::resource("R49584")),
    }
}

/// Applies `ops` to the store and mirrors them into `model`.
pub fn apply(f: &mut Session, ops: &[Op], model: &mut BTreeMap<TripleValue, usize>) {
    for op in ops {
        match *op {
            Op::Add(s, p, o) => {
                let subject = f.subjects[s].clone();
                let predicate = EntityId::predicate(EDIT_PREDICATES[p]);
                let term = object_term(o);
                let prov = f.prov.clone();
                f.store
                    .write(|tx| {
                        let object = match &term {
                            Term::Entity(id) => id.clone(),
                            Term::Literal(l) => tx.new_literal(l.clone(), &prov)?,
                        };
                        tx.add_statement(&subject, &predicate, &object, &prov)
                    })
                    .unwrap();
                *model
                    .entry(TripleValue {
                        subject,
                        predicate,
                        object: term,
                    })
                    .or_default() += 1;
            }
            Op::Remove(i) => {
                let removable: Vec<(StatementId, TripleValue)> = f
                    .store
                    .all_statements()
                    .filter(|s| EDIT_PREDICATES.contains(&s.predicate.key.as_str()))
                    .map(|s| (s.id, f.store.triple_value(s)))
                    .collect();
                if removable.is_empty() {
                    continue;
                }
                let (id, value) = removable[i % removable.len()].clone();
                f.store.remove_statement(id, &f.prov).unwrap();
                let count = model.get_mut(&value).expect("model tracks every edit statement");
                *count -= 1;
                if *count == 0 {
                    model.remove(&value);
                }
            }
        }
    }
}

pub fn snapshot_values(f: &Session, version: u64) -> BTreeSet<TripleValue> {
    let v = f.versions.get(&f.article, version).unwrap();
    v.statements.iter().map(|s| f.store.triple_value(s)).collect()
}

pub fn expected(before: &BTreeSet<TripleValue>, after: &BTreeSet<TripleValue>) -> (Vec<TripleValue>, Vec<TripleValue>) {
    (
        after.difference(before).cloned().collect(),
        before.difference(after).cloned().collect(),
    )
}

/// Publishing freezes v1: no later edit changes its record or bytes.
pub fn snapshot_immutable(ops: &[Op]) -> Result<(), TestCaseError> {
    let mut f = session();
    let v1 = f.versions.publish(&f.store, &f.article, "v1", &f.prov).unwrap();
    let mut model = BTreeMap::new();
    apply(&mut f, ops, &mut model);
    prop_assert_eq!(f.versions.get(&f.article, 1).unwrap(), &v1);
    prop_assert_eq!(&f.versions.get(&f.article, 1).unwrap().ntriples, &v1.ntriples);
    Ok(())
}

/// Diffs between v1, v2, v3 and head against set difference of the
/// replayed model, plus antisymmetry, composition and diff(v, v) = empty.
pub fn diff_algebra(ops: &[Op], more: &[Op]) -> Result<(), TestCaseError> {
    let mut f = session();
    f.versions.publish(&f.store, &f.article, "v1", &f.prov).unwrap();
    let base = snapshot_values(&f, 1);
    // Base content outside the edit predicates is untouched by the scripts.
    let fixed: BTreeSet<TripleValue> = base
        .iter()
        .filter(|t| !EDIT_PREDICATES.contains(&t.predicate.key.as_str()))
        .cloned()
        .collect();
    let support = |model: &BTreeMap<TripleValue, usize>| -> BTreeSet<TripleValue> {
        fixed.iter().cloned().chain(model.keys().cloned()).collect()
    };

    let mut model = BTreeMap::new();
    apply(&mut f, ops, &mut model);
    let head2 = support(&model);
    let d = f
        .versions
        .diff(&f.store, &f.article, VersionRef::Version(1), VersionRef::Head)
        .unwrap();
    prop_assert_eq!((d.added.clone(), d.removed.clone()), expected(&base, &head2));

    f.versions.publish(&f.store, &f.article, "v2", &f.prov).unwrap();
    apply(&mut f, more, &mut model);
    f.versions.publish(&f.store, &f.article, "v3", &f.prov).unwrap();
    let head3 = support(&model);

    let diff = |a: u64, b: u64| {
        f.versions
            .diff(&f.store, &f.article, VersionRef::Version(a), VersionRef::Version(b))
            .unwrap()
    };
    let (d12, d21, d23, d13) = (diff(1, 2), diff(2, 1), diff(2, 3), diff(1, 3));
    prop_assert_eq!((d12.added.clone(), d12.removed.clone()), expected(&base, &head2));
    prop_assert_eq!((d13.added.clone(), d13.removed.clone()), expected(&base, &head3));

    // Antisymmetry.
    prop_assert_eq!(&d12.added, &d21.removed);
    prop_assert_eq!(&d12.removed, &d21.added);

    // Composition: apply d12 then d23 to v1 and land on v3.
    let mut composed = base.clone();
    for t in &d12.removed {
        composed.remove(t);
    }
    composed.extend(d12.added.iter().cloned());
    for t in &d23.removed {
        composed.remove(t);
    }
    composed.extend(d23.added.iter().cloned());
    prop_assert_eq!(composed, snapshot_values(&f, 3));

    for v in 1..=3 {
        prop_assert!(diff(v, v).is_empty());
    }
    prop_assert!(d12.added.iter().all(|t| !d12.removed.contains(t)));
    Ok(())
}

pub fn check_snapshots(cases: u32) -> Result<u32, String> {
    crate::runner(cases)
        .run(&script(), |ops| snapshot_immutable(&ops))
        .map(|()| cases)
        .map_err(|e| e.to_string())
}

pub fn check_diffs(cases: u32) -> Result<u32, String> {
    crate::runner(cases)
        .run(&(script(), script()), |(ops, more)| diff_algebra(&ops, &more))
        .map(|()| cases)
        .map_err(|e| e.to_string())
}
