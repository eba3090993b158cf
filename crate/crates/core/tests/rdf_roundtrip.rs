//! N-Triples export of the seeded review: typing and the import/export
//! fixed point.

use std::collections::BTreeSet;

use smartreview::rdf::{self, ExportOptions};
use smartreview::repository::{ExportScope, Repository};
use smartreview::uri::{self, UriMapping};
use smartreview::{fixture, EntityId, GraphStore};

fn seeded() -> (Repository, EntityId) {
    let mut repo = Repository::in_memory();
    let article = match fixture::seed(&mut repo.store).unwrap() {
        fixture::SeedOutcome::Created(id) => id,
        other => panic!("fresh store reported {other:?}"),
    };
    (repo, article)
}

/// (subject, object) of every rdf:type line, read straight off the text.
fn type_triples(doc: &str) -> BTreeSet<(String, String)> {
    let type_iri = format!("<{}>", uri::RDF_TYPE);
    doc.lines()
        .filter_map(|line| {
            let mut parts = line.splitn(3, ' ');
            let (s, p, rest) = (parts.next()?, parts.next()?, parts.next()?);
            (p == type_iri).then(|| {
                let o = rest.trim_end_matches(" .");
                (
                    s.trim_matches(['<', '>']).to_owned(),
                    o.trim_matches(['<', '>']).to_owned(),
                )
            })
        })
        .collect()
}

#[test]
fn full_export_is_a_fixed_point() {
    let (repo, _) = seeded();
    let first = repo.export(&ExportScope::Full, &ExportOptions::default()).unwrap();
    assert!(!first.is_empty());
    let mut lines: Vec<&str> = first.lines().collect();
    lines.sort_unstable();
    lines.dedup();
    assert_eq!(
        lines,
        first.lines().collect::<Vec<_>>(),
        "dump is sorted and duplicate-free"
    );

    let mut copy = GraphStore::in_memory();
    let added = rdf::import_ntriples(&mut copy, &first, &UriMapping::default()).unwrap();
    assert!(added > 0);
    let second = rdf::export_full(&copy, &ExportOptions::default());
    assert_eq!(first, second);

    // Importing the same document again adds nothing.
    assert_eq!(
        rdf::import_ntriples(&mut copy, &first, &UriMapping::default()).unwrap(),
        0
    );
    assert_eq!(rdf::export_full(&copy, &ExportOptions::default()), first);
}

#[test]
fn exports_are_deterministic() {
    let (repo, article) = seeded();
    for scope in [ExportScope::Full, ExportScope::Article(article)] {
        let a = repo.export(&scope, &ExportOptions::default()).unwrap();
        let b = repo.export(&scope, &ExportOptions::default()).unwrap();
        assert_eq!(a, b);
    }
    let (again, _) = seeded();
    assert_eq!(
        repo.export(&ExportScope::Full, &ExportOptions::default()).unwrap(),
        again.export(&ExportScope::Full, &ExportOptions::default()).unwrap()
    );
}

#[test]
fn sections_and_article_are_typed() {
    let (repo, article) = seeded();
    let doc = repo
        .export(&ExportScope::Article(article.clone()), &ExportOptions::default())
        .unwrap();
    let types = type_triples(&doc);
    let mapping = UriMapping::default();

    let article_iri = mapping.iri(&article).unwrap();
    assert!(types
        .iter()
        .any(|(s, o)| *s == article_iri && o.starts_with(uri::FABIO_NS)));

    let sections = repo.store.article(&article).unwrap().sections;
    assert_eq!(sections.len(), fixture::parse(fixture::FIXTURE).unwrap().sections.len());
    for section in &sections {
        let iri = mapping.iri(&section.id).unwrap();
        assert!(
            types
                .iter()
                .any(|(s, o)| *s == iri && (o.starts_with(uri::DEO_NS) || o.starts_with(uri::DOCO_NS))),
            "section {} has no DEO/DOCO type",
            section.heading
        );
    }
    let intro = mapping.iri(&sections[0].id).unwrap();
    assert!(types.contains(&(intro, format!("{}Introduction", uri::DEO_NS))));
}

#[test]
fn empty_graph_exports_nothing() {
    let store = GraphStore::in_memory();
    let doc = rdf::export_full(&store, &ExportOptions::default());
    let mut copy = GraphStore::in_memory();
    assert_eq!(
        rdf::import_ntriples(&mut copy, &doc, &UriMapping::default()).unwrap(),
        0
    );
    assert_eq!(rdf::export_full(&copy, &ExportOptions::default()), doc);
}
