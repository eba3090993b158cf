//! Rendering the seeded review: document structure, accessibility and
//! stability of published snapshots.

use roxmltree::Document;
use smartreview::article::SectionBody;
use smartreview::repository::Repository;
use smartreview::versioning::VersionRef;
use smartreview::{fixture, EntityId, Provenance};
use smartreview_testkit::html_checks::{self, has_class};
use smartreview_testkit::sessions;

fn seeded() -> (Repository, EntityId) {
    let mut repo = Repository::in_memory();
    let article = match fixture::seed(&mut repo.store).unwrap() {
        fixture::SeedOutcome::Created(id) => id,
        other => panic!("fresh store reported {other:?}"),
    };
    (repo, article)
}

fn parse(html: &str) -> Document<'_> {
    html_checks::parse(html).unwrap()
}

#[test]
fn head_render_has_a_sound_outline() {
    let (repo, article) = seeded();
    let rendered = repo.render(&article, VersionRef::Head).unwrap();
    assert!(rendered.html.starts_with("<!DOCTYPE html>"));
    let doc = parse(&rendered.html);

    let outline = html_checks::check_accessible(&rendered.html).unwrap();
    // Markdown headings inside a section sit below the section heading.
    assert!(outline.levels.contains(&3));
    assert_eq!(outline.comparison_tables, 3);
    assert_eq!(outline.visualizations, 1);

    let anchors: Vec<&str> = rendered.outline.iter().map(|e| e.anchor.as_str()).collect();
    for anchor in anchors {
        assert!(
            doc.descendants().any(|n| n.attribute("id") == Some(anchor)),
            "outline points at missing #{anchor}"
        );
    }
}

#[test]
fn citations_number_in_order_of_first_use() {
    let (repo, article) = seeded();
    let html = repo.render(&article, VersionRef::Head).unwrap().html;
    let doc = parse(&html);
    let mut seen: Vec<String> = Vec::new();
    for link in doc.descendants().filter(|n| has_class(*n, "citation")) {
        let key = link.attribute("href").unwrap().trim_start_matches("#ref-").to_owned();
        let label = link.text().unwrap();
        if !seen.contains(&key) {
            seen.push(key.clone());
        }
        let n = seen.iter().position(|k| *k == key).unwrap() + 1;
        assert_eq!(label, format!("[{n}]"));
    }
    let listed: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("li") && n.attribute("id").is_some_and(|id| id.starts_with("ref-")))
        .map(|n| n.attribute("id").unwrap().trim_start_matches("ref-"))
        .collect();
    assert_eq!(listed, seen);
    // Rendering again yields the same numbering.
    assert_eq!(html, repo.render(&article, VersionRef::Head).unwrap().html);
}

#[test]
fn published_render_ignores_later_edits() {
    let (mut repo, article) = seeded();
    let user = repo.store.register_account("Late editor", None).unwrap();
    let prov = Provenance::now(user.user_id);
    repo.publish(&article, "First public version", &prov).unwrap();
    let frozen = repo.render(&article, VersionRef::Version(1)).unwrap().html;

    let first = repo.store.article(&article).unwrap().sections[0].id.clone();
    let body = SectionBody::NaturalText {
        deo_type: "Introduction".into(),
        markdown: "Rewritten after publication [@R135402].".into(),
    };
    repo.store
        .update_section(&first, Some("Background"), Some(body), &prov)
        .unwrap();

    let head = repo.render(&article, VersionRef::Head).unwrap().html;
    assert!(head.contains("Background"));
    assert_eq!(repo.render(&article, VersionRef::Version(1)).unwrap().html, frozen);
    assert!(!frozen.contains("Rewritten after publication"));
}

#[test]
fn acknowledgements_follow_first_contribution() {
    let session = sessions::acknowledgement_session();
    let acks = session
        .repo
        .acknowledgements(&session.article, VersionRef::Head)
        .unwrap();
    assert_eq!(acks, session.expected);
    assert!(!acks.contains(&session.outsider));

    let html = session.repo.render(&session.article, VersionRef::Head).unwrap().html;
    let doc = parse(&html);
    let listed: Vec<&str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("li") && n.attribute("data-user").is_some())
        .map(|n| n.text().unwrap())
        .collect();
    assert_eq!(listed, session.expected_names);
}
