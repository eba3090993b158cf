//! Scripted editing sessions with known expected outcomes.

use chrono::{DateTime, Duration, Utc};
use smartreview::article::SectionBody;
use smartreview::repository::Repository;
use smartreview::{EntityId, Provenance};

pub struct AckSession {
    pub repo: Repository,
    pub article: EntityId,
    /// User ids in order of their first statement on `article`.
    pub expected: Vec<String>,
    pub expected_names: Vec<String>,
    /// Edits only an unrelated article, earlier than everyone else.
    pub outsider: String,
}

/// Three users edit one article at fixed times; a fourth edits another.
pub fn acknowledgement_session() -> AckSession {
    let mut repo = Repository::in_memory();
    let names = ["Ada", "Grace", "Edsger", "Barbara"];
    let users: Vec<String> = names
        .iter()
        .map(|name| repo.store.register_account(name, None).unwrap().user_id)
        .collect();
    let start: DateTime<Utc> = DateTime::parse_from_rfc3339("2024-03-01T10:00:00Z").unwrap().to_utc();
    let at = |user: usize, minute: i64| Provenance::at(users[user].clone(), start + Duration::minutes(minute));
    let field = EntityId::resource("R278");
    let text = |md: &str| SectionBody::NaturalText {
        deo_type: "Introduction".into(),
        markdown: md.into(),
    };

    let article = repo
        .store
        .create_article("Shared review", &field, &at(1, 0))
        .unwrap()
        .id;
    let s1 = repo
        .store
        .add_section(&article, 0, "One", text("a"), &at(2, 1))
        .unwrap()
        .id;
    repo.store
        .add_section(&article, 1, "Two", text("b"), &at(0, 2))
        .unwrap();
    repo.store
        .update_section(&s1, None, Some(text("c")), &at(1, 3))
        .unwrap();
    let other = repo.store.create_article("Other", &field, &at(3, -10)).unwrap().id;
    repo.store
        .add_section(&other, 0, "Elsewhere", text("d"), &at(3, -9))
        .unwrap();

    let order = [1, 2, 0];
    AckSession {
        expected: order.iter().map(|&i| users[i].clone()).collect(),
        expected_names: order.iter().map(|&i| names[i].to_owned()).collect(),
        outsider: users[3].clone(),
        repo,
        article,
    }
}
