//! Published snapshots of articles and diffs between them.
//!
//! The head graph is the only mutable version of an article. Publishing
//! copies the article's subgraph, by value, into an immutable
//! [`PublishedVersion`]. Snapshots live outside the graph: on disk each one
//! is `versions/<article>/v<n>.nt` (sorted N-Triples, served verbatim) next
//! to a `v<n>.json` sidecar carrying metadata and the statement records.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use similar::{ChangeTag, TextDiff};

use crate::article::{self, SectionBody};
use crate::error::{Error, Result};
use crate::model::{EntityId, Provenance, Statement, TripleValue};
use crate::rdf::{self, ExportOptions};
use crate::store::GraphStore;
use crate::view::{GraphView, SubgraphView};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedVersion {
    pub version: u64,
    pub article: EntityId,
    pub timestamp: DateTime<Utc>,
    pub description: String,
    pub publisher: String,
    /// The article subgraph at publish time.
    pub statements: Vec<Statement>,
    /// Descriptions and links of borrowed vocabulary, see
    /// [`article::context_statements`].
    pub context: Vec<Statement>,
    /// Sorted N-Triples of the snapshot, fixed at publish time.
    #[serde(skip)]
    pub ntriples: String,
}

impl PublishedVersion {
    pub fn view<'a>(&'a self, store: &'a GraphStore) -> SubgraphView<'a> {
        SubgraphView::new(store, self.statements.iter().chain(&self.context))
    }

    pub fn editor_count(&self) -> usize {
        self.statements
            .iter()
            .map(|s| s.provenance.user_id.as_str())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn summary(&self) -> VersionSummary {
        VersionSummary {
            version: self.version,
            timestamp: self.timestamp,
            description: self.description.clone(),
            editor_count: self.editor_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VersionSummary {
    pub version: u64,
    pub timestamp: DateTime<Utc>,
    pub description: String,
    pub editor_count: usize,
}

/// One side of a diff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VersionRef {
    Head,
    Version(u64),
}

impl std::str::FromStr for VersionRef {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("head") {
            return Ok(VersionRef::Head);
        }
        s.trim_start_matches(['v', 'V'])
            .parse()
            .map(VersionRef::Version)
            .map_err(|_| format!("expected a version number or HEAD, got `{s}`"))
    }
}

impl std::fmt::Display for VersionRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VersionRef::Head => f.write_str("HEAD"),
            VersionRef::Version(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineOp {
    Equal,
    Insert,
    Delete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffLine {
    pub op: LineOp,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextHunk {
    /// Zero-based first line of the hunk on each side.
    pub old_start: usize,
    pub new_start: usize,
    pub lines: Vec<DiffLine>,
}

/// Line changes to one natural-text section present on either side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionTextDiff {
    pub section: EntityId,
    pub heading: String,
    pub hunks: Vec<TextHunk>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionDiff {
    pub from: VersionRef,
    pub to: VersionRef,
    pub added: Vec<TripleValue>,
    pub removed: Vec<TripleValue>,
    pub text_diffs: Vec<SectionTextDiff>,
}

impl VersionDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.text_diffs.is_empty()
    }
}

const CONTEXT_LINES: usize = 2;

/// Line hunks turning `old` into `new`; empty when the texts are equal.
pub fn text_hunks(old: &str, new: &str) -> Vec<TextHunk> {
    let diff = TextDiff::from_lines(old, new);
    diff.grouped_ops(CONTEXT_LINES)
        .iter()
        .filter(|group| !group.is_empty())
        .map(|group| TextHunk {
            old_start: group[0].old_range().start,
            new_start: group[0].new_range().start,
            lines: group
                .iter()
                .flat_map(|op| diff.iter_changes(op))
                .map(|change| DiffLine {
                    op: match change.tag() {
                        ChangeTag::Equal => LineOp::Equal,
                        ChangeTag::Insert => LineOp::Insert,
                        ChangeTag::Delete => LineOp::Delete,
                    },
                    text: change.value().trim_end_matches(['\n', '\r']).to_owned(),
                })
                .collect(),
        })
        .collect()
}

fn value_set<V: GraphView + ?Sized>(view: &V, statements: &[&Statement]) -> BTreeSet<TripleValue> {
    statements.iter().map(|s| view.triple_value(s)).collect()
}

/// (heading, markdown) of every natural-text section reachable in `view`.
fn texts<V: GraphView + ?Sized>(view: &V, article: &EntityId) -> BTreeMap<EntityId, (String, String)> {
    let mut out = BTreeMap::new();
    for id in article::section_ids(view, article) {
        if let Ok(section) = article::load_section(view, id) {
            if let SectionBody::NaturalText { markdown, .. } = section.body {
                out.insert(section.id, (section.heading, markdown));
            }
        }
    }
    out
}

/// Statement-level and prose-level differences between two views of one article.
pub fn diff_views<A, B>(article: &EntityId, from: (&A, VersionRef), to: (&B, VersionRef)) -> VersionDiff
where
    A: GraphView + ?Sized,
    B: GraphView + ?Sized,
{
    let old = value_set(from.0, &from.0.statements());
    let new = value_set(to.0, &to.0.statements());
    let old_texts = texts(from.0, article);
    let new_texts = texts(to.0, article);
    let sections: BTreeSet<&EntityId> = old_texts.keys().chain(new_texts.keys()).collect();
    let text_diffs = sections
        .into_iter()
        .filter_map(|id| {
            let (old_heading, old_text) = old_texts.get(id).map_or(("", ""), |(h, t)| (h.as_str(), t.as_str()));
            let (new_heading, new_text) = new_texts.get(id).map_or(("", ""), |(h, t)| (h.as_str(), t.as_str()));
            let hunks = text_hunks(old_text, new_text);
            (!hunks.is_empty()).then(|| SectionTextDiff {
                section: id.clone(),
                heading: if new_heading.is_empty() {
                    old_heading
                } else {
                    new_heading
                }
                .to_owned(),
                hunks,
            })
        })
        .collect();
    VersionDiff {
        from: from.1,
        to: to.1,
        added: new.difference(&old).cloned().collect(),
        removed: old.difference(&new).cloned().collect(),
        text_diffs,
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    version: u64,
    article: String,
    timestamp: DateTime<Utc>,
    description: String,
    publisher: String,
    statements: Vec<Statement>,
    context: Vec<Statement>,
}

/// Every published version, optionally mirrored to a directory.
#[derive(Debug, Default)]
pub struct VersionStore {
    dir: Option<PathBuf>,
    by_article: HashMap<EntityId, Vec<PublishedVersion>>,
}

impl VersionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads all snapshots under `dir` (created if missing).
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut by_article: HashMap<EntityId, Vec<PublishedVersion>> = HashMap::new();
        for article_dir in fs::read_dir(dir)? {
            let article_dir = article_dir?.path();
            if !article_dir.is_dir() {
                continue;
            }
            for file in fs::read_dir(&article_dir)? {
                let path = file?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    let version = read_version(&path)?;
                    by_article.entry(version.article.clone()).or_default().push(version);
                }
            }
        }
        for versions in by_article.values_mut() {
            versions.sort_by_key(|v| v.version);
        }
        Ok(Self {
            dir: Some(dir.to_owned()),
            by_article,
        })
    }

    pub fn versions(&self, article: &EntityId) -> &[PublishedVersion] {
        self.by_article.get(article).map_or(&[], Vec::as_slice)
    }

    pub fn get(&self, article: &EntityId, version: u64) -> Result<&PublishedVersion> {
        self.versions(article)
            .iter()
            .find(|v| v.version == version)
            .ok_or_else(|| Error::UnknownVersion {
                article: article.key.clone(),
                version,
            })
    }

    pub fn list(&self, store: &GraphStore, article: &EntityId) -> Result<Vec<VersionSummary>> {
        article::load_article(store, article)?;
        Ok(self.versions(article).iter().map(PublishedVersion::summary).collect())
    }

    /// Freezes the article's current subgraph as the next version.
    pub fn publish(
        &mut self,
        store: &GraphStore,
        article: &EntityId,
        description: &str,
        prov: &Provenance,
    ) -> Result<PublishedVersion> {
        let loaded = article::load_article(store, article)?;
        if loaded.sections.is_empty() {
            return Err(Error::EmptyArticle(article.key.clone()));
        }
        if store.account(&prov.user_id).is_none() {
            return Err(Error::UnknownUser(prov.user_id.clone()));
        }
        let (statements, context) = article::article_scope(store, article)?;
        let next = self.versions(article).last().map_or(1, |v| v.version + 1);
        let all: Vec<Statement> = statements.iter().chain(&context).cloned().collect();
        let version = PublishedVersion {
            version: next,
            article: article.clone(),
            timestamp: prov.timestamp,
            description: description.trim().to_owned(),
            publisher: prov.user_id.clone(),
            ntriples: rdf::export_statements(store, &all, &ExportOptions::default()),
            statements,
            context,
        };
        if let Some(dir) = &self.dir {
            write_version(dir, &version)?;
        }
        self.by_article
            .entry(article.clone())
            .or_default()
            .push(version.clone());
        Ok(version)
    }

    pub fn diff<'a>(
        &'a self,
        store: &'a GraphStore,
        article: &EntityId,
        from: VersionRef,
        to: VersionRef,
    ) -> Result<VersionDiff> {
        article::load_article(store, article)?;
        let resolve = |r: VersionRef| -> Result<Option<&PublishedVersion>> {
            match r {
                VersionRef::Head => Ok(None),
                VersionRef::Version(n) => self.get(article, n).map(Some),
            }
        };
        let (a, b) = (resolve(from)?, resolve(to)?);
        let head = article::article_scope(store, article)?.0;
        let statements = |v: Option<&'a PublishedVersion>| match v {
            Some(v) => &v.statements,
            None => &head,
        };
        let (old, new) = (
            SubgraphView::new(store, statements(a)),
            SubgraphView::new(store, statements(b)),
        );
        Ok(diff_views(article, (&old, from), (&new, to)))
    }
}

fn version_paths(dir: &Path, article: &EntityId, version: u64) -> (PathBuf, PathBuf) {
    let base = dir.join(&article.key);
    (
        base.join(format!("v{version}.nt")),
        base.join(format!("v{version}.json")),
    )
}

fn write_version(dir: &Path, version: &PublishedVersion) -> Result<()> {
    let (nt, json) = version_paths(dir, &version.article, version.version);
    fs::create_dir_all(nt.parent().expect("versioned path has a parent"))?;
    let sidecar = Sidecar {
        version: version.version,
        article: version.article.key.clone(),
        timestamp: version.timestamp,
        description: version.description.clone(),
        publisher: version.publisher.clone(),
        statements: version.statements.clone(),
        context: version.context.clone(),
    };
    let body = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Io(e.into()))?;
    // The .nt file first: a sidecar is only written once its data is.
    fs::write(&nt, &version.ntriples)?;
    fs::write(&json, body)?;
    Ok(())
}

fn read_version(path: &Path) -> Result<PublishedVersion> {
    let corrupt = |message: String| Error::CorruptVersion {
        path: path.display().to_string(),
        message,
    };
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| corrupt(e.to_string()))?;
    let ntriples = fs::read_to_string(path.with_extension("nt")).map_err(|e| corrupt(e.to_string()))?;
    Ok(PublishedVersion {
        version: sidecar.version,
        article: EntityId::resource(sidecar.article),
        timestamp: sidecar.timestamp,
        description: sidecar.description,
        publisher: sidecar.publisher,
        statements: sidecar.statements,
        context: sidecar.context,
        ntriples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::article::SectionBody;
    use crate::vocab;

    fn setup() -> (GraphStore, Provenance, EntityId) {
        let mut store = GraphStore::in_memory();
        let user = store.register_account("Ada", None).unwrap();
        let prov = Provenance::now(user.user_id);
        let article = store
            .create_article("Review", &EntityId::resource(vocab::INFORMATION_SCIENCE), &prov)
            .unwrap();
        (store, prov, article.id)
    }

    fn text(md: &str) -> SectionBody {
        SectionBody::NaturalText {
            deo_type: vocab::INTRODUCTION.into(),
            markdown: md.into(),
        }
    }

    #[test]
    fn empty_article_cannot_be_published() {
        let (store, prov, article) = setup();
        let mut versions = VersionStore::in_memory();
        assert!(matches!(
            versions.publish(&store, &article, "v1", &prov),
            Err(Error::EmptyArticle(_))
        ));
        assert!(matches!(
            versions.publish(&store, &EntityId::resource("R1"), "v1", &prov),
            Err(Error::UnknownArticle(_))
        ));
    }

    #[test]
    fn publish_freezes_and_numbers() {
        let (mut store, prov, article) = setup();
        let section = store
            .add_section(&article, 0, "Intro", text("one\ntwo"), &prov)
            .unwrap()
            .id;
        let mut versions = VersionStore::in_memory();
        let v1 = versions.publish(&store, &article, "first", &prov).unwrap();
        let v2 = versions.publish(&store, &article, "second", &prov).unwrap();
        assert_eq!((v1.version, v2.version), (1, 2));
        assert_eq!(v1.statements, v2.statements);

        store
            .update_section(&section, None, Some(text("one\nthree")), &prov)
            .unwrap();
        assert_eq!(versions.get(&article, 1).unwrap(), &v1);

        let d = versions
            .diff(&store, &article, VersionRef::Version(1), VersionRef::Head)
            .unwrap();
        assert_eq!(d.added.len(), 1);
        assert_eq!(d.removed.len(), 1);
        assert_eq!(d.text_diffs.len(), 1);
        let ops: Vec<_> = d.text_diffs[0].hunks[0]
            .lines
            .iter()
            .map(|l| (l.op, l.text.as_str()))
            .collect();
        assert_eq!(
            ops,
            [
                (LineOp::Equal, "one"),
                (LineOp::Delete, "two"),
                (LineOp::Insert, "three")
            ]
        );
        assert!(versions
            .diff(&store, &article, VersionRef::Version(1), VersionRef::Version(2))
            .unwrap()
            .is_empty());
        assert!(matches!(
            versions.diff(&store, &article, VersionRef::Version(9), VersionRef::Head),
            Err(Error::UnknownVersion { version: 9, .. })
        ));
    }

    #[test]
    fn listing_counts_editors() {
        let (mut store, prov, article) = setup();
        let mut versions = VersionStore::in_memory();
        assert!(versions.list(&store, &article).unwrap().is_empty());
        let other = Provenance::now(store.register_account("Grace", None).unwrap().user_id);
        store.add_section(&article, 0, "A", text("a"), &prov).unwrap();
        store.add_section(&article, 1, "B", text("b"), &other).unwrap();
        versions.publish(&store, &article, "one", &prov).unwrap();
        versions.publish(&store, &article, "two", &prov).unwrap();
        let list = versions.list(&store, &article).unwrap();
        assert_eq!(list.iter().map(|v| v.version).collect::<Vec<_>>(), [1, 2]);
        assert_eq!(list[0].editor_count, 2);
    }

    #[test]
    fn snapshots_survive_reopening() {
        let dir = tempfile::tempdir().unwrap();
        let (mut store, prov, article) = setup();
        store.add_section(&article, 0, "A", text("a"), &prov).unwrap();
        let published = {
            let mut versions = VersionStore::open(dir.path()).unwrap();
            versions.publish(&store, &article, "one", &prov).unwrap()
        };
        assert!(dir.path().join(&article.key).join("v1.nt").exists());
        let reopened = VersionStore::open(dir.path()).unwrap();
        assert_eq!(reopened.get(&article, 1).unwrap(), &published);
        assert_eq!(reopened.get(&article, 1).unwrap().ntriples, published.ntriples);
    }

    #[test]
    fn version_refs_parse() {
        assert_eq!("HEAD".parse::<VersionRef>().unwrap(), VersionRef::Head);
        assert_eq!("v3".parse::<VersionRef>().unwrap(), VersionRef::Version(3));
        assert_eq!("2".parse::<VersionRef>().unwrap(), VersionRef::Version(2));
        assert!("x".parse::<VersionRef>().is_err());
    }
}
