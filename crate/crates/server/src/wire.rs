//! JSON shapes of requests and responses.
//!
//! Entities are referenced by key. Where the position does not fix the kind
//! (table entities, cell values) a key may be written `Kind:key`; a bare key
//! takes its kind from the auto-key prefix and defaults to a resource.

use serde::{Deserialize, Serialize};
use smartreview::article::{
    self, Article, ChartKind, Comparison, Paper, Section, SectionBody, TableKind, Visualization,
};
use smartreview::model::is_valid_key;
use smartreview::versioning::{LineOp, VersionDiff, VersionRef};
use smartreview::view::GraphView;
use smartreview::{EntityId, EntityKind, GraphStore, Literal, ObjectSpec, Term, TripleValue};

use crate::error::ApiError;

pub fn parse_id(text: &str) -> Result<EntityId, ApiError> {
    let text = text.trim();
    if text.contains(':') {
        return text.parse().map_err(ApiError::BadRequest);
    }
    if !is_valid_key(text) {
        return Err(ApiError::BadRequest(format!("invalid key `{text}`")));
    }
    let kind = EntityKind::ALL
        .into_iter()
        .find(|k| {
            text.strip_prefix(k.key_prefix())
                .is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
        })
        .unwrap_or(EntityKind::Resource);
    Ok(EntityId::new(kind, text))
}

/// A key in a position that only admits `kind`.
pub fn id_of(kind: EntityKind, key: &str) -> Result<EntityId, ApiError> {
    let key = key.trim();
    if !is_valid_key(key) {
        return Err(ApiError::BadRequest(format!("invalid key `{key}`")));
    }
    Ok(EntityId::new(kind, key))
}

fn ids(keys: &[String]) -> Result<Vec<EntityId>, ApiError> {
    keys.iter().map(|k| parse_id(k)).collect()
}

// ---- responses -------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntityRef {
    pub kind: EntityKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub key: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
}

impl EntityRef {
    pub fn of<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Self {
        match view.literal(id) {
            Some(lit) => EntityRef {
                kind: EntityKind::Literal,
                key: id.key.clone(),
                label: lit.value.clone(),
                datatype: Some(lit.datatype.clone()),
            },
            None => EntityRef {
                kind: id.kind,
                key: id.key.clone(),
                label: view.label(id).to_owned(),
                datatype: None,
            },
        }
    }

    fn term<V: GraphView + ?Sized>(view: &V, term: &Term) -> Self {
        match term {
            Term::Entity(id) => Self::of(view, id),
            Term::Literal(lit) => EntityRef {
                kind: EntityKind::Literal,
                key: String::new(),
                label: lit.value.clone(),
                datatype: Some(lit.datatype.clone()),
            },
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AccountOut {
    pub user_id: String,
    pub display_name: String,
    /// Shown once; only its hash is stored.
    pub token: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UserRef {
    pub user_id: String,
    pub display_name: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArticleSummary {
    pub id: String,
    pub title: String,
}

#[derive(Debug, Serialize)]
#[serde(tag = "type", rename_all_fields = "camelCase")]
pub enum SectionBodyOut {
    NaturalText {
        deo_type: String,
        markdown: String,
    },
    Comparison {
        comparison: EntityRef,
    },
    Visualization {
        visualization: EntityRef,
    },
    OntologyTable {
        entities: Vec<EntityRef>,
    },
    EntityTable {
        table_kind: TableKind,
        entities: Vec<EntityRef>,
    },
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SectionOut {
    pub id: String,
    pub heading: String,
    #[serde(flatten)]
    pub body: SectionBodyOut,
}

impl SectionOut {
    pub fn new(store: &GraphStore, section: &Section) -> Self {
        let refs = |ids: &[EntityId]| ids.iter().map(|id| EntityRef::of(store, id)).collect();
        let body = match &section.body {
            SectionBody::NaturalText { deo_type, markdown } => SectionBodyOut::NaturalText {
                deo_type: deo_type.clone(),
                markdown: markdown.clone(),
            },
            SectionBody::Comparison { comparison } => SectionBodyOut::Comparison {
                comparison: EntityRef::of(store, comparison),
            },
            SectionBody::Visualization { visualization } => SectionBodyOut::Visualization {
                visualization: EntityRef::of(store, visualization),
            },
            SectionBody::OntologyTable { entities } => SectionBodyOut::OntologyTable {
                entities: refs(entities),
            },
            SectionBody::EntityTable { table_kind, entities } => SectionBodyOut::EntityTable {
                table_kind: *table_kind,
                entities: refs(entities),
            },
        };
        SectionOut {
            id: section.id.key.clone(),
            heading: section.heading.clone(),
            body,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArticleOut {
    pub id: String,
    pub title: String,
    pub research_field: Option<EntityRef>,
    pub contribution: String,
    pub sections: Vec<SectionOut>,
    pub contributors: Vec<UserRef>,
}

impl ArticleOut {
    pub fn new(store: &GraphStore, article: &Article, contributors: Vec<String>) -> Self {
        ArticleOut {
            id: article.id.key.clone(),
            title: article.title.clone(),
            research_field: article.research_field.as_ref().map(|f| EntityRef::of(store, f)),
            contribution: article.contribution.key.clone(),
            sections: article.sections.iter().map(|s| SectionOut::new(store, s)).collect(),
            contributors: contributors
                .into_iter()
                .map(|user_id| UserRef {
                    display_name: store.display_name(&user_id).to_owned(),
                    user_id,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PaperOut {
    pub id: String,
    pub title: String,
    pub authors: Vec<String>,
    pub publication_date: Option<String>,
    pub contributions: Vec<String>,
}

impl From<Paper> for PaperOut {
    fn from(p: Paper) -> Self {
        PaperOut {
            id: p.id.key,
            title: p.title,
            authors: p.authors,
            publication_date: p.publication_date,
            contributions: p.contributions.into_iter().map(|c| c.key).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnOut {
    pub paper: EntityRef,
    pub contribution: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CellOut {
    pub contribution: String,
    pub property: String,
    pub values: Vec<EntityRef>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComparisonOut {
    pub id: String,
    pub title: String,
    pub columns: Vec<ColumnOut>,
    pub rows: Vec<EntityRef>,
    pub cells: Vec<CellOut>,
}

impl ComparisonOut {
    pub fn new(store: &GraphStore, c: &Comparison) -> Self {
        ComparisonOut {
            id: c.id.key.clone(),
            title: c.title.clone(),
            columns: c
                .columns
                .iter()
                .map(|col| ColumnOut {
                    paper: EntityRef::of(store, &col.paper),
                    contribution: col.contribution.key.clone(),
                })
                .collect(),
            rows: c.rows.iter().map(|r| EntityRef::of(store, r)).collect(),
            cells: c
                .cells
                .iter()
                .map(|((contribution, property), values)| CellOut {
                    contribution: contribution.key.clone(),
                    property: property.key.clone(),
                    values: values.iter().map(|v| EntityRef::of(store, v)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VisualizationOut {
    pub id: String,
    pub comparison: String,
    pub chart_kind: ChartKind,
    pub series_property: String,
    pub label: String,
}

impl From<Visualization> for VisualizationOut {
    fn from(v: Visualization) -> Self {
        VisualizationOut {
            id: v.id.key,
            comparison: v.comparison.key,
            chart_kind: v.chart_kind,
            series_property: v.series_property.key,
            label: v.label,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleOut {
    pub subject: EntityRef,
    pub predicate: EntityRef,
    pub object: EntityRef,
}

impl TripleOut {
    fn new(store: &GraphStore, t: &TripleValue) -> Self {
        TripleOut {
            subject: EntityRef::of(store, &t.subject),
            predicate: EntityRef::of(store, &t.predicate),
            object: EntityRef::term(store, &t.object),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LineOut {
    pub op: LineOp,
    pub text: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HunkOut {
    pub old_start: usize,
    pub new_start: usize,
    pub lines: Vec<LineOut>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TextDiffOut {
    pub section: String,
    pub heading: String,
    pub hunks: Vec<HunkOut>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffOut {
    pub from: String,
    pub to: String,
    pub added: Vec<TripleOut>,
    pub removed: Vec<TripleOut>,
    pub text_diffs: Vec<TextDiffOut>,
}

impl DiffOut {
    pub fn new(store: &GraphStore, d: VersionDiff) -> Self {
        let name = |r: VersionRef| match r {
            VersionRef::Head => "HEAD".to_owned(),
            VersionRef::Version(n) => format!("v{n}"),
        };
        DiffOut {
            from: name(d.from),
            to: name(d.to),
            added: d.added.iter().map(|t| TripleOut::new(store, t)).collect(),
            removed: d.removed.iter().map(|t| TripleOut::new(store, t)).collect(),
            text_diffs: d
                .text_diffs
                .into_iter()
                .map(|t| TextDiffOut {
                    section: t.section.key,
                    heading: t.heading,
                    hunks: t
                        .hunks
                        .into_iter()
                        .map(|h| HunkOut {
                            old_start: h.old_start,
                            new_start: h.new_start,
                            lines: h
                                .lines
                                .into_iter()
                                .map(|l| LineOut { op: l.op, text: l.text })
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

// ---- requests --------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewAccount {
    pub display_name: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewArticle {
    pub title: String,
    pub research_field: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ArticlePatch {
    pub title: Option<String>,
    pub research_field: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all_fields = "camelCase", deny_unknown_fields)]
pub enum SectionBodyIn {
    NaturalText {
        deo_type: String,
        #[serde(default)]
        markdown: String,
    },
    Comparison {
        comparison: String,
    },
    Visualization {
        visualization: String,
    },
    /// Either explicit entities, or the entities used by `comparisons`.
    OntologyTable {
        #[serde(default)]
        entities: Vec<String>,
        #[serde(default)]
        comparisons: Vec<String>,
    },
    EntityTable {
        table_kind: TableKind,
        entities: Vec<String>,
    },
}

impl SectionBodyIn {
    pub fn resolve(self, store: &GraphStore) -> Result<SectionBody, ApiError> {
        Ok(match self {
            SectionBodyIn::NaturalText { deo_type, markdown } => SectionBody::NaturalText { deo_type, markdown },
            SectionBodyIn::Comparison { comparison } => SectionBody::Comparison {
                comparison: id_of(EntityKind::Resource, &comparison)?,
            },
            SectionBodyIn::Visualization { visualization } => SectionBody::Visualization {
                visualization: id_of(EntityKind::Resource, &visualization)?,
            },
            SectionBodyIn::OntologyTable { entities, comparisons } => {
                let mut entities = ids(&entities)?;
                if !comparisons.is_empty() {
                    let comparisons: Vec<EntityId> = comparisons
                        .iter()
                        .map(|c| id_of(EntityKind::Resource, c))
                        .collect::<Result<_, _>>()?;
                    entities.extend(article::comparison_entities(store, &comparisons)?);
                }
                SectionBody::OntologyTable { entities }
            }
            SectionBodyIn::EntityTable { table_kind, entities } => SectionBody::EntityTable {
                table_kind,
                entities: ids(&entities)?,
            },
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewSection {
    /// Insert position; appends when absent.
    pub position: Option<usize>,
    #[serde(default)]
    pub heading: String,
    pub body: SectionBodyIn,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SectionPatch {
    pub heading: Option<String>,
    pub body: Option<SectionBodyIn>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SectionOrder {
    pub order: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewPaper {
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    pub publication_date: Option<String>,
}

/// A cell value: an existing entity, or a literal (`xsd:string` unless a
/// datatype is given).
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ValueIn {
    Entity { entity: String },
    Literal { literal: String, datatype: Option<String> },
}

impl ValueIn {
    pub fn resolve(self) -> Result<ObjectSpec, ApiError> {
        Ok(match self {
            ValueIn::Entity { entity } => ObjectSpec::Entity(parse_id(&entity)?),
            ValueIn::Literal {
                literal,
                datatype: None,
            } => ObjectSpec::Literal(Literal::string(literal)),
            ValueIn::Literal {
                literal,
                datatype: Some(dt),
            } => ObjectSpec::Literal(Literal::new(literal, dt)),
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CellIn {
    pub contribution: String,
    pub property: String,
    pub values: Vec<ValueIn>,
}

impl CellIn {
    pub fn resolve(self) -> Result<article::CellInput, ApiError> {
        Ok(article::CellInput {
            contribution: id_of(EntityKind::Resource, &self.contribution)?,
            property: id_of(EntityKind::Predicate, &self.property)?,
            values: self
                .values
                .into_iter()
                .map(ValueIn::resolve)
                .collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CellsIn {
    One(CellIn),
    Many(Vec<CellIn>),
}

impl CellsIn {
    pub fn into_vec(self) -> Vec<CellIn> {
        match self {
            CellsIn::One(c) => vec![c],
            CellsIn::Many(cs) => cs,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ColumnIn {
    pub paper: String,
    /// Defaults to the paper's first contribution.
    pub contribution: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewComparison {
    pub title: String,
    pub columns: Vec<ColumnIn>,
    pub properties: Vec<String>,
    #[serde(default)]
    pub cells: Vec<CellIn>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewVisualization {
    pub comparison: String,
    pub chart_kind: ChartKind,
    pub series_property: String,
    pub label: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewEntityIn {
    pub kind: EntityKind,
    pub label: String,
    pub description: Option<String>,
    pub same_as: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NewVersion {
    pub description: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_take_their_kind_from_the_prefix() {
        assert_eq!(parse_id("P32").unwrap(), EntityId::predicate("P32"));
        assert_eq!(parse_id("R135360").unwrap(), EntityId::resource("R135360"));
        assert_eq!(parse_id("Predicate:Pe1").unwrap(), EntityId::predicate("Pe1"));
        assert_eq!(parse_id("Paper").unwrap(), EntityId::resource("Paper"));
        assert_eq!(parse_id("Class:Paper").unwrap(), EntityId::class("Paper"));
        assert!(parse_id("has space").is_err());
        assert!(parse_id("Bogus:R1").is_err());
    }

    #[test]
    fn section_bodies_parse() {
        let body: SectionBodyIn =
            serde_json::from_str(r#"{"type":"NaturalText","deoType":"Introduction","markdown":"Hi"}"#).unwrap();
        assert!(matches!(body, SectionBodyIn::NaturalText { .. }));
        let body: SectionBodyIn =
            serde_json::from_str(r#"{"type":"EntityTable","tableKind":"Properties","entities":["P32"]}"#).unwrap();
        assert!(matches!(
            body,
            SectionBodyIn::EntityTable {
                table_kind: TableKind::Properties,
                ..
            }
        ));
        assert!(serde_json::from_str::<SectionBodyIn>(r#"{"type":"Poem"}"#).is_err());
    }

    #[test]
    fn cell_values_parse() {
        let cells: CellsIn = serde_json::from_str(
            r#"[{"contribution":"R1","property":"P32","values":[{"entity":"R49584"},{"literal":"T"},{"literal":"3","datatype":"xsd:integer"}]}]"#,
        )
        .unwrap();
        let cell = cells.into_vec().pop().unwrap().resolve().unwrap();
        assert_eq!(cell.values.len(), 3);
        assert_eq!(cell.values[1], ObjectSpec::Literal(Literal::string("T")));
    }
}
