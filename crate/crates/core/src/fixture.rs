//! The shipped use-case review, loaded from `data/fixture.toml`.

use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, Duration, Utc};
use serde::Deserialize;

use crate::article::{self, CellInput, ChartKind, Column, PaperSpec, SectionBody, TableKind};
use crate::error::{Error, Result};
use crate::model::{EntityId, EntityKind, Literal, Provenance};
use crate::store::{GraphStore, NewEntity, ObjectSpec};
use crate::vocab;

pub const FIXTURE: &str = include_str!("../data/fixture.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub start: DateTime<Utc>,
    pub editors: Vec<String>,
    pub review: ReviewDef,
    #[serde(default)]
    pub properties: Vec<EntityDef>,
    #[serde(default)]
    pub resources: Vec<EntityDef>,
    pub papers: Vec<PaperDef>,
    pub comparisons: Vec<ComparisonDef>,
    pub sections: Vec<SectionDef>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewDef {
    pub key: String,
    pub title: String,
    pub research_field: String,
    pub related_field: Option<String>,
}

/// A predicate or resource; `label` creates it, otherwise it must exist.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntityDef {
    pub key: String,
    pub label: Option<String>,
    pub description: Option<String>,
    pub same_as: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperDef {
    pub key: String,
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    pub date: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Integer(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(Scalar),
    Many(Vec<Scalar>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<&Scalar> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(vs) => vs.iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonDef {
    pub key: String,
    pub title: String,
    pub properties: Vec<String>,
    pub papers: Vec<String>,
    /// paper key → property key → values
    #[serde(default)]
    pub cells: BTreeMap<String, BTreeMap<String, OneOrMany>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisualizationDef {
    pub comparison: String,
    pub chart: String,
    pub property: String,
    pub label: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDef {
    pub heading: String,
    #[serde(default)]
    pub editor: usize,
    pub deo: Option<String>,
    pub markdown: Option<String>,
    pub comparison: Option<String>,
    pub visualization: Option<VisualizationDef>,
    #[serde(default)]
    pub ontology_table: bool,
    pub property_table: Option<Vec<String>>,
    pub resource_table: Option<Vec<String>>,
}

pub fn parse(text: &str) -> Result<Fixture> {
    toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1),
        message: e.message().to_owned(),
    })
}

/// What seeding did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedOutcome {
    Created(EntityId),
    /// The review key already exists; nothing was written.
    AlreadyPresent(EntityId),
}

/// Hands out strictly increasing timestamps so the seeded graph, and so
/// every render and export of it, is reproducible.
struct Clock {
    next: DateTime<Utc>,
    users: Vec<String>,
}

impl Clock {
    fn tick(&mut self, editor: usize) -> Result<Provenance> {
        let user = self
            .users
            .get(editor)
            .ok_or_else(|| Error::Validation(format!("fixture editor {editor} is not declared")))?;
        let prov = Provenance::at(user.clone(), self.next);
        self.next += Duration::seconds(1);
        Ok(prov)
    }
}

/// Loads the shipped fixture; a second call changes nothing.
pub fn seed(store: &mut GraphStore) -> Result<SeedOutcome> {
    seed_from(store, &parse(FIXTURE)?)
}

pub fn seed_from(store: &mut GraphStore, fixture: &Fixture) -> Result<SeedOutcome> {
    let review = EntityId::resource(&fixture.review.key);
    if store.contains(&review) {
        return Ok(SeedOutcome::AlreadyPresent(review));
    }
    // Papers get generated contribution keys; keep those clear of every
    // explicit resource key the fixture creates afterwards.
    let explicit = fixture
        .resources
        .iter()
        .map(|d| d.key.as_str())
        .chain(fixture.papers.iter().map(|d| d.key.as_str()))
        .chain(fixture.comparisons.iter().map(|d| d.key.as_str()))
        .chain([fixture.review.key.as_str()]);
    if let Some(max) = explicit.filter_map(|k| k.strip_prefix('R')?.parse::<u64>().ok()).max() {
        store.reserve_keys(EntityKind::Resource, max + 1);
    }
    let mut users = Vec::new();
    for name in &fixture.editors {
        users.push(store.register_account(name, None)?.user_id);
    }
    let mut clock = Clock {
        next: fixture.start,
        users,
    };

    let mut resource_keys: Vec<&str> = Vec::new();
    let entities = fixture
        .properties
        .iter()
        .map(|d| (d, EntityKind::Predicate))
        .chain(fixture.resources.iter().map(|d| (d, EntityKind::Resource)));
    for (def, kind) in entities {
        let prov = clock.tick(0)?;
        let id = EntityId::new(kind, def.key.clone());
        match &def.label {
            Some(label) => {
                let spec = NewEntity {
                    kind: Some(kind),
                    key: Some(def.key.clone()),
                    label: label.clone(),
                    ..Default::default()
                };
                store.create_entity(spec, &prov)?;
            }
            None => {
                store.require(&id)?;
            }
        }
        if let Some(description) = &def.description {
            store.set_description(&id, description, &prov)?;
        }
        if let Some(uri) = &def.same_as {
            store.set_same_as(&id, uri, &prov)?;
        }
        if kind == EntityKind::Resource {
            resource_keys.push(&def.key);
        }
    }

    let mut contributions: HashMap<&str, EntityId> = HashMap::new();
    for def in &fixture.papers {
        let paper = store.create_paper(
            PaperSpec {
                key: Some(def.key.clone()),
                title: def.title.clone(),
                authors: def.authors.clone(),
                publication_date: def.date.clone(),
            },
            &clock.tick(0)?,
        )?;
        contributions.insert(&def.key, paper.contributions[0].clone());
    }

    let value = |scalar: &Scalar| -> ObjectSpec {
        match scalar {
            Scalar::Integer(n) => ObjectSpec::Literal(Literal::new(n.to_string(), vocab::XSD_INTEGER)),
            Scalar::Text(t) if resource_keys.contains(&t.as_str()) || store.is_vocabulary(&EntityId::resource(t)) => {
                ObjectSpec::Entity(EntityId::resource(t))
            }
            Scalar::Text(t) => ObjectSpec::string(t.clone()),
        }
    };
    let mut comparison_cells = Vec::new();
    for def in &fixture.comparisons {
        let mut columns = Vec::new();
        for paper in &def.papers {
            let contribution = contributions
                .get(paper.as_str())
                .ok_or_else(|| Error::DanglingReference(format!("paper {paper}")))?;
            columns.push(Column {
                paper: EntityId::resource(paper),
                contribution: contribution.clone(),
            });
        }
        let mut cells = Vec::new();
        for (paper, row) in &def.cells {
            let contribution = contributions
                .get(paper.as_str())
                .ok_or_else(|| Error::DanglingReference(format!("paper {paper}")))?;
            for (property, values) in row {
                cells.push(CellInput {
                    contribution: contribution.clone(),
                    property: EntityId::predicate(property),
                    values: values.values().into_iter().map(value).collect(),
                });
            }
        }
        comparison_cells.push((def, columns, cells));
    }
    for (def, columns, cells) in comparison_cells {
        let properties: Vec<EntityId> = def.properties.iter().map(EntityId::predicate).collect();
        store.create_comparison_with_key(
            Some(&def.key),
            &def.title,
            &columns,
            &properties,
            &cells,
            &clock.tick(0)?,
        )?;
    }

    let prov = clock.tick(0)?;
    let field = EntityId::resource(&fixture.review.research_field);
    let article = store.create_article_with_key(Some(&fixture.review.key), &fixture.review.title, &field, &prov)?;
    if let Some(related) = &fixture.review.related_field {
        store.add_statement(
            &article.id,
            &vocab::predicate(vocab::RELATED_FIELD),
            &EntityId::resource(related),
            &prov,
        )?;
    }

    let comparisons: Vec<EntityId> = fixture.comparisons.iter().map(|c| EntityId::resource(&c.key)).collect();
    for (position, def) in fixture.sections.iter().enumerate() {
        let prov = clock.tick(def.editor)?;
        let body = section_body(store, def, &comparisons, &prov)?;
        store.add_section(&article.id, position, &def.heading, body, &prov)?;
    }
    Ok(SeedOutcome::Created(article.id))
}

fn section_body(
    store: &mut GraphStore,
    def: &SectionDef,
    comparisons: &[EntityId],
    prov: &Provenance,
) -> Result<SectionBody> {
    let listed = |keys: &[String]| -> Vec<EntityId> {
        keys.iter()
            .map(|k| match k.chars().next() {
                Some('P') => EntityId::predicate(k),
                _ => EntityId::resource(k),
            })
            .collect()
    };
    let body = if let Some(deo) = &def.deo {
        SectionBody::NaturalText {
            deo_type: deo.clone(),
            markdown: def.markdown.clone().unwrap_or_default(),
        }
    } else if let Some(c) = &def.comparison {
        SectionBody::Comparison {
            comparison: EntityId::resource(c),
        }
    } else if let Some(v) = &def.visualization {
        let kind =
            ChartKind::parse(&v.chart).ok_or_else(|| Error::Validation(format!("unknown chart kind `{}`", v.chart)))?;
        let created = store.create_visualization(
            &EntityId::resource(&v.comparison),
            kind,
            &EntityId::predicate(&v.property),
            &v.label,
            prov,
        )?;
        SectionBody::Visualization {
            visualization: created.id,
        }
    } else if def.ontology_table {
        SectionBody::OntologyTable {
            entities: article::comparison_entities(store, comparisons)?,
        }
    } else if let Some(keys) = &def.property_table {
        SectionBody::EntityTable {
            table_kind: TableKind::Properties,
            entities: listed(keys),
        }
    } else if let Some(keys) = &def.resource_table {
        SectionBody::EntityTable {
            table_kind: TableKind::Resources,
            entities: listed(keys),
        }
    } else {
        return Err(Error::Validation(format!("section `{}` has no body", def.heading)));
    };
    Ok(body)
}
