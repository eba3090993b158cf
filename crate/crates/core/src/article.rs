//! The review document model and its mapping onto graph statements.
//!
//! Graph shape of an article:
//!
//! ```text
//! article  a SmartReview ; Title "..." ; P30 field ; P31 contribution
//! contribution a Contribution ; HasSection section*
//! section  a <DEO class | structural class> ; Heading "..." ; SectionIndex n ;
//!          Markdown "..." | ShowsComparison c | ShowsVisualization v | ListsEntity e*
//! comparison a Comparison ; Title "..." ; HasColumn col* ; HasRow row*
//! col      ColumnIndex n ; ColumnPaper paper ; ColumnContribution contribution
//! row      RowIndex n ; RowProperty property
//! ```
//!
//! Cell values live directly on the compared contributions as
//! `contribution --property--> value`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markdown;
use crate::model::{EntityId, EntityKind, Literal, Provenance, Statement};
use crate::store::{GraphStore, NewEntity, ObjectSpec, Tx};
use crate::view::GraphView;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: EntityId,
    pub title: String,
    pub research_field: Option<EntityId>,
    pub contribution: EntityId,
    pub sections: Vec<Section>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub id: EntityId,
    pub heading: String,
    pub body: SectionBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableKind {
    Resources,
    Properties,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SectionBody {
    NaturalText {
        deo_type: String,
        markdown: String,
    },
    Comparison {
        comparison: EntityId,
    },
    Visualization {
        visualization: EntityId,
    },
    OntologyTable {
        entities: Vec<EntityId>,
    },
    EntityTable {
        table_kind: TableKind,
        entities: Vec<EntityId>,
    },
}

impl SectionBody {
    /// The class typing a section with this body.
    pub fn class_key(&self) -> &str {
        match self {
            SectionBody::NaturalText { deo_type, .. } => deo_type,
            SectionBody::Comparison { .. } => vocab::COMPARISON_SECTION,
            SectionBody::Visualization { .. } => vocab::VISUALIZATION_SECTION,
            SectionBody::OntologyTable { .. } => vocab::ONTOLOGY_TABLE_SECTION,
            SectionBody::EntityTable {
                table_kind: TableKind::Resources,
                ..
            } => vocab::RESOURCE_TABLE_SECTION,
            SectionBody::EntityTable {
                table_kind: TableKind::Properties,
                ..
            } => vocab::PROPERTY_TABLE_SECTION,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SectionBody::NaturalText { .. } => "text",
            SectionBody::Comparison { .. } => "comparison",
            SectionBody::Visualization { .. } => "visualization",
            SectionBody::OntologyTable { .. } => "ontology-table",
            SectionBody::EntityTable {
                table_kind: TableKind::Resources,
                ..
            } => "resource-table",
            SectionBody::EntityTable {
                table_kind: TableKind::Properties,
                ..
            } => "property-table",
        }
    }

    fn default_label(&self) -> String {
        match self {
            SectionBody::NaturalText { deo_type, .. } => vocab::split_camel(deo_type),
            SectionBody::Comparison { .. } => "Comparison".into(),
            SectionBody::Visualization { .. } => "Visualization".into(),
            SectionBody::OntologyTable { .. } => "Ontology table".into(),
            SectionBody::EntityTable {
                table_kind: TableKind::Resources,
                ..
            } => "Resources".into(),
            SectionBody::EntityTable {
                table_kind: TableKind::Properties,
                ..
            } => "Properties".into(),
        }
    }

    /// Desired objects per body predicate; predicates not listed are emptied.
    fn content(&self) -> Vec<(&'static str, Vec<ObjectSpec>)> {
        let mut markdown = Vec::new();
        let mut comparison = Vec::new();
        let mut visualization = Vec::new();
        let mut listed = Vec::new();
        match self {
            SectionBody::NaturalText { markdown: text, .. } => markdown.push(ObjectSpec::string(text.clone())),
            SectionBody::Comparison { comparison: c } => comparison.push(c.clone().into()),
            SectionBody::Visualization { visualization: v } => visualization.push(v.clone().into()),
            SectionBody::OntologyTable { entities } | SectionBody::EntityTable { entities, .. } => {
                listed.extend(entities.iter().cloned().map(ObjectSpec::from))
            }
        }
        vec![
            (vocab::MARKDOWN, markdown),
            (vocab::SHOWS_COMPARISON, comparison),
            (vocab::SHOWS_VISUALIZATION, visualization),
            (vocab::LISTS_ENTITY, listed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub paper: EntityId,
    pub contribution: EntityId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub id: EntityId,
    pub title: String,
    pub columns: Vec<Column>,
    pub rows: Vec<EntityId>,
    /// Keyed by (contribution, property).
    pub cells: BTreeMap<(EntityId, EntityId), Vec<EntityId>>,
}

impl Comparison {
    pub fn cell(&self, contribution: &EntityId, property: &EntityId) -> &[EntityId] {
        self.cells
            .get(&(contribution.clone(), property.clone()))
            .map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub id: EntityId,
    pub title: String,
    pub authors: Vec<String>,
    pub publication_date: Option<String>,
    pub contributions: Vec<EntityId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    Table,
    BarChart,
    LineChart,
}

impl ChartKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChartKind::Table => "Table",
            ChartKind::BarChart => "BarChart",
            ChartKind::LineChart => "LineChart",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Table" => Some(ChartKind::Table),
            "BarChart" => Some(ChartKind::BarChart),
            "LineChart" => Some(ChartKind::LineChart),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visualization {
    pub id: EntityId,
    pub comparison: EntityId,
    pub chart_kind: ChartKind,
    pub series_property: EntityId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperSpec {
    pub key: Option<String>,
    pub title: String,
    pub authors: Vec<String>,
    pub publication_date: Option<String>,
}

/// A cell value: an existing entity or a literal to be created.
pub type CellValue = ObjectSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellInput {
    pub contribution: EntityId,
    pub property: EntityId,
    pub values: Vec<CellValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntologyRow {
    pub entity: EntityId,
    pub label: String,
    pub description: String,
    pub external_uri: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsedEntities {
    pub properties: Vec<EntityId>,
    pub resources: Vec<EntityId>,
}

// ---- reading -------------------------------------------------------------------

fn index_literal(n: usize) -> ObjectSpec {
    ObjectSpec::Literal(Literal::new(n.to_string(), vocab::XSD_INTEGER))
}

fn sorted_by_index<'a, V: GraphView + ?Sized>(
    view: &'a V,
    nodes: Vec<&'a EntityId>,
    index_predicate: &str,
) -> Vec<&'a EntityId> {
    let mut keyed: Vec<(i64, &EntityId)> = nodes
        .into_iter()
        .map(|n| (view.integer_value(n, index_predicate).unwrap_or(i64::MAX), n))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.key.cmp(&b.1.key)));
    keyed.into_iter().map(|(_, n)| n).collect()
}

pub fn is_article<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> bool {
    id.kind == EntityKind::Resource && view.has_class(id, vocab::SMART_REVIEW)
}

/// The article's own contribution node (the P31 object typed Contribution).
pub fn article_contribution<'a, V: GraphView + ?Sized>(view: &'a V, article: &EntityId) -> Option<&'a EntityId> {
    view.objects(article, vocab::CONTRIBUTION)
        .into_iter()
        .find(|c| view.has_class(c, vocab::CONTRIBUTION_CLASS))
}

/// Section ids of an article in persisted order.
pub fn section_ids<'a, V: GraphView + ?Sized>(view: &'a V, article: &EntityId) -> Vec<&'a EntityId> {
    match article_contribution(view, article) {
        Some(contribution) => sorted_by_index(
            view,
            view.objects(contribution, vocab::HAS_SECTION),
            vocab::SECTION_INDEX,
        ),
        None => Vec::new(),
    }
}

pub fn load_article<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Result<Article> {
    if !is_article(view, id) {
        return Err(Error::UnknownArticle(id.key.clone()));
    }
    let contribution = article_contribution(view, id)
        .ok_or_else(|| Error::UnknownArticle(id.key.clone()))?
        .clone();
    let sections = section_ids(view, id)
        .into_iter()
        .map(|s| load_section(view, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Article {
        id: id.clone(),
        title: view
            .literal_value(id, vocab::TITLE)
            .unwrap_or_else(|| view.label(id))
            .to_owned(),
        research_field: view.object(id, vocab::RESEARCH_FIELD).cloned(),
        contribution,
        sections,
    })
}

pub fn load_section<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Result<Section> {
    let classes = view.classes_of(id);
    let has = |key: &str| classes.iter().any(|c| c.key == key);
    let listed = || -> Vec<EntityId> { view.objects(id, vocab::LISTS_ENTITY).into_iter().cloned().collect() };
    let body = if has(vocab::COMPARISON_SECTION) {
        SectionBody::Comparison {
            comparison: view
                .object(id, vocab::SHOWS_COMPARISON)
                .cloned()
                .ok_or_else(|| Error::DanglingReference(format!("section {} has no comparison", id.key)))?,
        }
    } else if has(vocab::VISUALIZATION_SECTION) {
        SectionBody::Visualization {
            visualization: view
                .object(id, vocab::SHOWS_VISUALIZATION)
                .cloned()
                .ok_or_else(|| Error::DanglingReference(format!("section {} has no visualization", id.key)))?,
        }
    } else if has(vocab::ONTOLOGY_TABLE_SECTION) {
        SectionBody::OntologyTable { entities: listed() }
    } else if has(vocab::RESOURCE_TABLE_SECTION) {
        SectionBody::EntityTable {
            table_kind: TableKind::Resources,
            entities: listed(),
        }
    } else if has(vocab::PROPERTY_TABLE_SECTION) {
        SectionBody::EntityTable {
            table_kind: TableKind::Properties,
            entities: listed(),
        }
    } else {
        let deo = classes
            .iter()
            .find(|c| vocab::is_deo_class(&c.key))
            .ok_or_else(|| Error::UnknownSection(id.key.clone()))?;
        SectionBody::NaturalText {
            deo_type: deo.key.clone(),
            markdown: view.literal_value(id, vocab::MARKDOWN).unwrap_or_default().to_owned(),
        }
    };
    Ok(Section {
        id: id.clone(),
        heading: view.literal_value(id, vocab::HEADING).unwrap_or_default().to_owned(),
        body,
    })
}

pub fn load_comparison<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Result<Comparison> {
    if !view.has_class(id, vocab::COMPARISON) {
        return Err(Error::UnknownComparison(id.key.clone()));
    }
    let columns: Vec<Column> = sorted_by_index(view, view.objects(id, vocab::HAS_COLUMN), vocab::COLUMN_INDEX)
        .into_iter()
        .filter_map(|col| {
            Some(Column {
                paper: view.object(col, vocab::COLUMN_PAPER)?.clone(),
                contribution: view.object(col, vocab::COLUMN_CONTRIBUTION)?.clone(),
            })
        })
        .collect();
    let rows: Vec<EntityId> = sorted_by_index(view, view.objects(id, vocab::HAS_ROW), vocab::ROW_INDEX)
        .into_iter()
        .filter_map(|row| view.object(row, vocab::ROW_PROPERTY).cloned())
        .collect();
    let mut cells = BTreeMap::new();
    for column in &columns {
        for property in &rows {
            let values: Vec<EntityId> = view
                .objects(&column.contribution, &property.key)
                .into_iter()
                .cloned()
                .collect();
            if !values.is_empty() {
                cells.insert((column.contribution.clone(), property.clone()), values);
            }
        }
    }
    Ok(Comparison {
        id: id.clone(),
        title: view
            .literal_value(id, vocab::TITLE)
            .unwrap_or_else(|| view.label(id))
            .to_owned(),
        columns,
        rows,
        cells,
    })
}

pub fn split_authors(joined: &str) -> Vec<String> {
    joined
        .split(';')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn load_paper<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Result<Paper> {
    if !view.has_class(id, vocab::PAPER) {
        return Err(Error::UnknownEntity(id.to_string()));
    }
    Ok(Paper {
        id: id.clone(),
        title: view
            .literal_value(id, vocab::TITLE)
            .unwrap_or_else(|| view.label(id))
            .to_owned(),
        authors: view
            .literal_value(id, vocab::AUTHORS)
            .map(split_authors)
            .unwrap_or_default(),
        publication_date: view.literal_value(id, vocab::PUBLICATION_DATE).map(str::to_owned),
        contributions: view.objects(id, vocab::CONTRIBUTION).into_iter().cloned().collect(),
    })
}

pub fn load_visualization<V: GraphView + ?Sized>(view: &V, id: &EntityId) -> Result<Visualization> {
    let missing = || Error::UnknownVisualization(id.key.clone());
    if !view.has_class(id, vocab::VISUALIZATION) {
        return Err(missing());
    }
    Ok(Visualization {
        id: id.clone(),
        comparison: view.object(id, vocab::SHOWS_COMPARISON).cloned().ok_or_else(missing)?,
        chart_kind: view
            .literal_value(id, vocab::CHART_KIND)
            .and_then(ChartKind::parse)
            .unwrap_or(ChartKind::Table),
        series_property: view.object(id, vocab::SERIES_PROPERTY).cloned().ok_or_else(missing)?,
        label: view.literal_value(id, vocab::TITLE).unwrap_or_default().to_owned(),
    })
}

fn by_label<V: GraphView + ?Sized>(view: &V, ids: impl IntoIterator<Item = EntityId>) -> Vec<EntityId> {
    let mut ids: Vec<EntityId> = ids.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    ids.sort_by(|a, b| {
        view.label(a)
            .to_lowercase()
            .cmp(&view.label(b).to_lowercase())
            .then_with(|| a.cmp(b))
    });
    ids
}

/// Description rows for the given entities, sorted by label. Missing
/// descriptions are empty strings.
pub fn ontology_rows<V: GraphView + ?Sized>(
    view: &V,
    entities: impl IntoIterator<Item = EntityId>,
) -> Vec<OntologyRow> {
    by_label(view, entities)
        .into_iter()
        .map(|entity| OntologyRow {
            label: view.display(&entity),
            description: view
                .literal_value(&entity, vocab::DESCRIPTION)
                .unwrap_or_default()
                .to_owned(),
            external_uri: view.object(&entity, vocab::SAME_AS).map(|o| view.display(o)),
            entity,
        })
        .collect()
}

/// Distinct properties (rows) and resource cell values of the comparisons.
pub fn comparison_entities<V: GraphView + ?Sized>(view: &V, comparisons: &[EntityId]) -> Result<Vec<EntityId>> {
    let mut used = BTreeSet::new();
    for id in comparisons {
        let comparison = load_comparison(view, id)?;
        used.extend(comparison.rows.iter().cloned());
        for values in comparison.cells.values() {
            used.extend(values.iter().filter(|v| v.kind == EntityKind::Resource).cloned());
        }
    }
    Ok(used.into_iter().collect())
}

pub fn build_ontology_table<V: GraphView + ?Sized>(view: &V, comparisons: &[EntityId]) -> Result<Vec<OntologyRow>> {
    Ok(ontology_rows(view, comparison_entities(view, comparisons)?))
}

/// Non-structural predicates of `statements` and the resources they point to.
pub fn used_entities<V: GraphView + ?Sized>(view: &V, statements: &[&Statement]) -> UsedEntities {
    let mut properties = HashSet::new();
    let mut resources = HashSet::new();
    for s in statements {
        if vocab::is_structural_predicate(&s.predicate.key) {
            continue;
        }
        properties.insert(s.predicate.clone());
        if s.object.kind == EntityKind::Resource {
            resources.insert(s.object.clone());
        }
    }
    UsedEntities {
        properties: by_label(view, properties),
        resources: by_label(view, resources),
    }
}

/// Statements describing entities the given statements reference without
/// owning them: descriptions and external links of predicates, classes and
/// shared resources.
pub fn context_statements(store: &GraphStore, statements: &[Statement]) -> Vec<Statement> {
    let owned: HashSet<&EntityId> = statements.iter().map(|s| &s.subject).collect();
    let mut referenced = BTreeSet::new();
    for s in statements {
        referenced.insert(&s.predicate);
        let o = &s.object;
        let borrowed = match o.kind {
            EntityKind::Predicate | EntityKind::Class => true,
            EntityKind::Resource => store.is_shared(o),
            EntityKind::Literal => false,
        };
        if borrowed && !owned.contains(o) {
            referenced.insert(o);
        }
    }
    let mut out: Vec<Statement> = referenced
        .into_iter()
        .filter(|e| !owned.contains(e))
        .flat_map(|e| store.matching(Some(e), None, None))
        .filter(|s| s.predicate.key == vocab::DESCRIPTION || s.predicate.key == vocab::SAME_AS)
        .cloned()
        .collect();
    for paper in cited_papers(store, statements) {
        if !owned.contains(&paper) {
            out.extend(store.matching(Some(&paper), None, None).into_iter().cloned());
        }
    }
    out.sort_by_key(|s| s.id);
    out.dedup_by_key(|s| s.id);
    out
}

/// Papers cited by key from the Markdown bodies among `statements`.
pub fn cited_papers<V: GraphView + ?Sized>(view: &V, statements: &[Statement]) -> Vec<EntityId> {
    let asts: Vec<markdown::TextAst> = statements
        .iter()
        .filter(|s| s.predicate.key == vocab::MARKDOWN)
        .filter_map(|s| view.literal(&s.object))
        .map(|l| markdown::parse(&l.value))
        .collect();
    markdown::extract_citations_all(&asts)
        .into_iter()
        .map(EntityId::resource)
        .filter(|id| view.has_class(id, vocab::PAPER))
        .collect()
}

/// The article subgraph plus its context, as exported and snapshotted.
pub fn article_scope(store: &GraphStore, article: &EntityId) -> Result<(Vec<Statement>, Vec<Statement>)> {
    require_article(store, article)?;
    let statements = store.traverse_subgraph(article)?;
    let context = context_statements(store, &statements);
    Ok((statements, context))
}

// ---- writing -------------------------------------------------------------------

fn require_article(store: &GraphStore, id: &EntityId) -> Result<EntityId> {
    if !is_article(store, id) {
        return Err(Error::UnknownArticle(id.key.clone()));
    }
    article_contribution(store, id)
        .cloned()
        .ok_or_else(|| Error::UnknownArticle(id.key.clone()))
}

/// The (article, contribution) owning a live section.
pub fn section_owner(store: &GraphStore, section: &EntityId) -> Result<(EntityId, EntityId)> {
    for link in store.matching(None, Some(&vocab::predicate(vocab::HAS_SECTION)), Some(section)) {
        let contribution = &link.subject;
        for owner in store.matching(None, Some(&vocab::predicate(vocab::CONTRIBUTION)), Some(contribution)) {
            if is_article(store, &owner.subject) {
                return Ok((owner.subject.clone(), contribution.clone()));
            }
        }
    }
    Err(Error::UnknownSection(section.key.clone()))
}

fn require_class(store: &GraphStore, id: &EntityId, class_key: &str, what: &str) -> Result<()> {
    if store.contains(id) && store.has_class(id, class_key) {
        Ok(())
    } else {
        Err(Error::DanglingReference(format!("{what} {}", id.key)))
    }
}

fn validate_body(store: &GraphStore, body: &SectionBody) -> Result<()> {
    match body {
        SectionBody::NaturalText { deo_type, .. } => {
            if !vocab::is_deo_class(deo_type) {
                return Err(Error::UnknownDeoType(deo_type.clone()));
            }
        }
        SectionBody::Comparison { comparison } => require_class(store, comparison, vocab::COMPARISON, "comparison")?,
        SectionBody::Visualization { visualization } => {
            require_class(store, visualization, vocab::VISUALIZATION, "visualization")?
        }
        SectionBody::OntologyTable { entities } | SectionBody::EntityTable { entities, .. } => {
            for e in entities {
                if !store.contains(e) || e.kind == EntityKind::Literal {
                    return Err(Error::DanglingReference(format!("entity {e}")));
                }
            }
        }
    }
    Ok(())
}

fn renumber(tx: &mut Tx<'_>, order: &[EntityId], prov: &Provenance) -> Result<()> {
    for (i, section) in order.iter().enumerate() {
        tx.reconcile(section, vocab::SECTION_INDEX, &[index_literal(i)], prov)?;
    }
    Ok(())
}

fn write_section_content(
    tx: &mut Tx<'_>,
    section: &EntityId,
    heading: Option<&str>,
    body: Option<&SectionBody>,
    prov: &Provenance,
) -> Result<()> {
    if let Some(heading) = heading {
        tx.reconcile(section, vocab::HEADING, &[ObjectSpec::string(heading.trim())], prov)?;
    }
    if let Some(body) = body {
        tx.reconcile(
            section,
            vocab::TYPE,
            &[ObjectSpec::Entity(vocab::class(body.class_key()))],
            prov,
        )?;
        for (predicate, desired) in body.content() {
            tx.reconcile(section, predicate, &desired, prov)?;
        }
    }
    Ok(())
}

impl GraphStore {
    pub fn create_article(&mut self, title: &str, research_field: &EntityId, prov: &Provenance) -> Result<Article> {
        self.create_article_with_key(None, title, research_field, prov)
    }

    pub fn create_article_with_key(
        &mut self,
        key: Option<&str>,
        title: &str,
        research_field: &EntityId,
        prov: &Provenance,
    ) -> Result<Article> {
        self.require(research_field)?;
        if research_field.kind != EntityKind::Resource {
            return Err(Error::InvalidKind(format!("{research_field} is not a resource")));
        }
        let id = self.write(|tx| {
            let mut spec = NewEntity::resource(title).with_class(vocab::SMART_REVIEW);
            spec.key = key.map(str::to_owned);
            let id = tx.create_entity(spec, prov)?;
            tx.add_literal(&id, vocab::TITLE, Literal::string(title.trim()), prov)?;
            tx.add_statement(&id, &vocab::predicate(vocab::RESEARCH_FIELD), research_field, prov)?;
            let contribution = tx.create_entity(
                NewEntity::resource(format!("Contribution of {}", title.trim())).with_class(vocab::CONTRIBUTION_CLASS),
                prov,
            )?;
            tx.add_statement(&id, &vocab::predicate(vocab::CONTRIBUTION), &contribution, prov)?;
            Ok(id)
        })?;
        load_article(self, &id)
    }

    pub fn article(&self, id: &EntityId) -> Result<Article> {
        load_article(self, id)
    }

    /// All articles, by key.
    pub fn articles(&self) -> Vec<EntityId> {
        self.matching(
            None,
            Some(&vocab::type_predicate()),
            Some(&vocab::class(vocab::SMART_REVIEW)),
        )
        .into_iter()
        .map(|s| s.subject.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
    }

    pub fn update_article(
        &mut self,
        id: &EntityId,
        title: Option<&str>,
        research_field: Option<&EntityId>,
        prov: &Provenance,
    ) -> Result<Article> {
        require_article(self, id)?;
        if let Some(field) = research_field {
            self.require(field)?;
        }
        if title.is_some_and(|t| t.trim().is_empty()) {
            return Err(Error::Validation("title must not be empty".into()));
        }
        self.write(|tx| {
            if let Some(title) = title {
                tx.reconcile(id, vocab::TITLE, &[ObjectSpec::string(title.trim())], prov)?;
            }
            if let Some(field) = research_field {
                tx.reconcile(id, vocab::RESEARCH_FIELD, &[field.clone().into()], prov)?;
            }
            Ok(())
        })?;
        load_article(self, id)
    }

    pub fn add_section(
        &mut self,
        article: &EntityId,
        position: usize,
        heading: &str,
        body: SectionBody,
        prov: &Provenance,
    ) -> Result<Section> {
        let contribution = require_article(self, article)?;
        let mut order: Vec<EntityId> = section_ids(self, article).into_iter().cloned().collect();
        if position > order.len() {
            return Err(Error::InvalidPosition {
                position,
                len: order.len(),
            });
        }
        validate_body(self, &body)?;
        let section = self.write(|tx| {
            let label = if heading.trim().is_empty() {
                body.default_label()
            } else {
                heading.trim().to_owned()
            };
            let section = tx.create_entity(NewEntity::resource(label), prov)?;
            write_section_content(tx, &section, Some(heading), Some(&body), prov)?;
            tx.add_statement(&contribution, &vocab::predicate(vocab::HAS_SECTION), &section, prov)?;
            order.insert(position, section.clone());
            renumber(tx, &order, prov)?;
            Ok(section)
        })?;
        load_section(self, &section)
    }

    pub fn section(&self, id: &EntityId) -> Result<Section> {
        section_owner(self, id)?;
        load_section(self, id)
    }

    pub fn update_section(
        &mut self,
        section: &EntityId,
        heading: Option<&str>,
        body: Option<SectionBody>,
        prov: &Provenance,
    ) -> Result<Article> {
        let (article, _) = section_owner(self, section)?;
        if let Some(body) = &body {
            validate_body(self, body)?;
        }
        self.write(|tx| write_section_content(tx, section, heading, body.as_ref(), prov))?;
        load_article(self, &article)
    }

    /// Persists `order` as the new section order; it must be a permutation
    /// of the current sections.
    pub fn reorder_sections(&mut self, article: &EntityId, order: &[EntityId], prov: &Provenance) -> Result<Article> {
        require_article(self, article)?;
        let current: BTreeSet<EntityId> = section_ids(self, article).into_iter().cloned().collect();
        for id in order {
            if !current.contains(id) {
                return Err(Error::UnknownSection(id.key.clone()));
            }
        }
        let requested: BTreeSet<&EntityId> = order.iter().collect();
        if requested.len() != order.len() || order.len() != current.len() {
            return Err(Error::InvalidPosition {
                position: order.len(),
                len: current.len(),
            });
        }
        self.write(|tx| renumber(tx, order, prov))?;
        load_article(self, article)
    }

    pub fn delete_section(&mut self, section: &EntityId, prov: &Provenance) -> Result<Article> {
        let (article, contribution) = section_owner(self, section)?;
        let remaining: Vec<EntityId> = section_ids(self, &article)
            .into_iter()
            .filter(|s| *s != section)
            .cloned()
            .collect();
        let owned: Vec<_> = self
            .matching(Some(section), None, None)
            .into_iter()
            .chain(self.matching(
                Some(&contribution),
                Some(&vocab::predicate(vocab::HAS_SECTION)),
                Some(section),
            ))
            .map(|s| s.id)
            .collect();
        self.write(|tx| {
            for id in owned {
                tx.remove_statement(id, prov)?;
            }
            renumber(tx, &remaining, prov)
        })?;
        load_article(self, &article)
    }

    pub fn create_paper(&mut self, spec: PaperSpec, prov: &Provenance) -> Result<Paper> {
        let id = self.write(|tx| {
            let mut entity = NewEntity::resource(spec.title.clone()).with_class(vocab::PAPER);
            entity.key = spec.key.clone();
            let id = tx.create_entity(entity, prov)?;
            tx.add_literal(&id, vocab::TITLE, Literal::string(spec.title.trim()), prov)?;
            if !spec.authors.is_empty() {
                tx.add_literal(&id, vocab::AUTHORS, Literal::string(spec.authors.join("; ")), prov)?;
            }
            if let Some(date) = spec
                .publication_date
                .as_deref()
                .map(str::trim)
                .filter(|d| !d.is_empty())
            {
                tx.add_literal(&id, vocab::PUBLICATION_DATE, date_literal(date), prov)?;
            }
            add_contribution_in(tx, &id, None, prov)?;
            Ok(id)
        })?;
        load_paper(self, &id)
    }

    pub fn paper(&self, id: &EntityId) -> Result<Paper> {
        load_paper(self, id)
    }

    /// Adds another contribution node to a paper.
    pub fn add_contribution(&mut self, paper: &EntityId, key: Option<&str>, prov: &Provenance) -> Result<EntityId> {
        if !self.has_class(paper, vocab::PAPER) {
            return Err(Error::UnknownEntity(paper.to_string()));
        }
        self.write(|tx| add_contribution_in(tx, paper, key, prov))
    }

    pub fn create_comparison(
        &mut self,
        title: &str,
        columns: &[Column],
        properties: &[EntityId],
        cells: &[CellInput],
        prov: &Provenance,
    ) -> Result<Comparison> {
        self.create_comparison_with_key(None, title, columns, properties, cells, prov)
    }

    pub fn create_comparison_with_key(
        &mut self,
        key: Option<&str>,
        title: &str,
        columns: &[Column],
        properties: &[EntityId],
        cells: &[CellInput],
        prov: &Provenance,
    ) -> Result<Comparison> {
        for column in columns {
            if !self.contains(&column.paper) {
                return Err(Error::DanglingReference(format!("paper {}", column.paper.key)));
            }
            if !self.contains(&column.contribution) {
                return Err(Error::DanglingReference(format!(
                    "contribution {}",
                    column.contribution.key
                )));
            }
            let linked = !self
                .matching(
                    Some(&column.paper),
                    Some(&vocab::predicate(vocab::CONTRIBUTION)),
                    Some(&column.contribution),
                )
                .is_empty();
            if !linked {
                return Err(Error::DanglingReference(format!(
                    "contribution {} is not linked to paper {}",
                    column.contribution.key, column.paper.key
                )));
            }
        }
        let mut seen = HashSet::new();
        for property in properties {
            if property.kind != EntityKind::Predicate || !self.contains(property) {
                return Err(Error::DanglingReference(format!("property {}", property.key)));
            }
            if !seen.insert(property) {
                return Err(Error::DuplicateProperty(property.key.clone()));
            }
        }
        for cell in cells {
            if !columns.iter().any(|c| c.contribution == cell.contribution) {
                return Err(Error::DanglingReference(format!("column {}", cell.contribution.key)));
            }
            if !properties.contains(&cell.property) {
                return Err(Error::DanglingReference(format!("property {}", cell.property.key)));
            }
            self.validate_values(&cell.values)?;
        }
        let id = self.write(|tx| {
            let mut entity = NewEntity::resource(title).with_class(vocab::COMPARISON);
            entity.key = key.map(str::to_owned);
            let id = tx.create_entity(entity, prov)?;
            tx.add_literal(&id, vocab::TITLE, Literal::string(title.trim()), prov)?;
            for (i, column) in columns.iter().enumerate() {
                let node = tx.create_entity(
                    NewEntity::resource(format!("Column {}", i + 1)).with_class(vocab::COMPARISON_COLUMN),
                    prov,
                )?;
                tx.add_literal(
                    &node,
                    vocab::COLUMN_INDEX,
                    Literal::new(i.to_string(), vocab::XSD_INTEGER),
                    prov,
                )?;
                tx.add_statement(&node, &vocab::predicate(vocab::COLUMN_PAPER), &column.paper, prov)?;
                tx.add_statement(
                    &node,
                    &vocab::predicate(vocab::COLUMN_CONTRIBUTION),
                    &column.contribution,
                    prov,
                )?;
                tx.add_statement(&id, &vocab::predicate(vocab::HAS_COLUMN), &node, prov)?;
            }
            for (i, property) in properties.iter().enumerate() {
                let node = tx.create_entity(
                    NewEntity::resource(format!("Row {}", i + 1)).with_class(vocab::COMPARISON_ROW),
                    prov,
                )?;
                tx.add_literal(
                    &node,
                    vocab::ROW_INDEX,
                    Literal::new(i.to_string(), vocab::XSD_INTEGER),
                    prov,
                )?;
                tx.add_statement(&node, &vocab::predicate(vocab::ROW_PROPERTY), property, prov)?;
                tx.add_statement(&id, &vocab::predicate(vocab::HAS_ROW), &node, prov)?;
            }
            for cell in cells {
                tx.reconcile(&cell.contribution, &cell.property.key, &cell.values, prov)?;
            }
            Ok(id)
        })?;
        load_comparison(self, &id)
    }

    fn validate_values(&self, values: &[CellValue]) -> Result<()> {
        for value in values {
            if let ObjectSpec::Entity(id) = value {
                if !self.contains(id) {
                    return Err(Error::DanglingReference(format!("value {id}")));
                }
            }
        }
        Ok(())
    }

    pub fn comparison(&self, id: &EntityId) -> Result<Comparison> {
        load_comparison(self, id)
    }

    /// Replaces the values of one cell; an empty list clears it.
    pub fn set_cell(
        &mut self,
        comparison: &EntityId,
        contribution: &EntityId,
        property: &EntityId,
        values: &[CellValue],
        prov: &Provenance,
    ) -> Result<Comparison> {
        let current = load_comparison(self, comparison)?;
        let declared =
            current.columns.iter().any(|c| &c.contribution == contribution) && current.rows.contains(property);
        if !declared {
            return Err(Error::UndeclaredRowOrColumn {
                comparison: comparison.key.clone(),
                contribution: contribution.key.clone(),
                property: property.key.clone(),
            });
        }
        self.validate_values(values)?;
        self.write(|tx| tx.reconcile(contribution, &property.key, values, prov))?;
        load_comparison(self, comparison)
    }

    pub fn create_visualization(
        &mut self,
        comparison: &EntityId,
        chart_kind: ChartKind,
        series_property: &EntityId,
        label: &str,
        prov: &Provenance,
    ) -> Result<Visualization> {
        let target = load_comparison(self, comparison)?;
        if !target.rows.contains(series_property) {
            return Err(Error::DanglingReference(format!(
                "{} is not a row of comparison {}",
                series_property.key, comparison.key
            )));
        }
        if label.trim().is_empty() {
            return Err(Error::Validation("visualization label must not be empty".into()));
        }
        let id = self.write(|tx| {
            let id = tx.create_entity(NewEntity::resource(label).with_class(vocab::VISUALIZATION), prov)?;
            tx.add_literal(&id, vocab::TITLE, Literal::string(label.trim()), prov)?;
            tx.add_statement(&id, &vocab::predicate(vocab::SHOWS_COMPARISON), comparison, prov)?;
            tx.add_literal(&id, vocab::CHART_KIND, Literal::string(chart_kind.as_str()), prov)?;
            tx.add_statement(&id, &vocab::predicate(vocab::SERIES_PROPERTY), series_property, prov)?;
            Ok(id)
        })?;
        load_visualization(self, &id)
    }

    pub fn visualization(&self, id: &EntityId) -> Result<Visualization> {
        load_visualization(self, id)
    }

    pub fn build_ontology_table(&self, comparisons: &[EntityId]) -> Result<Vec<OntologyRow>> {
        build_ontology_table(self, comparisons)
    }

    pub fn collect_used_entities(&self, article: &EntityId) -> Result<UsedEntities> {
        require_article(self, article)?;
        let statements = self.traverse_subgraph(article)?;
        let refs: Vec<&Statement> = statements.iter().collect();
        Ok(used_entities(self, &refs))
    }

    /// Sets a textual description, used by ontology tables.
    pub fn set_description(&mut self, entity: &EntityId, description: &str, prov: &Provenance) -> Result<()> {
        self.require(entity)?;
        if entity.kind == EntityKind::Literal {
            return Err(Error::InvalidSubjectKind(entity.clone()));
        }
        let desired: Vec<ObjectSpec> = if description.trim().is_empty() {
            Vec::new()
        } else {
            vec![ObjectSpec::string(description.trim())]
        };
        self.write(|tx| tx.reconcile(entity, vocab::DESCRIPTION, &desired, prov))
    }

    /// Links an entity to an external ontology term.
    pub fn set_same_as(&mut self, entity: &EntityId, uri: &str, prov: &Provenance) -> Result<()> {
        self.require(entity)?;
        if entity.kind == EntityKind::Literal {
            return Err(Error::InvalidSubjectKind(entity.clone()));
        }
        self.write(|tx| {
            tx.reconcile(
                entity,
                vocab::SAME_AS,
                &[ObjectSpec::Literal(Literal::new(uri.trim(), vocab::XSD_ANY_URI))],
                prov,
            )
        })
    }
}

fn add_contribution_in(tx: &mut Tx<'_>, paper: &EntityId, key: Option<&str>, prov: &Provenance) -> Result<EntityId> {
    let n = tx.objects(paper, vocab::CONTRIBUTION).len() + 1;
    let mut spec = NewEntity::resource(format!("Contribution {n}")).with_class(vocab::CONTRIBUTION_CLASS);
    spec.key = key.map(str::to_owned);
    let contribution = tx.create_entity(spec, prov)?;
    tx.add_statement(paper, &vocab::predicate(vocab::CONTRIBUTION), &contribution, prov)?;
    Ok(contribution)
}

/// `2019` → xsd:gYear, `2019-05-01` → xsd:date, anything else → xsd:string.
pub fn date_literal(date: &str) -> Literal {
    let bytes = date.as_bytes();
    let digits = |r: std::ops::Range<usize>| bytes[r].iter().all(u8::is_ascii_digit);
    if bytes.len() == 4 && digits(0..4) {
        Literal::new(date, "xsd:gYear")
    } else if bytes.len() == 10 && digits(0..4) && bytes[4] == b'-' && digits(5..7) && bytes[7] == b'-' && digits(8..10)
    {
        Literal::new(date, "xsd:date")
    } else {
        Literal::string(date)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Term;

    struct Fx {
        store: GraphStore,
        prov: Provenance,
    }

    fn fx() -> Fx {
        let mut store = GraphStore::in_memory();
        let user = store.register_account("Ada", None).unwrap();
        Fx {
            store,
            prov: Provenance::now(user.user_id),
        }
    }

    fn field() -> EntityId {
        EntityId::resource(vocab::INFORMATION_SCIENCE)
    }

    fn text(deo: &str, md: &str) -> SectionBody {
        SectionBody::NaturalText {
            deo_type: deo.into(),
            markdown: md.into(),
        }
    }

    #[test]
    fn create_article_shape() {
        let mut f = fx();
        let a = f
            .store
            .create_article("Scholarly Knowledge Graphs", &field(), &f.prov)
            .unwrap();
        assert_eq!(a.title, "Scholarly Knowledge Graphs");
        assert_eq!(a.research_field, Some(field()));
        assert!(a.sections.is_empty());
        assert!(f.store.has_class(&a.id, vocab::SMART_REVIEW));
        assert!(f.store.has_class(&a.contribution, vocab::CONTRIBUTION_CLASS));
        assert_eq!(f.store.articles(), vec![a.id.clone()]);
        let err = f
            .store
            .create_article("x", &EntityId::resource("R999999999"), &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownEntity(_)));
    }

    #[test]
    fn sections_insert_reorder_delete() {
        let mut f = fx();
        let a = f.store.create_article("A", &field(), &f.prov).unwrap();
        let s1 = f
            .store
            .add_section(&a.id, 0, "One", text("Introduction", "one"), &f.prov)
            .unwrap();
        let s3 = f
            .store
            .add_section(&a.id, 1, "Three", text("Conclusion", "three"), &f.prov)
            .unwrap();
        let s2 = f
            .store
            .add_section(&a.id, 1, "Two", text("Background", "two"), &f.prov)
            .unwrap();
        let ids = |a: &Article| a.sections.iter().map(|s| s.id.clone()).collect::<Vec<_>>();
        let art = f.store.article(&a.id).unwrap();
        assert_eq!(ids(&art), vec![s1.id.clone(), s2.id.clone(), s3.id.clone()]);

        let err = f
            .store
            .add_section(&a.id, 9, "x", text("Introduction", ""), &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidPosition { position: 9, len: 3 }));
        let err = f
            .store
            .add_section(&a.id, 0, "x", text("NotADeoTerm", ""), &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownDeoType(_)));

        let art = f
            .store
            .reorder_sections(&a.id, &[s3.id.clone(), s1.id.clone(), s2.id.clone()], &f.prov)
            .unwrap();
        assert_eq!(ids(&art), vec![s3.id.clone(), s1.id.clone(), s2.id.clone()]);
        assert!(matches!(
            f.store.reorder_sections(&a.id, std::slice::from_ref(&s1.id), &f.prov),
            Err(Error::InvalidPosition { .. })
        ));

        let art = f.store.delete_section(&s1.id, &f.prov).unwrap();
        assert_eq!(ids(&art), vec![s3.id.clone(), s2.id.clone()]);
        assert!(matches!(f.store.section(&s1.id), Err(Error::UnknownSection(_))));
        assert!(matches!(
            f.store.delete_section(&s1.id, &f.prov),
            Err(Error::UnknownSection(_))
        ));
    }

    #[test]
    fn update_section_switches_deo_type_exclusively() {
        let mut f = fx();
        let a = f.store.create_article("A", &field(), &f.prov).unwrap();
        let s = f
            .store
            .add_section(&a.id, 0, "Intro", text("Introduction", "hello"), &f.prov)
            .unwrap();
        f.store
            .update_section(&s.id, Some("Motivation"), Some(text("Motivation", "why")), &f.prov)
            .unwrap();
        let classes: Vec<String> = f.store.classes_of(&s.id).iter().map(|c| c.key.clone()).collect();
        assert_eq!(classes, vec!["Motivation"]);
        let got = f.store.section(&s.id).unwrap();
        assert_eq!(got.heading, "Motivation");
        assert_eq!(got.body, text("Motivation", "why"));
    }

    fn paper(f: &mut Fx, title: &str) -> Paper {
        f.store
            .create_paper(
                PaperSpec {
                    key: None,
                    title: title.into(),
                    authors: vec!["A. Author".into(), "B. Author".into()],
                    publication_date: Some("2020".into()),
                },
                &f.prov,
            )
            .unwrap()
    }

    #[test]
    fn paper_metadata_round_trip() {
        let mut f = fx();
        let p = paper(&mut f, "Knowledge graphs");
        assert_eq!(p.authors, vec!["A. Author", "B. Author"]);
        assert_eq!(p.publication_date.as_deref(), Some("2020"));
        assert_eq!(p.contributions.len(), 1);
        let lit = f.store.objects(&p.id, vocab::PUBLICATION_DATE)[0].clone();
        assert_eq!(f.store.literal(&lit).unwrap().datatype, "xsd:gYear");
        let c2 = f.store.add_contribution(&p.id, None, &f.prov).unwrap();
        assert_eq!(f.store.paper(&p.id).unwrap().contributions.len(), 2);
        assert_eq!(f.store.label(&c2), "Contribution 2");
    }

    fn rdf_support() -> EntityId {
        EntityId::predicate(vocab::RDF_SUPPORT)
    }

    fn problem() -> EntityId {
        EntityId::predicate(vocab::RESEARCH_PROBLEM)
    }

    #[test]
    fn comparison_cells() {
        let mut f = fx();
        let p = paper(&mut f, "P1");
        let col = Column {
            paper: p.id.clone(),
            contribution: p.contributions[0].clone(),
        };
        let c = f
            .store
            .create_comparison(
                "Systems",
                std::slice::from_ref(&col),
                &[problem(), rdf_support()],
                &[CellInput {
                    contribution: col.contribution.clone(),
                    property: rdf_support(),
                    values: vec![ObjectSpec::string("T")],
                }],
                &f.prov,
            )
            .unwrap();
        assert_eq!(c.rows, vec![problem(), rdf_support()]);
        let value = c.cell(&col.contribution, &rdf_support())[0].clone();
        assert_eq!(f.store.term(&value), Term::Literal(Literal::string("T")));

        let comm = EntityId::resource(vocab::SCHOLARLY_COMMUNICATION);
        let c = f
            .store
            .set_cell(&c.id, &col.contribution, &problem(), &[comm.clone().into()], &f.prov)
            .unwrap();
        assert_eq!(c.cell(&col.contribution, &problem()), &[comm]);
        let c = f
            .store
            .set_cell(&c.id, &col.contribution, &problem(), &[], &f.prov)
            .unwrap();
        assert!(c.cell(&col.contribution, &problem()).is_empty());

        let err = f
            .store
            .set_cell(
                &c.id,
                &col.contribution,
                &EntityId::predicate(vocab::RELATED_FIELD),
                &[],
                &f.prov,
            )
            .unwrap_err();
        assert!(matches!(err, Error::UndeclaredRowOrColumn { .. }));
        let err = f
            .store
            .set_cell(&EntityId::resource("R1"), &col.contribution, &problem(), &[], &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownComparison(_)));
    }

    #[test]
    fn comparison_validation() {
        let mut f = fx();
        let p = paper(&mut f, "P1");
        let col = Column {
            paper: p.id.clone(),
            contribution: p.contributions[0].clone(),
        };
        let empty = f
            .store
            .create_comparison("Empty", std::slice::from_ref(&col), &[], &[], &f.prov)
            .unwrap();
        assert!(empty.rows.is_empty());
        let err = f
            .store
            .create_comparison("Dup", &[], &[problem(), problem()], &[], &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateProperty(_)));
        let err = f
            .store
            .create_comparison(
                "Undeclared",
                std::slice::from_ref(&col),
                &[problem()],
                &[CellInput {
                    contribution: col.contribution.clone(),
                    property: rdf_support(),
                    values: vec![],
                }],
                &f.prov,
            )
            .unwrap_err();
        assert!(matches!(err, Error::DanglingReference(_)));
        let other = paper(&mut f, "P2");
        let err = f
            .store
            .create_comparison(
                "Unlinked",
                &[Column {
                    paper: p.id.clone(),
                    contribution: other.contributions[0].clone(),
                }],
                &[],
                &[],
                &f.prov,
            )
            .unwrap_err();
        assert!(matches!(err, Error::DanglingReference(_)));
    }

    #[test]
    fn ontology_table_rows() {
        let mut f = fx();
        let p = paper(&mut f, "P1");
        let col = Column {
            paper: p.id.clone(),
            contribution: p.contributions[0].clone(),
        };
        f.store
            .set_description(&rdf_support(), "Whether data is exposed as RDF", &f.prov)
            .unwrap();
        f.store
            .set_same_as(&rdf_support(), "http://example.org/rdf", &f.prov)
            .unwrap();
        let c1 = f
            .store
            .create_comparison("One", std::slice::from_ref(&col), &[rdf_support()], &[], &f.prov)
            .unwrap();
        let rows = f.store.build_ontology_table(std::slice::from_ref(&c1.id)).unwrap();
        assert_eq!(
            rows,
            vec![OntologyRow {
                entity: rdf_support(),
                label: "RDF support".into(),
                description: "Whether data is exposed as RDF".into(),
                external_uri: Some("http://example.org/rdf".into()),
            }]
        );
        let c2 = f
            .store
            .create_comparison(
                "Two",
                std::slice::from_ref(&col),
                &[problem(), rdf_support()],
                &[],
                &f.prov,
            )
            .unwrap();
        let c3 = f
            .store
            .create_comparison("Three", std::slice::from_ref(&col), &[problem()], &[], &f.prov)
            .unwrap();
        let rows = f.store.build_ontology_table(&[c2.id, c3.id]).unwrap();
        let labels: Vec<&str> = rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, vec!["RDF support", "research problem"]);
        assert_eq!(rows[1].description, "");
        assert_eq!(rows[1].external_uri, None);
        assert!(matches!(
            f.store.build_ontology_table(&[EntityId::resource("R5")]),
            Err(Error::UnknownComparison(_))
        ));
    }

    #[test]
    fn used_entities_exclude_structure() {
        let mut f = fx();
        let a = f.store.create_article("A", &field(), &f.prov).unwrap();
        let empty = f.store.collect_used_entities(&a.id).unwrap();
        assert_eq!(empty.properties, vec![EntityId::predicate(vocab::RESEARCH_FIELD)]);
        assert_eq!(empty.resources, vec![field()]);

        let p = paper(&mut f, "P1");
        let col = Column {
            paper: p.id.clone(),
            contribution: p.contributions[0].clone(),
        };
        let comm = EntityId::resource(vocab::SCHOLARLY_COMMUNICATION);
        let c = f
            .store
            .create_comparison(
                "C",
                std::slice::from_ref(&col),
                &[problem()],
                &[CellInput {
                    contribution: col.contribution.clone(),
                    property: problem(),
                    values: vec![comm.clone().into()],
                }],
                &f.prov,
            )
            .unwrap();
        f.store
            .add_section(&a.id, 0, "C", SectionBody::Comparison { comparison: c.id }, &f.prov)
            .unwrap();
        let used = f.store.collect_used_entities(&a.id).unwrap();
        assert!(used.properties.contains(&problem()));
        assert!(!used.properties.iter().any(|p| p.key == vocab::HAS_SECTION));
        assert!(used.resources.contains(&comm));
    }

    #[test]
    fn visualization_requires_row() {
        let mut f = fx();
        let p = paper(&mut f, "P1");
        let col = Column {
            paper: p.id.clone(),
            contribution: p.contributions[0].clone(),
        };
        let c = f
            .store
            .create_comparison("C", &[col], &[rdf_support()], &[], &f.prov)
            .unwrap();
        let v = f
            .store
            .create_visualization(
                &c.id,
                ChartKind::BarChart,
                &rdf_support(),
                "RDF support per system",
                &f.prov,
            )
            .unwrap();
        assert_eq!(f.store.visualization(&v.id).unwrap(), v);
        let err = f
            .store
            .create_visualization(&c.id, ChartKind::BarChart, &problem(), "x", &f.prov)
            .unwrap_err();
        assert!(matches!(err, Error::DanglingReference(_)));
    }

    #[test]
    fn dates() {
        assert_eq!(date_literal("2019").datatype, "xsd:gYear");
        assert_eq!(date_literal("2019-05-01").datatype, "xsd:date");
        assert_eq!(date_literal("May 2019").datatype, "xsd:string");
    }
}
