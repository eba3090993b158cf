//! Well-known vocabulary loaded into every store before user data.

use std::sync::OnceLock;

use crate::model::{EntityId, EntityKind};

pub const XSD_STRING: &str = "xsd:string";
pub const XSD_INTEGER: &str = "xsd:integer";
pub const XSD_ANY_URI: &str = "xsd:anyURI";

/// Reserved predicate standing in for `rdf:type`; class membership is
/// expressed only through statements using it.
pub const TYPE: &str = "type";

pub const RESEARCH_FIELD: &str = "P30";
pub const CONTRIBUTION: &str = "P31";
pub const RESEARCH_PROBLEM: &str = "P32";
pub const RELATED_FIELD: &str = "P27";
pub const RDF_SUPPORT: &str = "P7009";
pub const HAS_SECTION: &str = "HasSection";

pub const TITLE: &str = "Title";
pub const AUTHORS: &str = "Authors";
pub const PUBLICATION_DATE: &str = "PublicationDate";
pub const DESCRIPTION: &str = "Description";
pub const SAME_AS: &str = "SameAs";
pub const SECTION_INDEX: &str = "SectionIndex";
pub const HEADING: &str = "Heading";
pub const MARKDOWN: &str = "Markdown";
pub const SHOWS_COMPARISON: &str = "ShowsComparison";
pub const SHOWS_VISUALIZATION: &str = "ShowsVisualization";
pub const LISTS_ENTITY: &str = "ListsEntity";
pub const HAS_COLUMN: &str = "HasColumn";
pub const HAS_ROW: &str = "HasRow";
pub const COLUMN_INDEX: &str = "ColumnIndex";
pub const COLUMN_PAPER: &str = "ColumnPaper";
pub const COLUMN_CONTRIBUTION: &str = "ColumnContribution";
pub const ROW_INDEX: &str = "RowIndex";
pub const ROW_PROPERTY: &str = "RowProperty";
pub const CHART_KIND: &str = "ChartKind";
pub const SERIES_PROPERTY: &str = "SeriesProperty";

pub const SMART_REVIEW: &str = "SmartReview";
pub const CONTRIBUTION_CLASS: &str = "Contribution";
pub const INTRODUCTION: &str = "Introduction";
pub const PAPER: &str = "Paper";
pub const COMPARISON: &str = "Comparison";
pub const COMPARISON_COLUMN: &str = "ComparisonColumn";
pub const COMPARISON_ROW: &str = "ComparisonRow";
pub const VISUALIZATION: &str = "Visualization";
pub const COMPARISON_SECTION: &str = "ComparisonSection";
pub const VISUALIZATION_SECTION: &str = "VisualizationSection";
pub const ONTOLOGY_TABLE_SECTION: &str = "OntologyTableSection";
pub const RESOURCE_TABLE_SECTION: &str = "ResourceTableSection";
pub const PROPERTY_TABLE_SECTION: &str = "PropertyTableSection";

pub const INFORMATION_SCIENCE: &str = "R278";
pub const SCHOLARLY_COMMUNICATION: &str = "R49584";
pub const RELATED_FIELD_INFORMATION_SCIENCE: &str = "R8193";
/// Key of the published use-case review; reserved so auto-generation skips it.
pub const FIXTURE_REVIEW: &str = "R135360";

/// Built-in accounts that exist in every store. Neither can authenticate.
pub const SYSTEM_USER: &str = "system";
pub const IMPORT_USER: &str = "import";

pub struct VocabEntry {
    pub kind: EntityKind,
    pub key: &'static str,
    pub label: &'static str,
    /// Shared entities are referenced by articles but never owned by one;
    /// subgraph traversal does not expand them.
    pub shared: bool,
}

const fn entry(kind: EntityKind, key: &'static str, label: &'static str) -> VocabEntry {
    VocabEntry {
        kind,
        key,
        label,
        shared: false,
    }
}

const fn shared(key: &'static str, label: &'static str) -> VocabEntry {
    VocabEntry {
        kind: EntityKind::Resource,
        key,
        label,
        shared: true,
    }
}

use EntityKind::{Class as C, Predicate as P};

const TABLE: &[VocabEntry] = &[
    entry(P, TYPE, "type"),
    entry(P, RESEARCH_FIELD, "research field"),
    entry(P, CONTRIBUTION, "contribution"),
    entry(P, RESEARCH_PROBLEM, "research problem"),
    entry(P, RELATED_FIELD, "related field"),
    entry(P, RDF_SUPPORT, "RDF support"),
    entry(P, HAS_SECTION, "has section"),
    entry(P, TITLE, "title"),
    entry(P, AUTHORS, "authors"),
    entry(P, PUBLICATION_DATE, "publication date"),
    entry(P, DESCRIPTION, "description"),
    entry(P, SAME_AS, "same as"),
    entry(P, SECTION_INDEX, "section index"),
    entry(P, HEADING, "heading"),
    entry(P, MARKDOWN, "markdown text"),
    entry(P, SHOWS_COMPARISON, "shows comparison"),
    entry(P, SHOWS_VISUALIZATION, "shows visualization"),
    entry(P, LISTS_ENTITY, "lists entity"),
    entry(P, HAS_COLUMN, "has column"),
    entry(P, HAS_ROW, "has row"),
    entry(P, COLUMN_INDEX, "column index"),
    entry(P, COLUMN_PAPER, "column paper"),
    entry(P, COLUMN_CONTRIBUTION, "column contribution"),
    entry(P, ROW_INDEX, "row index"),
    entry(P, ROW_PROPERTY, "row property"),
    entry(P, CHART_KIND, "chart kind"),
    entry(P, SERIES_PROPERTY, "series property"),
    entry(C, SMART_REVIEW, "SmartReview"),
    entry(C, CONTRIBUTION_CLASS, "Contribution"),
    entry(C, PAPER, "Paper"),
    entry(C, COMPARISON, "Comparison"),
    entry(C, COMPARISON_COLUMN, "Comparison column"),
    entry(C, COMPARISON_ROW, "Comparison row"),
    entry(C, VISUALIZATION, "Visualization"),
    entry(C, COMPARISON_SECTION, "Comparison section"),
    entry(C, VISUALIZATION_SECTION, "Visualization section"),
    entry(C, ONTOLOGY_TABLE_SECTION, "Ontology table section"),
    entry(C, RESOURCE_TABLE_SECTION, "Resource table section"),
    entry(C, PROPERTY_TABLE_SECTION, "Property table section"),
    shared(INFORMATION_SCIENCE, "Information Science"),
    shared(SCHOLARLY_COMMUNICATION, "Scholarly Communication"),
    shared(RELATED_FIELD_INFORMATION_SCIENCE, "Information and Library Science"),
];

/// Keys that must never be produced by auto-generation.
pub const RESERVED_KEYS: &[(EntityKind, &str)] = &[(EntityKind::Resource, FIXTURE_REVIEW)];

/// Predicates that carry document structure rather than scholarly knowledge.
pub const STRUCTURAL_PREDICATES: &[&str] = &[
    TYPE,
    CONTRIBUTION,
    HAS_SECTION,
    TITLE,
    AUTHORS,
    PUBLICATION_DATE,
    DESCRIPTION,
    SAME_AS,
    SECTION_INDEX,
    HEADING,
    MARKDOWN,
    SHOWS_COMPARISON,
    SHOWS_VISUALIZATION,
    LISTS_ENTITY,
    HAS_COLUMN,
    HAS_ROW,
    COLUMN_INDEX,
    COLUMN_PAPER,
    COLUMN_CONTRIBUTION,
    ROW_INDEX,
    ROW_PROPERTY,
    CHART_KIND,
    SERIES_PROPERTY,
];

const DEO_FILE: &str = include_str!("../data/deo.txt");

/// DEO class names offered for natural-text sections, in file order.
pub fn deo_classes() -> &'static [String] {
    static DEO: OnceLock<Vec<String>> = OnceLock::new();
    DEO.get_or_init(|| {
        DEO_FILE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect()
    })
}

/// The shipped DEO vocabulary file, byte for byte.
pub fn deo_file() -> &'static str {
    DEO_FILE
}

pub fn is_deo_class(key: &str) -> bool {
    deo_classes().iter().any(|c| c == key)
}

pub fn is_structural_predicate(key: &str) -> bool {
    STRUCTURAL_PREDICATES.contains(&key)
}

/// "RelatedWork" -> "Related Work".
pub fn split_camel(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 4);
    for (i, c) in name.chars().enumerate() {
        if i > 0 && c.is_uppercase() {
            out.push(' ');
        }
        out.push(c);
    }
    out
}

/// All well-known entities, including the DEO classes.
pub fn entries() -> impl Iterator<Item = (EntityId, String, bool)> {
    let fixed = TABLE
        .iter()
        .map(|e| (EntityId::new(e.kind, e.key), e.label.to_owned(), e.shared));
    let deo = deo_classes()
        .iter()
        .filter(|c| !TABLE.iter().any(|e| e.kind == C && e.key == c.as_str()))
        .map(|c| (EntityId::class(c.clone()), split_camel(c), false));
    fixed.chain(deo)
}

pub fn type_predicate() -> EntityId {
    EntityId::predicate(TYPE)
}

pub fn predicate(key: &str) -> EntityId {
    EntityId::predicate(key)
}

pub fn class(key: &str) -> EntityId {
    EntityId::class(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deo_vocabulary_has_required_terms() {
        for term in [
            "Introduction",
            "Motivation",
            "Background",
            "RelatedWork",
            "FutureWork",
            "Conclusion",
            "Acknowledgements",
        ] {
            assert!(is_deo_class(term), "{term}");
        }
        assert!(!is_deo_class("NotADeoTerm"));
        assert!(!is_deo_class("Contribution"));
    }

    #[test]
    fn vocabulary_keys_are_unique_per_kind() {
        let mut seen = std::collections::HashSet::new();
        for (id, _, _) in entries() {
            assert!(seen.insert(id.clone()), "duplicate {id}");
        }
        assert!(seen.contains(&EntityId::class("Introduction")));
        assert!(seen.contains(&EntityId::class("RelatedWork")));
    }

    #[test]
    fn camel_case_labels() {
        assert_eq!(split_camel("RelatedWork"), "Related Work");
        assert_eq!(split_camel("Introduction"), "Introduction");
    }
}
