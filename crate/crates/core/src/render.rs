//! Standalone, accessible XHTML for an article head or a published version.
//!
//! The document has exactly one `h1` (the title); every section is an `h2`
//! with Markdown headings nested below it. Comparison tables carry the
//! `comparison-table` class; visualizations are figures with alternative
//! text, an embedded chart spec and a data-table fallback. Output depends
//! only on the statements passed in, so rendering a snapshot is
//! byte-stable however the head changes afterwards.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::json;

use crate::article::{self, Comparison, OntologyRow, Section, SectionBody, TableKind, Visualization};
use crate::error::Result;
use crate::html::escape;
use crate::markdown::{self, CitationTarget, HtmlOptions, TextAst};
use crate::model::{EntityId, Statement};
use crate::store::GraphStore;
use crate::uri::UriMapping;
use crate::view::{GraphView, SubgraphView};
use crate::vocab;

pub const WORDS_PER_MINUTE: usize = 250;

const STYLE: &str = "\
body{font-family:system-ui,sans-serif;line-height:1.55;margin:0 auto;max-width:60rem;padding:0 1rem;color:#1a1a1a}\
h1{font-size:2rem}h2{margin-top:2.2rem;border-bottom:1px solid #ddd}\
nav ol{padding-left:1.2rem}\
table{border-collapse:collapse;width:100%;display:block;overflow-x:auto}\
th,td{border:1px solid #ccc;padding:.35rem .5rem;text-align:left;vertical-align:top}\
thead th{background:#f2f2f2}\
figure{margin:1.5rem 0}figcaption{font-weight:600;margin-bottom:.4rem}\
.meta{color:#555}.citation.unresolved{color:#a00}\
@media (max-width:40rem){body{font-size:1.05rem}h1{font-size:1.6rem}}";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutlineEntry {
    pub heading: String,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedArticle {
    pub html: String,
    pub outline: Vec<OutlineEntry>,
    pub reading_time_minutes: usize,
    pub contributors: Vec<String>,
}

/// Published-version details shown in the document header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionInfo {
    pub version: u64,
    pub timestamp: DateTime<Utc>,
    pub description: String,
}

/// Distinct statement authors ordered by their first contribution.
pub fn acknowledgements(statements: &[Statement]) -> Vec<String> {
    let mut first: HashMap<&str, (DateTime<Utc>, u64)> = HashMap::new();
    for s in statements {
        let key = (s.provenance.timestamp, s.id.0);
        first
            .entry(s.provenance.user_id.as_str())
            .and_modify(|k| *k = (*k).min(key))
            .or_insert(key);
    }
    let mut users: Vec<(&str, (DateTime<Utc>, u64))> = first.into_iter().collect();
    users.sort_by_key(|(user, key)| (*key, *user));
    users.into_iter().map(|(u, _)| u.to_owned()).collect()
}

/// Whole minutes to read `words` words; zero only for no words.
pub fn minutes_for(words: usize) -> usize {
    words.div_ceil(WORDS_PER_MINUTE)
}

fn text_asts(sections: &[Section]) -> Vec<(&Section, TextAst)> {
    sections
        .iter()
        .filter_map(|s| match &s.body {
            SectionBody::NaturalText { markdown, .. } => Some((s, markdown::parse(markdown))),
            _ => None,
        })
        .collect()
}

/// Words in the natural-text section bodies.
pub fn word_count(sections: &[Section]) -> usize {
    text_asts(sections)
        .iter()
        .map(|(_, ast)| markdown::plain_text(ast).split_whitespace().count())
        .sum()
}

fn year(date: &str) -> &str {
    date.get(..4)
        .filter(|y| y.chars().all(|c| c.is_ascii_digit()))
        .unwrap_or(date)
}

struct Reference {
    key: String,
    number: usize,
    title: String,
    authors: Vec<String>,
    year: Option<String>,
}

struct Renderer<'a, V: GraphView + ?Sized> {
    view: &'a V,
    uris: &'a UriMapping,
    references: Vec<Reference>,
    out: String,
}

/// Renders `article` from its subgraph `statements` plus `context`.
pub fn render(
    store: &GraphStore,
    article_id: &EntityId,
    statements: &[Statement],
    context: &[Statement],
    uris: &UriMapping,
    version: Option<&VersionInfo>,
) -> Result<RenderedArticle> {
    let view = SubgraphView::new(store, statements.iter().chain(context));
    let article = article::load_article(&view, article_id)?;
    let texts = text_asts(&article.sections);
    let keys = markdown::extract_citations_all(texts.iter().map(|(_, ast)| ast));
    let references: Vec<Reference> = keys
        .into_iter()
        .filter_map(|key| {
            let paper = article::load_paper(&view, &EntityId::resource(key.clone())).ok()?;
            Some((key, paper))
        })
        .enumerate()
        .map(|(i, (key, paper))| Reference {
            key,
            number: i + 1,
            title: paper.title,
            authors: paper.authors,
            year: paper.publication_date.as_deref().map(|d| year(d).to_owned()),
        })
        .collect();
    let contributors = acknowledgements(statements);
    let reading_time_minutes = minutes_for(word_count(&article.sections));
    let last_modified = statements.iter().map(|s| s.provenance.timestamp).max();

    let mut outline: Vec<OutlineEntry> = article
        .sections
        .iter()
        .map(|s| OutlineEntry {
            heading: section_heading(&view, s),
            anchor: section_anchor(s),
        })
        .collect();
    outline.push(OutlineEntry {
        heading: "References".into(),
        anchor: "references".into(),
    });
    outline.push(OutlineEntry {
        heading: "Acknowledgements".into(),
        anchor: "acknowledgements".into(),
    });

    let mut r = Renderer {
        view: &view,
        uris,
        references,
        out: String::new(),
    };
    let field = article.research_field.as_ref().map(|f| view.label(f).to_owned());
    let names: Vec<String> = contributors.iter().map(|u| store.display_name(u).to_owned()).collect();
    let json_ld = json!({
        "@context": "https://schema.org",
        "@type": "ScholarlyArticle",
        "@id": uris.iri(article_id),
        "headline": article.title,
        "about": field,
        "author": names.iter().map(|n| json!({"@type": "Person", "name": n})).collect::<Vec<_>>(),
        "dateModified": last_modified.map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Millis, true)),
        "version": version.map_or_else(|| "head".to_owned(), |v| v.version.to_string()),
        "timeRequired": format!("PT{reading_time_minutes}M"),
        "citation": r.references.iter().map(|x| x.title.clone()).collect::<Vec<_>>(),
    });

    let o = &mut r.out;
    o.push_str("<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\" xml:lang=\"en\">\n<head>\n");
    o.push_str(
        "<meta charset=\"utf-8\" />\n<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\" />\n",
    );
    let _ = writeln!(o, "<title>{}</title>", escape(&article.title));
    let _ = writeln!(o, "<style>{STYLE}</style>");
    let _ = writeln!(
        o,
        "<script type=\"application/ld+json\">{}</script>",
        script_json(&json_ld)
    );
    o.push_str("</head>\n<body>\n<header>\n");
    let _ = writeln!(o, "<h1 id=\"title\">{}</h1>", escape(&article.title));
    o.push_str("<p class=\"meta\">");
    if let Some(field) = &field {
        let _ = write!(
            o,
            "Research field: <span class=\"research-field\">{}</span>. ",
            escape(field)
        );
    }
    match version {
        Some(v) => {
            let _ = write!(
                o,
                "<span class=\"version\">Version {} published <time datetime=\"{}\">{}</time>: {}</span>. ",
                v.version,
                v.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                v.timestamp.format("%Y-%m-%d"),
                escape(&v.description)
            );
        }
        None => o.push_str("<span class=\"version\">Head version (editable).</span> "),
    }
    let _ = write!(
        o,
        "<span class=\"reading-time\">Reading time: {reading_time_minutes} min</span>"
    );
    o.push_str("</p>\n</header>\n");

    o.push_str("<nav aria-labelledby=\"outline\">\n<h2 id=\"outline\">Contents</h2>\n<ol>\n");
    for entry in &outline {
        let _ = writeln!(
            o,
            "<li><a href=\"#{}\">{}</a></li>",
            escape(&entry.anchor),
            escape(&entry.heading)
        );
    }
    o.push_str("</ol>\n</nav>\n<main>\n<article>\n");

    for section in &article.sections {
        r.section(section)?;
    }

    let o = &mut r.out;
    o.push_str("</article>\n</main>\n<footer>\n");
    o.push_str("<section id=\"references\" aria-labelledby=\"references-heading\">\n<h2 id=\"references-heading\">References</h2>\n<ol class=\"references\">\n");
    for reference in &r.references {
        let mut entry = String::new();
        if !reference.authors.is_empty() {
            let _ = write!(entry, "{}. ", escape(&reference.authors.join(", ")));
        }
        let _ = write!(entry, "<cite>{}</cite>.", escape(&reference.title));
        if let Some(y) = &reference.year {
            let _ = write!(entry, " {}.", escape(y));
        }
        let _ = writeln!(
            o,
            "<li id=\"ref-{}\" value=\"{}\">{entry}</li>",
            escape(&reference.key),
            reference.number
        );
    }
    o.push_str("</ol>\n</section>\n");
    o.push_str("<section id=\"acknowledgements\" aria-labelledby=\"acknowledgements-heading\">\n<h2 id=\"acknowledgements-heading\">Acknowledgements</h2>\n");
    o.push_str("<p>This article was written by the following contributors, in order of their first contribution:</p>\n<ul class=\"contributors\">\n");
    for (user, name) in contributors.iter().zip(&names) {
        let _ = writeln!(o, "<li data-user=\"{}\">{}</li>", escape(user), escape(name));
    }
    o.push_str("</ul>\n</section>\n</footer>\n</body>\n</html>\n");

    Ok(RenderedArticle {
        html: r.out,
        outline,
        reading_time_minutes,
        contributors,
    })
}

/// JSON safe inside a `<script>` element of both HTML and XHTML.
fn script_json(value: &serde_json::Value) -> String {
    value
        .to_string()
        .replace('<', "\\u003c")
        .replace('>', "\\u003e")
        .replace('&', "\\u0026")
}

fn section_anchor(section: &Section) -> String {
    format!("section-{}", section.id.key)
}

fn section_heading<V: GraphView + ?Sized>(view: &V, section: &Section) -> String {
    let heading = section.heading.trim();
    if heading.is_empty() {
        view.label(&section.id).to_owned()
    } else {
        heading.to_owned()
    }
}

impl<V: GraphView + ?Sized> Renderer<'_, V> {
    fn citation(&self, key: &str) -> Option<CitationTarget> {
        self.references.iter().find(|r| r.key == key).map(|r| CitationTarget {
            number: r.number,
            title: r.title.clone(),
        })
    }

    fn section(&mut self, section: &Section) -> Result<()> {
        let heading = section_heading(self.view, section);
        let anchor = section_anchor(section);
        let _ = writeln!(
            self.out,
            "<section id=\"{anchor}\" class=\"section-{}\" data-type=\"{}\" aria-labelledby=\"{anchor}-heading\">\n<h2 id=\"{anchor}-heading\">{}</h2>",
            section.body.kind_name(),
            escape(section.body.class_key()),
            escape(&heading)
        );
        match &section.body {
            SectionBody::NaturalText { markdown, .. } => {
                let ast = markdown::parse(markdown);
                let resolve = |key: &str| self.citation(key);
                let body = markdown::emit_html_with(&ast, &resolve, HtmlOptions { parent_level: 2 });
                self.out.push_str(&body);
            }
            SectionBody::Comparison { comparison } => {
                let comparison = article::load_comparison(self.view, comparison)?;
                self.comparison_table(&comparison);
            }
            SectionBody::Visualization { visualization } => {
                let visualization = article::load_visualization(self.view, visualization)?;
                let comparison = article::load_comparison(self.view, &visualization.comparison)?;
                self.visualization(&visualization, &comparison);
            }
            SectionBody::OntologyTable { entities } => {
                let rows = article::ontology_rows(self.view, entities.iter().cloned());
                self.ontology_table(&rows);
            }
            SectionBody::EntityTable { table_kind, entities } => {
                let rows = article::ontology_rows(self.view, entities.iter().cloned());
                self.entity_table(*table_kind, &rows);
            }
        }
        self.out.push_str("</section>\n");
        Ok(())
    }

    fn paper_title(&self, paper: &EntityId) -> String {
        article::load_paper(self.view, paper).map_or_else(|_| self.view.label(paper).to_owned(), |p| p.title)
    }

    fn cell_text(&self, values: &[EntityId]) -> String {
        values
            .iter()
            .map(|v| self.view.display(v))
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn comparison_table(&mut self, comparison: &Comparison) {
        let o = &mut String::new();
        let _ = writeln!(
            o,
            "<figure class=\"comparison\" id=\"comparison-{}\">\n<table class=\"comparison-table\">\n<caption>{}</caption>",
            comparison.id.key,
            escape(&comparison.title)
        );
        o.push_str("<thead>\n<tr><th scope=\"col\">Property</th>");
        for column in &comparison.columns {
            let _ = write!(o, "<th scope=\"col\">{}</th>", escape(&self.paper_title(&column.paper)));
        }
        o.push_str("</tr>\n</thead>\n<tbody>\n");
        for property in &comparison.rows {
            let _ = write!(o, "<tr><th scope=\"row\">{}</th>", escape(self.view.label(property)));
            for column in &comparison.columns {
                let _ = write!(
                    o,
                    "<td>{}</td>",
                    escape(&self.cell_text(comparison.cell(&column.contribution, property)))
                );
            }
            o.push_str("</tr>\n");
        }
        o.push_str("</tbody>\n</table>\n</figure>\n");
        self.out.push_str(o);
    }

    fn visualization(&mut self, visualization: &Visualization, comparison: &Comparison) {
        let property = &visualization.series_property;
        let property_label = self.view.label(property).to_owned();
        let alt = if visualization.label.trim().is_empty() {
            format!(
                "{} of {} across the papers of {}",
                vocab::split_camel(visualization.chart_kind.as_str()),
                property_label,
                comparison.title
            )
        } else {
            visualization.label.trim().to_owned()
        };
        let series: Vec<(String, String)> = comparison
            .columns
            .iter()
            .map(|c| {
                (
                    self.paper_title(&c.paper),
                    self.cell_text(comparison.cell(&c.contribution, property)),
                )
            })
            .collect();
        let spec = json!({
            "chart": visualization.chart_kind.as_str(),
            "comparison": self.uris.iri(&comparison.id),
            "property": self.uris.iri(property),
            "label": alt,
            "data": series.iter().map(|(paper, value)| json!({"paper": paper, "value": value})).collect::<Vec<_>>(),
        });
        let o = &mut String::new();
        let _ = writeln!(
            o,
            "<figure class=\"visualization\" id=\"visualization-{}\" data-chart=\"{}\">",
            visualization.id.key,
            visualization.chart_kind.as_str()
        );
        let _ = writeln!(
            o,
            "<div class=\"chart\" role=\"img\" aria-label=\"{}\"></div>",
            escape(&alt)
        );
        let _ = writeln!(
            o,
            "<script type=\"application/json\" class=\"chart-spec\">{}</script>",
            script_json(&spec)
        );
        let _ = writeln!(
            o,
            "<table class=\"visualization-table\">\n<caption>{}</caption>",
            escape(&alt)
        );
        let _ = writeln!(
            o,
            "<thead>\n<tr><th scope=\"col\">Paper</th><th scope=\"col\">{}</th></tr>\n</thead>\n<tbody>",
            escape(&property_label)
        );
        for (paper, value) in &series {
            let _ = writeln!(
                o,
                "<tr><th scope=\"row\">{}</th><td>{}</td></tr>",
                escape(paper),
                escape(value)
            );
        }
        o.push_str("</tbody>\n</table>\n");
        let _ = writeln!(o, "<figcaption>{}</figcaption>\n</figure>", escape(&alt));
        self.out.push_str(o);
    }

    fn link(&self, row: &OntologyRow) -> String {
        let uri = row
            .external_uri
            .clone()
            .or_else(|| self.uris.iri(&row.entity))
            .unwrap_or_default();
        if crate::html::is_safe_url(&uri) {
            format!("<a href=\"{0}\">{0}</a>", escape(&uri))
        } else {
            escape(&uri)
        }
    }

    fn ontology_table(&mut self, rows: &[OntologyRow]) {
        let mut o = String::from(
            "<table class=\"ontology-table\">\n<thead>\n<tr><th scope=\"col\">Label</th><th scope=\"col\">Description</th><th scope=\"col\">Ontology link</th></tr>\n</thead>\n<tbody>\n",
        );
        for row in rows {
            let _ = writeln!(
                o,
                "<tr><th scope=\"row\">{}</th><td>{}</td><td>{}</td></tr>",
                escape(&row.label),
                escape(&row.description),
                self.link(row)
            );
        }
        o.push_str("</tbody>\n</table>\n");
        self.out.push_str(&o);
    }

    fn entity_table(&mut self, kind: TableKind, rows: &[OntologyRow]) {
        let class = match kind {
            TableKind::Resources => "resource-table",
            TableKind::Properties => "property-table",
        };
        let mut o = format!(
            "<table class=\"entity-table {class}\">\n<thead>\n<tr><th scope=\"col\">Label</th><th scope=\"col\">Description</th><th scope=\"col\">Identifier</th></tr>\n</thead>\n<tbody>\n"
        );
        for row in rows {
            let types: BTreeMap<&str, ()> = self
                .view
                .classes_of(&row.entity)
                .into_iter()
                .map(|c| (c.key.as_str(), ()))
                .collect();
            let _ = writeln!(
                o,
                "<tr data-classes=\"{}\"><th scope=\"row\">{}</th><td>{}</td><td>{}</td></tr>",
                escape(&types.keys().copied().collect::<Vec<_>>().join(" ")),
                escape(&row.label),
                escape(&row.description),
                self.link(row)
            );
        }
        o.push_str("</tbody>\n</table>\n");
        self.out.push_str(&o);
    }
}
