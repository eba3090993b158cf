//! Structural checks on rendered article HTML.

use roxmltree::{Document, Node, ParsingOptions};

pub fn parse(html: &str) -> Result<Document<'_>, String> {
    let opts = ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    Document::parse_with_options(html, opts).map_err(|e| format!("not well-formed: {e}"))
}

pub fn has_class(node: Node, class: &str) -> bool {
    node.attribute("class")
        .is_some_and(|c| c.split_whitespace().any(|c| c == class))
}

pub fn heading_levels(doc: &Document) -> Vec<u8> {
    doc.descendants()
        .filter(|n| n.is_element())
        .filter_map(|n| match n.tag_name().name() {
            "h1" => Some(1),
            "h2" => Some(2),
            "h3" => Some(3),
            "h4" => Some(4),
            "h5" => Some(5),
            "h6" => Some(6),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outline {
    pub levels: Vec<u8>,
    pub comparison_tables: usize,
    pub visualizations: usize,
}

/// Well-formedness, one leading h1, no skipped heading levels, and
/// non-empty alternative text on every chart and image.
pub fn check_accessible(html: &str) -> Result<Outline, String> {
    let doc = parse(html)?;
    let levels = heading_levels(&doc);
    let h1 = levels.iter().filter(|&&l| l == 1).count();
    if h1 != 1 || levels.first() != Some(&1) {
        return Err(format!("expected one leading h1, got levels {levels:?}"));
    }
    if let Some(pair) = levels.windows(2).find(|p| p[1] > p[0] + 1) {
        return Err(format!("heading skip h{} -> h{}", pair[0], pair[1]));
    }
    let charts: Vec<Node> = doc
        .descendants()
        .filter(|n| n.attribute("role") == Some("img"))
        .collect();
    if let Some(bad) = charts
        .iter()
        .find(|n| n.attribute("aria-label").unwrap_or("").trim().is_empty())
    {
        return Err(format!("chart without alternative text at {:?}", bad.range()));
    }
    if doc
        .descendants()
        .any(|n| n.has_tag_name("img") && n.attribute("alt").unwrap_or("").trim().is_empty())
    {
        return Err("image without alt text".into());
    }
    Ok(Outline {
        comparison_tables: doc
            .descendants()
            .filter(|n| n.has_tag_name("table") && has_class(*n, "comparison-table"))
            .count(),
        visualizations: charts.len(),
        levels,
    })
}
