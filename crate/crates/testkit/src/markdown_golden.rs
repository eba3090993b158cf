//! Markdown samples with checked-in HTML renderings.

use std::path::{Path, PathBuf};

use smartreview::markdown::{self, CitationTarget, HtmlOptions};

const KNOWN: &[(&str, &str)] = &[
    ("R100", "PIDGraph"),
    ("R101", "BiblioNet"),
    ("R102", "OrgReg"),
    ("R103", "A materials property graph"),
];

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/markdown")
}

/// Numbers known keys by first use in `source`, as a bibliography would.
pub fn render(source: &str) -> String {
    let ast = markdown::parse(source);
    let order: Vec<String> = markdown::extract_citations(&ast)
        .into_iter()
        .filter(|k| KNOWN.iter().any(|(known, _)| known == k))
        .collect();
    let resolve = |key: &str| {
        let (_, title) = KNOWN.iter().find(|(k, _)| *k == key)?;
        let number = order.iter().position(|k| k == key)? + 1;
        Some(CitationTarget {
            number,
            title: (*title).to_owned(),
        })
    };
    markdown::emit_html_with(&ast, &resolve, HtmlOptions { parent_level: 1 })
}

pub fn samples() -> Vec<PathBuf> {
    let mut found: Vec<_> = std::fs::read_dir(golden_dir())
        .expect("golden directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "md"))
        .collect();
    found.sort();
    found
}

/// Compares every sample with its `.html` file and checks that numbering
/// survives a markdown round trip. Returns the number of samples.
pub fn check() -> Result<usize, String> {
    let samples = samples();
    for md in &samples {
        let name = md.file_name().unwrap().to_string_lossy();
        let source = std::fs::read_to_string(md).map_err(|e| format!("{name}: {e}"))?;
        let expected = std::fs::read_to_string(md.with_extension("html")).map_err(|e| format!("{name}: {e}"))?;
        let html = render(&source);
        if html != expected {
            return Err(format!("{name}: rendering differs from golden HTML"));
        }
        if render(&markdown::emit_markdown(&markdown::parse(&source))) != html {
            return Err(format!("{name}: numbering changed after a round trip"));
        }
    }
    Ok(samples.len())
}
