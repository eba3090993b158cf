//! Rendered HTML for the markdown samples under `tests/golden/markdown`.
//! Set `BLESS=1` to rewrite the expected `.html` files.

use smartreview_testkit::markdown_golden::{check, render, samples};

#[test]
fn samples_match_golden_html() {
    if std::env::var_os("BLESS").is_some() {
        for md in samples() {
            let html = render(&std::fs::read_to_string(&md).unwrap());
            std::fs::write(md.with_extension("html"), html).unwrap();
        }
    }
    let n = check().unwrap();
    assert!(n >= 5, "only {n} samples");
}

#[test]
fn golden_files_cover_the_citation_forms() {
    let all: String = samples().iter().map(|p| std::fs::read_to_string(p).unwrap()).collect();
    assert!(all.contains("[@R100]"));
    assert!(all.contains("[@R101; @R100]"));
    assert!(all.contains("[@R999]"));
    assert!(all.lines().any(|l| l.starts_with("# ")));
}
